#pragma once

#include <string>
#include <vector>

#include "fracrenorm/graph_directed.hpp"
#include "fracrenorm/ms_structure.hpp"
#include "fracrenorm/network.hpp"
#include "fracrenorm/partition.hpp"
#include "fracrenorm/renormalization.hpp"
#include "json.hpp"

namespace fr {

using Json = nlohmann::ordered_json;

Json context_to_json(const AngleContext& ctx);
AngleContext context_from_json(const Json& j, std::vector<std::string>* warnings = nullptr);

Json structure_to_json(const MsStructure& S);
// Rebuilds from ctx + symmetrized and checks the stored boundary.
MsStructure structure_from_json(const Json& j);
Json level_set_to_json(const GluedVertexSet& g);

std::vector<std::string> boundary_labels(const MsStructure& S);
std::vector<std::string> index_labels(int n);

Json form_to_json(const ConductanceForm& D, const std::vector<std::string>& labels);
ConductanceForm form_from_json(const Json& j, const std::vector<std::string>& labels);

Json harmonic_to_json(const HarmonicStructure& H, const std::vector<std::string>& labels);
Json partition_to_json(const Partition& P, const std::vector<std::string>& labels);
Partition partition_from_json(const Json& j, const std::vector<std::string>& labels);

Json gd_structure_to_json(const GdStructure& G);
std::vector<std::string> gd_corner_labels();  // p0, q0, p1, q1

}  // namespace fr
