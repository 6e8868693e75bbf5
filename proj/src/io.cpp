#include "fracrenorm/io.hpp"

#include <algorithm>
#include <map>

#include "fracrenorm/error.hpp"

namespace fr {

namespace {

int label_index(const std::vector<std::string>& labels, const std::string& s) {
  auto it = std::find(labels.begin(), labels.end(), s);
  if (it == labels.end()) throw Error(ErrorCode::VertexMismatch, "unknown vertex '" + s + "'");
  return static_cast<int>(it - labels.begin());
}

}  // namespace

Json context_to_json(const AngleContext& ctx) {
  return Json{{"n", ctx.n()}, {"m", ctx.m()}, {"theta", ctx.theta().to_string()}};
}

AngleContext context_from_json(const Json& j, std::vector<std::string>* warnings) {
  try {
    return AngleContext::make(j.at("n").get<int>(), j.at("m").get<int>(),
                              parse_rational(j.at("theta").get<std::string>()), warnings);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("bad context: ") + e.what());
  }
}

std::vector<std::string> boundary_labels(const MsStructure& S) {
  std::vector<std::string> out;
  for (const auto& a : S.boundary) out.push_back(a.to_string());
  return out;
}

std::vector<std::string> index_labels(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

Json structure_to_json(const MsStructure& S) {
  Json j;
  j["ctx"] = context_to_json(S.ctx);
  j["symmetrized"] = S.symmetrized;
  j["boundary"] = boundary_labels(S);
  Json glue = Json::array();
  for (const auto& g : S.glue_points) glue.push_back(g.to_string());
  j["glue_points"] = glue;
  Json cells = Json::object();
  for (size_t x = 0; x < S.boundary.size(); ++x) cells[S.boundary[x].to_string()] = S.cell_of[x];
  j["cells"] = cells;
  j["rotation_order"] = S.rotation_order;
  return j;
}

MsStructure structure_from_json(const Json& j) {
  try {
    MsStructure S = build_structure(context_from_json(j.at("ctx")), j.at("symmetrized").get<bool>());
    if (j.contains("boundary") && j.at("boundary").get<std::vector<std::string>>() != boundary_labels(S))
      throw Error(ErrorCode::Schema, "stored boundary does not match the rebuilt structure");
    return S;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("bad structure: ") + e.what());
  }
}

Json level_set_to_json(const GluedVertexSet& g) {
  Json j;
  j["level"] = g.level;
  j["num_vertices"] = g.num_vertices;
  Json merges = Json::array();
  for (const auto& m : g.merges) merges.push_back({m[0], m[1], m[2]});
  j["merges"] = merges;
  Json inc = Json::array();
  for (size_t v = 0; v < g.inclusion.size(); ++v) inc.push_back({v, g.inclusion[v]});
  j["inclusion"] = inc;
  j["boundary_ids"] = g.boundary_ids;
  return j;
}

Json form_to_json(const ConductanceForm& D, const std::vector<std::string>& labels) {
  Json j;
  j["vertices"] = labels;
  Json edges = Json::array();
  for (int x = 0; x < D.size(); ++x)
    for (int y = x + 1; y < D.size(); ++y)
      if (D.weight(x, y) != 0) edges.push_back({labels[x], labels[y], D.weight(x, y)});
  j["edges"] = edges;
  return j;
}

ConductanceForm form_from_json(const Json& j, const std::vector<std::string>& labels) {
  try {
    auto verts = j.at("vertices").get<std::vector<std::string>>();
    if (verts != labels) throw Error(ErrorCode::VertexMismatch, "form vertices do not match");
    ConductanceForm D(static_cast<int>(labels.size()));
    for (const auto& e : j.at("edges")) {
      double w = e.at(2).get<double>();
      if (w < 0) throw Error(ErrorCode::InvalidInput, "negative conductance");
      D.set_weight(label_index(labels, e.at(0).get<std::string>()), label_index(labels, e.at(1).get<std::string>()), w);
    }
    return D;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("bad form: ") + e.what());
  }
}

Json harmonic_to_json(const HarmonicStructure& H, const std::vector<std::string>& labels) {
  Json j;
  j["eta"] = H.eta;
  j["eta_inverse"] = 1.0 / H.eta;
  j["eta_rayleigh"] = H.eta_rayleigh;
  j["residual"] = H.residual;
  j["form"] = form_to_json(H.form, labels);
  j["iterations"] = H.iterations;
  j["normalization"] = "mass";
  return j;
}

Json partition_to_json(const Partition& P, const std::vector<std::string>& labels) {
  Json blocks = Json::array();
  for (const auto& b : P.blocks()) {
    Json jb = Json::array();
    for (int x : b) jb.push_back(labels[x]);
    blocks.push_back(jb);
  }
  return Json{{"blocks", blocks}};
}

Partition partition_from_json(const Json& j, const std::vector<std::string>& labels) {
  try {
    std::vector<std::vector<int>> blocks;
    for (const auto& b : j.at("blocks")) {
      blocks.emplace_back();
      for (const auto& s : b) blocks.back().push_back(label_index(labels, s.get<std::string>()));
    }
    return Partition::from_blocks(static_cast<int>(labels.size()), blocks);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("bad relation: ") + e.what());
  }
}

std::vector<std::string> gd_corner_labels() { return {"p0", "q0", "p1", "q1"}; }

Json gd_structure_to_json(const GdStructure& G) {
  Json j;
  j["kind"] = "graph_directed";
  j["n"] = G.n;
  j["m"] = G.m;
  j["num_level2_vertices"] = G.num_level2;
  j["p_ids"] = G.p_ids;
  j["q_ids"] = G.q_ids;
  Json cells = Json::array();
  for (const auto& c : G.cells) {
    Json jc;
    jc["l"] = c.l;
    jc["num_vertices"] = c.num_vertices;
    jc["outer"] = c.outer;
    jc["inner"] = c.inner;
    jc["broken_junctions"] = c.broken_junctions;
    cells.push_back(jc);
  }
  j["cells"] = cells;
  j["corner_legend"] = {corner_name(0), corner_name(1), corner_name(2), corner_name(3)};
  Json cm = Json::array();
  for (const auto& e : G.corner_map) cm.push_back({e.k, e.l, e.corner, e.level2_id});
  j["corner_map"] = cm;
  return j;
}

}  // namespace fr
