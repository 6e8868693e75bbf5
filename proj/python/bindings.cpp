#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fracrenorm/cli.hpp"
#include "fracrenorm/error.hpp"
#include "fracrenorm/graph_directed.hpp"
#include "fracrenorm/io.hpp"
#include "fracrenorm/relations.hpp"

namespace py = pybind11;
using namespace fr;

namespace {

std::vector<std::string> angle_strings(const std::vector<Angle>& as) {
  std::vector<std::string> out;
  for (const auto& a : as) out.push_back(a.to_string());
  return out;
}

MsStructure make_structure(int n, int m, const std::string& theta, std::optional<bool> sym) {
  AngleContext ctx = AngleContext::make(n, m, parse_rational(theta));
  return build_structure(ctx, sym.value_or(default_symmetrize(ctx)));
}

std::vector<std::vector<std::string>> blocks_as_angles(const MsStructure& S, const Partition& J) {
  std::vector<std::vector<std::string>> out;
  for (const auto& b : J.blocks()) {
    std::vector<std::string> blk;
    for (int x : b) blk.push_back(S.boundary[x].to_string());
    out.push_back(blk);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_fracrenorm, mod) {
  mod.doc() = "Self-similar resistance forms on Julia-set models";
  mod.attr("__version__") = cli::tool_version();

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, (std::string(error_code_name(e.code())) + ": " + e.what()).c_str());
    }
  });

  mod.def("critical_angles", [](int n, int m, const std::string& theta) {
    return angle_strings(critical_angles(AngleContext::make(n, m, parse_rational(theta))));
  }, py::arg("n"), py::arg("m"), py::arg("theta"));
  mod.def("post_critical_set", [](int n, int m, const std::string& theta) {
    return angle_strings(post_critical_set(AngleContext::make(n, m, parse_rational(theta))));
  }, py::arg("n"), py::arg("m"), py::arg("theta"));
  mod.def("validate_ms", [](int n, int m, const std::string& theta) {
    ValidityReport r = validate_ms(AngleContext::make(n, m, parse_rational(theta)));
    return py::make_tuple(r.valid, r.problems);
  }, py::arg("n"), py::arg("m"), py::arg("theta"));

  py::class_<MsStructure>(mod, "Structure")
      .def(py::init(&make_structure), py::arg("n"), py::arg("m"), py::arg("theta"),
           py::arg("symmetrize") = py::none())
      .def_property_readonly("boundary", [](const MsStructure& S) { return angle_strings(S.boundary); })
      .def_property_readonly("glue_points", [](const MsStructure& S) { return angle_strings(S.glue_points); })
      .def_property_readonly("symmetrized", [](const MsStructure& S) { return S.symmetrized; })
      .def_property_readonly("num_level1", [](const MsStructure& S) { return S.level1.refined_size; })
      .def("num_vertices", [](const MsStructure& S, int k) { return level_vertices(S, k).num_vertices; })
      .def("rotation_invariant", &MsStructure::rotation_invariant)
      .def("to_json", [](const MsStructure& S) { return structure_to_json(S).dump(); });

  mod.def("solve_eigenform", [](const MsStructure& S, double tol) {
    SolverOptions o;
    o.tol = tol;
    HarmonicStructure H = solve_eigenform(S, o);
    py::dict d;
    d["weights"] = H.form.weights();
    d["eta"] = H.eta;
    d["eta_rayleigh"] = H.eta_rayleigh;
    d["residual"] = H.residual;
    d["iterations"] = H.iterations;
    return d;
  }, py::arg("structure"), py::arg("tol") = 1e-12);
  mod.def("renorm_T", [](const MsStructure& S, const Eigen::MatrixXd& w) {
    return renorm_T(S, ConductanceForm(w)).weights();
  });
  mod.def("trace", [](const Eigen::MatrixXd& w, const std::vector<int>& boundary) {
    return trace(ConductanceForm(w), boundary).weights();
  });
  mod.def("effective_resistance", [](const Eigen::MatrixXd& w, int p, int q) {
    return effective_resistance(ConductanceForm(w), p, q);
  });

  mod.def("enumerate_preserved", [](const MsStructure& S, bool require_G, int cap) {
    std::vector<std::vector<std::vector<std::string>>> out;
    for (const auto& J : enumerate_preserved(S, require_G, cap)) out.push_back(blocks_as_angles(S, J));
    return out;
  }, py::arg("structure"), py::arg("require_G") = false, py::arg("cap") = 12);
  mod.def("build_J_plus_minus", [](const MsStructure& S) {
    auto [p, q] = build_J_plus_minus(S);
    return py::make_tuple(blocks_as_angles(S, p), blocks_as_angles(S, q));
  });

  mod.def("gd_solve", [](int n, int m, double tol) {
    GdSolveOptions o;
    o.tol = tol;
    GdHarmonicStructure H = gd_solve(n, m, o);
    py::dict d;
    d["weights"] = H.form.weights();
    d["eta"] = H.eta;
    d["residual"] = H.residual;
    d["converged"] = H.converged;
    d["degenerate"] = H.degenerate;
    d["verdict"] = std::string(gd_existence_name(H.verdict));
    d["expected"] = std::string(gd_existence_name(H.expected));
    return d;
  }, py::arg("n"), py::arg("m"), py::arg("tol") = 1e-12);
  mod.def("gd_relation_rhos", [](int n, int m) {
    auto v = gd_relation_rhos(n, m).values();
    return std::vector<double>(v.begin(), v.end());
  });
  mod.def("gd_num_level2", [](int n, int m) { return build_gd_structure(n, m).num_level2; });

  mod.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<std::string> full{"fr-workbench"};
    full.insert(full.end(), args.begin(), args.end());
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = cli::run(full, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });
}
