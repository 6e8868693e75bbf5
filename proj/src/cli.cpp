#include "fracrenorm/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fracrenorm/error.hpp"
#include "fracrenorm/graph_directed.hpp"
#include "fracrenorm/relations.hpp"

#ifndef FR_VERSION
#define FR_VERSION "dev"
#endif

namespace fr::cli {

const char* tool_version() { return FR_VERSION; }

namespace {

struct Options {
  int n = 0;
  int m = 0;
  std::string theta;
  bool symmetrize = false;
  bool no_symmetrize = false;
  std::string structure_path;
  double tol = 1e-12;
  int max_iter = 100000;
  int k_max = 8;
  int cap = 12;
  int level = 1;
  int threads = 0;
  std::string values;
  std::string out;
  std::string format = "json";
};

constexpr double kResidualTol = 1e-10;
constexpr double kEtaAgreement = 1e-9;
constexpr double kFlowTol = 1e-9;
constexpr double kResistanceTol = 1e-9;
constexpr double kCertificateMargin = 1e-6;

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonConvergence:
    case ErrorCode::CapExceeded:
    case ErrorCode::DepthCap:
      return NonConvergence;
    case ErrorCode::InvalidInput:
    case ErrorCode::ModulusMismatch:
    case ErrorCode::CriticalAngle:
    case ErrorCode::NotAPermutation:
    case ErrorCode::InvalidMs:
    case ErrorCode::NotInvariant:
    case ErrorCode::VertexMismatch:
    case ErrorCode::MissingValue:
    case ErrorCode::KappaUndefined:
    case ErrorCode::SubsetInvalid:
    case ErrorCode::Schema:
    case ErrorCode::Disconnected:
      return InvalidInput;
    default:
      return InvariantViolation;
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::Schema, path + ": " + e.what());
  }
}

void write_text(const std::string& text, const Options& o, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw Error(ErrorCode::InvalidInput, "cannot write " + o.out);
  f << text;
}

std::optional<bool> sym_choice(const Options& o) {
  if (o.symmetrize && o.no_symmetrize) throw Error(ErrorCode::InvalidInput, "--symmetrize and --no-symmetrize conflict");
  if (o.symmetrize) return true;
  if (o.no_symmetrize) return false;
  return std::nullopt;
}

MsStructure load_structure(const Options& o, std::vector<std::string>& warnings) {
  if (!o.structure_path.empty()) {
    Json j = read_json_file(o.structure_path);
    // accept a bare structure or a `structure` report
    if (j.contains("schema") && j.contains("result")) j = j["result"].at("structure");
    MsStructure S = structure_from_json(j);
    auto choice = sym_choice(o);
    if (choice && *choice != S.symmetrized) S = build_structure(S.ctx, *choice);
    return S;
  }
  if (o.n == 0 || o.m == 0 || o.theta.empty())
    throw Error(ErrorCode::InvalidInput, "need --n, --m and --theta (or --structure)");
  AngleContext ctx = AngleContext::make(o.n, o.m, parse_rational(o.theta), &warnings);
  return build_structure(ctx, sym_choice(o).value_or(default_symmetrize(ctx)));
}

HarmonicStructure solve(const MsStructure& S, const Options& o) {
  SolverOptions so;
  so.tol = o.tol;
  so.max_iter = o.max_iter;
  return solve_eigenform(S, so);
}

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

std::string csv_number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

Json ms_input(const MsStructure& S, const Options& o) {
  Json in;
  in["structure"] = structure_to_json(S);
  in["tol"] = o.tol;
  in["max_iter"] = o.max_iter;
  return in;
}

struct Outcome {
  Json input;
  Json tolerances;
  Json result;
  std::string csv;  // used with --format csv
  int code = Ok;
};

Outcome cmd_structure(const Options& o, std::vector<std::string>& warnings) {
  Outcome r;
  MsStructure S = load_structure(o, warnings);
  r.input = Json{{"ctx", context_to_json(S.ctx)}, {"symmetrized", S.symmetrized}, {"level", o.level}};
  r.tolerances = Json{{"exact", true}};
  r.result["structure"] = structure_to_json(S);
  r.result["num_boundary"] = S.boundary.size();
  r.result["num_level1"] = S.level1.refined_size;
  Json crit = Json::array();
  for (const auto& c : critical_angles(S.ctx)) crit.push_back(c.to_string());
  r.result["critical_angles"] = crit;
  try {
    r.result["kappa"] = kappa(S.ctx);
  } catch (const Error&) {
    r.result["kappa"] = nullptr;
  }
  r.result["rotation_invariant"] = S.rotation_invariant();
  if (o.level > 0) r.result["level_set"] = level_set_to_json(level_vertices(S, o.level));
  return r;
}

Outcome cmd_solve(const Options& o, std::vector<std::string>& warnings) {
  Outcome r;
  MsStructure S = load_structure(o, warnings);
  HarmonicStructure H = solve(S, o);
  ResidualReport v = verify_harmonic_structure(S, H.form, H.eta);
  r.input = ms_input(S, o);
  r.tolerances = Json{{"tol", o.tol}, {"residual", kResidualTol}, {"eta_agreement", kEtaAgreement}};
  r.result = harmonic_to_json(H, boundary_labels(S));
  r.result["verification"] = Json{{"residual", v.residual},
                                  {"max_relative_dev", v.max_relative_dev},
                                  {"extension_consistency", v.extension_consistency}};
  if (std::abs(H.eta - H.eta_rayleigh) > kEtaAgreement * H.eta) {
    warnings.push_back("mass and Rayleigh estimates of eta disagree");
    r.code = InvariantViolation;
  }
  return r;
}

Json witness_json(const RelationWitness& w, const std::vector<std::string>& labels) {
  Json j = partition_to_json(w.relation, labels);
  j["rho_over"] = w.rho_over;
  j["rho_under"] = w.rho_under_quotient;
  j["rho_under_relation"] = w.rho_under_relation;
  j["quotient_exact"] = w.quotient_exact;
  j["k"] = w.k;
  return j;
}

Outcome cmd_relations(const Options& o, std::vector<std::string>& warnings) {
  Outcome r;
  MsStructure S = load_structure(o, warnings);
  const auto labels = boundary_labels(S);
  HarmonicStructure H = solve(S, o);
  r.input = ms_input(S, o);
  r.input["cap"] = o.cap;
  r.input["k_max"] = o.k_max;
  r.tolerances = Json{{"tol", o.tol},
                      {"residual", kResidualTol},
                      {"eta_agreement", kEtaAgreement},
                      {"certificate_margin", kCertificateMargin},
                      {"rho", "search certificates (one-sided)"}};
  r.result["eta"] = H.eta;
  r.result["eta_inverse"] = 1.0 / H.eta;
  r.result["form"] = form_to_json(H.form, labels);

  const bool inv = S.rotation_invariant();
  std::vector<Partition> all = enumerate_preserved(S, false, o.cap, o.threads);
  std::vector<Partition> g_rel;
  if (inv) {
    auto group = rotation_group(S);
    for (const auto& J : all)
      if (std::all_of(group.begin(), group.end(), [&](const auto& g) { return J.invariant_under(g); })) g_rel.push_back(J);
  }
  r.result["num_partitions"] = bell_number(static_cast<int>(S.boundary.size()));
  Json jall = Json::array(), jg = Json::array();
  for (const auto& J : all) jall.push_back(partition_to_json(J, labels));
  for (const auto& J : g_rel) jg.push_back(partition_to_json(J, labels));
  r.result["preserved"] = jall;
  r.result["preserved_G"] = inv ? jg : Json(nullptr);

  try {
    auto [jp, jm] = build_J_plus_minus(S);
    r.result["J_plus"] = partition_to_json(jp, labels);
    r.result["J_minus"] = partition_to_json(jm, labels);
    r.result["J_plus_preserved"] = is_preserved(S.level1, jp);
    r.result["J_minus_preserved"] = is_preserved(S.level1, jm);
  } catch (const Error& e) {
    r.result["J_plus"] = nullptr;
    r.result["J_minus"] = nullptr;
    warnings.push_back(e.what());
  }

  VerdictReport vr = sabot_verdict(S, H, inv ? g_rel : all);
  Json jv;
  jv["verdict"] = verdict_name(vr.verdict);
  jv["group"] = inv ? "rotations" : "trivial";
  Json ws = Json::array();
  for (const auto& w : vr.witnesses) ws.push_back(witness_json(w, labels));
  jv["witnesses"] = ws;
  Json op = Json::array();
  for (auto [a, b] : vr.ordered_pairs) op.push_back({a, b});
  jv["ordered_pairs"] = op;
  jv["notes"] = vr.notes;
  r.result["verdict"] = jv;

  Json certs = Json::array();
  for (const auto& J : all) {
    if (J.is_trivial()) continue;
    UniquenessCertificate c = uniqueness_certificate(S.level1, H.form, H.eta, J, o.k_max, kCertificateMargin);
    Json jc = partition_to_json(J, labels);
    jc["certified"] = c.certified;
    jc["k"] = c.k;
    jc["value"] = c.value;
    jc["trajectory"] = c.trajectory;
    jc["monotone"] = c.monotone;
    certs.push_back(jc);
  }
  r.result["certificates"] = certs;

  std::ostringstream csv;
  csv << "relation,rho_over,rho_under,rho_under_relation,quotient_exact,k\n";
  for (const auto& w : vr.witnesses) {
    std::string rel;
    for (const auto& b : w.relation.blocks()) {
      rel += "{";
      for (size_t i = 0; i < b.size(); ++i) rel += (i ? " " : "") + labels[b[i]];
      rel += "}";
    }
    csv << rel << "," << csv_number(w.rho_over) << "," << csv_number(w.rho_under_quotient) << ","
        << csv_number(w.rho_under_relation) << "," << (w.quotient_exact ? "true" : "false") << "," << w.k << "\n";
  }
  r.csv = csv.str();
  return r;
}

ConductanceForm level_form(const MsStructure& S, const HarmonicStructure& H, const std::vector<GluedVertexSet>& tower) {
  ConductanceForm D = H.form;
  for (size_t k = 1; k < tower.size(); ++k) {
    ReplicationScheme sc{tower[k - 1].num_vertices, tower[k].num_vertices, tower[k].copy_map, tower[k].inclusion};
    D = replicate(sc, D).scaled(H.eta);
  }
  (void)S;
  return D;
}

Outcome cmd_resistance(const Options& o, std::vector<std::string>& warnings) {
  Outcome r;
  MsStructure S = load_structure(o, warnings);
  HarmonicStructure H = solve(S, o);
  auto tower = level_tower(S, o.level);
  ConductanceForm D = level_form(S, H, tower);
  Eigen::MatrixXd R = resistance_matrix(D);
  r.input = ms_input(S, o);
  r.input["level"] = o.level;
  r.tolerances = Json{{"tol", o.tol}, {"resistance", kResistanceTol}};
  const auto& g = tower.back();
  r.result["level"] = o.level;
  r.result["eta"] = H.eta;
  r.result["num_vertices"] = g.num_vertices;
  r.result["boundary_ids"] = g.boundary_ids;
  Json rows = Json::array();
  for (int x = 0; x < R.rows(); ++x) rows.push_back(vector_json(R.row(x).transpose()));
  r.result["resistance"] = rows;
  std::ostringstream csv;
  csv << "vertex";
  for (int y = 0; y < R.cols(); ++y) csv << "," << y;
  csv << "\n";
  for (int x = 0; x < R.rows(); ++x) {
    csv << x;
    for (int y = 0; y < R.cols(); ++y) csv << "," << csv_number(R(x, y));
    csv << "\n";
  }
  r.csv = csv.str();
  return r;
}

Eigen::VectorXd parse_values(const std::string& s, int n) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  if (s.empty()) {
    f(0) = 1.0;
    return f;
  }
  std::stringstream ss(s);
  std::string tok;
  int i = 0;
  while (std::getline(ss, tok, ',')) {
    if (i >= n) throw Error(ErrorCode::InvalidInput, "too many boundary values");
    try {
      f(i++) = std::stod(tok);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "bad boundary value '" + tok + "'");
    }
  }
  if (i != n) throw Error(ErrorCode::MissingValue, "expected " + std::to_string(n) + " boundary values");
  return f;
}

Outcome cmd_flows(const Options& o, std::vector<std::string>& warnings) {
  Outcome r;
  MsStructure S = load_structure(o, warnings);
  const auto labels = boundary_labels(S);
  HarmonicStructure H = solve(S, o);
  Eigen::VectorXd f = parse_values(o.values, static_cast<int>(S.boundary.size()));
  Eigen::VectorXd h = harmonic_extension(replicate(S, H.form), S.level1.boundary_image, f).values;
  CellFlowReport fl = per_cell_flows(S, H, h, kFlowTol);
  r.input = ms_input(S, o);
  r.input["boundary_values"] = vector_json(f);
  r.tolerances = Json{{"tol", o.tol}, {"flow", kFlowTol}};
  r.result["eta"] = H.eta;
  r.result["level1_values"] = vector_json(h);
  Json bf = Json::object();
  for (size_t x = 0; x < labels.size(); ++x) bf[labels[x]] = fl.boundary_flows(x);
  r.result["boundary_flows"] = bf;
  Json cf = Json::array();
  for (const auto& c : fl.cell_flows) cf.push_back(vector_json(c));
  r.result["cell_flows"] = cf;
  Json v0h = Json::array();
  for (int x : fl.boundary_with_flow) v0h.push_back(labels[x]);
  r.result["boundary_with_flow"] = v0h;
  r.result["critical_with_flow"] = fl.critical_with_flow;
  r.result["checks"] = Json{{"harmonic_residual", fl.harmonic_residual}, {"p1", fl.p1}, {"p2", fl.p2}, {"p3", fl.p3}};
  if (std::max({fl.p1, fl.p2, fl.p3}) > kFlowTol) r.code = InvariantViolation;
  return r;
}

void need_gd(const Options& o) {
  if (o.n == 0 || o.m == 0) throw Error(ErrorCode::InvalidInput, "need --n and --m");
}

Outcome cmd_gd_build(const Options& o) {
  need_gd(o);
  Outcome r;
  r.input = Json{{"n", o.n}, {"m", o.m}};
  r.tolerances = Json{{"exact", true}};
  r.result = gd_structure_to_json(build_gd_structure(o.n, o.m));
  return r;
}

Outcome cmd_gd_solve(const Options& o) {
  need_gd(o);
  Outcome r;
  GdSolveOptions so;
  so.tol = o.tol;
  so.max_iter = o.max_iter;
  GdHarmonicStructure H = gd_solve(o.n, o.m, so);
  r.input = Json{{"n", o.n}, {"m", o.m}, {"tol", o.tol}, {"max_iter", o.max_iter}};
  r.tolerances = Json{{"tol", o.tol}, {"residual", kResidualTol}};
  r.result["eta"] = H.eta;
  r.result["eta_inverse"] = 1.0 / H.eta;
  r.result["residual"] = H.residual;
  r.result["form"] = form_to_json(H.form, gd_corner_labels());
  r.result["iterations"] = H.iterations;
  r.result["normalization"] = "mass";
  r.result["converged"] = H.converged;
  r.result["degenerate"] = H.degenerate;
  r.result["limit_support"] = partition_to_json(H.limit_support, gd_corner_labels());
  r.result["expected"] = gd_existence_name(H.expected);
  r.result["verdict"] = gd_existence_name(H.verdict);
  r.result["diagnosis"] = H.diagnosis;
  if (o.m == 1) r.result["closed_form_eta"] = (2.0 * o.n + 1) / (o.n + 1);
  return r;
}

Outcome cmd_gd_rhos(const Options& o) {
  need_gd(o);
  Outcome r;
  GdRhoTable t = gd_relation_rhos(o.n, o.m);
  const auto labels = gd_corner_labels();
  r.input = Json{{"n", o.n}, {"m", o.m}};
  r.tolerances = Json{{"rho", "search certificates (one-sided)"}, {"recompute", 1e-9}};
  r.result["J1"] = partition_to_json(t.J1, labels);
  r.result["J2"] = partition_to_json(t.J2, labels);
  r.result["J1_preserved"] = t.J1_preserved;
  r.result["J2_preserved"] = t.J2_preserved;
  Json pres = Json::array();
  for (const auto& J : t.preserved) pres.push_back(partition_to_json(J, labels));
  r.result["preserved"] = pres;
  const double n = o.n, m = o.m;
  struct Row {
    const char* name;
    const RhoReport* rep;
    bool over;
    double closed;
  };
  Row rows[] = {{"rho_over_J1", &t.J1_relation, true, 0.5},
                {"rho_under_quotient_J1", &t.J1_quotient, false, 1 / m + 1 / n},
                {"rho_over_J2", &t.J2_relation, true, 1 / n},
                {"rho_under_quotient_J2", &t.J2_quotient, false, m * n / (m + n)}};
  Json jr = Json::array();
  std::ostringstream csv;
  csv << "quantity,value,closed_form,exact,basis_dim\n";
  for (const auto& row : rows) {
    Json j;
    j["quantity"] = row.name;
    j["value"] = row.over ? row.rep->rho_over : row.rep->rho_under;
    j["closed_form"] = row.closed;
    j["exact"] = row.rep->exact;
    j["basis_dim"] = row.rep->basis_dim;
    const auto& form = row.over ? row.rep->over_form : row.rep->under_form;
    j["form"] = row.rep->side == RhoSide::Relation ? form_to_json(form, labels)
                                                    : form_to_json(form, index_labels(form.size()));
    jr.push_back(j);
    csv << row.name << "," << csv_number(j["value"].get<double>()) << "," << csv_number(row.closed) << ","
        << (row.rep->exact ? "true" : "false") << "," << row.rep->basis_dim << "\n";
  }
  r.result["rows"] = jr;
  r.csv = csv.str();
  return r;
}

Json assemble(const std::string& command, const std::vector<std::string>& args, const Outcome& oc,
              const std::vector<std::string>& warnings, double seconds) {
  Json rep;
  rep["schema"] = kSchema;
  rep["command"] = command;
  rep["argv"] = std::vector<std::string>(args.begin() + 1, args.end());
  rep["tool_version"] = tool_version();
  rep["input"] = oc.input;
  rep["tolerances"] = oc.tolerances;
  rep["result"] = oc.result;
  rep["warnings"] = warnings;
  rep["wall_time_s"] = seconds;
  return rep;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workbench for self-similar resistance forms on MS Julia sets"};
  app.require_subcommand(1);
  Options o;
  auto add_ctx = [&o](CLI::App* c) {
    c->add_option("--n", o.n, "degree n");
    c->add_option("--m", o.m, "pole order m");
    c->add_option("--theta", o.theta, "theta as p/q");
    c->add_flag("--symmetrize", o.symmetrize, "use the rotation-closed boundary");
    c->add_flag("--no-symmetrize", o.no_symmetrize, "use the plain post-critical set");
    c->add_option("--structure", o.structure_path, "structure JSON instead of --n/--m/--theta");
    c->add_option("--tol", o.tol, "solver tolerance");
    c->add_option("--max-iter", o.max_iter, "solver iteration cap");
    c->add_option("--out", o.out, "output file (default stdout)");
    c->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto* structure = app.add_subcommand("structure", "build the self-similar structure");
  add_ctx(structure);
  structure->add_option("--level", o.level, "export the glued level set");
  auto* solve_c = app.add_subcommand("solve", "solve for the eigenform and eta");
  add_ctx(solve_c);
  auto* relations = app.add_subcommand("relations", "preserved relations, verdict and certificates");
  add_ctx(relations);
  relations->add_option("--k-max", o.k_max, "largest iterate for the uniqueness certificate");
  relations->add_option("--cap", o.cap, "largest boundary size for exhaustive enumeration");
  relations->add_option("--threads", o.threads, "enumeration workers");
  auto* resistance = app.add_subcommand("resistance", "pairwise effective resistances at a level");
  add_ctx(resistance);
  resistance->add_option("--level", o.level, "level k");
  auto* flows_c = app.add_subcommand("flows", "per-cell flows of a harmonic function");
  add_ctx(flows_c);
  flows_c->add_option("--values", o.values, "comma-separated boundary values");
  auto* gd = app.add_subcommand("gd", "graph-directed model");
  gd->require_subcommand(1);
  auto add_gd = [&o](CLI::App* c) {
    c->add_option("--n", o.n, "degree n");
    c->add_option("--m", o.m, "pole order m");
    c->add_option("--tol", o.tol, "solver tolerance");
    c->add_option("--max-iter", o.max_iter, "solver iteration cap");
    c->add_option("--out", o.out, "output file (default stdout)");
    c->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto* gd_build = gd->add_subcommand("build", "vertex and corner-map model");
  add_gd(gd_build);
  auto* gd_solve_c = gd->add_subcommand("solve", "rotation-reduced renormalization");
  add_gd(gd_solve_c);
  auto* gd_rhos = gd->add_subcommand("rhos", "rho table for the two corner relations");
  add_gd(gd_rhos);
  auto* validate = app.add_subcommand("validate", "check a report");
  std::string report_path;
  validate->add_option("path", report_path, "report file")->required();
  validate->add_option("--out", o.out, "output file (default stdout)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return InvalidInput;
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> warnings;
  std::string command;
  try {
    if (validate->parsed()) {
      Validation v = validate_report_file(report_path);
      Json j{{"valid", v.ok}, {"problems", v.problems}};
      write_text(j.dump(2) + "\n", o, out);
      if (!v.ok) {
        for (const auto& p : v.problems) err << "invalid: " << p << "\n";
        return v.schema_error ? InvalidInput : InvariantViolation;
      }
      return Ok;
    }
    Outcome oc;
    if (structure->parsed()) {
      command = "structure";
      oc = cmd_structure(o, warnings);
    } else if (solve_c->parsed()) {
      command = "solve";
      oc = cmd_solve(o, warnings);
    } else if (relations->parsed()) {
      command = "relations";
      oc = cmd_relations(o, warnings);
    } else if (resistance->parsed()) {
      command = "resistance";
      oc = cmd_resistance(o, warnings);
    } else if (flows_c->parsed()) {
      command = "flows";
      oc = cmd_flows(o, warnings);
    } else if (gd_build->parsed()) {
      command = "gd_build";
      oc = cmd_gd_build(o);
    } else if (gd_solve_c->parsed()) {
      command = "gd_solve";
      oc = cmd_gd_solve(o);
    } else if (gd_rhos->parsed()) {
      command = "gd_rhos";
      oc = cmd_gd_rhos(o);
    }
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    if (o.format == "csv") {
      if (oc.csv.empty()) throw Error(ErrorCode::InvalidInput, "csv output is only offered for rho tables and resistances");
      write_text(oc.csv, o, out);
    } else {
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      write_text(assemble(command, args, oc, warnings, secs).dump(2) + "\n", o, out);
    }
    return oc.code;
  } catch (const fr::NonConvergence& e) {
    err << "error: " << e.what() << "\n";
    return NonConvergence;
  } catch (const Error& e) {
    err << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return InvariantViolation;
  }
}

namespace {

void fail(Validation& v, const std::string& msg, bool schema = false) {
  v.ok = false;
  v.schema_error = v.schema_error || schema;
  v.problems.push_back(msg);
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

void check_eigenform(Validation& v, const Json& rep, const MsStructure& S) {
  const Json& res = rep["result"];
  const Json& tol = rep["tolerances"];
  ConductanceForm D = form_from_json(res.at("form"), boundary_labels(S));
  double eta = res.at("eta").get<double>();
  double residual_tol = tol.at("residual").get<double>();
  double r = eigen_residual(S.level1, D, eta);
  if (!(r <= 10 * residual_tol))
    fail(v, "recomputed residual " + std::to_string(r) + " exceeds 10x the stated tolerance");
  double mass_eta = D.mass() / renorm_T(S.level1, D).mass();
  if (!(rel_gap(mass_eta, eta) <= 10 * tol.at("eta_agreement").get<double>()))
    fail(v, "eta does not match the mass ratio of the embedded form");
  if (res.contains("eta_inverse") && rel_gap(res["eta_inverse"].get<double>(), 1.0 / eta) > 1e-12)
    fail(v, "eta_inverse inconsistent with eta");
}

}  // namespace

Validation validate_report(const Json& rep) {
  Validation v;
  if (!rep.is_object()) {
    fail(v, "report is not a JSON object", true);
    return v;
  }
  if (rep.value("schema", "") != std::string(kSchema)) fail(v, "schema field missing or not fr-1", true);
  for (const char* key : {"command", "tool_version"})
    if (!rep.contains(key) || !rep[key].is_string()) fail(v, std::string("missing string field ") + key, true);
  for (const char* key : {"input", "tolerances", "result"})
    if (!rep.contains(key) || !rep[key].is_object()) fail(v, std::string("missing object ") + key, true);
  if (rep.contains("tolerances") && rep["tolerances"].is_object() && rep["tolerances"].empty())
    fail(v, "empty tolerance block", true);
  if (!rep.contains("wall_time_s") || !rep["wall_time_s"].is_number()) fail(v, "missing wall_time_s", true);
  if (!v.ok) return v;

  const std::string cmd = rep["command"];
  const Json& in = rep["input"];
  const Json& res = rep["result"];
  try {
    if (cmd == "structure") {
      MsStructure S = structure_from_json(res.at("structure"));
      Json rebuilt = structure_to_json(S);
      if (rebuilt != res.at("structure")) fail(v, "structure differs from a rebuild");
      if (res.at("num_level1").get<int>() != S.level1.refined_size) fail(v, "level-1 count differs");
    } else if (cmd == "solve") {
      check_eigenform(v, rep, structure_from_json(in.at("structure")));
    } else if (cmd == "relations") {
      MsStructure S = structure_from_json(in.at("structure"));
      check_eigenform(v, rep, S);
      const auto labels = boundary_labels(S);
      for (const auto& j : res.at("preserved"))
        if (!is_preserved(S.level1, partition_from_json(j, labels)))
          fail(v, "listed relation is not preserved: " + j.dump());
      for (const auto& c : res.at("certificates"))
        if (c.at("certified").get<bool>() && !(c.at("value").get<double>() < 1 - rep["tolerances"].at("certificate_margin").get<double>()))
          fail(v, "certificate value does not clear the margin");
    } else if (cmd == "resistance") {
      MsStructure S = structure_from_json(in.at("structure"));
      SolverOptions so;
      so.tol = in.at("tol").get<double>();
      so.max_iter = in.at("max_iter").get<int>();
      HarmonicStructure H = solve_eigenform(S, so);
      auto tower = level_tower(S, in.at("level").get<int>());
      Eigen::MatrixXd R = resistance_matrix(level_form(S, H, tower));
      const auto& rows = res.at("resistance");
      double tol = rep["tolerances"].at("resistance").get<double>();
      if (static_cast<Eigen::Index>(rows.size()) != R.rows()) fail(v, "resistance matrix size differs");
      else
        for (Eigen::Index x = 0; x < R.rows(); ++x)
          for (Eigen::Index y = 0; y < R.cols(); ++y)
            if (rel_gap(rows[x][y].get<double>(), R(x, y)) > 10 * tol && std::abs(R(x, y)) > 1e-300) {
              fail(v, "resistance entry differs from recomputation");
              x = R.rows();
              break;
            }
    } else if (cmd == "flows") {
      double tol = rep["tolerances"].at("flow").get<double>();
      for (const char* k : {"p1", "p2", "p3"})
        if (!(res.at("checks").at(k).get<double>() <= 10 * tol)) fail(v, std::string(k) + " above tolerance");
    } else if (cmd == "gd_build") {
      int N = in.at("n").get<int>() + in.at("m").get<int>();
      if (res.at("num_level2_vertices").get<int>() != 2 * N * N) fail(v, "level-2 count is not 2(m+n)^2");
      if (res.at("corner_map").size() != static_cast<size_t>(4 * N * N)) fail(v, "corner map incomplete");
    } else if (cmd == "gd_solve") {
      GdStructure G = build_gd_structure(in.at("n").get<int>(), in.at("m").get<int>());
      ConductanceForm D = form_from_json(res.at("form"), gd_corner_labels());
      double eta = res.at("eta").get<double>();
      if (res.at("verdict") == "exists") {
        double r = eigen_residual(G.cell_scheme(1), D, eta);
        if (!(r <= 10 * rep["tolerances"].at("residual").get<double>())) fail(v, "recomputed residual too large");
      }
      if (rel_gap(D.mass() / gd_renorm_T(G, D).mass(), eta) > 1e-9) fail(v, "eta does not match the embedded form");
    } else if (cmd == "gd_rhos") {
      int n = in.at("n").get<int>(), m = in.at("m").get<int>();
      GdStructure G = build_gd_structure(n, m);
      auto sc = G.cell_scheme(1);
      const auto labels = gd_corner_labels();
      Partition J1 = partition_from_json(res.at("J1"), labels), J2 = partition_from_json(res.at("J2"), labels);
      double tol = rep["tolerances"].at("recompute").get<double>();
      for (const auto& row : res.at("rows")) {
        std::string q = row.at("quantity");
        const Partition& J = q.find("J1") != std::string::npos ? J1 : J2;
        bool relation_side = q.rfind("rho_over", 0) == 0;
        double val;
        if (relation_side) {
          val = relation_ratios(sc, J, form_from_json(row.at("form"), labels)).max;
        } else {
          val = quotient_ratios(sc, J, form_from_json(row.at("form"), index_labels(J.num_blocks()))).min;
        }
        if (rel_gap(val, row.at("value").get<double>()) > 10 * tol) fail(v, q + " does not match its achieving form");
      }
    } else {
      fail(v, "unknown command " + cmd, true);
    }
  } catch (const Json::exception& e) {
    fail(v, std::string("schema: ") + e.what(), true);
  } catch (const Error& e) {
    fail(v, e.what(), e.code() == ErrorCode::Schema);
  }
  return v;
}

Validation validate_report_file(const std::string& path) {
  try {
    return validate_report(read_json_file(path));
  } catch (const Error& e) {
    Validation v;
    fail(v, e.what(), true);
    return v;
  }
}

}  // namespace fr::cli
