#include "disscat/run.hpp"

#include "disscat/errors.hpp"
#include "disscat/format.hpp"
#include "disscat/model_io.hpp"
#include "disscat/oracle.hpp"
#include "disscat/scattering.hpp"
#include "disscat/singularity.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace disscat {

using nlohmann::json;

namespace {

const std::set<std::string> kModelParamKeys = {"lo",       "hi",      "margin",   "k",       "g_v",
                                               "g_c",      "center_g", "width_g", "center_c", "width_c",
                                               "lambda0",  "envelope_power"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw InvalidInput("unknown key '" + key + "' in " + where);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("config key '") + key + "' has the wrong type");
  }
}

ModelParams params_from_json(const json& j) {
  check_keys(j, kModelParamKeys, "model params");
  ModelParams p;
  p.lo = get_or(j, "lo", p.lo);
  p.hi = get_or(j, "hi", p.hi);
  p.margin = get_or(j, "margin", p.margin);
  p.k = get_or(j, "k", p.k);
  p.g_v = get_or(j, "g_v", p.g_v);
  p.g_c = get_or(j, "g_c", p.g_c);
  p.center_g = get_or(j, "center_g", p.center_g);
  p.width_g = get_or(j, "width_g", p.width_g);
  p.center_c = get_or(j, "center_c", p.center_c);
  p.width_c = get_or(j, "width_c", p.width_c);
  p.lambda0 = get_or(j, "lambda0", p.lambda0);
  p.envelope_power = get_or(j, "envelope_power", p.envelope_power);
  return p;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

json versions() {
  std::ostringstream eigen, nl;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  nl << NLOHMANN_JSON_VERSION_MAJOR << '.' << NLOHMANN_JSON_VERSION_MINOR << '.' << NLOHMANN_JSON_VERSION_PATCH;
  json v{{"disscat", kVersion}, {"eigen", eigen.str()}, {"boost", BOOST_LIB_VERSION}, {"nlohmann_json", nl.str()},
         {"compiler", __VERSION__}};
#ifdef _OPENMP
  v["openmp"] = _OPENMP;
#endif
  return v;
}

// finite doubles only; JSON has no infinities
double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
  g.back() = b;
  return g;
}

struct Output {
  std::filesystem::path dir;
  std::vector<std::string> files;
  void write(const std::string& name, const std::string& content) {
    write_atomic((dir / name).string(), content);
    files.push_back(name);
  }
};

Model checked_model(const RunConfig& cfg, json& stats) {
  Model model = resolve_model(cfg.model);
  const ValidationReport rep = validate_model(model);
  stats["model"] = model.name;
  if (!rep.ok) {
    std::ostringstream os;
    os << "model '" << model.name << "' fails validation:";
    for (const auto& v : rep.violations) os << ' ' << v.code << " (" << v.message << ")";
    throw InvalidInput(os.str());
  }
  return model;
}

std::vector<double> model_grid(const RunConfig& cfg, const Model& model, int default_n) {
  const int n = cfg.grid_n.value_or(default_n);
  if (n < 2) throw InvalidInput("grid.n must be >= 2");
  const Interval& d = model.lambda;
  const double a = cfg.grid_lo.value_or(d.lo + d.margin), b = cfg.grid_hi.value_or(d.hi - d.margin);
  if (!(d.in_working_interior(a) && d.in_working_interior(b) && a < b))
    throw InvalidInput("grid.lo / grid.hi must be increasing and inside the working interior of the model");
  return linspace(a, b, n);
}

void cmd_validate(const RunConfig& cfg, Output& out, json& stats) {
  const Model model = resolve_model(cfg.model);
  const ValidationReport rep = validate_model(model);
  json viol = json::array();
  for (const auto& v : rep.violations) viol.push_back({{"code", v.code}, {"message", v.message}, {"worst_value", v.worst_value}});
  stats["model"] = model.name;
  stats["ok"] = rep.ok;
  stats["hermiticity_defect"] = rep.hermiticity_defect;
  stats["holder_quotient_g"] = rep.holder_quotient_g;
  stats["holder_quotient_c"] = rep.holder_quotient_c;
  stats["violations"] = viol;
  if (cfg.json) out.write("model.json", model_to_json(model).dump(2) + "\n");
  if (!rep.ok) throw InvalidInput("model '" + model.name + "' fails validation");
}

void cmd_smatrix_scan(const RunConfig& cfg, Output& out, json& stats) {
  const Model model = checked_model(cfg, stats);
  const std::vector<double> grid = model_grid(cfg, model, 101);
  const std::vector<SMatrixResult> rows = s_matrix_scan(model, grid);
  std::ostringstream csv;
  csv << "lambda,sigma_min_S,sigma_max_S,unitarity_defect_SV,defect_min_eig,sigma_min_A,singular,kuroda_forms,rf_forms,"
         "left_right,inverse_residual\n";
  double max_unit = 0, min_sigma = 1e300, max_sigma = 0, worst_forms = 0, worst_lr = 0, worst_inv = 0, min_def = 1e300;
  int n_singular = 0;
  json entries = json::array();
  for (const auto& r : rows) {
    const CMatrix id = CMatrix::Identity(r.s_v.rows(), r.s_v.cols());
    const double unit = norm2(r.s_v.adjoint() * r.s_v - id);
    const double def_min = min_hermitian_part_eig(r.defect);
    csv << fmt17(r.lam) << ',' << fmt17(r.sigma_min) << ',' << fmt17(r.sigma_max) << ',' << fmt17(unit) << ','
        << fmt17(def_min) << ',' << fmt17(r.sigma_min_a) << ',' << (r.singular ? 1 : 0) << ','
        << fmt17(r.residuals.kuroda_forms) << ',' << fmt17(r.residuals.rf_forms) << ',' << fmt17(r.residuals.left_right)
        << ',' << fmt17(r.residuals.inverse_residual) << '\n';
    max_unit = std::max(max_unit, unit);
    min_sigma = std::min(min_sigma, r.sigma_min);
    max_sigma = std::max(max_sigma, r.sigma_max);
    min_def = std::min(min_def, def_min);
    worst_forms = std::max({worst_forms, r.residuals.kuroda_forms, r.residuals.rf_forms});
    worst_lr = std::max(worst_lr, r.residuals.left_right);
    worst_inv = std::max(worst_inv, r.residuals.inverse_residual);
    n_singular += r.singular;
    entries.push_back({{"lambda", r.lam}, {"S", matrix_to_json(r.s)}, {"S_V", matrix_to_json(r.s_v)}, {"singular", r.singular}});
  }
  if (cfg.csv) out.write("smatrix.csv", csv.str());
  if (cfg.json) out.write("smatrix.json", json{{"points", entries}}.dump() + "\n");
  stats["n_grid"] = grid.size();
  stats["max_unitarity_defect_SV"] = max_unit;
  stats["min_sigma_min_S"] = min_sigma;
  stats["max_sigma_max_S"] = max_sigma;
  stats["min_defect_eigenvalue"] = min_def;
  stats["max_form_residual"] = worst_forms;
  stats["max_left_right_residual"] = worst_lr;
  stats["max_inverse_residual"] = worst_inv;
  stats["n_singular"] = n_singular;
}

void cmd_singularity_scan(const RunConfig& cfg, Output& out, json& stats) {
  const Model model = checked_model(cfg, stats);
  ScanOptions opts;
  opts.lo = cfg.grid_lo;
  opts.hi = cfg.grid_hi;
  const SingularityReport rep = scan(model, cfg.grid_n.value_or(256), opts);
  if (cfg.csv) out.write("singularity.csv", to_csv(rep));
  if (cfg.json) out.write("singularity.json", to_json(rep).dump(2) + "\n");
  stats["n_grid"] = rep.grid.size();
  stats["n_singular"] = rep.singular_points.size();
  stats["min_sigma_min_A"] = finite_or(rep.min_sigma, -1.0);
  stats["finite_set"] = rep.finite_set;
  stats["endpoint_lo"] = to_string(rep.lo.verdict);
  stats["endpoint_hi"] = to_string(rep.hi.verdict);
}

void cmd_oracle_compare(const RunConfig& cfg, Output& out, json& stats) {
  const Model model = checked_model(cfg, stats);
  const DiscretizedSystem sys = discretize(model, cfg.oracle_nodes);
  const TimeGrid tg = default_time_grid(sys, cfg.t_factor, cfg.dt_factor);
  const ScatteringOperator so = scatt_operator(sys, tg);
  const std::vector<FiberComparison> cmp = compare_on_shell(sys, so, 0.5);
  std::ostringstream csv;
  csv << "lambda,rel_error,norm_oracle,norm_reference\n";
  double worst = 0.0;
  for (const auto& c : cmp) {
    csv << fmt17(c.lam) << ',' << fmt17(c.rel_error) << ',' << fmt17(norm2(c.oracle)) << ',' << fmt17(norm2(c.reference))
        << '\n';
    worst = std::max(worst, c.rel_error);
  }
  if (cfg.csv) out.write("oracle_compare.csv", csv.str());
  const double inter = intertwining_residual(sys, so.w_minus);
  const double wmax = norm2(so.w_minus);
  if (cfg.json) {
    json j{{"max_rel_error", worst},     {"intertwining_residual", inter}, {"sigma_max_w_minus", wmax},
           {"sigma_max_s", norm2(so.s)}, {"max_offdiag", so.max_offdiag}};
    out.write("oracle_compare.json", j.dump(2) + "\n");
  }
  stats["n_nodes"] = cfg.oracle_nodes;
  stats["t_max"] = tg.t_max;
  stats["dt"] = tg.dt;
  stats["steps"] = tg.steps;
  stats["max_rel_error"] = worst;
  stats["intertwining_residual"] = inter;
  stats["sigma_max_w_minus"] = wmax;
  stats["max_offdiag"] = so.max_offdiag;
}

void cmd_optical_scan(const RunConfig& cfg, Output& out, json& stats) {
  const OpticalConfig& oc = cfg.optical;
  const std::vector<double> grid = linspace(oc.lam_min, oc.lam_max, oc.n);
  std::vector<std::pair<int, double>> jobs;
  for (int ell = 0; ell <= oc.ell_max; ++ell)
    for (double lam : grid) jobs.emplace_back(ell, lam);
  const std::vector<PartialWaveResult> rows = map_indexed<PartialWaveResult>(jobs, [&](const std::pair<int, double>& jb) {
    RadialProblem p = oc.problem;
    p.ell = jb.first;
    return solve_partial_wave(p, jb.second);
  });
  if (cfg.csv) out.write("partial_waves.csv", partial_waves_csv(rows));
  double max_abs_s = 0, min_abs_s = 1e300, max_res = 0;
  for (const auto& r : rows) {
    max_abs_s = std::max(max_abs_s, r.abs_s);
    min_abs_s = std::min(min_abs_s, r.abs_s);
    max_res = std::max(max_res, r.residual);
  }
  const InfinityVerdict inf = infinity_regularity(oc.problem, geometric_grid(oc.lam_max, 50.0 * oc.lam_max, 8), oc.ell_max);
  if (cfg.json) {
    json j{{"lams", inf.lams}, {"deviations", inf.deviations}, {"bounded", inf.bounded}};
    j["exponent"] = inf.exponent ? json(*inf.exponent) : json(nullptr);
    out.write("infinity_regularity.json", j.dump(2) + "\n");
  }
  stats["n_points"] = rows.size();
  stats["max_abs_s"] = max_abs_s;
  stats["min_abs_s"] = min_abs_s;
  stats["max_residual"] = max_res;
  stats["infinity_bounded"] = inf.bounded;
  stats["infinity_exponent"] = inf.exponent ? json(*inf.exponent) : json(nullptr);
}

void cmd_resonance_find(const RunConfig& cfg, Output& out, json& stats) {
  const OpticalConfig& oc = cfg.optical;
  RadialProblem problem = oc.problem;
  if (oc.cpa_lam0) {
    const CpaWell w = cpa_square_well(*oc.cpa_lam0, oc.cpa_radius);
    problem.v = RadialPotential::square_well(w.v0, w.radius);
    problem.w = RadialPotential::square_well(w.w0, w.radius);
    problem.r_match = std::max(problem.r_match, w.radius + 1.0);
    stats["cpa"] = {{"v0", w.v0}, {"w0", w.w0}, {"radius", w.radius}, {"lam0", w.lam0}};
  }
  const std::vector<ResonanceHit> hits = resonance_scan(problem, linspace(oc.lam_min, oc.lam_max, oc.n), oc.ell_max);
  std::ostringstream csv;
  csv << "ell,lambda,abs_s,is_zero\n";
  json list = json::array();
  for (const auto& h : hits) {
    csv << h.ell << ',' << fmt17(h.lam_zero) << ',' << fmt17(h.abs_s) << ',' << (h.is_zero ? 1 : 0) << '\n';
    std::vector<PartialWaveResult> waves;
    for (int ell = 0; ell <= oc.ell_max; ++ell) {
      RadialProblem p = problem;
      p.ell = ell;
      waves.push_back(solve_partial_wave(p, h.lam_zero));
    }
    const SMatrixSummary s = assemble_s_matrix(waves);
    list.push_back({{"ell", h.ell},
                    {"lambda", h.lam_zero},
                    {"abs_s", h.abs_s},
                    {"is_zero", h.is_zero},
                    {"sigma_min_S", s.sigma_min},
                    {"sigma_max_S", s.sigma_max}});
  }
  if (cfg.csv) out.write("resonances.csv", csv.str());
  if (cfg.json) out.write("resonances.json", json{{"resonances", list}}.dump(2) + "\n");
  stats["n_resonances"] = hits.size();
  stats["n_zeros"] = std::count_if(hits.begin(), hits.end(), [](const ResonanceHit& h) { return h.is_zero; });
}

}  // namespace

std::vector<std::string> command_names() {
  return {"validate", "smatrix-scan", "singularity-scan", "oracle-compare", "optical-scan", "resonance-find"};
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RadialPotential potential_from_json(const json& j) {
  check_keys(j, {"shape", "depth", "radius", "diffuseness"}, "potential");
  RadialPotential p;
  const std::string shape = get_or<std::string>(j, "shape", "zero");
  if (shape == "zero") p.shape = PotentialShape::kZero;
  else if (shape == "square-well") p.shape = PotentialShape::kSquareWell;
  else if (shape == "gaussian") p.shape = PotentialShape::kGaussian;
  else if (shape == "woods-saxon") p.shape = PotentialShape::kWoodsSaxon;
  else throw InvalidInput("unknown potential shape '" + shape + "'");
  p.depth = get_or(j, "depth", 0.0);
  p.radius = get_or(j, "radius", 1.0);
  p.diffuseness = get_or(j, "diffuseness", 0.5);
  return p;
}

Model resolve_model(const json& doc) {
  if (doc.is_string()) return builtin_model(doc.get<std::string>());
  if (!doc.is_object()) throw InvalidInput("model must be a built-in name or an object");
  if (doc.contains("builtin")) {
    check_keys(doc, {"builtin", "params"}, "model");
    const ModelParams p = doc.contains("params") ? params_from_json(doc.at("params")) : ModelParams{};
    return builtin_model(get_or<std::string>(doc, "builtin", ""), p);
  }
  return model_from_json(doc);
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  check_keys(j, {"command", "model", "grid", "oracle", "optical", "output"}, "config");
  RunConfig cfg;
  cfg.source = j;
  cfg.command = get_or<std::string>(j, "command", "");
  const auto names = command_names();
  if (!cfg.command.empty() && std::find(names.begin(), names.end(), cfg.command) == names.end())
    throw InvalidInput("unknown command '" + cfg.command + "'");
  cfg.model = j.contains("model") ? j.at("model") : json("rank1-gauss");

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, {"n", "lo", "hi"}, "grid");
    if (g.contains("n")) cfg.grid_n = get_or(g, "n", 0);
    if (g.contains("lo")) cfg.grid_lo = get_or(g, "lo", 0.0);
    if (g.contains("hi")) cfg.grid_hi = get_or(g, "hi", 0.0);
    if (cfg.grid_n && *cfg.grid_n < 2) throw InvalidInput("grid.n must be >= 2");
  }
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    check_keys(o, {"n_nodes", "T_factor", "dt_factor"}, "oracle");
    cfg.oracle_nodes = get_or(o, "n_nodes", cfg.oracle_nodes);
    cfg.t_factor = get_or(o, "T_factor", cfg.t_factor);
    cfg.dt_factor = get_or(o, "dt_factor", cfg.dt_factor);
    if (cfg.oracle_nodes < 32) throw InvalidInput("oracle.n_nodes must be >= 32");
    if (!(cfg.t_factor > 0.0 && cfg.t_factor <= 0.25)) throw InvalidInput("oracle.T_factor must lie in (0, 0.25]");
    if (!(cfg.dt_factor > 0.0 && cfg.dt_factor <= 0.1)) throw InvalidInput("oracle.dt_factor must lie in (0, 0.1]");
  }
  if (j.contains("optical")) {
    const json& o = j.at("optical");
    check_keys(o, {"v", "w", "r_match", "r_min", "rtol", "ell_max", "lam_min", "lam_max", "n", "cpa"}, "optical");
    OpticalConfig& oc = cfg.optical;
    if (o.contains("v")) oc.problem.v = potential_from_json(o.at("v"));
    if (o.contains("w")) oc.problem.w = potential_from_json(o.at("w"));
    oc.problem.r_match = get_or(o, "r_match", oc.problem.r_match);
    oc.problem.r_min = get_or(o, "r_min", oc.problem.r_min);
    oc.problem.rtol = get_or(o, "rtol", oc.problem.rtol);
    oc.ell_max = get_or(o, "ell_max", oc.ell_max);
    oc.lam_min = get_or(o, "lam_min", oc.lam_min);
    oc.lam_max = get_or(o, "lam_max", oc.lam_max);
    oc.n = get_or(o, "n", oc.n);
    if (o.contains("cpa")) {
      const json& c = o.at("cpa");
      check_keys(c, {"lam0", "radius"}, "optical.cpa");
      oc.cpa_lam0 = get_or(c, "lam0", 1.0);
      oc.cpa_radius = get_or(c, "radius", 1.0);
    }
    if (oc.ell_max < 0 || oc.n < 3 || !(oc.lam_min >= 1e-3 && oc.lam_max > oc.lam_min))
      throw InvalidInput("optical: need ell_max >= 0, n >= 3 and 1e-3 <= lam_min < lam_max");
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, {"directory", "formats"}, "output");
    cfg.out_dir = get_or<std::string>(o, "directory", cfg.out_dir);
    if (o.contains("formats")) {
      const auto formats = get_or<std::vector<std::string>>(o, "formats", {});
      cfg.csv = cfg.json = false;
      for (const auto& f : formats) {
        if (f == "csv") cfg.csv = true;
        else if (f == "json") cfg.json = true;
        else throw InvalidInput("unknown output format '" + f + "'");
      }
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config " + path);
  try {
    return parse_config(json::parse(in));
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
  }
}

int run(const RunConfig& cfg, std::ostream& diag) {
  const auto start = std::chrono::steady_clock::now();
  Output out;
  out.dir = cfg.out_dir;
  json stats = json::object();
  int code = kExitOk;
  std::string error;
  try {
    std::error_code ec;
    std::filesystem::create_directories(out.dir, ec);
    if (ec) throw InvalidInput("cannot create output directory " + out.dir.string() + ": " + ec.message());
    if (cfg.command == "validate") cmd_validate(cfg, out, stats);
    else if (cfg.command == "smatrix-scan") cmd_smatrix_scan(cfg, out, stats);
    else if (cfg.command == "singularity-scan") cmd_singularity_scan(cfg, out, stats);
    else if (cfg.command == "oracle-compare") cmd_oracle_compare(cfg, out, stats);
    else if (cfg.command == "optical-scan") cmd_optical_scan(cfg, out, stats);
    else if (cfg.command == "resonance-find") cmd_resonance_find(cfg, out, stats);
    else throw InvalidInput("unknown command '" + cfg.command + "'");
  } catch (const InvalidInput& e) {
    code = kExitInvalid;
    error = e.what();
    diag << "disscat " << cfg.command << ": invalid input: " << e.what() << '\n';
  } catch (const DomainError& e) {
    code = kExitInvalid;
    error = e.what();
    diag << "disscat " << cfg.command << ": out of domain: " << e.what() << '\n';
  } catch (const std::exception& e) {
    code = kExitNumerical;
    error = e.what();
    diag << "disscat " << cfg.command << ": numerical failure: " << e.what() << '\n';
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest{{"command", cfg.command},
                {"config_hash", hex64(fnv1a(cfg.source.dump()))},
                {"versions", versions()},
                {"wall_time_s", wall},
                {"threads", max_threads()},
                {"exit_code", code},
                {"ok", code == kExitOk},
                {"stats", stats},
                {"files", out.files}};
  if (!error.empty()) manifest["error"] = error;
  try {
    if (std::filesystem::is_directory(out.dir)) write_atomic((out.dir / "manifest.json").string(), manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    diag << "disscat: cannot write manifest: " << e.what() << '\n';
    if (code == kExitOk) code = kExitInvalid;
  }
  return code;
}

}  // namespace disscat
