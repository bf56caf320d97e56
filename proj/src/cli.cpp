#include "swave/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "swave/errors.hpp"
#include "swave/fit.hpp"
#include "swave/format.hpp"
#include "swave/serialization.hpp"
#include "swave/spectral.hpp"
#include "swave/wave.hpp"

namespace swave {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config (de)serialization

namespace {

json data_to_json(const DataSpec& d) {
  if (d.spec) return to_json(*d.spec);
  return json{{"kind", "band_limited"}, {"coeffs", d.sine_coeffs}};
}

DataSpec data_from_json(const json& j) {
  if (j.is_object() && j.value("kind", "") == "band_limited") {
    for (const auto& [key, _] : j.items()) {
      if (key != "kind" && key != "coeffs") throw InvalidArgument("unknown key '" + key + "' in band_limited data");
    }
    return DataSpec::band_limited(j.at("coeffs").get<std::vector<double>>());
  }
  return DataSpec::from_spec(spec_from_json(j));
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw InvalidArgument("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

double kernel_offset(const json& j) {
  reject_unknown_keys(j, {"offset"}, "kernel");
  return j.value("offset", 0.0);
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const { return to_json(*this) == to_json(o); }

RunConfig default_config() {
  RunConfig cfg;
  cfg.problem.epsilons = geometric_epsilons(0.2, 0.5, 5);
  return cfg;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  reject_unknown_keys(j,
                      {"schema_version", "s", "case", "n_interior", "modes", "T", "dt", "threads", "seed", "out",
                       "coefficients", "data", "kernel", "kernel_b", "epsilons", "estimate_variant"},
                      "config");
  const int version = j.value("schema_version", kConfigSchemaVersion);
  if (version != kConfigSchemaVersion) {
    throw InvalidArgument("unsupported config schema_version " + std::to_string(version) + " (expected " +
                          std::to_string(kConfigSchemaVersion) + ")");
  }
  try {
    RunConfig cfg = default_config();
    VeryWeakProblem& p = cfg.problem;
    read_if(j, "s", p.s);
    if (j.contains("case")) p.problem_case = case_from_name(j.at("case").get<std::string>());
    read_if(j, "n_interior", p.n_interior);
    read_if(j, "modes", p.modes);
    read_if(j, "T", p.T);
    read_if(j, "dt", p.dt);
    read_if(j, "threads", p.threads);
    read_if(j, "seed", cfg.seed);
    read_if(j, "out", cfg.out);
    read_if(j, "epsilons", p.epsilons);
    read_if(j, "estimate_variant", cfg.estimate_variant);
    if (!cfg.estimate_variant.empty()) variant_from_name(cfg.estimate_variant);
    if (j.contains("coefficients")) {
      const json& c = j.at("coefficients");
      reject_unknown_keys(c, {"a", "b", "q"}, "coefficients");
      if (c.contains("a")) p.a = spec_from_json(c.at("a"), true);
      if (c.contains("b")) p.b = spec_from_json(c.at("b"), true);
      if (c.contains("q")) p.q = spec_from_json(c.at("q"));
    }
    if (j.contains("data")) {
      const json& d = j.at("data");
      reject_unknown_keys(d, {"u0", "u1"}, "data");
      if (d.contains("u0")) p.u0 = data_from_json(d.at("u0"));
      if (d.contains("u1")) p.u1 = data_from_json(d.at("u1"));
    }
    if (j.contains("kernel")) p.kernel = MollifierKernel(kernel_offset(j.at("kernel")));
    if (j.contains("kernel_b")) cfg.kernel_b_offset = kernel_offset(j.at("kernel_b"));
    return cfg;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

json to_json(const RunConfig& cfg) {
  const VeryWeakProblem& p = cfg.problem;
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["s"] = p.s;
  j["case"] = case_name(p.problem_case);
  j["n_interior"] = p.n_interior;
  j["modes"] = p.modes;
  j["T"] = p.T;
  j["dt"] = p.dt;
  j["threads"] = p.threads;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out;
  j["coefficients"] = {{"a", to_json(p.a)}, {"b", to_json(p.b)}, {"q", to_json(p.q)}};
  j["data"] = {{"u0", data_to_json(p.u0)}, {"u1", data_to_json(p.u1)}};
  j["kernel"] = {{"offset", p.kernel.offset()}};
  j["kernel_b"] = {{"offset", cfg.kernel_b_offset}};
  j["epsilons"] = p.epsilons;
  j["estimate_variant"] = cfg.estimate_variant;
  return j;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    // what() carries "parse error at line L, column C: ...".
    throw InvalidArgument(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void apply_overrides(RunConfig& cfg, const ConfigOverrides& o) {
  VeryWeakProblem& p = cfg.problem;
  if (o.out) cfg.out = *o.out;
  if (o.threads) p.threads = *o.threads;
  if (o.grid) p.n_interior = *o.grid;
  if (o.modes) p.modes = *o.modes;
  if (o.dt) p.dt = *o.dt;
  if (o.eps0 || o.eps_ratio || o.eps_count) {
    const auto& e = p.epsilons;
    const double eps0 = o.eps0.value_or(e.empty() ? 0.2 : e.front());
    const double ratio = o.eps_ratio.value_or(e.size() >= 2 ? e[1] / e[0] : 0.5);
    const std::size_t count = o.eps_count.value_or(e.empty() ? 5 : e.size());
    p.epsilons = geometric_epsilons(eps0, ratio, count);
  }
}

// ---------------------------------------------------------------------------
// Output helpers

namespace {

fs::path prepare_out(const RunConfig& cfg) {
  const fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InvalidArgument("cannot create output directory " + dir.string());
  return dir;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw InvalidArgument("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) {
  write_file(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

std::string member_file(const char* prefix, std::size_t index) {
  std::ostringstream name;
  name << prefix << (index < 10 ? "0" : "") << index << ".csv";
  return name.str();
}

json report_header(const char* command, const RunConfig& cfg, double dt) {
  const VeryWeakProblem& p = cfg.problem;
  return json{{"schema_version", kReportSchemaVersion},
              {"command", command},
              {"case", case_name(p.problem_case)},
              {"s", p.s},
              {"n_interior", p.n_interior},
              {"modes", p.modes},
              {"T", p.T},
              {"dt", dt},
              {"kernel_offset", p.kernel.offset()}};
}

json member_table(const NetSolution& net) {
  json table = json::array();
  for (const auto& m : net.members) {
    table.push_back({{"eps", m.eps},
                     {"solution_norm", m.solution_norm},
                     {"a_sup", m.a_sup},
                     {"b_sup", m.b_sup},
                     {"q_sup", m.q_sup},
                     {"u0_ws", m.u0_ws},
                     {"u1_l2", m.u1_l2},
                     {"bound_constant", m.bound_constant}});
  }
  return table;
}

json bound_constants(const NetSolution& net) {
  json values = json::array();
  for (const auto& m : net.members) values.push_back(m.bound_constant);
  return json{{"values", values}, {"trend", number_or_sentinel(net.bound_constant_trend)}};
}

MemberCallback csv_writer(const fs::path& dir, const char* prefix) {
  return [dir, prefix](std::size_t i, const NetMember& m) {
    write_file(dir / member_file(prefix, i), [&](std::ostream& o) { write_solution_csv(o, m.solution); });
  };
}

void write_net_csvs(const fs::path& dir, const char* prefix, const NetSolution& net) {
  const auto writer = csv_writer(dir, prefix);
  for (std::size_t i = 0; i < net.members.size(); ++i) writer(i, net.members[i]);
}

EstimateVariant pick_variant(const RunConfig& cfg, const WaveProblem& wp) {
  if (!cfg.estimate_variant.empty()) return variant_from_name(cfg.estimate_variant);
  if (wp.a.is_zero() && wp.b.is_zero()) return EstimateVariant::Free;
  return cfg.problem.problem_case == ProblemCase::SEqualsOne ? EstimateVariant::SEqualsOne : EstimateVariant::GeneralS;
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands

void cmd_eigen(const RunConfig& cfg) {
  const VeryWeakProblem& p = cfg.problem;
  p.validate(false);
  const fs::path dir = prepare_out(cfg);
  const Grid grid = p.grid();
  const BasisPtr basis = build_basis(sample_unregularized(p.q, grid), p.modes);
  write_file(dir / "eig.csv", [&](std::ostream& o) { write_eigen_csv(o, *basis); });

  std::vector<double> pin2, lam;
  double norm_res = 0.0, ortho = 0.0;
  for (std::size_t n = 0; n < basis->size(); ++n) {
    norm_res = std::max(norm_res, basis->normalization_residual(n));
    ortho = std::max(ortho, basis->orthogonality_max(n));
    if (basis->lambda(n) <= 0.0) continue;
    const double k = std::numbers::pi * static_cast<double>(n + 1);
    pin2.push_back(k * k);
    lam.push_back(basis->lambda(n));
  }
  json summary{{"schema_version", kReportSchemaVersion},
               {"command", "eigen"},
               {"n_interior", p.n_interior},
               {"modes", p.modes},
               {"lambda_1", basis->lambda(0)},
               {"ground_state_nonpositive", basis->nonpositive_ground_state()},
               {"normalization_residual_max", norm_res},
               {"orthogonality_max", ortho}};
  if (pin2.size() >= 2) {
    const LineFit fit = fit_loglog(pin2, lam);
    summary["slope_vs_pin2"] = fit.slope;
    summary["slope_fit_residual"] = fit.residual;
  } else {
    summary["slope_vs_pin2"] = nullptr;
    summary["slope_fit_residual"] = nullptr;
  }
  write_json(dir / "summary.json", summary);
}

void cmd_solve(const RunConfig& cfg) {
  const VeryWeakProblem& p = cfg.problem;
  p.validate(false);
  const Grid grid = p.grid();
  const BasisPtr basis = build_basis(sample_unregularized(p.q, grid), p.modes);
  WaveProblem wp{p.s,
                 basis,
                 sample_unregularized(p.a, grid),
                 sample_unregularized(p.b, grid),
                 analyze(sample_data(p.u0, grid), basis),
                 analyze(sample_data(p.u1, grid), basis),
                 p.T,
                 p.dt > 0.0 ? p.dt : default_time_step(*basis, p.s, p.T)};
  wp.validate();
  const EstimateVariant variant = pick_variant(cfg, wp);
  const fs::path dir = prepare_out(cfg);

  const WaveSolution sol = solve_galerkin(wp);
  write_file(dir / "solution.csv", [&](std::ostream& o) { write_solution_csv(o, sol); });
  write_file(dir / "energy.csv", [&](std::ostream& o) { write_energy_csv(o, energy_trace(sol)); });
  json est = to_json(check_estimates(sol, variant));
  est["schema_version"] = kReportSchemaVersion;
  est["command"] = "solve";
  est["dt"] = sol.step_size();
  write_json(dir / "estimates.json", est);
}

void cmd_net(const RunConfig& cfg) {
  cfg.problem.validate();
  const fs::path dir = prepare_out(cfg);
  const NetSolution net = solve_net(cfg.problem, csv_writer(dir, "solution_eps"));
  json report = report_header("net", cfg, net.dt);
  report["table"] = member_table(net);
  report["fitted_exponents"] = to_json(net.exponents);
  report["bound_constants"] = bound_constants(net);
  write_json(dir / "report.json", report);
}

void cmd_uniqueness(const RunConfig& cfg) {
  cfg.problem.validate();
  const MollifierKernel kernel_b(cfg.kernel_b_offset);
  const fs::path dir = prepare_out(cfg);
  const UniquenessResult r = uniqueness_experiment(cfg.problem, kernel_b, csv_writer(dir, "solution_eps"));
  write_net_csvs(dir, "solution_b_eps", r.net_b);

  json report = report_header("uniqueness", cfg, r.net_a.dt);
  report["kernel_b_offset"] = cfg.kernel_b_offset;
  report.update(to_json(r.report));
  report["classification"] = negligibility_label(r.report);
  json bound = json::array();
  for (std::size_t i = 0; i < r.bound.size(); ++i) {
    bound.push_back({{"eps", cfg.problem.epsilons[i]},
                     {"bound", r.bound[i]},
                     {"ratio", number_or_sentinel(r.bound_ratio[i])}});
  }
  report["difference_bound"] = bound;
  report["fitted_exponents"] = {{"kernel_a", to_json(r.net_a.exponents)}, {"kernel_b", to_json(r.net_b.exponents)}};
  report["bound_constants"] = {{"kernel_a", bound_constants(r.net_a)}, {"kernel_b", bound_constants(r.net_b)}};
  write_json(dir / "report.json", report);
}

void cmd_consistency(const RunConfig& cfg) {
  cfg.problem.validate();
  const fs::path dir = prepare_out(cfg);
  const ConsistencyResult r = consistency_experiment(cfg.problem, csv_writer(dir, "solution_eps"));
  write_file(dir / "classical.csv", [&](std::ostream& o) { write_solution_csv(o, r.classical); });

  json report = report_header("consistency", cfg, r.net.dt);
  report.update(to_json(r.report));
  report["spearman"] = r.spearman;
  report["fitted_exponents"] = to_json(r.net.exponents);
  report["bound_constants"] = bound_constants(r.net);
  write_json(dir / "report.json", report);
}

// ---------------------------------------------------------------------------
// Entry point

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Damped fractional wave equation with singular coefficients"};
  app.require_subcommand(1);
  std::string config_path;
  ConfigOverrides o;
  std::string out_dir;
  std::size_t threads = 0, grid = 0, modes = 0, eps_count = 0;
  double dt = 0.0, eps0 = 0.0, eps_ratio = 0.0;

  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  auto* grid_opt = app.add_option("--grid", grid, "interior grid points");
  auto* modes_opt = app.add_option("--modes", modes, "retained eigenmodes");
  auto* dt_opt = app.add_option("--dt", dt, "maximum time step");
  auto* eps0_opt = app.add_option("--eps0", eps0, "largest epsilon");
  auto* ratio_opt = app.add_option("--eps-ratio", eps_ratio, "geometric epsilon ratio");
  auto* count_opt = app.add_option("--eps-count", eps_count, "number of epsilons");

  const std::vector<std::pair<std::string, std::function<void(const RunConfig&)>>> commands{
      {"eigen", cmd_eigen},
      {"solve", cmd_solve},
      {"net", cmd_net},
      {"uniqueness", cmd_uniqueness},
      {"consistency", cmd_consistency}};
  const std::vector<std::string> help{"eigenpairs of the Sturm-Liouville operator",
                                      "classical solve with energy and estimate reports",
                                      "epsilon net of regularized solves",
                                      "two-kernel uniqueness experiment",
                                      "convergence to the classical solution"};
  for (std::size_t i = 0; i < commands.size(); ++i) {
    app.add_subcommand(commands[i].first, help[i])->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (*out_opt) o.out = out_dir;
    if (*threads_opt) o.threads = threads;
    if (*grid_opt) o.grid = grid;
    if (*modes_opt) o.modes = modes;
    if (*dt_opt) o.dt = dt;
    if (*eps0_opt) o.eps0 = eps0;
    if (*ratio_opt) o.eps_ratio = eps_ratio;
    if (*count_opt) o.eps_count = eps_count;
    apply_overrides(cfg, o);
    for (const auto& [name, body] : commands) {
      if (app.got_subcommand(name)) body(cfg);
    }
    return 0;
  } catch (const InvalidArgument& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace swave
