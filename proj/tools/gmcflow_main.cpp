// Single-binary batch interface: every experiment runs through a validated
// RunConfig, flags mirror the config keys and override file values.

#include "gmcflow/config.hpp"
#include "gmcflow/fft.hpp"
#include "gmcflow/io.hpp"
#include "gmcflow/parallel.hpp"
#include "gmcflow/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gmcflow;

namespace {

struct CommonArgs {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "config file (key = value lines)");
  auto track = [&args](const std::string& key) {
    return [&args, key](const std::string& v) { args.overrides[key] = v; };
  };
  cmd->add_option_function<std::string>("--dim", track("dim"), "torus dimension (1-3)");
  cmd->add_option_function<std::string>("--y-grid", track("y_grid"), "y-grid nodes per axis");
  cmd->add_option_function<std::string>("--z-grid", track("z_grid"), "z-grid nodes per axis");
  cmd->add_option_function<std::string>("--beta", track("beta"), "field scaling parameter");
  cmd->add_option_function<std::string>("--seed", track("seed"), "root seed");
  cmd->add_option_function<std::string>("--realizations", track("realizations"),
                                        "ensemble size");
  cmd->add_option_function<std::string>("--weight-mode", track("weight.mode"), "kernel|power");
  cmd->add_option_function<std::string>("--weight-floor", track("weight.floor"), "weight floor");
  cmd->add_option_function<std::string>("--solver-tol", track("solver.tol"), "CG tolerance");
  cmd->add_option_function<std::string>("--solver-max-iter", track("solver.max_iter"),
                                        "CG iteration cap");
  cmd->add_option_function<std::string>("--cutoff", track("inversion.cutoff"),
                                        "inversion mode cutoff (0 = z Nyquist)");
  cmd->add_option_function<std::string>("--targets", track("targets"), "verification targets");
  cmd->add_option_function<std::string>("--workers", track("workers"), "worker threads (0 = all)");
  cmd->add_option_function<std::string>("--transmissibility", track("transmissibility"),
                                        "geometric|harmonic");
  cmd->add_option_function<std::string>("--experiment", track("experiment"), "experiment name");
  cmd->add_option_function<std::string>("--output", track("output_dir"), "output directory");
}

// exit 2 on any config violation, echoing every problem found
RunConfig resolve_config(const CommonArgs& args) {
  ParseResult res = parse_config_with_overrides(args.config_path, args.overrides);
  if (!res.ok()) {
    for (const auto& e : res.errors) std::cerr << "config error: " << e << "\n";
    std::exit(2);
  }
  RunConfig cfg = *res.config;
  if (const char* root = std::getenv("GMCFLOW_OUT"); root && fs::path(cfg.output_dir).is_relative())
    cfg.output_dir = (fs::path(root) / cfg.output_dir).string();
  return cfg;
}

int cmd_sample_field(const RunConfig& cfg, int count) {
  TorusGrid g(cfg.dim, cfg.z_grid);
  FieldSpec spec(cfg.beta, g, cfg.seed);
  fs::create_directories(cfg.output_dir);
  for (int r = 0; r < count; ++r) {
    GridField X = sample_field(spec, static_cast<std::uint64_t>(r));
    char name[64];
    std::snprintf(name, sizeof(name), "field_%d.tgf1", r);
    write_field((fs::path(cfg.output_dir) / name).string(), X);
  }
  std::ofstream mfst(fs::path(cfg.output_dir) / "ensemble.manifest");
  mfst << "seed = " << cfg.seed << "\ndim = " << cfg.dim << "\nn_per_axis = " << cfg.z_grid
       << "\nbeta = " << cfg.beta << "\nrealizations = " << count << "\n";
  std::cout << "wrote " << count << " realization(s) to " << cfg.output_dir << "\n";
  return 0;
}

int cmd_gmc_stats(const RunConfig& cfg) {
  TorusGrid g(cfg.dim, cfg.z_grid);
  FieldSpec spec(cfg.beta, g, cfg.seed);
  CovarianceKernel kernel = truncated_covariance(g);
  const int M = cfg.realizations;
  Eigen::ArrayXd masses(M);
  int workers = cfg.workers == 0 ? default_workers() : cfg.workers;
  parallel_for(M, workers, [&](std::int64_t r) {
    GridField X = sample_field(spec, static_cast<std::uint64_t>(r));
    masses[r] = make_gmc_realization(X, kernel.sigma2, cfg.beta, r).total_mass();
  });
  fs::create_directories(cfg.output_dir);
  std::ofstream csv(fs::path(cfg.output_dir) / "gmc_stats.csv");
  csv << "realization_id,mass\n";
  for (int r = 0; r < M; ++r) csv << r << "," << masses[r] << "\n";

  GridField ones(g);
  ones.values.setOnes();
  double predicted = second_moment_predict(ones, cfg.beta, cfg.beta, kernel);
  json rep = {{"beta", cfg.beta},
              {"beta2", cfg.beta},
              {"predicted", predicted},
              {"quadrature_resolution", cfg.z_grid},
              {"empirical_mean_mass", masses.mean()},
              {"empirical_second_moment", (masses * masses).mean()}};
  std::ofstream(fs::path(cfg.output_dir) / "gmc_prediction.json") << rep.dump(2) << "\n";
  std::cout << rep.dump(2) << "\n";
  return 0;
}

int cmd_decay_check(const RunConfig& cfg, double alpha, int n) {
  TorusGrid g(cfg.dim, n);
  CovarianceKernel kernel = truncated_covariance(g);
  MultiplierTable table = kernel_coefficients(alpha, kernel);
  DecayFit fit = verify_decay(table);
  json bins = json::array();
  for (const auto& b : fit.bins)
    bins.push_back({{"k", b.k_center}, {"Hmin", b.ratio_min}, {"Hmax", b.ratio_max}});
  json rep = {{"alpha", alpha},          {"d", cfg.dim},
              {"slope", fit.slope},      {"intercept", fit.intercept},
              {"residual", fit.residual}, {"tolerance", 0.15},
              {"bins", bins}};
  std::cout << rep.dump(2) << "\n";
  fs::create_directories(cfg.output_dir);
  std::ofstream(fs::path(cfg.output_dir) / "decay_fit.json") << rep.dump(2) << "\n";
  double target = alpha - cfg.dim;
  return std::abs(fit.slope - target) <= 0.15 ? 0 : 1;
}

int cmd_solve(const RunConfig& cfg, long long pole) {
  TorusGrid g(cfg.dim, cfg.y_grid);
  CovarianceKernel kernel = truncated_covariance(g);
  WeightField w = build_weight(kernel, pole, cfg.beta, cfg.weight_mode, cfg.weight_floor);
  DiscreteOperator L = assemble_operator(w, cfg.transmissibility);
  GridField rhs = assemble_rhs(w, reference_data(g), cfg.transmissibility);
  SolveReport rep = solve_pde(L, rhs, cfg.solver_tol, cfg.solver_max_iter);
  fs::create_directories(cfg.output_dir);
  write_field((fs::path(cfg.output_dir) / "solution.tgf1").string(), rep.u);
  json j = {{"pole", pole},
            {"iterations", rep.iterations},
            {"rel_residual", rep.rel_residual},
            {"energy", rep.energy},
            {"converged", rep.converged}};
  std::ofstream(fs::path(cfg.output_dir) / "solve_report.json") << j.dump(2) << "\n";
  std::cout << j.dump(2) << "\n";
  return rep.converged ? 0 : 3;
}

int cmd_green(const RunConfig& cfg, long long source) {
  TorusGrid g(cfg.dim, cfg.y_grid);
  CovarianceKernel kernel = truncated_covariance(g);
  WeightField w = build_weight(kernel, 0, cfg.beta, cfg.weight_mode, cfg.weight_floor);
  DiscreteOperator L = assemble_operator(w, cfg.transmissibility);
  SolveReport rep = green_function(L, source, cfg.solver_tol, cfg.solver_max_iter);
  fs::create_directories(cfg.output_dir);
  write_field((fs::path(cfg.output_dir) / "green.tgf1").string(), rep.u);
  json j = {{"source", source},
            {"iterations", rep.iterations},
            {"rel_residual", rep.rel_residual},
            {"converged", rep.converged}};
  std::ofstream(fs::path(cfg.output_dir) / "green_report.json") << j.dump(2) << "\n";
  std::cout << j.dump(2) << "\n";
  return rep.converged ? 0 : 3;
}

int cmd_family(const RunConfig& cfg) {
  TorusGrid yg(cfg.dim, cfg.y_grid), zg(cfg.dim, cfg.z_grid);
  CovarianceKernel y_kernel = truncated_covariance(yg);
  CovarianceKernel z_kernel = truncated_covariance(zg);
  VectorFieldFamily f{yg, zg, true, reference_data(yg), {}};
  FamilySolveOptions opts{cfg.weight_mode,    cfg.weight_floor,
                          cfg.transmissibility, cfg.solver_tol,
                          cfg.solver_max_iter, cfg.workers == 0 ? default_workers() : cfg.workers};
  SolutionFamily fam = solve_family(f, y_kernel, cfg.beta, opts);
  PhiField phi = invert_in_z(fam, z_kernel, cfg.effective_cutoff());
  fs::create_directories(fs::path(cfg.output_dir) / "family");
  json sidecar = {{"beta", cfg.beta},   {"y_grid", cfg.y_grid}, {"z_grid", cfg.z_grid},
                  {"dim", cfg.dim},     {"cutoff", cfg.effective_cutoff()},
                  {"f", "builtin-smooth-v1"}};
  std::ofstream(fs::path(cfg.output_dir) / "family" / "family.json") << sidecar.dump(2) << "\n";
  for (Eigen::Index zi = 0; zi < zg.size(); ++zi) {
    char name[64];
    std::snprintf(name, sizeof(name), "u_z%05lld.tgf1", static_cast<long long>(zi));
    write_field((fs::path(cfg.output_dir) / "family" / name).string(),
                GridField(yg, fam.u.row(zi).array().transpose()));
    std::snprintf(name, sizeof(name), "phi_z%05lld.tgf1", static_cast<long long>(zi));
    write_field((fs::path(cfg.output_dir) / "family" / name).string(),
                GridField(yg, phi.phi.row(zi).array().transpose()));
  }
  std::cout << "family of " << zg.size() << " solves written to " << cfg.output_dir << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  TorusGrid yg(cfg.dim, cfg.y_grid), zg(cfg.dim, cfg.z_grid);
  CovarianceKernel y_kernel = truncated_covariance(yg);
  CovarianceKernel z_kernel = truncated_covariance(zg);
  VectorFieldFamily f{yg, zg, true, reference_data(yg), {}};
  int workers = cfg.workers == 0 ? default_workers() : cfg.workers;
  FamilySolveOptions opts{cfg.weight_mode,    cfg.weight_floor, cfg.transmissibility,
                          cfg.solver_tol,     cfg.solver_max_iter, workers};
  SolutionFamily fam = solve_family(f, y_kernel, cfg.beta, opts);
  PhiField phi = invert_in_z(fam, z_kernel, cfg.effective_cutoff());
  FieldSpec z_spec(cfg.beta, zg, cfg.seed);
  McReport mc = s_transform_mc(phi, fam, z_spec, z_kernel, pick_targets(cfg, cfg.targets),
                               std::max(1000, cfg.realizations), workers);
  json rows = json::array();
  for (const auto& r : mc.rows)
    rows.push_back({{"y_node", r.target.y_node},
                    {"z_node", r.target.z_node},
                    {"estimate", r.estimate},
                    {"se", r.se},
                    {"reference", r.reference},
                    {"pass", r.pass}});
  json rep = {{"realizations", mc.realizations}, {"pass_rate", mc.pass_rate}, {"rows", rows}};
  fs::create_directories(cfg.output_dir);
  std::ofstream(fs::path(cfg.output_dir) / "verify.json") << rep.dump(2) << "\n";
  std::cout << rep.dump(2) << "\n";
  return mc.pass_rate >= 0.9 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wick-renormalized stochastic pressure equation toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  int sample_count = 1;
  double decay_alpha = 0.25;
  int decay_n = 256;
  long long pole = 0, source = 0;
  std::string report_dir;

  auto* c_sample = app.add_subcommand("sample-field", "draw field realizations");
  add_common(c_sample, args);
  c_sample->add_option("--count", sample_count, "number of realizations to write");

  auto* c_gmc = app.add_subcommand("gmc-stats", "GMC ensemble statistics and predictions");
  add_common(c_gmc, args);

  auto* c_decay = app.add_subcommand("decay-check", "kernel coefficient decay fit");
  add_common(c_decay, args);
  c_decay->add_option("--alpha", decay_alpha, "operator exponent in (0, dim)");
  c_decay->add_option("--n", decay_n, "grid nodes per axis (>= 64)");

  auto* c_solve = app.add_subcommand("solve", "one weighted periodic solve");
  add_common(c_solve, args);
  c_solve->add_option("--pole", pole, "flat node index of the weight pole");

  auto* c_green = app.add_subcommand("green", "periodic Green column");
  add_common(c_green, args);
  c_green->add_option("--source", source, "flat node index of the source");

  auto* c_family = app.add_subcommand("family", "solve the z-family and invert");
  add_common(c_family, args);

  auto* c_verify = app.add_subcommand("verify", "Monte Carlo duality verification");
  add_common(c_verify, args);

  auto* c_report = app.add_subcommand("report", "aggregate reports and verify checksums");
  c_report->add_option("dir", report_dir, "output directory of a previous run")->required();

  auto* c_run = app.add_subcommand("run", "full pipeline with summary and manifest");
  add_common(c_run, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_report->parsed()) return aggregate_report(report_dir);
    RunConfig cfg = resolve_config(args);
    if (c_sample->parsed()) return cmd_sample_field(cfg, sample_count);
    if (c_gmc->parsed()) return cmd_gmc_stats(cfg);
    if (c_decay->parsed()) return cmd_decay_check(cfg, decay_alpha, decay_n);
    if (c_solve->parsed()) return cmd_solve(cfg, pole);
    if (c_green->parsed()) return cmd_green(cfg, source);
    if (c_family->parsed()) return cmd_family(cfg);
    if (c_verify->parsed()) return cmd_verify(cfg);
    if (c_run->parsed()) return run_pipeline(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
