#include "gmcflow/pipeline.hpp"

#include "gmcflow/distance.hpp"
#include "gmcflow/fft.hpp"
#include "gmcflow/io.hpp"
#include "gmcflow/norms.hpp"
#include "gmcflow/parallel.hpp"
#include "gmcflow/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace gmcflow {

namespace fs = std::filesystem;
using nlohmann::json;

std::array<GridField, 3> reference_data(const TorusGrid& y_grid) {
  std::array<GridField, 3> f;
  for (int a = 0; a < y_grid.dim; ++a) {
    f[a] = GridField(y_grid);
    int b = (a + 1) % y_grid.dim;
    for (Eigen::Index j = 0; j < y_grid.size(); ++j) {
      Eigen::Vector3d x = node_point(y_grid, j);
      f[a].values[j] = std::sin(x[b]) + 0.5 * std::cos(x[a]);
    }
  }
  for (int a = y_grid.dim; a < 3; ++a) f[a] = GridField(y_grid);
  return f;
}

std::vector<McTarget> pick_targets(const RunConfig& cfg, int count) {
  TorusGrid yg(cfg.dim, cfg.y_grid), zg(cfg.dim, cfg.z_grid);
  std::vector<McTarget> targets;
  std::uint64_t element = 0;
  while (static_cast<int>(targets.size()) < count) {
    auto block = philox_block(cfg.seed, static_cast<std::uint32_t>(Stream::aux), 0, element++);
    Eigen::Index y = static_cast<Eigen::Index>(
        ((static_cast<std::uint64_t>(block[0]) << 32) | block[1]) % yg.size());
    Eigen::Index z = static_cast<Eigen::Index>(
        ((static_cast<std::uint64_t>(block[2]) << 32) | block[3]) % zg.size());
    if (torus_distance(node_point(yg, y), node_point(zg, z), cfg.dim) == 0.0) continue;
    targets.push_back({y, z});
  }
  return targets;
}

namespace {

struct Item {
  std::string name;
  bool pass;
  json detail;
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

}  // namespace

std::string summary_schema() {
  json schema = {
      {"type", "object"},
      {"required", {"experiment", "pass", "items", "config"}},
      {"properties",
       {{"experiment", {{"type", "string"}}},
        {"pass", {{"type", "boolean"}}},
        {"config", {{"type", "object"}}},
        {"items",
         {{"type", "array"},
          {"items",
           {{"type", "object"},
            {"required", {"name", "pass"}},
            {"properties", {{"name", {{"type", "string"}}}, {"pass", {{"type", "boolean"}}}}}}}}}}}};
  return schema.dump(2) + "\n";
}

namespace {

bool check_schema_node(const json& value, const json& schema, std::string& error,
                       const std::string& where) {
  if (schema.contains("type")) {
    std::string t = schema["type"];
    bool ok = (t == "object" && value.is_object()) || (t == "array" && value.is_array()) ||
              (t == "string" && value.is_string()) || (t == "boolean" && value.is_boolean()) ||
              (t == "number" && value.is_number()) || (t == "integer" && value.is_number_integer());
    if (!ok) {
      error = where + ": expected " + t;
      return false;
    }
  }
  if (schema.contains("required"))
    for (const auto& key : schema["required"])
      if (!value.contains(key.get<std::string>())) {
        error = where + ": missing required key " + key.get<std::string>();
        return false;
      }
  if (schema.contains("properties") && value.is_object())
    for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it)
      if (value.contains(it.key()))
        if (!check_schema_node(value[it.key()], it.value(), error, where + "." + it.key()))
          return false;
  if (schema.contains("items") && value.is_array())
    for (size_t i = 0; i < value.size(); ++i)
      if (!check_schema_node(value[i], schema["items"], error,
                             where + "[" + std::to_string(i) + "]"))
        return false;
  return true;
}

}  // namespace

bool validate_against_schema(const std::string& json_text, const std::string& schema_text,
                             std::string& error) {
  json value = json::parse(json_text, nullptr, false);
  json schema = json::parse(schema_text, nullptr, false);
  if (value.is_discarded() || schema.is_discarded()) {
    error = "malformed JSON";
    return false;
  }
  return check_schema_node(value, schema, error, "$");
}

int run_pipeline(const RunConfig& cfg) {
  const int workers = cfg.workers == 0 ? default_workers() : cfg.workers;
  TorusGrid yg(cfg.dim, cfg.y_grid), zg(cfg.dim, cfg.z_grid);
  fs::path out(cfg.output_dir);
  fs::create_directories(out / "family");

  std::vector<Item> items;
  json manifest;
  manifest["artifacts"] = json::array();
  auto record = [&](const fs::path& p) {
    manifest["artifacts"].push_back(
        {{"path", fs::relative(p, out).string()}, {"checksum", file_checksum(p.string())}});
  };

  try {
    CovarianceKernel y_kernel = truncated_covariance(yg);
    CovarianceKernel z_kernel = truncated_covariance(zg);
    FieldSpec z_spec(cfg.beta, zg, cfg.seed);

    // --- field synthesis + ensemble manifest -------------------------------
    GridField sample0 = sample_field(z_spec, 0);
    write_field((out / "field_0.tgf1").string(), sample0);
    record(out / "field_0.tgf1");
    write_text(out / "ensemble.manifest",
               "seed = " + std::to_string(cfg.seed) + "\ndim = " + std::to_string(cfg.dim) +
                   "\nn_per_axis = " + std::to_string(cfg.z_grid) +
                   "\nbeta = " + std::to_string(cfg.beta) +
                   "\nrealizations = " + std::to_string(cfg.realizations) + "\n");
    record(out / "ensemble.manifest");

    // --- GMC ensemble statistics -------------------------------------------
    const int M = cfg.realizations;
    Eigen::ArrayXd masses(M);
    Eigen::ArrayXd probe_values(M);
    const Eigen::Index probe_node = zg.size() / 2;
    parallel_for(M, workers, [&](std::int64_t r) {
      GridField X = sample_field(z_spec, static_cast<std::uint64_t>(r));
      probe_values[r] = X.values[probe_node];
      GmcRealization m = make_gmc_realization(X, z_kernel.sigma2, cfg.beta, r);
      masses[r] = m.total_mass();
    });
    {
      std::ostringstream csv;
      csv << "realization_id,mass\n";
      for (int r = 0; r < M; ++r) csv << r << "," << masses[r] << "\n";
      write_text(out / "gmc_stats.csv", csv.str());
      record(out / "gmc_stats.csv");
    }

    {
      double var = (probe_values - probe_values.mean()).square().sum() / (M - 1);
      double se = z_kernel.sigma2 * std::sqrt(2.0 / (M - 1));
      bool pass = std::abs(var - z_kernel.sigma2) <= 3.0 * se;
      items.push_back({"field_variance", pass,
                       {{"empirical", var}, {"expected", z_kernel.sigma2}, {"se", se}}});
    }
    {
      double mean = masses.mean();
      double sd = std::sqrt((masses - mean).square().sum() / (M - 1));
      double se = sd / std::sqrt(static_cast<double>(M));
      bool pass = std::abs(mean - zg.volume()) <= 3.0 * se;
      items.push_back(
          {"gmc_mean_mass", pass, {{"empirical", mean}, {"expected", zg.volume()}, {"se", se}}});

      GridField ones(zg);
      ones.values.setOnes();
      double predicted = second_moment_predict(ones, cfg.beta, cfg.beta, z_kernel);
      Eigen::ArrayXd sq = masses * masses;
      double m2 = sq.mean();
      double se2 = std::sqrt((sq - m2).square().sum() / (M - 1) / M);
      bool pass2 = std::abs(m2 - predicted) <= 3.0 * se2;
      items.push_back({"gmc_second_moment", pass2,
                       {{"empirical", m2}, {"predicted", predicted}, {"se", se2}}});
      write_json(out / "gmc_prediction.json",
                 {{"beta", cfg.beta},
                  {"beta2", cfg.beta},
                  {"predicted", predicted},
                  {"quadrature_resolution", cfg.z_grid}});
      record(out / "gmc_prediction.json");
    }

    // --- multiplier decay (needs a large enough mode range) ----------------
    if (cfg.y_grid >= 64) {
      MultiplierTable table = kernel_coefficients(cfg.beta * cfg.beta, y_kernel);
      DecayFit fit = verify_decay(table);
      double target = cfg.beta * cfg.beta - cfg.dim;
      bool pass = std::abs(fit.slope - target) <= 0.15;
      json bins = json::array();
      for (const auto& b : fit.bins)
        bins.push_back({{"k", b.k_center}, {"Hmin", b.ratio_min}, {"Hmax", b.ratio_max}});
      json rep = {{"alpha", table.alpha}, {"d", cfg.dim},       {"slope", fit.slope},
                  {"intercept", fit.intercept}, {"residual", fit.residual}, {"tolerance", 0.15},
                  {"bins", bins}};
      write_json(out / "decay_fit.json", rep);
      record(out / "decay_fit.json");
      items.push_back({"decay_slope", pass, {{"slope", fit.slope}, {"expected", target}}});
    } else {
      items.push_back({"decay_slope", true, {{"skipped", "y_grid below 64"}}});
    }

    // --- family solve, inversion, assembly ---------------------------------
    VectorFieldFamily f;
    f.y_grid = yg;
    f.z_grid = zg;
    f.deterministic = true;
    f.components = reference_data(yg);

    FamilySolveOptions opts;
    opts.mode = cfg.weight_mode;
    opts.floor = cfg.weight_floor;
    opts.trans = cfg.transmissibility;
    opts.tol = cfg.solver_tol;
    opts.max_iter = cfg.solver_max_iter;
    opts.workers = workers;

    SolutionFamily fam = solve_family(f, y_kernel, cfg.beta, opts);
    int cutoff = cfg.effective_cutoff();
    PhiField phi = invert_in_z(fam, z_kernel, cutoff);

    json sidecar = {{"beta", cfg.beta},
                    {"y_grid", cfg.y_grid},
                    {"z_grid", cfg.z_grid},
                    {"dim", cfg.dim},
                    {"cutoff", cutoff},
                    {"f", "builtin-smooth-v1"},
                    {"slices", zg.size()}};
    write_json(out / "family" / "family.json", sidecar);
    record(out / "family" / "family.json");
    for (Eigen::Index zi = 0; zi < zg.size(); ++zi) {
      GridField slice(yg, fam.u.row(zi).array().transpose());
      char name[64];
      std::snprintf(name, sizeof(name), "u_z%05lld.tgf1", static_cast<long long>(zi));
      write_field((out / "family" / name).string(), slice);
      record(out / "family" / name);
      GridField pslice(yg, phi.phi.row(zi).array().transpose());
      std::snprintf(name, sizeof(name), "phi_z%05lld.tgf1", static_cast<long long>(zi));
      write_field((out / "family" / name).string(), pslice);
      record(out / "family" / name);
    }

    double max_res = 0.0;
    long total_iter = 0;
    for (const auto& s : fam.stats) {
      max_res = std::max(max_res, s.rel_residual);
      total_iter += s.iterations;
    }
    items.push_back({"family_converged", true,
                     {{"solves", static_cast<int>(fam.stats.size())},
                      {"max_rel_residual", max_res},
                      {"total_iterations", total_iter}}});

    // round-trip consistency on a few sampled columns
    {
      MultiplierTable table = kernel_coefficients(cfg.beta * cfg.beta, z_kernel);
      double worst = 0.0;
      for (Eigen::Index y = 0; y < yg.size(); y += std::max<Eigen::Index>(1, yg.size() / 7)) {
        Eigen::ArrayXcd phi_hat =
            dft_forward(zg, phi.phi.col(y).array().cast<std::complex<double>>());
        Eigen::ArrayXcd u_hat = dft_forward(zg, fam.u.col(y).array().cast<std::complex<double>>());
        for (Eigen::Index i = 0; i < zg.size(); ++i) {
          if (mode_at(zg, i).cwiseAbs().maxCoeff() > cutoff) continue;
          worst = std::max(worst, std::abs(phi_hat[i] * table.H_hat[i] - u_hat[i]));
        }
      }
      double scale = std::max(1e-300, fam.u.cwiseAbs().maxCoeff());
      items.push_back(
          {"phi_roundtrip", worst <= 1e-10 * scale, {{"residual", worst}, {"scale", scale}}});
    }

    GmcRealization m0 = make_gmc_realization(sample0, z_kernel.sigma2, cfg.beta, 0);
    GridField U = assemble_solution(phi, m0);
    write_field((out / "solution_0.tgf1").string(), U);
    record(out / "solution_0.tgf1");

    // --- duality verification ----------------------------------------------
    {
      std::vector<McTarget> targets = pick_targets(cfg, cfg.targets);
      int mc_n = std::max(1000, cfg.realizations);
      McReport mc = s_transform_mc(phi, fam, z_spec, z_kernel, targets, mc_n, workers);
      json rows = json::array();
      for (const auto& r : mc.rows)
        rows.push_back({{"y_node", r.target.y_node},
                        {"z_node", r.target.z_node},
                        {"estimate", r.estimate},
                        {"se", r.se},
                        {"reference", r.reference},
                        {"pass", r.pass}});
      write_json(out / "verify.json",
                 {{"realizations", mc.realizations}, {"pass_rate", mc.pass_rate}, {"rows", rows}});
      record(out / "verify.json");
      items.push_back({"s_transform", mc.pass_rate >= 0.9,
                       {{"pass_rate", mc.pass_rate}, {"targets", static_cast<int>(mc.rows.size())}}});
    }
  } catch (const std::exception& e) {
    json failure = {{"experiment", cfg.experiment}, {"error", e.what()}};
    write_json(out / "failure.json", failure);
    std::cerr << "pipeline failure: " << e.what() << "\n";
    return 3;
  }

  // --- summary, schema check, manifest verification ------------------------
  bool all_pass = true;
  json item_arr = json::array();
  for (const auto& it : items) {
    all_pass = all_pass && it.pass;
    item_arr.push_back({{"name", it.name}, {"pass", it.pass}, {"detail", it.detail}});
  }
  json cfg_json;
  {
    std::istringstream echo(config_echo(cfg));
    std::string line;
    while (std::getline(echo, line)) {
      auto eq = line.find('=');
      cfg_json[line.substr(0, eq - 1)] = line.substr(eq + 2);
    }
  }
  json summary = {{"experiment", cfg.experiment},
                  {"pass", all_pass},
                  {"config", cfg_json},
                  {"items", item_arr}};
  write_text(out / "summary.schema.json", summary_schema());
  std::string summary_text = summary.dump(2) + "\n";
  std::string schema_err;
  if (!validate_against_schema(summary_text, summary_schema(), schema_err)) {
    std::cerr << "summary failed its own schema: " << schema_err << "\n";
    return 3;
  }
  write_text(out / "summary.json", summary_text);
  record(out / "summary.json");
  record(out / "summary.schema.json");
  write_json(out / "manifest.json", manifest);

  // read-back integrity pass over everything the manifest lists
  for (const auto& a : manifest["artifacts"]) {
    fs::path p = out / a["path"].get<std::string>();
    if (file_checksum(p.string()) != a["checksum"].get<std::uint64_t>()) {
      std::cerr << "checksum failure: " << p << "\n";
      return 3;
    }
  }

  for (const auto& it : items)
    std::cout << (it.pass ? "PASS " : "FAIL ") << it.name << "\n";
  return all_pass ? 0 : 1;
}

int aggregate_report(const std::string& output_dir) {
  fs::path out(output_dir);
  std::ifstream mf(out / "manifest.json");
  if (!mf) {
    std::cerr << "report: no manifest.json under " << output_dir << "\n";
    return 2;
  }
  json manifest = json::parse(mf, nullptr, false);
  if (manifest.is_discarded()) {
    std::cerr << "report: malformed manifest.json\n";
    return 3;
  }
  for (const auto& a : manifest["artifacts"]) {
    fs::path p = out / a["path"].get<std::string>();
    std::uint64_t expect = a["checksum"].get<std::uint64_t>();
    std::uint64_t got = 0;
    try {
      got = file_checksum(p.string());
    } catch (const std::exception& e) {
      std::cerr << "report: " << e.what() << "\n";
      return 3;
    }
    if (got != expect) {
      std::cerr << "report: checksum failure for " << p << "\n";
      return 3;
    }
  }
  json combined;
  combined["verified_artifacts"] = manifest["artifacts"].size();
  for (const char* name : {"summary.json", "decay_fit.json", "gmc_prediction.json", "verify.json"}) {
    std::ifstream in(out / name);
    if (!in) continue;
    json j = json::parse(in, nullptr, false);
    if (!j.is_discarded()) combined[name] = j;
  }
  std::cout << combined.dump(2) << "\n";
  bool pass = combined.contains("summary.json") && combined["summary.json"]["pass"].get<bool>();
  return pass ? 0 : 1;
}

}  // namespace gmcflow
