#include "gmcflow/config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace gmcflow {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool to_int(const std::string& s, long long& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool to_double(const std::string& s, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

const std::set<std::string> kKnownKeys = {
    "dim",          "y_grid",          "z_grid",           "beta",
    "seed",         "realizations",    "weight.mode",      "weight.floor",
    "solver.tol",   "solver.max_iter", "inversion.cutoff", "targets",
    "workers",      "transmissibility", "experiment",      "output_dir"};

}  // namespace

ParseResult validate_config(const std::map<std::string, std::string>& kv) {
  ParseResult res;
  RunConfig cfg;
  auto fail = [&](const std::string& msg) { res.errors.push_back(msg); };

  for (const auto& [key, _] : kv)
    if (!kKnownKeys.count(key)) fail("unknown key: " + key);

  auto get_int = [&](const std::string& key, long long lo, long long hi, auto setter) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    long long v;
    if (!to_int(trim(it->second), v) || v < lo || v > hi)
      fail(key + ": expected integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
           "], got '" + it->second + "'");
    else
      setter(v);
  };
  auto get_double = [&](const std::string& key, auto setter) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    double v;
    if (!to_double(trim(it->second), v))
      fail(key + ": expected a number, got '" + it->second + "'");
    else
      setter(v);
  };

  get_int("dim", 1, 3, [&](long long v) { cfg.dim = static_cast<int>(v); });
  get_int("y_grid", 8, 4096, [&](long long v) { cfg.y_grid = static_cast<int>(v); });
  get_int("z_grid", 8, 4096, [&](long long v) { cfg.z_grid = static_cast<int>(v); });
  get_double("beta", [&](double v) { cfg.beta = v; });
  get_int("seed", 0, std::numeric_limits<long long>::max(),
          [&](long long v) { cfg.seed = static_cast<std::uint64_t>(v); });
  get_int("realizations", 1, 100000000, [&](long long v) { cfg.realizations = static_cast<int>(v); });
  get_double("weight.floor", [&](double v) { cfg.weight_floor = v; });
  get_double("solver.tol", [&](double v) { cfg.solver_tol = v; });
  get_int("solver.max_iter", 1, 100000000,
          [&](long long v) { cfg.solver_max_iter = static_cast<int>(v); });
  get_int("inversion.cutoff", 0, 4096,
          [&](long long v) { cfg.inversion_cutoff = static_cast<int>(v); });
  get_int("targets", 1, 100000, [&](long long v) { cfg.targets = static_cast<int>(v); });
  get_int("workers", 0, 4096, [&](long long v) { cfg.workers = static_cast<int>(v); });

  if (auto it = kv.find("weight.mode"); it != kv.end()) {
    std::string v = trim(it->second);
    if (v == "kernel")
      cfg.weight_mode = WeightMode::kernel;
    else if (v == "power")
      cfg.weight_mode = WeightMode::power;
    else
      fail("weight.mode: expected kernel|power, got '" + it->second + "'");
  }
  if (auto it = kv.find("transmissibility"); it != kv.end()) {
    std::string v = trim(it->second);
    if (v == "geometric")
      cfg.transmissibility = Transmissibility::geometric;
    else if (v == "harmonic")
      cfg.transmissibility = Transmissibility::harmonic;
    else
      fail("transmissibility: expected geometric|harmonic, got '" + it->second + "'");
  }
  if (auto it = kv.find("experiment"); it != kv.end()) cfg.experiment = trim(it->second);
  if (auto it = kv.find("output_dir"); it != kv.end()) cfg.output_dir = trim(it->second);

  // cross-field constraints, revalidated here so downstream modules never see
  // out-of-range parameters
  if (cfg.y_grid % 2 != 0 || cfg.y_grid < 8) fail("y_grid: must be even and >= 8");
  if (cfg.z_grid % 2 != 0 || cfg.z_grid < 8) fail("z_grid: must be even and >= 8");
  if (!(cfg.beta > 0.0) || !(cfg.beta * cfg.beta < cfg.dim))
    fail("beta: beta squared exceeds dimension (need 0 < beta^2 < dim)");
  if (cfg.y_grid % cfg.z_grid != 0 || cfg.z_grid > cfg.y_grid)
    fail("z_grid: must divide y_grid (nested grids)");
  if (cfg.weight_floor < 0.0) fail("weight.floor: must be nonnegative");
  if (!(cfg.solver_tol > 0.0) || cfg.solver_tol >= 1.0) fail("solver.tol: must lie in (0, 1)");
  if (cfg.inversion_cutoff > cfg.z_grid / 2)
    fail("inversion.cutoff: must be at most z_grid/2");

  if (res.errors.empty()) res.config = cfg;
  return res;
}

namespace {

bool read_file_kv(const std::string& path, std::map<std::string, std::string>& kv,
                  std::vector<std::string>& errors) {
  std::ifstream in(path);
  if (!in) {
    errors.push_back("cannot open config file: " + path);
    return false;
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (kv.count(key)) errors.push_back("line " + std::to_string(lineno) + ": duplicate key " + key);
    kv[key] = val;
  }
  return true;
}

}  // namespace

ParseResult parse_config(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::vector<std::string> errors;
  if (!read_file_kv(path, kv, errors) || !errors.empty()) {
    ParseResult res;
    res.errors = errors;
    if (!errors.empty() && kv.empty()) return res;
    ParseResult v = validate_config(kv);
    res.errors.insert(res.errors.end(), v.errors.begin(), v.errors.end());
    if (res.errors.empty()) res.config = v.config;
    return res;
  }
  return validate_config(kv);
}

ParseResult parse_config_with_overrides(const std::string& path,
                                        const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> kv;
  std::vector<std::string> errors;
  if (!path.empty()) read_file_kv(path, kv, errors);
  for (const auto& [k, v] : overrides) kv[k] = v;
  ParseResult v = validate_config(kv);
  v.errors.insert(v.errors.begin(), errors.begin(), errors.end());
  if (!v.errors.empty()) v.config.reset();
  return v;
}

std::string config_echo(const RunConfig& cfg) {
  std::ostringstream os;
  os << "dim = " << cfg.dim << "\n"
     << "y_grid = " << cfg.y_grid << "\n"
     << "z_grid = " << cfg.z_grid << "\n"
     << "beta = " << cfg.beta << "\n"
     << "seed = " << cfg.seed << "\n"
     << "realizations = " << cfg.realizations << "\n"
     << "weight.mode = " << (cfg.weight_mode == WeightMode::kernel ? "kernel" : "power") << "\n"
     << "weight.floor = " << cfg.weight_floor << "\n"
     << "solver.tol = " << cfg.solver_tol << "\n"
     << "solver.max_iter = " << cfg.solver_max_iter << "\n"
     << "inversion.cutoff = " << cfg.effective_cutoff() << "\n"
     << "targets = " << cfg.targets << "\n"
     << "workers = " << cfg.workers << "\n"
     << "transmissibility = "
     << (cfg.transmissibility == Transmissibility::geometric ? "geometric" : "harmonic") << "\n"
     << "experiment = " << cfg.experiment << "\n"
     << "output_dir = " << cfg.output_dir << "\n";
  return os.str();
}

}  // namespace gmcflow
