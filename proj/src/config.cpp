#include "medianflow/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "medianflow/grid.hpp"
#include "medianflow/scalar.hpp"

namespace medianflow {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += "\n  " + s;
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("not a valid number: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number<T>(item));
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

template <class T>
std::string fmt_list(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) out += fmt(v[i]);
    else out += std::to_string(v[i]);
  }
  return out;
}

struct Key {
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define MF_DOUBLE(key, field) \
  Key { key, [](ExperimentConfig& c, const std::string& v) { c.field = parse_number<double>(v); }, \
        [](const ExperimentConfig& c) { return fmt(c.field); } }
#define MF_INT(key, field) \
  Key { key, [](ExperimentConfig& c, const std::string& v) { c.field = parse_number<int>(v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.field); } }
#define MF_STRING(key, field) \
  Key { key, [](ExperimentConfig& c, const std::string& v) { c.field = v; }, \
        [](const ExperimentConfig& c) { return c.field; } }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      MF_INT("grid.n", grid.n),
      MF_STRING("grid.dealias", grid.dealias),
      MF_DOUBLE("noise.alpha", noise.alpha),
      MF_DOUBLE("noise.sigma", noise.sigma),
      Key{"noise.seed", [](ExperimentConfig& c, const std::string& v) { c.noise.seed = parse_number<std::uint64_t>(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.noise.seed); }},
      MF_INT("noise.substeps", noise.substeps),
      MF_DOUBLE("noise.k_max", noise.k_max),
      MF_DOUBLE("flow.dt", flow.dt),
      MF_DOUBLE("flow.t_burn", flow.t_burn),
      MF_DOUBLE("flow.t_total", flow.t_total),
      MF_STRING("flow.u0", flow.u0),
      MF_DOUBLE("flow.cfl", flow.cfl),
      MF_DOUBLE("scalar.kappa", scalar.kappa),
      Key{"scalar.kappa_list",
          [](ExperimentConfig& c, const std::string& v) { c.scalar.kappa_list = parse_list<double>(v); },
          [](const ExperimentConfig& c) { return fmt_list(c.scalar.kappa_list); }},
      MF_STRING("scalar.op", scalar.op),
      MF_STRING("scalar.rho0", scalar.rho0),
      MF_STRING("scalar.scheme", scalar.scheme),
      MF_DOUBLE("scalar.t_discard", scalar.t_discard),
      MF_DOUBLE("scalar.cfl", scalar.cfl),
      MF_STRING("experiment.kind", experiment.kind),
      MF_INT("experiment.ensemble_size", experiment.ensemble_size),
      MF_DOUBLE("experiment.delta", experiment.delta),
      MF_DOUBLE("experiment.q", experiment.q),
      MF_STRING("experiment.output_dir", experiment.output_dir),
      Key{"experiment.M0_list",
          [](ExperimentConfig& c, const std::string& v) { c.experiment.M0_list = parse_list<int>(v); },
          [](const ExperimentConfig& c) { return fmt_list(c.experiment.M0_list); }},
      MF_INT("experiment.output_every", experiment.output_every),
      MF_INT("experiment.checkpoint_every", experiment.checkpoint_every),
      MF_INT("experiment.snapshot_every", experiment.snapshot_every),
      MF_DOUBLE("experiment.horizon_factor", experiment.horizon_factor),
      MF_INT("experiment.batches", experiment.batches),
      MF_INT("chaos.n", chaos.n),
      MF_INT("chaos.k_max", chaos.k_max),
      Key{"chaos.kappa_list", [](ExperimentConfig& c, const std::string& v) { c.chaos.kappa_list = parse_list<double>(v); },
          [](const ExperimentConfig& c) { return fmt_list(c.chaos.kappa_list); }},
      Key{"chaos.M_list", [](ExperimentConfig& c, const std::string& v) { c.chaos.M_list = parse_list<double>(v); },
          [](const ExperimentConfig& c) { return fmt_list(c.chaos.M_list); }},
      MF_INT("chaos.paths", chaos.paths),
      MF_DOUBLE("chaos.dt", chaos.dt),
      Key{"chaos.mc", [](ExperimentConfig& c, const std::string& v) { c.chaos.mc = parse_bool(v); },
          [](const ExperimentConfig& c) { return std::string(c.chaos.mc ? "true" : "false"); }},
  };
  return table;
}

#undef MF_DOUBLE
#undef MF_INT
#undef MF_STRING

bool valid_source(const std::string& s, const std::set<std::string>& prefixes) {
  auto colon = s.find(':');
  std::string head = s.substr(0, colon);
  if (!prefixes.count(head)) return false;
  if (head == "zero") return colon == std::string::npos;
  return colon != std::string::npos && colon + 1 < s.size();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration:" + join(problems)), problems_(std::move(problems)) {}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, const Key*> index;
  for (const auto& k : keys()) index[k.name] = &k;
  ExperimentConfig cfg;
  std::vector<std::string> problems;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) {
      problems.push_back(where + "expected 'key = value'");
      continue;
    }
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    auto it = index.find(key);
    if (it == index.end()) {
      problems.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (!seen.insert(key).second) {
      problems.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    try {
      it->second->set(cfg, value);
    } catch (const std::exception& e) {
      problems.push_back(where + key + ": " + e.what());
    }
  }
  if (!problems.empty()) throw ConfigError(problems);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
  std::vector<std::string> p;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) p.push_back(msg);
  };
  int cutoff = 0;
  try {
    auto g = make_grid(c.grid.n, Fraction::parse(c.grid.dealias));
    cutoff = g.cutoff();
  } catch (const std::exception& e) {
    p.push_back(std::string("grid: ") + e.what());
  }
  need(c.noise.alpha > 10.0, "noise.alpha must exceed 10");
  need(c.noise.sigma >= 0.0, "noise.sigma must be nonnegative");
  need(c.noise.substeps >= 1, "noise.substeps must be at least 1");
  need(c.noise.k_max >= 0.0, "noise.k_max must be nonnegative");
  need(c.flow.dt > 0.0, "flow.dt must be positive");
  need(c.flow.t_burn >= 0.0, "flow.t_burn must be nonnegative");
  need(c.flow.t_total > 0.0, "flow.t_total must be positive");
  need(c.flow.cfl > 0.0, "flow.cfl must be positive");
  need(c.scalar.cfl >= 0.0, "scalar.cfl must be nonnegative (0 disables substepping)");
  need(valid_source(c.flow.u0, {"zero", "random", "file"}), "flow.u0 must be zero, random:<decay> or file:<path>");
  need(c.scalar.kappa > 0.0 && c.scalar.kappa <= 1.0, "scalar.kappa must lie in (0, 1]");
  for (double k : c.scalar.kappa_list) need(k > 0.0 && k <= 1.0, "scalar.kappa_list entries must lie in (0, 1]");
  try {
    parse_op_kind(c.scalar.op);
  } catch (const std::exception& e) {
    p.push_back(std::string("scalar.op: ") + e.what());
  }
  try {
    parse_scheme(c.scalar.scheme);
  } catch (const std::exception& e) {
    p.push_back(std::string("scalar.scheme: ") + e.what());
  }
  need(valid_source(c.scalar.rho0, {"mode", "annulus", "file"}), "scalar.rho0 must be mode:<m>, annulus:<M0> or file:<path>");
  need(c.scalar.t_discard >= 0.0 && c.scalar.t_discard < c.flow.t_total,
       "scalar.t_discard must lie in [0, flow.t_total)");
  const std::set<std::string> kinds{"run", "sweep", "median", "chaos", "verify"};
  need(kinds.count(c.experiment.kind) > 0, "experiment.kind must be run, sweep, median, chaos or verify");
  need(c.experiment.ensemble_size >= 1, "experiment.ensemble_size must be at least 1");
  need(c.experiment.delta > 0.0 && c.experiment.delta < 0.25, "experiment.delta must lie in (0, 1/4)");
  need(c.experiment.q > 2.0, "experiment.q must exceed 2");
  need(c.experiment.output_every >= 1, "experiment.output_every must be at least 1");
  need(c.experiment.checkpoint_every >= 0, "experiment.checkpoint_every must be nonnegative");
  need(c.experiment.snapshot_every >= 0, "experiment.snapshot_every must be nonnegative");
  need(c.experiment.horizon_factor > 0.0, "experiment.horizon_factor must be positive");
  need(c.experiment.batches >= 2, "experiment.batches must be at least 2");
  if (c.experiment.kind == "sweep")
    need(c.scalar.kappa_list.size() >= 4, "scalar.kappa_list needs at least 4 values for a sweep");
  if (c.experiment.kind == "median") {
    need(!c.experiment.M0_list.empty(), "experiment.M0_list must be set for a median experiment");
    for (int m : c.experiment.M0_list) {
      need(m >= 2, "experiment.M0_list entries must be at least 2");
      if (cutoff > 0)
        need(2 * m <= cutoff, "experiment.M0_list entry " + std::to_string(m) +
                                  " exceeds half the dealiasing cutoff " + std::to_string(cutoff));
    }
    need(std::pow(c.scalar.kappa, -c.experiment.q) >= 2.0, "scalar.kappa^(-experiment.q) must be at least 2");
  }
  if (c.experiment.kind == "chaos") {
    need(c.chaos.n >= 8 && c.chaos.n % 2 == 0, "chaos.n must be even and at least 8");
    need(c.chaos.k_max >= 0, "chaos.k_max must be nonnegative (0 means the grid cutoff)");
    need(!c.chaos.kappa_list.empty() && !c.chaos.M_list.empty(), "chaos.kappa_list and chaos.M_list must be set");
    for (double k : c.chaos.kappa_list) need(k > 0.0 && k <= 1.0, "chaos.kappa_list entries must lie in (0, 1]");
    for (double m : c.chaos.M_list) need(m >= 2.0, "chaos.M_list entries must be at least 2");
    need(c.chaos.paths >= 2, "chaos.paths must be at least 2");
    need(c.chaos.dt > 0.0, "chaos.dt must be positive");
  }
  if (!p.empty()) throw ConfigError(p);
}

std::string to_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& k : keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_text(cfg)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace medianflow
