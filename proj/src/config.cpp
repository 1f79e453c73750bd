#include "mlapprox/config.hpp"

#include <istream>
#include <set>

#include "mlapprox/csv.hpp"

namespace mlapprox {

namespace {

const std::set<std::string>& spec_keys() {
  static const std::set<std::string> keys{"spec", "r", "d", "angular", "sigma", "factors"};
  return keys;
}

const std::set<std::string>& run_keys() {
  static const std::set<std::string> keys{"N",           "algorithm", "order",  "epsilon",
                                          "n_grid",      "replications", "seed", "threads",
                                          "target",      "target_size",  "target_file", "out"};
  return keys;
}

template <typename Fn>
auto parse_field(const std::string& key, const std::string& value, Fn parse) -> decltype(parse(value)) {
  try {
    return parse(value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "a_n_r") return Algorithm::ANR;
  if (s == "q_m") return Algorithm::QM;
  if (s == "q_2n_r") return Algorithm::Q2NR;
  if (s == "direct_simulation") return Algorithm::DirectSimulation;
  throw std::invalid_argument("unknown algorithm '" + s + "' (expected a_n_r, q_m, q_2n_r or direct_simulation)");
}

TargetKind parse_target(const std::string& s) {
  if (s == "hard_instance") return TargetKind::HardInstance;
  if (s == "weak_instance") return TargetKind::WeakInstance;
  if (s == "random_unit_ball") return TargetKind::RandomUnitBall;
  if (s == "file") return TargetKind::CoefficientFile;
  throw std::invalid_argument("unknown target '" + s +
                              "' (expected hard_instance, weak_instance, random_unit_ball or file)");
}

// Comma list of integers, or "pow2:a:b" for 2^a, 2^{a+1}, ..., 2^b.
std::vector<std::uint64_t> parse_grid(const std::string& s) {
  std::vector<std::uint64_t> grid;
  if (s.rfind("pow2:", 0) == 0) {
    const auto parts = split(std::string_view(s).substr(5), ':');
    if (parts.size() != 2) throw std::invalid_argument("expected pow2:<from>:<to>");
    const auto lo = parse_uint(parts[0]);
    const auto hi = parse_uint(parts[1]);
    if (hi > 62 || lo > hi) throw std::invalid_argument("pow2 exponents must satisfy from <= to <= 62");
    for (auto e = lo; e <= hi; ++e) grid.push_back(std::uint64_t{1} << e);
    return grid;
  }
  for (const auto& part : split(s, ',')) grid.push_back(parse_uint(part));
  return grid;
}

std::vector<double> parse_epsilon(const std::string& s) {
  if (trim(s) == "sigma_squared") return {};
  std::vector<double> table;
  for (const auto& part : split(s, ',')) {
    const double v = parse_double(part);
    if (!(v > 0.0)) throw std::invalid_argument("epsilon values must be positive");
    table.push_back(v);
  }
  return table;
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::ANR: return "a_n_r";
    case Algorithm::QM: return "q_m";
    case Algorithm::Q2NR: return "q_2n_r";
    case Algorithm::DirectSimulation: return "direct_simulation";
  }
  return "?";
}

const char* target_name(TargetKind t) {
  switch (t) {
    case TargetKind::HardInstance: return "hard_instance";
    case TargetKind::WeakInstance: return "weak_instance";
    case TargetKind::RandomUnitBall: return "random_unit_ball";
    case TargetKind::CoefficientFile: return "file";
  }
  return "?";
}

double ExperimentConfig::algorithm_order() const {
  if (order) return *order;
  if (spec.kind == WeightKind::MixedSobolev || spec.kind == WeightKind::IsotropicSobolev) return spec.r;
  throw ConfigError("order", "required for tensor and explicit spectra");
}

Settings read_settings(std::istream& in) {
  Settings settings;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    const std::string key(trim(body.substr(0, eq)));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    settings[key] = std::string(trim(body.substr(eq + 1)));
  }
  return settings;
}

ExperimentConfig make_config(const Settings& settings) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> spec_fields{{"spec", "mixed"}};
  for (const auto& [key, value] : settings) {
    if (spec_keys().count(key)) {
      spec_fields[key] = value;
      continue;
    }
    if (!run_keys().count(key)) throw ConfigError(key, "unknown key");
    if (key == "N") {
      cfg.N = parse_field(key, value, parse_uint);
    } else if (key == "algorithm") {
      cfg.algorithm = parse_field(key, value, parse_algorithm);
    } else if (key == "order") {
      cfg.order = parse_field(key, value, parse_double);
      if (!(*cfg.order >= 0.0)) throw ConfigError(key, "must be >= 0");
    } else if (key == "epsilon") {
      cfg.epsilon_table = parse_field(key, value, parse_epsilon);
    } else if (key == "n_grid") {
      cfg.n_grid = parse_field(key, value, parse_grid);
    } else if (key == "replications") {
      cfg.replications = parse_field(key, value, parse_uint);
    } else if (key == "seed") {
      cfg.seed = parse_field(key, value, parse_uint);
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(parse_field(key, value, parse_uint));
    } else if (key == "target") {
      cfg.target = parse_field(key, value, parse_target);
    } else if (key == "target_size") {
      cfg.target_size = parse_field(key, value, parse_uint);
    } else if (key == "target_file") {
      cfg.target_file = value;
    } else if (key == "out") {
      cfg.out = value;
    }
  }

  try {
    cfg.spec = parse_weight_spec(spec_fields);
  } catch (const std::invalid_argument& e) {
    // parse_weight_spec reports "field '<key>': ..."
    const std::string msg = e.what();
    const auto open = msg.find('\'');
    const auto close = msg.find('\'', open + 1);
    const std::string field = open != std::string::npos && close != std::string::npos
                                  ? msg.substr(open + 1, close - open - 1)
                                  : "spec";
    const auto colon = msg.find(": ");
    throw ConfigError(field, colon != std::string::npos ? msg.substr(colon + 2) : msg);
  }

  if (cfg.N < 1) throw ConfigError("N", "must be >= 1");
  if (cfg.replications < 2) throw ConfigError("replications", "must be >= 2 for a standard error");
  if (cfg.threads < 1) throw ConfigError("threads", "must be >= 1");
  if (cfg.n_grid.empty()) throw ConfigError("n_grid", "must not be empty");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] < 1) throw ConfigError("n_grid", "values must be >= 1");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1]) throw ConfigError("n_grid", "must be strictly increasing");
  }
  if (cfg.algorithm == Algorithm::QM) {
    for (auto m : cfg.n_grid)
      if ((m & (m - 1)) != 0) throw ConfigError("n_grid", "q_m needs powers of two, got " + std::to_string(m));
    if (!cfg.epsilon_table.empty() && cfg.epsilon_table.size() <= cfg.n_grid.back())
      throw ConfigError("epsilon", "table must define eps(0..m) for the largest m in n_grid");
  }
  if (cfg.target == TargetKind::CoefficientFile && cfg.target_file.empty())
    throw ConfigError("target_file", "required when target = file");
  if (cfg.target_size && *cfg.target_size < 1) throw ConfigError("target_size", "must be >= 1");
  if (cfg.algorithm == Algorithm::ANR || cfg.algorithm == Algorithm::Q2NR) (void)cfg.algorithm_order();
  return cfg;
}

}  // namespace mlapprox
