// Experiment configuration: a flat `key = value` text file whose entries
// can be overridden one by one from the command line.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlapprox/spectral_model.hpp"

namespace mlapprox {

enum class Algorithm { ANR, QM, Q2NR, DirectSimulation };
enum class TargetKind { HardInstance, WeakInstance, RandomUnitBall, CoefficientFile };

const char* algorithm_name(Algorithm a);
const char* target_name(TargetKind t);

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument("config field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  WeightSpec spec = WeightSpec::mixed(1, 1);
  std::size_t N = 1024;
  Algorithm algorithm = Algorithm::ANR;
  std::optional<double> order;         // r of A_n^r; defaults to the weight's r
  std::vector<double> epsilon_table;   // eps(0), eps(1), ...; empty means sigma(m+1)^2
  std::vector<std::uint64_t> n_grid{16, 32, 64, 128};
  std::size_t replications = 100;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  TargetKind target = TargetKind::RandomUnitBall;
  std::optional<std::size_t> target_size;  // s; defaults to the basis size
  std::string target_file;
  std::string out;

  double algorithm_order() const;
};

using Settings = std::map<std::string, std::string>;

// Reads `key = value` lines; blank lines and '#' comments are skipped.
Settings read_settings(std::istream& in);

// Builds and validates a configuration. Unknown keys and invalid values
// throw ConfigError naming the field.
ExperimentConfig make_config(const Settings& settings);

}  // namespace mlapprox
