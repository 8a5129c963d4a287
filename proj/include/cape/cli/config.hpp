#pragma once

// Simulation config: key = value lines grouped under `[scenario]` headers,
// one header per scenario block. `#` starts a comment. Lists are comma
// separated. Unknown keys, duplicate keys and keys outside a block are
// errors.
//
//   [scenario]
//   setting = I              # I | II | III | custom
//   pi = 0.05
//   grid_points = 30         # or: pi0 = 0.025
//   n = 2000
//   replicates = 5000        # default 5000 with intervals, 20000 without
//   seed = 20201101
//   estimators = survey-mle, cmle, mmle, mme
//   intervals = cp-rstar1, cp-r01, asymptotic-cmle
//   level = 0.95
//   alpha = 0.01             # custom only, likewise beta and alpha0

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cape/errors.hpp"
#include "cape/montecarlo.hpp"

namespace cape::cli {

class ConfigError : public DomainError {
 public:
  ConfigError(int line, const std::string& key, const std::string& what);
  [[nodiscard]] int line() const noexcept { return line_; }
  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

struct ScenarioBlock {
  int line = 0;  // line of the [scenario] header
  Scenario base;
  std::optional<double> pi0;
  std::optional<int> grid_points;
  bool replicates_given = false;

  // The pi0 grid if grid_points was given, otherwise the single scenario.
  [[nodiscard]] std::vector<Scenario> expand() const;
};

struct SimulationConfig {
  std::vector<ScenarioBlock> blocks;
};

SimulationConfig parse_config(std::string_view text);
SimulationConfig load_config(const std::string& path);

}  // namespace cape::cli
