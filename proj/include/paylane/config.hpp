// Copyright 2026 The paylane Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PAYLANE_CONFIG_HPP
#define PAYLANE_CONFIG_HPP

// Configuration files are line-based `key = value` text:
//
//   # comment
//   sim.p_sd = 0.3333333333
//   scenario.densities = 40, 80, 120
//
// Keys are dotted (sim.*, scenario.*, run.*). Any key can be overridden
// from the environment as PAYLANE_<KEY> with dots turned into underscores,
// e.g. PAYLANE_SIM_SEED=7.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "paylane/experiments.hpp"
#include "paylane/sim.hpp"

namespace paylane {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, std::string key,
              const std::string& message);

  const std::string& source() const { return source_; }
  int line() const { return line_; }  // 0 when not tied to a line
  const std::string& key() const { return key_; }

 private:
  std::string source_;
  int line_;
  std::string key_;
};

struct RunSettings {
  std::int64_t steps = 3600;
  std::int64_t warmup = 600;
  bool trajectory = true;
  bool heatmap = true;
  int heatmap_time_bin = 10;
  int heatmap_space_bin = 4;

  bool operator==(const RunSettings&) const = default;
};

struct Config {
  SimConfig sim;
  ScenarioSpec scenario;  // scenario.base mirrors sim
  RunSettings run;
  std::string ve_table_path;  // sim.ve_table; resolved by the caller

  bool operator==(const Config&) const = default;
};

/// Returns the value of an environment variable, if set.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_env();
EnvLookup no_env();

/// PAYLANE_SIM_P_SD for sim.p_sd.
std::string env_name(std::string_view key);

/// Parses config text. Preset defaults (scenario.mode) apply first, then
/// the file, then the environment. Throws ConfigError.
Config parse_config(std::string_view text, const std::string& source = "<config>",
                    const EnvLookup& env = no_env());
Config load_config(const std::string& path, const EnvLookup& env = process_env());

/// Every key, one per line, in a fixed order.
std::string serialize_config(const Config& cfg);

/// All recognized keys in serialization order.
const std::vector<std::string>& config_keys();

}  // namespace paylane

#endif  // PAYLANE_CONFIG_HPP
