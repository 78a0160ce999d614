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

#include "paylane/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "paylane/io.hpp"

namespace paylane {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_integer(std::string_view s) {
  s = trim(s);
  T out{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected an integer, got '" + std::string(s) +
                                "'");
  }
  return out;
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() ||
      !std::isfinite(out)) {
    throw std::invalid_argument("expected a number, got '" + std::string(s) +
                                "'");
  }
  return out;
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("expected true or false, got '" + std::string(s) +
                              "'");
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = s.find(',', pos);
    out.push_back(parse_double(s.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string format_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_number(xs[i]);
  }
  return out;
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

Boundary parse_boundary(std::string_view s) {
  s = trim(s);
  if (s == "ring") return Boundary::kRing;
  if (s == "open") return Boundary::kOpen;
  throw std::invalid_argument("expected ring or open");
}

Untruthful parse_untruthful(std::string_view s) {
  s = trim(s);
  for (Untruthful u : {Untruthful::kNone, Untruthful::kHighDeclaresLow,
                       Untruthful::kLowDeclaresHigh}) {
    if (s == to_string(u)) return u;
  }
  throw std::invalid_argument(
      "expected none, high_declares_low or low_declares_high");
}

VeSource parse_ve_source(std::string_view s) {
  s = trim(s);
  if (s == "trailing") return VeSource::kTrailing;
  if (s == "table") return VeSource::kTable;
  throw std::invalid_argument("expected trailing or table");
}

Preset parse_mode(std::string_view s) {
  if (const auto p = parse_preset(trim(s))) return *p;
  throw std::invalid_argument("unknown preset '" + std::string(trim(s)) + "'");
}

struct Field {
  std::string key;
  std::function<void(Config&, std::string_view)> set;
  std::function<std::string(const Config&)> get;
};

#define PAYLANE_DOUBLE(KEY, MEMBER)                                          \
  Field {                                                                    \
    KEY, [](Config& c, std::string_view v) { c.MEMBER = parse_double(v); },  \
        [](const Config& c) { return format_number(c.MEMBER); }              \
  }
#define PAYLANE_INT(KEY, MEMBER, TYPE)                                          \
  Field {                                                                       \
    KEY,                                                                        \
        [](Config& c, std::string_view v) { c.MEMBER = parse_integer<TYPE>(v); }, \
        [](const Config& c) { return std::to_string(c.MEMBER); }                \
  }
#define PAYLANE_BOOL(KEY, MEMBER)                                          \
  Field {                                                                  \
    KEY, [](Config& c, std::string_view v) { c.MEMBER = parse_bool(v); }, \
        [](const Config& c) { return format_bool(c.MEMBER); }              \
  }
#define PAYLANE_LIST(KEY, MEMBER)                                          \
  Field {                                                                  \
    KEY, [](Config& c, std::string_view v) { c.MEMBER = parse_list(v); }, \
        [](const Config& c) { return format_list(c.MEMBER); }              \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      Field{"scenario.mode",
            [](Config& c, std::string_view v) { c.scenario.mode = parse_mode(v); },
            [](const Config& c) { return to_string(c.scenario.mode); }},
      PAYLANE_DOUBLE("sim.cell_length", sim.cell_length),
      PAYLANE_INT("sim.n_cells", sim.n_cells, int),
      PAYLANE_DOUBLE("sim.dt", sim.dt),
      PAYLANE_INT("sim.v_max", sim.v_max, int),
      PAYLANE_INT("sim.a_pos", sim.a_pos, int),
      PAYLANE_INT("sim.a_neg", sim.a_neg, int),
      PAYLANE_INT("sim.n_lanes", sim.n_lanes, int),
      PAYLANE_DOUBLE("sim.p_sd", sim.p_sd),
      PAYLANE_DOUBLE("sim.ta", sim.ta),
      Field{"sim.boundary",
            [](Config& c, std::string_view v) { c.sim.boundary = parse_boundary(v); },
            [](const Config& c) { return to_string(c.sim.boundary); }},
      PAYLANE_DOUBLE("sim.inflow_rate", sim.inflow_rate),
      PAYLANE_DOUBLE("sim.tv_penetration", sim.tv_penetration),
      PAYLANE_DOUBLE("sim.vot_high", sim.vot_high),
      PAYLANE_DOUBLE("sim.vot_low", sim.vot_low),
      PAYLANE_DOUBLE("sim.high_low_ratio", sim.high_low_ratio),
      Field{"sim.untruthful_mode",
            [](Config& c, std::string_view v) {
              c.sim.untruthful_mode = parse_untruthful(v);
            },
            [](const Config& c) { return to_string(c.sim.untruthful_mode); }},
      PAYLANE_INT("sim.seed", sim.seed, std::uint64_t),
      PAYLANE_INT("sim.ve_window", sim.ve_window, int),
      PAYLANE_DOUBLE("sim.crash_penalty", sim.crash_penalty),
      PAYLANE_BOOL("sim.games", sim.games),
      PAYLANE_INT("sim.n_vehicles", sim.n_vehicles, int),
      PAYLANE_DOUBLE("sim.density", sim.density),
      Field{"sim.ve_source",
            [](Config& c, std::string_view v) { c.sim.ve_source = parse_ve_source(v); },
            [](const Config& c) { return to_string(c.sim.ve_source); }},
      Field{"sim.ve_table",
            [](Config& c, std::string_view v) { c.ve_table_path = trim(v); },
            [](const Config& c) { return c.ve_table_path; }},
      PAYLANE_LIST("scenario.densities", scenario.densities),
      PAYLANE_LIST("scenario.penetrations", scenario.penetrations),
      PAYLANE_LIST("scenario.ratios", scenario.ratios),
      PAYLANE_LIST("scenario.vot_highs", scenario.vot_highs),
      PAYLANE_INT("scenario.n_seeds", scenario.n_seeds, int),
      PAYLANE_INT("scenario.warmup", scenario.warmup, std::int64_t),
      PAYLANE_INT("scenario.horizon", scenario.horizon, std::int64_t),
      PAYLANE_INT("scenario.jobs", scenario.jobs, int),
      PAYLANE_INT("scenario.heatmap_time_bin", scenario.heatmap_time_bin, int),
      PAYLANE_INT("scenario.heatmap_space_bin", scenario.heatmap_space_bin, int),
      PAYLANE_INT("run.steps", run.steps, std::int64_t),
      PAYLANE_INT("run.warmup", run.warmup, std::int64_t),
      PAYLANE_BOOL("run.trajectory", run.trajectory),
      PAYLANE_BOOL("run.heatmap", run.heatmap),
      PAYLANE_INT("run.heatmap_time_bin", run.heatmap_time_bin, int),
      PAYLANE_INT("run.heatmap_space_bin", run.heatmap_space_bin, int),
  };
  return kFields;
}

#undef PAYLANE_DOUBLE
#undef PAYLANE_INT
#undef PAYLANE_BOOL
#undef PAYLANE_LIST

const Field* find_field(std::string_view key) {
  for (const Field& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

struct Entry {
  std::string source;
  int line = 0;
  std::string value;
};

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

ConfigError::ConfigError(std::string source, int line, std::string key,
                         const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : "") +
                         (key.empty() ? "" : ": " + key) + ": " + message),
      source_(std::move(source)),
      line_(line),
      key_(std::move(key)) {}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

EnvLookup no_env() {
  return [](const std::string&) -> std::optional<std::string> {
    return std::nullopt;
  };
}

std::string env_name(std::string_view key) {
  std::string out = "PAYLANE_";
  for (char c : key) {
    out += c == '.' ? '_'
                    : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> kKeys = [] {
    std::vector<std::string> keys;
    for (const Field& f : fields()) keys.push_back(f.key);
    return keys;
  }();
  return kKeys;
}

Config parse_config(std::string_view text, const std::string& source,
                    const EnvLookup& env) {
  std::map<std::string, Entry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && starts_with(line, "\xEF\xBB\xBF")) line.remove_prefix(3);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source, line_no, std::string(line),
                        "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(source, line_no, "", "missing key");
    if (!find_field(key)) throw ConfigError(source, line_no, key, "unknown key");
    if (const auto it = entries.find(key); it != entries.end()) {
      throw ConfigError(source, line_no, key,
                        "duplicate key (first set on line " +
                            std::to_string(it->second.line) + ")");
    }
    entries[key] = Entry{source, line_no, std::string(trim(line.substr(eq + 1)))};
  }
  for (const Field& f : fields()) {
    const std::string name = env_name(f.key);
    if (auto v = env(name)) entries[f.key] = Entry{"env " + name, 0, *v};
  }

  auto apply = [&](Config& c, const std::string& key) {
    const auto it = entries.find(key);
    if (it == entries.end()) return;
    try {
      find_field(key)->set(c, it->second.value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(it->second.source, it->second.line, key, e.what());
    }
  };

  Config c;
  apply(c, "scenario.mode");
  const Preset mode = c.scenario.mode;
  c.sim = preset_spec(mode, SimConfig{}).base;
  for (const Field& f : fields()) {
    if (starts_with(f.key, "sim.")) apply(c, f.key);
  }
  c.scenario = preset_spec(mode, c.sim);
  c.scenario.base = c.sim;
  for (const Field& f : fields()) {
    if (starts_with(f.key, "scenario.") || starts_with(f.key, "run.")) {
      apply(c, f.key);
    }
  }

  // Validation; the table itself is loaded by the caller.
  auto where = [&](const std::string& key) {
    const auto it = entries.find(key);
    return it == entries.end() ? std::pair<std::string, int>{source, 0}
                               : std::pair{it->second.source, it->second.line};
  };
  auto check = [&](auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      std::string key = msg.substr(0, msg.find(' '));
      if (!find_field(key)) key.clear();
      const auto [src, line] = where(key);
      throw ConfigError(src, line, key,
                        key.empty() ? msg : msg.substr(msg.find(' ') + 1));
    }
  };
  if (c.sim.ve_source == VeSource::kTable && c.ve_table_path.empty() &&
      c.sim.ve_table.empty()) {
    const auto [src, line] = where("sim.ve_source");
    throw ConfigError(src, line, "sim.ve_table",
                      "required when sim.ve_source = table");
  }
  SimConfig probe = c.sim;
  probe.ve_source = VeSource::kTrailing;
  check([&] { probe.validate(); });
  ScenarioSpec spec_probe = c.scenario;
  spec_probe.base = probe;
  check([&] { spec_probe.validate(); });
  check([&] {
    if (c.run.warmup < 0) throw std::invalid_argument("run.warmup must be >= 0");
    if (c.run.steps <= c.run.warmup) {
      throw std::invalid_argument("run.steps must exceed run.warmup");
    }
    if (c.run.heatmap_time_bin < 1) {
      throw std::invalid_argument("run.heatmap_time_bin must be >= 1");
    }
    if (c.run.heatmap_space_bin < 1) {
      throw std::invalid_argument("run.heatmap_space_bin must be >= 1");
    }
  });
  return c;
}

Config load_config(const std::string& path, const EnvLookup& env) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(path, 0, "", e.what());
  }
  return parse_config(text, path, env);
}

std::string serialize_config(const Config& cfg) {
  std::string out = "# paylane configuration\n";
  for (const Field& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(cfg);
    out += '\n';
  }
  return out;
}

}  // namespace paylane
