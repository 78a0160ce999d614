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

// paylane: lane-change bargaining on a two-lane cellular automaton.
//
//   paylane example [--td-zero] [--swap-vot]
//   paylane solve --kind tu --a 0,0.0062,0,0 --b 0,0,0.0023,0
//   paylane run --config ring.cfg --out out/
//   paylane sweep --preset speed_density --jobs 8 --out out/
//   paylane calibrate --out out/
//
// Exit codes: 0 success, 2 configuration error, 3 golden deviation,
// 4 runtime failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "paylane/config.hpp"
#include "paylane/experiments.hpp"
#include "paylane/game.hpp"
#include "paylane/io.hpp"
#include "paylane/random.hpp"
#include "paylane/sim.hpp"

#ifndef PAYLANE_VERSION
#define PAYLANE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitGolden = 3;
constexpr int kExitRuntime = 4;

// Raised for bad command-line input that is not a config-file problem.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> preset;
};

paylane::Config load(const CommonOptions& opts) {
  std::map<std::string, std::string> flags;
  if (opts.seed) flags[paylane::env_name("sim.seed")] = std::to_string(*opts.seed);
  if (opts.jobs) flags[paylane::env_name("scenario.jobs")] = std::to_string(*opts.jobs);
  if (opts.preset) flags[paylane::env_name("scenario.mode")] = *opts.preset;
  const paylane::EnvLookup env = paylane::process_env();
  const paylane::EnvLookup lookup =
      [&](const std::string& name) -> std::optional<std::string> {
    if (const auto it = flags.find(name); it != flags.end()) return it->second;
    return env(name);
  };

  paylane::Config cfg =
      opts.config_path.empty()
          ? paylane::parse_config("", "<defaults>", lookup)
          : paylane::load_config(opts.config_path, lookup);
  if (!cfg.ve_table_path.empty()) {
    fs::path table = cfg.ve_table_path;
    if (table.is_relative() && !opts.config_path.empty()) {
      table = fs::path(opts.config_path).parent_path() / table;
    }
    try {
      cfg.sim.ve_table = paylane::parse_ve_table_csv(paylane::read_file(table));
    } catch (const std::exception& e) {
      throw paylane::ConfigError(opts.config_path, 0, "sim.ve_table", e.what());
    }
    cfg.scenario.base.ve_table = cfg.sim.ve_table;
  }
  return cfg;
}

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  template <typename Writer>
  void write(const std::string& name, Writer&& writer) {
    std::ostringstream buf;
    writer(buf);
    put(name, buf.str());
  }

  void put(const std::string& name, const std::string& content) {
    paylane::write_file(dir_ / name, content);
    artifacts_.push_back({{"path", name}, {"bytes", content.size()}});
  }

  void heatmap(const std::string& stem, const paylane::Heatmap& map,
               double v_max) {
    for (const fs::path& p : paylane::write_heatmap_files(dir_ / stem, map, v_max)) {
      artifacts_.push_back({{"path", p.filename().string()},
                            {"bytes", fs::file_size(p)}});
    }
  }

  void manifest(const std::string& command, const paylane::Config& cfg,
                const std::vector<std::uint64_t>& seeds, json runs,
                double wall_seconds) {
    json config = json::object();
    std::istringstream in(paylane::serialize_config(cfg));
    for (std::string line; std::getline(in, line);) {
      const auto eq = line.find(" = ");
      if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
      config[line.substr(0, eq)] = line.substr(eq + 3);
    }
    json m;
    m["tool"] = "paylane";
    m["version"] = PAYLANE_VERSION;
    m["command"] = command;
    m["config"] = std::move(config);
    m["config_file"] = "config.txt";
    m["seeds"] = seeds;
    m["artifacts"] = artifacts_;
    m["runs"] = std::move(runs);
    m["wall_clock_s"] = wall_seconds;
    paylane::write_file(dir_ / "manifest.json", m.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  json artifacts_ = json::array();
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------------------
// example

struct Golden {
  std::string name;
  double got;
  double want;
  double tol;
};

int cmd_example(bool td_zero, bool swap_vot) {
  using paylane::SpeedScenario;
  const double kmh = 1.0 / 3.6;
  const SpeedScenario sa{0.0, 55 * kmh, 25 * kmh, 31 * kmh, 3.0, -4.0, 1.0};
  const SpeedScenario sb{0.0, 52 * kmh, 45 * kmh, 38 * kmh, 3.0, -3.0, -1.0};
  double vot_a = 10.0, vot_b = 25.0;  // dollars/h
  if (swap_vot) std::swap(vot_a, vot_b);

  const double td_a = td_zero ? 0.0 : paylane::time_difference(sa);
  const double td_b = td_zero ? 0.0 : paylane::time_difference(sb);
  const paylane::BimatrixGame g =
      paylane::build_utility_matrix(vot_a / 3600.0, td_a, vot_b / 3600.0, td_b);
  const paylane::TuOutcome tu = paylane::solve_tu(g);

  std::printf("VOT A = %g $/h, VOT B = %g $/h\n", vot_a, vot_b);
  std::printf("t_d^A = %.4f s\nt_d^B = %.4f s\n", td_a, td_b);
  std::printf("A = [[%g, %.6f], [%g, %g]]\n", g.a[0][0], g.a[0][1], g.a[1][0],
              g.a[1][1]);
  std::printf("B = [[%g, %g], [%.6f, %g]]\n", g.b[0][0], g.b[0][1], g.b[1][0],
              g.b[1][1]);
  std::printf("omega* = %.6f at %s\n", tu.omega_star,
              paylane::to_string(tu.action).c_str());
  std::printf("sigma = %+.6f (%s)\n", tu.sigma,
              tu.sigma > 0 ? "A pays B" : tu.sigma < 0 ? "B pays A" : "no payment");
  std::printf("payoffs = (%.6f, %.6f)\n", tu.payoff_a, tu.payoff_b);

  std::vector<Golden> checks;
  if (td_zero) {
    checks = {{"sigma", tu.sigma, 0.0, 0.0},
              {"omega*", tu.omega_star, 0.0, 0.0}};
  } else if (swap_vot) {
    // A alone gains; the split is half of A's gain.
    const double a12 = vot_a / 3600.0 * td_a;
    checks = {{"sigma", tu.sigma, a12 / 2.0, 1e-12},
              {"payoff_a", tu.payoff_a, a12 / 2.0, 1e-12},
              {"payoff_b", tu.payoff_b, a12 / 2.0, 1e-12}};
  } else {
    checks = {{"t_d^A", td_a, 2.26, 0.005},     {"t_d^B", td_b, 0.34, 0.005},
              {"A12", g.a[0][1], 0.0062, 1e-4}, {"B21", g.b[1][0], 0.0023, 1e-4},
              {"sigma", tu.sigma, 0.0031, 5e-5}, {"payoff_a", tu.payoff_a, 0.0031, 5e-5},
              {"payoff_b", tu.payoff_b, 0.0031, 5e-5}};
  }
  int bad = 0;
  for (const Golden& c : checks) {
    if (!(std::abs(c.got - c.want) <= c.tol)) {
      std::fprintf(stderr, "golden deviation: %s = %.9g, expected %.9g +/- %g\n",
                   c.name.c_str(), c.got, c.want, c.tol);
      ++bad;
    }
  }
  if (bad) return kExitGolden;
  std::printf("golden: ok\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// solve

paylane::Table2x2 parse_table(const std::string& text, const char* flag) {
  std::vector<double> v;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) {
        ++used;
      }
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": bad number '" + item + "'");
    }
  }
  if (v.size() != 4) {
    throw UsageError(std::string(flag) + ": expected 4 comma-separated entries");
  }
  return {{{v[0], v[1]}, {v[2], v[3]}}};
}

int cmd_solve(const std::string& kind, const std::string& a_text,
              const std::string& b_text, double m, std::uint64_t seed) {
  paylane::BimatrixGame g;
  g.a = parse_table(a_text, "--a");
  g.b = parse_table(b_text, "--b");
  g.m = m;
  // Crash cell is implied by the penalty.
  g.a[0][0] = g.b[0][0] = -m;
  try {
    if (kind == "tu") {
      paylane::validate_game(g);
      const paylane::TuOutcome tu = paylane::solve_tu(g);
      std::printf("omega* = %.17g\naction = %s\nsigma = %.17g\n", tu.omega_star,
                  paylane::to_string(tu.action).c_str(), tu.sigma);
      std::printf("payoff_a = %.17g\npayoff_b = %.17g\n", tu.payoff_a, tu.payoff_b);
      std::printf("threat = (%.17g, %.17g)\ntheta = %.17g\n", tu.threat_a,
                  tu.threat_b, tu.theta);
    } else {
      paylane::validate_lane_change_structure(g);
      paylane::CounterRng rng =
          paylane::RandomStreams(seed).stream(0, 0, paylane::Draw::kCoin);
      const paylane::NtuOutcome n = paylane::solve_ntu(g, rng);
      std::printf("n_a = %.17g\nn_b = %.17g\nstatus_quo = (%g, %g)\n", n.n_a,
                  n.n_b, n.status_quo_a, n.status_quo_b);
      std::printf("action = %s\n", paylane::to_string(n.realized_action).c_str());
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("invalid matrix: ") + e.what());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run / sweep / calibrate

json run_entry(const paylane::RunResult& r) {
  json e{{"point", r.point.index}, {"replicate", r.replicate}, {"seed", r.seed},
         {"wall_clock_s", r.wall_seconds}};
  if (!r.error.empty()) e["error"] = r.error;
  return e;
}

int cmd_run(const CommonOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const paylane::Config cfg = load(opts);
  Outputs out(opts.out_dir);
  out.put("config.txt", paylane::serialize_config(cfg));

  paylane::RunOptions ro;
  ro.record_trajectory = cfg.run.trajectory;
  ro.record_heatmap = cfg.run.heatmap;
  ro.heatmap_time_bin = cfg.run.heatmap_time_bin;
  ro.heatmap_space_bin = cfg.run.heatmap_space_bin;
  paylane::RunArtifacts art;
  paylane::RunResult r =
      paylane::run_point(cfg.sim, cfg.run.warmup, cfg.run.steps, ro, &art);
  r.point.density = cfg.sim.density;
  r.point.penetration = cfg.sim.tv_penetration;
  r.point.ratio = cfg.sim.high_low_ratio;
  r.point.vot_high = cfg.sim.vot_high;

  out.write("ledger.csv", [&](std::ostream& o) { paylane::write_ledger_csv(o, art.ledger); });
  if (cfg.run.trajectory) {
    out.write("trajectory.csv",
              [&](std::ostream& o) { paylane::write_trajectory_csv(o, art.trajectory); });
  }
  out.write("speed_density.csv", [&](std::ostream& o) {
    paylane::write_speed_density_csv(o, r.speed_density);
  });
  paylane::SweepResult one;
  one.points = {r.point};
  one.runs = {r};
  out.write("benefit.csv", [&](std::ostream& o) {
    paylane::write_benefit_csv(o, one, cfg.sim.untruthful_mode);
  });
  if (art.heatmap) out.heatmap("heatmap", *art.heatmap, cfg.sim.v_max);
  out.manifest("run", cfg, {cfg.sim.seed}, json::array({run_entry(r)}),
               seconds_since(t0));
  std::printf("%zu vehicles, %zu games, payment balance %g -> %s\n",
              r.all.n_vehicles, r.n_games, r.payment_balance,
              opts.out_dir.c_str());
  return kExitOk;
}

std::vector<std::uint64_t> seed_list(const paylane::ScenarioSpec& spec) {
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < spec.n_seeds; ++k) {
    seeds.push_back(paylane::replicate_seed(spec.base.seed, k));
  }
  return seeds;
}

std::string density_tag(double d) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", d);
  return buf;
}

int cmd_sweep(const CommonOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const paylane::Config cfg = load(opts);
  const paylane::ScenarioSpec& spec = cfg.scenario;
  Outputs out(opts.out_dir);
  out.put("config.txt", paylane::serialize_config(cfg));
  json runs = json::array();
  int failures = 0;

  switch (spec.mode) {
    case paylane::Preset::kVip: {
      const std::vector<paylane::VipRow> rows = paylane::run_vip(spec);
      out.write("vip.csv", [&](std::ostream& o) { paylane::write_vip_csv(o, rows); });
      break;
    }
    case paylane::Preset::kShockwaveRing: {
      const std::vector<paylane::ShockwaveMap> maps = paylane::run_shockwave(spec);
      std::ostringstream bands;
      paylane::CsvWriter csv(bands);
      csv.header({"map", "penetration", "density", "first_row", "rows",
                  "slope_cells_per_step"});
      for (const paylane::ShockwaveMap& m : maps) {
        const std::string stem = std::string("shockwave_") +
                                 (m.penetration > 0.5 ? "tv_" : "ntv_") +
                                 density_tag(m.density);
        out.heatmap(stem, m.map, spec.base.v_max);
        for (const paylane::BandTrack& b : m.bands) {
          csv.cell(stem).cell(m.penetration).cell(m.density).cell(b.first_row).cell(
              b.rows).cell(b.slope_cells_per_step);
          csv.end_row();
        }
      }
      out.put("bands.csv", bands.str());
      break;
    }
    default: {
      const paylane::SweepResult sweep = paylane::run_sweep(spec);
      out.write("benefit.csv", [&](std::ostream& o) {
        paylane::write_benefit_csv(o, sweep, spec.base.untruthful_mode);
      });
      out.write("speed_density.csv", [&](std::ostream& o) {
        paylane::write_sweep_speed_density_csv(o, sweep);
      });
      out.write("summary.csv",
                [&](std::ostream& o) { paylane::write_summary_csv(o, sweep); });
      for (const paylane::RunResult& r : sweep.runs) {
        runs.push_back(run_entry(r));
        if (!r.error.empty()) {
          ++failures;
          std::fprintf(stderr, "point %zu seed %llu failed: %s\n", r.point.index,
                       static_cast<unsigned long long>(r.seed), r.error.c_str());
        }
      }
      break;
    }
  }
  out.manifest("sweep", cfg, seed_list(spec), std::move(runs), seconds_since(t0));
  std::printf("sweep %s -> %s (%.1f s)\n", paylane::to_string(spec.mode).c_str(),
              opts.out_dir.c_str(), seconds_since(t0));
  return failures ? kExitRuntime : kExitOk;
}

int cmd_calibrate(const CommonOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const paylane::Config cfg = load(opts);
  Outputs out(opts.out_dir);
  out.put("config.txt", paylane::serialize_config(cfg));
  const paylane::VeTable table = paylane::calibrate(cfg.scenario);
  out.write("ve_table.csv",
            [&](std::ostream& o) { paylane::write_ve_table_csv(o, table); });
  out.manifest("calibrate", cfg, seed_list(cfg.scenario), json::array(),
               seconds_since(t0));
  std::printf("calibrated %zu densities -> %s\n", table.density.size(),
              opts.out_dir.c_str());
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool sweep_flags) {
  cmd->add_option("--config", opts.config_path, "Configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "Output directory");
  cmd->add_option("--seed", opts.seed, "Base seed (overrides sim.seed)");
  if (sweep_flags) {
    cmd->add_option("--jobs", opts.jobs, "Parallel runs")->check(CLI::PositiveNumber);
    cmd->add_option("--preset", opts.preset, "Scenario preset");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane-change bargaining on a two-lane cellular automaton"};
  app.set_version_flag("--version", PAYLANE_VERSION);
  app.require_subcommand(1);

  bool td_zero = false, swap_vot = false;
  auto* example = app.add_subcommand("example", "Print the worked two-vehicle example");
  example->add_flag("--td-zero", td_zero, "Force both time differences to 0");
  example->add_flag("--swap-vot", swap_vot, "Give A the high VOT and B the low");

  std::string kind = "tu", a_text, b_text;
  double m = paylane::kDefaultCrashPenalty;
  std::uint64_t solve_seed = 1;
  auto* solve = app.add_subcommand("solve", "Solve one 2x2 lane-change game");
  solve->add_option("--kind", kind, "tu or ntu")
      ->check(CLI::IsMember({"tu", "ntu"}));
  solve->add_option("--a", a_text, "A's payoffs a11,a12,a21,a22 (a11 is set to -m)")
      ->required();
  solve->add_option("--b", b_text, "B's payoffs b11,b12,b21,b22 (b11 is set to -m)")
      ->required();
  solve->add_option("--m", m, "Crash penalty");
  solve->add_option("--seed", solve_seed, "Seed for the NTU coin");

  CommonOptions run_opts, sweep_opts, cal_opts;
  add_common(app.add_subcommand("run", "Run one simulation"), run_opts, false);
  add_common(app.add_subcommand("sweep", "Run a scenario sweep"), sweep_opts, true);
  add_common(app.add_subcommand("calibrate", "Tabulate game-free equilibrium speeds"),
             cal_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*example) return cmd_example(td_zero, swap_vot);
    if (*solve) return cmd_solve(kind, a_text, b_text, m, solve_seed);
    if (app.got_subcommand("run")) return cmd_run(run_opts);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep_opts);
    if (app.got_subcommand("calibrate")) return cmd_calibrate(cal_opts);
  } catch (const paylane::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitConfig;
}
