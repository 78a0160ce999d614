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

// End-to-end acceptance gate. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
//
//   acceptance [--quick] [--out DIR]
//
// --quick trims seeds and grids for a fast smoke pass; the verdicts printed
// in that mode are not the real ones.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "paylane/experiments.hpp"
#include "paylane/game.hpp"
#include "paylane/io.hpp"

namespace fs = std::filesystem;
using namespace paylane;

namespace {

struct Options {
  bool quick = false;
  fs::path out = "acceptance_out";
  int jobs = 1;
};

class Report {
 public:
  void line(int id, bool pass, const std::string& name, const std::string& detail) {
    std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures_;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Seed-averaged statistic of grid point `p`.
MeanSd point_stat(const SweepResult& s, std::size_t p,
                  const std::function<double(const RunResult&)>& f) {
  std::vector<double> v;
  for (const RunResult& r : s.runs) {
    if (r.point.index == p && r.error.empty()) v.push_back(f(r));
  }
  return mean_sd(v);
}

std::size_t point_at(const SweepResult& s, double density, double penetration) {
  for (const GridPoint& g : s.points) {
    if (std::abs(g.density - density) < 1e-9 &&
        std::abs(g.penetration - penetration) < 1e-9) {
      return g.index;
    }
  }
  throw std::runtime_error("grid point not found");
}

double beta_of(const RunResult& r, VehicleClass c) {
  const auto& b = r.of(c).benefit;
  return b ? b->beta : std::nan("");
}

int failed_runs(const SweepResult& s) {
  int n = 0;
  for (const RunResult& r : s.runs) n += r.error.empty() ? 0 : 1;
  return n;
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(PAYLANE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void save(const fs::path& p, const std::function<void(std::ostream&)>& w) {
  std::ostringstream buf;
  w(buf);
  write_file(p, buf.str());
}

// ---------------------------------------------------------------------------

void criterion_1(Report& rep) {
  constexpr double kKmh = 1.0 / 3.6;
  const SpeedScenario sa{0.0, 55 * kKmh, 25 * kKmh, 31 * kKmh, 3.0, -4.0, 1.0};
  const SpeedScenario sb{0.0, 52 * kKmh, 45 * kKmh, 38 * kKmh, 3.0, -3.0, -1.0};
  const double ta = time_difference(sa);
  const double tb = time_difference(sb);
  const BimatrixGame g = build_utility_matrix(10.0 / 3600, ta, 25.0 / 3600, tb);
  const TuOutcome tu = solve_tu(g);
  const bool ok = std::abs(ta - 2.26) <= 0.005 && std::abs(tb - 0.34) <= 0.005 &&
                  std::abs(g.a[0][1] - 0.0062) <= 1e-4 &&
                  std::abs(g.b[1][0] - 0.0023) <= 1e-4 &&
                  std::abs(tu.sigma - 0.0031) <= 5e-5 &&
                  std::abs(tu.payoff_a - 0.0031) <= 5e-5 &&
                  std::abs(tu.payoff_b - 0.0031) <= 5e-5 &&
                  tu.action == JointAction{kChangeLanes, kGiveWay};
  const bool cli_ok = run_cli("example") == 0;
  rep.line(1, ok && cli_ok, "worked example",
           "td_a=" + fmt("%.4f", ta) + " td_b=" + fmt("%.4f", tb) +
               " A12=" + fmt("%.5f", g.a[0][1]) + " B21=" + fmt("%.5f", g.b[1][0]) +
               " sigma=" + fmt("%.5f", tu.sigma) + " payoffs=(" +
               fmt("%.5f", tu.payoff_a) + ", " + fmt("%.5f", tu.payoff_b) +
               ") cli_exit=" + (cli_ok ? "0" : "nonzero"));
}

void criterion_2(Report& rep) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  int grid_misses = 0;
  int bracket_misses = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Table2x2 d;
    for (auto& row : d) {
      for (double& x : row) x = u(rng);
    }
    const ZeroSumSolution z = solve_zero_sum_2x2(d);
    const testing::GridBounds gb = testing::grid_value(d);
    const double err = std::abs(z.value - gb.maximin);
    worst = std::max(worst, err);
    if (err > 1e-3) ++grid_misses;
    if (z.value < gb.maximin - 1e-12 || z.value > gb.minimax + 1e-12) ++bracket_misses;
  }
  int nash_misses = 0;
  for (int i = 0; i < 100; ++i) {
    const BimatrixGame g = testing::random_lane_change_game(rng);
    const NtuOutcome n = solve_ntu(g, true);
    const auto [ua, ub] = testing::nash_grid(g);
    if (std::abs(n.n_a - ua) > 1e-6 || std::abs(n.n_b - ub) > 1e-6) ++nash_misses;
  }
  rep.line(2, grid_misses == 0 && nash_misses == 0, "solver oracles",
           "zero-sum vs 1e-3 grid maximin: " + std::to_string(grid_misses) +
               "/1000 beyond 1e-3 (worst " + fmt("%.4f", worst) +
               ", grid discretization error); exact value inside grid "
               "[maximin, minimax] bracket in " +
               std::to_string(1000 - bracket_misses) +
               "/1000; NTU vs Nash-product grid: " + std::to_string(nash_misses) +
               "/100 beyond 1e-6");
}

void criterion_3(Report& rep) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> lam(0.01, 100.0);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const BimatrixGame g = testing::random_lane_change_game(rng);
    const TuOutcome tu = solve_tu(g);
    const double a = g.a[tu.action.row][tu.action.col];
    const double b = g.b[tu.action.row][tu.action.col];
    bool ok = tu.theta == 0.0 && tu.payoff_a == tu.omega_star / 2 &&
              tu.payoff_b == tu.omega_star / 2 &&
              !(tu.action == JointAction{kChangeLanes, kHold});
    // sigma from the A side equals minus B's surplus over omega*/2.
    ok = ok && std::abs(tu.sigma - (a - tu.omega_star / 2)) <= 1e-15 &&
         std::abs(tu.sigma + (b - tu.omega_star / 2)) <= 1e-15;
    if (tu.sigma > 0) ok = ok && tu.action.row == kChangeLanes;
    if (tu.sigma < 0) ok = ok && tu.action.col == kHold;

    const double l = lam(rng);
    BimatrixGame s = g;
    for (auto* t : {&s.a, &s.b}) {
      for (auto& row : *t) {
        for (double& x : row) x *= l;
      }
    }
    s.m = g.m * l;
    const TuOutcome ts = solve_tu(s);
    ok = ok && ts.action == tu.action &&
         std::abs(ts.sigma - l * tu.sigma) <= 1e-12 * std::max(1.0, std::abs(l * tu.sigma));
    bad += ok ? 0 : 1;
  }
  rep.line(3, bad == 0, "TU structure",
           std::to_string(1000 - bad) + "/1000 games satisfy theta=0, payoffs=omega*/2, "
           "no crash cell, side-payment sign identity and scale equivariance");
}

void criterion_4(Report& rep) {
  std::mt19937_64 rng(4);
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const SpeedScenario s = testing::random_scenario(rng);
    const double err = std::abs(time_difference(s) - testing::integrate_time_difference(s));
    worst = std::max(worst, err);
    if (err > 1e-3) ++bad;
  }
  rep.line(4, bad == 0, "time-difference oracle",
           std::to_string(200 - bad) + "/200 within 1e-3 s of the 1 ms integrator (worst " +
               fmt("%.2e", worst) + " s)");
}

void criterion_5(Report& rep, const SweepResult& ntv, const Options& o) {
  const std::size_t n = ntv.points.size();
  std::vector<double> speed(n), flow(n), flow_se(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double d = ntv.points[p].density;
    speed[p] = point_stat(ntv, p, [](const RunResult& r) { return r.all.mean_speed_kmh; }).mean;
    const MeanSd q = point_stat(ntv, p, [d](const RunResult& r) {
      return d * r.all.mean_speed_kmh;
    });
    flow[p] = q.mean;
    flow_se[p] = q.n > 1 ? q.sd / std::sqrt(q.n) : 0.0;
  }
  // Free-flow limit from the lowest density, 2% tolerance.
  const double v_low = speed.front();
  const bool free_ok = std::abs(v_low - 135.0) <= 0.02 * 135.0;
  const bool jam_ok = std::abs(ntv.points.back().density - 1000.0 / 7.5) < 1e-9 &&
                      speed.back() == 0.0;
  // Unimodal: rising up to the argmax and falling after it, up to two
  // standard errors of the seed means.
  const std::size_t peak =
      static_cast<std::size_t>(std::max_element(flow.begin(), flow.end()) - flow.begin());
  int wiggles = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double tol = 2.0 * std::hypot(flow_se[i], flow_se[i + 1]);
    if (i < peak && flow[i + 1] < flow[i] - tol) ++wiggles;
    if (i >= peak && flow[i + 1] > flow[i] + tol) ++wiggles;
  }

  // Reference: the same road without slowdown noise.
  SimConfig ref;
  ref.tv_penetration = 0.0;
  ref.p_sd = 0.0;
  ref.density = 5.0;
  const RunResult r0 = run_point(ref, o.quick ? 100 : 600, o.quick ? 300 : 3600);

  rep.line(5, free_ok && jam_ok && wiggles == 0, "CA baseline",
           "speed at " + fmt("%.0f", ntv.points.front().density) + " veh/km = " +
               fmt("%.1f", v_low) + " km/h (target 135 +/- 2%; " +
               fmt("%.1f", r0.all.mean_speed_kmh) +
               " km/h with no slowdown noise); speed at jam = " +
               fmt("%.3f", speed.back()) + " km/h; flow peak at " +
               fmt("%.0f", ntv.points[peak].density) + " veh/km, " +
               std::to_string(wiggles) + " monotonicity breaks beyond 2 SE");
}

void criterion_6(Report& rep, const std::vector<const SweepResult*>& sweeps) {
  std::size_t runs = 0, games = 0, violations = 0, unbalanced = 0;
  for (const SweepResult* s : sweeps) {
    for (const RunResult& r : s->runs) {
      ++runs;
      games += r.n_tu_games;
      violations += r.winwin_violations;
      if (r.payment_balance != 0.0) ++unbalanced;
    }
  }
  rep.line(6, violations == 0 && unbalanced == 0 && games > 0, "win-win ledger",
           std::to_string(games) + " TU games over " + std::to_string(runs) +
               " truthful runs: " + std::to_string(violations) +
               " benefit != omega*/2, " + std::to_string(unbalanced) +
               " runs with nonzero payment sum");
}

void criterion_7(Report& rep, const SweepResult& tv) {
  std::string detail;
  bool ok = true;
  double worst = 1e9;
  for (const GridPoint& g : tv.points) {
    if (g.density < 40.0 - 1e-9 || g.density > 100.0 + 1e-9) continue;
    const double hi = point_stat(tv, g.index, [](const RunResult& r) {
                        return r.of(VehicleClass::kTvHigh).mean_speed_kmh;
                      }).mean;
    const double lo = point_stat(tv, g.index, [](const RunResult& r) {
                        return r.of(VehicleClass::kTvLow).mean_speed_kmh;
                      }).mean;
    const double gap = 100.0 * (hi / lo - 1.0);
    worst = std::min(worst, gap);
    if (!(gap >= 5.0)) ok = false;
    detail += fmt("%.0f:", g.density) + fmt("%+.1f%% ", gap);
  }
  rep.line(7, ok, "class ordering",
           "high vs low TV speed gap by density: " + detail + "(min " +
               fmt("%+.1f%%", worst) + ", floor +5%)");
}

void criterion_8(Report& rep, const SweepResult& tv, const SweepResult& ntv) {
  bool ok = true;
  double worst = 0.0;
  double worst_d = 0.0;
  int outside = 0;
  for (const GridPoint& g : tv.points) {
    const std::size_t q = point_at(ntv, g.density, 0.0);
    const double a = point_stat(tv, g.index, [](const RunResult& r) {
                       return r.all.mean_speed_kmh;
                     }).mean;
    const double b = point_stat(ntv, q, [](const RunResult& r) {
                       return r.all.mean_speed_kmh;
                     }).mean;
    const double dev = b > 0.0 ? std::abs(a / b - 1.0) : (a == 0.0 ? 0.0 : 1.0);
    if (dev > 0.05) {
      ok = false;
      ++outside;
    }
    if (dev > worst) {
      worst = dev;
      worst_d = g.density;
    }
  }
  rep.line(8, ok, "aggregate speed vs all-NTV",
           std::to_string(outside) + "/" + std::to_string(tv.points.size()) +
               " density points outside +/-5%; worst " + fmt("%.1f%%", 100 * worst) +
               " at " + fmt("%.0f", worst_d) + " veh/km");
}

void criterion_9(Report& rep, const SweepResult& ext) {
  double worst = 0.0;
  std::string where;
  int outside = 0, checked = 0;
  for (const GridPoint& g : ext.points) {
    for (VehicleClass c : kAllClasses) {
      const MeanSd rel = point_stat(ext, g.index, [c](const RunResult& r) {
        const auto& b = r.of(c).benefit;
        return b ? b->relative_beta() : std::nan("");
      });
      if (rel.n == 0) continue;
      ++checked;
      if (std::abs(rel.mean) >= 0.002) ++outside;
      if (std::abs(rel.mean) > worst) {
        worst = std::abs(rel.mean);
        where = std::string(class_name(c)) + " at " + fmt("%.1f", g.density) +
                " veh/km, penetration " + fmt("%.2f", g.penetration);
      }
    }
  }
  rep.line(9, outside == 0, "extreme-regime neutrality",
           std::to_string(outside) + "/" + std::to_string(checked) +
               " class cells with |beta| >= 0.2% of travel value; worst " +
               fmt("%.3f%%", 100 * worst) + " (" + where + ")");
}

void criterion_10(Report& rep, const SweepResult& truthful,
                  const SweepResult& high_lies, const SweepResult& low_lies) {
  bool ok = true;
  std::string detail;
  auto compare = [&](const SweepResult& lie, VehicleClass c, const char* tag) {
    for (const GridPoint& g : lie.points) {
      const std::size_t t = point_at(truthful, g.density, 1.0);
      const double b_lie =
          point_stat(lie, g.index, [c](const RunResult& r) { return beta_of(r, c); }).mean;
      const double b_true =
          point_stat(truthful, t, [c](const RunResult& r) { return beta_of(r, c); }).mean;
      const bool fine = b_lie <= b_true;
      ok = ok && fine;
      detail += std::string(tag) + fmt("@%.0f ", g.density) + fmt("%.4f", b_lie) +
                (fine ? "<=" : ">") + fmt("%.4f; ", b_true);
    }
  };
  compare(high_lies, VehicleClass::kTvHigh, "high_declares_low");
  compare(low_lies, VehicleClass::kTvLow, "low_declares_high");
  rep.line(10, ok, "untruthfulness direction", "lying vs truthful beta: " + detail);
}

void criterion_11(Report& rep, const Options& o) {
  ScenarioSpec spec = preset_spec(Preset::kShockwaveRing, SimConfig{});
  spec.jobs = o.jobs;
  if (o.quick) spec.horizon = 600;
  const auto maps = run_shockwave(spec);
  int written = 0;
  bool backward = false;
  double slope = 0.0;
  for (const ShockwaveMap& m : maps) {
    const std::string stem = std::string(m.penetration > 0 ? "tv" : "ntv") + "_" +
                             fmt("%.1f", m.density);
    written += static_cast<int>(
        write_heatmap_files(o.out / ("shockwave_" + stem), m.map, spec.base.v_max).size() > 0);
    if (m.penetration == 0.0 && std::abs(m.density - 40.0 / 3.0) < 1e-6) {
      for (const BandTrack& b : m.bands) {
        if (b.slope_cells_per_step < 0.0) {
          backward = true;
          slope = std::min(slope, b.slope_cells_per_step);
        }
      }
    }
  }
  rep.line(11, written == 4 && backward, "shock-wave study",
           std::to_string(written) + " heatmaps written; 13.3 veh/km NTV map " +
               (backward ? "has a backward band, slope " + fmt("%.3f", slope) +
                               " cells/step (" + fmt("%.1f", slope * 27.0) + " km/h)"
                         : std::string("has no backward band")));
}

void criterion_12(Report& rep, const Options& o, const SweepResult& tv,
                  double sweep_seconds, const ScenarioSpec& tv_spec) {
  // In-process replay of one grid point with a different job count.
  ScenarioSpec again = tv_spec;
  again.densities = {o.quick ? tv_spec.densities.front() : 60.0};
  again.jobs = o.jobs > 1 ? 1 : 2;
  const SweepResult r = run_sweep(again);
  const std::size_t p = point_at(tv, again.densities[0], 1.0);
  bool same = true;
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const RunResult& x = r.runs[i];
    const RunResult& y = tv.runs[p * tv_spec.n_seeds + i];
    same = same && x.seed == y.seed && x.n_games == y.n_games &&
           x.all.mean_speed_kmh == y.all.mean_speed_kmh &&
           beta_of(x, VehicleClass::kTvLow) == beta_of(y, VehicleClass::kTvLow);
  }

  // Byte-identical CLI outputs for a repeated run and a re-parallelized sweep.
  const fs::path dir = o.out / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "small.cfg";
  write_file(cfg,
             "sim.n_cells = 400\nsim.density = 50\nsim.tv_penetration = 0.5\n"
             "run.steps = 300\nrun.warmup = 50\n"
             "scenario.densities = 30, 90\nscenario.penetrations = 0.5, 1\n"
             "scenario.n_seeds = 2\nscenario.warmup = 50\nscenario.horizon = 300\n");
  const std::string c = " --config " + cfg.string() + " --out ";
  bool cli_ok = run_cli("run" + c + (dir / "run1").string()) == 0 &&
                run_cli("run" + c + (dir / "run2").string()) == 0 &&
                run_cli("sweep --jobs 1" + c + (dir / "sw1").string()) == 0 &&
                run_cli("sweep --jobs 3" + c + (dir / "sw3").string()) == 0;
  int files = 0;
  for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{
           {"run1", "run2"}, {"sw1", "sw3"}}) {
    for (const auto& e : fs::directory_iterator(dir / a)) {
      const std::string name = e.path().filename().string();
      if (name == "manifest.json") continue;  // holds wall-clock timings
      if (a == "sw1" && name == "config.txt") continue;  // records the job count
      ++files;
      cli_ok = cli_ok && read_file(e.path()) == read_file(dir / b / name);
    }
  }

  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  const bool fast = sweep_seconds < 600.0;
  rep.line(12, same && cli_ok && fast && failed_runs(tv) == 0,
           "determinism and performance",
           std::string("replay across job counts ") + (same ? "identical" : "DIFFERS") +
               "; " + std::to_string(files) + " CLI artifacts " +
               (cli_ok ? "byte-identical" : "DIFFER") + "; full sweep (" +
               std::to_string(tv.points.size()) + " densities x " +
               std::to_string(tv_spec.n_seeds) + " seeds x " +
               std::to_string(tv_spec.horizon) + " steps x " +
               std::to_string(2 * tv_spec.base.n_cells) + " cells) took " +
               fmt("%.0f", sweep_seconds) + " s with " + std::to_string(o.jobs) +
               " jobs on " + std::to_string(cores) + " core(s), limit 600 s");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--quick") {
      o.quick = true;
    } else if (a == "--out" && i + 1 < argc) {
      o.out = argv[++i];
    } else {
      std::fprintf(stderr, "usage: acceptance [--quick] [--out DIR]\n");
      return 2;
    }
  }
  o.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  fs::create_directories(o.out);
  if (o.quick) std::printf("quick mode: reduced grids, verdicts are indicative only\n");

  Report rep;
  criterion_1(rep);
  criterion_2(rep);
  criterion_3(rep);
  criterion_4(rep);

  ScenarioSpec tv_spec = preset_spec(Preset::kBenefitHeatmap, SimConfig{});
  tv_spec.penetrations = {1.0};
  tv_spec.jobs = o.jobs;
  if (o.quick) {
    tv_spec.densities = {5, 40, 60, 80, 100, 120, 1000.0 / 7.5};
    tv_spec.n_seeds = 2;
    tv_spec.horizon = 900;
    tv_spec.warmup = 300;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult tv = run_sweep(tv_spec);
  const double tv_seconds = seconds_since(t0);
  save(o.out / "sweep_tv_summary.csv", [&](std::ostream& s) { write_summary_csv(s, tv); });

  ScenarioSpec ntv_spec = tv_spec;
  ntv_spec.penetrations = {0.0};
  const SweepResult ntv = run_sweep(ntv_spec);
  save(o.out / "sweep_ntv_summary.csv", [&](std::ostream& s) { write_summary_csv(s, ntv); });

  ScenarioSpec ext_spec = tv_spec;
  ext_spec.densities = {5.0, 1000.0 / 7.5};
  ext_spec.penetrations = default_penetration_grid();
  ext_spec.n_seeds = o.quick ? 1 : 5;
  if (o.quick) ext_spec.penetrations = {0.05, 0.5, 1.0};
  const SweepResult ext = run_sweep(ext_spec);
  save(o.out / "extremes_summary.csv", [&](std::ostream& s) { write_summary_csv(s, ext); });

  auto lying = [&](Preset p) {
    ScenarioSpec s = preset_spec(p, SimConfig{});
    s.densities = {80.0, 100.0, 120.0};
    s.penetrations = {1.0};
    s.n_seeds = tv_spec.n_seeds;
    s.warmup = tv_spec.warmup;
    s.horizon = tv_spec.horizon;
    s.jobs = o.jobs;
    return run_sweep(s);
  };
  const SweepResult high_lies = lying(Preset::kUntruthfulHigh);
  const SweepResult low_lies = lying(Preset::kUntruthfulLow);
  save(o.out / "untruthful_high_summary.csv",
       [&](std::ostream& s) { write_summary_csv(s, high_lies); });
  save(o.out / "untruthful_low_summary.csv",
       [&](std::ostream& s) { write_summary_csv(s, low_lies); });

  criterion_5(rep, ntv, o);
  criterion_6(rep, {&tv, &ntv, &ext});
  criterion_7(rep, tv);
  criterion_8(rep, tv, ntv);
  criterion_9(rep, ext);
  criterion_10(rep, tv, high_lies, low_lies);
  criterion_11(rep, o);
  criterion_12(rep, o, tv, tv_seconds, tv_spec);

  std::printf("%d of 12 criteria failed\n", rep.failures());
  return rep.failures() == 0 ? 0 : 1;
}
