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

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "paylane/experiments.hpp"

namespace paylane {
namespace {

ScenarioSpec small_spec() {
  ScenarioSpec spec = preset_spec(Preset::kBenefitHeatmap, SimConfig{});
  spec.base.n_cells = 300;
  spec.densities = {20.0, 60.0, 100.0};
  spec.penetrations = {1.0};
  spec.n_seeds = 2;
  spec.warmup = 50;
  spec.horizon = 250;
  return spec;
}

bool same(double x, double y) {
  return x == y || (std::isnan(x) && std::isnan(y));
}

void check_same_run(const RunResult& x, const RunResult& y) {
  CHECK(x.seed == y.seed);
  CHECK(x.point.index == y.point.index);
  CHECK(x.n_games == y.n_games);
  CHECK(x.payment_balance == y.payment_balance);
  CHECK(same(x.all.mean_speed_kmh, y.all.mean_speed_kmh));
  for (VehicleClass c : kAllClasses) {
    CHECK(same(x.of(c).mean_speed_kmh, y.of(c).mean_speed_kmh));
    REQUIRE(x.of(c).benefit.has_value() == y.of(c).benefit.has_value());
    if (x.of(c).benefit) CHECK(x.of(c).benefit->beta == y.of(c).benefit->beta);
  }
}

TEST_CASE("default grids") {
  const SimConfig cfg;
  const auto d = default_density_grid(cfg);
  REQUIRE(d.size() == 27);
  CHECK(d.front() == 5.0);
  CHECK(d[25] == 130.0);
  CHECK(d.back() == doctest::Approx(1000.0 / 7.5));
  const auto p = default_penetration_grid();
  REQUIRE(p.size() == 20);
  CHECK(p.front() == doctest::Approx(0.05));
  CHECK(p.back() == doctest::Approx(1.0));
}

TEST_CASE("presets parse and validate") {
  for (Preset p : {Preset::kBenefitHeatmap, Preset::kUntruthfulHigh,
                   Preset::kUntruthfulLow, Preset::kVip, Preset::kSpeedDensity,
                   Preset::kShockwaveRing}) {
    CHECK(parse_preset(to_string(p)) == p);
    const ScenarioSpec spec = preset_spec(p, SimConfig{});
    CHECK(spec.mode == p);
    CHECK_NOTHROW(spec.validate());
  }
  CHECK_FALSE(parse_preset("nonsense"));
  CHECK(preset_spec(Preset::kUntruthfulHigh, {}).base.untruthful_mode ==
        Untruthful::kHighDeclaresLow);
  CHECK(preset_spec(Preset::kUntruthfulLow, {}).base.untruthful_mode ==
        Untruthful::kLowDeclaresHigh);
  const ScenarioSpec ring = preset_spec(Preset::kShockwaveRing, {});
  REQUIRE(ring.densities.size() == 2);
  CHECK(ring.densities[0] == doctest::Approx(13.33).epsilon(1e-3));
  CHECK(ring.densities[1] == doctest::Approx(33.33).epsilon(1e-3));
}

TEST_CASE("spec validation") {
  ScenarioSpec spec = small_spec();
  CHECK_NOTHROW(spec.validate());
  auto rejects = [](ScenarioSpec s) {
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  };
  ScenarioSpec s = spec;
  s.densities.clear();
  rejects(s);
  s = spec;
  s.densities = {200.0};
  rejects(s);
  s = spec;
  s.penetrations = {1.5};
  rejects(s);
  s = spec;
  s.n_seeds = 0;
  rejects(s);
  s = spec;
  s.warmup = s.horizon;
  rejects(s);
  s = spec;
  s.jobs = 0;
  rejects(s);
}

TEST_CASE("grid expansion puts density innermost") {
  ScenarioSpec spec = small_spec();
  spec.penetrations = {0.5, 1.0};
  spec.vot_highs = {20.0, 30.0};
  const auto g = expand_grid(spec);
  REQUIRE(g.size() == 12);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g[i].index == i);
    CHECK(g[i].density == spec.densities[i % 3]);
    CHECK(g[i].vot_high == spec.vot_highs[(i / 3) % 2]);
    CHECK(g[i].penetration == spec.penetrations[i / 6]);
  }
  const SimConfig cfg = config_for(spec, g[4], 3);
  CHECK(cfg.seed == spec.base.seed + 3);
  CHECK(cfg.density == 60.0);
  CHECK(cfg.vot_high == 30.0);
  CHECK(cfg.boundary == Boundary::kRing);
}

TEST_CASE("sweep order, replay and parallel independence") {
  const ScenarioSpec spec = small_spec();
  const SweepResult a = run_sweep(spec);
  REQUIRE(a.points.size() == 3);
  REQUIRE(a.runs.size() == 6);
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].error.empty());
    CHECK(a.runs[i].point.index == i / 2);
    CHECK(a.runs[i].replicate == static_cast<int>(i % 2));
    CHECK(a.runs[i].seed == spec.base.seed + i % 2);
  }

  const SweepResult b = run_sweep(spec);
  ScenarioSpec par = spec;
  par.jobs = 3;
  const SweepResult c = run_sweep(par);
  REQUIRE(b.runs.size() == 6);
  REQUIRE(c.runs.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    check_same_run(a.runs[i], b.runs[i]);
    check_same_run(a.runs[i], c.runs[i]);
  }

  std::ostringstream x, y;
  write_benefit_csv(x, a, Untruthful::kNone);
  write_benefit_csv(y, c, Untruthful::kNone);
  CHECK(x.str() == y.str());
  std::istringstream lines(x.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line ==
        "density,penetration,class,beta,income_per_h,time_saved_s_per_h,seed,"
        "high_low_ratio,vot_high,untruthful_mode");
  int n = 0;
  while (std::getline(lines, line)) ++n;
  CHECK(n == 6 * 3);
}

TEST_CASE("run invariants") {
  ScenarioSpec spec = small_spec();
  for (const GridPoint& p : expand_grid(spec)) {
    const RunResult r = run_point(config_for(spec, p, 0), 50, 250);
    CHECK(r.error.empty());
    CHECK(r.winwin_violations == 0);
    CHECK(r.n_tu_games == r.n_games);
    CHECK(std::abs(r.payment_balance) < 1e-12);
    CHECK(r.all.n_vehicles ==
          static_cast<std::size_t>(spec.base.vehicles_for_density(p.density)));
    REQUIRE(!r.speed_density.empty());
    CHECK(r.speed_density[0].density_veh_km ==
          doctest::Approx(p.density).epsilon(0.02));
  }
}

TEST_CASE("without transacting vehicles there are no payments") {
  ScenarioSpec spec = small_spec();
  spec.penetrations = {0.0};
  for (const GridPoint& p : expand_grid(spec)) {
    const RunResult r = run_point(config_for(spec, p, 0), 50, 250);
    CHECK(r.n_tu_games == 0);
    CHECK(r.payment_balance == 0.0);
    CHECK(r.of(VehicleClass::kTvHigh).n_vehicles == 0);
    CHECK_FALSE(r.of(VehicleClass::kTvHigh).benefit);
    REQUIRE(r.of(VehicleClass::kNtv).benefit);
    CHECK(r.of(VehicleClass::kNtv).benefit->income_per_h == 0.0);
  }
}

TEST_CASE("run artifacts") {
  SimConfig cfg;
  cfg.n_cells = 200;
  cfg.n_vehicles = 10;
  RunOptions opt;
  opt.record_trajectory = true;
  opt.record_heatmap = true;
  RunArtifacts art;
  run_point(cfg, 20, 100, opt, &art);
  CHECK(art.trajectory.size() == 1000);
  CHECK(art.trajectory.front().step == 1);
  CHECK(art.trajectory.back().step == 100);
  REQUIRE(art.heatmap);
  CHECK(art.heatmap->rows() == 8);
  CHECK(art.heatmap->cols() == 50);
}

TEST_CASE("mean and standard deviation skip non-finite values") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const MeanSd m = mean_sd({1.0, 2.0, 3.0, nan});
  CHECK(m.n == 3);
  CHECK(m.mean == doctest::Approx(2.0));
  CHECK(m.sd == doctest::Approx(1.0));
  CHECK(mean_sd({5.0}).sd == 0.0);
  CHECK(std::isnan(mean_sd({nan}).mean));
}

// Weighted least squares over nonincreasing sequences, by brute force over
// a fine level grid for tiny inputs.
double isotonic_sse(const std::vector<double>& f, const std::vector<double>& y,
                    const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += w[i] * (f[i] - y[i]) * (f[i] - y[i]);
  return s;
}

TEST_CASE("isotonic fit") {
  CHECK(isotonic_nonincreasing({1, 3, 2, 0}, {1, 1, 1, 1}) ==
        std::vector<double>{2, 2, 2, 0});
  CHECK(isotonic_nonincreasing({5, 4, 4, 1}, {1, 1, 1, 1}) ==
        std::vector<double>{5, 4, 4, 1});
  const auto w = isotonic_nonincreasing({1, 4}, {3, 1});
  CHECK(w[0] == doctest::Approx(1.75));
  CHECK(w[1] == doctest::Approx(1.75));
  CHECK_THROWS_AS(isotonic_nonincreasing({1, 2}, {1}), std::invalid_argument);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> y(4), wt(4);
    for (int i = 0; i < 4; ++i) {
      y[i] = u(rng);
      wt[i] = 0.5 + u(rng);
    }
    const auto fit = isotonic_nonincreasing(y, wt);
    for (int i = 1; i < 4; ++i) REQUIRE(fit[i] <= fit[i - 1] + 1e-12);
    const double best = isotonic_sse(fit, y, wt);
    // No nonincreasing sequence on a 0.02 lattice does better.
    constexpr int kLevels = 51;
    for (int a = 0; a < kLevels; ++a) {
      for (int b = 0; b <= a; ++b) {
        for (int c = 0; c <= b; ++c) {
          for (int d = 0; d <= c; ++d) {
            const std::vector<double> f = {a / 50.0, b / 50.0, c / 50.0, d / 50.0};
            REQUIRE(isotonic_sse(f, y, wt) >= best - 1e-12);
          }
        }
      }
    }
  }
}

Heatmap moving_band(int cols_per_row, int rows, int cols) {
  Heatmap h(static_cast<std::int64_t>(rows) * 10, cols * 4, 10, 4);
  for (int r = 0; r < rows; ++r) {
    const int centre = ((40 + cols_per_row * r) % cols + cols) % cols;
    for (int c = 0; c < cols; ++c) {
      const int off = ((c - centre) % cols + cols) % cols;
      const bool in_band = off <= 1 || off >= cols - 1;
      h.add(r * 10, c * 4, in_band ? 0.0 : 5.0);
    }
  }
  return h;
}

TEST_CASE("band tracking recovers the drift direction") {
  auto bands = find_low_speed_bands(moving_band(-1, 30, 60), 1.5, 10);
  REQUIRE(bands.size() == 1);
  CHECK(bands[0].rows == 30);
  CHECK(bands[0].slope_cells_per_step == doctest::Approx(-0.4));

  bands = find_low_speed_bands(moving_band(2, 30, 60), 1.5, 10);
  REQUIRE(bands.size() == 1);
  CHECK(bands[0].slope_cells_per_step == doctest::Approx(0.8));

  // Too short to count.
  CHECK(find_low_speed_bands(moving_band(-1, 5, 60), 1.5, 10).empty());

  // Free flow everywhere.
  Heatmap free(100, 100, 10, 4);
  for (int t = 0; t < 100; t += 10) {
    for (int c = 0; c < 100; c += 4) free.add(t, c, 5.0);
  }
  CHECK(find_low_speed_bands(free, 1.5, 2).empty());
}

TEST_CASE("equilibrium table round trip") {
  VeTable t;
  t.density = {5.0, 50.0, 133.0};
  t.speed_ms[0] = {37.5, 20.0, 0.1};
  t.speed_ms[1] = {37.0, 19.5, 0.1};
  t.speed_ms[2] = {36.5, 19.0, 0.1};
  std::ostringstream out;
  write_ve_table_csv(out, t);
  CHECK(out.str().rfind("density_veh_km,tv_high_ms,tv_low_ms,ntv_ms\n", 0) == 0);
  const VeTable back = parse_ve_table_csv(out.str());
  CHECK(back == t);
  CHECK(back.lookup(VehicleClass::kTvHigh, 27.5) == doctest::Approx(28.75));
  CHECK(back.lookup(VehicleClass::kNtv, 1.0) == doctest::Approx(36.5));
  CHECK(back.lookup(VehicleClass::kNtv, 500.0) == doctest::Approx(0.1));

  CHECK_THROWS_AS(parse_ve_table_csv("h\n1,2,3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_ve_table_csv("h\n2,1,1,1\n1,1,1,1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_ve_table_csv("h\n1,x,1,1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_ve_table_csv("h\n"), std::invalid_argument);
}

TEST_CASE("calibration is nonincreasing and anchored") {
  ScenarioSpec spec = preset_spec(Preset::kSpeedDensity, SimConfig{});
  spec.base.n_cells = 300;
  spec.densities = {10.0, 60.0, 1000.0 / 7.5};
  spec.n_seeds = 1;
  spec.warmup = 50;
  spec.horizon = 200;
  const VeTable t = calibrate(spec);
  REQUIRE(t.density.size() == 3);
  for (const auto& s : t.speed_ms) {
    CHECK(s[0] >= s[1]);
    CHECK(s[1] >= s[2]);
    CHECK(s[0] <= 37.5);
    CHECK(s[2] == 0.0);  // jammed
  }
}

}  // namespace
}  // namespace paylane
