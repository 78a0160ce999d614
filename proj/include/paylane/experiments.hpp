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

#ifndef PAYLANE_EXPERIMENTS_HPP
#define PAYLANE_EXPERIMENTS_HPP

// Scenario presets and the sweep runner. Density-controlled runs use a ring
// with an exact vehicle count. Grid points are share-nothing jobs; results
// come back in grid order (grid-major, seed-minor) whatever the parallelism.

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "paylane/io.hpp"
#include "paylane/ledger.hpp"
#include "paylane/sim.hpp"

namespace paylane {

enum class Preset {
  kBenefitHeatmap,
  kUntruthfulHigh,
  kUntruthfulLow,
  kVip,
  kSpeedDensity,
  kShockwaveRing,
};

std::string to_string(Preset p);
std::optional<Preset> parse_preset(std::string_view name);

struct ScenarioSpec {
  SimConfig base;
  Preset mode = Preset::kBenefitHeatmap;
  std::vector<double> densities;     // veh/km per lane
  std::vector<double> penetrations;  // TV share
  std::vector<double> ratios;        // high-VOT share among TVs
  std::vector<double> vot_highs;     // dollars/h
  int n_seeds = 10;
  std::int64_t warmup = 600;    // steps excluded from every aggregate
  std::int64_t horizon = 3600;  // total steps, warm-up included
  int jobs = 1;
  int heatmap_time_bin = 10;  // steps
  int heatmap_space_bin = 4;  // cells

  void validate() const;

  bool operator==(const ScenarioSpec&) const = default;
};

/// {5, 10, ..., 130} plus the jam density of `cfg`.
std::vector<double> default_density_grid(const SimConfig& cfg);
/// {0.05, 0.10, ..., 1.00}
std::vector<double> default_penetration_grid();

/// Preset defaults on top of `base`.
ScenarioSpec preset_spec(Preset preset, const SimConfig& base);

struct GridPoint {
  std::size_t index = 0;
  double density = 0.0;
  double penetration = 1.0;
  double ratio = 0.2;
  double vot_high = 25.0;
};

std::vector<GridPoint> expand_grid(const ScenarioSpec& spec);
std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate);
SimConfig config_for(const ScenarioSpec& spec, const GridPoint& point,
                     int replicate);

struct ClassResult {
  std::size_t n_vehicles = 0;
  double mean_speed_kmh = 0.0;  // time average over the measurement window
  std::optional<BenefitSummary> benefit;
};

struct RunResult {
  GridPoint point;
  int replicate = 0;
  std::uint64_t seed = 0;
  std::array<ClassResult, kNumClasses> classes;
  ClassResult all;
  std::size_t n_games = 0;
  std::size_t n_tu_games = 0;
  double payment_balance = 0.0;
  /// Truthful TU games where a participant's benefit differs from omega / 2.
  std::size_t winwin_violations = 0;
  std::int64_t cancelled_changes = 0;
  std::vector<SpeedDensityRow> speed_density;
  std::string error;  // set when the run failed
  double wall_seconds = 0.0;

  const ClassResult& of(VehicleClass c) const { return classes[index_of(c)]; }
};

struct RunOptions {
  bool record_trajectory = false;
  bool record_heatmap = false;
  int heatmap_time_bin = 10;
  int heatmap_space_bin = 4;
};

struct RunArtifacts {
  GameLedger ledger;
  std::vector<TrajectoryRow> trajectory;
  std::optional<Heatmap> heatmap;
};

/// Runs one configured simulation for `horizon` steps, measuring after
/// `warmup`. Fills `artifacts` when given.
RunResult run_point(const SimConfig& cfg, std::int64_t warmup,
                    std::int64_t horizon, const RunOptions& options = {},
                    RunArtifacts* artifacts = nullptr);

struct SweepResult {
  std::vector<GridPoint> points;
  std::vector<RunResult> runs;  // points.size() * n_seeds, grid-major
};

SweepResult run_sweep(const ScenarioSpec& spec);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
  int n = 0;
};

/// Mean and sample standard deviation of the finite values.
MeanSd mean_sd(const std::vector<double>& values);

/// Writes benefit.csv rows: density, penetration, class, beta, income_per_h,
/// time_saved_s_per_h, seed, then high_low_ratio, vot_high, untruthful_mode.
void write_benefit_csv(std::ostream& out, const SweepResult& sweep,
                       Untruthful mode);
/// speed_density.csv rows, with trailing penetration, high_low_ratio and
/// vot_high columns.
void write_sweep_speed_density_csv(std::ostream& out, const SweepResult& sweep);
/// Seed-averaged per-point, per-class table.
void write_summary_csv(std::ostream& out, const SweepResult& sweep);

struct VipRow {
  double density = 0.0;
  double vot_high = 0.0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double speed_high_kmh = 0.0;
  double speed_low_kmh = 0.0;
  double saving_pct = 0.0;  // 100 (1 - v_low / v_high)
};

/// 1% high-VOT TVs, low VOT held at 10 $/h, high VOT swept over
/// spec.vot_highs at each of spec.densities.
std::vector<VipRow> run_vip(const ScenarioSpec& spec);
void write_vip_csv(std::ostream& out, const std::vector<VipRow>& rows);

struct BandTrack {
  int first_row = 0;
  int rows = 0;
  double slope_cells_per_step = 0.0;
};

/// Tracks connected low-speed clusters through consecutive time bins of a
/// ring heatmap and fits each track's centroid against time. Negative slope
/// means the band travels upstream.
std::vector<BandTrack> find_low_speed_bands(const Heatmap& map,
                                            double speed_threshold,
                                            int min_rows);

struct ShockwaveMap {
  double penetration = 0.0;
  double density = 0.0;  // veh/km per lane
  Heatmap map;
  std::vector<BandTrack> bands;
};

/// 100% TV and 100% NTV rings at each of spec.densities (defaults 13.3 and
/// 33.3 veh/km per lane).
std::vector<ShockwaveMap> run_shockwave(const ScenarioSpec& spec);

/// Pool-adjacent-violators fit of a nonincreasing sequence.
std::vector<double> isotonic_nonincreasing(const std::vector<double>& y,
                                           const std::vector<double>& weight);

/// Game-free baselines over spec.densities; per-class mean speed (m/s),
/// smoothed to be nonincreasing in density.
VeTable calibrate(const ScenarioSpec& spec);
void write_ve_table_csv(std::ostream& out, const VeTable& table);
VeTable parse_ve_table_csv(std::string_view text);

}  // namespace paylane

#endif  // PAYLANE_EXPERIMENTS_HPP
