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

#ifndef PAYLANE_LEDGER_HPP
#define PAYLANE_LEDGER_HPP

// Accounting of played games and trips, and the aggregates built on them:
// benefit index, speed-density tables and space-time speed heatmaps.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paylane/game.hpp"
#include "paylane/vehicle.hpp"

namespace paylane {

enum class GameKind : std::uint8_t { kTu, kNtu };

struct GameRecord {
  std::int64_t step = 0;
  std::uint32_t a_id = 0;
  std::uint32_t b_id = 0;
  VehicleClass a_class = VehicleClass::kNtv;
  VehicleClass b_class = VehicleClass::kNtv;
  GameKind kind = GameKind::kTu;
  JointAction action{};
  double sigma = 0.0;  // A pays B when positive; always 0 for NTU
  double omega = 0.0;  // TU maximal total payoff (declared VOTs)
  double td_a = 0.0;
  double td_b = 0.0;
  double dt_a = 0.0;  // realized: td_a if A changed lanes
  double dt_b = 0.0;  // realized: td_b if B kept its lane
  double cvot_a_true = 0.0;
  double cvot_a_declared = 0.0;
  double cvot_b_true = 0.0;
  double cvot_b_declared = 0.0;

  double income_a() const { return -sigma; }
  double income_b() const { return sigma; }
  /// True-VOT benefit of each participant in this game.
  double benefit_a() const { return cvot_a_true * dt_a + income_a(); }
  double benefit_b() const { return cvot_b_true * dt_b + income_b(); }
};

struct Trip {
  VehicleClass klass = VehicleClass::kNtv;
  double cvot_true = 0.0;
  double cvot_declared = 0.0;
  std::int64_t entry_step = 0;
  std::int64_t exit_step = -1;  // -1 while the trip is open
  std::int64_t distance_cells = 0;
  bool tracked = false;
};

class GameLedger {
 public:
  GameLedger() = default;

  /// Drops everything recorded so far and starts tracking `vehicles` from
  /// `step`. Games before this call are warm-up and never aggregated.
  void begin_measurement(std::int64_t step,
                         const std::vector<VehicleState>& vehicles);
  bool measuring() const { return measuring_; }

  void append(const GameRecord& r);
  void open_trip(const VehicleState& v, std::int64_t step);
  void close_trip(std::uint32_t id, std::int64_t step);
  void add_distance(std::uint32_t id, int cells);
  /// Closes all open trips at `step`.
  void finish(std::int64_t step);

  const std::vector<GameRecord>& records() const { return records_; }
  const std::vector<Trip>& trips() const { return trips_; }

  /// Sum of all signed payments (A's income plus B's income per game).
  double payment_balance() const;

 private:
  std::vector<GameRecord> records_;
  std::vector<Trip> trips_;  // indexed by vehicle id
  bool measuring_ = false;
};

struct BenefitSummary {
  double beta = 0.0;                // dollars per hour-travel
  double income_per_h = 0.0;        // dollars per hour-travel
  double time_saved_s_per_h = 0.0;  // seconds per hour-travel
  double travel_value_per_h = 0.0;  // sum of VOT x travel time, per hour-travel
  double mean_travel_time_h = 0.0;
  std::size_t n_vehicles = 0;
  std::size_t n_games = 0;

  /// beta as a fraction of the class's VOT-weighted travel value.
  double relative_beta() const {
    return travel_value_per_h > 0.0 ? beta / travel_value_per_h : 0.0;
  }
};

/// Benefit index over the tracked trips whose class passes `filter`.
/// Returns nullopt when no tracked vehicle matches.
std::optional<BenefitSummary> benefit_index(const GameLedger& ledger,
                                            ClassFilter filter, double dt);

/// Per-step class speed totals, in cells per step.
struct StepSpeeds {
  std::array<double, kNumClasses> speed_sum{};
  std::array<std::int64_t, kNumClasses> count{};

  std::int64_t total_count() const;
  double total_speed() const;
};

struct SpeedDensityRow {
  double density_veh_km = 0.0;  // per lane
  std::string klass;            // class name or "all"
  double mean_speed_kmh = 0.0;
  std::uint64_t seed = 0;
};

/// Time-averaged mean speed per class (plus "all") over the recorded steps.
/// Density is vehicles per km per lane from the per-step totals.
std::vector<SpeedDensityRow> speed_density_aggregate(
    const std::vector<StepSpeeds>& history, double road_length_km,
    int n_lanes, double cell_length, double dt, std::uint64_t seed);

/// Space-time mean-speed grid. Rows are time bins, columns are space bins,
/// both lanes pooled. Empty bins are NaN.
class Heatmap {
 public:
  Heatmap(std::int64_t n_steps, int n_cells, int time_bin, int space_bin);

  void add(std::int64_t step_in_window, int cell, double speed);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int time_bin() const { return time_bin_; }
  int space_bin() const { return space_bin_; }
  bool empty_bin(int r, int c) const;
  double at(int r, int c) const;  // NaN for an empty bin

 private:
  int rows_;
  int cols_;
  int time_bin_;
  int space_bin_;
  std::vector<double> sum_;
  std::vector<std::int64_t> count_;
};

}  // namespace paylane

#endif  // PAYLANE_LEDGER_HPP
