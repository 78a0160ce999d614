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

#ifndef PAYLANE_SIM_HPP
#define PAYLANE_SIM_HPP

// Two-lane cellular automaton. Each step:
//
//   1. candidate speeds for every vehicle, downstream-most first
//      (accelerate, cap by half the gap in the subject and target lanes);
//   2. one slowdown draw per vehicle applied to both candidates;
//   3. lead/lag conflicts resolved by a TU game (both transacting) or by
//      Nash bargaining (otherwise), at most one game per vehicle;
//   4. lane flips and moves, downstream-most first;
//   5. open boundary only: retire vehicles past the end, inject new ones.

#include <array>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "paylane/ledger.hpp"
#include "paylane/random.hpp"
#include "paylane/vehicle.hpp"

namespace paylane {

enum class Boundary { kRing, kOpen };
enum class Untruthful { kNone, kHighDeclaresLow, kLowDeclaresHigh };
enum class VeSource { kTrailing, kTable };

std::string to_string(Boundary b);
std::string to_string(Untruthful u);
std::string to_string(VeSource s);

/// Density -> equilibrium speed lookup, per class. Densities in veh/km per
/// lane, ascending; speeds in m/s. Linear interpolation, clamped at the ends.
struct VeTable {
  std::vector<double> density;
  std::array<std::vector<double>, kNumClasses> speed_ms;

  bool empty() const { return density.empty(); }
  double lookup(VehicleClass c, double density_veh_km) const;

  bool operator==(const VeTable&) const = default;
};

struct SimConfig {
  double cell_length = 7.5;  // m
  int n_cells = 2700;
  double dt = 1.0;  // s
  int v_max = 5;    // cells/step
  int a_pos = 1;    // cells/step^2
  int a_neg = -1;   // cells/step^2
  int n_lanes = 2;
  double p_sd = 1.0 / 3.0;
  double ta = 3.0;  // s
  Boundary boundary = Boundary::kRing;
  double inflow_rate = 0.0;  // veh/step per lane, open boundary
  double tv_penetration = 1.0;
  double vot_high = 25.0;  // dollars/h
  double vot_low = 10.0;   // dollars/h
  double high_low_ratio = 0.2;
  Untruthful untruthful_mode = Untruthful::kNone;
  std::uint64_t seed = 1;
  int ve_window = 60;  // steps
  double crash_penalty = kDefaultCrashPenalty;
  bool games = true;  // false: blocked lane changes are simply abandoned
  int n_vehicles = -1;   // ring: initial count; -1 derives it from density
  double density = 0.0;  // veh/km per lane, ring
  VeSource ve_source = VeSource::kTrailing;
  VeTable ve_table;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  double jam_density() const { return 1000.0 / cell_length; }
  double length_km() const { return n_cells * cell_length / 1000.0; }
  int vehicles_for_density(double veh_km_lane) const;
  int initial_vehicles() const;
  double speed_to_ms() const { return cell_length / dt; }

  bool operator==(const SimConfig&) const = default;
};

/// Per-class equilibrium speeds in m/s.
using ClassSpeeds = std::array<double, kNumClasses>;

/// Candidate speeds for one step, cells/step. Distances are in cells; a
/// vehicle with nothing within range ahead gets kFar.
struct Plan {
  static constexpr int kFar = 1 << 20;

  int v_stay = 0;
  int v_change = 0;
  int d_s = kFar;
  int d_t = kFar;
  bool engaged = false;  // already played (or changed freely) this step
};

struct Lattice {
  static constexpr std::int32_t kEmpty = -1;

  explicit Lattice(int n_cells);

  int n_cells;
  std::vector<std::int32_t> occupancy;  // lane * n_cells + cell -> slot
  std::vector<VehicleState> vehicles;
  std::int64_t step = 0;
  std::uint32_t next_id = 0;
  std::deque<StepSpeeds> speed_window;  // trailing samples, newest last

  std::vector<Plan> plans;          // by slot, rebuilt every step
  std::vector<std::int32_t> order;  // slots, downstream-most first
  std::vector<std::int32_t> scratch;

  std::int64_t spilled = 0;            // open-boundary injections skipped
  std::int64_t cancelled_changes = 0;  // target cell taken at commit time
  std::int64_t clamped_moves = 0;      // exclusion cap bound at commit time

  std::int32_t at(int lane, int cell) const {
    return occupancy[static_cast<std::size_t>(lane) * n_cells + cell];
  }
  /// Adds a vehicle; throws std::invalid_argument if its cell is occupied.
  void place(const VehicleState& v);
  void rebuild_occupancy();
  /// Occupancy and vehicle list agree, and no cell holds two vehicles.
  bool consistent() const;
};

/// Ring road holding cfg.initial_vehicles() at random cells with exact class
/// counts; an open road starts empty.
Lattice make_lattice(const SimConfig& cfg);

/// Reassigns classes and VOTs of every vehicle on the lattice by a seeded
/// shuffle so that penetration and high/low shares are exact counts.
void assign_classes(Lattice& lat, const SimConfig& cfg,
                    const RandomStreams& rng);

/// Cells to the nearest vehicle ahead in `lane`, strictly beyond `cell`,
/// scanning at most `limit` cells; Plan::kFar if none.
int leader_distance(const Lattice& lat, const SimConfig& cfg, int lane,
                    int cell, int limit);

/// Accelerate then cap by the gaps. No randomization.
Plan candidate_speeds(const VehicleState& veh, const Lattice& lat,
                      const SimConfig& cfg);

/// Fills lat.order (downstream-most first) and lat.plans, including the
/// per-vehicle slowdown draw.
void plan_step(Lattice& lat, const SimConfig& cfg, const RandomStreams& rng);

/// Resolves lead/lag conflicts for the current plans and commits the outcome
/// into them. Returns one record per game played.
std::vector<GameRecord> pair_and_play(Lattice& lat, const ClassSpeeds& ve,
                                      const SimConfig& cfg,
                                      const RandomStreams& rng);

/// Lane flips and moves for the committed plans.
void apply_moves(Lattice& lat, const SimConfig& cfg, GameLedger& ledger);

/// One full update of the automaton.
void step(Lattice& lat, const SimConfig& cfg, const RandomStreams& rng,
          GameLedger& ledger);

ClassSpeeds equilibrium_speeds(const Lattice& lat, const SimConfig& cfg);

StepSpeeds current_speeds(const Lattice& lat);

/// Owning bundle of a configured simulation.
class Simulation {
 public:
  explicit Simulation(SimConfig cfg);

  void step();
  void run(std::int64_t steps);

  const SimConfig& config() const { return cfg_; }
  const Lattice& lattice() const { return lat_; }
  Lattice& lattice() { return lat_; }
  GameLedger& ledger() { return ledger_; }
  const GameLedger& ledger() const { return ledger_; }
  const RandomStreams& streams() const { return rng_; }

 private:
  SimConfig cfg_;
  RandomStreams rng_;
  Lattice lat_;
  GameLedger ledger_;
};

}  // namespace paylane

#endif  // PAYLANE_SIM_HPP
