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

#include "paylane/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "paylane/game.hpp"

namespace paylane {

std::string to_string(Boundary b) {
  return b == Boundary::kRing ? "ring" : "open";
}

std::string to_string(Untruthful u) {
  switch (u) {
    case Untruthful::kNone:
      return "none";
    case Untruthful::kHighDeclaresLow:
      return "high_declares_low";
    case Untruthful::kLowDeclaresHigh:
      return "low_declares_high";
  }
  return "none";
}

std::string to_string(VeSource s) {
  return s == VeSource::kTrailing ? "trailing" : "table";
}

double VeTable::lookup(VehicleClass c, double d) const {
  const std::vector<double>& speed = speed_ms[index_of(c)];
  if (density.empty() || speed.size() != density.size()) {
    throw std::logic_error("equilibrium-speed table is empty or ragged");
  }
  if (d <= density.front()) return speed.front();
  if (d >= density.back()) return speed.back();
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(density.begin(), density.end(), d) - density.begin());
  const std::size_t lo = hi - 1;
  const double w = (d - density[lo]) / (density[hi] - density[lo]);
  return speed[lo] + w * (speed[hi] - speed[lo]);
}

void SimConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("sim." + what);
  };
  if (!(cell_length > 0.0)) fail("cell_length must be > 0");
  if (n_cells < 1) fail("n_cells must be >= 1");
  if (!(dt > 0.0)) fail("dt must be > 0");
  if (v_max < 1) fail("v_max must be >= 1");
  if (a_pos < 1) fail("a_pos must be >= 1");
  if (a_neg > -1) fail("a_neg must be <= -1");
  if (n_lanes != 2) fail("n_lanes must be 2");
  if (!(p_sd >= 0.0 && p_sd <= 1.0)) fail("p_sd must lie in [0, 1]");
  if (!(ta > 0.0)) fail("ta must be > 0");
  if (!(inflow_rate >= 0.0 && inflow_rate <= 1.0)) {
    fail("inflow_rate must lie in [0, 1]");
  }
  if (!(tv_penetration >= 0.0 && tv_penetration <= 1.0)) {
    fail("tv_penetration must lie in [0, 1]");
  }
  if (!(high_low_ratio >= 0.0 && high_low_ratio <= 1.0)) {
    fail("high_low_ratio must lie in [0, 1]");
  }
  if (!(vot_high >= 0.0) || !(vot_low >= 0.0)) fail("vot_* must be >= 0");
  if (ve_window < 1) fail("ve_window must be >= 1");
  if (!(crash_penalty > 0.0)) fail("crash_penalty must be > 0");
  if (!(density >= 0.0)) fail("density must be >= 0");
  if (boundary == Boundary::kRing && initial_vehicles() > n_lanes * n_cells) {
    fail("density exceeds one vehicle per cell");
  }
  if (ve_source == VeSource::kTable && ve_table.empty()) {
    fail("ve_table required when ve_source = table");
  }
}

int SimConfig::vehicles_for_density(double veh_km_lane) const {
  return static_cast<int>(std::lround(veh_km_lane * length_km() * n_lanes));
}

int SimConfig::initial_vehicles() const {
  if (boundary == Boundary::kOpen) return 0;
  return n_vehicles >= 0 ? n_vehicles : vehicles_for_density(density);
}

Lattice::Lattice(int cells)
    : n_cells(cells),
      occupancy(static_cast<std::size_t>(2) * cells, kEmpty) {}

void Lattice::place(const VehicleState& v) {
  if (v.lane < 0 || v.lane > 1 || v.cell < 0 || v.cell >= n_cells) {
    throw std::invalid_argument("vehicle outside the lattice");
  }
  std::int32_t& slot = occupancy[static_cast<std::size_t>(v.lane) * n_cells + v.cell];
  if (slot != kEmpty) throw std::invalid_argument("cell already occupied");
  slot = static_cast<std::int32_t>(vehicles.size());
  vehicles.push_back(v);
  next_id = std::max(next_id, v.id + 1);
}

void Lattice::rebuild_occupancy() {
  std::fill(occupancy.begin(), occupancy.end(), kEmpty);
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const VehicleState& v = vehicles[i];
    occupancy[static_cast<std::size_t>(v.lane) * n_cells + v.cell] =
        static_cast<std::int32_t>(i);
  }
}

bool Lattice::consistent() const {
  std::size_t occupied = 0;
  for (std::size_t k = 0; k < occupancy.size(); ++k) {
    const std::int32_t slot = occupancy[k];
    if (slot == kEmpty) continue;
    ++occupied;
    if (slot < 0 || static_cast<std::size_t>(slot) >= vehicles.size()) {
      return false;
    }
    const VehicleState& v = vehicles[slot];
    if (static_cast<std::size_t>(v.lane) * n_cells + v.cell != k) return false;
  }
  return occupied == vehicles.size();
}

namespace {

std::uint64_t uniform_index(CounterRng& rng, std::uint64_t bound) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(rng()) * bound) >> 64);
}

int wrap(int cell, int n) {
  cell %= n;
  return cell < 0 ? cell + n : cell;
}

}  // namespace

void assign_classes(Lattice& lat, const SimConfig& cfg,
                    const RandomStreams& rng) {
  const std::size_t n = lat.vehicles.size();
  const auto n_tv = static_cast<std::size_t>(
      std::lround(cfg.tv_penetration * static_cast<double>(n)));
  const auto n_high = static_cast<std::size_t>(
      std::lround(cfg.high_low_ratio * static_cast<double>(n_tv)));

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  CounterRng shuffle = rng.stream(0, 0, Draw::kClasses);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[uniform_index(shuffle, i)]);
  }

  const double high = cfg.vot_high / 3600.0;
  const double low = cfg.vot_low / 3600.0;
  for (std::size_t rank = 0; rank < n; ++rank) {
    VehicleState& v = lat.vehicles[perm[rank]];
    if (rank < n_high) {
      v.klass = VehicleClass::kTvHigh;
      v.cvot_true = high;
      v.cvot_declared =
          cfg.untruthful_mode == Untruthful::kHighDeclaresLow ? low : high;
    } else if (rank < n_tv) {
      v.klass = VehicleClass::kTvLow;
      v.cvot_true = low;
      v.cvot_declared =
          cfg.untruthful_mode == Untruthful::kLowDeclaresHigh ? high : low;
    } else {
      v.klass = VehicleClass::kNtv;
      v.cvot_true = low;
      v.cvot_declared = low;
    }
  }
}

Lattice make_lattice(const SimConfig& cfg) {
  cfg.validate();
  Lattice lat(cfg.n_cells);
  const int n = cfg.initial_vehicles();
  if (n == 0) return lat;

  // Partial Fisher-Yates over all (lane, cell) sites.
  const std::size_t sites = static_cast<std::size_t>(2) * cfg.n_cells;
  std::vector<std::uint32_t> site(sites);
  std::iota(site.begin(), site.end(), 0u);
  const RandomStreams rng(cfg.seed);
  CounterRng draw = rng.stream(0, 0, Draw::kPlacement);
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    std::swap(site[i], site[i + uniform_index(draw, sites - i)]);
  }
  std::vector<std::uint32_t> chosen(site.begin(), site.begin() + n);
  // Ids follow road order (cell, then lane).
  std::sort(chosen.begin(), chosen.end(), [&](std::uint32_t x, std::uint32_t y) {
    const auto cx = x % cfg.n_cells, cy = y % cfg.n_cells;
    return cx != cy ? cx < cy : x < y;
  });
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    VehicleState v;
    v.id = static_cast<std::uint32_t>(i);
    v.lane = static_cast<int>(chosen[i] / cfg.n_cells);
    v.cell = static_cast<int>(chosen[i] % cfg.n_cells);
    v.v = 0;
    lat.place(v);
  }
  assign_classes(lat, cfg, rng);
  return lat;
}

int leader_distance(const Lattice& lat, const SimConfig& cfg, int lane,
                    int cell, int limit) {
  const bool ring = cfg.boundary == Boundary::kRing;
  for (int i = 1; i <= limit; ++i) {
    int c = cell + i;
    if (c >= lat.n_cells) {
      if (!ring) return Plan::kFar;
      c -= lat.n_cells;
      if (c >= lat.n_cells) c = wrap(c, lat.n_cells);
    }
    if (lat.at(lane, c) != Lattice::kEmpty) return i;
  }
  return Plan::kFar;
}

namespace {

// Scan range beyond which a leader cannot bind: d / 2 >= v_max.
int gap_horizon(const SimConfig& cfg) { return 2 * cfg.v_max; }

int half_gap(int d) { return d >= Plan::kFar ? Plan::kFar : d / 2; }

}  // namespace

Plan candidate_speeds(const VehicleState& veh, const Lattice& lat,
                      const SimConfig& cfg) {
  Plan p;
  const int v = std::min(veh.v + cfg.a_pos, cfg.v_max);
  const int target = 1 - veh.lane;
  p.d_s = leader_distance(lat, cfg, veh.lane, veh.cell, gap_horizon(cfg));
  p.d_t = lat.at(target, veh.cell) != Lattice::kEmpty
              ? 0
              : leader_distance(lat, cfg, target, veh.cell, gap_horizon(cfg));
  // ceil((d - 1) / 2) == d / 2 for integer d >= 0
  p.v_stay = std::min(v, half_gap(p.d_s));
  p.v_change = std::min({v, p.v_stay + 1, half_gap(p.d_t)});
  return p;
}

namespace {

// Downstream-most first. On a ring the sweep starts just upstream of the
// longest run of columns empty in both lanes, so that vehicles committed early
// do not wrap into vehicles not yet committed.
void downstream_order(Lattice& lat, const SimConfig& cfg) {
  const int n = lat.n_cells;
  lat.order.clear();
  lat.order.reserve(lat.vehicles.size());
  int start = n - 1;
  if (cfg.boundary == Boundary::kRing && !lat.vehicles.empty()) {
    auto column_empty = [&](int c) {
      return lat.at(0, c) == Lattice::kEmpty && lat.at(1, c) == Lattice::kEmpty;
    };
    int first_full = -1;
    for (int c = 0; c < n; ++c) {
      if (!column_empty(c)) {
        first_full = c;
        break;
      }
    }
    // Walk once around starting at an occupied column so runs never straddle
    // the origin.
    int best_len = 0;
    int best_begin = first_full;
    int run_len = 0;
    int run_begin = 0;
    for (int k = 1; k <= n; ++k) {
      const int c = (first_full + k) % n;
      if (column_empty(c)) {
        if (run_len == 0) run_begin = c;
        ++run_len;
      } else {
        if (run_len > best_len) {
          best_len = run_len;
          best_begin = run_begin;
        }
        run_len = 0;
      }
    }
    start = best_len > 0 ? wrap(best_begin - 1, n) : n - 1;
  }
  for (int k = 0; k < n; ++k) {
    const int c = wrap(start - k, n);
    for (int lane = 0; lane < 2; ++lane) {
      const std::int32_t slot = lat.at(lane, c);
      if (slot != Lattice::kEmpty) lat.order.push_back(slot);
    }
  }
}

}  // namespace

void plan_step(Lattice& lat, const SimConfig& cfg, const RandomStreams& rng) {
  downstream_order(lat, cfg);
  lat.plans.assign(lat.vehicles.size(), Plan{});
  for (const std::int32_t slot : lat.order) {
    const VehicleState& veh = lat.vehicles[slot];
    Plan p = candidate_speeds(veh, lat, cfg);
    if (cfg.p_sd > 0.0 &&
        rng.uniform(veh.id, static_cast<std::uint64_t>(lat.step),
                    Draw::kSlowdown) < cfg.p_sd) {
      p.v_stay = std::max(0, p.v_stay - 1);
      p.v_change = std::max(0, p.v_change - 1);
    }
    lat.plans[slot] = p;
  }
}

namespace {

// Nearest vehicle behind `cell` in `lane` within `limit` cells.
struct Lag {
  std::int32_t slot = Lattice::kEmpty;
  int distance = 0;
};

Lag find_lag(const Lattice& lat, const SimConfig& cfg, int lane, int cell,
             int limit) {
  const bool ring = cfg.boundary == Boundary::kRing;
  for (int i = 1; i <= limit; ++i) {
    int c = cell - i;
    if (c < 0) {
      if (!ring) break;
      c = wrap(c, lat.n_cells);
    }
    const std::int32_t slot = lat.at(lane, c);
    if (slot != Lattice::kEmpty) return Lag{slot, i};
  }
  return Lag{};
}

SpeedScenario scenario_for(int v1_cells, int v2_cells, int v0_cells, double ve,
                           const SimConfig& cfg) {
  const double to_ms = cfg.speed_to_ms();
  const double accel_scale = cfg.cell_length / (cfg.dt * cfg.dt);
  const double up = cfg.a_pos * accel_scale;
  const double down = cfg.a_neg * accel_scale;
  SpeedScenario s;
  s.v0 = v0_cells * to_ms;
  s.v1 = v1_cells * to_ms;
  s.v2 = v2_cells * to_ms;
  s.ve = ve;
  s.ta = cfg.ta;
  s.a1 = s.v1 >= ve ? down : up;
  s.a2 = s.v2 <= ve ? up : down;
  return s;
}

}  // namespace

std::vector<GameRecord> pair_and_play(Lattice& lat, const ClassSpeeds& ve,
                                      const SimConfig& cfg,
                                      const RandomStreams& rng) {
  std::vector<GameRecord> records;
  const auto step_key = static_cast<std::uint64_t>(lat.step);
  for (const std::int32_t slot_a : lat.order) {
    Plan& pa = lat.plans[slot_a];
    if (pa.engaged || pa.v_change <= pa.v_stay) continue;
    const VehicleState& a = lat.vehicles[slot_a];
    const int target = 1 - a.lane;
    if (lat.at(target, a.cell) != Lattice::kEmpty) {
      pa.v_change = 0;
      continue;
    }

    const Lag lag = find_lag(lat, cfg, target, a.cell, gap_horizon(cfg));
    if (lag.slot == Lattice::kEmpty) {
      pa.engaged = true;
      continue;
    }
    Plan& pb = lat.plans[lag.slot];
    const int give_way_cap = half_gap(lag.distance);
    if (pb.v_stay <= give_way_cap) {
      pa.engaged = true;  // gap already free
      continue;
    }
    if (pb.engaged || !cfg.games) {
      pa.v_change = 0;
      continue;
    }

    const VehicleState& b = lat.vehicles[lag.slot];
    const int b_yield = std::min(pb.v_stay, give_way_cap);
    const SpeedScenario sa =
        scenario_for(pa.v_change, pa.v_stay, a.v, ve[index_of(a.klass)], cfg);
    const SpeedScenario sb =
        scenario_for(pb.v_stay, b_yield, b.v, ve[index_of(b.klass)], cfg);

    GameRecord r;
    r.step = lat.step;
    r.a_id = a.id;
    r.b_id = b.id;
    r.a_class = a.klass;
    r.b_class = b.klass;
    r.td_a = time_difference(sa);
    r.td_b = time_difference(sb);
    r.cvot_a_true = a.cvot_true;
    r.cvot_a_declared = a.cvot_declared;
    r.cvot_b_true = b.cvot_true;
    r.cvot_b_declared = b.cvot_declared;
    const BimatrixGame game = build_utility_matrix(
        a.cvot_declared, r.td_a, b.cvot_declared, r.td_b, cfg.crash_penalty);

    if (is_transacting(a.klass) && is_transacting(b.klass)) {
      const TuOutcome tu = solve_tu(game);
      r.kind = GameKind::kTu;
      r.action = tu.action;
      r.sigma = tu.sigma;
      r.omega = tu.omega_star;
    } else {
      CounterRng coin = rng.stream(a.id, step_key, Draw::kCoin);
      const NtuOutcome ntu = solve_ntu(game, coin);
      r.kind = GameKind::kNtu;
      r.action = ntu.realized_action;
      r.sigma = 0.0;
      r.omega = 0.0;
    }
    r.dt_a = r.action.row == kChangeLanes ? r.td_a : 0.0;
    r.dt_b = r.action.col == kHold ? r.td_b : 0.0;

    if (r.action.row != kChangeLanes) pa.v_change = 0;
    if (r.action.col == kGiveWay) pb.v_stay = b_yield;
    pb.v_change = 0;  // the lag vehicle keeps its lane this step
    pa.engaged = true;
    pb.engaged = true;
    records.push_back(r);
  }
  return records;
}

void apply_moves(Lattice& lat, const SimConfig& cfg, GameLedger& ledger) {
  const int n = lat.n_cells;
  const bool ring = cfg.boundary == Boundary::kRing;
  lat.scratch = lat.occupancy;
  std::vector<std::int32_t>& grid = lat.scratch;
  auto cell_ref = [&](int lane, int cell) -> std::int32_t& {
    return grid[static_cast<std::size_t>(lane) * n + cell];
  };

  bool retired_any = false;
  for (const std::int32_t slot : lat.order) {
    VehicleState& veh = lat.vehicles[slot];
    const Plan& p = lat.plans[slot];
    cell_ref(veh.lane, veh.cell) = Lattice::kEmpty;

    int lane = veh.lane;
    int v = std::max(p.v_change, p.v_stay);
    if (p.v_change > p.v_stay) {
      const int target = 1 - lane;
      if (cell_ref(target, veh.cell) == Lattice::kEmpty) {
        lane = target;
      } else {
        ++lat.cancelled_changes;
        v = p.v_stay;
      }
    }

    for (int i = 1; i <= v; ++i) {
      int c = veh.cell + i;
      if (c >= n) {
        if (!ring) break;
        c -= n;
      }
      if (cell_ref(lane, c) != Lattice::kEmpty) {
        v = i - 1;
        ++lat.clamped_moves;
        break;
      }
    }

    veh.lane = lane;
    veh.v = v;
    ledger.add_distance(veh.id, v);
    int next = veh.cell + v;
    if (next >= n) {
      if (!ring) {
        veh.cell = n;  // marks retirement
        retired_any = true;
        continue;
      }
      next -= n;
    }
    veh.cell = next;
    cell_ref(lane, next) = slot;
  }

  if (retired_any) {
    std::erase_if(lat.vehicles, [&](const VehicleState& v) {
      if (v.cell < n) return false;
      ledger.close_trip(v.id, lat.step + 1);
      return true;
    });
    lat.rebuild_occupancy();
  } else {
    lat.occupancy.swap(lat.scratch);
  }
}

namespace {

void inject(Lattice& lat, const SimConfig& cfg, const RandomStreams& rng,
            GameLedger& ledger) {
  if (cfg.inflow_rate <= 0.0) return;
  const auto step_key = static_cast<std::uint64_t>(lat.step);
  for (int lane = 0; lane < 2; ++lane) {
    if (rng.uniform(static_cast<std::uint64_t>(lane), step_key,
                    Draw::kInflow) >= cfg.inflow_rate) {
      continue;
    }
    if (lat.at(lane, 0) != Lattice::kEmpty) {
      ++lat.spilled;
      continue;
    }
    VehicleState v;
    v.id = lat.next_id;
    v.lane = lane;
    v.cell = 0;
    v.v = cfg.v_max;
    v.entry_step = lat.step;
    const double u_tv = rng.uniform(v.id, 0, Draw::kClasses);
    const double u_high = rng.uniform(v.id, 1, Draw::kClasses);
    const double high = cfg.vot_high / 3600.0;
    const double low = cfg.vot_low / 3600.0;
    if (u_tv < cfg.tv_penetration && u_high < cfg.high_low_ratio) {
      v.klass = VehicleClass::kTvHigh;
      v.cvot_true = high;
      v.cvot_declared =
          cfg.untruthful_mode == Untruthful::kHighDeclaresLow ? low : high;
    } else if (u_tv < cfg.tv_penetration) {
      v.klass = VehicleClass::kTvLow;
      v.cvot_true = low;
      v.cvot_declared =
          cfg.untruthful_mode == Untruthful::kLowDeclaresHigh ? high : low;
    } else {
      v.klass = VehicleClass::kNtv;
      v.cvot_true = low;
      v.cvot_declared = low;
    }
    lat.place(v);
    ledger.open_trip(v, lat.step);
  }
}

}  // namespace

StepSpeeds current_speeds(const Lattice& lat) {
  StepSpeeds s;
  for (const VehicleState& v : lat.vehicles) {
    s.speed_sum[index_of(v.klass)] += v.v;
    ++s.count[index_of(v.klass)];
  }
  return s;
}

ClassSpeeds equilibrium_speeds(const Lattice& lat, const SimConfig& cfg) {
  constexpr double kFloor = 0.1;
  constexpr std::int64_t kSparse = 5;
  ClassSpeeds out{};
  const double to_ms = cfg.speed_to_ms();

  if (cfg.ve_source == VeSource::kTable) {
    const double density =
        static_cast<double>(lat.vehicles.size()) / (cfg.length_km() * cfg.n_lanes);
    for (VehicleClass c : kAllClasses) {
      out[index_of(c)] = std::max(kFloor, cfg.ve_table.lookup(c, density));
    }
    return out;
  }

  std::deque<StepSpeeds> now;
  const std::deque<StepSpeeds>* window = &lat.speed_window;
  if (window->empty()) {
    now.push_back(current_speeds(lat));
    window = &now;
  }
  std::array<double, kNumClasses> class_sum{};
  std::array<std::int64_t, kNumClasses> class_steps{};
  double all_sum = 0.0;
  std::int64_t all_steps = 0;
  for (const StepSpeeds& s : *window) {
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      if (s.count[k] > 0) {
        class_sum[k] += s.speed_sum[k] / static_cast<double>(s.count[k]);
        ++class_steps[k];
      }
    }
    if (s.total_count() > 0) {
      all_sum += s.total_speed() / static_cast<double>(s.total_count());
      ++all_steps;
    }
  }
  const double all_mean =
      all_steps > 0 ? all_sum / static_cast<double>(all_steps) : cfg.v_max;
  const StepSpeeds& latest = window->back();
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const double mean = latest.count[k] >= kSparse && class_steps[k] > 0
                            ? class_sum[k] / static_cast<double>(class_steps[k])
                            : all_mean;
    out[k] = std::max(kFloor, mean * to_ms);
  }
  return out;
}

void step(Lattice& lat, const SimConfig& cfg, const RandomStreams& rng,
          GameLedger& ledger) {
  const ClassSpeeds ve = equilibrium_speeds(lat, cfg);
  plan_step(lat, cfg, rng);
  for (const GameRecord& r : pair_and_play(lat, ve, cfg, rng)) {
    ledger.append(r);
  }
  apply_moves(lat, cfg, ledger);
  if (cfg.boundary == Boundary::kOpen) inject(lat, cfg, rng, ledger);
  ++lat.step;

  lat.speed_window.push_back(current_speeds(lat));
  while (lat.speed_window.size() > static_cast<std::size_t>(cfg.ve_window)) {
    lat.speed_window.pop_front();
  }
}

Simulation::Simulation(SimConfig cfg)
    : cfg_(std::move(cfg)), rng_(cfg_.seed), lat_(make_lattice(cfg_)) {}

void Simulation::step() { paylane::step(lat_, cfg_, rng_, ledger_); }

void Simulation::run(std::int64_t steps) {
  for (std::int64_t i = 0; i < steps; ++i) step();
}

}  // namespace paylane
