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

#include "paylane/ledger.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace paylane {

std::optional<VehicleClass> parse_class(std::string_view name) {
  for (VehicleClass c : kAllClasses) {
    if (class_name(c) == name) return c;
  }
  return std::nullopt;
}

void GameLedger::begin_measurement(std::int64_t step,
                                   const std::vector<VehicleState>& vehicles) {
  records_.clear();
  trips_.clear();
  measuring_ = true;
  for (const VehicleState& v : vehicles) open_trip(v, step);
}

void GameLedger::append(const GameRecord& r) {
  if (measuring_) records_.push_back(r);
}

void GameLedger::open_trip(const VehicleState& v, std::int64_t step) {
  if (!measuring_) return;
  if (trips_.size() <= v.id) trips_.resize(v.id + 1);
  Trip& t = trips_[v.id];
  t.klass = v.klass;
  t.cvot_true = v.cvot_true;
  t.cvot_declared = v.cvot_declared;
  t.entry_step = step;
  t.exit_step = -1;
  t.distance_cells = 0;
  t.tracked = true;
}

void GameLedger::close_trip(std::uint32_t id, std::int64_t step) {
  if (id < trips_.size() && trips_[id].tracked && trips_[id].exit_step < 0) {
    trips_[id].exit_step = step;
  }
}

void GameLedger::add_distance(std::uint32_t id, int cells) {
  if (id < trips_.size()) trips_[id].distance_cells += cells;
}

void GameLedger::finish(std::int64_t step) {
  for (Trip& t : trips_) {
    if (t.tracked && t.exit_step < 0) t.exit_step = step;
  }
}

double GameLedger::payment_balance() const {
  double balance = 0.0;
  for (const GameRecord& r : records_) balance += r.income_a() + r.income_b();
  return balance;
}

std::optional<BenefitSummary> benefit_index(const GameLedger& ledger,
                                            ClassFilter filter, double dt) {
  BenefitSummary out;
  double travel_time_s = 0.0;
  double travel_value = 0.0;  // dollars
  for (const Trip& t : ledger.trips()) {
    if (!t.tracked || !filter.contains(t.klass)) continue;
    if (t.exit_step < 0) {
      throw std::logic_error("benefit_index needs closed trips; call finish()");
    }
    const double seconds = static_cast<double>(t.exit_step - t.entry_step) * dt;
    travel_time_s += seconds;
    travel_value += t.cvot_true * seconds;
    ++out.n_vehicles;
  }
  if (out.n_vehicles == 0) return std::nullopt;

  double benefit = 0.0;
  double income = 0.0;
  double saved_s = 0.0;
  for (const GameRecord& r : ledger.records()) {
    bool counted = false;
    if (filter.contains(r.a_class)) {
      benefit += r.benefit_a();
      income += r.income_a();
      saved_s += r.dt_a;
      counted = true;
    }
    if (filter.contains(r.b_class)) {
      benefit += r.benefit_b();
      income += r.income_b();
      saved_s += r.dt_b;
      counted = true;
    }
    if (counted) ++out.n_games;
  }

  out.mean_travel_time_h =
      travel_time_s / static_cast<double>(out.n_vehicles) / 3600.0;
  if (out.mean_travel_time_h <= 0.0) return std::nullopt;
  out.beta = benefit / out.mean_travel_time_h;
  out.income_per_h = income / out.mean_travel_time_h;
  out.time_saved_s_per_h = saved_s / out.mean_travel_time_h;
  out.travel_value_per_h = travel_value / out.mean_travel_time_h;
  return out;
}

std::int64_t StepSpeeds::total_count() const {
  std::int64_t n = 0;
  for (std::int64_t c : count) n += c;
  return n;
}

double StepSpeeds::total_speed() const {
  double s = 0.0;
  for (double x : speed_sum) s += x;
  return s;
}

std::vector<SpeedDensityRow> speed_density_aggregate(
    const std::vector<StepSpeeds>& history, double road_length_km,
    int n_lanes, double cell_length, double dt, std::uint64_t seed) {
  std::vector<SpeedDensityRow> rows;
  if (history.empty() || road_length_km <= 0.0) return rows;

  const double to_kmh = cell_length / dt * 3.6;
  double vehicles = 0.0;
  std::array<double, kNumClasses + 1> mean_sum{};
  std::array<std::int64_t, kNumClasses + 1> steps_present{};
  for (const StepSpeeds& s : history) {
    const std::int64_t n = s.total_count();
    vehicles += static_cast<double>(n);
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      if (s.count[k] > 0) {
        mean_sum[k] += s.speed_sum[k] / static_cast<double>(s.count[k]);
        ++steps_present[k];
      }
    }
    if (n > 0) {
      mean_sum[kNumClasses] += s.total_speed() / static_cast<double>(n);
      ++steps_present[kNumClasses];
    }
  }
  if (steps_present[kNumClasses] == 0) return rows;

  const double density = vehicles / static_cast<double>(history.size()) /
                         (road_length_km * n_lanes);
  auto emit = [&](std::size_t k, std::string name) {
    if (steps_present[k] == 0) return;
    rows.push_back(SpeedDensityRow{
        density, std::move(name),
        mean_sum[k] / static_cast<double>(steps_present[k]) * to_kmh, seed});
  };
  emit(kNumClasses, "all");
  for (VehicleClass c : kAllClasses) {
    emit(index_of(c), std::string(class_name(c)));
  }
  return rows;
}

Heatmap::Heatmap(std::int64_t n_steps, int n_cells, int time_bin,
                 int space_bin)
    : time_bin_(time_bin), space_bin_(space_bin) {
  if (time_bin <= 0 || space_bin <= 0 || n_steps < 0 || n_cells <= 0) {
    throw std::invalid_argument("heatmap bins must be positive");
  }
  rows_ = static_cast<int>((n_steps + time_bin - 1) / time_bin);
  cols_ = (n_cells + space_bin - 1) / space_bin;
  sum_.assign(static_cast<std::size_t>(rows_) * cols_, 0.0);
  count_.assign(sum_.size(), 0);
}

void Heatmap::add(std::int64_t step_in_window, int cell, double speed) {
  if (step_in_window < 0 || cell < 0) return;
  const auto r = static_cast<int>(step_in_window / time_bin_);
  const int c = cell / space_bin_;
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) return;
  const std::size_t k = static_cast<std::size_t>(r) * cols_ + c;
  sum_[k] += speed;
  ++count_[k];
}

bool Heatmap::empty_bin(int r, int c) const {
  return count_[static_cast<std::size_t>(r) * cols_ + c] == 0;
}

double Heatmap::at(int r, int c) const {
  const std::size_t k = static_cast<std::size_t>(r) * cols_ + c;
  if (count_[k] == 0) return std::numeric_limits<double>::quiet_NaN();
  return sum_[k] / static_cast<double>(count_[k]);
}

}  // namespace paylane
