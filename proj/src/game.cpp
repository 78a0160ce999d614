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

#include "paylane/game.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace paylane {

std::string to_string(JointAction action) {
  return "(" + std::to_string(action.row + 1) + "," +
         std::to_string(action.col + 1) + ")";
}

double time_difference(const SpeedScenario& s) {
  if (!(s.ve > 0.0)) throw std::invalid_argument("equilibrium speed must be > 0");
  if (!(s.ta > 0.0)) throw std::invalid_argument("lane-change time must be > 0");
  if (s.a1 == 0.0 || s.a2 == 0.0) {
    throw std::invalid_argument("acceleration rates must be nonzero");
  }
  if (s.v1 < s.v2) throw std::invalid_argument("v1 must be >= v2");
  if (s.v2 < 0.0) throw std::invalid_argument("speeds must be nonnegative");

  const double gap_phase = (s.v1 - s.v2) * s.ta;
  const double high_relax = (s.ve - s.v1) * (s.ve - s.v1) / -s.a1;
  const double low_relax = (s.ve - s.v2) * (s.ve - s.v2) / s.a2;
  const double td = (gap_phase + high_relax + low_relax) / (2.0 * s.ve);
  if (td < 0.0) {
    throw std::domain_error("negative time difference: rate signs inconsistent "
                            "with the speed ordering");
  }
  return td;
}

double time_difference(double v1, double v2, double ve, double ta,
                       double accel) {
  return time_difference(SpeedScenario{.v0 = v2,
                                       .v1 = v1,
                                       .v2 = v2,
                                       .ve = ve,
                                       .ta = ta,
                                       .a1 = -accel,
                                       .a2 = accel});
}

BimatrixGame build_utility_matrix(double cvot_a, double td_a, double cvot_b,
                                  double td_b, double m) {
  if (cvot_a < 0.0 || cvot_b < 0.0 || td_a < 0.0 || td_b < 0.0) {
    throw std::invalid_argument("VOT and time differences must be >= 0");
  }
  const double gain_a = cvot_a * td_a;
  const double gain_b = cvot_b * td_b;
  if (!std::isfinite(gain_a) || !std::isfinite(gain_b)) {
    throw std::invalid_argument("non-finite utility");
  }
  if (!(m > gain_a + gain_b)) {
    throw std::invalid_argument("crash penalty must dominate tradable utility");
  }
  BimatrixGame g;
  g.m = m;
  g.a = {{{-m, gain_a}, {0.0, 0.0}}};
  g.b = {{{-m, 0.0}, {gain_b, 0.0}}};
  return g;
}

void validate_game(const BimatrixGame& g) {
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (!std::isfinite(g.a[i][j]) || !std::isfinite(g.b[i][j])) {
        throw std::invalid_argument("payoff tables must be finite");
      }
    }
  }
  if (!(g.m > 0.0) || !std::isfinite(g.m)) {
    throw std::invalid_argument("crash penalty must be finite and > 0");
  }
}

void validate_lane_change_structure(const BimatrixGame& g) {
  validate_game(g);
  const bool crash = g.a[0][0] == -g.m && g.b[0][0] == -g.m;
  const bool a_datum = g.a[1][0] == 0.0 && g.a[1][1] == 0.0;
  const bool b_datum = g.b[0][1] == 0.0 && g.b[1][1] == 0.0;
  const bool gains = g.a[0][1] >= 0.0 && g.b[1][0] >= 0.0;
  if (!(crash && a_datum && b_datum && gains)) {
    throw std::invalid_argument("matrix is not a lane-change game");
  }
  if (!(g.m > g.a[0][1] + g.b[1][0])) {
    throw std::invalid_argument("crash penalty must dominate tradable utility");
  }
}

ZeroSumSolution solve_zero_sum_2x2(const Table2x2& d) {
  // Row minima and column maxima; ties resolve to the lower index.
  std::array<int, 2> row_argmin{};
  std::array<double, 2> row_min{};
  for (int i = 0; i < 2; ++i) {
    row_argmin[i] = d[i][1] < d[i][0] ? 1 : 0;
    row_min[i] = d[i][row_argmin[i]];
  }
  const int best_row = row_min[1] > row_min[0] ? 1 : 0;
  const double maximin = row_min[best_row];
  const double minimax =
      std::min(std::max(d[0][0], d[1][0]), std::max(d[0][1], d[1][1]));

  ZeroSumSolution out;
  if (maximin == minimax) {
    out.saddle = true;
    out.value = maximin;
    out.cell = JointAction{best_row, row_argmin[best_row]};
    out.p = best_row == 0 ? 1.0 : 0.0;
    out.q = out.cell.col == 0 ? 1.0 : 0.0;
    return out;
  }

  // Without a saddle the diagonals strictly dominate in opposite directions,
  // so the denominator cannot vanish.
  const double denom = (d[0][0] - d[0][1]) + (d[1][1] - d[1][0]);
  assert(denom != 0.0);
  if (denom == 0.0) throw std::logic_error("degenerate mixed 2x2 game");
  out.saddle = false;
  out.value = (d[0][0] * d[1][1] - d[0][1] * d[1][0]) / denom;
  out.p = (d[1][1] - d[1][0]) / denom;
  out.q = (d[1][1] - d[0][1]) / denom;
  return out;
}

namespace {

double expected_payoff(const Table2x2& t, double p, double q) {
  return p * (q * t[0][0] + (1.0 - q) * t[0][1]) +
         (1.0 - p) * (q * t[1][0] + (1.0 - q) * t[1][1]);
}

}  // namespace

TuOutcome solve_tu(const BimatrixGame& g) {
  validate_game(g);

  // Status quo first so that zero-gain games move neither money nor cars.
  constexpr std::array<JointAction, 4> kPreference = {
      JointAction{kStay, kGiveWay}, JointAction{kStay, kHold},
      JointAction{kChangeLanes, kGiveWay}, JointAction{kChangeLanes, kHold}};
  TuOutcome out;
  out.action = kPreference[0];
  out.omega_star = g.a[kStay][kGiveWay] + g.b[kStay][kGiveWay];
  for (const JointAction cell : kPreference) {
    const double total = g.a[cell.row][cell.col] + g.b[cell.row][cell.col];
    if (total > out.omega_star) {
      out.omega_star = total;
      out.action = cell;
    }
  }

  Table2x2 diff{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) diff[i][j] = g.a[i][j] - g.b[i][j];
  }
  const ZeroSumSolution threat = solve_zero_sum_2x2(diff);
  out.theta = threat.value;
  out.threat_a = expected_payoff(g.a, threat.p, threat.q);
  out.threat_b = expected_payoff(g.b, threat.p, threat.q);

  out.payoff_a = (out.theta + out.omega_star) / 2.0;
  out.payoff_b = (out.omega_star - out.theta) / 2.0;
  out.sigma = g.a[out.action.row][out.action.col] - out.payoff_a;
  return out;
}

NtuOutcome solve_ntu(const BimatrixGame& g, bool a_changes) {
  validate_lane_change_structure(g);
  NtuOutcome out;
  // The Nash product over the segment (0, B21)-(A12, 0) peaks at its midpoint.
  out.n_a = g.a[kChangeLanes][kGiveWay] / 2.0;
  out.n_b = g.b[kStay][kHold] / 2.0;
  if (g.a[kChangeLanes][kGiveWay] == 0.0 && g.b[kStay][kHold] == 0.0) {
    out.realized_action = JointAction{kStay, kGiveWay};
  } else if (a_changes) {
    out.realized_action = JointAction{kChangeLanes, kGiveWay};
  } else {
    out.realized_action = JointAction{kStay, kHold};
  }
  return out;
}

}  // namespace paylane
