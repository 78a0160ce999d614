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

#ifndef PAYLANE_GAME_HPP
#define PAYLANE_GAME_HPP

// Two-player lane-change games: time-difference utility, transferable-utility
// solution with side payment, and Nash bargaining for non-transacting pairs.
//
// Action indices are 0-based internally. Row player is the lane changer (A):
// row 0 = change lanes, row 1 = stay. Column player is the lag vehicle (B):
// column 0 = do not give way, column 1 = give way. to_string() prints the
// conventional 1-based pair, e.g. "(1,2)" for {A changes, B gives way}.

#include <array>
#include <cstdint>
#include <string>
#include <type_traits>

namespace paylane {

inline constexpr int kChangeLanes = 0;
inline constexpr int kStay = 1;
inline constexpr int kHold = 0;
inline constexpr int kGiveWay = 1;

inline constexpr double kDefaultCrashPenalty = 1e6;

using Table2x2 = std::array<std::array<double, 2>, 2>;

struct JointAction {
  int row = kStay;
  int col = kGiveWay;

  friend bool operator==(const JointAction&, const JointAction&) = default;
};

std::string to_string(JointAction action);

/// Speed bundle for one vehicle's two choices. Speeds in m/s, rates in m/s^2
/// carrying the sign of the actual change (deceleration negative).
struct SpeedScenario {
  double v0 = 0.0;  // informational only
  double v1 = 0.0;  // higher-speed choice
  double v2 = 0.0;  // lower-speed choice
  double ve = 0.0;  // equilibrium speed
  double ta = 0.0;  // lane-change completion time, s
  double a1 = 0.0;  // rate taking v1 -> ve
  double a2 = 0.0;  // rate taking v2 -> ve
};

/// Average travel time (s) saved over the equilibration episode by taking v1
/// instead of v2:
///
///   t_d = [ (v1 - v2) ta + (ve - v1)^2 / (-a1) + (ve - v2)^2 / a2 ] / (2 ve)
///
/// Throws std::invalid_argument on ve <= 0, ta <= 0, a1 == 0, a2 == 0,
/// v1 < v2, v2 < 0, and std::domain_error when the geometry comes out
/// negative (inconsistent sign convention on the rates).
double time_difference(const SpeedScenario& s);

/// Single-rate form: a1 = -accel, a2 = +accel.
double time_difference(double v1, double v2, double ve, double ta,
                       double accel);

struct BimatrixGame {
  Table2x2 a{};  // payoffs to A
  Table2x2 b{};  // payoffs to B
  double m = kDefaultCrashPenalty;
};

/// Lane-change payoff tables. cvot values are dollars per second.
///
///   A = [[-m, cvot_a td_a], [0, 0]]    B = [[-m, 0], [cvot_b td_b, 0]]
BimatrixGame build_utility_matrix(double cvot_a, double td_a, double cvot_b,
                                  double td_b,
                                  double m = kDefaultCrashPenalty);

/// Throws std::invalid_argument unless g has the lane-change structure
/// produced by build_utility_matrix.
void validate_lane_change_structure(const BimatrixGame& g);

/// Throws std::invalid_argument on non-finite entries or m <= 0.
void validate_game(const BimatrixGame& g);

struct ZeroSumSolution {
  double value = 0.0;
  bool saddle = false;
  JointAction cell{};  // meaningful when saddle
  double p = 0.0;      // probability of row 0
  double q = 0.0;      // probability of column 0
};

/// Value of the 2x2 zero-sum game d (row player maximizes). Returns the
/// pure saddle when maximin equals minimax, else the mixed equilibrium.
ZeroSumSolution solve_zero_sum_2x2(const Table2x2& d);

struct TuOutcome {
  double omega_star = 0.0;
  JointAction action{};
  double sigma = 0.0;  // positive: A pays B
  double payoff_a = 0.0;
  double payoff_b = 0.0;
  double threat_a = 0.0;
  double threat_b = 0.0;
  double theta = 0.0;  // threat_a - threat_b, value of A - B
};

TuOutcome solve_tu(const BimatrixGame& g);

struct NtuOutcome {
  double n_a = 0.0;
  double n_b = 0.0;
  double status_quo_a = 0.0;
  double status_quo_b = 0.0;
  JointAction realized_action{};
};

/// Nash bargaining with status quo (0, 0). The realized action is (1,2) when
/// `a_changes` is set, else (2,1); both tradable cells zero gives (2,2).
NtuOutcome solve_ntu(const BimatrixGame& g, bool a_changes);

/// Draws the fair coin from `rng` (any uniform random bit generator).
template <class URBG>
NtuOutcome solve_ntu(const BimatrixGame& g, URBG& rng) {
  using result_type = typename URBG::result_type;
  static_assert(std::is_unsigned_v<result_type>);
  const result_type span = URBG::max() - URBG::min();
  const bool heads = (rng() - URBG::min()) <= span / 2;
  return solve_ntu(g, heads);
}

}  // namespace paylane

#endif  // PAYLANE_GAME_HPP
