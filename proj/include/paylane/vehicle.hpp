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

#ifndef PAYLANE_VEHICLE_HPP
#define PAYLANE_VEHICLE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string_view>

namespace paylane {

enum class VehicleClass : std::uint8_t { kTvHigh = 0, kTvLow = 1, kNtv = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<VehicleClass, kNumClasses> kAllClasses = {
    VehicleClass::kTvHigh, VehicleClass::kTvLow, VehicleClass::kNtv};

constexpr std::size_t index_of(VehicleClass c) {
  return static_cast<std::size_t>(c);
}

constexpr bool is_transacting(VehicleClass c) {
  return c != VehicleClass::kNtv;
}

constexpr std::string_view class_name(VehicleClass c) {
  switch (c) {
    case VehicleClass::kTvHigh:
      return "tv_high";
    case VehicleClass::kTvLow:
      return "tv_low";
    case VehicleClass::kNtv:
      return "ntv";
  }
  return "?";
}

std::optional<VehicleClass> parse_class(std::string_view name);

/// Set of vehicle classes, used to filter aggregates.
class ClassFilter {
 public:
  constexpr ClassFilter() = default;
  constexpr ClassFilter(std::initializer_list<VehicleClass> classes) {
    for (VehicleClass c : classes) bits_ |= bit(c);
  }

  static constexpr ClassFilter all() {
    return {VehicleClass::kTvHigh, VehicleClass::kTvLow, VehicleClass::kNtv};
  }
  static constexpr ClassFilter transacting() {
    return {VehicleClass::kTvHigh, VehicleClass::kTvLow};
  }

  constexpr bool contains(VehicleClass c) const { return (bits_ & bit(c)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }

 private:
  static constexpr unsigned bit(VehicleClass c) { return 1u << index_of(c); }
  unsigned bits_ = 0;
};

/// One vehicle on the lattice. Speed is in cells per step; VOT in dollars per
/// second.
struct VehicleState {
  std::uint32_t id = 0;
  int lane = 0;  // 0 or 1
  int cell = 0;
  int v = 0;
  VehicleClass klass = VehicleClass::kNtv;
  double cvot_true = 0.0;
  double cvot_declared = 0.0;
  std::int64_t entry_step = 0;
};

}  // namespace paylane

#endif  // PAYLANE_VEHICLE_HPP
