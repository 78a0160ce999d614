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

#ifndef PAYLANE_IO_HPP
#define PAYLANE_IO_HPP

// Output writers. Every number goes through format_number so files are
// byte-stable across runs.

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "paylane/ledger.hpp"
#include "paylane/sim.hpp"

namespace paylane {

/// Shortest decimal that round-trips to the same double. NaN prints empty.
std::string format_number(double x);
std::string format_number(std::int64_t x);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> names);
  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(double x) { return cell(format_number(x)); }
  CsvWriter& cell(std::int64_t x) { return cell(format_number(x)); }
  CsvWriter& cell(int x) { return cell(static_cast<std::int64_t>(x)); }
  CsvWriter& cell(std::uint64_t x) { return cell(std::to_string(x)); }
  CsvWriter& cell(std::uint32_t x) { return cell(static_cast<std::uint64_t>(x)); }
  void end_row();

 private:
  std::ostream& out_;
  bool first_ = true;
};

void write_ledger_csv(std::ostream& out, const GameLedger& ledger);
void write_speed_density_csv(std::ostream& out,
                             const std::vector<SpeedDensityRow>& rows);

struct TrajectoryRow {
  std::int64_t step = 0;
  std::uint32_t id = 0;
  int lane = 0;
  int cell = 0;
  int v = 0;
  VehicleClass klass = VehicleClass::kNtv;
};
void write_trajectory_csv(std::ostream& out,
                          const std::vector<TrajectoryRow>& rows);

/// ASCII graymap (P2), gray = round(255 v / v_max); empty bins are 255.
void write_heatmap_pgm(std::ostream& out, const Heatmap& map, double v_max);
/// Raw bin means in cells/step, empty bins left blank.
void write_heatmap_csv(std::ostream& out, const Heatmap& map);
/// 1 where the bin holds data, 0 where empty.
void write_heatmap_mask_csv(std::ostream& out, const Heatmap& map);
/// Writes <stem>.pgm, <stem>.csv and <stem>.mask.csv; returns the paths.
std::vector<std::filesystem::path> write_heatmap_files(
    const std::filesystem::path& stem, const Heatmap& map, double v_max);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace paylane

#endif  // PAYLANE_IO_HPP
