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

#include "paylane/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace paylane {

std::string format_number(double x) {
  if (std::isnan(x)) return {};
  if (x == 0.0) return "0";  // folds -0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string format_number(std::int64_t x) { return std::to_string(x); }

void CsvWriter::header(std::initializer_list<std::string_view> names) {
  for (std::string_view n : names) cell(n);
  end_row();
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  if (!first_) out_ << ',';
  out_ << text;
  first_ = false;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

void write_ledger_csv(std::ostream& out, const GameLedger& ledger) {
  CsvWriter csv(out);
  csv.header({"step", "a_id", "b_id", "a_class", "b_class", "kind", "action",
              "sigma", "omega", "td_a", "td_b", "dt_a", "dt_b", "cvot_a_true",
              "cvot_a_declared", "cvot_b_true", "cvot_b_declared"});
  for (const GameRecord& r : ledger.records()) {
    csv.cell(r.step)
        .cell(r.a_id)
        .cell(r.b_id)
        .cell(class_name(r.a_class))
        .cell(class_name(r.b_class))
        .cell(r.kind == GameKind::kTu ? "TU" : "NTU")
        .cell(std::to_string(r.action.row + 1) + std::to_string(r.action.col + 1))
        .cell(r.sigma)
        .cell(r.omega)
        .cell(r.td_a)
        .cell(r.td_b)
        .cell(r.dt_a)
        .cell(r.dt_b)
        .cell(r.cvot_a_true)
        .cell(r.cvot_a_declared)
        .cell(r.cvot_b_true)
        .cell(r.cvot_b_declared);
    csv.end_row();
  }
}

void write_speed_density_csv(std::ostream& out,
                             const std::vector<SpeedDensityRow>& rows) {
  CsvWriter csv(out);
  csv.header({"density_veh_km", "class", "mean_speed_kmh", "seed"});
  for (const SpeedDensityRow& r : rows) {
    csv.cell(r.density_veh_km).cell(r.klass).cell(r.mean_speed_kmh).cell(r.seed);
    csv.end_row();
  }
}

void write_trajectory_csv(std::ostream& out,
                          const std::vector<TrajectoryRow>& rows) {
  CsvWriter csv(out);
  csv.header({"step", "id", "lane", "cell", "v", "class"});
  for (const TrajectoryRow& r : rows) {
    csv.cell(r.step).cell(r.id).cell(r.lane + 1).cell(r.cell).cell(r.v).cell(
        class_name(r.klass));
    csv.end_row();
  }
}

void write_heatmap_pgm(std::ostream& out, const Heatmap& map, double v_max) {
  out << "P2\n" << map.cols() << ' ' << map.rows() << "\n255\n";
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      int gray = 255;
      if (!map.empty_bin(r, c)) {
        const double x = std::clamp(map.at(r, c) / v_max, 0.0, 1.0);
        gray = static_cast<int>(std::lround(255.0 * x));
      }
      if (c > 0) out << ' ';
      out << gray;
    }
    out << '\n';
  }
}

void write_heatmap_csv(std::ostream& out, const Heatmap& map) {
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_number(map.at(r, c));
    }
    out << '\n';
  }
}

void write_heatmap_mask_csv(std::ostream& out, const Heatmap& map) {
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      if (c > 0) out << ',';
      out << (map.empty_bin(r, c) ? '0' : '1');
    }
    out << '\n';
  }
}

std::vector<std::filesystem::path> write_heatmap_files(
    const std::filesystem::path& stem, const Heatmap& map, double v_max) {
  std::vector<std::filesystem::path> paths;
  auto emit = [&](const std::string& suffix, auto&& writer) {
    std::filesystem::path p = stem;
    p += suffix;
    std::ostringstream buf;
    writer(buf);
    write_file(p, buf.str());
    paths.push_back(p);
  };
  emit(".pgm", [&](std::ostream& o) { write_heatmap_pgm(o, map, v_max); });
  emit(".csv", [&](std::ostream& o) { write_heatmap_csv(o, map); });
  emit(".mask.csv", [&](std::ostream& o) { write_heatmap_mask_csv(o, map); });
  return paths;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace paylane
