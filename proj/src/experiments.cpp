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

#include "paylane/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace paylane {

namespace {

constexpr std::array<std::pair<Preset, std::string_view>, 6> kPresetNames = {{
    {Preset::kBenefitHeatmap, "benefit_heatmap"},
    {Preset::kUntruthfulHigh, "untruthful_high"},
    {Preset::kUntruthfulLow, "untruthful_low"},
    {Preset::kVip, "vip"},
    {Preset::kSpeedDensity, "speed_density"},
    {Preset::kShockwaveRing, "shockwave_ring"},
}};

// Runs fn(0..n-1) on up to `jobs` threads. Each index is written by exactly
// one worker, so callers store results by index.
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1,
                              std::max<std::size_t>(n, 1)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

std::string to_string(Preset p) {
  for (const auto& [preset, name] : kPresetNames) {
    if (preset == p) return std::string(name);
  }
  return "?";
}

std::optional<Preset> parse_preset(std::string_view name) {
  for (const auto& [preset, n] : kPresetNames) {
    if (n == name) return preset;
  }
  return std::nullopt;
}

void ScenarioSpec::validate() const {
  base.validate();
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("scenario." + what);
  };
  if (densities.empty()) fail("densities must not be empty");
  if (penetrations.empty()) fail("penetrations must not be empty");
  if (ratios.empty()) fail("ratios must not be empty");
  if (vot_highs.empty()) fail("vot_highs must not be empty");
  for (double d : densities) {
    if (!(d >= 0.0) || d > base.jam_density() + 1e-9) {
      fail("densities must lie in [0, jam density]");
    }
  }
  for (double p : penetrations) {
    if (!(p >= 0.0 && p <= 1.0)) fail("penetrations must lie in [0, 1]");
  }
  for (double r : ratios) {
    if (!(r >= 0.0 && r <= 1.0)) fail("ratios must lie in [0, 1]");
  }
  for (double v : vot_highs) {
    if (!(v >= 0.0)) fail("vot_highs must be >= 0");
  }
  if (n_seeds < 1) fail("n_seeds must be >= 1");
  if (warmup < 0) fail("warmup must be >= 0");
  if (horizon <= warmup) fail("horizon must exceed warmup");
  if (jobs < 1) fail("jobs must be >= 1");
  if (heatmap_time_bin < 1 || heatmap_space_bin < 1) {
    fail("heatmap bins must be >= 1");
  }
}

std::vector<double> default_density_grid(const SimConfig& cfg) {
  std::vector<double> grid;
  for (int d = 5; d <= 130; d += 5) grid.push_back(d);
  grid.push_back(cfg.jam_density());
  return grid;
}

std::vector<double> default_penetration_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(k / 20.0);
  return grid;
}

ScenarioSpec preset_spec(Preset preset, const SimConfig& base) {
  ScenarioSpec spec;
  spec.base = base;
  spec.base.boundary = Boundary::kRing;
  spec.mode = preset;
  spec.densities = default_density_grid(base);
  spec.penetrations = default_penetration_grid();
  spec.ratios = {base.high_low_ratio};
  spec.vot_highs = {base.vot_high};
  switch (preset) {
    case Preset::kBenefitHeatmap:
      spec.base.untruthful_mode = Untruthful::kNone;
      break;
    case Preset::kUntruthfulHigh:
      spec.base.untruthful_mode = Untruthful::kHighDeclaresLow;
      break;
    case Preset::kUntruthfulLow:
      spec.base.untruthful_mode = Untruthful::kLowDeclaresHigh;
      break;
    case Preset::kVip:
      spec.base.untruthful_mode = Untruthful::kNone;
      spec.base.vot_low = 10.0;
      spec.densities = {40.0, 80.0, 120.0};
      spec.penetrations = {1.0};
      spec.ratios = {0.01};
      spec.vot_highs = {10.0, 20.0, 30.0, 40.0, 50.0, 60.0};
      break;
    case Preset::kSpeedDensity:
      spec.base.untruthful_mode = Untruthful::kNone;
      spec.penetrations = {0.0, 0.5, 1.0};
      break;
    case Preset::kShockwaveRing:
      spec.base.untruthful_mode = Untruthful::kNone;
      spec.base.n_cells = 600;
      spec.densities = {40.0 / 3.0, 100.0 / 3.0};
      spec.penetrations = {1.0, 0.0};
      spec.n_seeds = 1;
      spec.warmup = 0;
      spec.horizon = 3600;
      break;
  }
  return spec;
}

std::vector<GridPoint> expand_grid(const ScenarioSpec& spec) {
  std::vector<GridPoint> points;
  for (double p : spec.penetrations) {
    for (double r : spec.ratios) {
      for (double v : spec.vot_highs) {
        for (double d : spec.densities) {
          points.push_back(GridPoint{points.size(), d, p, r, v});
        }
      }
    }
  }
  return points;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate) {
  return base_seed + static_cast<std::uint64_t>(replicate);
}

SimConfig config_for(const ScenarioSpec& spec, const GridPoint& point,
                     int replicate) {
  SimConfig cfg = spec.base;
  cfg.boundary = Boundary::kRing;
  cfg.density = point.density;
  cfg.n_vehicles = -1;
  cfg.tv_penetration = point.penetration;
  cfg.high_low_ratio = point.ratio;
  cfg.vot_high = point.vot_high;
  cfg.seed = replicate_seed(spec.base.seed, replicate);
  return cfg;
}

RunResult run_point(const SimConfig& cfg, std::int64_t warmup,
                    std::int64_t horizon, const RunOptions& options,
                    RunArtifacts* artifacts) {
  if (warmup < 0 || horizon <= warmup) {
    throw std::invalid_argument("need 0 <= warmup < horizon");
  }
  const auto started = std::chrono::steady_clock::now();
  Simulation sim(cfg);
  const std::int64_t window = horizon - warmup;

  std::optional<Heatmap> heat;
  if (options.record_heatmap) {
    heat.emplace(window, cfg.n_cells, options.heatmap_time_bin,
                 options.heatmap_space_bin);
  }
  std::vector<TrajectoryRow> trajectory;
  std::vector<StepSpeeds> history;
  history.reserve(static_cast<std::size_t>(window));

  for (std::int64_t t = 0; t < horizon; ++t) {
    if (t == warmup) sim.ledger().begin_measurement(t, sim.lattice().vehicles);
    sim.step();
    const Lattice& lat = sim.lattice();
    if (options.record_trajectory) {
      for (const VehicleState& v : lat.vehicles) {
        trajectory.push_back(
            TrajectoryRow{lat.step, v.id, v.lane, v.cell, v.v, v.klass});
      }
    }
    if (t < warmup) continue;
    history.push_back(lat.speed_window.back());
    if (heat) {
      for (const VehicleState& v : lat.vehicles) heat->add(t - warmup, v.cell, v.v);
    }
  }
  sim.ledger().finish(horizon);

  RunResult out;
  out.seed = cfg.seed;
  out.speed_density = speed_density_aggregate(
      history, cfg.length_km(), cfg.n_lanes, cfg.cell_length, cfg.dt, cfg.seed);
  for (const SpeedDensityRow& row : out.speed_density) {
    if (row.klass == "all") {
      out.all.mean_speed_kmh = row.mean_speed_kmh;
    } else if (const auto c = parse_class(row.klass)) {
      out.classes[index_of(*c)].mean_speed_kmh = row.mean_speed_kmh;
    }
  }

  const GameLedger& ledger = sim.ledger();
  for (VehicleClass c : kAllClasses) {
    ClassResult& cr = out.classes[index_of(c)];
    cr.benefit = benefit_index(ledger, ClassFilter{c}, cfg.dt);
    cr.n_vehicles = cr.benefit ? cr.benefit->n_vehicles : 0;
    if (cr.n_vehicles == 0) cr.mean_speed_kmh = nan();
  }
  out.all.benefit = benefit_index(ledger, ClassFilter::all(), cfg.dt);
  out.all.n_vehicles = out.all.benefit ? out.all.benefit->n_vehicles : 0;
  if (out.all.n_vehicles == 0) out.all.mean_speed_kmh = nan();

  out.n_games = ledger.records().size();
  for (const GameRecord& r : ledger.records()) {
    if (r.kind != GameKind::kTu) continue;
    ++out.n_tu_games;
    const bool truthful = r.cvot_a_true == r.cvot_a_declared &&
                          r.cvot_b_true == r.cvot_b_declared;
    const double half = r.omega / 2.0;
    if (truthful && (r.benefit_a() != half || r.benefit_b() != half)) {
      ++out.winwin_violations;
    }
  }
  out.payment_balance = ledger.payment_balance();
  out.cancelled_changes = sim.lattice().cancelled_changes;

  out.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - started)
                         .count();
  if (artifacts) {
    artifacts->ledger = ledger;
    artifacts->trajectory = std::move(trajectory);
    artifacts->heatmap = std::move(heat);
  }
  return out;
}

SweepResult run_sweep(const ScenarioSpec& spec) {
  spec.validate();
  SweepResult res;
  res.points = expand_grid(spec);
  const auto seeds = static_cast<std::size_t>(spec.n_seeds);
  res.runs.resize(res.points.size() * seeds);
  parallel_for(res.runs.size(), spec.jobs, [&](std::size_t k) {
    const GridPoint& point = res.points[k / seeds];
    const int replicate = static_cast<int>(k % seeds);
    const SimConfig cfg = config_for(spec, point, replicate);
    RunResult r;
    try {
      r = run_point(cfg, spec.warmup, spec.horizon);
    } catch (const std::exception& e) {
      r = RunResult{};
      r.error = e.what();
    }
    r.point = point;
    r.replicate = replicate;
    r.seed = cfg.seed;
    res.runs[k] = std::move(r);
  });
  return res;
}

MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd out;
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    sum += v;
    ++out.n;
  }
  if (out.n == 0) {
    out.mean = nan();
    out.sd = nan();
    return out;
  }
  out.mean = sum / out.n;
  double ss = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) ss += (v - out.mean) * (v - out.mean);
  }
  out.sd = out.n > 1 ? std::sqrt(ss / (out.n - 1)) : 0.0;
  return out;
}

void write_benefit_csv(std::ostream& out, const SweepResult& sweep,
                       Untruthful mode) {
  CsvWriter csv(out);
  csv.header({"density", "penetration", "class", "beta", "income_per_h",
              "time_saved_s_per_h", "seed", "high_low_ratio", "vot_high",
              "untruthful_mode"});
  for (const RunResult& r : sweep.runs) {
    for (VehicleClass c : kAllClasses) {
      const std::optional<BenefitSummary>& b = r.of(c).benefit;
      csv.cell(r.point.density).cell(r.point.penetration).cell(class_name(c));
      csv.cell(b ? b->beta : nan())
          .cell(b ? b->income_per_h : nan())
          .cell(b ? b->time_saved_s_per_h : nan());
      csv.cell(r.seed).cell(r.point.ratio).cell(r.point.vot_high).cell(
          to_string(mode));
      csv.end_row();
    }
  }
}

void write_sweep_speed_density_csv(std::ostream& out,
                                   const SweepResult& sweep) {
  CsvWriter csv(out);
  csv.header({"density_veh_km", "class", "mean_speed_kmh", "seed",
              "penetration", "high_low_ratio", "vot_high"});
  for (const RunResult& r : sweep.runs) {
    for (const SpeedDensityRow& row : r.speed_density) {
      csv.cell(row.density_veh_km)
          .cell(row.klass)
          .cell(row.mean_speed_kmh)
          .cell(row.seed)
          .cell(r.point.penetration)
          .cell(r.point.ratio)
          .cell(r.point.vot_high);
      csv.end_row();
    }
  }
}

void write_summary_csv(std::ostream& out, const SweepResult& sweep) {
  CsvWriter csv(out);
  csv.header({"point", "density", "penetration", "high_low_ratio", "vot_high",
              "class", "n_runs", "n_failed", "mean_speed_kmh",
              "mean_speed_kmh_sd", "beta", "beta_sd", "beta_relative",
              "income_per_h", "time_saved_s_per_h"});
  const std::size_t n_points = sweep.points.size();
  if (n_points == 0) return;
  const std::size_t seeds = sweep.runs.size() / n_points;
  for (std::size_t p = 0; p < n_points; ++p) {
    auto emit = [&](std::string_view name, auto&& pick) {
      std::vector<double> speed, beta, rel, income, saved;
      int failed = 0;
      for (std::size_t s = 0; s < seeds; ++s) {
        const RunResult& r = sweep.runs[p * seeds + s];
        if (!r.error.empty()) {
          ++failed;
          continue;
        }
        const ClassResult& cr = pick(r);
        speed.push_back(cr.mean_speed_kmh);
        beta.push_back(cr.benefit ? cr.benefit->beta : nan());
        rel.push_back(cr.benefit ? cr.benefit->relative_beta() : nan());
        income.push_back(cr.benefit ? cr.benefit->income_per_h : nan());
        saved.push_back(cr.benefit ? cr.benefit->time_saved_s_per_h : nan());
      }
      const GridPoint& gp = sweep.points[p];
      const MeanSd sp = mean_sd(speed), be = mean_sd(beta);
      csv.cell(static_cast<std::uint64_t>(gp.index))
          .cell(gp.density)
          .cell(gp.penetration)
          .cell(gp.ratio)
          .cell(gp.vot_high)
          .cell(name)
          .cell(static_cast<std::uint64_t>(seeds))
          .cell(failed)
          .cell(sp.mean)
          .cell(sp.sd)
          .cell(be.mean)
          .cell(be.sd)
          .cell(mean_sd(rel).mean)
          .cell(mean_sd(income).mean)
          .cell(mean_sd(saved).mean);
      csv.end_row();
    };
    emit("all", [](const RunResult& r) -> const ClassResult& { return r.all; });
    for (VehicleClass c : kAllClasses) {
      emit(class_name(c),
           [c](const RunResult& r) -> const ClassResult& { return r.of(c); });
    }
  }
}

std::vector<VipRow> run_vip(const ScenarioSpec& spec) {
  spec.validate();
  struct Job {
    double density;
    double vot_high;
    int replicate;
  };
  std::vector<Job> jobs;
  for (double d : spec.densities) {
    for (double v : spec.vot_highs) {
      for (int k = 0; k < spec.n_seeds; ++k) jobs.push_back({d, v, k});
    }
  }
  std::vector<VipRow> rows(jobs.size());
  parallel_for(jobs.size(), spec.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    GridPoint point{0, job.density, 1.0, spec.ratios.front(), job.vot_high};
    SimConfig cfg = config_for(spec, point, job.replicate);
    const RunResult r = run_point(cfg, spec.warmup, spec.horizon);
    VipRow row;
    row.density = job.density;
    row.vot_high = job.vot_high;
    row.replicate = job.replicate;
    row.seed = cfg.seed;
    row.speed_high_kmh = r.of(VehicleClass::kTvHigh).mean_speed_kmh;
    row.speed_low_kmh = r.of(VehicleClass::kTvLow).mean_speed_kmh;
    row.saving_pct = row.speed_high_kmh > 0.0
                         ? 100.0 * (1.0 - row.speed_low_kmh / row.speed_high_kmh)
                         : nan();
    rows[i] = row;
  });
  return rows;
}

void write_vip_csv(std::ostream& out, const std::vector<VipRow>& rows) {
  CsvWriter csv(out);
  csv.header({"density", "vot_high", "seed", "speed_high_kmh", "speed_low_kmh",
              "time_saved_pct"});
  for (const VipRow& r : rows) {
    csv.cell(r.density)
        .cell(r.vot_high)
        .cell(r.seed)
        .cell(r.speed_high_kmh)
        .cell(r.speed_low_kmh)
        .cell(r.saving_pct);
    csv.end_row();
  }
}

std::vector<BandTrack> find_low_speed_bands(const Heatmap& map,
                                            double speed_threshold,
                                            int min_rows) {
  const int cols = map.cols();
  constexpr double kMaxJump = 3.0;  // bins between consecutive rows

  struct Track {
    int first_row;
    std::vector<double> centroid;  // unwrapped, in bins
    bool alive = true;
  };
  std::vector<Track> tracks;
  auto low = [&](int r, int c) {
    return !map.empty_bin(r, c) && map.at(r, c) < speed_threshold;
  };
  auto cyclic_diff = [&](double to, double from) {
    double d = std::fmod(to - from, static_cast<double>(cols));
    if (d > cols / 2.0) d -= cols;
    if (d < -cols / 2.0) d += cols;
    return d;
  };

  for (int r = 0; r < map.rows(); ++r) {
    // Low-speed clusters of this row as centroids on the ring.
    std::vector<double> centroids;
    int start = -1;
    for (int c = 0; c < cols; ++c) {
      if (!low(r, c)) {
        start = c;
        break;
      }
    }
    if (start < 0) {
      centroids.push_back((cols - 1) / 2.0);  // whole row jammed
    } else {
      int run_begin = -1;
      for (int k = 1; k <= cols; ++k) {
        const int c = (start + k) % cols;
        if (low(r, c)) {
          if (run_begin < 0) run_begin = start + k;
        } else if (run_begin >= 0) {
          const int run_end = start + k - 1;
          centroids.push_back(
              std::fmod((run_begin + run_end) / 2.0, static_cast<double>(cols)));
          run_begin = -1;
        }
      }
    }

    // Greedy nearest matching of live tracks to clusters.
    std::vector<bool> taken(centroids.size(), false);
    for (Track& t : tracks) {
      if (!t.alive) continue;
      const double last = t.centroid.back();
      int best = -1;
      double best_d = kMaxJump + 1e-9;
      for (std::size_t k = 0; k < centroids.size(); ++k) {
        if (taken[k]) continue;
        const double d = std::abs(cyclic_diff(centroids[k], last));
        if (d <= best_d) {
          best_d = d;
          best = static_cast<int>(k);
        }
      }
      if (best < 0) {
        t.alive = false;
        continue;
      }
      taken[best] = true;
      t.centroid.push_back(last + cyclic_diff(centroids[best], last));
    }
    for (std::size_t k = 0; k < centroids.size(); ++k) {
      if (!taken[k]) tracks.push_back(Track{r, {centroids[k]}});
    }
  }

  std::vector<BandTrack> bands;
  const double bins_to_cells = static_cast<double>(map.space_bin()) / map.time_bin();
  for (const Track& t : tracks) {
    const auto n = static_cast<int>(t.centroid.size());
    if (n < min_rows) continue;
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
      mx += i;
      my += t.centroid[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < n; ++i) {
      sxy += (i - mx) * (t.centroid[i] - my);
      sxx += (i - mx) * (i - mx);
    }
    bands.push_back(BandTrack{t.first_row, n, sxy / sxx * bins_to_cells});
  }
  return bands;
}

std::vector<ShockwaveMap> run_shockwave(const ScenarioSpec& spec) {
  spec.validate();
  std::vector<GridPoint> points;
  for (double p : spec.penetrations) {
    for (double d : spec.densities) {
      points.push_back(GridPoint{points.size(), d, p, spec.ratios.front(),
                                 spec.vot_highs.front()});
    }
  }
  RunOptions options;
  options.record_heatmap = true;
  options.heatmap_time_bin = spec.heatmap_time_bin;
  options.heatmap_space_bin = spec.heatmap_space_bin;

  std::vector<std::optional<ShockwaveMap>> maps(points.size());
  parallel_for(points.size(), spec.jobs, [&](std::size_t i) {
    const SimConfig cfg = config_for(spec, points[i], 0);
    RunArtifacts artifacts;
    run_point(cfg, spec.warmup, spec.horizon, options, &artifacts);
    const double threshold = 0.3 * cfg.v_max;
    std::vector<BandTrack> bands =
        find_low_speed_bands(*artifacts.heatmap, threshold, 10);
    maps[i] = ShockwaveMap{points[i].penetration, points[i].density,
                           std::move(*artifacts.heatmap), std::move(bands)};
  });
  std::vector<ShockwaveMap> out;
  for (auto& m : maps) out.push_back(std::move(*m));
  return out;
}

std::vector<double> isotonic_nonincreasing(const std::vector<double>& y,
                                           const std::vector<double>& weight) {
  if (y.size() != weight.size()) {
    throw std::invalid_argument("isotonic fit needs one weight per value");
  }
  struct Block {
    double mean;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back(Block{y[i], weight[i], 1});
    while (blocks.size() > 1 &&
           blocks[blocks.size() - 2].mean < blocks.back().mean) {
      const Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const double w = prev.weight + top.weight;
      prev.mean = w > 0.0 ? (prev.mean * prev.weight + top.mean * top.weight) / w
                          : (prev.mean + top.mean) / 2.0;
      prev.weight = w;
      prev.count += top.count;
    }
  }
  std::vector<double> fit;
  fit.reserve(y.size());
  for (const Block& b : blocks) fit.insert(fit.end(), b.count, b.mean);
  return fit;
}

VeTable calibrate(const ScenarioSpec& spec) {
  spec.validate();
  std::vector<double> densities = spec.densities;
  std::sort(densities.begin(), densities.end());
  densities.erase(std::unique(densities.begin(), densities.end()),
                  densities.end());

  const auto seeds = static_cast<std::size_t>(spec.n_seeds);
  std::vector<RunResult> runs(densities.size() * seeds);
  parallel_for(runs.size(), spec.jobs, [&](std::size_t k) {
    GridPoint point{k / seeds, densities[k / seeds], spec.penetrations.front(),
                    spec.ratios.front(), spec.vot_highs.front()};
    SimConfig cfg = config_for(spec, point, static_cast<int>(k % seeds));
    cfg.games = false;
    cfg.ve_source = VeSource::kTrailing;
    if (cfg.initial_vehicles() == 0) {
      // An empty road imposes nothing: free speed.
      runs[k] = RunResult{};
      runs[k].all.mean_speed_kmh = cfg.v_max * cfg.speed_to_ms() * 3.6;
      return;
    }
    runs[k] = run_point(cfg, spec.warmup, spec.horizon);
  });

  VeTable table;
  table.density = densities;
  const double kmh_to_ms = 1.0 / 3.6;
  for (VehicleClass c : kAllClasses) {
    std::vector<double> speed;
    for (std::size_t d = 0; d < densities.size(); ++d) {
      std::vector<double> samples;
      for (std::size_t s = 0; s < seeds; ++s) {
        const RunResult& r = runs[d * seeds + s];
        const double v = r.of(c).n_vehicles >= 5 ? r.of(c).mean_speed_kmh
                                                 : r.all.mean_speed_kmh;
        samples.push_back(v * kmh_to_ms);
      }
      speed.push_back(mean_sd(samples).mean);
    }
    table.speed_ms[index_of(c)] =
        isotonic_nonincreasing(speed, std::vector<double>(speed.size(), 1.0));
  }
  return table;
}

void write_ve_table_csv(std::ostream& out, const VeTable& table) {
  CsvWriter csv(out);
  csv.header({"density_veh_km", "tv_high_ms", "tv_low_ms", "ntv_ms"});
  for (std::size_t i = 0; i < table.density.size(); ++i) {
    csv.cell(table.density[i]);
    for (VehicleClass c : kAllClasses) csv.cell(table.speed_ms[index_of(c)][i]);
    csv.end_row();
  }
}

VeTable parse_ve_table_csv(std::string_view text) {
  VeTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line_no == 1) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<double> values;
    while (std::getline(row, field, ',')) {
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw std::invalid_argument("ve table line " + std::to_string(line_no) +
                                    ": bad number '" + field + "'");
      }
    }
    if (values.size() != 1 + kNumClasses) {
      throw std::invalid_argument("ve table line " + std::to_string(line_no) +
                                  ": expected 4 columns");
    }
    if (!table.density.empty() && values[0] <= table.density.back()) {
      throw std::invalid_argument("ve table line " + std::to_string(line_no) +
                                  ": densities must increase");
    }
    table.density.push_back(values[0]);
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      table.speed_ms[k].push_back(values[1 + k]);
    }
  }
  if (table.empty()) throw std::invalid_argument("ve table has no rows");
  return table;
}

}  // namespace paylane
