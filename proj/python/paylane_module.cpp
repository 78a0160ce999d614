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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "paylane/config.hpp"
#include "paylane/experiments.hpp"
#include "paylane/game.hpp"
#include "paylane/io.hpp"
#include "paylane/random.hpp"
#include "paylane/sim.hpp"

namespace py = pybind11;

namespace paylane {
namespace {

py::dict benefit_dict(const std::optional<BenefitSummary>& b) {
  py::dict d;
  if (!b) return d;
  d["beta"] = b->beta;
  d["relative_beta"] = b->relative_beta();
  d["income_per_h"] = b->income_per_h;
  d["time_saved_s_per_h"] = b->time_saved_s_per_h;
  d["mean_travel_time_h"] = b->mean_travel_time_h;
  d["n_vehicles"] = b->n_vehicles;
  d["n_games"] = b->n_games;
  return d;
}

py::dict result_dict(const RunResult& r) {
  py::dict d;
  d["seed"] = r.seed;
  d["n_games"] = r.n_games;
  d["n_tu_games"] = r.n_tu_games;
  d["payment_balance"] = r.payment_balance;
  d["winwin_violations"] = r.winwin_violations;
  d["cancelled_changes"] = r.cancelled_changes;
  py::dict classes;
  auto one = [](const ClassResult& c) {
    py::dict x;
    x["n_vehicles"] = c.n_vehicles;
    x["mean_speed_kmh"] = c.mean_speed_kmh;
    x["benefit"] = c.benefit ? py::object(benefit_dict(c.benefit)) : py::none();
    return x;
  };
  classes["all"] = one(r.all);
  for (VehicleClass c : kAllClasses) {
    classes[py::str(std::string(class_name(c)))] = one(r.of(c));
  }
  d["classes"] = classes;
  return d;
}

}  // namespace
}  // namespace paylane

PYBIND11_MODULE(_core, m) {
  using namespace paylane;
  m.doc() = "Lane-change bargaining on a two-lane cellular automaton";

  py::class_<JointAction>(m, "JointAction")
      .def_readonly("row", &JointAction::row)
      .def_readonly("col", &JointAction::col)
      .def("__repr__", [](const JointAction& a) { return to_string(a); })
      .def("__eq__", [](const JointAction& a, const JointAction& b) { return a == b; });

  py::class_<SpeedScenario>(m, "SpeedScenario")
      .def(py::init([](double v1, double v2, double ve, double ta, double a1,
                       double a2, double v0) {
             return SpeedScenario{v0, v1, v2, ve, ta, a1, a2};
           }),
           py::arg("v1"), py::arg("v2"), py::arg("ve"), py::arg("ta"),
           py::arg("a1"), py::arg("a2"), py::arg("v0") = 0.0)
      .def_readwrite("v0", &SpeedScenario::v0)
      .def_readwrite("v1", &SpeedScenario::v1)
      .def_readwrite("v2", &SpeedScenario::v2)
      .def_readwrite("ve", &SpeedScenario::ve)
      .def_readwrite("ta", &SpeedScenario::ta)
      .def_readwrite("a1", &SpeedScenario::a1)
      .def_readwrite("a2", &SpeedScenario::a2);

  m.def("time_difference", py::overload_cast<const SpeedScenario&>(&time_difference),
        py::arg("scenario"), "Time saved (s) by the higher-speed action.");

  py::class_<BimatrixGame>(m, "BimatrixGame")
      .def(py::init([](Table2x2 a, Table2x2 b, double mm) {
             return BimatrixGame{a, b, mm};
           }),
           py::arg("a"), py::arg("b"), py::arg("m") = kDefaultCrashPenalty)
      .def_readwrite("a", &BimatrixGame::a)
      .def_readwrite("b", &BimatrixGame::b)
      .def_readwrite("m", &BimatrixGame::m);

  m.def("build_utility_matrix", &build_utility_matrix, py::arg("cvot_a"),
        py::arg("td_a"), py::arg("cvot_b"), py::arg("td_b"),
        py::arg("m") = kDefaultCrashPenalty,
        "Payoff tables from VOTs in dollars/s and time differences in s.");

  py::class_<ZeroSumSolution>(m, "ZeroSumSolution")
      .def_readonly("value", &ZeroSumSolution::value)
      .def_readonly("saddle", &ZeroSumSolution::saddle)
      .def_readonly("cell", &ZeroSumSolution::cell)
      .def_readonly("p", &ZeroSumSolution::p)
      .def_readonly("q", &ZeroSumSolution::q);
  m.def("solve_zero_sum_2x2", &solve_zero_sum_2x2, py::arg("d"));

  py::class_<TuOutcome>(m, "TuOutcome")
      .def_readonly("omega_star", &TuOutcome::omega_star)
      .def_readonly("action", &TuOutcome::action)
      .def_readonly("sigma", &TuOutcome::sigma)
      .def_readonly("payoff_a", &TuOutcome::payoff_a)
      .def_readonly("payoff_b", &TuOutcome::payoff_b)
      .def_readonly("threat_a", &TuOutcome::threat_a)
      .def_readonly("threat_b", &TuOutcome::threat_b)
      .def_readonly("theta", &TuOutcome::theta);
  m.def("solve_tu", &solve_tu, py::arg("game"));

  py::class_<NtuOutcome>(m, "NtuOutcome")
      .def_readonly("n_a", &NtuOutcome::n_a)
      .def_readonly("n_b", &NtuOutcome::n_b)
      .def_readonly("status_quo_a", &NtuOutcome::status_quo_a)
      .def_readonly("status_quo_b", &NtuOutcome::status_quo_b)
      .def_readonly("realized_action", &NtuOutcome::realized_action);
  m.def(
      "solve_ntu",
      [](const BimatrixGame& g, std::uint64_t seed) {
        CounterRng rng = RandomStreams(seed).stream(0, 0, Draw::kCoin);
        return solve_ntu(g, rng);
      },
      py::arg("game"), py::arg("seed") = 1);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("cell_length", &SimConfig::cell_length)
      .def_readwrite("n_cells", &SimConfig::n_cells)
      .def_readwrite("dt", &SimConfig::dt)
      .def_readwrite("v_max", &SimConfig::v_max)
      .def_readwrite("p_sd", &SimConfig::p_sd)
      .def_readwrite("ta", &SimConfig::ta)
      .def_readwrite("tv_penetration", &SimConfig::tv_penetration)
      .def_readwrite("vot_high", &SimConfig::vot_high)
      .def_readwrite("vot_low", &SimConfig::vot_low)
      .def_readwrite("high_low_ratio", &SimConfig::high_low_ratio)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("games", &SimConfig::games)
      .def_readwrite("n_vehicles", &SimConfig::n_vehicles)
      .def_readwrite("density", &SimConfig::density)
      .def("validate", &SimConfig::validate)
      .def("jam_density", &SimConfig::jam_density)
      .def("initial_vehicles", &SimConfig::initial_vehicles);

  py::class_<Simulation>(m, "Simulation")
      .def(py::init<SimConfig>(), py::arg("config"))
      .def("step", &Simulation::step)
      .def("run", &Simulation::run, py::arg("steps"))
      .def_property_readonly("step_index",
                             [](const Simulation& s) { return s.lattice().step; })
      .def("vehicles",
           [](const Simulation& s) {
             py::list out;
             for (const VehicleState& v : s.lattice().vehicles) {
               out.append(py::make_tuple(v.id, v.lane, v.cell, v.v,
                                         std::string(class_name(v.klass))));
             }
             return out;
           },
           "(id, lane, cell, speed, class) per vehicle.")
      .def("n_games",
           [](const Simulation& s) { return s.ledger().records().size(); });

  m.def(
      "run_point",
      [](const SimConfig& cfg, std::int64_t warmup, std::int64_t horizon) {
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_point(cfg, warmup, horizon);
        }
        return result_dict(r);
      },
      py::arg("config"), py::arg("warmup") = 600, py::arg("horizon") = 3600);

  m.def(
      "parse_config",
      [](const std::string& text) { return serialize_config(parse_config(text)); },
      py::arg("text"), "Parses config text and returns its canonical form.");

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  m.attr("__version__") = PAYLANE_VERSION;
}
