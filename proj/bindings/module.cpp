// Python bindings for the reconfiguration toolkit. Heavy objects (networks,
// scenarios, value tables, dispatch caches) stay native; results cross into
// Python as plain dicts/lists via their JSON forms.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "gridres/actions.hpp"
#include "gridres/adp.hpp"
#include "gridres/case_study.hpp"
#include "gridres/common.hpp"
#include "gridres/dispatch.hpp"
#include "gridres/events.hpp"
#include "gridres/exact_dp.hpp"
#include "gridres/kernels.hpp"
#include "gridres/network.hpp"
#include "gridres/policy_eval.hpp"
#include "gridres/scenario.hpp"
#include "gridres/state.hpp"
#include "gridres/topology.hpp"
#include "gridres/value_table.hpp"

namespace py = pybind11;
using namespace gridres;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null:
      return py::none();
    case nlohmann::json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return py::int_(j.get<int64_t>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<uint64_t>());
    case nlohmann::json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items())
        out[py::str(key)] = json_to_py(value);
      return out;
    }
    default:
      return py::none();
  }
}

ADPConfig make_config(int iterations, const std::string& epsilon,
                      double exploration, uint64_t seed,
                      const std::vector<std::string>& probes,
                      double initial_value) {
  ADPConfig cfg;
  cfg.iterations = iterations;
  cfg.epsilon = EpsilonSpec::parse(epsilon);
  cfg.exploration = exploration;
  cfg.seed = seed;
  cfg.initial_value = initial_value;
  for (const auto& p : probes)
    cfg.probes.push_back(PostDecisionState::decode(p));
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(gridres_py, m) {
  m.doc() =
      "Storm-resilient distribution reconfiguration: linearized-DistFlow "
      "dispatch, approximate and exact dynamic programming, Monte Carlo "
      "policy evaluation.";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_RuntimeError);

  py::class_<Network>(m, "Network")
      .def_static("load", &load_network, py::arg("path"))
      .def_static(
          "from_json",
          [](const std::string& text) {
            return Network::from_json(nlohmann::json::parse(text));
          },
          py::arg("text"), "Build a network from a JSON string.")
      .def_property_readonly("name", [](const Network& n) { return n.name; })
      .def_property_readonly(
          "num_buses", [](const Network& n) { return n.buses.size(); })
      .def_property_readonly(
          "num_lines", [](const Network& n) { return n.lines.size(); })
      .def_property_readonly("total_p_load", &Network::total_p_load)
      .def_property_readonly("content_hash", &Network::content_hash)
      .def_property_readonly("initial_open_dispatchable",
                             &Network::initial_open_dispatchable)
      .def("to_json",
           [](const Network& n) { return json_to_py(n.to_json()); })
      .def("__repr__", [](const Network& n) {
        return "<Network '" + n.name + "': " +
               std::to_string(n.buses.size()) + " buses, " +
               std::to_string(n.lines.size()) + " lines>";
      });

  py::class_<Scenario>(m, "Scenario")
      .def_static("load", &load_scenario, py::arg("path"), py::arg("net"))
      .def_readonly("horizon", &Scenario::horizon)
      .def_readonly("seed", &Scenario::seed)
      .def_property_readonly("content_hash", &Scenario::content_hash)
      .def("eta_at", &Scenario::eta_at, py::arg("t"))
      .def("to_json",
           [](const Scenario& s) { return json_to_py(s.to_json()); })
      .def("__repr__", [](const Scenario& s) {
        return "<Scenario horizon=" + std::to_string(s.horizon) + ">";
      });

  py::class_<MarkovState>(m, "MarkovState")
      .def_static("decode", &MarkovState::decode, py::arg("text"))
      .def_readonly("t", &MarkovState::t)
      .def_readonly("failed", &MarkovState::failed)
      .def_readonly("open_dispatchable", &MarkovState::open_dispatchable)
      .def("encode", &MarkovState::encode)
      .def("__repr__",
           [](const MarkovState& s) { return "<MarkovState " + s.encode() + ">"; });

  py::class_<ValueTable>(m, "ValueTable")
      .def(py::init<>())
      .def_static("load",
                  [](const std::string& path) {
                    auto [table, header] = load_value_table(path);
                    return table;
                  },
                  py::arg("path"))
      .def("__len__", &ValueTable::size)
      .def("value", &ValueTable::value, py::arg("pds_key"),
           py::arg("default_value") = 0.0)
      .def("entries", [](const ValueTable& vt) {
        py::dict out;
        for (const auto& [pds, entry] : vt.entries())
          out[py::str(pds.encode())] =
              py::make_tuple(entry.value, entry.visits);
        return out;
      });

  py::class_<CostOracle>(m, "CostOracle")
      .def(py::init<const Network&>(), py::arg("net"),
           py::keep_alive<1, 2>())
      .def("__len__", &CostOracle::size);

  m.def("initial_state", &initial_state, py::arg("net"));

  m.def(
      "enumerate_actions",
      [](const Network& net, const MarkovState& state) {
        py::list out;
        for (const auto& a : enumerate_actions(net, state))
          out.append(a.open_lines);
        return out;
      },
      py::arg("net"), py::arg("state"),
      "Feasible actions as lists of dispatchable line ids to hold open.");

  m.def(
      "enumerate_successors",
      [](const Network& net, const MarkovState& state,
         const std::vector<int>& open_lines, const Scenario& scenario) {
        py::list out;
        for (const auto& tr :
             enumerate_successors(net, state, SwitchConfig{open_lines},
                                  scenario))
          out.append(py::make_tuple(tr.successor, tr.probability));
        return out;
      },
      py::arg("net"), py::arg("state"), py::arg("open_lines"),
      py::arg("scenario"));

  m.def(
      "dispatch_cost",
      [](const Network& net, const MarkovState& state,
         const std::vector<int>& open_lines, double eta, double dt) {
        SwitchConfig action{open_lines};
        auto closed = effective_closed_ids(net, state, action);
        auto c = make_dispatch_case(
            net, energization(net, closed, state.failed_ids()), state.t, eta,
            dt);
        auto [cost, result] = immediate_cost(net, state, action, c);
        py::dict out = json_to_py(result.to_json(net));
        out["total"] = cost;
        return out;
      },
      py::arg("net"), py::arg("state"), py::arg("open_lines"),
      py::arg("eta") = 1000.0, py::arg("dt") = 1.0,
      "Shedding dispatch for one period: solves the linearized-DistFlow LP "
      "and returns per-bus shed, flows, voltages and the cost breakdown.");

  m.def(
      "train",
      [](const Network& net, const Scenario& scenario, int iterations,
         const std::string& epsilon, double exploration,
         std::optional<uint64_t> seed, const std::vector<std::string>& probes,
         double initial_value, CostOracle* oracle) {
        ADPConfig cfg =
            make_config(iterations, epsilon, exploration,
                        seed.value_or(scenario.seed), probes, initial_value);
        TrainResult r = train(net, scenario, cfg, oracle);
        py::list trace;
        for (const auto& row : r.trace)
          trace.append(py::make_tuple(row.iteration, row.probe, row.estimate));
        return py::make_tuple(std::move(r.table), trace);
      },
      py::arg("net"), py::arg("scenario"), py::arg("iterations") = 1500,
      py::arg("epsilon") = "harmonic:1", py::arg("exploration") = 0.25,
      py::arg("seed") = py::none(), py::arg("probes") = std::vector<std::string>{},
      py::arg("initial_value") = 0.0, py::arg("oracle") = nullptr,
      "Forward ADP training pass; returns (value_table, trace).");

  m.def(
      "exact_dp",
      [](const Network& net, const Scenario& scenario, uint64_t state_cap,
         CostOracle* oracle) {
        CostOracle local(net);
        DpResult r =
            exact_dp(net, scenario, oracle ? oracle : &local, state_cap);
        py::dict out;
        out["root_value"] = r.root_value();
        out["state_count"] = r.state_count;
        out["pds_alias_conflict"] = r.pds_alias_conflict;
        py::dict sv;
        for (const auto& [k, v] : r.state_values) sv[py::str(k)] = v;
        out["state_values"] = sv;
        py::dict pv;
        for (const auto& [k, v] : r.pds_values) pv[py::str(k)] = v;
        out["pds_values"] = pv;
        py::dict pol;
        for (const auto& [k, a] : r.policy) pol[py::str(k)] = a.open_lines;
        out["policy"] = pol;
        return out;
      },
      py::arg("net"), py::arg("scenario"),
      py::arg("state_cap") = uint64_t{1000000}, py::arg("oracle") = nullptr,
      "Exact backward induction over the full reachable state space.");

  m.def(
      "evaluate_policy",
      [](const Network& net, const Scenario& scenario, const ValueTable& vt,
         int paths, uint64_t seed, CostOracle* oracle) {
        return json_to_py(
            evaluate_policy(net, scenario, vt, paths, seed, oracle)
                .to_json());
      },
      py::arg("net"), py::arg("scenario"), py::arg("value_table"),
      py::arg("paths") = 500, py::arg("seed") = 1, py::arg("oracle") = nullptr,
      "Monte Carlo evaluation of the greedy policy induced by a value table.");

  m.def(
      "run_case_study",
      [](const std::string& name, const std::string& data_dir,
         const std::string& out_dir, std::optional<int> iterations,
         std::optional<double> failure_rate, std::optional<std::string> epsilon,
         std::optional<double> exploration, std::optional<uint64_t> seed,
         std::optional<double> eta, std::optional<int> eval_paths) {
        CaseOverrides ov;
        ov.iterations = iterations;
        ov.failure_rate = failure_rate;
        if (epsilon) ov.epsilon = EpsilonSpec::parse(*epsilon);
        ov.exploration = exploration;
        ov.seed = seed;
        ov.eta = eta;
        ov.eval_paths = eval_paths;
        CaseStudyResult result = run_case_study(name, ov, data_dir);
        if (!out_dir.empty()) write_case_outputs(result, out_dir);
        py::dict out;
        out["name"] = result.name;
        out["report"] = json_to_py(result.report.to_json());
        out["strategy"] = json_to_py(result.strategy.to_json(result.net));
        py::dict table;
        for (const auto& [pds, entry] : result.training.table.entries())
          table[py::str(pds.encode())] =
              py::make_tuple(entry.value, entry.visits);
        out["values"] = table;
        return out;
      },
      py::arg("name"), py::arg("data_dir"), py::arg("out_dir") = "",
      py::arg("iterations") = py::none(), py::arg("failure_rate") = py::none(),
      py::arg("epsilon") = py::none(), py::arg("exploration") = py::none(),
      py::arg("seed") = py::none(), py::arg("eta") = py::none(),
      py::arg("eval_paths") = py::none(),
      "End-to-end case study: train, extract the strategy table, evaluate "
      "out of sample; optionally write the artifact files.");

  m.def("multilinear_value", &multilinear_value, py::arg("beta"),
        py::arg("b_matrix"), py::arg("values"));

  m.def(
      "mccormick_chain",
      [](const std::vector<int>& beta) {
        auto r = mccormick_chain(beta);
        py::dict out;
        out["y"] = r.y;
        out["product"] = r.product;
        out["max_residual"] = r.max_residual;
        out["feasible"] = r.feasible;
        return out;
      },
      py::arg("beta"));

  m.def(
      "is_radial",
      [](const Network& net, const std::vector<int>& closed,
         const std::vector<int>& failed) {
        return is_radial(net, closed, failed);
      },
      py::arg("net"), py::arg("closed"), py::arg("failed") = std::vector<int>{});
}
