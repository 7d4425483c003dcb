// Python surface for the simulation core: resolve a config mapping, execute
// seeded runs, and query the exact small-graph facts used as test oracles.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "drfed/analysis.hpp"
#include "drfed/config.hpp"
#include "drfed/graphs.hpp"
#include "drfed/rewards.hpp"
#include "drfed/simulator.hpp"

#ifndef DRFED_VERSION_STRING
#define DRFED_VERSION_STRING "0.1.0"
#endif

namespace py = pybind11;

namespace {

drfed::KeyValues to_key_values(const py::dict& config) {
  drfed::KeyValues kv;
  for (const auto& item : config) {
    const std::string key = py::cast<std::string>(py::str(item.first));
    kv[key] = py::cast<std::string>(py::str(item.second));
  }
  return kv;
}

py::dict trajectory_to_dict(const drfed::Trajectory& traj) {
  py::dict out;
  out["regret"] = traj.regret_series;
  out["comm_edges"] = traj.comm_series;
  out["a1_deviation"] = traj.a1_dev_series;
  out["min_pull_count"] = traj.min_n_series;
  out["actions"] = traj.actions;
  out["a1_sup"] = traj.event_a.a1_sup_deviation;
  out["a1_holds"] = traj.event_a.a1_holds;
  out["a2_holds"] = traj.event_a.a2_holds;
  out["a3_holds"] = traj.event_a.a3_holds;
  out["weight_residual_max"] = traj.weight_residual_max;
  out["zero_cache_rounds"] = traj.zero_cache_rounds;
  return out;
}

}  // namespace

PYBIND11_MODULE(_drfed, m) {
  m.doc() = "decentralized bandit simulation over random communication graphs";
  m.attr("__version__") = DRFED_VERSION_STRING;

  m.def(
      "run",
      [](const py::dict& config) {
        const drfed::RunSettings settings = drfed::resolve_config(to_key_values(config));
        return trajectory_to_dict(drfed::run_experiment(settings.experiment));
      },
      py::arg("config"),
      "Execute one seeded run from a config mapping; returns the trajectory.");

  m.def(
      "run_baseline",
      [](const py::dict& config) {
        const drfed::RunSettings settings = drfed::resolve_config(to_key_values(config));
        return trajectory_to_dict(drfed::local_ucb_baseline(settings.experiment));
      },
      py::arg("config"),
      "Execute one run of the no-communication baseline from a config mapping.");

  m.def(
      "resolve",
      [](const py::dict& config) {
        const drfed::RunSettings settings = drfed::resolve_config(to_key_values(config));
        py::dict out;
        for (const auto& [key, value] : drfed::canonical_config(settings))
          out[py::str(key)] = value;
        out[py::str("config_hash")] = drfed::config_hash(settings);
        return out;
      },
      py::arg("config"),
      "Validate and normalize a config mapping; returns every key, defaults filled.");

  m.def(
      "build_means",
      [](int clients, int arms, double gap_scale, double base) {
        const drfed::MeanMatrix means =
            drfed::build_heterogeneous_means(clients, arms, gap_scale, base);
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(clients));
        for (int c = 0; c < clients; ++c)
          for (int a = 0; a < arms; ++a) rows[c].push_back(means.at(c, a));
        return rows;
      },
      py::arg("clients"), py::arg("arms"), py::arg("gap_scale"), py::arg("base"),
      "Spread construction for per-client arm means.");

  m.def(
      "pseudo_regret",
      [](const std::vector<std::vector<double>>& means,
         const std::vector<std::vector<int>>& actions) {
        drfed::MeanMatrix mm;
        mm.client_count = static_cast<int>(means.size());
        mm.arm_count = means.empty() ? 0 : static_cast<int>(means[0].size());
        for (const auto& row : means)
          mm.mu.insert(mm.mu.end(), row.begin(), row.end());
        return drfed::pseudo_regret(actions, drfed::global_stats(mm), mm);
      },
      py::arg("means"), py::arg("actions"),
      "Cumulative pseudo-regret series for a recorded action history.");

  m.def(
      "connected_graph_count",
      [](int nodes) { return drfed::enumerate_connected(nodes).size(); },
      py::arg("nodes"), "Exact count of connected labelled graphs (nodes <= 5).");

  m.def("edge_presence_fraction", &drfed::edge_presence_fraction, py::arg("nodes"),
        "Exact edge-presence probability under the uniform connected law.");

  m.def(
      "burn_in_length_bound",
      [](const std::string& setting, std::int64_t horizon, int arms, double delta,
         double epsilon, double c0, double spectral_gap, double min_transition,
         int clients) {
        drfed::BoundSetting s;
        if (setting == "s1")
          s = drfed::BoundSetting::s1;
        else if (setting == "s2")
          s = drfed::BoundSetting::s2;
        else if (setting == "s3")
          s = drfed::BoundSetting::s3;
        else
          throw std::invalid_argument("setting must be one of 's1', 's2', 's3'");
        return drfed::burn_in_length_bound(s, horizon, arms, delta, epsilon, c0,
                                           spectral_gap, min_transition, clients);
      },
      py::arg("setting"), py::arg("horizon"), py::arg("arms"), py::arg("delta"),
      py::arg("epsilon"), py::arg("c0"), py::arg("spectral_gap") = 0.5,
      py::arg("min_transition") = 0.5, py::arg("clients") = 2,
      "Advisory burn-in length from the setting-specific closed forms.");

  m.def(
      "aggregate",
      [](const std::vector<std::vector<double>>& series) {
        const drfed::AggregateSeries agg = drfed::aggregate(series);
        py::dict out;
        out["mean"] = agg.mean;
        out["half_width"] = agg.half_width;
        return out;
      },
      py::arg("series"), "Pointwise mean and normal 95% CI half-width across runs.");
}
