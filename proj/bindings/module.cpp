#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmfbeam/channel.hpp"
#include "mmfbeam/harness.hpp"
#include "mmfbeam/metrics.hpp"

namespace py = pybind11;
using namespace mmfbeam;

namespace {

py::dict record_to_dict(const harness::TrialRecord& r) {
  py::dict d;
  d["trial"] = r.trial;
  d["seed"] = r.seed;
  d["algorithm"] = harness::to_string(r.algo);
  d["min_se"] = r.min_se;
  d["sum_se"] = r.sum_se;
  d["runtime_ms"] = r.runtime_ms;
  d["elim_iters"] = r.elim_iters;
  d["bisect_iters"] = r.bisect_iters;
  d["max_rank_final"] = r.max_rank_final;
  d["status"] = r.status;
  d["t_star"] = r.t_star;
  d["channel_fingerprint"] = r.channel_fingerprint;
  d["group_min_se"] = r.group_min_se;
  d["ap_power"] = r.ap_power;
  return d;
}

void set_algorithms(harness::CampaignSpec& spec, const std::vector<std::string>& names) {
  spec.algorithms.clear();
  for (const auto& n : names) spec.algorithms.push_back(harness::parse_algorithm(n));
}

std::vector<std::string> get_algorithms(const harness::CampaignSpec& spec) {
  std::vector<std::string> out;
  for (auto a : spec.algorithms) out.emplace_back(harness::to_string(a));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cell-free multigroup multicast max-min beamforming simulator";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DomainError>(m, "DomainError");

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("area_side", &ScenarioConfig::area_side)
      .def_readwrite("num_aps", &ScenarioConfig::num_aps)
      .def_readwrite("antennas_per_ap", &ScenarioConfig::antennas_per_ap)
      .def_readwrite("num_groups", &ScenarioConfig::num_groups)
      .def_readwrite("group_sizes", &ScenarioConfig::group_sizes)
      .def_readwrite("max_power_per_ap", &ScenarioConfig::max_power_per_ap)
      .def_readwrite("noise_power", &ScenarioConfig::noise_power)
      .def_readwrite("bandwidth", &ScenarioConfig::bandwidth)
      .def_readwrite("asd_deg", &ScenarioConfig::asd_deg)
      .def_readwrite("sinr_weights", &ScenarioConfig::sinr_weights)
      .def_readwrite("rng_seed", &ScenarioConfig::rng_seed)
      .def("total_ues", &ScenarioConfig::total_ues);

  py::class_<harness::AlgoParams>(m, "AlgoParams")
      .def(py::init<>())
      .def_readwrite("eps", &harness::AlgoParams::eps)
      .def_readwrite("kappa", &harness::AlgoParams::kappa)
      .def_readwrite("zeta", &harness::AlgoParams::zeta)
      .def_readwrite("n_candidates", &harness::AlgoParams::n_candidates)
      .def_readwrite("heuristic_iters", &harness::AlgoParams::heuristic_iters)
      .def_readwrite("emphasis_r", &harness::AlgoParams::emphasis_r)
      .def_readwrite("tol_gap", &harness::AlgoParams::tol_gap)
      .def_readwrite("tol_feas", &harness::AlgoParams::tol_feas)
      .def_readwrite("tol_rank", &harness::AlgoParams::tol_rank)
      .def_readwrite("max_elim", &harness::AlgoParams::max_elim);

  py::class_<harness::CampaignSpec>(m, "CampaignSpec")
      .def(py::init<>())
      .def_readwrite("scenario", &harness::CampaignSpec::scenario)
      .def_readwrite("trials", &harness::CampaignSpec::trials)
      .def_readwrite("threads", &harness::CampaignSpec::threads)
      .def_readwrite("out_dir", &harness::CampaignSpec::out_dir)
      .def_readwrite("params", &harness::CampaignSpec::params)
      .def_property("algorithms", &get_algorithms, &set_algorithms);

  m.def("preset", &harness::preset, py::arg("name"),
        "Built-in campaign: small, mid, paper9x4 or paper4x8");
  m.def("load_config", &harness::load_config, py::arg("path"));

  m.def(
      "run_trial",
      [](const harness::CampaignSpec& spec, int trial) {
        py::list out;
        for (const auto& r : harness::run_trial(spec, trial)) out.append(record_to_dict(r));
        return out;
      },
      py::arg("spec"), py::arg("trial_index"),
      "Run every requested algorithm on one channel realization");

  m.def(
      "run_campaign",
      [](const harness::CampaignSpec& spec) {
        const auto s = harness::run_campaign(spec);
        py::dict d;
        d["records_path"] = s.records_path;
        d["summary_path"] = s.summary_path;
        d["any_failure"] = s.any_failure;
        py::list recs;
        for (const auto& r : s.records) recs.append(record_to_dict(r));
        d["records"] = recs;
        py::dict per_algo;
        for (const auto& a : s.per_algorithm) {
          py::dict e;
          e["records"] = a.records;
          e["failures"] = a.failures;
          e["mean_min_se"] = a.mean_min_se;
          e["p10_min_se"] = a.p10_min_se;
          e["p50_min_se"] = a.p50_min_se;
          e["p90_min_se"] = a.p90_min_se;
          e["mean_runtime_ms"] = a.mean_runtime_ms;
          e["median_runtime_ms"] = a.median_runtime_ms;
          per_algo[harness::to_string(a.algo)] = e;
        }
        d["per_algorithm"] = per_algo;
        return d;
      },
      py::arg("spec"), "Run all trials and write records.csv, summary.txt, CDFs");

  m.def(
      "wrap_distance",
      [](double ax, double ay, double bx, double by, double side) {
        return channel::wrap_distance({ax, ay}, {bx, by}, side);
      },
      py::arg("ax"), py::arg("ay"), py::arg("bx"), py::arg("by"), py::arg("side"));
  m.def("pathloss_db", &channel::pathloss_db, py::arg("d_m"), py::arg("shadow_db"),
        py::arg("const_db") = -30.5, py::arg("slope_db") = 36.7);
  m.def("percentile", &metrics::percentile, py::arg("samples"), py::arg("q"));
  m.def(
      "cdf",
      [](const std::vector<double>& samples) { return metrics::cdf(samples); },
      py::arg("samples"));

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
