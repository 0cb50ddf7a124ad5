#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmfbeam/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cell-free multigroup multicast max-min beamforming simulator"};

  std::string config_path, preset_name, algorithms_csv, out_dir;
  int trials = -1, threads = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;

  app.add_option("--config", config_path, "campaign config file (ini sections)");
  app.add_option("--preset", preset_name, "built-in scenario")
      ->check(CLI::IsMember({"small", "paper9x4", "paper4x8"}));
  app.add_option("--algorithms", algorithms_csv,
                 "comma list from {sea,sdr_upper,sdr_d,sdr_g,heuristic,unicast}");
  app.add_option("--trials", trials, "number of Monte Carlo trials");
  app.add_option("--seed", seed, "base RNG seed")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads for trials");

  CLI11_PARSE(app, argc, argv);

  try {
    mmfbeam::harness::CampaignSpec spec;
    if (!config_path.empty() && !preset_name.empty())
      throw mmfbeam::ConfigError("--config and --preset are mutually exclusive");
    if (!config_path.empty()) {
      spec = mmfbeam::harness::load_config(config_path);
    } else if (!preset_name.empty()) {
      spec = mmfbeam::harness::preset(preset_name);
    } else {
      throw mmfbeam::ConfigError("one of --config or --preset is required");
    }

    if (!algorithms_csv.empty()) {
      spec.algorithms.clear();
      std::string cur;
      for (char c : algorithms_csv + ",") {
        if (c == ',') {
          if (!cur.empty()) spec.algorithms.push_back(mmfbeam::harness::parse_algorithm(cur));
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
    }
    if (trials > 0) spec.trials = trials;
    if (threads > 0) spec.threads = threads;
    if (seed_set) spec.scenario.rng_seed = seed;
    if (!out_dir.empty()) spec.out_dir = out_dir;

    const auto summary = mmfbeam::harness::run_campaign(spec);
    std::cout << "records: " << summary.records_path << "\n"
              << "summary: " << summary.summary_path << "\n";
    for (const auto& s : summary.per_algorithm)
      std::cout << mmfbeam::harness::to_string(s.algo) << ": mean min-SE "
                << s.mean_min_se << " bit/s/Hz, median runtime "
                << s.median_runtime_ms << " ms, failures " << s.failures << "/"
                << s.records << "\n";
    return summary.any_failure ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
