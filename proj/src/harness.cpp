#include "mmfbeam/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "mmfbeam/channel.hpp"
#include "mmfbeam/heuristic.hpp"
#include "mmfbeam/metrics.hpp"
#include "mmfbeam/mmf_sdr.hpp"

namespace mmfbeam::harness {

namespace fs = std::filesystem;

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Sea: return "sea";
    case Algorithm::SdrUpper: return "sdr_upper";
    case Algorithm::SdrD: return "sdr_d";
    case Algorithm::SdrG: return "sdr_g";
    case Algorithm::Heuristic: return "heuristic";
    case Algorithm::Unicast: return "unicast";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "sea") return Algorithm::Sea;
  if (name == "sdr_upper") return Algorithm::SdrUpper;
  if (name == "sdr_d") return Algorithm::SdrD;
  if (name == "sdr_g") return Algorithm::SdrG;
  if (name == "heuristic") return Algorithm::Heuristic;
  if (name == "unicast") return Algorithm::Unicast;
  throw ConfigError("unknown algorithm: " + name);
}

void CampaignSpec::validate() const {
  scenario.validate();
  if (trials < 1) throw ConfigError("campaign: trials must be >= 1");
  if (algorithms.empty()) throw ConfigError("campaign: algorithm set is empty");
  if (threads < 1) throw ConfigError("campaign: threads must be >= 1");
}

CampaignSpec preset(const std::string& name) {
  CampaignSpec spec;
  ScenarioConfig& sc = spec.scenario;
  if (name == "small") {
    sc.num_aps = 4;
    sc.antennas_per_ap = 2;
    sc.num_groups = 2;
    sc.group_sizes = {3, 3};
    sc.max_power_per_ap = 1.0;
    spec.trials = 20;
  } else if (name == "mid") {
    sc.num_aps = 4;
    sc.antennas_per_ap = 4;
    sc.num_groups = 2;
    sc.group_sizes = {4, 4};
    sc.max_power_per_ap = 1.0;
    spec.trials = 50;
  } else if (name == "paper9x4") {
    sc.num_aps = 9;
    sc.antennas_per_ap = 4;
    sc.num_groups = 3;
    sc.group_sizes = {10, 10, 10};
    sc.max_power_per_ap = 1.0;
    spec.trials = 100;
  } else if (name == "paper4x8") {
    sc.num_aps = 4;
    sc.antennas_per_ap = 8;
    sc.num_groups = 3;
    sc.group_sizes = {10, 10, 10};
    sc.max_power_per_ap = 2.0;
    spec.trials = 100;
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  spec.algorithms = {Algorithm::Sea,      Algorithm::SdrUpper, Algorithm::SdrD,
                     Algorithm::SdrG,     Algorithm::Heuristic, Algorithm::Unicast};
  return spec;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + key + ": " + v);
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for " + key + ": " + v);
  }
}

}  // namespace

CampaignSpec parse_config(std::istream& is) {
  CampaignSpec spec;
  spec.algorithms.clear();
  std::string line, section;
  int lineno = 0;
  bool noise_set_dbm = false;
  while (std::getline(is, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: malformed section at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key=value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    ScenarioConfig& sc = spec.scenario;
    AlgoParams& pp = spec.params;
    if (section == "scenario") {
      if (key == "area_side_m") sc.area_side = to_double(key, val);
      else if (key == "num_aps") sc.num_aps = static_cast<int>(to_int(key, val));
      else if (key == "antennas_per_ap") sc.antennas_per_ap = static_cast<int>(to_int(key, val));
      else if (key == "num_groups") sc.num_groups = static_cast<int>(to_int(key, val));
      else if (key == "group_sizes") {
        sc.group_sizes.clear();
        for (const auto& t : split_list(val))
          sc.group_sizes.push_back(static_cast<int>(to_int(key, t)));
      } else if (key == "ues_per_group") {
        sc.group_sizes.assign(static_cast<size_t>(std::max(sc.num_groups, 1)),
                              static_cast<int>(to_int(key, val)));
      } else if (key == "max_power_per_ap_w") sc.max_power_per_ap = to_double(key, val);
      else if (key == "noise_dbm") { sc.noise_power = dbm_to_watt(to_double(key, val)); noise_set_dbm = true; }
      else if (key == "bandwidth_hz") sc.bandwidth = to_double(key, val);
      else if (key == "pathloss_const_db") sc.pathloss_const_db = to_double(key, val);
      else if (key == "pathloss_slope_db") sc.pathloss_slope_db = to_double(key, val);
      else if (key == "shadow_std_db") sc.shadow_std_db = to_double(key, val);
      else if (key == "shadow_decorr_m") sc.shadow_decorr_m = to_double(key, val);
      else if (key == "asd_deg") sc.asd_deg = to_double(key, val);
      else if (key == "min_dist_m") sc.min_dist_m = to_double(key, val);
      else if (key == "sinr_weights") {
        sc.sinr_weights.clear();
        for (const auto& t : split_list(val)) sc.sinr_weights.push_back(to_double(key, t));
      } else if (key == "rng_seed") sc.rng_seed = static_cast<std::uint64_t>(to_int(key, val));
      else throw ConfigError("config: unknown scenario key: " + key);
    } else if (section == "algorithms") {
      if (key == "run") {
        for (const auto& t : split_list(val)) spec.algorithms.push_back(parse_algorithm(t));
      } else throw ConfigError("config: unknown algorithms key: " + key);
    } else if (section == "params") {
      if (key == "trials") spec.trials = static_cast<int>(to_int(key, val));
      else if (key == "threads") spec.threads = static_cast<int>(to_int(key, val));
      else if (key == "out") spec.out_dir = val;
      else if (key == "epsilon") pp.eps = to_double(key, val);
      else if (key == "kappa") pp.kappa = to_double(key, val);
      else if (key == "zeta") pp.zeta = to_double(key, val);
      else if (key == "n_candidates") pp.n_candidates = static_cast<int>(to_int(key, val));
      else if (key == "heuristic_iters") pp.heuristic_iters = static_cast<int>(to_int(key, val));
      else if (key == "emphasis_r") pp.emphasis_r = to_double(key, val);
      else if (key == "heuristic_reg_normalized")
        pp.heuristic_reg_normalized = to_int(key, val) != 0;
      else if (key == "tol_gap") pp.tol_gap = to_double(key, val);
      else if (key == "tol_feas") pp.tol_feas = to_double(key, val);
      else if (key == "tol_rank") pp.tol_rank = to_double(key, val);
      else if (key == "max_elim") pp.max_elim = static_cast<int>(to_int(key, val));
      else if (key == "solver_max_iter") pp.solver_max_iter = static_cast<int>(to_int(key, val));
      else throw ConfigError("config: unknown params key: " + key);
    } else {
      throw ConfigError("config: key outside a known section at line " +
                        std::to_string(lineno));
    }
  }
  (void)noise_set_dbm;
  if (spec.algorithms.empty())
    spec.algorithms = {Algorithm::Sea, Algorithm::Heuristic, Algorithm::Unicast};
  return spec;
}

CampaignSpec load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file: " + path);
  return parse_config(f);
}

namespace {

mmf::MmfOptions mmf_options(const AlgoParams& p) {
  mmf::MmfOptions o;
  o.eps = p.eps;
  o.kappa = p.kappa;
  o.zeta = p.zeta;
  o.tol_rank = p.tol_rank;
  o.max_elim = p.max_elim;
  o.n_candidates = p.n_candidates;
  o.solver.tol_gap = p.tol_gap;
  o.solver.tol_feas = p.tol_feas;
  o.solver.max_iter = p.solver_max_iter;
  return o;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

std::vector<TrialRecord> run_trial(const CampaignSpec& spec, int trial_index) {
  spec.validate();
  const std::uint64_t seed =
      spec.scenario.rng_seed ^ static_cast<std::uint64_t>(trial_index);
  Rng rng(seed);
  const ChannelSet cs = channel::generate(spec.scenario, rng);
  const std::uint64_t fp = cs.fingerprint();
  const std::vector<double> eta = spec.scenario.weights();
  const Eigen::VectorXd p_max =
      Eigen::VectorXd::Constant(cs.num_aps, spec.scenario.max_power_per_ap);
  const mmf::MmfOptions opts = mmf_options(spec.params);

  // one relaxed bisection shared by sdr_upper, sdr_d, sdr_g and the SEA
  const bool needs_relaxed =
      std::any_of(spec.algorithms.begin(), spec.algorithms.end(), [](Algorithm a) {
        return a == Algorithm::Sea || a == Algorithm::SdrUpper ||
               a == Algorithm::SdrD || a == Algorithm::SdrG;
      });
  std::optional<mmf::BisectResult> relaxed;
  double relaxed_ms = 0.0;
  std::string relaxed_error;
  if (needs_relaxed) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      relaxed = mmf::bisect_mmf(cs, eta, p_max, opts.eps, {}, opts.solver);
    } catch (const std::exception& e) {
      relaxed_error = e.what();
    }
    relaxed_ms = elapsed_ms(t0);
  }

  std::vector<TrialRecord> records;
  for (Algorithm algo : spec.algorithms) {
    TrialRecord rec;
    rec.trial = trial_index;
    rec.seed = seed;
    rec.algo = algo;
    rec.channel_fingerprint = fp;
    if (relaxed) rec.relaxed_gamma = relaxed->gamma_star;

    const bool uses_relaxed = algo == Algorithm::Sea || algo == Algorithm::SdrUpper ||
                              algo == Algorithm::SdrD || algo == Algorithm::SdrG;
    if (uses_relaxed && !relaxed) {
      rec.status = "relaxed_failed: " + relaxed_error;
      records.push_back(std::move(rec));
      continue;
    }

    try {
      switch (algo) {
        case Algorithm::Sea: {
          mmf::MMFResult r = mmf::sea(cs, eta, p_max, opts, &*relaxed);
          rec.min_se = r.min_se;
          rec.sum_se = r.sum_se;
          rec.runtime_ms = r.runtime_ms + relaxed_ms;
          rec.elim_iters = r.elim_iters;
          rec.bisect_iters = r.bisect_iters;
          rec.max_rank_final = r.max_rank_final;
          rec.t_star = r.t_star;
          rec.group_min_se = r.group_min_se;
          rec.ap_power.assign(r.ap_power.data(), r.ap_power.data() + r.ap_power.size());
          break;
        }
        case Algorithm::SdrUpper: {
          const Eigen::VectorXd s =
              metrics::sinr_trace(cs, relaxed->W, cs.noise_power);
          const Eigen::VectorXd se = metrics::se(s);
          rec.min_se = se.minCoeff();
          rec.sum_se = se.sum();
          rec.runtime_ms = relaxed_ms;
          rec.bisect_iters = static_cast<int>(relaxed->trace.size());
          rec.t_star = relaxed->gamma_star;
          int mr = 0;
          for (const auto& W : relaxed->W)
            mr = std::max(mr, conic::numerical_rank(W, opts.tol_rank));
          rec.max_rank_final = mr;
          const Eigen::VectorXd ap =
              metrics::per_ap_power_trace(relaxed->W, cs.num_aps, cs.antennas_per_ap);
          rec.ap_power.assign(ap.data(), ap.data() + ap.size());
          break;
        }
        case Algorithm::SdrD: {
          mmf::MMFResult r = mmf::sdr_dominant(relaxed->W, cs, eta, p_max, opts);
          rec.min_se = r.min_se;
          rec.sum_se = r.sum_se;
          rec.runtime_ms = r.runtime_ms + relaxed_ms;
          rec.bisect_iters = r.bisect_iters;
          rec.max_rank_final = r.max_rank_final;
          rec.t_star = r.t_star;
          rec.group_min_se = r.group_min_se;
          rec.ap_power.assign(r.ap_power.data(), r.ap_power.data() + r.ap_power.size());
          break;
        }
        case Algorithm::SdrG: {
          Rng grng(Rng::mix(seed, 0x5d9u));
          mmf::MMFResult r = mmf::sdr_randomize(relaxed->W, cs, eta, p_max,
                                                opts.n_candidates, grng, opts);
          rec.min_se = r.min_se;
          rec.sum_se = r.sum_se;
          rec.runtime_ms = r.runtime_ms + relaxed_ms;
          rec.bisect_iters = r.bisect_iters;
          rec.max_rank_final = r.max_rank_final;
          rec.t_star = r.t_star;
          rec.group_min_se = r.group_min_se;
          rec.ap_power.assign(r.ap_power.data(), r.ap_power.data() + r.ap_power.size());
          break;
        }
        case Algorithm::Heuristic: {
          const auto t0 = std::chrono::steady_clock::now();
          heuristic::HeuristicParams hp;
          hp.iters = spec.params.heuristic_iters;
          hp.emphasis = spec.params.emphasis_r;
          hp.normalize_regularizer = spec.params.heuristic_reg_normalized;
          const auto w_uni =
              heuristic::rzf_unicast(cs, spec.scenario.max_power_per_ap, cs.noise_power);
          const auto uni = heuristic::unicast_maxmin_power(
              cs, w_uni, spec.scenario.max_power_per_ap, spec.params.eps,
              opts.solver);
          const auto pa = heuristic::phase_align(cs, hp, uni,
                                                 spec.scenario.max_power_per_ap,
                                                 cs.noise_power);
          rec.runtime_ms = elapsed_ms(t0);
          const metrics::TrialMetrics tm = metrics::evaluate(cs, pa.w, cs.noise_power);
          rec.min_se = tm.min_se;
          rec.sum_se = tm.sum_se;
          rec.t_star = metrics::min_weighted_sinr(tm.ue_sinr, eta, cs.group_of_ue);
          rec.max_rank_final = 1;
          rec.group_min_se = tm.group_min_se;
          rec.ap_power.assign(tm.ap_power.data(), tm.ap_power.data() + tm.ap_power.size());
          break;
        }
        case Algorithm::Unicast: {
          const auto t0 = std::chrono::steady_clock::now();
          const auto w_uni =
              heuristic::rzf_unicast(cs, spec.scenario.max_power_per_ap, cs.noise_power);
          const auto uni = heuristic::unicast_maxmin_power(
              cs, w_uni, spec.scenario.max_power_per_ap, spec.params.eps,
              opts.solver);
          rec.runtime_ms = elapsed_ms(t0);
          const Eigen::VectorXd se = metrics::se(uni.ue_sinr);
          rec.min_se = se.minCoeff();
          rec.sum_se = se.sum();
          rec.t_star = uni.target;
          rec.bisect_iters = uni.solves;
          rec.max_rank_final = 1;
          rec.ap_power.assign(uni.ap_power.data(),
                              uni.ap_power.data() + uni.ap_power.size());
          break;
        }
      }
    } catch (const std::exception& e) {
      rec.status = std::string("failed: ") + e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_csv(const std::vector<TrialRecord>& records, std::ostream& os) {
  os << "trial,seed,algorithm,min_se,sum_se,runtime_ms,elim_iters,bisect_iters,"
        "max_rank_final,status\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.3f", r.min_se, r.sum_se,
                  r.runtime_ms);
    os << r.trial << ',' << r.seed << ',' << to_string(r.algo) << ',' << buf << ','
       << r.elim_iters << ',' << r.bisect_iters << ',' << r.max_rank_final << ','
       << r.status << '\n';
  }
}

std::vector<std::string> emit_plotdata(const std::vector<TrialRecord>& records,
                                       const std::string& out_dir) {
  std::map<Algorithm, std::vector<double>> by_algo;
  for (const auto& r : records)
    if (r.status == "ok") by_algo[r.algo].push_back(r.min_se);

  std::vector<std::string> paths;
  for (const auto& [algo, samples] : by_algo) {
    if (samples.empty()) {
      std::cerr << "emit_plotdata: no records for " << to_string(algo) << ", skipped\n";
      continue;
    }
    const auto points = metrics::cdf(samples);
    const fs::path p = fs::path(out_dir) / (std::string("cdf_") + to_string(algo) + ".txt");
    std::ofstream f(p);
    if (!f) throw IoError("cannot write " + p.string());
    char buf[80];
    for (const auto& [v, q] : points) {
      std::snprintf(buf, sizeof(buf), "%.9g %.9g\n", v, q);
      f << buf;
    }
    paths.push_back(p.string());
  }
  return paths;
}

CampaignSummary run_campaign(const CampaignSpec& spec) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(spec.out_dir, ec);
  {
    // fail before any compute if the destination is not writable
    const fs::path probe = fs::path(spec.out_dir) / ".write_probe";
    std::ofstream f(probe);
    if (!f) throw IoError("output directory not writable: " + spec.out_dir);
    f.close();
    fs::remove(probe, ec);
  }

  std::vector<std::vector<TrialRecord>> per_trial(static_cast<size_t>(spec.trials));
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::string first_error;
  auto worker = [&]() {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= spec.trials) return;
      try {
        per_trial[static_cast<size_t>(t)] = run_trial(spec, t);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error.empty()) first_error = e.what();
      }
    }
  };
  const int nthreads = std::min(spec.threads, spec.trials);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!first_error.empty()) throw std::runtime_error("run_campaign: " + first_error);

  CampaignSummary out;
  for (auto& recs : per_trial)
    out.records.insert(out.records.end(), recs.begin(), recs.end());

  const fs::path csv_path = fs::path(spec.out_dir) / "records.csv";
  {
    std::ofstream f(csv_path);
    if (!f) throw IoError("cannot write " + csv_path.string());
    write_csv(out.records, f);
  }
  out.records_path = csv_path.string();
  emit_plotdata(out.records, spec.out_dir);

  // trial log: channel fingerprint and shared relaxed objective per trial
  {
    std::ofstream f(fs::path(spec.out_dir) / "campaign.log");
    for (const auto& r : out.records) {
      f << "trial=" << r.trial << " algo=" << to_string(r.algo) << " fingerprint="
        << std::hex << r.channel_fingerprint << std::dec;
      if (!std::isnan(r.relaxed_gamma)) f << " relaxed_gamma=" << r.relaxed_gamma;
      f << " status=" << r.status << '\n';
    }
  }

  for (Algorithm algo : spec.algorithms) {
    AlgorithmSummary s;
    s.algo = algo;
    std::vector<double> min_se, rt;
    for (const auto& r : out.records) {
      if (r.algo != algo) continue;
      ++s.records;
      if (r.status != "ok") {
        ++s.failures;
        out.any_failure = true;
        continue;
      }
      min_se.push_back(r.min_se);
      rt.push_back(r.runtime_ms);
    }
    if (!min_se.empty()) {
      s.mean_min_se = std::accumulate(min_se.begin(), min_se.end(), 0.0) /
                      static_cast<double>(min_se.size());
      s.p10_min_se = metrics::percentile(min_se, 10.0);
      s.p50_min_se = metrics::percentile(min_se, 50.0);
      s.p90_min_se = metrics::percentile(min_se, 90.0);
      s.mean_runtime_ms = std::accumulate(rt.begin(), rt.end(), 0.0) /
                          static_cast<double>(rt.size());
      s.median_runtime_ms = metrics::percentile(rt, 50.0);
    }
    out.per_algorithm.push_back(s);
  }

  const fs::path sum_path = fs::path(spec.out_dir) / "summary.txt";
  {
    std::ofstream f(sum_path);
    if (!f) throw IoError("cannot write " + sum_path.string());
    f << "algorithm records failures mean_min_se p10 p50 p90 mean_runtime_ms "
         "median_runtime_ms\n";
    char buf[240];
    for (const auto& s : out.per_algorithm) {
      std::snprintf(buf, sizeof(buf), "%s %d %d %.6g %.6g %.6g %.6g %.6g %.6g\n",
                    to_string(s.algo), s.records, s.failures, s.mean_min_se,
                    s.p10_min_se, s.p50_min_se, s.p90_min_se, s.mean_runtime_ms,
                    s.median_runtime_ms);
      f << buf;
    }
  }
  out.summary_path = sum_path.string();
  return out;
}

}  // namespace mmfbeam::harness
