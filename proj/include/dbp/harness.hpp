/**
 * Copyright 2026 The DBP Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Monte-Carlo bit-error-rate sweeps, CSV output and performance/complexity
// trade-off reports.
//
// SNR convention: unit-variance channel entries and Es = 1, so the average
// receive SNR per antenna is U Es / No and a grid point snr_db maps to
// No = U Es 10^(-snr_db / 10). The same mapping is used for the downlink.
//
// Each (trial, subcarrier) draws one channel that stays fixed for n_sym
// symbol vectors (one coherence block). All subcarriers and symbols of a
// trial are detected in a single decentralized run, so every consensus round
// carries U * n_sc * n_sym entries per cluster.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "dbp/beamform.hpp"
#include "dbp/channel.hpp"
#include "dbp/complexity.hpp"
#include "dbp/detect.hpp"
#include "dbp/error.hpp"
#include "dbp/modem.hpp"
#include "dbp/rng.hpp"
#include "dbp/runtime.hpp"

namespace dbp {

enum class Csi { perfect, estimated };

struct SystemConfig {
  std::size_t users = 16;
  std::size_t clusters = 8;
  std::size_t antennas_per_cluster = 8;
  Modulation modulation = Modulation::qam16;
  double es = 1.0;
  std::vector<double> snr_db = {0.0, 5.0, 10.0, 15.0, 20.0};
  std::size_t trials = 100;
  std::size_t n_sc = 1;
  std::size_t n_sym = 1;
  /// Uplink: mmse, zf, admm-mmse, admm-zf, admm-box, cg. Downlink: zf, admm.
  std::vector<std::string> algorithms;
  std::vector<std::size_t> iterations = {1, 2, 3};
  AdmmParams admm;
  BfParams bf;
  std::optional<double> box_radius;  ///< defaults to the constellation's radius
  std::uint64_t seed = 1;
  Csi csi = Csi::perfect;
  std::size_t workers = 1;  ///< runtime worker threads per decentralized run
  std::size_t threads = 1;  ///< trials processed in parallel

  std::size_t antennas() const noexcept { return clusters * antennas_per_cluster; }

  void validate() const {
    if (users < 1 || clusters < 1 || antennas_per_cluster < 1) throw ConfigError("users, clusters and antennas per cluster must be >= 1");
    if (users > antennas()) {
      throw ConfigError("U=" + std::to_string(users) + " exceeds B=" + std::to_string(antennas()));
    }
    if (snr_db.empty()) throw ConfigError("SNR grid is empty");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (es != 1.0) throw ConfigError("only Es = 1 is supported");
    for (std::size_t t : iterations) {
      if (t < 1) throw ConfigError("iteration counts must be >= 1");
    }
    if (!(admm.rho > 0.0) || !(admm.gamma > 0.0)) throw ConfigError("admm rho and gamma must be positive");
    if (!(bf.rho > 0.0) || !(bf.gamma > 0.0) || bf.epsilon < 0.0) throw ConfigError("invalid beamforming parameters");
    if (threads < 1) throw ConfigError("threads must be >= 1");
  }
};

inline double noise_variance(double snr_db, std::size_t users, double es = 1.0) {
  return static_cast<double>(users) * es * std::pow(10.0, -snr_db / 10.0);
}

struct BerRow {
  double snr_db = 0.0;
  std::string algorithm;
  std::size_t iterations = 0;
  std::size_t bits_total = 0;
  std::size_t bit_errors = 0;
  double ber = 0.0;
  std::size_t consensus_rounds = 0;
  std::size_t consensus_bytes = 0;

  friend bool operator==(const BerRow&, const BerRow&) = default;
};

// ---------------------------------------------------------------------------
// Configuration file
// ---------------------------------------------------------------------------

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<std::string_view> known,
                           std::string_view where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
void read_if(const nlohmann::json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace detail

/// Applies a JSON config document on top of `cfg`.
///
/// Layout (every section and key optional):
///   { "system": {users, clusters, antennas_per_cluster, modulation},
///     "sweep": {snr_db, trials, subcarriers, symbols, seed, csi, workers, threads},
///     "algorithms": [...], "iterations": [...],
///     "admm": {rho, gamma, box_radius}, "beamforming": {rho, gamma, epsilon} }
inline void apply_config_json(const nlohmann::json& doc, SystemConfig& cfg) {
  try {
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    detail::reject_unknown(doc, {"system", "sweep", "algorithms", "iterations", "admm", "beamforming"}, "config");
    if (doc.contains("system")) {
      const auto& s = doc.at("system");
      detail::reject_unknown(s, {"users", "clusters", "antennas_per_cluster", "modulation"}, "system");
      detail::read_if(s, "users", cfg.users);
      detail::read_if(s, "clusters", cfg.clusters);
      detail::read_if(s, "antennas_per_cluster", cfg.antennas_per_cluster);
      if (s.contains("modulation")) cfg.modulation = parse_modulation(s.at("modulation").get<std::string>());
    }
    if (doc.contains("sweep")) {
      const auto& s = doc.at("sweep");
      detail::reject_unknown(s, {"snr_db", "trials", "subcarriers", "symbols", "seed", "csi", "workers", "threads"},
                             "sweep");
      detail::read_if(s, "snr_db", cfg.snr_db);
      detail::read_if(s, "trials", cfg.trials);
      detail::read_if(s, "subcarriers", cfg.n_sc);
      detail::read_if(s, "symbols", cfg.n_sym);
      detail::read_if(s, "seed", cfg.seed);
      detail::read_if(s, "workers", cfg.workers);
      detail::read_if(s, "threads", cfg.threads);
      if (s.contains("csi")) {
        const auto v = s.at("csi").get<std::string>();
        if (v == "perfect") cfg.csi = Csi::perfect;
        else if (v == "estimated") cfg.csi = Csi::estimated;
        else throw ConfigError("csi must be 'perfect' or 'estimated'");
      }
    }
    detail::read_if(doc, "algorithms", cfg.algorithms);
    detail::read_if(doc, "iterations", cfg.iterations);
    if (doc.contains("admm")) {
      const auto& a = doc.at("admm");
      detail::reject_unknown(a, {"rho", "gamma", "box_radius"}, "admm");
      detail::read_if(a, "rho", cfg.admm.rho);
      detail::read_if(a, "gamma", cfg.admm.gamma);
      if (a.contains("box_radius")) cfg.box_radius = a.at("box_radius").get<double>();
    }
    if (doc.contains("beamforming")) {
      const auto& b = doc.at("beamforming");
      detail::reject_unknown(b, {"rho", "gamma", "epsilon"}, "beamforming");
      detail::read_if(b, "rho", cfg.bf.rho);
      detail::read_if(b, "gamma", cfg.bf.gamma);
      detail::read_if(b, "epsilon", cfg.bf.epsilon);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline SystemConfig load_config(const std::string& path, SystemConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  apply_config_json(doc, base);
  return base;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

namespace detail {

struct AlgoRun {
  std::string name;
  std::size_t iterations = 0;  ///< 0 for centralized baselines
};

inline std::vector<AlgoRun> expand_algorithms(const std::vector<std::string>& names,
                                              const std::vector<std::size_t>& iterations,
                                              std::initializer_list<std::string_view> centralized,
                                              std::initializer_list<std::string_view> iterative) {
  std::vector<AlgoRun> runs;
  for (const std::string& n : names) {
    if (std::find(centralized.begin(), centralized.end(), n) != centralized.end()) {
      runs.push_back({n, 0});
    } else if (std::find(iterative.begin(), iterative.end(), n) != iterative.end()) {
      for (std::size_t t : iterations) runs.push_back({n, t});
    } else {
      throw ConfigError("unknown algorithm '" + n + "'");
    }
  }
  return runs;
}

struct Tally {
  std::size_t errors = 0;
  std::size_t bits = 0;
  ConsensusRecord traffic;
};

/// Runs trial_fn(trial) for every trial on `threads` threads; trial_fn
/// returns one Tally per algorithm run. Tallies are merged in trial order.
template <typename F>
std::vector<Tally> run_trials(std::size_t trials, std::size_t threads, std::size_t n_runs, F&& trial_fn) {
  std::vector<std::vector<Tally>> per_trial(trials);
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&](std::size_t k) {
    for (std::size_t t = k; t < trials; t += threads) {
      try {
        per_trial[t] = trial_fn(t);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, trials);
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker, k);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);
  std::vector<Tally> total(n_runs);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t r = 0; r < n_runs; ++r) {
      total[r].errors += per_trial[t][r].errors;
      total[r].bits += per_trial[t][r].bits;
      if (t == 0) total[r].traffic = per_trial[t][r].traffic;
    }
  }
  return total;
}

inline Bits random_bits(std::size_t n, std::uint64_t seed) {
  Engine eng(seed);
  Bits b(n);
  for (auto& v : b) v = static_cast<std::uint8_t>(eng() >> 63);
  return b;
}

inline CVec unit_noise(std::size_t n, std::uint64_t seed) {
  Engine eng(seed);
  ComplexNormal cn(1.0);
  CVec v(n);
  for (auto& x : v) x = cn(eng);
  return v;
}

inline void sort_rows(std::vector<BerRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const BerRow& a, const BerRow& b) {
    return std::tie(a.snr_db, a.algorithm, a.iterations) < std::tie(b.snr_db, b.algorithm, b.iterations);
  });
}

inline BerRow make_row(double snr, const AlgoRun& run, const Tally& t) {
  BerRow r;
  r.snr_db = snr;
  r.algorithm = run.name;
  r.iterations = run.iterations;
  r.bits_total = t.bits;
  r.bit_errors = t.errors;
  r.ber = t.bits == 0 ? 0.0 : static_cast<double>(t.errors) / static_cast<double>(t.bits);
  r.consensus_rounds = t.traffic.rounds;
  r.consensus_bytes = t.traffic.bytes_total;
  return r;
}

}  // namespace detail

inline std::vector<std::string> default_uplink_algorithms() { return {"mmse", "admm-mmse", "cg"}; }
inline std::vector<std::string> default_downlink_algorithms() { return {"zf", "admm"}; }

/// Uplink BER sweep: y = H s + n per coherence block, detected by every
/// selected algorithm on identical channel, data and noise draws.
inline std::vector<BerRow> run_uplink_sweep(const SystemConfig& cfg) {
  cfg.validate();
  if (cfg.n_sc == 0 || cfg.n_sym == 0) return {};
  const auto names = cfg.algorithms.empty() ? default_uplink_algorithms() : cfg.algorithms;
  const auto runs = detail::expand_algorithms(names, cfg.iterations, {"mmse", "zf"},
                                              {"admm-mmse", "admm-zf", "admm-box", "cg"});
  const Constellation cons(cfg.modulation);
  const std::size_t u = cfg.users;
  const std::size_t b = cfg.antennas();
  const std::size_t q = cons.bits_per_symbol();

  std::vector<BerRow> rows;
  for (const double snr : cfg.snr_db) {
    const double no = noise_variance(snr, u, cfg.es);
    const double sigma = std::sqrt(no);
    auto trial_fn = [&](std::size_t trial) {
      std::vector<ClusteredChannel> estimates;
      std::vector<CMat> truth;
      estimates.reserve(cfg.n_sc);
      for (std::size_t sc = 0; sc < cfg.n_sc; ++sc) {
        CMat h = generate(u, b, stream_seed(cfg.seed, Stream::channel, trial, sc)).h;
        ClusteredChannel clusters = partition(h, cfg.clusters);
        estimates.push_back(cfg.csi == Csi::estimated
                                ? estimate_clusters(clusters, no, cfg.es, cfg.seed, trial, sc)
                                : std::move(clusters));
        truth.push_back(std::move(h));
      }
      std::vector<Bits> tx_bits;
      std::vector<UplinkProblem> problems;
      std::vector<std::size_t> problem_sc;
      for (std::size_t sc = 0; sc < cfg.n_sc; ++sc) {
        for (std::size_t sym = 0; sym < cfg.n_sym; ++sym) {
          Bits bits = detail::random_bits(u * q, stream_seed(cfg.seed, Stream::bits, trial, sc, sym));
          const CVec s = cons.map(bits);
          CVec y = matvec(truth[sc], s);
          const CVec n = detail::unit_noise(b, stream_seed(cfg.seed, Stream::noise, trial, sc, sym));
          for (std::size_t i = 0; i < b; ++i) y[i] += sigma * n[i];
          UplinkProblem p{&estimates[sc], {}};
          const std::size_t sp = cfg.antennas_per_cluster;
          for (std::size_t c = 0; c < cfg.clusters; ++c) p.y_parts.emplace_back(y.begin() + c * sp, y.begin() + (c + 1) * sp);
          problems.push_back(std::move(p));
          problem_sc.push_back(sc);
          tx_bits.push_back(std::move(bits));
        }
      }

      std::vector<detail::Tally> tallies(runs.size());
      for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& run = runs[r];
        std::vector<CVec> xhat;
        ConsensusRuntime rt(cfg.clusters, {cfg.workers});
        if (run.name == "mmse" || run.name == "zf") {
          const double reg = run.name == "mmse" ? no : 0.0;
          std::vector<CMat> full;
          for (const auto& e : estimates) full.push_back(e.stacked());
          for (std::size_t k = 0; k < problems.size(); ++k) {
            xhat.push_back(mmse_centralized(full[problem_sc[k]], stack(problems[k].y_parts), reg, cfg.es));
          }
        } else if (run.name == "cg") {
          xhat = cg_detect_batch(problems, no / cfg.es, run.iterations, rt);
        } else {
          AdmmParams p = cfg.admm;
          p.t_max = run.iterations;
          p.no = no;
          p.es = cfg.es;
          if (run.name == "admm-mmse") p.regularizer = Regularizer::mmse();
          else if (run.name == "admm-zf") p.regularizer = Regularizer::zf();
          else p.regularizer = cons.is_real() ? Regularizer::bpsk(cfg.box_radius.value_or(cons.box_radius()))
                                               : Regularizer::box(cfg.box_radius.value_or(cons.box_radius()));
          xhat = admm_detect_batch(problems, p, rt);
        }
        for (std::size_t k = 0; k < problems.size(); ++k) {
          const auto ec = count_errors(tx_bits[k], cons.demap(xhat[k]));
          tallies[r].errors += ec.errors;
          tallies[r].bits += ec.total;
        }
        tallies[r].traffic = rt.record();
      }
      return tallies;
    };
    const auto totals = detail::run_trials(cfg.trials, cfg.threads, runs.size(), trial_fn);
    for (std::size_t r = 0; r < runs.size(); ++r) rows.push_back(detail::make_row(snr, runs[r], totals[r]));
  }
  detail::sort_rows(rows);
  return rows;
}

/// Downlink BER sweep: precode s with the (estimated) reciprocal channel,
/// transmit over the true channel, every user slices its own sample.
inline std::vector<BerRow> run_downlink_sweep(const SystemConfig& cfg) {
  cfg.validate();
  if (cfg.n_sc == 0 || cfg.n_sym == 0) return {};
  const auto names = cfg.algorithms.empty() ? default_downlink_algorithms() : cfg.algorithms;
  const auto runs = detail::expand_algorithms(names, cfg.iterations, {"zf"}, {"admm"});
  const Constellation cons(cfg.modulation);
  const std::size_t u = cfg.users;
  const std::size_t b = cfg.antennas();
  const std::size_t q = cons.bits_per_symbol();

  std::vector<BerRow> rows;
  for (const double snr : cfg.snr_db) {
    const double no = noise_variance(snr, u, cfg.es);
    const double sigma = std::sqrt(no);
    auto trial_fn = [&](std::size_t trial) {
      std::vector<ClusteredChannel> estimates;
      std::vector<CMat> truth;
      estimates.reserve(cfg.n_sc);
      for (std::size_t sc = 0; sc < cfg.n_sc; ++sc) {
        const CMat h = generate(u, b, stream_seed(cfg.seed, Stream::channel, trial, sc)).h;
        ClusteredChannel clusters = partition(h, cfg.clusters);
        if (cfg.csi == Csi::estimated) clusters = estimate_clusters(clusters, no, cfg.es, cfg.seed, trial, sc);
        estimates.push_back(clusters.reciprocal());
        truth.push_back(transpose(h));
      }
      std::vector<Bits> tx_bits;
      std::vector<DownlinkProblem> problems;
      std::vector<std::size_t> problem_sc;
      for (std::size_t sc = 0; sc < cfg.n_sc; ++sc) {
        for (std::size_t sym = 0; sym < cfg.n_sym; ++sym) {
          Bits bits = detail::random_bits(u * q, stream_seed(cfg.seed, Stream::bits, trial, sc, sym));
          problems.push_back({&estimates[sc], cons.map(bits)});
          problem_sc.push_back(sc);
          tx_bits.push_back(std::move(bits));
        }
      }

      std::vector<detail::Tally> tallies(runs.size());
      for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& run = runs[r];
        std::vector<CVec> x;
        ConsensusRuntime rt(cfg.clusters, {cfg.workers});
        if (run.name == "zf") {
          std::vector<CMat> full;
          for (const auto& e : estimates) full.push_back(e.stacked());
          for (std::size_t k = 0; k < problems.size(); ++k) x.push_back(zf_centralized(full[problem_sc[k]], problems[k].s));
        } else {
          BfParams p = cfg.bf;
          p.t_max = run.iterations;
          x = admm_beamform_batch(problems, p, rt);
        }
        for (std::size_t k = 0; k < problems.size(); ++k) {
          const std::size_t sc = problem_sc[k];
          const std::size_t sym = k % cfg.n_sym;
          CVec y = matvec(truth[sc], x[k]);
          const CVec n = detail::unit_noise(u, stream_seed(cfg.seed, Stream::noise, trial, sc, sym));
          for (std::size_t i = 0; i < u; ++i) y[i] += sigma * n[i];
          const auto ec = count_errors(tx_bits[k], cons.demap(y));
          tallies[r].errors += ec.errors;
          tallies[r].bits += ec.total;
        }
        tallies[r].traffic = rt.record();
      }
      return tallies;
    };
    const auto totals = detail::run_trials(cfg.trials, cfg.threads, runs.size(), trial_fn);
    for (std::size_t r = 0; r < runs.size(); ++r) rows.push_back(detail::make_row(snr, runs[r], totals[r]));
  }
  detail::sort_rows(rows);
  return rows;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr std::string_view kBerCsvHeader =
    "snr_db,algorithm,iterations,bits_total,bit_errors,ber,consensus_rounds,consensus_bytes";

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const std::vector<BerRow>& rows) {
  os << kBerCsvHeader << '\n';
  for (const BerRow& r : rows) {
    os << detail::fmt_double(r.snr_db) << ',' << r.algorithm << ',' << r.iterations << ',' << r.bits_total << ','
       << r.bit_errors << ',' << detail::fmt_double(r.ber) << ',' << r.consensus_rounds << ',' << r.consensus_bytes
       << '\n';
  }
}

inline void emit_csv(const std::vector<BerRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(out, rows);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline std::vector<BerRow> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kBerCsvHeader) throw IoError("BER CSV: missing or unexpected header");
  std::vector<BerRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 8) throw IoError("BER CSV: expected 8 fields in '" + line + "'");
    try {
      BerRow r;
      r.snr_db = std::stod(f[0]);
      r.algorithm = f[1];
      r.iterations = std::stoull(f[2]);
      r.bits_total = std::stoull(f[3]);
      r.bit_errors = std::stoull(f[4]);
      r.ber = std::stod(f[5]);
      r.consensus_rounds = std::stoull(f[6]);
      r.consensus_bytes = std::stoull(f[7]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw IoError("BER CSV: malformed number in '" + line + "'");
    }
  }
  return rows;
}

inline std::vector<BerRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse_csv(in);
}

// ---------------------------------------------------------------------------
// Complexity and trade-off reports
// ---------------------------------------------------------------------------

inline void write_complexity_csv(std::ostream& os, const std::vector<ComplexityReport>& rows) {
  os << "algorithm,mode,metric,users,antennas_per_cluster,clusters,iterations,preprocessing,first_iter,per_iter,"
        "total\n";
  for (const auto& r : rows) {
    os << to_string(r.algorithm) << ',' << to_string(r.mode) << ',' << to_string(r.metric) << ',' << r.users << ','
       << r.antennas_per_cluster << ',' << r.clusters << ',' << r.iterations << ',' << r.preprocessing << ','
       << r.first_iter << ',' << r.per_iter << ',' << r.total() << '\n';
  }
}

/// SNR where the BER curve crosses `target`, interpolating log10(BER)
/// linearly in dB between the bracketing grid points (linear BER when the
/// upper point has zero errors). Returns the first grid point when the whole
/// grid is already at or below target, nullopt when it never gets there.
inline std::optional<double> snr_at_ber(std::span<const double> snr, std::span<const double> ber,
                                        double target = 0.01) {
  if (snr.size() != ber.size()) throw DimensionError("snr_at_ber: grid and BER lengths differ");
  for (std::size_t i = 0; i < snr.size(); ++i) {
    if (ber[i] > target) continue;
    if (i == 0) return snr[0];
    const double b0 = ber[i - 1];
    const double b1 = ber[i];
    double frac;
    if (b1 > 0.0) {
      frac = (std::log10(b0) - std::log10(target)) / (std::log10(b0) - std::log10(b1));
    } else {
      frac = (b0 - target) / (b0 - b1);
    }
    return snr[i - 1] + frac * (snr[i] - snr[i - 1]);
  }
  return std::nullopt;
}

struct TradeoffRow {
  std::string algorithm;
  std::size_t iterations = 0;
  std::int64_t tm_complexity = 0;
  std::optional<double> snr_db_at_target;  ///< nullopt: target BER not reached on the grid
};

/// Complexity table entry behind a harness algorithm name.
inline Algorithm complexity_algorithm(std::string_view name, Link link) {
  if (link == Link::downlink) return name == "zf" ? Algorithm::zf_dl : Algorithm::admm_dl;
  if (name == "mmse" || name == "zf") return Algorithm::mmse_ul;
  if (name == "cg") return Algorithm::cg_ul;
  return Algorithm::admm_ul;
}

/// Joins BER rows with TM complexity totals on (algorithm, iterations).
inline std::vector<TradeoffRow> tradeoff_join(const std::vector<BerRow>& rows, const SystemConfig& cfg, Link link,
                                              double target = 0.01) {
  std::map<std::pair<std::string, std::size_t>, std::vector<std::pair<double, double>>> curves;
  for (const BerRow& r : rows) curves[{r.algorithm, r.iterations}].emplace_back(r.snr_db, r.ber);
  std::vector<TradeoffRow> out;
  for (auto& [key, pts] : curves) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> snr, ber;
    for (const auto& [s, b] : pts) {
      snr.push_back(s);
      ber.push_back(b);
    }
    const Algorithm alg = complexity_algorithm(key.first, link);
    const CxMode mode = natural_mode(alg, cfg.antennas_per_cluster, cfg.users);
    const auto rep = complexity_eval(alg, mode, Metric::tm, cfg.users, cfg.antennas_per_cluster, cfg.clusters,
                                     std::max<std::size_t>(key.second, 1));
    out.push_back({key.first, key.second, rep.total(), snr_at_ber(snr, ber, target)});
  }
  return out;
}

inline std::vector<TradeoffRow> tradeoff_table(const SystemConfig& cfg, Link link, double target = 0.01) {
  const auto rows = link == Link::uplink ? run_uplink_sweep(cfg) : run_downlink_sweep(cfg);
  return tradeoff_join(rows, cfg, link, target);
}

inline void write_tradeoff_csv(std::ostream& os, const std::vector<TradeoffRow>& rows) {
  os << "algorithm,iterations,tm_complexity,snr_db_at_target\n";
  for (const auto& r : rows) {
    os << r.algorithm << ',' << r.iterations << ',' << r.tm_complexity << ','
       << (r.snr_db_at_target ? detail::fmt_double(*r.snr_db_at_target) : std::string("unreachable")) << '\n';
  }
}

}  // namespace dbp
