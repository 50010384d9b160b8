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


// dbp_sim: command-line front end for the BER sweeps and complexity reports.
//
//   dbp_sim detect-sweep   [--config f.json] [overrides] [--out ber.csv]
//   dbp_sim beamform-sweep [--config f.json] [overrides] [--out ber.csv]
//   dbp_sim complexity     --users U --antennas-per-cluster S --clusters C [--iterations T]
//   dbp_sim tradeoff       --link uplink|downlink [--config f.json] [overrides]
//
// Output goes to stdout unless --out is given.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dbp/dbp.hpp"

namespace {

struct Overrides {
  std::string config;
  std::size_t users = 0, clusters = 0, antennas_per_cluster = 0, trials = 0, threads = 0;
  std::size_t subcarriers = 0, symbols = 0;
  std::uint64_t seed = 0;
  std::vector<double> snr;
  std::vector<std::string> algorithms;
  std::vector<std::size_t> iterations;
  std::string modulation, csi;
  std::string out = "-";
};

void add_sweep_options(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON config file");
  app->add_option("--users", o.users, "number of users U");
  app->add_option("--clusters", o.clusters, "number of clusters C");
  app->add_option("--antennas-per-cluster", o.antennas_per_cluster, "antennas per cluster S");
  app->add_option("--snr", o.snr, "SNR grid in dB")->delimiter(',');
  app->add_option("--trials", o.trials, "Monte-Carlo trials per SNR point");
  app->add_option("--seed", o.seed, "master RNG seed");
  app->add_option("--algorithm", o.algorithms, "algorithms to run")->delimiter(',');
  app->add_option("--iterations", o.iterations, "iteration counts")->delimiter(',');
  app->add_option("--subcarriers", o.subcarriers, "subcarriers per trial");
  app->add_option("--symbols", o.symbols, "symbols per coherence block");
  app->add_option("--modulation", o.modulation, "bpsk, qpsk, 16qam or 64qam");
  app->add_option("--csi", o.csi, "perfect or estimated");
  app->add_option("--threads", o.threads, "trials run in parallel");
  app->add_option("--out", o.out, "output CSV path ('-' for stdout)");
}

dbp::SystemConfig build_config(const CLI::App& app, const Overrides& o) {
  dbp::SystemConfig cfg;
  if (!o.config.empty()) cfg = dbp::load_config(o.config);
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--users")) cfg.users = o.users;
  if (given("--clusters")) cfg.clusters = o.clusters;
  if (given("--antennas-per-cluster")) cfg.antennas_per_cluster = o.antennas_per_cluster;
  if (given("--snr")) cfg.snr_db = o.snr;
  if (given("--trials")) cfg.trials = o.trials;
  if (given("--seed")) cfg.seed = o.seed;
  if (given("--algorithm")) cfg.algorithms = o.algorithms;
  if (given("--iterations")) cfg.iterations = o.iterations;
  if (given("--subcarriers")) cfg.n_sc = o.subcarriers;
  if (given("--symbols")) cfg.n_sym = o.symbols;
  if (given("--modulation")) cfg.modulation = dbp::parse_modulation(o.modulation);
  if (given("--threads")) cfg.threads = o.threads;
  if (given("--csi")) {
    if (o.csi == "perfect") cfg.csi = dbp::Csi::perfect;
    else if (o.csi == "estimated") cfg.csi = dbp::Csi::estimated;
    else throw dbp::ConfigError("--csi must be 'perfect' or 'estimated'");
  }
  cfg.validate();
  return cfg;
}

template <typename Writer>
void write_out(const std::string& path, Writer&& w) {
  if (path == "-") {
    w(std::cout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw dbp::IoError("cannot open '" + path + "' for writing");
  w(f);
  f.flush();
  if (!f) throw dbp::IoError("write to '" + path + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized baseband processing simulator"};
  app.require_subcommand(1);

  Overrides up, down, trade;
  auto* detect = app.add_subcommand("detect-sweep", "uplink BER sweep");
  add_sweep_options(detect, up);
  auto* beam = app.add_subcommand("beamform-sweep", "downlink BER sweep");
  add_sweep_options(beam, down);

  auto* cx = app.add_subcommand("complexity", "complexity table");
  std::size_t cx_u = 16, cx_s = 8, cx_c = 8, cx_t = 1;
  std::string cx_out = "-";
  cx->add_option("--users", cx_u, "U");
  cx->add_option("--antennas-per-cluster", cx_s, "S");
  cx->add_option("--clusters", cx_c, "C");
  cx->add_option("--iterations", cx_t, "T used for the total column");
  cx->add_option("--out", cx_out, "output CSV path ('-' for stdout)");

  auto* to = app.add_subcommand("tradeoff", "SNR at target BER versus TM complexity");
  add_sweep_options(to, trade);
  std::string link = "uplink";
  double target = 0.01;
  to->add_option("--link", link, "uplink or downlink")->check(CLI::IsMember({"uplink", "downlink"}));
  to->add_option("--target", target, "target BER")->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*detect) {
      const auto cfg = build_config(*detect, up);
      const auto rows = dbp::run_uplink_sweep(cfg);
      if (up.out == "-") dbp::write_csv(std::cout, rows);
      else dbp::emit_csv(rows, up.out);
    } else if (*beam) {
      const auto cfg = build_config(*beam, down);
      const auto rows = dbp::run_downlink_sweep(cfg);
      if (down.out == "-") dbp::write_csv(std::cout, rows);
      else dbp::emit_csv(rows, down.out);
    } else if (*cx) {
      const auto rows = dbp::complexity_table(cx_u, cx_s, cx_c, cx_t);
      write_out(cx_out, [&](std::ostream& os) { dbp::write_complexity_csv(os, rows); });
    } else if (*to) {
      const auto cfg = build_config(*to, trade);
      const auto rows = dbp::tradeoff_table(cfg, link == "uplink" ? dbp::Link::uplink : dbp::Link::downlink, target);
      write_out(trade.out, [&](std::ostream& os) { dbp::write_tradeoff_csv(os, rows); });
    }
  } catch (const dbp::Error& e) {
    std::cerr << "dbp_sim: error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dbp_sim: unexpected error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
