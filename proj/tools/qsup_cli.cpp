// Copyright 2026 The QSUP Simulator Authors
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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qsup/acceptance.hpp"
#include "qsup/csv.hpp"
#include "qsup/harness.hpp"
#include "qsup/tomography.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAcceptance = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  std::optional<int> workers;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Sweep configuration file");
  cmd->add_option("--seed", f.seed, "Override the configured seed");
  cmd->add_option("--out", f.out, "Output directory (overrides output_dir)");
  cmd->add_option("--format", f.format, "Format printed to stdout")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--workers", f.workers, "Concurrent sweep cells")->check(CLI::PositiveNumber);
}

qsup::SweepSpec resolve_spec(const CommonFlags& f) {
  qsup::SweepSpec spec = f.config.empty() ? qsup::SweepSpec{} : qsup::load_config(f.config);
  if (f.seed) spec.seed = *f.seed;
  if (!f.out.empty()) spec.output_dir = f.out;
  if (f.workers) spec.workers = *f.workers;
  spec.validate();
  return spec;
}

int emit_table(const qsup::FigureTable& table, const qsup::SweepSpec& spec, const std::string& stem,
               const std::string& format) {
  qsup::write_outputs(table, spec.output_dir, stem);
  std::cout << (format == "json" ? qsup::to_json(table) : qsup::to_csv(table));
  return 0;
}

int run_tomo(const std::string& counts_path, std::optional<double> target_deg, const std::string& format) {
  std::ifstream in(counts_path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open counts file '{}'", counts_path));
  const auto records = qsup::read_counts_csv(in);
  if (records.empty()) throw std::runtime_error("counts file has no records");

  std::map<int, std::vector<qsup::TomographyResult>> by_k;
  std::map<int, std::vector<qsup::CountRecord>> records_by_k;
  for (const auto& r : records) records_by_k[r.k].push_back(r);

  nlohmann::ordered_json json_rows = nlohmann::ordered_json::array();
  if (format == "csv") {
    std::cout << "k,repetition,rho_HH,rho_HV_re,rho_HV_im,rho_VV,purity,log_likelihood,iterations,converged\r\n";
  }
  for (const auto& group : qsup::group_by_acquisition(records)) {
    auto result = qsup::mle_reconstruct(group);
    const auto& m = result.rho_hat.matrix();
    const double p = qsup::purity(result.rho_hat);
    if (format == "csv") {
      std::cout << qsup::csv::join({std::to_string(group.front().k), std::to_string(group.front().repetition),
                                    fmt::format("{:.12g}", m(0, 0).real()), fmt::format("{:.12g}", m(0, 1).real()),
                                    fmt::format("{:.12g}", m(0, 1).imag()), fmt::format("{:.12g}", m(1, 1).real()),
                                    fmt::format("{:.12g}", p), fmt::format("{:.12g}", result.log_likelihood),
                                    std::to_string(result.iterations), result.converged ? "true" : "false"})
                << "\r\n";
    } else {
      json_rows.push_back({{"k", group.front().k},
                           {"repetition", group.front().repetition},
                           {"rho", {{m(0, 0).real(), m(0, 1).real(), m(0, 1).imag(), m(1, 1).real()}}},
                           {"purity", p},
                           {"log_likelihood", result.log_likelihood},
                           {"iterations", result.iterations},
                           {"converged", result.converged}});
    }
    by_k[group.front().k].push_back(std::move(result));
  }

  if (target_deg) {
    if (!records_by_k.count(0)) throw std::runtime_error("summary needs k = 0 records for the reference loss");
    const double l0 = qsup::loss_rate(records_by_k.at(0));
    const auto target = qsup::basis_ket(qsup::degrees_to_radians(*target_deg));
    nlohmann::ordered_json summaries = nlohmann::ordered_json::array();
    if (format == "csv") std::cout << "\r\nk,F_mean,F_stderr,P_mean,P_stderr,p_sur_hat\r\n";
    for (const auto& [k, results] : by_k) {
      const auto s = qsup::summarize(results, target, records_by_k.at(k), l0);
      if (format == "csv") {
        std::cout << fmt::format("{},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\r\n", k, s.F_mean, s.F_stderr, s.P_mean,
                                 s.P_stderr, s.p_sur_hat);
      } else {
        summaries.push_back({{"k", k}, {"F_mean", s.F_mean}, {"F_stderr", s.F_stderr}, {"P_mean", s.P_mean},
                             {"P_stderr", s.P_stderr}, {"p_sur_hat", s.p_sur_hat}});
      }
    }
    if (format == "json") {
      std::cout << nlohmann::ordered_json{{"reconstructions", json_rows}, {"summary", summaries}}.dump(2) << "\n";
    }
  } else if (format == "json") {
    std::cout << nlohmann::ordered_json{{"reconstructions", json_rows}}.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit decoherence channels, Zeno protection and tomography simulator"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo sweep: channel, counts, tomography, summary");
  add_common(simulate, sim_flags);

  CommonFlags analytic_flags;
  auto* analytic = app.add_subcommand("analytic", "Closed-form sweep table (no shot noise)");
  add_common(analytic, analytic_flags);

  std::string counts_path;
  std::optional<double> target_deg;
  std::string tomo_format = "csv";
  auto* tomo = app.add_subcommand("tomo", "Maximum-likelihood reconstruction from a counts CSV");
  tomo->add_option("counts", counts_path, "CSV with columns k,repetition,basis,counts,monitor")->required();
  tomo->add_option("--target-deg", target_deg, "Input state angle; enables the per-k summary");
  tomo->add_option("--format", tomo_format)->check(CLI::IsMember({"csv", "json"}));

  CommonFlags counts_flags;
  double counts_psi = 45.0;
  std::optional<double> counts_xi;
  int counts_k = 4;
  auto* counts = app.add_subcommand("counts", "Simulated counts CSV for one (psi, xi) series, k = 0..k");
  add_common(counts, counts_flags);
  counts->add_option("--psi-deg", counts_psi, "Input state angle");
  counts->add_option("--xi-deg", counts_xi, "Protected state angle (omit for an unprotected run)");
  counts->add_option("--k", counts_k, "Largest block count")->check(CLI::NonNegativeNumber);

  qsup::AcceptanceOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--workers", verify_opts.workers)->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_opts.seed);

  CommonFlags zeno_flags;
  int n_max = 256;
  auto* zeno = app.add_subcommand("zeno-limit", "Survival probability vs number of projections at fixed total walk-off");
  add_common(zeno, zeno_flags);
  zeno->add_option("--n-max", n_max, "Largest step count (powers of two from 1)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*simulate) {
      const auto spec = resolve_spec(sim_flags);
      return emit_table(qsup::run_sweep(spec), spec, "sweep", sim_flags.format);
    }
    if (*analytic) {
      const auto spec = resolve_spec(analytic_flags);
      return emit_table(qsup::analytic_report(spec), spec, "analytic", analytic_flags.format);
    }
    if (*tomo) return run_tomo(counts_path, target_deg, tomo_format);
    if (*counts) {
      const auto spec = resolve_spec(counts_flags);
      const auto mode = counts_xi ? qsup::Mode::Protected : qsup::Mode::Unprotected;
      std::vector<qsup::CountRecord> all;
      for (int k = 0; k <= counts_k; ++k) {
        const auto out = qsup::run_channel(qsup::cell_config(spec, mode, counts_psi, counts_xi, k));
        const auto recs = qsup::simulate_counts(out.rho_out, spec.shots_mean, spec.n_repetitions, spec.seed, k,
                                                spec.monitor_fraction);
        all.insert(all.end(), recs.begin(), recs.end());
      }
      qsup::write_counts_csv(std::cout, all);
      return 0;
    }
    if (*verify) {
      bool ok = true;
      for (int id : qsup::acceptance_ids()) {
        const auto r = qsup::run_criterion(id, verify_opts);
        std::cout << qsup::format_result(r) << std::endl;
        ok = ok && r.passed;
      }
      return ok ? 0 : kExitAcceptance;
    }
    if (*zeno) {
      const auto spec = resolve_spec(zeno_flags);
      std::vector<int> ns;
      for (int n = 1; n <= n_max; n *= 2) ns.push_back(n);
      const auto rows = qsup::zeno_limit_study(spec, ns);
      if (zeno_flags.format == "json") {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& r : rows) {
          j.push_back({{"xi_deg", r.xi_deg}, {"n_steps", r.n_steps}, {"d_per_step", r.d_per_step},
                       {"p_sur", r.p_sur}, {"loss_bound", r.bound}});
        }
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << qsup::zeno_to_csv(rows);
      }
      return 0;
    }
  } catch (const qsup::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
