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

#include "qsup/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"
#include "qsup/csv.hpp"

namespace qsup {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_real(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError(fmt::format("config: key '{}' expects a real number, got '{}'", key, text));
  }
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("config: key '{}' expects an integer, got '{}'", key, text));
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(fmt::format("config: key '{}' expects a boolean (true/false), got '{}'", key, text));
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
  if (out.empty()) throw ConfigError(fmt::format("config: key '{}' expects a non-empty list of degrees", key));
  return out;
}

std::string number(double v) { return fmt::format("{:.12g}", v); }

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ULL;
  h = (h ^ (h >> 27)) * 0x94D049BB133111EBULL;
  return h ^ (h >> 31);
}

struct Cell {
  Mode mode;
  std::size_t psi_index;
  std::optional<std::size_t> xi_index;
  int k;
};

std::vector<Cell> enumerate_cells(const SweepSpec& spec) {
  std::vector<Cell> cells;
  const bool bare = spec.modes != ModeSelection::ProtectedOnly;
  const bool qsup = spec.modes != ModeSelection::UnprotectedOnly;
  for (std::size_t i = 0; i < spec.psi_deg.size(); ++i) {
    if (bare) {
      for (int k = 0; k <= spec.k_max; ++k) cells.push_back({Mode::Unprotected, i, std::nullopt, k});
    }
    if (qsup) {
      for (std::size_t j = 0; j < spec.xi_deg.size(); ++j)
        for (int k = 0; k <= spec.k_max; ++k) cells.push_back({Mode::Protected, i, j, k});
    }
  }
  return cells;
}

std::optional<double> xi_of(const SweepSpec& spec, const Cell& cell) {
  if (!cell.xi_index) return std::nullopt;
  return spec.xi_deg[*cell.xi_index];
}

std::string describe(const SweepSpec& spec, const Cell& cell) {
  const auto xi = xi_of(spec, cell);
  return fmt::format("{} psi={} xi={} k={}", mode_name(cell.mode), spec.psi_deg[cell.psi_index],
                     xi ? number(*xi) : std::string("-"), cell.k);
}

double analytic_survival(const SweepSpec& spec, const Cell& cell) {
  const ChannelConfig cfg = cell_config(spec, cell.mode, spec.psi_deg[cell.psi_index], xi_of(spec, cell), cell.k);
  const double passive = passive_transmission(cfg);
  return cfg.protect ? survival_product(cfg).value * passive : passive;
}

FigureRow simulate_cell(const SweepSpec& spec, const Cell& cell) {
  const double psi = spec.psi_deg[cell.psi_index];
  const auto xi = xi_of(spec, cell);
  // One stream family per (mode, ψ, ξ) series; k, repetition and basis are
  // folded in by stream_seed, so the k = 0 reference is reproducible per cell.
  std::uint64_t series = mix(spec.seed, static_cast<std::uint64_t>(cell.mode));
  series = mix(series, cell.psi_index);
  series = mix(series, cell.xi_index ? *cell.xi_index + 1 : 0);

  const ChannelConfig cfg = cell_config(spec, cell.mode, psi, xi, cell.k);
  const ChannelOutput out = run_channel(cfg);
  const auto records =
      simulate_counts(out.rho_out, spec.shots_mean, spec.n_repetitions, series, cell.k, spec.monitor_fraction);

  const ChannelConfig ref_cfg = cell_config(spec, cell.mode, psi, xi, 0);
  const auto ref_records = simulate_counts(run_channel(ref_cfg).rho_out, spec.shots_mean, spec.n_repetitions, series,
                                           0, spec.monitor_fraction);

  std::vector<TomographyResult> results;
  for (const auto& group : group_by_acquisition(records)) {
    auto r = mle_reconstruct(group);
    if (!r.converged) {
      throw std::runtime_error(fmt::format("maximum-likelihood reconstruction did not converge (repetition {})",
                                           group.front().repetition));
    }
    results.push_back(std::move(r));
  }
  const RunSummary summary = summarize(results, basis_ket(degrees_to_radians(psi)), records, loss_rate(ref_records));
  return FigureRow{cell.mode,        psi,
                   xi,               cell.k,
                   summary.F_mean,   summary.F_stderr,
                   summary.P_mean,   summary.P_stderr,
                   summary.p_sur_hat, analytic_survival(spec, cell)};
}

}  // namespace

const char* mode_name(Mode mode) { return mode == Mode::Protected ? "protected" : "unprotected"; }

double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

void SweepSpec::validate() const {
  if (psi_deg.empty()) throw ConfigError("config: psi_list must not be empty");
  if (xi_deg.empty()) throw ConfigError("config: xi_list must not be empty");
  if (k_max < 0) throw ConfigError(fmt::format("config: k_max must be >= 0, got {}", k_max));
  if (!(d_over_sigma >= 0.0)) throw ConfigError("config: d_over_sigma must be >= 0");
  if (n_repetitions < 2) throw ConfigError(fmt::format("config: n_repetitions must be >= 2, got {}", n_repetitions));
  if (!(shots_mean > 0.0)) throw ConfigError("config: shots_mean must be > 0");
  if (!(passive_transmission_per_element > 0.0) || passive_transmission_per_element > 1.0) {
    throw ConfigError("config: passive_transmission_per_element must be in (0, 1]");
  }
  if (!(monitor_fraction > 0.0)) throw ConfigError("config: monitor_fraction must be > 0");
  if (workers < 1) throw ConfigError("config: workers must be >= 1");
}

SweepSpec parse_config(std::istream& in) {
  SweepSpec spec;
  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("config line {}: expected 'key = value', got '{}'", line_no, line));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(fmt::format("config: key '{}' given twice", key));

    if (key == "psi_list") {
      spec.psi_deg = parse_list(key, value);
    } else if (key == "xi_list") {
      spec.xi_deg = parse_list(key, value);
    } else if (key == "phi_deg") {
      spec.phi_deg = parse_real(key, value);
    } else if (key == "k_max") {
      spec.k_max = static_cast<int>(parse_integer(key, value));
    } else if (key == "d_over_sigma") {
      spec.d_over_sigma = parse_real(key, value);
    } else if (key == "n_repetitions") {
      spec.n_repetitions = static_cast<int>(parse_integer(key, value));
    } else if (key == "shots_mean") {
      spec.shots_mean = parse_real(key, value);
    } else if (key == "seed") {
      const long long s = parse_integer(key, value);
      if (s < 0) throw ConfigError(fmt::format("config: key 'seed' expects a non-negative integer, got '{}'", value));
      spec.seed = static_cast<std::uint64_t>(s);
    } else if (key == "protected") {
      if (value == "both") {
        spec.modes = ModeSelection::Both;
      } else {
        try {
          spec.modes = parse_bool(key, value) ? ModeSelection::ProtectedOnly : ModeSelection::UnprotectedOnly;
        } catch (const ConfigError&) {
          throw ConfigError(fmt::format("config: key 'protected' expects true, false or both, got '{}'", value));
        }
      }
    } else if (key == "project_after_last_block") {
      spec.project_after_last_block = parse_bool(key, value);
    } else if (key == "passive_transmission_per_element") {
      spec.passive_transmission_per_element = parse_real(key, value);
    } else if (key == "monitor_fraction") {
      spec.monitor_fraction = parse_real(key, value);
    } else if (key == "workers") {
      spec.workers = static_cast<int>(parse_integer(key, value));
    } else if (key == "output_dir") {
      spec.output_dir = value;
    } else {
      throw ConfigError(fmt::format("config: unknown key '{}'", key));
    }
  }
  spec.validate();
  return spec;
}

SweepSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("config: cannot open '{}'", path));
  return parse_config(in);
}

ChannelConfig cell_config(const SweepSpec& spec, Mode mode, double psi_deg, std::optional<double> xi_deg, int k) {
  ChannelConfig cfg;
  cfg.psi = degrees_to_radians(psi_deg);
  cfg.xi = degrees_to_radians(xi_deg.value_or(psi_deg));
  cfg.phi = degrees_to_radians(spec.phi_deg);
  cfg.sigma = 1.0;
  cfg.d_per_block = spec.d_over_sigma * cfg.sigma;
  cfg.n_blocks = k;
  cfg.protect = mode == Mode::Protected;
  cfg.project_after_last_block = spec.project_after_last_block;
  cfg.passive_transmission_per_element = spec.passive_transmission_per_element;
  return cfg;
}

FigureTable analytic_report(const SweepSpec& spec) {
  spec.validate();
  FigureTable table;
  for (const Cell& cell : enumerate_cells(spec)) {
    const double psi = spec.psi_deg[cell.psi_index];
    const auto xi = xi_of(spec, cell);
    const ChannelOutput out = run_channel(cell_config(spec, cell.mode, psi, xi, cell.k));
    const DensityMatrix rho = out.rho_out.normalized();
    const double p = analytic_survival(spec, cell);
    table.push_back(FigureRow{cell.mode, psi, xi, cell.k, fidelity(rho, basis_ket(degrees_to_radians(psi))), 0.0,
                              purity(rho), 0.0, p, p});
  }
  return table;
}

FigureTable run_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto cells = enumerate_cells(spec);
  FigureTable table(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        table[i] = simulate_cell(spec, cells[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(spec.workers), cells.size());
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("sweep cell [{}] failed: {}", describe(spec, cells[i]), e.what()));
    }
  }
  return table;
}

std::string to_csv(const FigureTable& table) {
  std::string out = csv::join({"mode", "psi_deg", "xi_deg", "k", "F_mean", "F_stderr", "P_mean", "P_stderr",
                               "p_sur_hat", "p_sur_analytic"});
  out += "\r\n";
  for (const auto& r : table) {
    out += csv::join({mode_name(r.mode), number(r.psi_deg), r.xi_deg ? number(*r.xi_deg) : std::string(),
                      std::to_string(r.k), number(r.F_mean), number(r.F_stderr), number(r.P_mean),
                      number(r.P_stderr), number(r.p_sur_hat), number(r.p_sur_analytic)});
    out += "\r\n";
  }
  return out;
}

std::string to_json(const FigureTable& table) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : table) {
    nlohmann::ordered_json row;
    row["mode"] = mode_name(r.mode);
    row["psi_deg"] = r.psi_deg;
    row["xi_deg"] = r.xi_deg ? nlohmann::ordered_json(*r.xi_deg) : nlohmann::ordered_json(nullptr);
    row["k"] = r.k;
    row["F_mean"] = r.F_mean;
    row["F_stderr"] = r.F_stderr;
    row["P_mean"] = r.P_mean;
    row["P_stderr"] = r.P_stderr;
    row["p_sur_hat"] = r.p_sur_hat;
    row["p_sur_analytic"] = r.p_sur_analytic;
    rows.push_back(std::move(row));
  }
  return rows.dump(2) + "\n";
}

void write_outputs(const FigureTable& table, const std::string& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir) / stem;
  for (const auto& [ext, body] : {std::pair{".csv", to_csv(table)}, std::pair{".json", to_json(table)}}) {
    std::ofstream out(base.string() + ext, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}{}", base.string(), ext));
    out << body;
  }
}

std::vector<ZenoRow> zeno_limit_study(const SweepSpec& spec, const std::vector<int>& n_values) {
  spec.validate();
  const double total = spec.d_over_sigma * std::max(spec.k_max, 1);
  std::vector<ZenoRow> rows;
  for (double xi : spec.xi_deg) {
    for (int n : n_values) {
      if (n < 1) throw std::invalid_argument("zeno_limit_study: step counts must be >= 1");
      ChannelConfig cfg = cell_config(spec, Mode::Protected, xi, xi, n);
      cfg.d_per_block = total / n;
      cfg.project_after_last_block = true;
      cfg.passive_transmission_per_element = 1.0;
      const Ket xi_ket = basis_ket(cfg.xi);
      const double pd = std::norm(inner(basis_ket(cfg.phi), xi_ket));
      const double bound = n * 2.0 * pd * (1.0 - pd) * total * total / (8.0 * cfg.sigma * cfg.sigma * n * n);
      rows.push_back(ZenoRow{xi, n, cfg.d_per_block, survival_product(cfg).value, bound});
    }
  }
  return rows;
}

std::string zeno_to_csv(const std::vector<ZenoRow>& rows) {
  std::string out = "xi_deg,n_steps,d_per_step,p_sur,loss_bound\r\n";
  for (const auto& r : rows) {
    out += csv::join({number(r.xi_deg), std::to_string(r.n_steps), number(r.d_per_step), number(r.p_sur),
                      number(r.bound)});
    out += "\r\n";
  }
  return out;
}

}  // namespace qsup
