#pragma once

// Command implementations behind the ftmux CLI. Each returns a Table (or a
// report) so it can be exercised without spawning the executable.

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ftmux/analytic_rates.hpp"
#include "ftmux/config.hpp"
#include "ftmux/config_json.hpp"
#include "ftmux/errors.hpp"
#include "ftmux/loss_ledger.hpp"
#include "ftmux/monte_carlo.hpp"
#include "ftmux/table.hpp"

namespace ftmux::cli {

/// Exit codes shared by every command.
enum ExitCode : int { kOk = 0, kThresholdFailure = 1, kUsageError = 2 };

/// Allowed deviation, in percentage points, from the reference loss column.
inline constexpr double kLossPercentTolerance = 0.05;

struct SweepSpec {
  SetupConfig config = preset(Preset::OneLoopDefault);
  std::string source = "OneLoopDefault";  ///< preset name or config path
  std::vector<int> n_values;
  int m_max = kDefaultMaxBatchBins;
  std::vector<double> p_values;
  std::vector<double> epsilons;
  McSettings mc;
  std::vector<Occupancy> occupancies{Occupancy::Unlimited};
};

/// Log-spaced grid of `count` points from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw ConfigError("log grid needs 0 < lo <= hi and count >= 1");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(std::pow(10.0, std::log10(lo) + f * (std::log10(hi) - std::log10(lo))));
  }
  return out;
}

/// Parses "lo:hi:count" into a log grid.
inline std::vector<double> parse_log_grid(const std::string& text) {
  double lo = 0, hi = 0;
  int count = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &lo, &hi, &count, &tail) != 3)
    throw ConfigError("p grid must look like lo:hi:count, got '" + text + "'");
  return log_grid(lo, hi, count);
}

namespace detail {

inline void require_fixed(const SweepSpec& spec) {
  if (spec.config.variant != Variant::Fixed) throw ConfigError("this command evaluates the Fixed variant only");
}

inline void check_common(const SweepSpec& spec) {
  spec.config.validate();
  if (spec.m_max < 1) throw ConfigError("--m-max must be >= 1");
  if (spec.n_values.empty()) throw ConfigError("at least one n is required");
  for (int n : spec.n_values)
    if (n < 1) throw ConfigError("n values must be >= 1");
}

inline Table base_table(const std::string& command, const SweepSpec& spec) {
  Table t;
  t.command = command;
  t.config = to_json(spec.config);
  t.comments.push_back("source: " + spec.source);
  return t;
}

inline std::string percent_text(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%#.3g", v);
  return buf;
}

}  // namespace detail

struct ValidationReport {
  std::string text;
  int exit_code = kOk;
};

/// Lists every loss entry in dB and percent. With `compare_reference`, also
/// checks the percentages against the reference column.
inline ValidationReport losses_validate(const SetupConfig& config, bool compare_reference) {
  config.validate();
  ValidationReport report;
  std::ostringstream out;
  const auto& reference = reference_loss_percent();
  for (const auto& entry : loss_entries(config.loss_table)) {
    const double percent = 100.0 * db_to_loss_fraction(entry.db);
    out << entry.component << ' ' << detail::percent_text(entry.db) << " dB / " << detail::percent_text(percent)
        << " %";
    if (compare_reference) {
      auto it = reference.find(entry.component);
      if (it != reference.end()) {
        const double delta = percent - it->second;
        const bool ok = std::abs(delta) <= kLossPercentTolerance;
        char buf[96];
        std::snprintf(buf, sizeof buf, "  (reference %s %%, delta %+.4f) %s", detail::percent_text(it->second).c_str(),
                      delta, ok ? "ok" : "MISMATCH");
        out << buf;
        if (!ok) report.exit_code = kThresholdFailure;
      }
    }
    out << '\n';
  }
  report.text = out.str();
  return report;
}

/// Closed-form lossless and lossy rates over m in [1, m_max] for each n.
inline Table rate_sweep(const SweepSpec& spec) {
  detail::check_common(spec);
  detail::require_fixed(spec);
  Table t = detail::base_table("rate-sweep", spec);
  t.comments.push_back("units: *_per_bin in 1/time bin; *_hz in Hz using t_bin");
  t.columns = {"n", "m", "rate_lossless_per_bin", "rate_lossy_per_bin", "rate_lossless_hz", "rate_lossy_hz",
               "no_multiplexing_per_bin"};
  for (int n : spec.n_values) {
    SetupConfig c = spec.config;
    c.n = n;
    const double baseline = std::pow(c.p, n);
    for (int m = 1; m <= spec.m_max; ++m) {
      c.m = m;
      const RateResult lossless = lossless_rate(c.p, m, n, c.t_bin);
      const RateResult lossy = lossy_rate(c);
      t.rows.push_back({static_cast<long long>(n), static_cast<long long>(m), lossless.rate_per_bin, lossy.rate_per_bin,
                        lossless.rate_hz, lossy.rate_hz, baseline});
    }
  }
  return t;
}

/// Optimal-m rates per n, with and without loss, plus the p^n baseline.
inline Table max_rate(const SweepSpec& spec) {
  detail::check_common(spec);
  detail::require_fixed(spec);
  Table t = detail::base_table("max-rate", spec);
  t.comments.push_back("units: rates in 1/time bin; m_star maximizes the lossy rate over [1, " +
                       std::to_string(spec.m_max) + "]");
  t.columns = {"n", "m_star", "max_rate_lossless", "max_rate_lossy", "no_multiplexing", "m_star_lossless"};
  for (int n : spec.n_values) {
    SetupConfig c = spec.config;
    c.n = n;
    const OptimalM lossless = optimal_m(c, spec.m_max, RateObjective::Lossless);
    const OptimalM lossy = optimal_m(c, spec.m_max, RateObjective::Lossy);
    t.rows.push_back({static_cast<long long>(n), static_cast<long long>(lossy.m), lossless.rate.rate_per_bin,
                      lossy.rate.rate_per_bin, std::pow(c.p, n), static_cast<long long>(lossless.m)});
  }
  return t;
}

/// Improvement ratio over a grid of p for each n.
inline Table ratio_sweep(const SweepSpec& spec) {
  detail::check_common(spec);
  detail::require_fixed(spec);
  if (spec.p_values.empty()) throw ConfigError("ratio sweep needs at least one p");
  for (double p : spec.p_values)
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("ratio sweep needs 0 < p <= 1");
  Table t = detail::base_table("ratio-sweep", spec);
  t.comments.push_back("ratio: optimized lossy rate over m in [1, " + std::to_string(spec.m_max) + "] divided by p^n");
  t.columns = {"n", "p", "ratio", "m_star"};
  for (int n : spec.n_values) {
    for (double p : spec.p_values) {
      SetupConfig c = spec.config;
      c.n = n;
      c.p = p;
      const OptimalM best = optimal_m(c, spec.m_max, RateObjective::Lossy);
      t.rows.push_back({static_cast<long long>(n), p, best.rate.rate_per_bin / std::pow(p, n),
                        static_cast<long long>(best.m)});
    }
  }
  return t;
}

/// Failure-probability batch sizes and the corresponding achievable rates.
inline Table epsilon_rates(const SweepSpec& spec) {
  detail::check_common(spec);
  if (spec.epsilons.empty()) throw ConfigError("at least one --epsilon is required");
  Table t = detail::base_table("epsilon-rate", spec);
  t.comments.push_back("m_real = log_{1/(1-p)}(n/epsilon); rate uses m_real; m_epsilon is its ceiling");
  t.columns = {"n", "epsilon", "m_epsilon", "m_real", "rate_per_bin", "rate_hz", "success_at_m_epsilon"};
  const double p = spec.config.p;
  for (int n : spec.n_values) {
    for (double eps : spec.epsilons) {
      try {
        const RateResult r = epsilon_rate(p, n, eps, spec.config.t_bin);
        t.rows.push_back({static_cast<long long>(n), eps, static_cast<long long>(r.m_used), epsilon_m_real(p, n, eps),
                          r.rate_per_bin, r.rate_hz, lossless_success(p, r.m_used, n)});
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
    }
  }
  return t;
}

/// Monte Carlo optimum for n photons in 2n frequency bins next to the
/// closed-form Fixed-variant optimum.
inline Table mc_partial(const SweepSpec& spec) {
  detail::check_common(spec);
  if (spec.config.variant != Variant::Partial) throw ConfigError("mc-partial needs the Partial variant");
  if (spec.mc.samples < 1) throw ConfigError("--samples must be >= 1");
  if (spec.occupancies.empty()) throw ConfigError("at least one occupancy model is required");
  Table t = detail::base_table("mc-partial", spec);
  t.comments.push_back("samples: " + std::to_string(spec.mc.samples) + "; seed: " + std::to_string(spec.mc.seed));
  t.comments.push_back("units: rates in 1/time bin; stderr is the standard error of rate_partial; m_star maximizes "
                       "the lossy partial rate over [1, " + std::to_string(spec.m_max) + "]");
  t.columns = {"n",          "m_star",         "rate_partial",         "stderr",
               "rate_fixed", "occupancy_model", "rate_partial_lossless", "stderr_lossless",
               "rate_fixed_lossless"};
  for (int n : spec.n_values) {
    SetupConfig fixed = spec.config;
    fixed.variant = Variant::Fixed;
    fixed.n = n;
    const OptimalM fixed_lossy = optimal_m(fixed, spec.m_max, RateObjective::Lossy);
    const OptimalM fixed_lossless = optimal_m(fixed, spec.m_max, RateObjective::Lossless);
    for (Occupancy occ : spec.occupancies) {
      SetupConfig partial = spec.config;
      partial.n = n;
      partial.occupancy = occ;
      McSettings s = spec.mc;
      s.seed = derive_key(spec.mc.seed, {static_cast<std::uint64_t>(n)});
      const McOptimum best = mc_optimal_m(partial, s, spec.m_max);
      t.rows.push_back({static_cast<long long>(n), static_cast<long long>(best.m),
                        best.estimate.lossy.rate_per_bin, best.estimate.lossy.std_error,
                        fixed_lossy.rate.rate_per_bin, std::string(to_string(occ)),
                        best.estimate.lossless.rate_per_bin, best.estimate.lossless.std_error,
                        fixed_lossless.rate.rate_per_bin});
    }
  }
  return t;
}

}  // namespace ftmux::cli
