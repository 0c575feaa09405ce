#pragma once

// Closed-form success probabilities and rates for the Fixed variant, the
// failure-probability batch size, and batch-size optimization.

#include <cmath>
#include <string>

#include "ftmux/config.hpp"
#include "ftmux/errors.hpp"
#include "ftmux/loss_ledger.hpp"

namespace ftmux {

struct RateResult {
  double success_prob = 0.0;
  double rate_per_bin = 0.0;  ///< expected successes per time bin
  double rate_hz = 0.0;       ///< rate_per_bin / t_bin
  int m_used = 0;
  double std_error = 0.0;     ///< standard error of rate_per_bin; 0 when exact

  bool operator==(const RateResult&) const = default;
};

enum class RateObjective { Lossless, Lossy };

namespace detail {

inline void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
}

inline RateResult make_rate(double success, double duration_bins, int m, double t_bin) {
  RateResult r;
  r.success_prob = success;
  r.rate_per_bin = success / duration_bins;
  r.rate_hz = r.rate_per_bin / t_bin;
  r.m_used = m;
  return r;
}

}  // namespace detail

/// Probability that each of n batches of m bins holds at least one photon:
/// [1 - (1-p)^m]^n.
inline double lossless_success(double p, int m, int n) {
  detail::check_probability(p);
  if (m < 1) throw DomainError("m must be >= 1");
  if (n < 0) throw DomainError("n must be >= 0");
  // 1 - (1-p)^m without cancellation for small p.
  const double batch = p == 1.0 ? 1.0 : -std::expm1(m * std::log1p(-p));
  return std::pow(batch, n);
}

inline RateResult lossless_rate(double p, int m, int n, double t_bin = kDefaultTimeBin) {
  if (n < 1) throw DomainError("n must be >= 1");
  return detail::make_rate(lossless_success(p, m, n), static_cast<double>(m) * n, m, t_bin);
}

/// Real-valued batch size log_{1/(1-p)}(n/eps) at which the lossless success
/// probability reaches 1 - eps.
inline double epsilon_m_real(double p, int n, double eps) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("epsilon batch size needs 0 < p < 1");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (n < 1) throw DomainError("n must be >= 1");
  return std::log(n / eps) / -std::log1p(-p);
}

/// Smallest integer batch size from the logarithmic rule that guarantees
/// lossless_success >= 1 - eps.
inline int epsilon_m(double p, int n, double eps) {
  int m = static_cast<int>(std::ceil(epsilon_m_real(p, n, eps)));
  if (m < 1) m = 1;
  // ceil() of a rounded logarithm can land one short when the true value is integral.
  while (lossless_success(p, m, n) < 1.0 - eps) ++m;
  return m;
}

/// Achievable rate (1-eps) / (n log_{1/(1-p)}(n/eps)) using the unrounded batch size.
inline RateResult epsilon_rate(double p, int n, double eps, double t_bin = kDefaultTimeBin) {
  const double m_real = epsilon_m_real(p, n, eps);
  RateResult r = detail::make_rate(1.0 - eps, n * m_real, epsilon_m(p, n, eps), t_bin);
  return r;
}

/// Success probability of one Fixed-variant batch including loss:
/// sum_tau p(1-p)^tau P(batch, tau).
inline double lossy_batch_success(const SetupConfig& config, int batch) {
  double sum = 0.0;
  double empty_run = 1.0;  // (1-p)^tau
  for (int tau = 0; tau < config.m; ++tau) {
    sum += config.p * empty_run * survival_prob(config, batch, tau);
    empty_run *= 1.0 - config.p;
  }
  return sum;
}

/// Probability of emitting all n photons without loss (Fixed variant).
inline double lossy_success(const SetupConfig& config) {
  config.validate();
  if (config.variant != Variant::Fixed) throw DomainError("closed-form lossy success applies to the Fixed variant only");
  double prod = 1.0;
  for (int batch = 0; batch < config.n; ++batch) prod *= lossy_batch_success(config, batch);
  return prod;
}

inline RateResult lossy_rate(const SetupConfig& config) {
  return detail::make_rate(lossy_success(config), static_cast<double>(config.total_bins()), config.m, config.t_bin);
}

/// Rate of `config` at its own m under the chosen objective.
inline RateResult rate_at(const SetupConfig& config, RateObjective objective) {
  if (objective == RateObjective::Lossless) {
    if (config.variant != Variant::Fixed) throw DomainError("closed-form rates apply to the Fixed variant only");
    return lossless_rate(config.p, config.m, config.n, config.t_bin);
  }
  return lossy_rate(config);
}

struct OptimalM {
  int m = 0;
  RateResult rate;
};

/// Exhaustive scan of m in [1, m_max]; ties resolve to the smaller m.
inline OptimalM optimal_m(const SetupConfig& config, int m_max, RateObjective objective) {
  if (m_max < 1) throw DomainError("m_max must be >= 1");
  OptimalM best;
  SetupConfig trial = config;
  for (int m = 1; m <= m_max; ++m) {
    trial.m = m;
    RateResult r = rate_at(trial, objective);
    if (best.m == 0 || r.rate_per_bin > best.rate.rate_per_bin) best = {m, r};
  }
  return best;
}

/// Optimized lossy rate divided by the unmultiplexed rate p^n.
inline double improvement_ratio(const SetupConfig& config, int m_max) {
  if (!(config.p > 0.0)) throw DomainError("improvement ratio needs p > 0");
  return optimal_m(config, m_max, RateObjective::Lossy).rate.rate_per_bin / std::pow(config.p, config.n);
}

}  // namespace ftmux
