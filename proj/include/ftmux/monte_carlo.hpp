#pragma once

// Sampling estimates of success probabilities and rates.
//
// Sample i draws its grid from streams keyed by (seed, i), and samples are
// reduced in fixed-size chunks whose partial sums are combined in chunk
// order. Results therefore depend only on (config, samples, seed), never on
// the number of worker threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "ftmux/analytic_rates.hpp"
#include "ftmux/config.hpp"
#include "ftmux/errors.hpp"
#include "ftmux/random.hpp"
#include "ftmux/scheduler.hpp"
#include "ftmux/summation.hpp"

namespace ftmux {

struct McSettings {
  long long samples = 1'000'000;
  std::uint64_t seed = 0x5eed;
  unsigned workers = 0;  ///< 0: one per hardware thread
};

struct McEstimate {
  RateResult lossless;
  RateResult lossy;
};

/// Samples per reduction chunk. Part of the determinism contract.
inline constexpr long long kMcChunk = 4096;

namespace detail {

struct Moments {
  CompensatedSum hits;
  CompensatedSum survival;
  CompensatedSum survival_sq;

  void merge(const Moments& o) {
    hits.merge(o.hits);
    survival.merge(o.survival);
    survival_sq.merge(o.survival_sq);
  }
};

inline RateResult summarize(double sum, double sum_sq, long long samples, const SetupConfig& config) {
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  double var = 0.0;
  if (samples > 1) var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  RateResult r = make_rate(mean, static_cast<double>(config.total_bins()), config.m, config.t_bin);
  r.std_error = std::sqrt(var / n) / static_cast<double>(config.total_bins());
  return r;
}

inline unsigned resolve_workers(unsigned requested, long long chunks) {
  unsigned w = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<long long>(w, std::max<long long>(chunks, 1)));
}

}  // namespace detail

inline std::uint64_t sample_key(std::uint64_t seed, long long index) {
  return derive_key(seed, {static_cast<std::uint64_t>(index)});
}

/// Averages schedule existence (lossless) and schedule survival (lossy) over
/// `settings.samples` random grids.
inline McEstimate mc_estimate(const SetupConfig& config, const McSettings& settings) {
  config.validate();
  if (settings.samples < 1) throw DomainError("samples must be >= 1");
  const SurvivalTable survival(config);
  const long long chunks = (settings.samples + kMcChunk - 1) / kMcChunk;
  std::vector<detail::Moments> partial(static_cast<std::size_t>(chunks));

  std::atomic<long long> next{0};
  auto work = [&] {
    for (long long c = next++; c < chunks; c = next++) {
      detail::Moments& acc = partial[static_cast<std::size_t>(c)];
      const long long end = std::min(settings.samples, (c + 1) * kMcChunk);
      for (long long i = c * kMcChunk; i < end; ++i) {
        const BatchDelays delays = sample_batch_delays(config, sample_key(settings.seed, i), survival);
        const auto sel = select_batches(config, delays, survival);
        if (!sel) continue;
        const double surv = selection_survival(delays, *sel, survival);
        acc.hits += 1.0;
        acc.survival += surv;
        acc.survival_sq += surv * surv;
      }
    }
  };

  const unsigned workers = detail::resolve_workers(settings.workers, chunks);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  detail::Moments total;
  for (const auto& m : partial) total.merge(m);
  const double hits = total.hits.value();
  return {detail::summarize(hits, hits, settings.samples, config),
          detail::summarize(total.survival.value(), total.survival_sq.value(), settings.samples, config)};
}

struct McOptimum {
  int m = 0;
  McEstimate estimate;
};

/// Seed used for batch size m inside a scan.
inline std::uint64_t batch_size_seed(std::uint64_t seed, int m) {
  return derive_key(seed, {static_cast<std::uint64_t>(StreamLabel::BatchSize), static_cast<std::uint64_t>(m)});
}

/// Runs mc_estimate for every m in [1, m_max] and keeps the best lossy rate;
/// ties resolve to the smaller m.
inline McOptimum mc_optimal_m(const SetupConfig& config, const McSettings& settings, int m_max) {
  if (m_max < 1) throw DomainError("m_max must be >= 1");
  McOptimum best;
  SetupConfig trial = config;
  for (int m = 1; m <= m_max; ++m) {
    trial.m = m;
    McSettings s = settings;
    s.seed = batch_size_seed(settings.seed, m);
    McEstimate est = mc_estimate(trial, s);
    if (best.m == 0 || est.lossy.rate_per_bin > best.estimate.lossy.rate_per_bin) best = {m, est};
  }
  return best;
}

}  // namespace ftmux
