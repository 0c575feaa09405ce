#pragma once

// Per-photon loss bookkeeping. A photon's path is summed in dB from the
// component table and converted to a survival probability once at the end.
//
// Path of a photon from batch v that needs a delay of tau timesteps:
//   misc[#loops]                      mandatory pass through switches and optics
//   2 * circulator_pass               into and back out of the grating array
//   sum_L passes(L) * loop_pass[L]    storage in the memory loops
//   2 * d * fbg_transmission          through d gratings and back
//   fbg_reflection                    off its own grating
//   d * m * fiber_per_timestep        round trip over d pitches of m/2 timesteps
// with grating depth d = (#batches - 1) - v, so the earliest batch travels
// furthest.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ftmux/config.hpp"
#include "ftmux/errors.hpp"

namespace ftmux {

/// Fraction of light transmitted through a component with the given loss.
inline double db_to_survival(double loss_db) {
  if (!(loss_db >= 0.0)) throw DomainError("loss in dB must be >= 0");
  return std::pow(10.0, -loss_db / 10.0);
}

/// Fraction of light lost, 1 - db_to_survival(loss_db).
inline double db_to_loss_fraction(double loss_db) { return -std::expm1(-loss_db / 10.0 * std::log(10.0)); }

/// Greedy largest-first split of a delay into loop passes. The result has one
/// count per entry of `loop_lengths`, in the same order.
inline std::vector<long long> decompose_delay(long long delay, std::span<const int> loop_lengths) {
  if (delay < 0) throw DomainError("delay must be >= 0");
  if (loop_lengths.empty() || loop_lengths.back() != 1)
    throw DomainError("loop lengths must be non-empty and end in 1");
  std::vector<long long> counts;
  counts.reserve(loop_lengths.size());
  for (int len : loop_lengths) {
    counts.push_back(delay / len);
    delay %= len;
  }
  return counts;
}

struct DelayAssignment {
  int batch = 0;              ///< emission-order batch index (== frequency bin)
  long long delay = 0;        ///< timesteps spent in the memory
  int fbg_depth = 0;          ///< gratings transmitted before reflection
  std::map<int, long long> loop_passes;  ///< loop length -> pass count

  bool operator==(const DelayAssignment&) const = default;
};

/// Grating depth of a batch: the earliest batch is reflected deepest.
inline int fbg_depth(const SetupConfig& config, int batch) { return config.batch_count() - 1 - batch; }

/// Largest delay a photon serving `batch` can need. Fixed-variant photons come
/// from inside their own batch; Partial-variant photons may come from any
/// earlier bin.
inline long long max_delay(const SetupConfig& config, int batch) {
  if (config.variant == Variant::Fixed) return config.m - 1;
  return static_cast<long long>(batch + 1) * config.m - 1;
}

inline DelayAssignment make_assignment(const SetupConfig& config, int batch, long long delay) {
  if (batch < 0 || batch >= config.batch_count())
    throw DomainError("batch index " + std::to_string(batch) + " out of range");
  if (delay < 0 || delay > max_delay(config, batch))
    throw DomainError("delay " + std::to_string(delay) + " out of range for batch " + std::to_string(batch));
  DelayAssignment a;
  a.batch = batch;
  a.delay = delay;
  a.fbg_depth = fbg_depth(config, batch);
  auto counts = decompose_delay(delay, config.loop_lengths);
  for (std::size_t i = 0; i < counts.size(); ++i) a.loop_passes[config.loop_lengths[i]] = counts[i];
  return a;
}

/// Total loss in dB along the path described by `a`.
inline double path_loss_db(const SetupConfig& config, const DelayAssignment& a) {
  if (a.batch < 0 || a.batch >= config.batch_count()) throw DomainError("assignment batch out of range");
  if (a.delay < 0 || a.delay > max_delay(config, a.batch)) throw DomainError("assignment delay out of range");
  if (a.fbg_depth != fbg_depth(config, a.batch)) throw DomainError("assignment grating depth inconsistent with batch");

  const LossTable& t = config.loss_table;
  double db = t.misc_for_loops(config.loop_lengths.size()) + 2.0 * t.circulator_pass;
  long long stored = 0;
  for (const auto& [len, passes] : a.loop_passes) {
    if (passes < 0) throw DomainError("negative loop pass count");
    if (passes == 0) continue;
    if (std::find(config.loop_lengths.begin(), config.loop_lengths.end(), len) == config.loop_lengths.end())
      throw DomainError("assignment uses loop length " + std::to_string(len) + " not present in the setup");
    db += static_cast<double>(passes) * t.loop_loss(len);
    stored += passes * len;
  }
  if (stored != a.delay) throw DomainError("loop passes do not add up to the delay");

  const double d = a.fbg_depth;
  db += 2.0 * d * t.fbg_transmission + t.fbg_reflection;
  db += d * config.m * t.fiber_per_timestep;
  return db;
}

/// Probability that a photon serving `batch` with `delay` survives the setup.
inline double survival_prob(const SetupConfig& config, int batch, long long delay) {
  return db_to_survival(path_loss_db(config, make_assignment(config, batch, delay)));
}

/// survival_prob() tabulated over every admissible (batch, delay) of a config.
class SurvivalTable {
 public:
  explicit SurvivalTable(const SetupConfig& config) : rows_(static_cast<std::size_t>(config.batch_count())) {
    for (int b = 0; b < config.batch_count(); ++b) {
      auto& row = rows_[static_cast<std::size_t>(b)];
      row.resize(static_cast<std::size_t>(ftmux::max_delay(config, b) + 1));
      for (std::size_t d = 0; d < row.size(); ++d) row[d] = survival_prob(config, b, static_cast<long long>(d));
      // beyond[d]: best survival at any delay > d (0 past the end).
      auto& beyond = beyond_.emplace_back(row.size(), 0.0);
      for (std::size_t d = row.size() - 1; d > 0; --d) beyond[d - 1] = std::max(beyond[d], row[d]);
    }
  }

  double operator()(int batch, long long delay) const {
    return rows_[static_cast<std::size_t>(batch)][static_cast<std::size_t>(delay)];
  }

  /// Best survival reachable with a delay strictly larger than `delay`.
  double best_beyond(int batch, long long delay) const {
    return beyond_[static_cast<std::size_t>(batch)][static_cast<std::size_t>(delay)];
  }

  long long max_delay(int batch) const {
    return static_cast<long long>(rows_[static_cast<std::size_t>(batch)].size()) - 1;
  }

 private:
  std::vector<std::vector<double>> rows_;
  std::vector<std::vector<double>> beyond_;
};

}  // namespace ftmux
