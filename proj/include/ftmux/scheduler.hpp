#pragma once

// Photon grids and memory switching schedules.
//
// Batch b spans time bins [b*m, (b+1)*m - 1] and is served by frequency b; the
// grating array fixes that pairing. A batch is filled by storing one
// frequency-b photon until the batch's final bin. The latest usable photon
// has the shortest storage interval, but with several loops an earlier one
// can survive better (one pass of a long loop beats many of a short one).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ftmux/config.hpp"
#include "ftmux/errors.hpp"
#include "ftmux/loss_ledger.hpp"
#include "ftmux/random.hpp"
#include "ftmux/summation.hpp"

namespace ftmux {

/// Occupancy of frequency bins (rows) by time bins (columns).
class PhotonGrid {
 public:
  PhotonGrid() = default;
  PhotonGrid(int rows, int cols) : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows) * cols, 0) {
    if (rows < 0 || cols < 0) throw DomainError("grid dimensions must be non-negative");
  }

  /// Empty grid sized for `config`: F x (F*m) with F = number of batches.
  static PhotonGrid for_config(const SetupConfig& config) {
    const int f = config.batch_count();
    return PhotonGrid(f, f * config.m);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool at(int row, int col) const { return cells_[index(row, col)] != 0; }
  void set(int row, int col, bool occupied = true) { cells_[index(row, col)] = occupied ? 1 : 0; }

  std::size_t count() const { return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1)); }

  bool matches(const SetupConfig& config) const {
    return rows_ == config.batch_count() && cols_ == config.batch_count() * config.m;
  }

  bool operator==(const PhotonGrid&) const = default;

 private:
  std::size_t index(int row, int col) const {
    if (row < 0 || row >= rows_ || col < 0 || col >= cols_) throw DomainError("grid cell out of range");
    return static_cast<std::size_t>(row) * cols_ + col;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> cells_;
};

struct Schedule {
  std::vector<DelayAssignment> fills;  ///< ordered by batch
  std::vector<int> unfilled;           ///< batches left empty

  bool operator==(const Schedule&) const = default;
};

/// Per batch, the delays of the photons worth storing, shortest first. Every
/// later entry survives strictly better than all earlier ones, so the list is
/// the frontier between storage time and survival; a photon off the frontier
/// is beaten on both by one on it. Fixed batches keep only their latest
/// photon. Empty when the batch has no usable photon.
using BatchDelays = std::vector<std::vector<long long>>;

/// Per batch, an index into that batch's delays, or -1 when left unfilled.
using Selection = std::vector<int>;

inline long long batch_end(const SetupConfig& config, int batch) {
  return static_cast<long long>(batch + 1) * config.m - 1;
}

namespace detail {

/// Empty bins before the next photon when walking a Bernoulli(p) row. Returns
/// nullopt when the gap reaches `limit`.
inline std::optional<long long> geometric_gap(CounterStream& stream, double log_q, long long limit) {
  if (limit <= 0) return std::nullopt;
  if (log_q == 0.0) return std::nullopt;  // p == 0
  const double gap = std::floor(std::log(stream.uniform_open0()) / log_q);
  if (!(gap < static_cast<double>(limit))) return std::nullopt;
  return static_cast<long long>(gap);
}

inline double log_empty(double p) { return p >= 1.0 ? -std::numeric_limits<double>::infinity() : std::log1p(-p); }

inline std::uint64_t row_key(std::uint64_t sample_key, StreamLabel part, int row) {
  return derive_key(sample_key, {static_cast<std::uint64_t>(part), static_cast<std::uint64_t>(row)});
}

// Feeds photon delays in increasing order. Returns false once no longer
// delay could join the frontier.
inline bool offer(std::vector<long long>& frontier, const SetupConfig& config, const SurvivalTable& survival,
                  int batch, long long delay) {
  if (frontier.empty() || survival(batch, delay) > survival(batch, frontier.back())) frontier.push_back(delay);
  if (config.variant == Variant::Fixed) return false;
  return survival.best_beyond(batch, delay) > survival(batch, frontier.back());
}

}  // namespace detail

/// Draws a grid with each cell independently occupied with probability p.
/// Row r is generated backward from batch_end(r) with one stream and forward
/// after it with another, so sample_batch_delays(config, key) sees exactly the
/// photons this grid holds.
inline PhotonGrid sample_grid(const SetupConfig& config, std::uint64_t sample_key) {
  PhotonGrid grid = PhotonGrid::for_config(config);
  const double log_q = detail::log_empty(config.p);
  for (int row = 0; row < grid.rows(); ++row) {
    const long long end = batch_end(config, row);
    CounterStream head(detail::row_key(sample_key, StreamLabel::GridHead, row));
    for (long long pos = end;;) {
      auto gap = detail::geometric_gap(head, log_q, pos + 1);
      if (!gap) break;
      pos -= *gap;
      grid.set(row, static_cast<int>(pos));
      --pos;
    }
    CounterStream tail(detail::row_key(sample_key, StreamLabel::GridTail, row));
    for (long long pos = end + 1;;) {
      auto gap = detail::geometric_gap(tail, log_q, grid.cols() - pos);
      if (!gap) break;
      pos += *gap;
      grid.set(row, static_cast<int>(pos));
      ++pos;
    }
  }
  return grid;
}

/// Frontier delays per batch, drawn without materializing the grid. The walk
/// stops as soon as no earlier photon could help, which for a single loop is
/// right after the latest one.
inline BatchDelays sample_batch_delays(const SetupConfig& config, std::uint64_t sample_key,
                                       const SurvivalTable& survival) {
  const double log_q = detail::log_empty(config.p);
  BatchDelays delays(static_cast<std::size_t>(config.batch_count()));
  for (int row = 0; row < config.batch_count(); ++row) {
    CounterStream head(detail::row_key(sample_key, StreamLabel::GridHead, row));
    const long long limit = survival.max_delay(row);
    for (long long d = 0;;) {
      auto gap = detail::geometric_gap(head, log_q, limit + 1 - d);
      if (!gap) break;
      d += *gap;
      if (!detail::offer(delays[static_cast<std::size_t>(row)], config, survival, row, d)) break;
      ++d;
    }
  }
  return delays;
}

inline BatchDelays sample_batch_delays(const SetupConfig& config, std::uint64_t sample_key) {
  return sample_batch_delays(config, sample_key, SurvivalTable(config));
}

/// Frontier delays per batch read off a grid.
inline BatchDelays batch_delays(const PhotonGrid& grid, const SetupConfig& config, const SurvivalTable& survival) {
  if (!grid.matches(config)) throw DomainError("grid dimensions do not match the config");
  BatchDelays delays(static_cast<std::size_t>(config.batch_count()));
  for (int b = 0; b < config.batch_count(); ++b) {
    const long long end = batch_end(config, b);
    for (long long d = 0; d <= survival.max_delay(b); ++d)
      if (grid.at(b, static_cast<int>(end - d)) && !detail::offer(delays[static_cast<std::size_t>(b)], config, survival, b, d))
        break;
  }
  return delays;
}

inline BatchDelays batch_delays(const PhotonGrid& grid, const SetupConfig& config) {
  return batch_delays(grid, config, SurvivalTable(config));
}

namespace detail {

inline long long picked(const BatchDelays& delays, const Selection& sel, int b) {
  return delays[static_cast<std::size_t>(b)][static_cast<std::size_t>(sel[static_cast<std::size_t>(b)])];
}

inline Schedule build_schedule(const SetupConfig& config, const BatchDelays& delays, const Selection& sel) {
  Schedule s;
  for (int b = 0; b < config.batch_count(); ++b) {
    if (sel[static_cast<std::size_t>(b)] >= 0)
      s.fills.push_back(make_assignment(config, b, picked(delays, sel, b)));
    else
      s.unfilled.push_back(b);
  }
  return s;
}

inline std::optional<Selection> choose_fixed(const SetupConfig& config, const BatchDelays& delays) {
  for (const auto& d : delays)
    if (d.empty()) return std::nullopt;
  return Selection(static_cast<std::size_t>(config.batch_count()), 0);
}

// Unlimited occupancy: any n fillable batches, each with its best photon;
// keep the n best survivors.
inline std::optional<Selection> choose_unlimited(const SetupConfig& config, const BatchDelays& delays,
                                                 const SurvivalTable& survival) {
  std::vector<int> fillable;
  for (int b = 0; b < config.batch_count(); ++b)
    if (!delays[static_cast<std::size_t>(b)].empty()) fillable.push_back(b);
  if (static_cast<int>(fillable.size()) < config.n) return std::nullopt;
  auto best = [&](int b) { return survival(b, delays[static_cast<std::size_t>(b)].back()); };
  std::stable_sort(fillable.begin(), fillable.end(), [&](int a, int b) { return best(a) > best(b); });
  Selection sel(static_cast<std::size_t>(config.batch_count()), -1);
  for (int i = 0; i < config.n; ++i) {
    const int b = fillable[static_cast<std::size_t>(i)];
    sel[static_cast<std::size_t>(b)] = static_cast<int>(delays[static_cast<std::size_t>(b)].size()) - 1;
  }
  return sel;
}

// Single occupancy: storage intervals [end - delay, end] may touch but not
// overlap. Intervals are visited in order of their (distinct) end bins, so a
// positive-length interval only has to start at or after the end of the
// previous positive-length one; zero-delay fills never conflict. Dynamic
// program over (last stored batch, fills so far) maximizing joint survival.
inline std::optional<Selection> choose_single(const SetupConfig& config, const BatchDelays& delays,
                                              const SurvivalTable& survival) {
  const int batches = config.batch_count();
  const int need = config.n;
  const std::size_t width = static_cast<std::size_t>(need + 1);
  const std::size_t states = static_cast<std::size_t>(batches + 1) * width;
  constexpr double kNone = -1.0;
  struct Choice {
    int prev_last = -2;
    int prev_k = -1;
    int candidate = -1;  // -1: state carried over from the previous batch
  };
  // best[(last + 1) * width + k]: max product with k fills whose last stored
  // batch is `last` (-1: none yet). trail holds one state table per batch.
  std::vector<double> best(states, kNone), next;
  std::vector<Choice> trail(static_cast<std::size_t>(batches) * states);
  best[0] = 1.0;
  for (int b = 0; b < batches; ++b) {
    next = best;
    Choice* step = trail.data() + static_cast<std::size_t>(b) * states;
    const auto& cands = delays[static_cast<std::size_t>(b)];
    for (int ci = 0; ci < static_cast<int>(cands.size()); ++ci) {
      const long long delay = cands[static_cast<std::size_t>(ci)];
      const long long start = batch_end(config, b) - delay;
      const double surv = survival(b, delay);
      for (int last = -1; last < b; ++last) {
        if (delay > 0 && last >= 0 && start < batch_end(config, last)) continue;
        const std::size_t from = static_cast<std::size_t>(last + 1) * width;
        const std::size_t to = static_cast<std::size_t>((delay > 0 ? b : last) + 1) * width;
        for (int k = 0; k < need; ++k) {
          const double cur = best[from + static_cast<std::size_t>(k)];
          if (cur == kNone) continue;
          const double val = cur * surv;
          const std::size_t slot = to + static_cast<std::size_t>(k + 1);
          if (val > next[slot]) {
            next[slot] = val;
            step[slot] = {last, k, ci};
          }
        }
      }
    }
    std::swap(best, next);
  }

  int last = -2;
  double top = kNone;
  for (int l = -1; l < batches; ++l) {
    const double v = best[static_cast<std::size_t>(l + 1) * width + static_cast<std::size_t>(need)];
    if (v > top) {
      top = v;
      last = l;
    }
  }
  if (top == kNone) return std::nullopt;

  Selection sel(static_cast<std::size_t>(batches), -1);
  int k = need;
  for (int b = batches - 1; b >= 0 && k > 0; --b) {
    const Choice& c = trail[static_cast<std::size_t>(b) * states + static_cast<std::size_t>(last + 1) * width +
                            static_cast<std::size_t>(k)];
    if (c.candidate < 0) continue;
    sel[static_cast<std::size_t>(b)] = c.candidate;
    last = c.prev_last;
    k = c.prev_k;
  }
  return sel;
}

}  // namespace detail

/// Which photon fills which batch; dispatches on variant and occupancy.
/// nullopt when no valid schedule exists.
inline std::optional<Selection> select_batches(const SetupConfig& config, const BatchDelays& delays,
                                               const SurvivalTable& survival) {
  if (static_cast<int>(delays.size()) != config.batch_count()) throw DomainError("one delay list per batch expected");
  if (config.variant == Variant::Fixed) return detail::choose_fixed(config, delays);
  if (config.occupancy == Occupancy::Unlimited) return detail::choose_unlimited(config, delays, survival);
  return detail::choose_single(config, delays, survival);
}

inline std::optional<Schedule> schedule_from_delays(const SetupConfig& config, const BatchDelays& delays,
                                                    const SurvivalTable& survival) {
  auto sel = select_batches(config, delays, survival);
  if (!sel) return std::nullopt;
  return detail::build_schedule(config, delays, *sel);
}

/// Joint survival of the selected fills, multiplied in batch order.
inline double selection_survival(const BatchDelays& delays, const Selection& sel, const SurvivalTable& survival) {
  double prod = 1.0;
  for (std::size_t b = 0; b < sel.size(); ++b)
    if (sel[b] >= 0) prod *= survival(static_cast<int>(b), detail::picked(delays, sel, static_cast<int>(b)));
  return prod;
}

/// Joint survival of a schedule's fills from a precomputed table.
inline double schedule_survival(const Schedule& schedule, const SurvivalTable& survival) {
  double prod = 1.0;
  for (const auto& fill : schedule.fills) prod *= survival(fill.batch, fill.delay);
  return prod;
}

/// Delays the last photon of each batch's frequency inside that batch to the
/// batch's final bin. Fails unless every batch has one.
inline std::optional<Schedule> schedule_fixed(const PhotonGrid& grid, const SetupConfig& config) {
  if (config.variant != Variant::Fixed) throw DomainError("schedule_fixed needs the Fixed variant");
  const BatchDelays delays = batch_delays(grid, config);
  auto sel = detail::choose_fixed(config, delays);
  if (!sel) return std::nullopt;
  return detail::build_schedule(config, delays, *sel);
}

/// Fills exactly n of the 2n batches, maximizing joint survival under the
/// configured occupancy model.
inline std::optional<Schedule> schedule_partial(const PhotonGrid& grid, const SetupConfig& config) {
  if (config.variant != Variant::Partial) throw DomainError("schedule_partial needs the Partial variant");
  const SurvivalTable survival(config);
  return schedule_from_delays(config, batch_delays(grid, config, survival), survival);
}

inline std::optional<Schedule> schedule(const PhotonGrid& grid, const SetupConfig& config) {
  return config.variant == Variant::Fixed ? schedule_fixed(grid, config) : schedule_partial(grid, config);
}

/// Product of fill survivals.
inline double schedule_survival(const Schedule& schedule, const SetupConfig& config) {
  double prod = 1.0;
  for (const auto& fill : schedule.fills) prod *= db_to_survival(path_loss_db(config, fill));
  return prod;
}

struct ExactSuccess {
  double p_lossless = 0.0;
  double p_lossy = 0.0;
};

/// Largest grid, in cells, that brute_force_success will enumerate.
inline constexpr int kMaxEnumeratedCells = 16;

/// Exact success probabilities by enumerating all 2^(F*T) grids.
inline ExactSuccess brute_force_success(const SetupConfig& config) {
  config.validate();
  const int rows = config.batch_count();
  const long long cells = static_cast<long long>(rows) * rows * config.m;
  if (cells > kMaxEnumeratedCells)
    throw CapacityError("enumeration limited to " + std::to_string(kMaxEnumeratedCells) + " cells, config needs " +
                        std::to_string(cells));
  const int cols = rows * config.m;
  const SurvivalTable survival(config);
  CompensatedSum lossless;
  CompensatedSum lossy;
  for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
    PhotonGrid grid(rows, cols);
    int k = 0;
    for (int c = 0; c < cells; ++c) {
      if (mask & (1u << c)) {
        grid.set(c / cols, c % cols);
        ++k;
      }
    }
    const double weight = std::pow(config.p, k) * std::pow(1.0 - config.p, static_cast<double>(cells - k));
    if (weight == 0.0) continue;
    auto s = schedule_from_delays(config, batch_delays(grid, config, survival), survival);
    if (!s) continue;
    lossless += weight;
    lossy += weight * schedule_survival(*s, survival);
  }
  return {lossless.value(), lossy.value()};
}

/// CSV snapshot: one line per frequency bin, one 0/1 cell per time bin.
inline std::string grid_to_csv(const PhotonGrid& grid) {
  std::ostringstream out;
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) out << (c ? "," : "") << (grid.at(r, c) ? '1' : '0');
    out << '\n';
  }
  return out.str();
}

inline PhotonGrid grid_from_csv(const std::string& text) {
  std::vector<std::vector<bool>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<bool> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      if (cell == "1")
        row.push_back(true);
      else if (cell == "0")
        row.push_back(false);
      else
        throw DomainError("grid cell must be 0 or 1, got '" + cell + "'");
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw DomainError("ragged grid CSV");
    rows.push_back(std::move(row));
  }
  PhotonGrid grid(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows.front().size()));
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c) grid.set(r, c, rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
  return grid;
}

}  // namespace ftmux
