#pragma once

// Experiment description shared by every part of the rate model: source
// statistics, batch geometry, memory-loop set and the component loss table.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ftmux/errors.hpp"

namespace ftmux {

/// Which output states count as a success.
enum class Variant {
  Fixed,    ///< n photons in n fixed frequency bins
  Partial,  ///< n photons in any n of 2n frequency bins
};

/// Memory occupancy model used when scheduling the Partial variant.
enum class Occupancy {
  Unlimited,  ///< any number of photons may be stored at once
  Single,     ///< at most one stored photon; inject and eject may share a timestep
};

enum class Preset { OneLoopDefault, ThreeLoopDefault, Lossless };

/// Default upper bound for batch-size scans.
inline constexpr int kDefaultMaxBatchBins = 300;
/// Default time-bin duration (10 ns).
inline constexpr double kDefaultTimeBin = 1.0e-8;
/// Default per-bin photon probability.
inline constexpr double kDefaultPhotonProbability = 0.1;

/// Component losses, all in dB. Values stay in dB until a path is summed.
struct LossTable {
  std::map<int, double> loop_pass;   ///< loop length (timesteps) -> loss per pass
  double fbg_transmission = 0.0;     ///< one transmission through a grating
  double fbg_reflection = 0.0;       ///< one reflection off a grating
  double fiber_per_timestep = 0.0;   ///< fiber length equal to one time bin
  double circulator_pass = 0.0;      ///< one pass through the circulator
  std::vector<double> misc;          ///< misc[k-1]: mandatory optics for a k-loop setup

  bool operator==(const LossTable&) const = default;

  /// True when every entry is exactly 0 dB.
  bool all_zero() const {
    auto zero = [](double v) { return v == 0.0; };
    return std::all_of(loop_pass.begin(), loop_pass.end(), [](const auto& kv) { return kv.second == 0.0; }) &&
           fbg_transmission == 0.0 && fbg_reflection == 0.0 && fiber_per_timestep == 0.0 &&
           circulator_pass == 0.0 && std::all_of(misc.begin(), misc.end(), zero);
  }

  double misc_for_loops(std::size_t loop_count) const {
    if (loop_count == 0 || loop_count > misc.size())
      throw ConfigError("no misc loss entry for a " + std::to_string(loop_count) + "-loop setup");
    return misc[loop_count - 1];
  }

  double loop_loss(int length) const {
    auto it = loop_pass.find(length);
    if (it == loop_pass.end())
      throw ConfigError("no loop_pass loss entry for loop length " + std::to_string(length));
    return it->second;
  }

  /// Throws ConfigError on any negative or non-finite entry.
  void validate() const {
    auto check = [](const std::string& name, double v) {
      if (!std::isfinite(v) || v < 0.0) throw ConfigError("loss entry '" + name + "' must be a finite value >= 0 dB");
    };
    for (const auto& [len, db] : loop_pass) {
      if (len < 1) throw ConfigError("loop_pass keys must be positive loop lengths");
      check("loop_pass[" + std::to_string(len) + "]", db);
    }
    check("fbg_transmission", fbg_transmission);
    check("fbg_reflection", fbg_reflection);
    check("fiber_per_timestep", fiber_per_timestep);
    check("circulator_pass", circulator_pass);
    for (std::size_t k = 0; k < misc.size(); ++k) check("misc[" + std::to_string(k + 1) + "]", misc[k]);
  }
};

/// Full description of one multiplexing experiment.
struct SetupConfig {
  double p = kDefaultPhotonProbability;
  int m = 1;
  int n = 1;
  double t_bin = kDefaultTimeBin;
  Variant variant = Variant::Fixed;
  std::vector<int> loop_lengths{1};
  Occupancy occupancy = Occupancy::Unlimited;
  LossTable loss_table;

  bool operator==(const SetupConfig&) const = default;

  /// Number of batches, which equals the number of frequency bins.
  int batch_count() const { return variant == Variant::Fixed ? n : 2 * n; }
  /// Scheme duration in time bins.
  long long total_bins() const { return static_cast<long long>(batch_count()) * m; }
  double batch_duration() const { return m * t_bin; }
  double total_duration() const { return static_cast<double>(total_bins()) * t_bin; }
  /// Grating pitch expressed as a one-way delay.
  double fbg_pitch() const { return batch_duration() / 2.0; }

  void validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
    if (m < 1) throw ConfigError("m must be >= 1");
    if (n < 1) throw ConfigError("n must be >= 1");
    if (!(t_bin > 0.0) || !std::isfinite(t_bin)) throw ConfigError("t_bin must be > 0");
    if (loop_lengths.empty()) throw ConfigError("loop_lengths must not be empty");
    for (std::size_t i = 1; i < loop_lengths.size(); ++i)
      if (loop_lengths[i] >= loop_lengths[i - 1]) throw ConfigError("loop_lengths must be strictly decreasing");
    if (loop_lengths.back() != 1) throw ConfigError("loop_lengths must end in 1");
    loss_table.validate();
    for (int len : loop_lengths) loss_table.loop_loss(len);
    loss_table.misc_for_loops(loop_lengths.size());
  }
};

/// Default component losses in dB.
inline LossTable default_loss_table() {
  LossTable t;
  t.loop_pass = {{1, 0.106}, {10, 0.110}, {100, 0.149}};
  t.fbg_transmission = 0.0436;
  t.fbg_reflection = 0.0436;
  t.fiber_per_timestep = 0.00102;
  t.circulator_pass = 0.500;
  t.misc = {0.510, 0.720, 0.931};
  return t;
}

inline LossTable zero_loss_table() {
  LossTable t;
  t.loop_pass = {{1, 0.0}, {10, 0.0}, {100, 0.0}};
  t.misc = {0.0, 0.0, 0.0};
  return t;
}

inline SetupConfig preset(Preset which) {
  SetupConfig c;
  c.p = kDefaultPhotonProbability;
  c.t_bin = kDefaultTimeBin;
  c.variant = Variant::Fixed;
  c.occupancy = Occupancy::Unlimited;
  switch (which) {
    case Preset::OneLoopDefault:
      c.loop_lengths = {1};
      c.loss_table = default_loss_table();
      break;
    case Preset::ThreeLoopDefault:
      c.loop_lengths = {100, 10, 1};
      c.loss_table = default_loss_table();
      break;
    case Preset::Lossless:
      c.loop_lengths = {1};
      c.loss_table = zero_loss_table();
      break;
  }
  return c;
}

inline std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::OneLoopDefault: return "OneLoopDefault";
    case Preset::ThreeLoopDefault: return "ThreeLoopDefault";
    case Preset::Lossless: return "Lossless";
  }
  return "?";
}

inline Preset preset_from_name(std::string_view name) {
  for (Preset p : {Preset::OneLoopDefault, Preset::ThreeLoopDefault, Preset::Lossless})
    if (to_string(p) == name) return p;
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

inline SetupConfig preset(std::string_view name) { return preset(preset_from_name(name)); }

inline std::string_view to_string(Variant v) { return v == Variant::Fixed ? "Fixed" : "Partial"; }
inline std::string_view to_string(Occupancy o) { return o == Occupancy::Unlimited ? "Unlimited" : "Single"; }

inline Variant variant_from_name(std::string_view s) {
  if (s == "Fixed" || s == "fixed") return Variant::Fixed;
  if (s == "Partial" || s == "partial") return Variant::Partial;
  throw ConfigError("unknown variant '" + std::string(s) + "'");
}

inline Occupancy occupancy_from_name(std::string_view s) {
  if (s == "Unlimited" || s == "unlimited") return Occupancy::Unlimited;
  if (s == "Single" || s == "single") return Occupancy::Single;
  throw ConfigError("unknown occupancy model '" + std::string(s) + "'");
}

/// One named line of a loss table.
struct LossEntry {
  std::string component;
  double db;
};

/// Flattened view of a loss table in a stable order.
inline std::vector<LossEntry> loss_entries(const LossTable& t) {
  std::vector<LossEntry> rows;
  for (auto it = t.loop_pass.begin(); it != t.loop_pass.end(); ++it)
    rows.push_back({"loop_pass_" + std::to_string(it->first), it->second});
  rows.push_back({"fbg_transmission", t.fbg_transmission});
  rows.push_back({"fbg_reflection", t.fbg_reflection});
  rows.push_back({"fiber_per_timestep", t.fiber_per_timestep});
  rows.push_back({"circulator", t.circulator_pass});
  for (std::size_t k = 0; k < t.misc.size(); ++k)
    rows.push_back({"misc_" + std::to_string(k + 1) + "_loop", t.misc[k]});
  return rows;
}

/// Reference loss percentages for the default table, keyed like loss_entries().
inline const std::map<std::string, double>& reference_loss_percent() {
  static const std::map<std::string, double> table{
      {"loop_pass_1", 2.41},      {"loop_pass_10", 2.50},       {"loop_pass_100", 3.37},
      {"fbg_transmission", 1.00}, {"fbg_reflection", 1.00},     {"fiber_per_timestep", 0.0235},
      {"circulator", 10.9},       {"misc_1_loop", 11.1},        {"misc_2_loop", 15.3},
      {"misc_3_loop", 19.3},
  };
  return table;
}

}  // namespace ftmux
