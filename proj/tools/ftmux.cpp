// ftmux: rate sweeps, loss-table checks, Monte Carlo runs and plots for
// frequency-time multiplexed heralded photon sources.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ftmux/commands.hpp"
#include "ftmux/plot.hpp"

namespace {

using namespace ftmux;
using cli::SweepSpec;

struct Options {
  std::string preset;
  std::string config_path;
  std::optional<double> p;
  std::optional<double> t_bin;
  std::string variant;
  std::string occupancy;
  std::vector<int> n_values;
  int m_max = 0;
  std::string p_grid;
  std::vector<double> epsilons;
  long long samples = 1'000'000;
  std::uint64_t seed = 0x5eed;
  unsigned workers = 0;
  std::string out;
  std::string format = "csv";
  std::string csv_path;
  std::string style = "lines";
};

void add_source_options(CLI::App* cmd, Options& o) {
  auto* preset = cmd->add_option("--preset", o.preset, "OneLoopDefault | ThreeLoopDefault | Lossless");
  auto* config = cmd->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  preset->excludes(config);
  cmd->add_option("--p", o.p, "photon probability per frequency-time bin");
  cmd->add_option("--t-bin", o.t_bin, "time-bin duration in seconds");
  cmd->add_option("--variant", o.variant, "Fixed | Partial");
}

void add_output_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  cmd->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
}

void add_sweep_options(CLI::App* cmd, Options& o) {
  add_source_options(cmd, o);
  add_output_options(cmd, o);
  cmd->add_option("--n", o.n_values, "photon numbers, comma separated")->delimiter(',');
  cmd->add_option("--m-max", o.m_max, "largest batch size scanned");
}

SweepSpec build_spec(const Options& o, const std::string& default_preset, std::vector<int> default_n,
                     int default_m_max) {
  SweepSpec spec;
  if (!o.config_path.empty()) {
    spec.config = load_config(o.config_path);
    spec.source = o.config_path;
  } else {
    const std::string name = o.preset.empty() ? default_preset : o.preset;
    spec.config = preset(name);
    spec.source = name;
  }
  if (o.p) spec.config.p = *o.p;
  if (o.t_bin) spec.config.t_bin = *o.t_bin;
  if (!o.variant.empty()) spec.config.variant = variant_from_name(o.variant);
  spec.n_values = o.n_values.empty() ? std::move(default_n) : o.n_values;
  spec.config.n = spec.n_values.empty() ? 1 : spec.n_values.front();
  spec.m_max = o.m_max ? o.m_max : default_m_max;
  spec.config.validate();
  return spec;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + out + "'");
  f << text;
}

void emit_table(const Table& t, const Options& o) { emit(o.format == "json" ? to_json_text(t) : to_csv(t), o.out); }

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate model for frequency-time multiplexed n-photon generation"};
  app.require_subcommand(1);
  Options o;

  auto* losses = app.add_subcommand("losses", "loss table utilities");
  losses->require_subcommand(1);
  auto* validate = losses->add_subcommand("validate", "print the loss table in dB and percent");
  add_source_options(validate, o);

  auto* rate = app.add_subcommand("rate-sweep", "rates versus batch size m");
  add_sweep_options(rate, o);

  auto* maxr = app.add_subcommand("max-rate", "optimal-m rates versus n");
  add_sweep_options(maxr, o);

  auto* ratio = app.add_subcommand("ratio-sweep", "improvement over no multiplexing versus p");
  add_sweep_options(ratio, o);
  ratio->add_option("--p-grid", o.p_grid, "log grid lo:hi:count (default 1e-3:0.3:25)");

  auto* eps = app.add_subcommand("epsilon-rate", "batch size and rate for a target failure probability");
  add_sweep_options(eps, o);
  eps->add_option("--epsilon", o.epsilons, "failure probabilities, comma separated")->delimiter(',')->required();

  auto* mc = app.add_subcommand("mc-partial", "Monte Carlo rates for n photons in 2n frequency bins");
  add_sweep_options(mc, o);
  mc->add_option("--samples", o.samples, "grids per batch size");
  mc->add_option("--seed", o.seed, "64-bit seed");
  mc->add_option("--workers", o.workers, "worker threads (0: all cores); does not change results");
  mc->add_option("--occupancy", o.occupancy, "Unlimited | Single | both (default both)");

  auto* plot = app.add_subcommand("plot", "render a sweep CSV as SVG");
  plot->add_option("csv", o.csv_path, "CSV written by this tool")->required();
  plot->add_option("--style", o.style, "lines | markers")->check(CLI::IsMember({"lines", "markers"}));
  plot->add_option("--out", o.out, "output SVG (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kUsageError;
  }

  try {
    if (validate->parsed()) {
      SweepSpec spec = build_spec(o, "OneLoopDefault", {1}, 1);
      // A lossless table has nothing to compare.
      const bool reference = !spec.config.loss_table.all_zero();
      const auto report = cli::losses_validate(spec.config, reference);
      std::cout << "# source: " << spec.source << '\n' << report.text;
      return report.exit_code;
    }
    if (rate->parsed()) {
      emit_table(cli::rate_sweep(build_spec(o, "OneLoopDefault", {4, 6, 8}, kDefaultMaxBatchBins)), o);
    } else if (maxr->parsed()) {
      emit_table(cli::max_rate(build_spec(o, "OneLoopDefault", range(1, 10), kDefaultMaxBatchBins)), o);
    } else if (ratio->parsed()) {
      SweepSpec spec = build_spec(o, "ThreeLoopDefault", {4, 6, 8}, kDefaultMaxBatchBins);
      spec.p_values = o.p_grid.empty() ? cli::log_grid(1e-3, 0.3, 25) : cli::parse_log_grid(o.p_grid);
      emit_table(cli::ratio_sweep(spec), o);
    } else if (eps->parsed()) {
      SweepSpec spec = build_spec(o, "OneLoopDefault", {1, 4, 8, 16}, kDefaultMaxBatchBins);
      spec.epsilons = o.epsilons;
      emit_table(cli::epsilon_rates(spec), o);
    } else if (mc->parsed()) {
      Options with_variant = o;
      if (with_variant.variant.empty()) with_variant.variant = "Partial";
      SweepSpec spec = build_spec(with_variant, "OneLoopDefault", {2, 4, 6, 8}, 40);
      spec.mc = {o.samples, o.seed, o.workers};
      if (o.occupancy.empty() || o.occupancy == "both")
        spec.occupancies = {Occupancy::Unlimited, Occupancy::Single};
      else
        spec.occupancies = {occupancy_from_name(o.occupancy)};
      emit_table(cli::mc_partial(spec), o);
    } else if (plot->parsed()) {
      std::ifstream in(o.csv_path);
      if (!in) throw ConfigError("cannot read '" + o.csv_path + "'");
      std::ostringstream text;
      text << in.rdbuf();
      emit(plot_csv(text.str(), plot_style_from_name(o.style)), o.out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kUsageError;
  }
  return cli::kOk;
}
