#include <gtest/gtest.h>

#include <cmath>

#include "ftmux/commands.hpp"
#include "ftmux/plot.hpp"

using namespace ftmux;
using namespace ftmux::cli;

namespace {

SweepSpec spec_for(Preset p, std::vector<int> n, int m_max = 300) {
  SweepSpec s;
  s.config = preset(p);
  s.source = std::string(to_string(p));
  s.n_values = std::move(n);
  s.m_max = m_max;
  return s;
}

double num(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  return static_cast<double>(std::get<long long>(c));
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t k = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++k;
  return k;
}

}  // namespace

TEST(LossesValidate, DefaultTableMatchesReference) {
  const ValidationReport r = losses_validate(preset(Preset::OneLoopDefault), true);
  EXPECT_EQ(r.exit_code, kOk) << r.text;
  EXPECT_NE(r.text.find("circulator 0.500 dB / 10.9 %"), std::string::npos) << r.text;
  EXPECT_NE(r.text.find("misc_3_loop 0.931 dB / 19.3 %"), std::string::npos) << r.text;
  EXPECT_EQ(r.text.find("MISMATCH"), std::string::npos);
}

TEST(LossesValidate, LosslessRowsAreZero) {
  const ValidationReport r = losses_validate(preset(Preset::Lossless), false);
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_EQ(count(r.text, " 0 dB / 0 %"), loss_entries(preset(Preset::Lossless).loss_table).size()) << r.text;
}

TEST(LossesValidate, DeviationFromReferenceFails) {
  SetupConfig c = preset(Preset::OneLoopDefault);
  c.loss_table.circulator_pass = 0.6;
  const ValidationReport r = losses_validate(c, true);
  EXPECT_EQ(r.exit_code, kThresholdFailure);
  EXPECT_NE(r.text.find("MISMATCH"), std::string::npos);
}

TEST(LossesValidate, NegativeDbRejected) {
  SetupConfig c = preset(Preset::OneLoopDefault);
  c.loss_table.fbg_reflection = -0.1;
  EXPECT_THROW(losses_validate(c, true), ConfigError);
}

TEST(RateSweep, Rows) {
  const Table t = rate_sweep(spec_for(Preset::OneLoopDefault, {4}, 10));
  ASSERT_EQ(t.rows.size(), 10u);
  EXPECT_NEAR(num(t.rows[0][2]), 2.5e-5, 1e-18);
  EXPECT_NEAR(num(t.rows[9][2]), 4.49906042459964e-3, 1e-15);
  EXPECT_NEAR(num(t.rows[9][4]), 4.49906042459964e-3 / 1e-8, 1e-7);
  EXPECT_NEAR(num(t.rows[0][6]), 1e-4, 1e-18);
  for (const auto& row : t.rows) EXPECT_LT(num(row[3]), num(row[2]));
}

TEST(RateSweep, LosslessColumnsCoincide) {
  const Table t = rate_sweep(spec_for(Preset::Lossless, {2, 5}, 40));
  for (const auto& row : t.rows) EXPECT_NEAR(num(row[3]), num(row[2]), 1e-15);
}

TEST(RateSweep, CsvIsSelfDescribing) {
  const std::string csv = to_csv(rate_sweep(spec_for(Preset::OneLoopDefault, {4}, 3)));
  EXPECT_EQ(csv.rfind("# command: rate-sweep\n# config: {", 0), 0u);
  EXPECT_NE(csv.find("# units:"), std::string::npos);
  EXPECT_NE(csv.find("\nn,m,rate_lossless_per_bin,rate_lossy_per_bin,rate_lossless_hz,rate_lossy_hz"),
            std::string::npos);
  const ParsedCsv parsed = parse_csv(csv);
  EXPECT_EQ(parsed.rows.size(), 3u);
  const auto json = nlohmann::json::parse(to_json_text(rate_sweep(spec_for(Preset::OneLoopDefault, {4}, 3))));
  EXPECT_EQ(json["rows"].size(), 3u);
  EXPECT_DOUBLE_EQ(json["rows"][0]["rate_lossless_per_bin"].get<double>(), 2.5e-5);
}

TEST(RateSweep, RejectsPartialAndBadRanges) {
  SweepSpec s = spec_for(Preset::OneLoopDefault, {4}, 10);
  s.config.variant = Variant::Partial;
  EXPECT_THROW(rate_sweep(s), ConfigError);
  EXPECT_THROW(rate_sweep(spec_for(Preset::OneLoopDefault, {4}, 0)), ConfigError);
  EXPECT_THROW(rate_sweep(spec_for(Preset::OneLoopDefault, {0}, 10)), ConfigError);
}

TEST(MaxRate, EightPhotonsNearOneKilohertz) {
  const Table t = max_rate(spec_for(Preset::OneLoopDefault, {8}));
  const double per_bin = num(t.rows[0][3]);
  EXPECT_GT(per_bin, 1e-5 / 2.5);
  EXPECT_LT(per_bin, 1e-5 * 2.5);
  EXPECT_NEAR(num(t.rows[0][4]), 1e-8, 1e-20);
}

TEST(MaxRate, LosslessFourPhotons) {
  const Table t = max_rate(spec_for(Preset::Lossless, {4}));
  EXPECT_EQ(std::get<long long>(t.rows[0][1]), 22);
  EXPECT_NEAR(num(t.rows[0][2]), 7.50627374112862e-3, 1e-15);
  EXPECT_EQ(std::get<long long>(t.rows[0][5]), 22);
}

TEST(MaxRate, ZeroProbability) {
  SweepSpec s = spec_for(Preset::OneLoopDefault, {1, 4}, 50);
  s.config.p = 0.0;
  for (const auto& row : max_rate(s).rows) {
    EXPECT_EQ(num(row[2]), 0.0);
    EXPECT_EQ(num(row[3]), 0.0);
    EXPECT_EQ(num(row[4]), 0.0);
  }
}

TEST(RatioSweep, Examples) {
  SweepSpec one = spec_for(Preset::OneLoopDefault, {8});
  one.p_values = {0.1};
  const double headline = num(ratio_sweep(one).rows[0][2]);
  EXPECT_GT(headline, 2000 / 2.5);
  EXPECT_LT(headline, 2000 * 2.5);

  SweepSpec lossless = spec_for(Preset::Lossless, {3, 6}, 1);
  lossless.p_values = {0.05, 0.2};
  for (const auto& row : ratio_sweep(lossless).rows) EXPECT_NEAR(num(row[2]), 1.0 / num(row[0]), 1e-12);

  SweepSpec three = spec_for(Preset::ThreeLoopDefault, {4});
  three.p_values = {0.02, 0.1};
  const Table t = ratio_sweep(three);
  EXPECT_GT(num(t.rows[0][2]), num(t.rows[1][2]));
}

TEST(RatioSweep, ZeroProbabilityInGrid) {
  SweepSpec s = spec_for(Preset::ThreeLoopDefault, {4});
  s.p_values = {0.0, 0.1};
  EXPECT_THROW(ratio_sweep(s), ConfigError);
}

TEST(LogGrid, Endpoints) {
  const auto g = parse_log_grid("1e-3:0.3:25");
  ASSERT_EQ(g.size(), 25u);
  EXPECT_NEAR(g.front(), 1e-3, 1e-15);
  EXPECT_NEAR(g.back(), 0.3, 1e-12);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
  EXPECT_THROW(parse_log_grid("0:0.3:5"), ConfigError);
  EXPECT_THROW(parse_log_grid("0.1-0.3"), ConfigError);
}

TEST(EpsilonRates, Rows) {
  SweepSpec s = spec_for(Preset::OneLoopDefault, {8});
  s.epsilons = {0.2};
  const Table t = epsilon_rates(s);
  EXPECT_EQ(std::get<long long>(t.rows[0][2]), 36);
  EXPECT_NEAR(num(t.rows[0][4]), 2.85616586197539e-3, 1e-15);
  EXPECT_GE(num(t.rows[0][6]), 0.8);
  s.epsilons = {1.5};
  EXPECT_THROW(epsilon_rates(s), ConfigError);
}

TEST(McPartial, SameSeedSameBytes) {
  SweepSpec s = spec_for(Preset::OneLoopDefault, {2, 3}, 6);
  s.config.variant = Variant::Partial;
  s.mc = {5'000, 99, 1};
  s.occupancies = {Occupancy::Unlimited, Occupancy::Single};
  const std::string a = to_csv(mc_partial(s));
  s.mc.workers = 4;
  const std::string b = to_csv(mc_partial(s));
  EXPECT_EQ(a, b);
  s.mc.seed = 100;
  EXPECT_NE(a, to_csv(mc_partial(s)));
  EXPECT_NE(a.find("# samples: 5000; seed: 99"), std::string::npos);
}

TEST(McPartial, CertainPhotonsSingleSample) {
  SweepSpec s = spec_for(Preset::Lossless, {2}, 3);
  s.config.variant = Variant::Partial;
  s.config.p = 1.0;
  s.mc = {1, 5, 1};
  const Table t = mc_partial(s);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(std::get<long long>(t.rows[0][1]), 1);
  EXPECT_DOUBLE_EQ(num(t.rows[0][2]), 1.0 / 4);  // success 1 over 2n*m = 4 bins
  EXPECT_EQ(num(t.rows[0][3]), 0.0);
  EXPECT_EQ(std::get<std::string>(t.rows[0][5]), "Unlimited");
}

TEST(McPartial, RequiresPartialVariant) {
  SweepSpec s = spec_for(Preset::Lossless, {2}, 3);
  EXPECT_THROW(mc_partial(s), ConfigError);
}

TEST(Plot, RateSweepCurves) {
  const std::string csv = to_csv(rate_sweep(spec_for(Preset::OneLoopDefault, {4, 6}, 50)));
  const std::string svg = plot_csv(csv, PlotStyle::Lines);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  // lossless, lossy and baseline curve per n
  EXPECT_EQ(count(svg, "<polyline"), 6u);
  EXPECT_NE(svg.find("n=4 lossy"), std::string::npos);
  EXPECT_EQ(svg, plot_csv(csv, PlotStyle::Lines));
}

TEST(Plot, RatioSweepIsLogLog) {
  SweepSpec s = spec_for(Preset::ThreeLoopDefault, {4, 6, 8}, 100);
  s.p_values = log_grid(0.01, 0.3, 5);
  const Figure f = figure_from_csv(parse_csv(to_csv(ratio_sweep(s))));
  EXPECT_TRUE(f.x_log);
  EXPECT_TRUE(f.y_log);
  EXPECT_EQ(f.series.size(), 3u);
  const std::string svg = render_svg(f, PlotStyle::Markers);
  EXPECT_EQ(count(svg, "<circle"), 15u);
}

TEST(Plot, MaxRateAndMcSchemas) {
  EXPECT_EQ(figure_from_csv(parse_csv(to_csv(max_rate(spec_for(Preset::OneLoopDefault, {1, 2, 3}, 40))))).series.size(),
            3u);
  SweepSpec s = spec_for(Preset::OneLoopDefault, {1, 2}, 3);
  s.config.variant = Variant::Partial;
  s.mc = {500, 1, 1};
  EXPECT_EQ(figure_from_csv(parse_csv(to_csv(mc_partial(s)))).series.size(), 2u);
}

TEST(Plot, RejectsEmptyAndUnknown) {
  EXPECT_THROW(plot_csv("", PlotStyle::Lines), ConfigError);
  EXPECT_THROW(plot_csv("# comment only\n", PlotStyle::Lines), ConfigError);
  EXPECT_THROW(plot_csv("n,m,rate_lossless_per_bin,rate_lossy_per_bin\n", PlotStyle::Lines), ConfigError);
  EXPECT_THROW(plot_csv("a,b\n1,2\n", PlotStyle::Lines), ConfigError);
  EXPECT_THROW(plot_csv("n,p,ratio\n4,0.1\n", PlotStyle::Lines), ConfigError);
}
