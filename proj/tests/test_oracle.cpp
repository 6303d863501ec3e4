// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <numeric>

#include "tron/errors.hpp"
#include "tron/oracle/reference_metrics.hpp"
#include "tron/oracle/synthetic.hpp"

using namespace tron;

namespace {

SyntheticScenario quiet(std::size_t days = 400) {
  SyntheticScenario sc;
  sc.n_days = days;
  sc.lat_step = 30.0;
  sc.lon_step = 60.0;
  sc.modulation_noise_sd = 0.0;
  sc.sensor_noise_sd = 0.0;
  return sc;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> column(const Tensor& t, std::size_t j) {
  std::vector<double> out(t.dim(0));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = t.at(i, j);
  return out;
}

}  // namespace

TEST(Modulation, ZeroAmplitudeZeroNoise) {
  auto sc = quiet();
  sc.amplitude = 0.0;
  for (double v : gen_modulation(sc)) EXPECT_EQ(v, 0.0);
}

TEST(Modulation, PureSinusoid) {
  auto sc = quiet(730);
  const auto m = gen_modulation(sc);
  double peak = 0.0;
  for (std::size_t t = 0; t < m.size(); ++t) {
    EXPECT_NEAR(m[t], sc.amplitude * std::sin(2.0 * std::numbers::pi * t / sc.period_days), 1e-15);
    peak = std::max(peak, std::abs(m[t]));
  }
  EXPECT_LE(peak, sc.amplitude);
  EXPECT_NEAR(peak, sc.amplitude, 1e-4);
}

TEST(Modulation, LagOneAutocorrelationOfNoise) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SyntheticScenario sc;
    sc.n_days = 4000;
    sc.amplitude = 0.0;
    sc.seed = seed;
    const auto m = gen_modulation(sc);
    const std::vector<double> a(m.begin(), m.end() - 1), b(m.begin() + 1, m.end());
    EXPECT_NEAR(correlation(a, b), sc.ar_coef, 0.05) << "seed " << seed;
  }
}

TEST(Modulation, DeterministicPerSeed) {
  SyntheticScenario sc;
  EXPECT_EQ(gen_modulation(sc), gen_modulation(sc));
  auto other = sc;
  other.seed = sc.seed + 1;
  EXPECT_NE(gen_modulation(sc), gen_modulation(other));
}

TEST(Sensors, ZeroSensitivityIsConstant) {
  auto sc = quiet();
  sc.sensor_sensitivities.assign(sc.n_sensors, 0.0);
  const auto s = gen_sensor_counts(gen_modulation(sc), sc);
  for (std::size_t t = 0; t < s.days(); ++t) {
    for (std::size_t k = 0; k < s.sensors(); ++k) EXPECT_EQ(s.counts.at(t, k), sc.sensor_offsets[k]);
  }
}

TEST(Sensors, AntiCorrelatedWithDriverAndEachOther) {
  const auto sc = quiet();
  const auto m = gen_modulation(sc);
  const auto s = gen_sensor_counts(m, sc);
  for (std::size_t k = 0; k < s.sensors(); ++k) EXPECT_NEAR(correlation(column(s.counts, k), m), -1.0, 1e-12);
  EXPECT_NEAR(correlation(column(s.counts, 0), column(s.counts, 3)), 1.0, 1e-12);
}

TEST(Sensors, IdsAndDates) {
  const auto sc = quiet(10);
  const auto s = gen_sensor_counts(gen_modulation(sc), sc);
  EXPECT_EQ(s.station_ids.front(), "SYN01");
  EXPECT_EQ(format_date(s.dates.front()), sc.start_date);
  EXPECT_EQ(format_date(s.dates.back()), "2001-01-10");
}

TEST(Field, EquatorIsBaseDose) {
  SyntheticScenario sc;
  sc.n_days = 300;
  sc.lat_step = 30.0;
  sc.lon_step = 60.0;
  const auto f = gen_dose_field(gen_modulation(sc), sc);
  std::size_t seen = 0;
  for (std::size_t j = 0; j < f.points(); ++j) {
    if (f.grid.degrees.at(j, 1) != 0.0) continue;
    ++seen;
    for (std::size_t t = 0; t < f.days(); ++t) EXPECT_EQ(f.values.at(t, j), sc.base_dose);
  }
  EXPECT_EQ(seen, 7u);
}

TEST(Field, ZeroModulationGivesBaseDoseEverywhere) {
  auto sc = quiet(50);
  sc.amplitude = 0.0;
  const auto f = gen_dose_field(gen_modulation(sc), sc);
  for (double v : f.values.data()) EXPECT_EQ(v, sc.base_dose);
}

TEST(Field, PolesCarryMaximalVariance) {
  SyntheticScenario sc;
  sc.n_days = 730;
  sc.lat_step = 10.0;
  sc.lon_step = 40.0;
  const auto f = gen_dose_field(gen_modulation(sc), sc);
  double best = -1.0, best_abs_lat = 0.0;
  for (std::size_t j = 0; j < f.points(); ++j) {
    const auto x = column(f.values, j);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    if (var > best * (1.0 + 1e-12)) {
      best = var;
      best_abs_lat = std::abs(f.grid.degrees.at(j, 1));
    }
  }
  EXPECT_EQ(best_abs_lat, 90.0);
}

TEST(Field, FieldDependsOnTrailingMean) {
  const auto sc = quiet(60);
  const auto m = gen_modulation(sc);
  const auto f = gen_dose_field(m, sc);
  const auto mean = trailing_mean(m, sc.memory_lag);
  const std::size_t pole = f.points() - 1;
  ASSERT_EQ(f.grid.degrees.at(pole, 1), 90.0);
  for (std::size_t t = 0; t < 60; ++t) {
    const std::size_t lo = t + 1 >= sc.memory_lag ? t + 1 - sc.memory_lag : 0;
    double s = 0.0;
    for (std::size_t k = lo; k <= t; ++k) s += m[k];
    EXPECT_NEAR(mean[t], s / (t + 1 - lo), 1e-15);
    EXPECT_NEAR(f.values.at(t, pole), sc.base_dose * (1.0 + mean[t]), 1e-15);
  }
}

TEST(Field, LeastSquaresInverseRecoversParameters) {
  auto sc = quiet(1000);
  sc.base_dose = 0.0731;
  sc.amplitude = 0.17;
  const auto f = gen_dose_field(gen_modulation(sc), sc);
  // basis: trailing mean of the unit sinusoid, computed independently of the generator
  std::vector<double> unit(sc.n_days);
  for (std::size_t t = 0; t < unit.size(); ++t) unit[t] = std::sin(2.0 * std::numbers::pi * t / sc.period_days);
  const std::size_t rows = sc.n_days * f.points();
  Eigen::MatrixXd a(rows, 2);
  Eigen::VectorXd b(rows);
  for (std::size_t t = 0; t < sc.n_days; ++t) {
    const std::size_t lo = t + 1 >= sc.memory_lag ? t + 1 - sc.memory_lag : 0;
    double u = 0.0;
    for (std::size_t k = lo; k <= t; ++k) u += unit[k];
    u /= static_cast<double>(t + 1 - lo);
    for (std::size_t j = 0; j < f.points(); ++j) {
      const double s = std::pow(std::sin(f.grid.degrees.at(j, 1) * std::numbers::pi / 180.0), 2);
      const auto r = static_cast<Eigen::Index>(t * f.points() + j);
      a(r, 0) = 1.0;
      a(r, 1) = s * u;
      b(r) = f.values.at(t, j);
    }
  }
  const Eigen::Vector2d x = a.colPivHouseholderQr().solve(b);
  EXPECT_NEAR(x(0), sc.base_dose, 1e-6);
  EXPECT_NEAR(x(1) / x(0), sc.amplitude, 1e-6);
}

TEST(Field, NonPositiveFieldIsScenarioError) {
  auto sc = quiet(365);
  sc.amplitude = 2.0;
  sc.memory_lag = 1;
  EXPECT_THROW(gen_dose_field(gen_modulation(sc), sc), ConfigError);
}

TEST(Scenario, Validation) {
  auto sc = quiet();
  sc.base_dose = 0.0;
  EXPECT_THROW(sc.validate(), ConfigError);
  sc = quiet();
  sc.ar_coef = 1.0;
  EXPECT_THROW(sc.validate(), ConfigError);
  sc = quiet();
  sc.memory_lag = 0;
  EXPECT_THROW(sc.validate(), ConfigError);
  sc = quiet();
  sc.sensor_offsets.pop_back();
  EXPECT_THROW(sc.validate(), ConfigError);
}

TEST(Scenario, JsonRoundTrip) {
  auto sc = SyntheticScenario::with_sensors(4);
  sc.seed = 99;
  sc.amplitude = 0.125;
  const auto back = SyntheticScenario::from_json(sc.to_json());
  EXPECT_EQ(back.to_json(), sc.to_json());
  EXPECT_EQ(back.sensor_offsets, sc.sensor_offsets);
  EXPECT_THROW(SyntheticScenario::from_json(R"({"bogus": 1})"), ConfigError);
  EXPECT_THROW(SyntheticScenario::from_json("{"), ConfigError);
}

TEST(Generators, BitwiseDeterministic) {
  SyntheticScenario sc;
  sc.n_days = 200;
  const auto m = gen_modulation(sc);
  EXPECT_EQ(gen_sensor_counts(m, sc).counts, gen_sensor_counts(m, sc).counts);
  EXPECT_EQ(gen_dose_field(m, sc).values, gen_dose_field(m, sc).values);
}

TEST(ReferenceMetrics, PerfectPrediction) {
  const Tensor t = Tensor::from_rows({{1, 2}, {3, 5}});
  const auto r = reference_metrics(t, t);
  EXPECT_EQ(r.rmse, 0.0);
  EXPECT_EQ(r.mae, 0.0);
  EXPECT_EQ(r.r2, 1.0);
  EXPECT_EQ(r.mean_rel_l2, 0.0);
}

TEST(ReferenceMetrics, HandCase) {
  const auto r = reference_metrics(Tensor::from_rows({{2, 2}}), Tensor::from_rows({{1, 3}}));
  EXPECT_DOUBLE_EQ(r.rmse, 1.0);
  EXPECT_DOUBLE_EQ(r.mae, 1.0);
  EXPECT_DOUBLE_EQ(r.r2, 0.0);
  ASSERT_EQ(r.rel_l2.size(), 1u);
  EXPECT_DOUBLE_EQ(r.rel_l2[0], std::sqrt(2.0) / std::sqrt(10.0));
}

TEST(ReferenceMetrics, DegenerateCases) {
  EXPECT_THROW(reference_metrics(Tensor::from_rows({{1, 2}}), Tensor::from_rows({{3, 3}})), DataError);
  EXPECT_THROW(reference_metrics(Tensor::from_rows({{1, 2}, {1, 1}}), Tensor::from_rows({{0, 0}, {1, 2}})), DataError);
  EXPECT_THROW(reference_metrics(Tensor::from_rows({{1, 2}}), Tensor::from_rows({{1, 2, 3}})), DimensionError);
}
