// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "test_util.hpp"
#include "tron/errors.hpp"
#include "tron/eval/bench.hpp"
#include "tron/eval/metrics.hpp"
#include "tron/oracle/reference_metrics.hpp"
#include "tron/oracle/synthetic.hpp"

using namespace tron;
using namespace tron::testing;

namespace {

void expect_matches_reference(const Tensor& pred, const Tensor& target) {
  const auto r = compute_metrics(pred, target);
  const auto ref = reference_metrics(pred, target);
  EXPECT_NEAR(r.rmse, ref.rmse, 1e-12);
  EXPECT_NEAR(r.mae, ref.mae, 1e-12);
  EXPECT_NEAR(r.r2, ref.r2, 1e-12);
  EXPECT_NEAR(r.mean_rel_l2, ref.mean_rel_l2, 1e-12);
  ASSERT_EQ(r.rel_l2.size(), ref.rel_l2.size());
  for (std::size_t i = 0; i < r.rel_l2.size(); ++i) EXPECT_NEAR(r.rel_l2[i], ref.rel_l2[i], 1e-12);
}

struct Toy {
  PreparedData data;
  TronModel model{ModelConfig{Variant::s_gru, 5, 3, 6, 1, 6}};
};

const Toy& toy() {
  static const Toy t = [] {
    Toy t;
    auto sc = SyntheticScenario::with_sensors(3);
    sc.n_days = 200;
    sc.lat_step = 30.0;
    sc.lon_step = 60.0;
    const auto m = gen_modulation(sc);
    t.data = prepare_data(gen_sensor_counts(m, sc), gen_dose_field(m, sc), 5, 40);
    t.model.initialize(4);
    return t;
  }();
  return t;
}

/// Predictor that returns each window's stored target.
Predictor target_copy(const SequencedDataset& ds) {
  return [&ds](const Tensor& inputs) {
    std::vector<std::size_t> rows;
    const std::size_t window = ds.seq_len() * ds.sensors();
    for (std::size_t b = 0; b < inputs.dim(0); ++b) {
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if (std::equal(inputs.data().begin() + b * window, inputs.data().begin() + (b + 1) * window,
                       ds.inputs.data().begin() + i * window)) {
          rows.push_back(i);
          break;
        }
      }
    }
    return ds.batch(rows).second;
  };
}

}  // namespace

TEST(Metrics, MatchesReferenceOnRandomInstances) {
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const std::size_t b = 1 + rng.below(12), p = 1 + rng.below(40);
    if (b * p < 2) continue;
    const Tensor target = random_tensor({b, p}, 1000 + seed, 0.01, 5.0);
    const Tensor pred = random_tensor({b, p}, 2000 + seed, 0.01, 5.0);
    SCOPED_TRACE(seed);
    expect_matches_reference(pred, target);
  }
}

TEST(Metrics, HandCase) {
  const Tensor pred = Tensor::from_rows({{2, 2}}), target = Tensor::from_rows({{1, 3}});
  const auto r = compute_metrics(pred, target);
  EXPECT_DOUBLE_EQ(r.rmse, 1.0);
  EXPECT_DOUBLE_EQ(r.mae, 1.0);
  EXPECT_DOUBLE_EQ(r.r2, 0.0);
  EXPECT_DOUBLE_EQ(r.mean_rel_l2, std::sqrt(2.0 / 10.0));
  expect_matches_reference(pred, target);
}

TEST(Metrics, TwoSampleHandCase) {
  // rows (2,2)/(1,3) and (1,1)/(1,1): SSE 2 over 4 entries, target mean 1.5, SST 3
  const Tensor pred = Tensor::from_rows({{2, 2}, {1, 1}}), target = Tensor::from_rows({{1, 3}, {1, 1}});
  const auto r = compute_metrics(pred, target);
  EXPECT_DOUBLE_EQ(r.rmse, std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(r.mae, 0.5);
  EXPECT_DOUBLE_EQ(r.r2, 1.0 - 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.rel_l2[1], 0.0);
  EXPECT_DOUBLE_EQ(r.mean_rel_l2, 0.5 * std::sqrt(0.2));
  expect_matches_reference(pred, target);
}

TEST(Metrics, PerfectPrediction) {
  const Tensor t = random_tensor({4, 9}, 3, 0.5, 2.0);
  const auto r = compute_metrics(t, t);
  EXPECT_EQ(r.rmse, 0.0);
  EXPECT_EQ(r.mae, 0.0);
  EXPECT_EQ(r.r2, 1.0);
  EXPECT_EQ(r.mean_rel_l2, 0.0);
}

TEST(Metrics, RelativeL2IsScaleInvariant) {
  const Tensor t = random_tensor({6, 11}, 8, 0.1, 3.0), p = random_tensor({6, 11}, 9, 0.1, 3.0);
  const auto base = compute_metrics(p, t);
  for (double c : {1e-3, 0.7, 42.0, 1e5}) {
    Tensor ps = p, ts = t;
    ps.matrix() *= c;
    ts.matrix() *= c;
    const auto scaled = compute_metrics(ps, ts);
    for (std::size_t i = 0; i < base.rel_l2.size(); ++i) EXPECT_NEAR(scaled.rel_l2[i], base.rel_l2[i], 1e-12);
  }
}

TEST(Metrics, MeanEqualsMeanOfVector) {
  const auto r = compute_metrics(random_tensor({30, 5}, 1, 0.1, 1.0), random_tensor({30, 5}, 2, 0.1, 1.0));
  EXPECT_NEAR(r.mean_rel_l2, std::accumulate(r.rel_l2.begin(), r.rel_l2.end(), 0.0) / 30.0, 1e-12);
  for (auto idx : r.percentile_samples) EXPECT_LT(idx, 30u);
}

TEST(Metrics, DegenerateInputs) {
  EXPECT_THROW(compute_metrics(Tensor::from_rows({{1, 2}}), Tensor::from_rows({{2, 2}})), DataError);
  EXPECT_THROW(compute_metrics(Tensor::from_rows({{1, 2}, {3, 4}}), Tensor::from_rows({{0, 0}, {1, 2}})), DataError);
  EXPECT_THROW(compute_metrics(Tensor({2, 3}), Tensor({3, 2})), DimensionError);
}

TEST(Metrics, JsonKeysAreStable) {
  const auto r = compute_metrics(Tensor::from_rows({{2, 2}, {1, 1}}), Tensor::from_rows({{1, 3}, {1, 1}}));
  const auto j = nlohmann::json::parse(r.to_json());
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"mae", "mean_rel_l2", "n_samples", "percentiles", "r2", "rel_l2", "rmse",
                                            "units"}));
  EXPECT_EQ(j["percentiles"]["p50"]["sample"], 1);
  EXPECT_EQ(j["units"], "physical");
  EXPECT_EQ(r.to_json(), r.to_json());
}

TEST(Percentile, NearestRank) {
  EXPECT_EQ(nearest_rank(359, 0.05), 17u);
  EXPECT_EQ(nearest_rank(359, 0.50), 179u);
  EXPECT_EQ(nearest_rank(359, 0.95), 341u);
  EXPECT_EQ(nearest_rank(1, 0.05), 0u);
  EXPECT_EQ(nearest_rank(10, 1.0), 9u);
  EXPECT_THROW(nearest_rank(0, 0.5), DataError);
}

TEST(Percentile, MatchesSortOracle) {
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.below(400);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(0.0, 1.0);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (double p : kReportPercentiles) {
      const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(p * n))) - 1;
      EXPECT_EQ(v[percentile_sample(v, p)], sorted[rank]);
    }
  }
}

TEST(Histogram, IntegratesToOne) {
  for (int seed = 0; seed < 10; ++seed) {
    const Tensor v = random_tensor({1, 500}, seed, 0.0, 0.05);
    const auto h = error_histogram(v.data(), 50);
    EXPECT_EQ(h.density.size(), 50u);
    EXPECT_NEAR(h.integral(), 1.0, 1e-9);
  }
}

TEST(Histogram, AllEqualValues) {
  const std::vector<double> v(20, 0.3);
  const auto h = error_histogram(v, 1);
  ASSERT_EQ(h.density.size(), 1u);
  EXPECT_DOUBLE_EQ(h.density[0], 1.0 / (h.bin_hi[0] - h.bin_lo[0]));
  const auto h5 = error_histogram(v, 5);
  EXPECT_EQ(std::count_if(h5.density.begin(), h5.density.end(), [](double d) { return d > 0; }), 1);
  EXPECT_NEAR(h5.integral(), 1.0, 1e-9);
}

TEST(Histogram, CsvLayout) {
  const auto csv = error_histogram(std::vector<double>{0.1, 0.2, 0.4}, 3).to_csv();
  EXPECT_EQ(csv.rfind("bin_lo,bin_hi,density\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Evaluate, ModelPredictorMatchesPredict) {
  const auto& t = toy();
  const auto e = evaluate(model_predictor(t.model, t.data.grid), t.data.test, t.data.scaler, MetricUnits::normalized, 7);
  const Tensor direct = t.model.predict(t.data.test.inputs, t.data.grid);
  EXPECT_EQ(e.pred, direct);
  EXPECT_EQ(e.target, t.data.test.targets);
}

TEST(Evaluate, PhysicalUnitsInvertTheScaler) {
  const auto& t = toy();
  const auto pred = model_predictor(t.model, t.data.grid);
  const auto phys = evaluate(pred, t.data.test, t.data.scaler);
  const auto norm = evaluate(pred, t.data.test, t.data.scaler, MetricUnits::normalized);
  EXPECT_EQ(phys.pred, t.data.scaler.field.inverse_transform(norm.pred));
  EXPECT_EQ(phys.report.units, MetricUnits::physical);
  const auto ref = reference_metrics(phys.pred, phys.target);
  EXPECT_NEAR(phys.report.mean_rel_l2, ref.mean_rel_l2, 1e-12);
}

TEST(Evaluate, TargetCopyIsPerfect) {
  const auto& t = toy();
  const auto e = evaluate(target_copy(t.data.test), t.data.test, t.data.scaler);
  EXPECT_EQ(e.report.mean_rel_l2, 0.0);
  EXPECT_EQ(e.report.rmse, 0.0);
}

TEST(Exports, PerfectModelHasZeroError) {
  const auto& t = toy();
  const auto e = evaluate(target_copy(t.data.test), t.data.test, t.data.scaler);
  const auto dir = temp_dir("export_perfect");
  const auto files = export_percentile_fields(e, t.data.grid.degrees, dir);
  ASSERT_EQ(files.size(), 6u);
  for (const auto& f : files) {
    const auto [deg, values] = read_field_csv(f);
    EXPECT_EQ(values.size(), t.data.grid.size());
    if (f.filename().string().rfind("abs_error", 0) == 0) {
      for (double v : values) EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(Exports, RoundTripBitwise) {
  const auto& t = toy();
  const auto e = evaluate(model_predictor(t.model, t.data.grid), t.data.test, t.data.scaler);
  const auto dir = temp_dir("export_roundtrip");
  export_percentile_fields(t.model, t.data.test, t.data.scaler, t.data.grid, dir);
  const auto [deg, values] = read_field_csv(dir / "field_p95.csv");
  EXPECT_EQ(deg, t.data.grid.degrees);
  const std::size_t sample = e.report.percentile_samples[2];
  for (std::size_t j = 0; j < values.size(); ++j) EXPECT_EQ(values[j], e.pred.at(sample, j));
  const auto [deg2, err] = read_field_csv(dir / "abs_error_p05.csv");
  const std::size_t s5 = e.report.percentile_samples[0];
  for (std::size_t j = 0; j < err.size(); ++j) EXPECT_EQ(err[j], std::abs(e.pred.at(s5, j) - e.target.at(s5, j)));
}

TEST(Bench, SelfConsistentAndRecordsReps) {
  TronModel model(ModelConfig{Variant::s_gru, 30, 12, 16, 1, 16});
  model.initialize(0);
  const auto grid = make_grid(5.0, 5.0);
  BenchOptions opt;
  opt.reps = 100;
  const auto report = bench_inference({&model, &model}, grid, opt);
  ASSERT_EQ(report.rows.size(), 2u);
  for (const auto& r : report.rows) {
    EXPECT_EQ(r.reps, 100u);
    EXPECT_EQ(r.points, 2701u);
    EXPECT_EQ(r.seq_len, 30u);
    EXPECT_GE(r.sd_ms, 0.0);
    EXPECT_GT(r.mean_ms, 0.0);
  }
  const double sd = std::max(report.rows[0].sd_ms, report.rows[1].sd_ms);
  EXPECT_LE(std::abs(report.rows[0].mean_ms - report.rows[1].mean_ms), 3.0 * sd);
  const auto csv = report.to_csv();
  EXPECT_EQ(csv.rfind("variant,seq_len,points,reps,mean_ms,sd_ms\nS-GRU,30,2701,100,", 0), 0u);
}

TEST(Bench, LatencyGrowsWithPoints) {
  TronModel model(ModelConfig{Variant::s_lstm, 7, 4, 8, 1, 16});
  model.initialize(0);
  BenchOptions opt;
  opt.reps = 20;
  opt.warmup = 3;
  const auto small = bench_model(model, make_grid(1.0, 1.0, {0.0, 9.0}, {0.0, 9.0}), opt);
  const auto large = bench_model(model, make_grid(1.0, 1.0), opt);
  EXPECT_EQ(small.points, 100u);
  EXPECT_EQ(large.points, 65341u);
  EXPECT_LT(small.mean_ms, large.mean_ms);
}
