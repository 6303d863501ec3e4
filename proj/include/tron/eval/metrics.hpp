// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tron/data/dataset.hpp"
#include "tron/data/scaler.hpp"
#include "tron/model/tron_model.hpp"

namespace tron {

enum class MetricUnits { physical, normalized };

std::string to_string(MetricUnits u);
MetricUnits metric_units_from_string(const std::string& s);

inline constexpr std::array<double, 3> kReportPercentiles = {0.05, 0.50, 0.95};

struct MetricsReport {
  double rmse = 0.0;
  double mae = 0.0;
  double r2 = 0.0;
  double mean_rel_l2 = 0.0;
  std::vector<double> rel_l2;  // per sample
  /// Sample indices at the 5th / 50th / 95th percentile of rel_l2 (nearest rank).
  std::array<std::size_t, 3> percentile_samples{};
  MetricUnits units = MetricUnits::physical;

  /// Canonical JSON, keys sorted.
  std::string to_json() const;
};

/// RMSE, MAE and R² pooled over all B·P entries; relative L2 per row then averaged.
/// Throws DataError on a zero-norm target row or a constant target.
MetricsReport compute_metrics(const Tensor& pred, const Tensor& target);

/// Zero-based position in ascending order of the nearest-rank percentile:
/// ⌈p·n⌉ − 1, clamped to [0, n−1].
std::size_t nearest_rank(std::size_t n, double p);

/// Index of the sample at percentile p of `values` (stable ascending order).
std::size_t percentile_sample(std::span<const double> values, double p);

struct Histogram {
  std::vector<double> bin_lo;
  std::vector<double> bin_hi;
  std::vector<double> density;

  double integral() const;
  /// `bin_lo,bin_hi,density` CSV.
  std::string to_csv() const;
};

/// Density-normalised histogram over [min, max] of `values`. When all values
/// are equal the range is widened symmetrically so one bin holds everything.
Histogram error_histogram(std::span<const double> values, std::size_t bins);

/// Maps a normalised-space input batch [B×T×S] to normalised predictions [B×P].
using Predictor = std::function<Tensor(const Tensor& inputs)>;

/// Predictor backed by a model; the trunk latent for `grid` is computed once.
Predictor model_predictor(const TronModel& model, const QueryGrid& grid);

struct Evaluation {
  Tensor pred;    // [N′×P] in the report's units
  Tensor target;  // [N′×P]
  MetricsReport report;
};

/// Runs `predict` over the dataset in deterministic chunks, inverse-transforms
/// both sides when units are physical, and computes the report.
Evaluation evaluate(const Predictor& predict, const SequencedDataset& data, const Scaler& scaler,
                    MetricUnits units = MetricUnits::physical, std::size_t chunk = 64);

/// Writes `lon,lat,value` CSV.
void write_field_csv(const std::filesystem::path& path, const Tensor& degrees, std::span<const double> values);
/// Reads back a `lon,lat,value` CSV: ([P×2] degrees, values).
std::pair<Tensor, std::vector<double>> read_field_csv(const std::filesystem::path& path);

/// For each report percentile writes `field_pXX.csv` (prediction) and
/// `abs_error_pXX.csv` (|pred − target|). Returns the written paths.
std::vector<std::filesystem::path> export_percentile_fields(const Evaluation& eval, const Tensor& degrees,
                                                            const std::filesystem::path& out_dir);

/// Convenience overload that evaluates `model` on `data` first.
std::vector<std::filesystem::path> export_percentile_fields(const TronModel& model, const SequencedDataset& data,
                                                            const Scaler& scaler, const QueryGrid& grid,
                                                            const std::filesystem::path& out_dir);

}  // namespace tron
