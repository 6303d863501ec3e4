// SPDX-License-Identifier: Apache-2.0
#include "tron/oracle/reference_metrics.hpp"

#include <cmath>

#include "tron/errors.hpp"

namespace tron {

ReferenceMetrics reference_metrics(const Tensor& pred, const Tensor& target) {
  require_rank(target, 2, "reference_metrics target");
  require_shape(pred, target.shape(), "reference_metrics prediction");
  const std::size_t rows = target.dim(0), cols = target.dim(1);
  if (rows == 0 || cols == 0) throw DataError("reference_metrics on an empty tensor");
  const double count = static_cast<double>(rows * cols);

  double mean = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) mean += target.at(i, j);
  }
  mean /= count;

  double sse = 0.0, sae = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double d = pred.at(i, j) - target.at(i, j);
      sse += d * d;
      sae += std::abs(d);
      const double c = target.at(i, j) - mean;
      sst += c * c;
    }
  }
  if (sst == 0.0) throw DataError("reference_metrics: degenerate variance (constant target), R² undefined");

  ReferenceMetrics m;
  m.rmse = std::sqrt(sse / count);
  m.mae = sae / count;
  m.r2 = 1.0 - sse / sst;
  for (std::size_t i = 0; i < rows; ++i) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double d = pred.at(i, j) - target.at(i, j);
      num += d * d;
      den += target.at(i, j) * target.at(i, j);
    }
    if (den == 0.0) throw DataError("reference_metrics: degenerate sample " + std::to_string(i) + " (zero-norm target)");
    m.rel_l2.push_back(std::sqrt(num) / std::sqrt(den));
  }
  for (double v : m.rel_l2) m.mean_rel_l2 += v;
  m.mean_rel_l2 /= static_cast<double>(rows);
  return m;
}

}  // namespace tron
