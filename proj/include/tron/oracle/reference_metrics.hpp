// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "tron/ndcore/tensor.hpp"

namespace tron {

struct ReferenceMetrics {
  double rmse = 0.0;
  double mae = 0.0;
  double r2 = 0.0;
  std::vector<double> rel_l2;  // one entry per sample (row)
  double mean_rel_l2 = 0.0;
};

/// Plain double-loop RMSE / MAE / R² (pooled over all entries) and per-row
/// relative L2 for [B×P] predictions. Kept deliberately naive: this is the
/// equivalence reference for the eval module.
ReferenceMetrics reference_metrics(const Tensor& pred, const Tensor& target);

}  // namespace tron
