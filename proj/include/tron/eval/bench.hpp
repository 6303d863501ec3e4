// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tron/model/tron_model.hpp"

namespace tron {

struct LatencyRow {
  std::string variant;
  std::size_t seq_len = 0;
  std::size_t points = 0;
  std::size_t reps = 0;
  double mean_ms = 0.0;
  double sd_ms = 0.0;  // sample standard deviation
};

struct LatencyReport {
  std::vector<LatencyRow> rows;
  /// `variant,seq_len,points,reps,mean_ms,sd_ms`.
  std::string to_csv() const;
};

struct BenchOptions {
  std::size_t warmup = 10;
  std::size_t reps = 100;
  std::uint64_t seed = 0;  // drives the synthetic input window
};

/// Times single-window full-grid inference (branch, trunk, fusion) of one model.
LatencyRow bench_model(const TronModel& model, const QueryGrid& grid, const BenchOptions& options = {});

/// One row per model, measured in the order given. Eigen is pinned to one thread.
LatencyReport bench_inference(const std::vector<const TronModel*>& models, const QueryGrid& grid,
                              const BenchOptions& options = {});

}  // namespace tron
