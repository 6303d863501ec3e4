// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tron/data/dataset.hpp"
#include "tron/model/checkpoint.hpp"
#include "tron/model/tron_model.hpp"

namespace tron {

struct TrainConfig {
  ModelConfig model;
  double lr = 1e-3;
  std::size_t batch_size = 16;
  std::size_t patience = 10;
  std::size_t max_epochs = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double seconds = 0.0;  // wall time of the epoch
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 1-based; 0 before any epoch
  double best_val_loss = 0.0;

  /// `epoch,train_loss,val_loss,seconds`. Losses use round-trip precision.
  std::string to_csv() const;
  /// Same without the wall-time column (reproducible part of the history).
  std::string losses_csv() const;
};

/// Patience counter over validation losses. An epoch improves on the best
/// when it is lower by more than `min_delta`.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience, double min_delta = 1e-12);

  /// Records the next epoch's loss; returns true when it is a new best.
  bool update(double val_loss);
  bool should_stop() const { return since_best_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_value() const { return best_; }
  std::size_t epochs_seen() const { return seen_; }

 private:
  std::size_t patience_;
  double min_delta_;
  double best_ = 0.0;
  std::size_t best_epoch_ = 0;
  std::size_t since_best_ = 0;
  std::size_t seen_ = 0;
};

struct TrainResult {
  TronModel model;  // holds the best-validation weights
  Checkpoint checkpoint;
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Seeded init and per-epoch shuffle, MSE mini-batches with Adam, full
/// validation pass per epoch, early stopping with best-weight restoration.
/// A non-finite loss or gradient throws DivergenceError.
TrainResult train(const SequencedDataset& train_set, const SequencedDataset& val_set, const QueryGrid& grid,
                  const Scaler& scaler, const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Mean squared error over every window and grid point, in dataset order.
double evaluate_loss(const TronModel& model, const SequencedDataset& data, const QueryGrid& grid,
                     std::size_t chunk = 16);

/// Deterministic Fisher-Yates permutation of [0, n).
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng);

}  // namespace tron
