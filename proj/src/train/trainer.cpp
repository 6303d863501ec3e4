// SPDX-License-Identifier: Apache-2.0
#include "tron/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tron/data/series.hpp"
#include "tron/errors.hpp"
#include "tron/log.hpp"
#include "tron/ndcore/adam.hpp"
#include "tron/ndcore/ops.hpp"
#include "tron/ndcore/random.hpp"

namespace tron {

void TrainConfig::validate() const {
  model.validate();
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("train.lr must be a positive finite number");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (patience < 1) throw ConfigError("train.patience must be >= 1");
  if (max_epochs < 1) throw ConfigError("train.max_epochs must be >= 1");
}

namespace {

std::string history_csv(const TrainHistory& h, bool seconds) {
  std::ostringstream os;
  os << (seconds ? "epoch,train_loss,val_loss,seconds\n" : "epoch,train_loss,val_loss\n");
  for (const auto& e : h.epochs) {
    os << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.val_loss);
    if (seconds) os << ',' << format_double(e.seconds);
    os << '\n';
  }
  return os.str();
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return seed ^ (0x9E3779B97F4A7C15ull * (stream + 1));
}

}  // namespace

std::string TrainHistory::to_csv() const { return history_csv(*this, true); }
std::string TrainHistory::losses_csv() const { return history_csv(*this, false); }

EarlyStopping::EarlyStopping(std::size_t patience, double min_delta) : patience_(patience), min_delta_(min_delta) {
  if (patience < 1) throw ConfigError("patience must be >= 1");
}

bool EarlyStopping::update(double val_loss) {
  ++seen_;
  if (best_epoch_ == 0 || val_loss < best_ - min_delta_) {
    best_ = val_loss;
    best_epoch_ = seen_;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  return idx;
}

double evaluate_loss(const TronModel& model, const SequencedDataset& data, const QueryGrid& grid, std::size_t chunk) {
  if (data.size() == 0) throw DataError("evaluate_loss on an empty dataset");
  chunk = std::max<std::size_t>(chunk, 1);
  const Tensor trunk = model.trunk_latent(grid);
  double sse = 0.0;
  for (std::size_t begin = 0; begin < data.size(); begin += chunk) {
    const std::size_t end = std::min(data.size(), begin + chunk);
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    const auto [x, y] = data.batch(idx);
    const Tensor pred = model.fuse_latents(model.branch_latent(x), trunk);
    sse += (pred.matrix() - y.matrix()).squaredNorm();
  }
  return sse / static_cast<double>(data.size() * data.points());
}

TrainResult train(const SequencedDataset& train_set, const SequencedDataset& val_set, const QueryGrid& grid,
                  const Scaler& scaler, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (!scaler.fitted()) throw DataError("train: scaler is not fitted");
  if (train_set.size() == 0) throw DataError("train: empty training partition");
  if (val_set.size() == 0) throw DataError("train: empty validation partition");
  for (const auto* ds : {&train_set, &val_set}) {
    if (ds->seq_len() != config.model.seq_len || ds->sensors() != config.model.n_sensors) {
      throw DimensionError("train: dataset windows are " + std::to_string(ds->seq_len()) + "x" +
                           std::to_string(ds->sensors()) + ", model expects " + std::to_string(config.model.seq_len) +
                           "x" + std::to_string(config.model.n_sensors));
    }
    if (ds->points() != grid.size()) throw DimensionError("train: target width differs from query grid size");
  }

  TronModel model(config.model);
  model.initialize(stream_seed(config.seed, 0));
  Rng shuffle_rng(stream_seed(config.seed, 1));
  Adam adam(model.parameters(), config.lr);
  EarlyStopping stopper(config.patience);
  TrainHistory history;
  std::vector<double> best = model.flat_parameters();

  const std::size_t n = train_set.size();
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto order = shuffled_indices(n, shuffle_rng);
    double weighted = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t begin = 0; begin < n; begin += config.batch_size, ++batch_no) {
      const std::size_t end = std::min(n, begin + config.batch_size);
      const std::span<const std::size_t> idx(order.data() + begin, end - begin);
      const auto [x, y] = train_set.batch(idx);
      Tape tape;
      Var loss = mse(tape, model.forward(tape, tape.input(x), tape.input(grid.coords)), y);
      const double value = tape.value(loss)[0];
      if (!std::isfinite(value)) {
        throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(batch_no + 1));
      }
      adam.zero_grad();
      tape.backward(loss);
      try {
        adam.step();
      } catch (const DivergenceError& e) {
        throw DivergenceError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(batch_no + 1) + ")");
      }
      weighted += value * static_cast<double>(idx.size());
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = weighted / static_cast<double>(n);
    rec.val_loss = evaluate_loss(model, val_set, grid);
    if (!std::isfinite(rec.val_loss)) {
      throw DivergenceError("non-finite validation loss at epoch " + std::to_string(epoch));
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    history.epochs.push_back(rec);
    if (stopper.update(rec.val_loss)) best = model.flat_parameters();
    if (on_epoch) on_epoch(rec);
    if (stopper.should_stop()) {
      log_info("early stop after epoch " + std::to_string(epoch) + " (best " + std::to_string(stopper.best_epoch()) +
               ")");
      break;
    }
  }
  history.best_epoch = stopper.best_epoch();
  history.best_val_loss = stopper.best_value();
  model.set_flat_parameters(best);
  model.zero_grad();
  Checkpoint ckpt = Checkpoint::capture(model, scaler);
  return TrainResult{std::move(model), std::move(ckpt), std::move(history)};
}

}  // namespace tron
