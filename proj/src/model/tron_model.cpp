// SPDX-License-Identifier: Apache-2.0
#include "tron/model/tron_model.hpp"

#include <cmath>

#include "tron/errors.hpp"
#include "tron/log.hpp"

namespace tron {

std::size_t QueryGrid::count_outside_unit() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double lon = coords.at(i, 0), lat = coords.at(i, 1);
    if (lon < 0.0 || lon > 1.0 || lat < 0.0 || lat > 1.0) ++n;
  }
  return n;
}

QueryGrid QueryGrid::subset(std::span<const std::size_t> indices) const {
  QueryGrid out;
  out.coords = Tensor({indices.size(), 2});
  const bool has_degrees = degrees.size() == coords.size() && !degrees.empty();
  if (has_degrees) out.degrees = Tensor({indices.size(), 2});
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= size()) throw DimensionError("grid subset index out of range");
    for (std::size_t k = 0; k < 2; ++k) {
      out.coords.at(r, k) = coords.at(indices[r], k);
      if (has_degrees) out.degrees.at(r, k) = degrees.at(indices[r], k);
    }
  }
  return out;
}

DenseLayer::DenseLayer(const std::string& name, std::size_t in, std::size_t out, Activation a)
    : weight(name + ".weight", {out, in}), bias(name + ".bias", {out}), act(a) {}

void DenseLayer::initialize(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(weight.value.dim(1)));
  fill_uniform(weight.value, bound, rng);
  fill_uniform(bias.value, bound, rng);
}

SequenceEncoder::SequenceEncoder(const std::string& name, CellKind kind, std::size_t input,
                                 std::size_t hidden, std::size_t n_layers, std::size_t hd)
    : norm_gamma(name + ".norm.gamma", {hidden}),
      norm_beta(name + ".norm.beta", {hidden}),
      head(name + ".head", hidden, hd, Activation::identity) {
  for (std::size_t l = 0; l < n_layers; ++l) {
    layers.emplace_back(name + ".rnn." + std::to_string(l), kind, l == 0 ? input : hidden, hidden);
  }
  norm_gamma.value.fill(1.0);
}

Var SequenceEncoder::operator()(Tape& tape, Var seq) {
  Var last = unroll(tape, seq, layers);
  Var normed = layer_norm(tape, last, norm_gamma, norm_beta);
  return head(tape, normed);
}

void SequenceEncoder::initialize(Rng& rng) {
  for (auto& layer : layers) layer.initialize(rng);
  norm_gamma.value.fill(1.0);
  norm_beta.value.fill(0.0);
  head.initialize(rng);
}

void SequenceEncoder::collect(std::vector<Parameter*>& out) {
  for (auto& layer : layers) {
    for (auto* p : layer.parameters()) out.push_back(p);
  }
  out.push_back(&norm_gamma);
  out.push_back(&norm_beta);
  out.push_back(&head.weight);
  out.push_back(&head.bias);
}

TronModel::TronModel(ModelConfig config) : config_(config) {
  config_.validate();
  const auto& c = config_;
  switch (c.variant) {
    case Variant::s_gru:
    case Variant::s_lstm:
      single_ = SequenceEncoder("branch", cell_kind(c.variant), c.n_sensors, c.hidden, c.layers, c.hd);
      break;
    case Variant::m_gru:
    case Variant::m_lstm:
      per_sensor_.reserve(c.n_sensors);
      for (std::size_t s = 0; s < c.n_sensors; ++s) {
        per_sensor_.emplace_back("branch.sensor" + std::to_string(s), cell_kind(c.variant), 1, c.hidden,
                                 c.layers, c.hd);
      }
      fusion_bias_ = Parameter("branch.fusion_bias", {c.hd});
      break;
    case Variant::fnn: {
      std::size_t in = c.seq_len * c.n_sensors;
      std::size_t i = 0;
      for (auto width : kFnnHidden) {
        fnn_.emplace_back("branch.fnn." + std::to_string(i++), in, width, Activation::relu);
        in = width;
      }
      fnn_.emplace_back("branch.fnn." + std::to_string(i), in, c.hd, Activation::identity);
      break;
    }
  }
  trunk_.emplace_back("trunk.0", 2, c.hd, Activation::relu);
  trunk_.emplace_back("trunk.1", c.hd, c.hd, Activation::relu);
  trunk_.emplace_back("trunk.2", c.hd, c.hd, Activation::identity);
  output_bias_ = Parameter("output_bias", {1});
}

void TronModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  if (is_single_branch(config_.variant)) single_.initialize(rng);
  for (auto& enc : per_sensor_) enc.initialize(rng);
  if (is_multi_branch(config_.variant)) fusion_bias_.value.fill(0.0);
  for (auto& layer : fnn_) layer.initialize(rng);
  for (auto& layer : trunk_) layer.initialize(rng);
  output_bias_.value.fill(0.0);
}

std::vector<Parameter*> TronModel::parameters() {
  std::vector<Parameter*> out;
  if (is_single_branch(config_.variant)) single_.collect(out);
  for (auto& enc : per_sensor_) enc.collect(out);
  if (is_multi_branch(config_.variant)) out.push_back(&fusion_bias_);
  for (auto& layer : fnn_) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  for (auto& layer : trunk_) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  out.push_back(&output_bias_);
  return out;
}

std::vector<const Parameter*> TronModel::parameters() const {
  auto ps = mutable_self().parameters();
  return {ps.begin(), ps.end()};
}

std::size_t TronModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->size();
  return n;
}

std::vector<double> TronModel::flat_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto* p : parameters()) flat.insert(flat.end(), p->value.storage().begin(), p->value.storage().end());
  return flat;
}

void TronModel::set_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw DimensionError("parameter vector has " + std::to_string(values.size()) + " values, model " +
                         to_string(config_.variant) + " needs " + std::to_string(parameter_count()));
  }
  std::size_t offset = 0;
  for (auto* p : parameters()) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), p->size(), p->value.storage().begin());
    offset += p->size();
  }
}

void TronModel::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

void TronModel::check_sequence(const Tensor& seq) const {
  require_rank(seq, 3, "model input sequence");
  if (seq.dim(1) != config_.seq_len) {
    throw DimensionError("model trained for T=" + std::to_string(config_.seq_len) + " received a window of T=" +
                         std::to_string(seq.dim(1)));
  }
  if (seq.dim(2) != config_.n_sensors) {
    throw DimensionError("model expects S=" + std::to_string(config_.n_sensors) + " sensors, got " +
                         std::to_string(seq.dim(2)));
  }
}

Var TronModel::branch(Tape& tape, Var seq) {
  switch (config_.variant) {
    case Variant::s_gru:
    case Variant::s_lstm: return branch_single(tape, seq);
    case Variant::m_gru:
    case Variant::m_lstm: return branch_multi(tape, seq);
    case Variant::fnn: return branch_fnn(tape, seq);
  }
  throw ConfigError("unhandled variant");
}

Var TronModel::branch_single(Tape& tape, Var seq) {
  if (!is_single_branch(config_.variant)) {
    throw ConfigError("branch_single requires S-GRU or S-LSTM, model is " + to_string(config_.variant));
  }
  check_sequence(tape.value(seq));
  return single_(tape, seq);
}

Var TronModel::branch_multi(Tape& tape, Var seq) {
  if (!is_multi_branch(config_.variant)) {
    throw ConfigError("branch_multi requires M-GRU or M-LSTM, model is " + to_string(config_.variant));
  }
  check_sequence(tape.value(seq));
  Var product;
  for (std::size_t s = 0; s < per_sensor_.size(); ++s) {
    Var latent = per_sensor_[s](tape, channel(tape, seq, s));
    product = s == 0 ? latent : hadamard(tape, product, latent);
  }
  return add_row_bias(tape, product, fusion_bias_);
}

Var TronModel::branch_fnn(Tape& tape, Var seq) {
  if (config_.variant != Variant::fnn) {
    throw ConfigError("branch_fnn requires the FNN variant, model is " + to_string(config_.variant));
  }
  check_sequence(tape.value(seq));
  const std::size_t batch = tape.value(seq).dim(0);
  // [B×T×S] row-major flattens time-major: all sensors of day 1 first.
  Var x = reshape(tape, seq, {batch, config_.seq_len * config_.n_sensors});
  for (auto& layer : fnn_) x = layer(tape, x);
  return x;
}

Var TronModel::trunk(Tape& tape, Var coords) {
  const Tensor& cv = tape.value(coords);
  require_rank(cv, 2, "trunk coordinates");
  if (cv.dim(1) != 2) throw DimensionError("trunk coordinates must be [P×2], got " + shape_string(cv.shape()));
  Var x = coords;
  for (auto& layer : trunk_) x = layer(tape, x);
  return x;
}

Var TronModel::forward(Tape& tape, Var seq, Var coords) {
  Var b = branch(tape, seq);
  Var t = trunk(tape, coords);
  return fuse(tape, b, t, output_bias_);
}

Tensor TronModel::branch_latent(const Tensor& seq) const {
  Tape tape(false);
  Var out = mutable_self().branch(tape, tape.input(seq));
  return tape.value(out);
}

Tensor TronModel::trunk_latent(const QueryGrid& grid) const {
  if (const auto outside = grid.count_outside_unit()) {
    log_warning(std::to_string(outside) + " query point(s) outside the normalised [0,1] range; extrapolating");
  }
  Tape tape(false);
  Var out = mutable_self().trunk(tape, tape.input(grid.coords));
  return tape.value(out);
}

Tensor TronModel::fuse_latents(const Tensor& branch, const Tensor& trunk) const {
  Tape tape(false);
  Var out = fuse(tape, tape.input(branch), tape.input(trunk), mutable_self().output_bias_);
  return tape.value(out);
}

Tensor TronModel::predict(const Tensor& seq, const QueryGrid& grid) const {
  return fuse_latents(branch_latent(seq), trunk_latent(grid));
}

}  // namespace tron
