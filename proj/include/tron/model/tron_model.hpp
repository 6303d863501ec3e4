// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tron/model/config.hpp"
#include "tron/ndcore/ops.hpp"
#include "tron/ndcore/recurrent.hpp"
#include "tron/ndcore/tape.hpp"

namespace tron {

/// Query coordinates for the trunk. `coords` holds normalised (lon, lat)
/// pairs in [0,1]; `degrees` keeps the raw values when known (may be empty).
struct QueryGrid {
  Tensor coords;   // [P×2]
  Tensor degrees;  // [P×2] or empty

  std::size_t size() const { return coords.rank() == 2 ? coords.dim(0) : 0; }
  /// Number of points with a normalised coordinate outside [0,1].
  std::size_t count_outside_unit() const;
  /// Rows `indices` of this grid, in that order.
  QueryGrid subset(std::span<const std::size_t> indices) const;
};

struct DenseLayer {
  Parameter weight;  // [out×in]
  Parameter bias;    // [out]
  Activation act = Activation::identity;

  DenseLayer() = default;
  DenseLayer(const std::string& name, std::size_t in, std::size_t out, Activation act);
  Var operator()(Tape& tape, Var x) { return dense(tape, x, weight, bias, act); }
  void initialize(Rng& rng);
};

/// Recurrent stack followed by layer normalisation and a linear head.
struct SequenceEncoder {
  std::vector<RecurrentLayer> layers;
  Parameter norm_gamma;
  Parameter norm_beta;
  DenseLayer head;

  SequenceEncoder() = default;
  SequenceEncoder(const std::string& name, CellKind kind, std::size_t input, std::size_t hidden,
                  std::size_t n_layers, std::size_t hd);
  Var operator()(Tape& tape, Var seq);
  void initialize(Rng& rng);
  void collect(std::vector<Parameter*>& out);
};

/// Branch/trunk operator: X[i,j] = Σ_k branch(seq_i)[k] · trunk(r_j)[k] + β.
///
/// Single-branch variants encode all S channels in one recurrent stack;
/// multi-branch variants run one stack per channel and combine the S latents
/// by elementwise product plus a learnable hd-wide fusion bias; the FNN
/// baseline flattens the window time-major into a 4-layer perceptron.
/// The trunk is dense(2→hd, ReLU) → dense(hd→hd, ReLU) → dense(hd→hd).
class TronModel {
 public:
  explicit TronModel(ModelConfig config);

  const ModelConfig& config() const { return config_; }

  /// Seeded uniform(±1/√fan_in) weights; layer-norm gamma = 1, beta = 0;
  /// fusion and output biases start at zero.
  void initialize(std::uint64_t seed);

  /// All trainable parameters in a fixed order (branch, trunk, output bias).
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t parameter_count() const;
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> values);
  void zero_grad();

  Var branch(Tape& tape, Var seq);
  Var branch_single(Tape& tape, Var seq);
  Var branch_multi(Tape& tape, Var seq);
  Var branch_fnn(Tape& tape, Var seq);
  Var trunk(Tape& tape, Var coords);
  Var forward(Tape& tape, Var seq, Var coords);

  /// Inference helpers on a non-recording tape; they never touch gradients.
  Tensor branch_latent(const Tensor& seq) const;
  Tensor trunk_latent(const QueryGrid& grid) const;
  Tensor fuse_latents(const Tensor& branch, const Tensor& trunk) const;
  Tensor predict(const Tensor& seq, const QueryGrid& grid) const;

 private:
  void check_sequence(const Tensor& seq) const;
  TronModel& mutable_self() const { return const_cast<TronModel&>(*this); }

  ModelConfig config_;
  SequenceEncoder single_;
  std::vector<SequenceEncoder> per_sensor_;
  Parameter fusion_bias_;
  std::vector<DenseLayer> fnn_;
  std::vector<DenseLayer> trunk_;
  Parameter output_bias_;
};

}  // namespace tron
