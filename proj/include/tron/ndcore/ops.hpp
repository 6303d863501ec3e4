// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tron/ndcore/tape.hpp"
#include "tron/ndcore/tensor.hpp"

namespace tron {

enum class Activation { identity, relu };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);

inline constexpr double kLayerNormEps = 1e-5;

/// y = act(x Wᵀ + b) for x [B×I], W [O×I], b [O].
Var dense(Tape& tape, Var x, Parameter& weight, Parameter& bias, Activation act);

/// Per-row normalisation with population variance, then gamma * x̂ + beta.
Var layer_norm(Tape& tape, Var x, Parameter& gamma, Parameter& beta, double eps = kLayerNormEps);

/// Mean of squared differences over all elements. Returns a scalar [1] var.
Var mse(Tape& tape, Var pred, const Tensor& target);

/// Elementwise product of equally shaped values.
Var hadamard(Tape& tape, Var a, Var b);
/// a + b, same shape.
Var add(Tape& tape, Var a, Var b);

/// x [B×H] + bias [H] broadcast over rows.
Var add_row_bias(Tape& tape, Var x, Parameter& bias);

/// out[i,j] = Σ_k b[i,k]·t[j,k] + beta for b [B×d], t [P×d], scalar beta.
Var fuse(Tape& tape, Var branch, Var trunk, Parameter& beta);

/// seq [B×T×I] → [B×I] at time index t.
Var time_step(Tape& tape, Var seq, std::size_t t);

/// seq [B×T×S] → [B×T×1] holding channel s.
Var channel(Tape& tape, Var seq, std::size_t s);

Var reshape(Tape& tape, Var x, std::vector<std::size_t> shape);

/// Weighted sum Σ w_i x_i as a scalar; used to reduce outputs for gradient checks.
Var weighted_sum(Tape& tape, Var x, const Tensor& weights);

}  // namespace tron
