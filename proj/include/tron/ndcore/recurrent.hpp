// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tron/ndcore/random.hpp"
#include "tron/ndcore/tape.hpp"
#include "tron/ndcore/tensor.hpp"

namespace tron {

enum class CellKind { gru, lstm };

/// Number of gate groups stacked in the weight rows: 3 for GRU, 4 for LSTM.
constexpr std::size_t gate_count(CellKind kind) { return kind == CellKind::gru ? 3 : 4; }

/// Weights of one recurrent layer. Rows are grouped by gate:
/// GRU (reset, update, candidate); LSTM (input, forget, candidate, output).
/// Both an input-side and a recurrent-side bias are kept per gate group.
struct RecurrentLayer {
  CellKind kind = CellKind::gru;
  std::size_t input_size = 0;
  std::size_t hidden = 0;
  Parameter input_weights;      // [G·H × I]
  Parameter recurrent_weights;  // [G·H × H]
  Parameter input_bias;         // [G·H]
  Parameter recurrent_bias;     // [G·H]

  RecurrentLayer() = default;
  RecurrentLayer(std::string name, CellKind kind, std::size_t input_size, std::size_t hidden);

  /// G·H·(I+H) + 2·G·H.
  static std::size_t parameter_count(CellKind kind, std::size_t input_size, std::size_t hidden);

  std::vector<Parameter*> parameters();
  /// Uniform in ±1/√H for every weight and bias.
  void initialize(Rng& rng);
};

/// One GRU step; h' = (1 − z)⊙n + z⊙h with the reset gate applied to the
/// recurrent candidate term after its matmul and bias.
Var gru_step(Tape& tape, Var x, Var h, RecurrentLayer& layer);

/// One LSTM step; returns (h', c').
std::pair<Var, Var> lstm_step(Tape& tape, Var x, Var h, Var c, RecurrentLayer& layer);

/// Runs the stacked layers over seq [B×T×I] from zero initial states and
/// returns the last layer's hidden state at the final step [B×H]. Gradients
/// flow through every step and layer.
Var unroll(Tape& tape, Var seq, std::vector<RecurrentLayer>& layers);

}  // namespace tron
