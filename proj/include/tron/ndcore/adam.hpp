// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tron/ndcore/tensor.hpp"

namespace tron {

struct AdamState {
  std::uint64_t step = 0;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double learning_rate = 1e-3;

  AdamState() = default;
  AdamState(std::size_t n, double lr) : first_moment(n, 0.0), second_moment(n, 0.0), learning_rate(lr) {}
};

/// Bias-corrected Adam update on a flat parameter vector. `label` names the
/// parameter in the error raised for a non-finite gradient.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const std::string& label = "param");

/// Adam over a set of Parameters laid out back to back in the moment vectors.
class Adam {
 public:
  Adam(std::vector<Parameter*> params, double learning_rate);

  /// Applies one update using each Parameter::grad. Throws DivergenceError
  /// naming the parameter if any gradient element is non-finite; in that case
  /// no parameter is modified.
  void step();
  void zero_grad();

  const AdamState& state() const { return state_; }

 private:
  std::vector<Parameter*> params_;
  AdamState state_;
};

}  // namespace tron
