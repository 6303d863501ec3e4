// SPDX-License-Identifier: Apache-2.0
#include "tron/ndcore/tape.hpp"

#include "tron/errors.hpp"

namespace tron {

Var Tape::input(Tensor value, bool requires_grad) {
  nodes_.push_back(Node{std::move(value), Tensor{}, requires_grad, false});
  return Var{nodes_.size() - 1};
}

Var Tape::push(Tensor value, bool requires_grad) {
  nodes_.push_back(Node{std::move(value), Tensor{}, requires_grad, false});
  return Var{nodes_.size() - 1};
}

void Tape::on_backward(Backward fn) {
  if (recording_) closures_.push_back(std::move(fn));
}

Tensor& Tape::grad(Var v) {
  auto& node = nodes_.at(v.id);
  if (!node.has_grad) {
    node.grad = Tensor(node.value.shape());
    node.has_grad = true;
  }
  return node.grad;
}

const Tensor* Tape::grad_if(Var v) const {
  const auto& node = nodes_.at(v.id);
  return node.has_grad ? &node.grad : nullptr;
}

void Tape::backward(Var out) {
  if (value(out).size() != 1) {
    throw DimensionError("Tape::backward without a seed needs a single-element output, got " +
                         shape_string(value(out).shape()));
  }
  backward(out, Tensor(value(out).shape(), 1.0));
}

void Tape::backward(Var out, const Tensor& seed) {
  if (!recording_) throw Error("backward called on a non-recording tape");
  require_shape(seed, value(out).shape(), "backward seed");
  grad(out) = seed;
  for (auto it = closures_.rbegin(); it != closures_.rend(); ++it) (*it)(*this);
}

}  // namespace tron
