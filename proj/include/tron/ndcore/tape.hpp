// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "tron/ndcore/tensor.hpp"

namespace tron {

/// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::size_t id = npos;
  bool valid() const { return id != npos; }
};

/// Linear record of forward values and their backward closures.
///
/// Every op pushes its output and, when recording, a closure that reads the
/// output gradient and accumulates into input gradients (tape nodes) and
/// parameter gradients (Parameter::grad). backward() replays closures in
/// reverse push order, so gradients accumulate in a fixed order.
///
/// A non-recording tape only stores forward values; it is used for inference.
/// Parameters referenced by recorded closures must outlive the tape.
class Tape {
 public:
  using Backward = std::function<void(Tape&)>;

  explicit Tape(bool recording = true) : recording_(recording) {}

  bool recording() const { return recording_; }

  /// Leaf value. Only leaves created with requires_grad receive gradients.
  Var input(Tensor value, bool requires_grad = false);

  /// Push an op output; `requires_grad` should be true when any input
  /// requires grad or the op reads a Parameter.
  Var push(Tensor value, bool requires_grad = true);
  void on_backward(Backward fn);

  const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  bool requires_grad(Var v) const { return recording_ && nodes_.at(v.id).requires_grad; }

  /// Gradient buffer of `v`, allocated as zeros on first access.
  Tensor& grad(Var v);
  /// Gradient of `v` if anything has been accumulated into it, else nullptr.
  const Tensor* grad_if(Var v) const;

  /// Seed d(out)/d(out) = 1 for a single-element output and run all closures.
  void backward(Var out);
  void backward(Var out, const Tensor& seed);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool has_grad = false;
  };

  bool recording_;
  std::vector<Node> nodes_;
  std::vector<Backward> closures_;
};

}  // namespace tron
