// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tron/ndcore/tensor.hpp"

namespace tron {

struct GradCheckEntry {
  std::string name;
  double relative_error = 0.0;  // ‖analytic − numeric‖₂ / max(‖analytic‖₂, ‖numeric‖₂)
  double max_abs_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_relative_error = 0.0;
  bool passed(double tolerance) const { return max_relative_error < tolerance; }
};

/// Scalar objective. When `with_grads` is true it must also accumulate the
/// analytic gradient into every checked Parameter::grad.
using Objective = std::function<double(bool with_grads)>;

/// Compares analytic gradients against central differences. Each element is
/// perturbed by ±step and the difference quotient uses the perturbation that
/// was actually representable.
GradCheckReport grad_check(const Objective& objective, const std::vector<Parameter*>& params,
                           double step = 1e-6);

}  // namespace tron
