// SPDX-License-Identifier: Apache-2.0
#include "tron/ndcore/adam.hpp"

#include <cmath>

#include "tron/errors.hpp"

namespace tron {

namespace {

void require_finite(std::span<const double> grads, const std::string& label) {
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw DivergenceError("non-finite gradient in " + label + " at element " + std::to_string(i));
    }
  }
}

void update(std::span<double> params, std::span<const double> grads, double* m, double* v,
            const AdamState& s) {
  const double t = static_cast<double>(s.step);
  const double c1 = 1.0 - std::pow(s.beta1, t);
  const double c2 = 1.0 - std::pow(s.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * grads[i];
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * grads[i] * grads[i];
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    params[i] -= s.learning_rate * m_hat / (std::sqrt(v_hat) + s.epsilon);
  }
}

}  // namespace

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const std::string& label) {
  if (params.size() != grads.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw DimensionError("adam_step: parameter, gradient and moment lengths differ");
  }
  require_finite(grads, label);
  ++state.step;
  update(params, grads, state.first_moment.data(), state.second_moment.data(), state);
}

Adam::Adam(std::vector<Parameter*> params, double learning_rate) : params_(std::move(params)) {
  std::size_t n = 0;
  for (const auto* p : params_) n += p->size();
  state_ = AdamState(n, learning_rate);
}

void Adam::step() {
  for (const auto* p : params_) require_finite(p->grad.data(), p->name);
  ++state_.step;
  std::size_t offset = 0;
  for (auto* p : params_) {
    update(p->value.data(), p->grad.data(), state_.first_moment.data() + offset,
           state_.second_moment.data() + offset, state_);
    offset += p->size();
  }
}

void Adam::zero_grad() {
  for (auto* p : params_) p->zero_grad();
}

}  // namespace tron
