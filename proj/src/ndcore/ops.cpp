// SPDX-License-Identifier: Apache-2.0
#include "tron/ndcore/ops.hpp"

#include <cmath>

#include "tron/errors.hpp"

namespace tron {

Activation activation_from_string(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  throw ConfigError("unknown activation '" + name + "'");
}

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

Var dense(Tape& tape, Var x, Parameter& weight, Parameter& bias, Activation act) {
  const Tensor& xv = tape.value(x);
  require_rank(xv, 2, "dense input");
  require_rank(weight.value, 2, "dense weight " + weight.name);
  const std::size_t in = weight.value.dim(1);
  const std::size_t out = weight.value.dim(0);
  if (xv.dim(1) != in) {
    throw DimensionError("dense input: expected " + std::to_string(in) + " features for " +
                         weight.name + ", got shape " + shape_string(xv.shape()));
  }
  require_shape(bias.value, {out}, "dense bias " + bias.name);

  const std::size_t batch = xv.dim(0);
  Tensor y({batch, out});
  matmul_nt(xv, weight.value, y);
  y.matrix().rowwise() += bias.value.row_vector();
  if (act == Activation::relu) y.matrix() = y.matrix().cwiseMax(0.0);

  Var result = tape.push(std::move(y));
  tape.on_backward([x, result, w = &weight, b = &bias, act](Tape& t) {
    const Tensor* gy = t.grad_if(result);
    if (!gy) return;
    RowMatrix dz = gy->matrix();
    if (act == Activation::relu) {
      dz = (t.value(result).matrix().array() > 0.0).select(dz, 0.0);
    }
    const auto xm = t.value(x).matrix();
    w->grad.matrix().noalias() += dz.transpose() * xm;
    b->grad.row_vector() += dz.colwise().sum();
    if (t.requires_grad(x)) t.grad(x).matrix().noalias() += dz * w->value.matrix();
  });
  return result;
}

Var layer_norm(Tape& tape, Var x, Parameter& gamma, Parameter& beta, double eps) {
  const Tensor& xv = tape.value(x);
  require_rank(xv, 2, "layer_norm input");
  const std::size_t rows = xv.dim(0);
  const std::size_t h = xv.dim(1);
  if (h < 2) throw DataError("layer_norm: degenerate normalisation over " + std::to_string(h) + " feature(s)");
  if (!(eps > 0.0)) throw ConfigError("layer_norm: eps must be positive");
  require_shape(gamma.value, {h}, "layer_norm gamma " + gamma.name);
  require_shape(beta.value, {h}, "layer_norm beta " + beta.name);

  Tensor normalized({rows, h});
  std::vector<double> inv_std(rows);
  Tensor y({rows, h});
  for (std::size_t r = 0; r < rows; ++r) {
    double mean = 0.0;
    for (std::size_t k = 0; k < h; ++k) mean += xv.at(r, k);
    mean /= static_cast<double>(h);
    double var = 0.0;
    for (std::size_t k = 0; k < h; ++k) {
      const double d = xv.at(r, k) - mean;
      var += d * d;
    }
    var /= static_cast<double>(h);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t k = 0; k < h; ++k) {
      const double n = (xv.at(r, k) - mean) * inv_std[r];
      normalized.at(r, k) = n;
      y.at(r, k) = gamma.value[k] * n + beta.value[k];
    }
  }

  Var result = tape.push(std::move(y));
  tape.on_backward([x, result, g = &gamma, b = &beta, rows, h, normalized = std::move(normalized),
                    inv_std = std::move(inv_std)](Tape& t) {
    const Tensor* gy = t.grad_if(result);
    if (!gy) return;
    const bool need_x = t.requires_grad(x);
    Tensor* gx = need_x ? &t.grad(x) : nullptr;
    std::vector<double> dxhat(h);
    for (std::size_t r = 0; r < rows; ++r) {
      double sum_d = 0.0;
      double sum_dn = 0.0;
      for (std::size_t k = 0; k < h; ++k) {
        const double dy = gy->at(r, k);
        g->grad[k] += dy * normalized.at(r, k);
        b->grad[k] += dy;
        dxhat[k] = dy * g->value[k];
        sum_d += dxhat[k];
        sum_dn += dxhat[k] * normalized.at(r, k);
      }
      if (!gx) continue;
      const double inv_h = 1.0 / static_cast<double>(h);
      for (std::size_t k = 0; k < h; ++k) {
        gx->at(r, k) += inv_std[r] * (dxhat[k] - sum_d * inv_h - normalized.at(r, k) * sum_dn * inv_h);
      }
    }
  });
  return result;
}

Var mse(Tape& tape, Var pred, const Tensor& target) {
  const Tensor& pv = tape.value(pred);
  require_shape(target, pv.shape(), "mse target");
  const std::size_t n = pv.size();
  if (n == 0) throw DimensionError("mse over an empty tensor");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pv[i] - target[i];
    sum += d * d;
  }
  Var result = tape.push(Tensor({1}, sum / static_cast<double>(n)), tape.requires_grad(pred));
  if (tape.recording()) {
    tape.on_backward([pred, result, target, n](Tape& t) {
      const Tensor* g = t.grad_if(result);
      if (!g || !t.requires_grad(pred)) return;
      const double scale = 2.0 * (*g)[0] / static_cast<double>(n);
      Tensor& gp = t.grad(pred);
      const Tensor& pv = t.value(pred);
      for (std::size_t i = 0; i < n; ++i) gp[i] += scale * (pv[i] - target[i]);
    });
  }
  return result;
}

Var hadamard(Tape& tape, Var a, Var b) {
  const Tensor& av = tape.value(a);
  const Tensor& bv = tape.value(b);
  require_shape(bv, av.shape(), "hadamard operand");
  Tensor y(av.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] * bv[i];
  Var result = tape.push(std::move(y), tape.requires_grad(a) || tape.requires_grad(b));
  tape.on_backward([a, b, result](Tape& t) {
    const Tensor* g = t.grad_if(result);
    if (!g) return;
    if (t.requires_grad(a)) {
      Tensor& ga = t.grad(a);
      const Tensor& bv = t.value(b);
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += (*g)[i] * bv[i];
    }
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad(b);
      const Tensor& av = t.value(a);
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += (*g)[i] * av[i];
    }
  });
  return result;
}

Var add(Tape& tape, Var a, Var b) {
  const Tensor& av = tape.value(a);
  require_shape(tape.value(b), av.shape(), "add operand");
  Tensor y = av;
  const Tensor& bv = tape.value(b);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
  Var result = tape.push(std::move(y), tape.requires_grad(a) || tape.requires_grad(b));
  tape.on_backward([a, b, result](Tape& t) {
    const Tensor* g = t.grad_if(result);
    if (!g) return;
    for (Var v : {a, b}) {
      if (!t.requires_grad(v)) continue;
      Tensor& gv = t.grad(v);
      for (std::size_t i = 0; i < gv.size(); ++i) gv[i] += (*g)[i];
    }
  });
  return result;
}

Var add_row_bias(Tape& tape, Var x, Parameter& bias) {
  const Tensor& xv = tape.value(x);
  require_rank(xv, 2, "add_row_bias input");
  require_shape(bias.value, {xv.dim(1)}, "row bias " + bias.name);
  Tensor y = xv;
  y.matrix().rowwise() += bias.value.row_vector();
  Var result = tape.push(std::move(y));
  tape.on_backward([x, result, b = &bias](Tape& t) {
    const Tensor* g = t.grad_if(result);
    if (!g) return;
    b->grad.row_vector() += g->matrix().colwise().sum();
    if (t.requires_grad(x)) t.grad(x).matrix() += g->matrix();
  });
  return result;
}

Var fuse(Tape& tape, Var branch, Var trunk, Parameter& beta) {
  const Tensor& bv = tape.value(branch);
  const Tensor& tv = tape.value(trunk);
  require_rank(bv, 2, "fuse branch latent");
  require_rank(tv, 2, "fuse trunk latent");
  if (bv.dim(1) != tv.dim(1)) {
    throw DimensionError("fuse: latent width mismatch, branch " + shape_string(bv.shape()) +
                         " vs trunk " + shape_string(tv.shape()));
  }
  require_shape(beta.value, {1}, "fuse output bias " + beta.name);
  Tensor y({bv.dim(0), tv.dim(0)});
  matmul_nt(bv, tv, y);
  y.matrix().array() += beta.value[0];
  Var result = tape.push(std::move(y));
  tape.on_backward([branch, trunk, result, beta_p = &beta](Tape& t) {
    const Tensor* g = t.grad_if(result);
    if (!g) return;
    beta_p->grad[0] += g->matrix().sum();
    if (t.requires_grad(branch)) {
      t.grad(branch).matrix().noalias() += g->matrix() * t.value(trunk).matrix();
    }
    if (t.requires_grad(trunk)) {
      t.grad(trunk).matrix().noalias() += g->matrix().transpose() * t.value(branch).matrix();
    }
  });
  return result;
}

Var time_step(Tape& tape, Var seq, std::size_t step) {
  const Tensor& sv = tape.value(seq);
  require_rank(sv, 3, "time_step input");
  const std::size_t batch = sv.dim(0), steps = sv.dim(1), width = sv.dim(2);
  if (step >= steps) throw DimensionError("time_step: index " + std::to_string(step) + " beyond " + std::to_string(steps) + " steps");
  Tensor y({batch, width});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t k = 0; k < width; ++k) y.at(b, k) = sv[(b * steps + step) * width + k];
  }
  Var result = tape.push(std::move(y), tape.requires_grad(seq));
  tape.on_backward([seq, result, step, batch, steps, width](Tape& t) {
    const Tensor* g = t.grad_if(result);
    if (!g || !t.requires_grad(seq)) return;
    Tensor& gs = t.grad(seq);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t k = 0; k < width; ++k) gs[(b * steps + step) * width + k] += g->at(b, k);
    }
  });
  return result;
}

Var channel(Tape& tape, Var seq, std::size_t s) {
  const Tensor& sv = tape.value(seq);
  require_rank(sv, 3, "channel input");
  const std::size_t batch = sv.dim(0), steps = sv.dim(1), width = sv.dim(2);
  if (s >= width) throw DimensionError("channel: index " + std::to_string(s) + " beyond " + std::to_string(width) + " channels");
  Tensor y({batch, steps, 1});
  for (std::size_t i = 0; i < batch * steps; ++i) y[i] = sv[i * width + s];
  Var result = tape.push(std::move(y), tape.requires_grad(seq));
  tape.on_backward([seq, result, s, width](Tape& t) {
    const Tensor* g = t.grad_if(result);
    if (!g || !t.requires_grad(seq)) return;
    Tensor& gs = t.grad(seq);
    for (std::size_t i = 0; i < g->size(); ++i) gs[i * width + s] += (*g)[i];
  });
  return result;
}

Var reshape(Tape& tape, Var x, std::vector<std::size_t> shape) {
  Var result = tape.push(tape.value(x).reshaped(std::move(shape)), tape.requires_grad(x));
  tape.on_backward([x, result](Tape& t) {
    const Tensor* g = t.grad_if(result);
    if (!g || !t.requires_grad(x)) return;
    Tensor& gx = t.grad(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += (*g)[i];
  });
  return result;
}

Var weighted_sum(Tape& tape, Var x, const Tensor& weights) {
  const Tensor& xv = tape.value(x);
  require_shape(weights, xv.shape(), "weighted_sum weights");
  double s = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) s += weights[i] * xv[i];
  Var result = tape.push(Tensor({1}, s), tape.requires_grad(x));
  if (tape.recording()) {
    tape.on_backward([x, result, weights](Tape& t) {
      const Tensor* g = t.grad_if(result);
      if (!g || !t.requires_grad(x)) return;
      Tensor& gx = t.grad(x);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += (*g)[0] * weights[i];
    });
  }
  return result;
}

}  // namespace tron
