// SPDX-License-Identifier: Apache-2.0
#include "tron/ndcore/recurrent.hpp"

#include <cmath>

#include "tron/errors.hpp"
#include "tron/ndcore/ops.hpp"

namespace tron {

namespace {

using Array = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Array sigmoid(const Array& a) { return 1.0 / (1.0 + (-a).exp()); }

void check_step_shapes(const Tensor& x, const Tensor& h, const RecurrentLayer& layer,
                       const char* what) {
  require_rank(x, 2, std::string(what) + " input");
  if (x.dim(1) != layer.input_size) {
    throw DimensionError(std::string(what) + " input: expected " + std::to_string(layer.input_size) +
                         " features for " + layer.input_weights.name + ", got shape " +
                         shape_string(x.shape()));
  }
  require_shape(h, {x.dim(0), layer.hidden}, std::string(what) + " hidden state");
}

/// x Wᵢᵀ + bᵢ and h Wₕᵀ + bₕ, each [B × G·H].
std::pair<RowMatrix, RowMatrix> gate_projections(const Tensor& x, const Tensor& h,
                                                 const RecurrentLayer& layer) {
  RowMatrix gi = matmul_nt(x, layer.input_weights.value);
  gi.rowwise() += layer.input_bias.value.row_vector();
  RowMatrix gh = matmul_nt(h, layer.recurrent_weights.value);
  gh.rowwise() += layer.recurrent_bias.value.row_vector();
  return {std::move(gi), std::move(gh)};
}

void accumulate_weight_grads(Tape& t, Var x, Var h, RecurrentLayer& layer, const RowMatrix& d_input,
                             const RowMatrix& d_recurrent) {
  const auto xm = t.value(x).matrix();
  const auto hm = t.value(h).matrix();
  layer.input_weights.grad.matrix().noalias() += d_input.transpose() * xm;
  layer.recurrent_weights.grad.matrix().noalias() += d_recurrent.transpose() * hm;
  layer.input_bias.grad.row_vector() += d_input.colwise().sum();
  layer.recurrent_bias.grad.row_vector() += d_recurrent.colwise().sum();
  if (t.requires_grad(x)) {
    t.grad(x).matrix().noalias() += d_input * layer.input_weights.value.matrix();
  }
  if (t.requires_grad(h)) {
    t.grad(h).matrix().noalias() += d_recurrent * layer.recurrent_weights.value.matrix();
  }
}

}  // namespace

void fill_uniform(Tensor& t, double bound, Rng& rng) {
  for (auto& v : t.data()) v = rng.uniform(-bound, bound);
}

RecurrentLayer::RecurrentLayer(std::string name, CellKind k, std::size_t in, std::size_t h)
    : kind(k),
      input_size(in),
      hidden(h),
      input_weights(name + ".weight_ih", {gate_count(k) * h, in}),
      recurrent_weights(name + ".weight_hh", {gate_count(k) * h, h}),
      input_bias(name + ".bias_ih", {gate_count(k) * h}),
      recurrent_bias(name + ".bias_hh", {gate_count(k) * h}) {
  if (in == 0 || h == 0) throw ConfigError("recurrent layer " + name + " needs non-zero sizes");
}

std::size_t RecurrentLayer::parameter_count(CellKind kind, std::size_t input_size,
                                            std::size_t hidden) {
  const std::size_t gh = gate_count(kind) * hidden;
  return gh * (input_size + hidden) + 2 * gh;
}

std::vector<Parameter*> RecurrentLayer::parameters() {
  return {&input_weights, &recurrent_weights, &input_bias, &recurrent_bias};
}

void RecurrentLayer::initialize(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (auto* p : parameters()) fill_uniform(p->value, bound, rng);
}

Var gru_step(Tape& tape, Var x, Var h, RecurrentLayer& layer) {
  if (layer.kind != CellKind::gru) throw ConfigError("gru_step called with LSTM weights " + layer.input_weights.name);
  const Tensor& xv = tape.value(x);
  const Tensor& hv = tape.value(h);
  check_step_shapes(xv, hv, layer, "gru_step");
  const auto H = static_cast<Eigen::Index>(layer.hidden);
  const auto B = static_cast<Eigen::Index>(xv.dim(0));

  auto [gi, gh] = gate_projections(xv, hv, layer);
  Array r = sigmoid(gi.leftCols(H).array() + gh.leftCols(H).array());
  Array z = sigmoid(gi.middleCols(H, H).array() + gh.middleCols(H, H).array());
  Array hn = gh.rightCols(H).array();
  Array n = (gi.rightCols(H).array() + r * hn).tanh();

  Tensor out({xv.dim(0), layer.hidden});
  out.matrix().array() = (1.0 - z) * n + z * hv.matrix().array();

  Var result = tape.push(std::move(out));
  tape.on_backward([x, h, result, lp = &layer, r = std::move(r), z = std::move(z),
                    n = std::move(n), hn = std::move(hn), H, B](Tape& t) {
    const Tensor* g = t.grad_if(result);
    if (!g) return;
    const Array dh_out = g->matrix().array();
    const Array hprev = t.value(h).matrix().array();

    const Array dn = dh_out * (1.0 - z);
    const Array dz = dh_out * (hprev - n);
    const Array da_n = dn * (1.0 - n * n);
    const Array dr = da_n * hn;
    const Array da_r = dr * r * (1.0 - r);
    const Array da_z = dz * z * (1.0 - z);

    RowMatrix d_input(B, 3 * H);
    RowMatrix d_recurrent(B, 3 * H);
    d_input.leftCols(H) = da_r.matrix();
    d_input.middleCols(H, H) = da_z.matrix();
    d_input.rightCols(H) = da_n.matrix();
    d_recurrent.leftCols(H) = da_r.matrix();
    d_recurrent.middleCols(H, H) = da_z.matrix();
    d_recurrent.rightCols(H) = (da_n * r).matrix();

    if (t.requires_grad(h)) t.grad(h).matrix().array() += dh_out * z;
    accumulate_weight_grads(t, x, h, *lp, d_input, d_recurrent);
  });
  return result;
}

std::pair<Var, Var> lstm_step(Tape& tape, Var x, Var h, Var c, RecurrentLayer& layer) {
  if (layer.kind != CellKind::lstm) throw ConfigError("lstm_step called with GRU weights " + layer.input_weights.name);
  const Tensor& xv = tape.value(x);
  const Tensor& hv = tape.value(h);
  const Tensor& cv = tape.value(c);
  check_step_shapes(xv, hv, layer, "lstm_step");
  require_shape(cv, hv.shape(), "lstm_step cell state");
  const auto H = static_cast<Eigen::Index>(layer.hidden);
  const auto B = static_cast<Eigen::Index>(xv.dim(0));

  auto [gi, gh] = gate_projections(xv, hv, layer);
  gi += gh;
  Array i = sigmoid(gi.leftCols(H).array());
  Array f = sigmoid(gi.middleCols(H, H).array());
  Array g = gi.middleCols(2 * H, H).array().tanh();
  Array o = sigmoid(gi.rightCols(H).array());

  Tensor c_next({xv.dim(0), layer.hidden});
  c_next.matrix().array() = f * cv.matrix().array() + i * g;
  Array tc = c_next.matrix().array().tanh();
  Tensor h_next({xv.dim(0), layer.hidden});
  h_next.matrix().array() = o * tc;

  Var c_var = tape.push(std::move(c_next));
  Var h_var = tape.push(std::move(h_next));
  tape.on_backward([x, h, c, c_var, h_var, lp = &layer, i = std::move(i), f = std::move(f),
                    g = std::move(g), o = std::move(o), tc = std::move(tc), H, B](Tape& t) {
    const Tensor* gh_out = t.grad_if(h_var);
    const Tensor* gc_out = t.grad_if(c_var);
    if (!gh_out && !gc_out) return;
    Array dc = Array::Zero(B, H);
    Array d_o = Array::Zero(B, H);
    if (gh_out) {
      const Array dh = gh_out->matrix().array();
      d_o = dh * tc;
      dc += dh * o * (1.0 - tc * tc);
    }
    if (gc_out) dc += gc_out->matrix().array();

    const Array cprev = t.value(c).matrix().array();
    RowMatrix da(B, 4 * H);
    da.leftCols(H) = (dc * g * i * (1.0 - i)).matrix();
    da.middleCols(H, H) = (dc * cprev * f * (1.0 - f)).matrix();
    da.middleCols(2 * H, H) = (dc * i * (1.0 - g * g)).matrix();
    da.rightCols(H) = (d_o * o * (1.0 - o)).matrix();

    if (t.requires_grad(c)) t.grad(c).matrix().array() += dc * f;
    accumulate_weight_grads(t, x, h, *lp, da, da);
  });
  return {h_var, c_var};
}

Var unroll(Tape& tape, Var seq, std::vector<RecurrentLayer>& layers) {
  if (layers.empty()) throw ConfigError("unroll needs at least one recurrent layer");
  const Tensor& sv = tape.value(seq);
  require_rank(sv, 3, "unroll sequence");
  const std::size_t batch = sv.dim(0);
  const std::size_t steps = sv.dim(1);
  if (steps == 0) throw DataError("unroll: empty sequence (T = 0)");
  if (sv.dim(2) != layers.front().input_size) {
    throw DimensionError("unroll: sequence has " + std::to_string(sv.dim(2)) + " features, first layer expects " +
                         std::to_string(layers.front().input_size));
  }
  const CellKind kind = layers.front().kind;
  for (std::size_t l = 1; l < layers.size(); ++l) {
    if (layers[l].kind != kind) throw ConfigError("unroll: mixed cell kinds in one stack");
    if (layers[l].input_size != layers[l - 1].hidden) {
      throw DimensionError("unroll: layer " + std::to_string(l) + " input size " +
                           std::to_string(layers[l].input_size) + " != previous hidden " +
                           std::to_string(layers[l - 1].hidden));
    }
  }

  std::vector<Var> hs, cs;
  for (const auto& layer : layers) {
    hs.push_back(tape.input(Tensor({batch, layer.hidden})));
    if (kind == CellKind::lstm) cs.push_back(tape.input(Tensor({batch, layer.hidden})));
  }
  for (std::size_t step = 0; step < steps; ++step) {
    Var in = time_step(tape, seq, step);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      if (kind == CellKind::gru) {
        hs[l] = gru_step(tape, in, hs[l], layers[l]);
      } else {
        std::tie(hs[l], cs[l]) = lstm_step(tape, in, hs[l], cs[l], layers[l]);
      }
      in = hs[l];
    }
  }
  return hs.back();
}

}  // namespace tron
