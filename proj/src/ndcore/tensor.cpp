// SPDX-License-Identifier: Apache-2.0
#include "tron/ndcore/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tron/errors.hpp"

namespace tron {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(shape_product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != data_.size()) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_string(shape_));
  }
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged rows in Tensor::from_rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(data));
}

Tensor Tensor::vector(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " +
                         shape_string(shape_));
  }
  return shape_[axis];
}

MatrixMap Tensor::matrix() {
  const auto cols = shape_.empty() ? std::size_t{1} : shape_.back();
  const auto rows = cols ? data_.size() / cols : 0;
  return MatrixMap(data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

ConstMatrixMap Tensor::matrix() const {
  const auto cols = shape_.empty() ? std::size_t{1} : shape_.back();
  const auto rows = cols ? data_.size() / cols : 0;
  return ConstMatrixMap(data_.data(), static_cast<Eigen::Index>(rows),
                        static_cast<Eigen::Index>(cols));
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
  if (shape_product(shape) != data_.size()) {
    throw DimensionError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void require_shape(const Tensor& t, const std::vector<std::size_t>& expected,
                   const std::string& what) {
  if (t.shape() != expected) {
    throw DimensionError(what + ": expected shape " + shape_string(expected) + ", got " +
                         shape_string(t.shape()));
  }
}

void require_rank(const Tensor& t, std::size_t rank, const std::string& what) {
  if (t.rank() != rank) {
    throw DimensionError(what + ": expected rank " + std::to_string(rank) + ", got shape " +
                         shape_string(t.shape()));
  }
}

Parameter::Parameter(std::string n, std::vector<std::size_t> shape)
    : name(std::move(n)), value(shape), grad(std::move(shape)) {}

namespace {

void matmul_nt_into(const ConstMatrixMap& a, const ConstMatrixMap& b, MatrixMap out) {
  if (a.cols() != b.cols() || out.rows() != a.rows() || out.cols() != b.rows()) {
    throw DimensionError("matmul_nt: shape mismatch");
  }
  const RowMatrix bt = b.transpose();
  out.setZero();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    auto row = out.row(i);
    for (Eigen::Index k = 0; k < a.cols(); ++k) row += a(i, k) * bt.row(k);
  }
}

}  // namespace

void matmul_nt(const Tensor& a, const Tensor& b, Tensor& out) { matmul_nt_into(a.matrix(), b.matrix(), out.matrix()); }

RowMatrix matmul_nt(const Tensor& a, const Tensor& b) {
  const auto am = a.matrix();
  const auto bm = b.matrix();
  RowMatrix out(am.rows(), bm.rows());
  matmul_nt_into(am, bm, MatrixMap(out.data(), out.rows(), out.cols()));
  return out;
}

}  // namespace tron
