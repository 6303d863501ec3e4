// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace tron {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

/// Dense row-major array of doubles.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  /// 2-D convenience constructor from nested rows.
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor vector(std::initializer_list<double> values);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * shape_.back() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * shape_.back() + c]; }

  /// View as a matrix with the last axis as columns and all leading axes folded into rows.
  MatrixMap matrix();
  ConstMatrixMap matrix() const;

  /// Flat view as a row vector.
  Eigen::Map<Eigen::RowVectorXd> row_vector() { return {data_.data(), static_cast<Eigen::Index>(data_.size())}; }
  Eigen::Map<const Eigen::RowVectorXd> row_vector() const {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
  }

  void fill(double value);
  Tensor reshaped(std::vector<std::size_t> shape) const;

  bool all_finite() const;
  bool operator==(const Tensor& other) const = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::size_t shape_product(const std::vector<std::size_t>& shape);
std::string shape_string(const std::vector<std::size_t>& shape);

/// out = a·bᵀ with every element summed over k in ascending order, so a row's
/// result does not depend on how many other rows are in `a` or `b`.
/// Operands are viewed through Tensor::matrix().
void matmul_nt(const Tensor& a, const Tensor& b, Tensor& out);
RowMatrix matmul_nt(const Tensor& a, const Tensor& b);

/// Throws DimensionError naming `what` unless `t` has exactly `expected`.
void require_shape(const Tensor& t, const std::vector<std::size_t>& expected, const std::string& what);
void require_rank(const Tensor& t, std::size_t rank, const std::string& what);

/// Trainable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string name, std::vector<std::size_t> shape);

  std::size_t size() const { return value.size(); }
  void zero_grad() { grad.fill(0.0); }
};

}  // namespace tron
