// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "tron/io/binary.hpp"
#include "tron/ndcore/tensor.hpp"

namespace tron {

struct MinMax {
  double min = 0.0;
  double max = 1.0;
  bool operator==(const MinMax&) const = default;
};

/// x ↦ (x − min)/(max − min), either per column or with one pair for all entries.
/// Values outside the fitted range map outside [0,1]; nothing is clamped.
class MinMaxScaler {
 public:
  enum class Mode { per_column, global };

  MinMaxScaler() = default;
  explicit MinMaxScaler(Mode mode) : mode_(mode) {}

  /// Fits on the rows of a 2-D tensor. `names` labels columns in errors.
  void fit(const Tensor& rows, const std::vector<std::string>& names = {});
  Tensor fit_transform(const Tensor& rows, const std::vector<std::string>& names = {});
  Tensor transform(const Tensor& values) const;
  Tensor inverse_transform(const Tensor& values) const;

  bool fitted() const { return !ranges_.empty(); }
  Mode mode() const { return mode_; }
  const std::vector<MinMax>& ranges() const { return ranges_; }
  /// Restores a previously fitted state (deserialisation).
  void set_ranges(Mode mode, std::vector<MinMax> ranges);

  bool operator==(const MinMaxScaler&) const = default;

 private:
  const MinMax& range_for(std::size_t column) const;

  Mode mode_ = Mode::per_column;
  std::vector<MinMax> ranges_;
};

/// Everything needed to move between physical units and model space:
/// per-station sensor ranges, one global field range, and per-axis coordinate ranges.
struct Scaler {
  MinMaxScaler sensors{MinMaxScaler::Mode::per_column};
  MinMaxScaler field{MinMaxScaler::Mode::global};
  MinMaxScaler coords{MinMaxScaler::Mode::per_column};

  bool fitted() const { return sensors.fitted() && field.fitted() && coords.fitted(); }
  bool operator==(const Scaler&) const = default;

  void write(io::ByteWriter& w) const;
  static Scaler read(io::ByteReader& r);
};

}  // namespace tron
