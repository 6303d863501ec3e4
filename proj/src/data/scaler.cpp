// SPDX-License-Identifier: Apache-2.0
#include "tron/data/scaler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tron/errors.hpp"

namespace tron {

void MinMaxScaler::fit(const Tensor& rows, const std::vector<std::string>& names) {
  require_rank(rows, 2, "scaler fit input");
  if (rows.dim(0) == 0) throw DataError("scaler fit on zero rows");
  const std::size_t cols = rows.dim(1);
  auto label = [&](std::size_t c) {
    if (mode_ == Mode::global) return std::string("global");
    return c < names.size() ? names[c] : "column " + std::to_string(c);
  };
  const std::size_t n_ranges = mode_ == Mode::global ? 1 : cols;
  std::vector<MinMax> ranges(n_ranges, MinMax{std::numeric_limits<double>::infinity(),
                                               -std::numeric_limits<double>::infinity()});
  for (std::size_t r = 0; r < rows.dim(0); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = rows.at(r, c);
      if (!std::isfinite(v)) throw DataError("scaler fit: non-finite value in channel " + label(c));
      auto& range = ranges[mode_ == Mode::global ? 0 : c];
      range.min = std::min(range.min, v);
      range.max = std::max(range.max, v);
    }
  }
  for (std::size_t c = 0; c < n_ranges; ++c) {
    if (!(ranges[c].max > ranges[c].min)) {
      throw DataError("scaler fit: degenerate channel " + label(c) + " (max == min == " +
                      std::to_string(ranges[c].min) + ")");
    }
  }
  ranges_ = std::move(ranges);
}

Tensor MinMaxScaler::fit_transform(const Tensor& rows, const std::vector<std::string>& names) {
  fit(rows, names);
  return transform(rows);
}

const MinMax& MinMaxScaler::range_for(std::size_t column) const {
  if (mode_ == Mode::global) return ranges_.front();
  if (column >= ranges_.size()) {
    throw DimensionError("scaler fitted on " + std::to_string(ranges_.size()) + " channels, got column " +
                         std::to_string(column));
  }
  return ranges_[column];
}

Tensor MinMaxScaler::transform(const Tensor& values) const {
  if (!fitted()) throw DataError("transform called on an unfitted scaler");
  Tensor out = values;
  const std::size_t cols = values.shape().empty() ? 1 : values.shape().back();
  if (mode_ == Mode::per_column && cols != ranges_.size()) {
    throw DimensionError("scaler fitted on " + std::to_string(ranges_.size()) + " channels, input has " +
                         std::to_string(cols));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& r = range_for(i % cols);
    out[i] = (out[i] - r.min) / (r.max - r.min);
  }
  return out;
}

Tensor MinMaxScaler::inverse_transform(const Tensor& values) const {
  if (!fitted()) throw DataError("inverse_transform called on an unfitted scaler");
  Tensor out = values;
  const std::size_t cols = values.shape().empty() ? 1 : values.shape().back();
  if (mode_ == Mode::per_column && cols != ranges_.size()) {
    throw DimensionError("scaler fitted on " + std::to_string(ranges_.size()) + " channels, input has " +
                         std::to_string(cols));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& r = range_for(i % cols);
    out[i] = out[i] * (r.max - r.min) + r.min;
  }
  return out;
}

void MinMaxScaler::set_ranges(Mode mode, std::vector<MinMax> ranges) {
  for (const auto& r : ranges) {
    if (!(r.max > r.min)) throw DataError("scaler state has a degenerate range");
  }
  if (mode == Mode::global && ranges.size() != 1) throw DataError("global scaler needs exactly one range");
  mode_ = mode;
  ranges_ = std::move(ranges);
}

namespace {

void write_one(io::ByteWriter& w, const MinMaxScaler& s) {
  w.u8(s.mode() == MinMaxScaler::Mode::global ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(s.ranges().size()));
  for (const auto& r : s.ranges()) {
    w.f64(r.min);
    w.f64(r.max);
  }
}

MinMaxScaler read_one(io::ByteReader& r) {
  const auto mode = r.u8() == 1 ? MinMaxScaler::Mode::global : MinMaxScaler::Mode::per_column;
  const auto n = r.u32();
  std::vector<MinMax> ranges(n);
  for (auto& range : ranges) {
    range.min = r.f64();
    range.max = r.f64();
  }
  MinMaxScaler s(mode);
  if (n > 0) s.set_ranges(mode, std::move(ranges));
  return s;
}

}  // namespace

void Scaler::write(io::ByteWriter& w) const {
  write_one(w, sensors);
  write_one(w, field);
  write_one(w, coords);
}

Scaler Scaler::read(io::ByteReader& r) {
  Scaler s;
  s.sensors = read_one(r);
  s.field = read_one(r);
  s.coords = read_one(r);
  return s;
}

}  // namespace tron
