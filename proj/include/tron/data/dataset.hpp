// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "tron/data/scaler.hpp"
#include "tron/data/series.hpp"
#include "tron/model/tron_model.hpp"

namespace tron {

/// Inclusive-endpoint lat/lon grid, latitude-outer row-major. Coordinates are
/// (lon, lat), normalised per axis to [0,1] over the given ranges.
QueryGrid make_grid(double lat_step, double lon_step, std::array<double, 2> lat_range = {-90.0, 90.0},
                    std::array<double, 2> lon_range = {-180.0, 180.0});

/// Normalises grid degrees with a fitted coordinate scaler.
QueryGrid normalized_grid(const Tensor& degrees, const Scaler& scaler);

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
  bool operator==(const SplitSizes&) const = default;
};

/// The last `test_days` days go to test; the remaining R days split
/// train = ⌊R/2⌋, val = ⌈R/2⌉, contiguous and in that order.
SplitSizes chronological_split(std::size_t n_days, std::size_t test_days = 365);

/// N′ × T × S windows over one partition with their final-day field targets.
struct SequencedDataset {
  Tensor inputs;                  // [N′×T×S]
  Tensor targets;                 // [N′×P]
  std::vector<Day> origin_dates;  // first day of each window

  std::size_t size() const { return inputs.rank() == 3 ? inputs.dim(0) : 0; }
  std::size_t seq_len() const { return inputs.rank() == 3 ? inputs.dim(1) : 0; }
  std::size_t sensors() const { return inputs.rank() == 3 ? inputs.dim(2) : 0; }
  std::size_t points() const { return targets.rank() == 2 ? targets.dim(1) : 0; }

  /// Windows `indices`, in that order: ([B×T×S], [B×P]).
  std::pair<Tensor, Tensor> batch(std::span<const std::size_t> indices) const;

  bool operator==(const SequencedDataset&) const = default;
};

/// Window i spans rows [i, i+T−1] of `counts`; its target is field row i+T−1.
SequencedDataset sliding_window(const Tensor& counts, const Tensor& field, std::size_t seq_len,
                                const std::vector<Day>& dates = {});

/// Binary dataset file: "SEQD", u16 version, u32 N′/T/S/P, i64 origin day
/// numbers, inputs, targets (f64 LE), CRC-32 trailer.
void write_dataset(const std::filesystem::path& path, const SequencedDataset& ds);
SequencedDataset read_dataset(const std::filesystem::path& path);

/// scaler.bin: "SCLR", u16 version, scaler state, CRC-32 trailer.
void write_scaler(const std::filesystem::path& path, const Scaler& scaler);
Scaler read_scaler(const std::filesystem::path& path);

struct PreparedData {
  SplitSizes days;
  Scaler scaler;
  QueryGrid grid;  // normalised coords plus raw degrees
  SequencedDataset train, val, test;
};

/// Full preparation: split by day, fit the scaler on training rows only
/// (sensors per station, field globally, coordinates per axis over the field
/// grid), transform every partition, then window each partition separately.
PreparedData prepare_data(const SensorSeries& sensors, const FieldSeries& field, std::size_t seq_len,
                          std::size_t test_days = 365);

}  // namespace tron
