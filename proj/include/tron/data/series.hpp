// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "tron/model/tron_model.hpp"
#include "tron/ndcore/tensor.hpp"

namespace tron {

using Day = std::chrono::sys_days;

Day parse_date(const std::string& iso);
std::string format_date(Day d);

/// Day-indexed station counts [N×S]. NaN marks a missing value before gap filling.
struct SensorSeries {
  std::vector<Day> dates;
  Tensor counts;
  std::vector<std::string> station_ids;

  std::size_t days() const { return dates.size(); }
  std::size_t sensors() const { return station_ids.size(); }
  /// Checks shape agreement and strictly contiguous daily dates.
  void validate() const;
  bool has_missing() const;
  SensorSeries rows(std::size_t begin, std::size_t end) const;
};

/// Day-indexed field values [N×P] over a fixed query grid (degrees kept in grid.degrees).
struct FieldSeries {
  std::vector<Day> dates;
  Tensor values;
  QueryGrid grid;

  std::size_t days() const { return values.rank() == 2 ? values.dim(0) : 0; }
  std::size_t points() const { return values.rank() == 2 ? values.dim(1) : 0; }
  void validate() const;
  FieldSeries rows(std::size_t begin, std::size_t end) const;
};

/// Rows [begin, end) of a 2-D tensor.
Tensor slice_rows(const Tensor& t, std::size_t begin, std::size_t end);

/// sensors.csv: header `date,<station_id>...`, ISO dates, empty cell = missing.
SensorSeries read_sensors_csv(const std::filesystem::path& path);
void write_sensors_csv(const std::filesystem::path& path, const SensorSeries& series);

/// field.bin: "FLDS", u32 N, u32 P, N·P f64 values, then P (lon, lat) degree pairs.
/// The file carries no dates; callers align rows with the sensor series.
FieldSeries read_field_bin(const std::filesystem::path& path);
void write_field_bin(const std::filesystem::path& path, const FieldSeries& field);

/// grid.csv: header `lon,lat`, degrees. Returned grid has degrees only; coords empty.
Tensor read_grid_csv(const std::filesystem::path& path);
void write_grid_csv(const std::filesystem::path& path, const Tensor& degrees);

/// Shared number formatting: shortest text that round-trips the double.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& context);

}  // namespace tron
