// SPDX-License-Identifier: Apache-2.0
#include "tron/data/dataset.hpp"

#include <cmath>

#include "tron/errors.hpp"
#include "tron/io/binary.hpp"

namespace tron {

namespace {

constexpr std::uint16_t kDatasetVersion = 1;
constexpr std::uint16_t kScalerVersion = 1;

std::size_t axis_points(double lo, double hi, double step, const char* axis) {
  if (!(step > 0.0) || !(hi > lo)) {
    throw ConfigError(std::string("grid: ") + axis + " step and range must be positive");
  }
  const double span = hi - lo;
  const double count = std::round(span / step);
  if (count < 1.0 || std::abs(count * step - span) > 1e-9 * span) {
    throw ConfigError(std::string("grid: ") + axis + " step " + std::to_string(step) + " does not divide span " +
                      std::to_string(span));
  }
  return static_cast<std::size_t>(count) + 1;
}

}  // namespace

QueryGrid make_grid(double lat_step, double lon_step, std::array<double, 2> lat_range,
                    std::array<double, 2> lon_range) {
  const std::size_t n_lat = axis_points(lat_range[0], lat_range[1], lat_step, "latitude");
  const std::size_t n_lon = axis_points(lon_range[0], lon_range[1], lon_step, "longitude");
  const double lat_span = lat_range[1] - lat_range[0];
  const double lon_span = lon_range[1] - lon_range[0];
  QueryGrid g;
  g.coords = Tensor({n_lat * n_lon, 2});
  g.degrees = Tensor({n_lat * n_lon, 2});
  std::size_t row = 0;
  for (std::size_t i = 0; i < n_lat; ++i) {
    // Last index pinned to the endpoint so the range is hit exactly.
    const double lat = i + 1 == n_lat ? lat_range[1] : lat_range[0] + static_cast<double>(i) * lat_step;
    for (std::size_t j = 0; j < n_lon; ++j, ++row) {
      const double lon = j + 1 == n_lon ? lon_range[1] : lon_range[0] + static_cast<double>(j) * lon_step;
      g.degrees.at(row, 0) = lon;
      g.degrees.at(row, 1) = lat;
      g.coords.at(row, 0) = (lon - lon_range[0]) / lon_span;
      g.coords.at(row, 1) = (lat - lat_range[0]) / lat_span;
    }
  }
  return g;
}

QueryGrid normalized_grid(const Tensor& degrees, const Scaler& scaler) {
  require_rank(degrees, 2, "grid degrees");
  if (degrees.dim(1) != 2) throw DimensionError("grid degrees must be [P×2]");
  return QueryGrid{scaler.coords.transform(degrees), degrees};
}

SplitSizes chronological_split(std::size_t n_days, std::size_t test_days) {
  if (n_days <= test_days + 2) {
    throw ConfigError("chronological split needs more than " + std::to_string(test_days + 2) + " days, got " +
                      std::to_string(n_days));
  }
  const std::size_t rest = n_days - test_days;
  return {rest / 2, rest - rest / 2, test_days};
}

std::pair<Tensor, Tensor> SequencedDataset::batch(std::span<const std::size_t> indices) const {
  const std::size_t t = seq_len(), s = sensors(), p = points();
  const std::size_t window = t * s;
  Tensor x({indices.size(), t, s});
  Tensor y({indices.size(), p});
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const std::size_t i = indices[b];
    if (i >= size()) throw DimensionError("dataset batch index out of range");
    std::copy_n(inputs.storage().begin() + static_cast<std::ptrdiff_t>(i * window), window,
                x.storage().begin() + static_cast<std::ptrdiff_t>(b * window));
    std::copy_n(targets.storage().begin() + static_cast<std::ptrdiff_t>(i * p), p,
                y.storage().begin() + static_cast<std::ptrdiff_t>(b * p));
  }
  return {std::move(x), std::move(y)};
}

SequencedDataset sliding_window(const Tensor& counts, const Tensor& field, std::size_t seq_len,
                                const std::vector<Day>& dates) {
  require_rank(counts, 2, "sliding_window counts");
  require_rank(field, 2, "sliding_window field");
  const std::size_t n = counts.dim(0);
  if (field.dim(0) != n) throw DimensionError("sliding_window: counts and field row counts differ");
  if (!dates.empty() && dates.size() != n) throw DimensionError("sliding_window: dates and counts differ");
  if (seq_len == 0) throw ConfigError("sequence length must be >= 1");
  if (seq_len > n) {
    throw DataError("empty partition: sequence length " + std::to_string(seq_len) + " exceeds partition of " +
                    std::to_string(n) + " days");
  }
  const std::size_t windows = n - seq_len + 1;
  const std::size_t s = counts.dim(1), p = field.dim(1);
  SequencedDataset ds;
  ds.inputs = Tensor({windows, seq_len, s});
  ds.targets = Tensor({windows, p});
  for (std::size_t i = 0; i < windows; ++i) {
    std::copy_n(counts.storage().begin() + static_cast<std::ptrdiff_t>(i * s), seq_len * s,
                ds.inputs.storage().begin() + static_cast<std::ptrdiff_t>(i * seq_len * s));
    std::copy_n(field.storage().begin() + static_cast<std::ptrdiff_t>((i + seq_len - 1) * p), p,
                ds.targets.storage().begin() + static_cast<std::ptrdiff_t>(i * p));
    if (!dates.empty()) ds.origin_dates.push_back(dates[i]);
  }
  return ds;
}

void write_dataset(const std::filesystem::path& path, const SequencedDataset& ds) {
  io::ByteWriter w;
  w.bytes("SEQD");
  w.u16(kDatasetVersion);
  w.u32(static_cast<std::uint32_t>(ds.size()));
  w.u32(static_cast<std::uint32_t>(ds.seq_len()));
  w.u32(static_cast<std::uint32_t>(ds.sensors()));
  w.u32(static_cast<std::uint32_t>(ds.points()));
  w.u8(ds.origin_dates.empty() ? 0 : 1);
  for (const auto& d : ds.origin_dates) w.i64(d.time_since_epoch().count());
  w.f64s(ds.inputs.data());
  w.f64s(ds.targets.data());
  w.crc();
  io::write_file(path, w.buffer());
}

SequencedDataset read_dataset(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::ByteReader r(bytes, path.string());
  r.verify_crc();
  r.expect("SEQD");
  if (const auto v = r.u16(); v != kDatasetVersion) {
    throw DataError(path.string() + ": unsupported dataset version " + std::to_string(v));
  }
  const std::size_t n = r.u32(), t = r.u32(), s = r.u32(), p = r.u32();
  SequencedDataset ds;
  if (r.u8() == 1) {
    ds.origin_dates.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ds.origin_dates.emplace_back(std::chrono::days{r.i64()});
  }
  ds.inputs = Tensor({n, t, s}, r.f64s(n * t * s));
  ds.targets = Tensor({n, p}, r.f64s(n * p));
  r.expect_end();
  return ds;
}

void write_scaler(const std::filesystem::path& path, const Scaler& scaler) {
  io::ByteWriter w;
  w.bytes("SCLR");
  w.u16(kScalerVersion);
  scaler.write(w);
  w.crc();
  io::write_file(path, w.buffer());
}

Scaler read_scaler(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::ByteReader r(bytes, path.string());
  r.verify_crc();
  r.expect("SCLR");
  if (const auto v = r.u16(); v != kScalerVersion) {
    throw DataError(path.string() + ": unsupported scaler version " + std::to_string(v));
  }
  Scaler s = Scaler::read(r);
  r.expect_end();
  return s;
}

PreparedData prepare_data(const SensorSeries& sensors, const FieldSeries& field, std::size_t seq_len,
                          std::size_t test_days) {
  sensors.validate();
  field.validate();
  if (sensors.has_missing()) throw DataError("sensor series still has missing values; run gap filling first");
  if (field.days() != sensors.days()) {
    throw DataError("field has " + std::to_string(field.days()) + " days, sensors have " +
                    std::to_string(sensors.days()));
  }
  require_shape(field.grid.degrees, {field.points(), 2}, "field grid degrees");

  PreparedData out;
  out.days = chronological_split(sensors.days(), test_days);
  const std::size_t train_end = out.days.train;
  const std::size_t val_end = train_end + out.days.val;
  const std::size_t n = sensors.days();

  out.scaler.sensors.fit(slice_rows(sensors.counts, 0, train_end), sensors.station_ids);
  out.scaler.field.fit(slice_rows(field.values, 0, train_end));
  out.scaler.coords.fit(field.grid.degrees, {"lon", "lat"});
  out.grid = normalized_grid(field.grid.degrees, out.scaler);

  const Tensor counts = out.scaler.sensors.transform(sensors.counts);
  const Tensor values = out.scaler.field.transform(field.values);
  auto partition = [&](std::size_t begin, std::size_t end) {
    const std::vector<Day> dates(sensors.dates.begin() + static_cast<std::ptrdiff_t>(begin),
                                 sensors.dates.begin() + static_cast<std::ptrdiff_t>(end));
    return sliding_window(slice_rows(counts, begin, end), slice_rows(values, begin, end), seq_len, dates);
  };
  out.train = partition(0, train_end);
  out.val = partition(train_end, val_end);
  out.test = partition(val_end, n);
  return out;
}

}  // namespace tron
