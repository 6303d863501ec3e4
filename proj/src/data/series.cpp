// SPDX-License-Identifier: Apache-2.0
#include "tron/data/series.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "tron/errors.hpp"
#include "tron/io/binary.hpp"

namespace tron {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

}  // namespace

Day parse_date(const std::string& iso) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' ||
      std::sscanf(iso.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
    throw DataError("invalid ISO-8601 date '" + iso + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) throw DataError("invalid calendar date '" + iso + "'");
  return std::chrono::sys_days{ymd};
}

std::string format_date(Day day) {
  const std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  const std::string s = strip(text);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError(context + ": cannot parse number '" + text + "'");
  }
  return v;
}

Tensor slice_rows(const Tensor& t, std::size_t begin, std::size_t end) {
  require_rank(t, 2, "slice_rows");
  if (begin > end || end > t.dim(0)) throw DimensionError("slice_rows: bad row range");
  const std::size_t cols = t.dim(1);
  std::vector<double> data(t.storage().begin() + static_cast<std::ptrdiff_t>(begin * cols),
                           t.storage().begin() + static_cast<std::ptrdiff_t>(end * cols));
  return Tensor({end - begin, cols}, std::move(data));
}

void SensorSeries::validate() const {
  require_shape(counts, {dates.size(), station_ids.size()}, "sensor counts");
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (dates[i] - dates[i - 1] != std::chrono::days{1}) {
      throw DataError("sensor dates not contiguous between " + format_date(dates[i - 1]) + " and " +
                      format_date(dates[i]));
    }
  }
}

bool SensorSeries::has_missing() const {
  for (double v : counts.data()) {
    if (std::isnan(v)) return true;
  }
  return false;
}

SensorSeries SensorSeries::rows(std::size_t begin, std::size_t end) const {
  return {std::vector<Day>(dates.begin() + static_cast<std::ptrdiff_t>(begin),
                           dates.begin() + static_cast<std::ptrdiff_t>(end)),
          slice_rows(counts, begin, end), station_ids};
}

void FieldSeries::validate() const {
  require_rank(values, 2, "field values");
  if (!dates.empty() && dates.size() != values.dim(0)) {
    throw DataError("field has " + std::to_string(values.dim(0)) + " rows but " + std::to_string(dates.size()) +
                    " dates");
  }
  if (grid.degrees.rank() == 2) require_shape(grid.degrees, {values.dim(1), 2}, "field grid degrees");
}

FieldSeries FieldSeries::rows(std::size_t begin, std::size_t end) const {
  FieldSeries out{{}, slice_rows(values, begin, end), grid};
  if (!dates.empty()) {
    out.dates.assign(dates.begin() + static_cast<std::ptrdiff_t>(begin),
                     dates.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

SensorSeries read_sensors_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  auto header = split_csv(strip(line));
  if (header.size() < 2 || strip(header[0]) != "date") {
    throw DataError(path.string() + ": header must be 'date,<station_id>...'");
  }
  SensorSeries s;
  for (std::size_t i = 1; i < header.size(); ++i) s.station_ids.push_back(strip(header[i]));
  const std::size_t n_sensors = s.station_ids.size();
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != n_sensors + 1) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(n_sensors + 1) +
                      " cells, got " + std::to_string(cells.size()));
    }
    s.dates.push_back(parse_date(strip(cells[0])));
    for (std::size_t k = 1; k < cells.size(); ++k) {
      const auto cell = strip(cells[k]);
      values.push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : parse_double(cell, path.string() + ":" + std::to_string(line_no)));
    }
  }
  s.counts = Tensor({s.dates.size(), n_sensors}, std::move(values));
  s.validate();
  return s;
}

void write_sensors_csv(const std::filesystem::path& path, const SensorSeries& series) {
  series.validate();
  std::ostringstream os;
  os << "date";
  for (const auto& id : series.station_ids) os << ',' << id;
  os << '\n';
  for (std::size_t i = 0; i < series.days(); ++i) {
    os << format_date(series.dates[i]);
    for (std::size_t k = 0; k < series.sensors(); ++k) {
      os << ',';
      const double v = series.counts.at(i, k);
      if (!std::isnan(v)) os << format_double(v);
    }
    os << '\n';
  }
  io::write_text(path, os.str());
}

FieldSeries read_field_bin(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::ByteReader r(bytes, path.string());
  r.expect("FLDS");
  const std::size_t n = r.u32();
  const std::size_t p = r.u32();
  FieldSeries f;
  f.values = Tensor({n, p}, r.f64s(n * p));
  f.grid.degrees = Tensor({p, 2}, r.f64s(2 * p));
  r.expect_end();
  return f;
}

void write_field_bin(const std::filesystem::path& path, const FieldSeries& field) {
  field.validate();
  require_shape(field.grid.degrees, {field.points(), 2}, "field grid degrees");
  io::ByteWriter w;
  w.bytes("FLDS");
  w.u32(static_cast<std::uint32_t>(field.days()));
  w.u32(static_cast<std::uint32_t>(field.points()));
  w.f64s(field.values.data());
  w.f64s(field.grid.degrees.data());
  io::write_file(path, w.buffer());
}

Tensor read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || strip(line) != "lon,lat") {
    throw DataError(path.string() + ": header must be 'lon,lat'");
  }
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != 2) throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected lon,lat");
    for (const auto& c : cells) values.push_back(parse_double(c, path.string() + ":" + std::to_string(line_no)));
  }
  const std::size_t p = values.size() / 2;
  return Tensor({p, 2}, std::move(values));
}

void write_grid_csv(const std::filesystem::path& path, const Tensor& degrees) {
  require_rank(degrees, 2, "grid degrees");
  std::ostringstream os;
  os << "lon,lat\n";
  for (std::size_t i = 0; i < degrees.dim(0); ++i) {
    os << format_double(degrees.at(i, 0)) << ',' << format_double(degrees.at(i, 1)) << '\n';
  }
  io::write_text(path, os.str());
}

}  // namespace tron
