// SPDX-License-Identifier: Apache-2.0
#include "tron/data/gap_fill.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

#include "tron/errors.hpp"

namespace tron {

namespace {

struct Neighbor {
  std::size_t day;
  std::size_t distance;
};

}  // namespace

SensorSeries gap_fill(const SensorSeries& series, std::size_t max_gap, std::size_t poly_order) {
  series.validate();
  SensorSeries out = series;
  const std::size_t n = series.days();
  const std::size_t wanted = 2 * (poly_order + 1);

  for (std::size_t s = 0; s < series.sensors(); ++s) {
    auto missing = [&](std::size_t d) { return std::isnan(series.counts.at(d, s)); };
    std::size_t d = 0;
    while (d < n) {
      if (!missing(d)) {
        ++d;
        continue;
      }
      const std::size_t begin = d;
      while (d < n && missing(d)) ++d;
      const std::size_t end = d;  // exclusive
      const std::string where = "station " + series.station_ids[s] + " from " + format_date(series.dates[begin]) +
                                " to " + format_date(series.dates[end - 1]);
      if (end - begin > max_gap) {
        throw DataError("unfillable gap of " + std::to_string(end - begin) + " days (max " + std::to_string(max_gap) +
                        ") at " + where);
      }

      // Nearest valid days by distance to the gap; ties favour the earlier day.
      std::vector<Neighbor> candidates;
      for (std::size_t k = 0; k < n; ++k) {
        if (missing(k)) continue;
        candidates.push_back({k, k < begin ? begin - k : k - (end - 1)});
      }
      std::stable_sort(candidates.begin(), candidates.end(),
                       [](const Neighbor& a, const Neighbor& b) { return a.distance < b.distance; });
      if (candidates.size() > wanted) candidates.resize(wanted);
      if (candidates.size() < poly_order + 1) {
        throw DataError("unfillable gap: only " + std::to_string(candidates.size()) + " valid neighbours for order " +
                        std::to_string(poly_order) + " fit at " + where);
      }

      // Centre and scale the abscissa for conditioning.
      const double centre = 0.5 * static_cast<double>(begin + end - 1);
      double scale = 1.0;
      for (const auto& c : candidates) scale = std::max(scale, std::abs(static_cast<double>(c.day) - centre));
      const auto rows = static_cast<Eigen::Index>(candidates.size());
      const auto cols = static_cast<Eigen::Index>(poly_order + 1);
      Eigen::MatrixXd design(rows, cols);
      Eigen::VectorXd rhs(rows);
      for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& c = candidates[static_cast<std::size_t>(i)];
        const double u = (static_cast<double>(c.day) - centre) / scale;
        double p = 1.0;
        for (Eigen::Index j = 0; j < cols; ++j, p *= u) design(i, j) = p;
        rhs(i) = series.counts.at(c.day, s);
      }
      const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
      for (std::size_t g = begin; g < end; ++g) {
        const double u = (static_cast<double>(g) - centre) / scale;
        double value = 0.0;
        for (Eigen::Index j = cols - 1; j >= 0; --j) value = value * u + coef(j);
        out.counts.at(g, s) = value;
      }
    }
  }
  return out;
}

}  // namespace tron
