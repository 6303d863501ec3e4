// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "tron/data/series.hpp"

namespace tron {

inline constexpr std::size_t kDefaultMaxGap = 14;
inline constexpr std::size_t kDefaultPolyOrder = 3;

/// Fills each run of missing (NaN) days per station with a least-squares
/// polynomial of `poly_order` fitted over the 2·(poly_order+1) nearest valid
/// days (fewer if the station has fewer, but at least poly_order+1).
/// Runs longer than `max_gap` days raise DataError naming station and dates.
SensorSeries gap_fill(const SensorSeries& series, std::size_t max_gap = kDefaultMaxGap,
                      std::size_t poly_order = kDefaultPolyOrder);

}  // namespace tron
