// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tron/data/series.hpp"

namespace tron {

/// Synthetic ground truth. A shared modulation driver m(t) (sinusoid plus
/// AR(1) noise) feeds:
///   sensors  Y_s(t)  = a_s − b_s·m(t) + ε
///   field    X(r, t) = D0·(1 + |sin(lat)|^k · m̄_L(t))
/// where m̄_L is the trailing L-day mean of m.
struct SyntheticScenario {
  std::size_t n_days = 2000;
  std::size_t n_sensors = 6;
  std::string start_date = "2001-01-01";
  double lat_step = 5.0;
  double lon_step = 5.0;

  double period_days = 365.0;
  double amplitude = 0.2;
  double ar_coef = 0.95;
  double modulation_noise_sd = 0.01;

  std::vector<double> sensor_offsets = {100.0, 115.0, 130.0, 145.0, 160.0, 175.0};  // a_s
  std::vector<double> sensor_sensitivities = {30.0, 35.0, 40.0, 45.0, 30.0, 35.0};  // b_s
  double sensor_noise_sd = 2.0;

  double base_dose = 0.06;       // D0, µSv/h
  double shield_exponent = 2.0;  // k
  std::size_t memory_lag = 14;   // L, days

  std::uint64_t seed = 7;

  /// Scenario with `n_sensors` stations whose offsets/sensitivities are spread deterministically.
  static SyntheticScenario with_sensors(std::size_t n_sensors);
  void validate() const;

  /// Canonical JSON (sorted keys).
  std::string to_json() const;
  static SyntheticScenario from_json(const std::string& text);
};

/// m(t) for t = 0..n_days−1.
std::vector<double> gen_modulation(const SyntheticScenario& scenario);

/// Trailing mean over min(L, t+1) days ending at t.
std::vector<double> trailing_mean(const std::vector<double>& m, std::size_t lag);

SensorSeries gen_sensor_counts(const std::vector<double>& m, const SyntheticScenario& scenario);

/// Field over make_grid(scenario steps); throws ConfigError if any value is ≤ 0.
FieldSeries gen_dose_field(const std::vector<double>& m, const SyntheticScenario& scenario);

double shield_factor(double lat_degrees, double exponent);

}  // namespace tron
