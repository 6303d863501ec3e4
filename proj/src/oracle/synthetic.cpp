// SPDX-License-Identifier: Apache-2.0
#include "tron/oracle/synthetic.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "tron/data/dataset.hpp"
#include "tron/errors.hpp"

namespace tron {

namespace {

/// Independent stream seeds from one scenario seed (splitmix64 finaliser).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

SyntheticScenario SyntheticScenario::with_sensors(std::size_t n) {
  SyntheticScenario s;
  s.n_sensors = n;
  s.sensor_offsets.resize(n);
  s.sensor_sensitivities.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.sensor_offsets[i] = 100.0 + 15.0 * static_cast<double>(i);
    s.sensor_sensitivities[i] = 30.0 + 5.0 * static_cast<double>(i % 4);
  }
  return s;
}

void SyntheticScenario::validate() const {
  if (n_days < 1) throw ConfigError("scenario.n_days must be >= 1");
  if (n_sensors < 1) throw ConfigError("scenario.n_sensors must be >= 1");
  if (sensor_offsets.size() != n_sensors || sensor_sensitivities.size() != n_sensors) {
    throw ConfigError("scenario sensor offsets/sensitivities must have n_sensors entries");
  }
  if (!(base_dose > 0.0)) throw ConfigError("scenario.base_dose must be > 0");
  if (!(ar_coef >= 0.0 && ar_coef < 1.0)) throw ConfigError("scenario.ar_coef must be in [0, 1)");
  if (memory_lag < 1) throw ConfigError("scenario.memory_lag must be >= 1");
  if (!(period_days > 0.0)) throw ConfigError("scenario.period_days must be > 0");
  if (modulation_noise_sd < 0.0 || sensor_noise_sd < 0.0) throw ConfigError("scenario noise sd must be >= 0");
  parse_date(start_date);
}

std::string SyntheticScenario::to_json() const {
  nlohmann::json j;
  j["n_days"] = n_days;
  j["n_sensors"] = n_sensors;
  j["start_date"] = start_date;
  j["lat_step"] = lat_step;
  j["lon_step"] = lon_step;
  j["period_days"] = period_days;
  j["amplitude"] = amplitude;
  j["ar_coef"] = ar_coef;
  j["modulation_noise_sd"] = modulation_noise_sd;
  j["sensor_offsets"] = sensor_offsets;
  j["sensor_sensitivities"] = sensor_sensitivities;
  j["sensor_noise_sd"] = sensor_noise_sd;
  j["base_dose"] = base_dose;
  j["shield_exponent"] = shield_exponent;
  j["memory_lag"] = memory_lag;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

SyntheticScenario SyntheticScenario::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  }
  SyntheticScenario s;
  s.sensor_offsets.clear();
  s.sensor_sensitivities.clear();
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n_days") s.n_days = value.get<std::size_t>();
      else if (key == "n_sensors") s.n_sensors = value.get<std::size_t>();
      else if (key == "start_date") s.start_date = value.get<std::string>();
      else if (key == "lat_step") s.lat_step = value.get<double>();
      else if (key == "lon_step") s.lon_step = value.get<double>();
      else if (key == "period_days") s.period_days = value.get<double>();
      else if (key == "amplitude") s.amplitude = value.get<double>();
      else if (key == "ar_coef") s.ar_coef = value.get<double>();
      else if (key == "modulation_noise_sd") s.modulation_noise_sd = value.get<double>();
      else if (key == "sensor_offsets") s.sensor_offsets = value.get<std::vector<double>>();
      else if (key == "sensor_sensitivities") s.sensor_sensitivities = value.get<std::vector<double>>();
      else if (key == "sensor_noise_sd") s.sensor_noise_sd = value.get<double>();
      else if (key == "base_dose") s.base_dose = value.get<double>();
      else if (key == "shield_exponent") s.shield_exponent = value.get<double>();
      else if (key == "memory_lag") s.memory_lag = value.get<std::size_t>();
      else if (key == "seed") s.seed = value.get<std::uint64_t>();
      else throw ConfigError("scenario JSON: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  }
  if (s.sensor_offsets.empty() && s.sensor_sensitivities.empty()) {
    const auto defaults = with_sensors(s.n_sensors);
    s.sensor_offsets = defaults.sensor_offsets;
    s.sensor_sensitivities = defaults.sensor_sensitivities;
  }
  s.validate();
  return s;
}

std::vector<double> gen_modulation(const SyntheticScenario& sc) {
  std::mt19937_64 rng(derive_seed(sc.seed, 0));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> m(sc.n_days);
  const double stationary_sd = sc.modulation_noise_sd / std::sqrt(1.0 - sc.ar_coef * sc.ar_coef);
  double ar = stationary_sd * noise(rng);
  for (std::size_t t = 0; t < sc.n_days; ++t) {
    if (t > 0) ar = sc.ar_coef * ar + sc.modulation_noise_sd * noise(rng);
    m[t] = sc.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / sc.period_days) + ar;
  }
  return m;
}

std::vector<double> trailing_mean(const std::vector<double>& m, std::size_t lag) {
  std::vector<double> out(m.size());
  for (std::size_t t = 0; t < m.size(); ++t) {
    const std::size_t begin = t + 1 >= lag ? t + 1 - lag : 0;
    double sum = 0.0;
    for (std::size_t k = begin; k <= t; ++k) sum += m[k];
    out[t] = sum / static_cast<double>(t + 1 - begin);
  }
  return out;
}

SensorSeries gen_sensor_counts(const std::vector<double>& m, const SyntheticScenario& sc) {
  sc.validate();
  std::mt19937_64 rng(derive_seed(sc.seed, 1));
  std::normal_distribution<double> noise(0.0, 1.0);
  SensorSeries s;
  const Day start = parse_date(sc.start_date);
  for (std::size_t t = 0; t < m.size(); ++t) s.dates.push_back(start + std::chrono::days{static_cast<int>(t)});
  for (std::size_t k = 0; k < sc.n_sensors; ++k) {
    char id[16];
    std::snprintf(id, sizeof id, "SYN%02zu", k + 1);
    s.station_ids.emplace_back(id);
  }
  s.counts = Tensor({m.size(), sc.n_sensors});
  for (std::size_t t = 0; t < m.size(); ++t) {
    for (std::size_t k = 0; k < sc.n_sensors; ++k) {
      const double eps = sc.sensor_noise_sd > 0.0 ? sc.sensor_noise_sd * noise(rng) : 0.0;
      s.counts.at(t, k) = sc.sensor_offsets[k] - sc.sensor_sensitivities[k] * m[t] + eps;
    }
  }
  return s;
}

double shield_factor(double lat_degrees, double exponent) {
  return std::pow(std::abs(std::sin(lat_degrees * std::numbers::pi / 180.0)), exponent);
}

FieldSeries gen_dose_field(const std::vector<double>& m, const SyntheticScenario& sc) {
  sc.validate();
  FieldSeries f;
  f.grid = make_grid(sc.lat_step, sc.lon_step);
  const Day start = parse_date(sc.start_date);
  for (std::size_t t = 0; t < m.size(); ++t) f.dates.push_back(start + std::chrono::days{static_cast<int>(t)});
  const std::size_t p = f.grid.size();
  std::vector<double> shield(p);
  for (std::size_t j = 0; j < p; ++j) shield[j] = shield_factor(f.grid.degrees.at(j, 1), sc.shield_exponent);
  const auto mean = trailing_mean(m, sc.memory_lag);
  f.values = Tensor({m.size(), p});
  for (std::size_t t = 0; t < m.size(); ++t) {
    for (std::size_t j = 0; j < p; ++j) {
      const double x = sc.base_dose * (1.0 + shield[j] * mean[t]);
      if (!(x > 0.0)) {
        throw ConfigError("scenario produces a non-positive field value on day " + std::to_string(t));
      }
      f.values.at(t, j) = x;
    }
  }
  return f;
}

}  // namespace tron
