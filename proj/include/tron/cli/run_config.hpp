// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "tron/eval/metrics.hpp"
#include "tron/model/config.hpp"
#include "tron/oracle/synthetic.hpp"

namespace tron::cli {

struct PathsSection {
  std::string sensors;     // sensors.csv
  std::string field;       // field.bin
  std::string grid;        // grid.csv (optional cross-check for prepare)
  std::string data;        // prepared dataset directory
  std::string checkpoint;  // checkpoint.tron
  std::string window;      // infer: sensor window CSV
  std::string queries;     // infer: lon,lat CSV
  std::vector<std::string> checkpoints;  // bench
  std::string out = "out";
};

struct DataSection {
  std::size_t seq_len = 30;
  std::size_t test_days = 365;
  std::size_t max_gap = 14;
  std::size_t poly_order = 3;
  double lat_step = 5.0;  // generate grid
  double lon_step = 5.0;
};

struct ModelSection {
  Variant variant = Variant::s_lstm;
  std::size_t hidden = 128;
  std::size_t layers = 4;
  std::size_t hd = 128;
};

struct TrainSection {
  double lr = 1e-3;
  std::size_t batch_size = 16;
  std::size_t patience = 10;
  std::size_t max_epochs = 500;
  std::uint64_t seed = 0;
};

struct EvalSection {
  MetricUnits units = MetricUnits::physical;
  std::size_t bins = 50;
  std::string partition = "test";
};

struct BenchSection {
  std::vector<std::string> variants = {"S-GRU", "S-LSTM", "M-GRU", "M-LSTM"};
  std::size_t reps = 100;
  std::size_t warmup = 10;
  std::size_t n_sensors = 12;
  double lat_step = 5.0;
  double lon_step = 5.0;
};

/// Whole-run configuration. Text form: one `section.key = value` per line,
/// `#` comments, lists comma-separated. Unknown or repeated keys are errors.
struct RunConfig {
  PathsSection paths;
  SyntheticScenario scenario;
  DataSection data;
  ModelSection model;
  TrainSection train;
  EvalSection eval;
  BenchSection bench;

  static RunConfig parse(const std::string& text, const std::string& source = "config");
  static RunConfig load(const std::filesystem::path& path);

  /// Sets one key from its text form; throws ConfigError naming the key.
  void set(const std::string& key, const std::string& value);
  /// Applies derived defaults and checks invariants.
  void finalize();

  /// Every key in sorted order, `key = value` per line.
  std::string canonical_text() const;
  /// CRC-32 of the canonical text, 8 hex digits.
  std::string hash() const;

  static std::vector<std::string> keys();

 private:
  std::set<std::string> explicit_;
};

}  // namespace tron::cli
