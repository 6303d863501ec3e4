// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tron/data/scaler.hpp"
#include "tron/model/config.hpp"
#include "tron/model/tron_model.hpp"

namespace tron {

inline constexpr std::uint16_t kCheckpointVersion = 1;

/// Model configuration, fitted scaler and flat parameters.
struct Checkpoint {
  ModelConfig config;
  Scaler scaler;
  std::vector<double> parameters;

  static Checkpoint capture(const TronModel& model, const Scaler& scaler);
  /// Rebuilds the model; throws DataError if the parameter length disagrees with the config.
  TronModel model() const;

  /// "TRON", u16 version, config text, scaler, u64 count + f64 LE params, CRC-32.
  std::vector<std::uint8_t> serialize() const;
  static Checkpoint deserialize(std::span<const std::uint8_t> bytes, const std::string& source = "checkpoint");

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

  bool operator==(const Checkpoint&) const = default;
};

}  // namespace tron
