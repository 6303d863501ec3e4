// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "tron/ndcore/recurrent.hpp"

namespace tron {

enum class Variant { s_gru, s_lstm, m_gru, m_lstm, fnn };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

bool is_single_branch(Variant v);
bool is_multi_branch(Variant v);
CellKind cell_kind(Variant v);

struct ModelConfig {
  Variant variant = Variant::s_lstm;
  std::size_t seq_len = 30;   // T, days
  std::size_t n_sensors = 12; // S
  std::size_t hidden = 128;   // H
  std::size_t layers = 4;
  std::size_t hd = 128;       // latent width shared by branch and trunk

  void validate() const;

  /// `key=value` lines in sorted key order.
  std::string canonical_text() const;
  static ModelConfig from_canonical_text(const std::string& text);

  bool operator==(const ModelConfig&) const = default;
};

/// Widths of the hidden layers of the static feed-forward branch; its output layer has width hd.
inline constexpr std::size_t kFnnHidden[] = {64, 64, 64};

/// Exact number of scalar trainable parameters for a configuration.
std::size_t param_count(const ModelConfig& config);

}  // namespace tron
