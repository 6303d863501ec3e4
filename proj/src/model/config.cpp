// SPDX-License-Identifier: Apache-2.0
#include "tron/model/config.hpp"

#include <sstream>

#include "tron/errors.hpp"

namespace tron {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::s_gru: return "S-GRU";
    case Variant::s_lstm: return "S-LSTM";
    case Variant::m_gru: return "M-GRU";
    case Variant::m_lstm: return "M-LSTM";
    case Variant::fnn: return "FNN";
  }
  return "?";
}

Variant variant_from_string(const std::string& name) {
  for (auto v : {Variant::s_gru, Variant::s_lstm, Variant::m_gru, Variant::m_lstm, Variant::fnn}) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("unknown model variant '" + name + "' (expected S-GRU, S-LSTM, M-GRU, M-LSTM or FNN)");
}

bool is_single_branch(Variant v) { return v == Variant::s_gru || v == Variant::s_lstm; }
bool is_multi_branch(Variant v) { return v == Variant::m_gru || v == Variant::m_lstm; }

CellKind cell_kind(Variant v) {
  return (v == Variant::s_gru || v == Variant::m_gru) ? CellKind::gru : CellKind::lstm;
}

void ModelConfig::validate() const {
  if (seq_len < 1) throw ConfigError("model.seq_len must be >= 1");
  if (n_sensors < 1) throw ConfigError("model.n_sensors must be >= 1");
  if (hd < 1) throw ConfigError("model.hd must be >= 1");
  if (variant != Variant::fnn) {
    if (hidden < 2) throw ConfigError("model.hidden must be >= 2 (layer normalisation)");
    if (layers < 1) throw ConfigError("model.layers must be >= 1");
  }
}

std::string ModelConfig::canonical_text() const {
  std::ostringstream os;
  os << "hd=" << hd << '\n'
     << "hidden=" << hidden << '\n'
     << "layers=" << layers << '\n'
     << "n_sensors=" << n_sensors << '\n'
     << "seq_len=" << seq_len << '\n'
     << "variant=" << to_string(variant) << '\n';
  return os.str();
}

ModelConfig ModelConfig::from_canonical_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("malformed model config line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw DataError("model config missing key '" + key + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto to_size = [](const std::string& key, const std::string& v) -> std::size_t {
    try {
      std::size_t pos = 0;
      const auto n = std::stoull(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return n;
    } catch (const std::exception&) {
      throw DataError("model config key '" + key + "' is not an integer: '" + v + "'");
    }
  };
  ModelConfig c;
  c.hd = to_size("hd", take("hd"));
  c.hidden = to_size("hidden", take("hidden"));
  c.layers = to_size("layers", take("layers"));
  c.n_sensors = to_size("n_sensors", take("n_sensors"));
  c.seq_len = to_size("seq_len", take("seq_len"));
  c.variant = variant_from_string(take("variant"));
  if (!kv.empty()) throw DataError("model config has unknown key '" + kv.begin()->first + "'");
  c.validate();
  return c;
}

namespace {

std::size_t dense_count(std::size_t in, std::size_t out) { return in * out + out; }

std::size_t encoder_count(CellKind kind, std::size_t input, std::size_t hidden, std::size_t layers,
                          std::size_t hd) {
  std::size_t n = RecurrentLayer::parameter_count(kind, input, hidden);
  for (std::size_t l = 1; l < layers; ++l) n += RecurrentLayer::parameter_count(kind, hidden, hidden);
  return n + 2 * hidden + dense_count(hidden, hd);
}

}  // namespace

std::size_t param_count(const ModelConfig& c) {
  c.validate();
  std::size_t branch = 0;
  switch (c.variant) {
    case Variant::s_gru:
    case Variant::s_lstm:
      branch = encoder_count(cell_kind(c.variant), c.n_sensors, c.hidden, c.layers, c.hd);
      break;
    case Variant::m_gru:
    case Variant::m_lstm:
      branch = c.n_sensors * encoder_count(cell_kind(c.variant), 1, c.hidden, c.layers, c.hd) + c.hd;
      break;
    case Variant::fnn: {
      std::size_t in = c.seq_len * c.n_sensors;
      for (auto w : kFnnHidden) {
        branch += dense_count(in, w);
        in = w;
      }
      branch += dense_count(in, c.hd);
      break;
    }
  }
  const std::size_t trunk = dense_count(2, c.hd) + 2 * dense_count(c.hd, c.hd);
  return branch + trunk + 1;
}

}  // namespace tron
