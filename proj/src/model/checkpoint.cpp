// SPDX-License-Identifier: Apache-2.0
#include "tron/model/checkpoint.hpp"

#include "tron/errors.hpp"
#include "tron/io/binary.hpp"

namespace tron {

Checkpoint Checkpoint::capture(const TronModel& model, const Scaler& scaler) {
  return Checkpoint{model.config(), scaler, model.flat_parameters()};
}

TronModel Checkpoint::model() const {
  TronModel m(config);
  if (parameters.size() != m.parameter_count()) {
    throw DataError("checkpoint holds " + std::to_string(parameters.size()) + " parameters, config needs " +
                    std::to_string(m.parameter_count()));
  }
  m.set_flat_parameters(parameters);
  return m;
}

std::vector<std::uint8_t> Checkpoint::serialize() const {
  io::ByteWriter w;
  w.bytes("TRON");
  w.u16(kCheckpointVersion);
  w.string(config.canonical_text());
  scaler.write(w);
  w.u64(parameters.size());
  w.f64s(parameters);
  w.crc();
  return w.buffer();
}

Checkpoint Checkpoint::deserialize(std::span<const std::uint8_t> bytes, const std::string& source) {
  io::ByteReader r(bytes, source);
  r.verify_crc();
  r.expect("TRON");
  const auto version = r.u16();
  if (version != kCheckpointVersion) {
    throw DataError(source + ": unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint c;
  c.config = ModelConfig::from_canonical_text(r.string());
  c.scaler = Scaler::read(r);
  const auto n = r.u64();
  if (n != param_count(c.config)) {
    throw DataError(source + ": parameter count " + std::to_string(n) + " does not match config (" +
                    std::to_string(param_count(c.config)) + ")");
  }
  c.parameters = r.f64s(n);
  r.expect_end();
  return c;
}

void Checkpoint::save(const std::filesystem::path& path) const { io::write_file(path, serialize()); }

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  return deserialize(io::read_file(path), path.string());
}

}  // namespace tron
