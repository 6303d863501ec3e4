// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <numeric>

#include "test_util.hpp"
#include "tron/data/dataset.hpp"
#include "tron/errors.hpp"
#include "tron/log.hpp"
#include "tron/model/checkpoint.hpp"
#include "tron/model/tron_model.hpp"

using namespace tron;
using namespace tron::testing;

namespace {

const Variant kAll[] = {Variant::s_gru, Variant::s_lstm, Variant::m_gru, Variant::m_lstm, Variant::fnn};

ModelConfig default_config(Variant v) { return ModelConfig{v, 30, 12, 128, 4, 128}; }

ModelConfig toy_config(Variant v) { return ModelConfig{v, 3, 2, 4, 2, 4}; }

Parameter& find(TronModel& m, const std::string& name) {
  for (auto* p : m.parameters()) {
    if (p->name == name) return *p;
  }
  throw std::runtime_error("no parameter " + name);
}

void zero_all(TronModel& m) {
  for (auto* p : m.parameters()) p->value.fill(0.0);
}

QueryGrid random_grid(std::size_t p, std::uint64_t seed) {
  return QueryGrid{random_tensor({p, 2}, seed, 0.0, 1.0), {}};
}

}  // namespace

TEST(ParamCount, ArchitectureTable) {
  EXPECT_EQ(param_count(default_config(Variant::s_gru)), 401921u);
  EXPECT_EQ(param_count(default_config(Variant::s_lstm)), 519169u);
  EXPECT_EQ(param_count(default_config(Variant::m_gru)), 4404993u);
  EXPECT_EQ(param_count(default_config(Variant::m_lstm)), 5795073u);
}

TEST(ParamCount, EqualsFlattenedLength) {
  for (auto v : kAll) {
    for (const auto& cfg : {default_config(v), toy_config(v), ModelConfig{v, 7, 5, 6, 3, 9}}) {
      TronModel m(cfg);
      EXPECT_EQ(m.flat_parameters().size(), param_count(cfg)) << to_string(v);
      EXPECT_EQ(m.parameter_count(), param_count(cfg));
    }
  }
}

TEST(ParamCount, TrunkClosedForm) {
  TronModel m(default_config(Variant::s_gru));
  std::size_t trunk = 0;
  for (const auto* p : m.parameters()) {
    if (p->name.rfind("trunk.", 0) == 0) trunk += p->size();
  }
  EXPECT_EQ(trunk, 2u * 128 + 128 + 128 * 128 + 128 + 128 * 128 + 128);
  EXPECT_EQ(trunk, 33408u);
}

TEST(ParamCount, PerSensorRecurrentStack) {
  const std::size_t g = 3, h = 128;
  std::size_t stack = RecurrentLayer::parameter_count(CellKind::gru, 1, h);
  for (int l = 0; l < 3; ++l) stack += RecurrentLayer::parameter_count(CellKind::gru, h, h);
  EXPECT_EQ(stack, g * h * (1 + h) + 2 * g * h + 3 * (g * h * 2 * h + 2 * g * h));
  EXPECT_EQ(stack, 347520u);
}

TEST(ParamCount, FnnBranchClosedForm) {
  TronModel m(ModelConfig{Variant::fnn, 7, 12, 128, 4, 128});
  std::size_t branch = 0;
  for (const auto* p : m.parameters()) {
    if (p->name.rfind("branch.", 0) == 0) branch += p->size();
  }
  EXPECT_EQ(branch, (84u * 64 + 64) + (64u * 64 + 64) + (64u * 64 + 64) + (64u * 128 + 128));
  EXPECT_EQ(branch, 22080u);
}

TEST(ParamCount, BranchSplitForSingleVariants) {
  TronModel m(default_config(Variant::s_gru));
  std::size_t branch = 0;
  for (const auto* p : m.parameters()) {
    if (p->name.rfind("branch", 0) == 0) branch += p->size();
  }
  EXPECT_EQ(branch, 368512u);
}

TEST(Model, NamesAreUnique) {
  for (auto v : kAll) {
    TronModel m(toy_config(v));
    std::set<std::string> names;
    for (const auto* p : m.parameters()) EXPECT_TRUE(names.insert(p->name).second) << p->name;
  }
}

TEST(BranchSingle, ZeroWeightsGiveHeadBias) {
  TronModel m(toy_config(Variant::s_gru));
  zero_all(m);
  find(m, "branch.norm.gamma").value.fill(1.0);
  auto& bias = find(m, "branch.head.bias");
  bias.value = random_tensor({4}, 3);
  const Tensor b = m.branch_latent(random_tensor({3, 3, 2}, 4));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(b.at(i, k), bias.value[k]);
  }
}

TEST(BranchSingle, LatentWidthIndependentOfSequenceLength) {
  for (std::size_t t : {7u, 30u, 60u, 90u}) {
    TronModel m(ModelConfig{Variant::s_lstm, t, 12, 16, 2, 128});
    m.initialize(1);
    EXPECT_EQ(m.branch_latent(random_tensor({2, t, 12}, t)).shape(), (std::vector<std::size_t>{2, 128}));
  }
}

TEST(Branch, BatchPermutationEquivariant) {
  for (auto v : kAll) {
    TronModel m(toy_config(v));
    m.initialize(5);
    const Tensor seq = random_tensor({3, 3, 2}, 6);
    Tensor rev({3, 3, 2});
    for (std::size_t b = 0; b < 3; ++b) {
      for (std::size_t k = 0; k < 6; ++k) rev[(2 - b) * 6 + k] = seq[b * 6 + k];
    }
    const Tensor a = m.branch_latent(seq), r = m.branch_latent(rev);
    for (std::size_t b = 0; b < 3; ++b) {
      for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(a.at(b, k), r.at(2 - b, k)) << to_string(v);
    }
  }
}

TEST(BranchMulti, ZeroSensorLatentGivesFusionBias) {
  TronModel m(ModelConfig{Variant::m_lstm, 3, 3, 4, 2, 5});
  m.initialize(2);
  find(m, "branch.sensor1.head.weight").value.fill(0.0);
  find(m, "branch.sensor1.head.bias").value.fill(0.0);
  auto& fusion = find(m, "branch.fusion_bias");
  fusion.value = random_tensor({5}, 8);
  const Tensor b = m.branch_latent(random_tensor({2, 3, 3}, 9));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(b.at(i, k), fusion.value[k]);
  }
}

TEST(BranchMulti, LatentWidthIndependentOfSensors) {
  for (std::size_t s : {1u, 2u, 5u}) {
    TronModel m(ModelConfig{Variant::m_gru, 4, s, 4, 1, 6});
    m.initialize(1);
    EXPECT_EQ(m.branch_latent(random_tensor({2, 4, s}, s)).shape(), (std::vector<std::size_t>{2, 6}));
  }
}

TEST(BranchFnn, ZeroWeightsGiveFinalBias) {
  TronModel m(toy_config(Variant::fnn));
  zero_all(m);
  auto& bias = find(m, "branch.fnn.3.bias");
  bias.value = random_tensor({4}, 1);
  const Tensor b = m.branch_latent(random_tensor({2, 3, 2}, 2));
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(b.at(1, k), bias.value[k]);
}

TEST(BranchFnn, FlattensTimeMajor) {
  TronModel m(toy_config(Variant::fnn));
  zero_all(m);
  // First hidden unit reads only input column 1 = (t=0, s=1) under time-major order.
  find(m, "branch.fnn.0.weight").value.at(0, 1) = 1.0;
  for (std::size_t l = 1; l < 4; ++l) find(m, "branch.fnn." + std::to_string(l) + ".weight").value.at(0, 0) = 1.0;
  Tensor seq({1, 3, 2});
  seq[1] = 0.75;  // t=0, s=1
  seq[2] = 5.0;   // t=1, s=0
  EXPECT_EQ(m.branch_latent(seq).at(0, 0), 0.75);
}

TEST(BranchFnn, SensorOrderMatters) {
  TronModel m(toy_config(Variant::fnn));
  m.initialize(3);
  const Tensor seq = random_tensor({1, 3, 2}, 4);
  Tensor swapped = seq;
  for (std::size_t t = 0; t < 3; ++t) std::swap(swapped[t * 2], swapped[t * 2 + 1]);
  EXPECT_FALSE(m.branch_latent(seq) == m.branch_latent(swapped));
}

TEST(Branch, VariantMismatchIsConfigError) {
  TronModel m(toy_config(Variant::s_gru));
  Tape tape;
  Var seq = tape.input(Tensor({1, 3, 2}));
  EXPECT_THROW(m.branch_multi(tape, seq), ConfigError);
  EXPECT_THROW(m.branch_fnn(tape, seq), ConfigError);
  TronModel f(toy_config(Variant::fnn));
  EXPECT_THROW(f.branch_single(tape, seq), ConfigError);
}

TEST(Branch, SequenceLengthMismatchIsDimensionError) {
  for (auto v : kAll) {
    TronModel m(toy_config(v));
    m.initialize(0);
    EXPECT_THROW(m.branch_latent(Tensor({1, 4, 2})), DimensionError) << to_string(v);
    EXPECT_THROW(m.branch_latent(Tensor({1, 3, 3})), DimensionError) << to_string(v);
  }
}

TEST(Trunk, ZeroWeightsGiveFinalBias) {
  TronModel m(toy_config(Variant::s_gru));
  zero_all(m);
  auto& bias = find(m, "trunk.2.bias");
  bias.value = random_tensor({4}, 2);
  const Tensor t = m.trunk_latent(random_grid(6, 1));
  for (std::size_t j = 0; j < 6; ++j) {
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(t.at(j, k), bias.value[k]);
  }
}

TEST(Trunk, DuplicatePointDuplicatesRow) {
  TronModel m(toy_config(Variant::s_lstm));
  m.initialize(4);
  QueryGrid g = random_grid(3, 7);
  for (std::size_t k = 0; k < 2; ++k) g.coords.at(2, k) = g.coords.at(0, k);
  const Tensor t = m.trunk_latent(g);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(t.at(0, k), t.at(2, k));
}

TEST(Trunk, OutsideUnitSquareWarnsButEvaluates) {
  TronModel m(toy_config(Variant::s_gru));
  m.initialize(1);
  std::vector<std::string> warnings;
  auto previous = set_log_sink([&](LogLevel level, const std::string& msg) {
    if (level == LogLevel::warning) warnings.push_back(msg);
  });
  QueryGrid g{Tensor::from_rows({{0.5, 0.5}, {1.2, -0.1}}), {}};
  const Tensor t = m.trunk_latent(g);
  set_log_sink(previous);
  EXPECT_TRUE(t.all_finite());
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("1 query point"), std::string::npos);
}

TEST(Forward, ResolutionAgnosticBranch) {
  TronModel m(ModelConfig{Variant::s_gru, 5, 3, 8, 2, 8});
  m.initialize(11);
  const Tensor seq = random_tensor({2, 5, 3}, 12);
  const QueryGrid full = make_grid(1.0, 1.0);
  ASSERT_EQ(full.size(), 65341u);
  const QueryGrid one = full.subset(std::vector<std::size_t>{40000});

  Tape a(false), b(false);
  Var ba = m.branch(a, a.input(seq));
  Var fa = m.forward(a, a.input(seq), a.input(full.coords));
  Var bb = m.branch(b, b.input(seq));
  Var fb = m.forward(b, b.input(seq), b.input(one.coords));
  EXPECT_EQ(a.value(ba), b.value(bb));
  EXPECT_EQ(a.value(fa).shape(), (std::vector<std::size_t>{2, 65341}));
  EXPECT_EQ(b.value(fb).at(1, 0), a.value(fa).at(1, 40000));
}

TEST(Forward, SubsetAndPermutationAreColumnRestrictions) {
  for (auto v : kAll) {
    TronModel m(toy_config(v));
    m.initialize(21);
    const Tensor seq = random_tensor({3, 3, 2}, 22);
    const QueryGrid grid = random_grid(7, 23);
    const Tensor full = m.predict(seq, grid);
    const std::vector<std::size_t> idx{6, 2, 0, 5};
    const Tensor sub = m.predict(seq, grid.subset(idx));
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) EXPECT_EQ(sub.at(i, j), full.at(i, idx[j])) << to_string(v);
    }
  }
}

TEST(Forward, MatchesRecordedGraph) {
  TronModel m(toy_config(Variant::m_gru));
  m.initialize(1);
  const Tensor seq = random_tensor({2, 3, 2}, 2);
  const QueryGrid grid = random_grid(5, 3);
  Tape tape;
  Var out = m.forward(tape, tape.input(seq), tape.input(grid.coords));
  EXPECT_EQ(tape.value(out), m.predict(seq, grid));
}

TEST(Forward, EndToEndGradientsMatchFiniteDifferences) {
  for (auto v : kAll) {
    for (int seed = 0; seed < 20; ++seed) {
      TronModel m(toy_config(v));
      m.initialize(seed);
      // Non-zero fusion and output biases so their gradients are exercised away from the init point.
      for (auto* p : m.parameters()) {
        if (p->name == "output_bias" || p->name == "branch.fusion_bias") randomize(*p, seed + 500, -0.5, 0.5);
      }
      const Tensor seq = random_tensor({2, 3, 2}, seed + 1000, 0.0, 1.0);
      const Tensor coords = random_tensor({5, 2}, seed + 2000, 0.0, 1.0);
      const Tensor target = random_tensor({2, 5}, seed + 3000, 0.0, 1.0);
      auto objective = [&](bool grads) {
        Tape tape(grads);
        Var loss = mse(tape, m.forward(tape, tape.input(seq), tape.input(coords)), target);
        if (grads) tape.backward(loss);
        return tape.value(loss)[0];
      };
      const auto report = grad_check(objective, m.parameters());
      EXPECT_LT(report.max_relative_error, 1e-5) << to_string(v) << " seed " << seed;
    }
  }
}

TEST(Initialize, SeededAndDeterministic) {
  TronModel a(toy_config(Variant::s_lstm)), b(toy_config(Variant::s_lstm)), c(toy_config(Variant::s_lstm));
  a.initialize(9);
  b.initialize(9);
  c.initialize(10);
  EXPECT_EQ(a.flat_parameters(), b.flat_parameters());
  EXPECT_NE(a.flat_parameters(), c.flat_parameters());
  EXPECT_EQ(find(a, "branch.norm.gamma").value, Tensor({4}, 1.0));
  EXPECT_EQ(find(a, "output_bias").value, Tensor({1}, 0.0));
  const double bound = 1.0 / std::sqrt(4.0);
  for (double w : find(a, "trunk.1.weight").value.data()) EXPECT_LE(std::abs(w), bound);
}

TEST(Config, CanonicalTextRoundTrip) {
  const ModelConfig c{Variant::m_gru, 60, 7, 32, 3, 16};
  const std::string text = c.canonical_text();
  EXPECT_EQ(text, "hd=16\nhidden=32\nlayers=3\nn_sensors=7\nseq_len=60\nvariant=M-GRU\n");
  EXPECT_EQ(ModelConfig::from_canonical_text(text), c);
  EXPECT_THROW(ModelConfig::from_canonical_text(text + "extra=1\n"), DataError);
  EXPECT_THROW(variant_from_string("T-GRU"), ConfigError);
}

TEST(Checkpoint, RoundTripReproducesForwardBitwise) {
  for (auto v : kAll) {
    TronModel m(toy_config(v));
    m.initialize(31);
    Scaler scaler;
    scaler.sensors.fit(random_tensor({5, 2}, 1));
    scaler.field.fit(random_tensor({5, 3}, 2));
    scaler.coords.fit(random_tensor({5, 2}, 3));
    const auto dir = temp_dir("ckpt");
    Checkpoint::capture(m, scaler).save(dir / "m.tron");
    const Checkpoint loaded = Checkpoint::load(dir / "m.tron");
    EXPECT_EQ(loaded.config, m.config());
    EXPECT_EQ(loaded.scaler, scaler);
    const TronModel back = loaded.model();
    const Tensor seq = random_tensor({2, 3, 2}, 4);
    const QueryGrid grid = random_grid(6, 5);
    EXPECT_EQ(back.predict(seq, grid), m.predict(seq, grid)) << to_string(v);
  }
}

TEST(Checkpoint, LayoutStartsWithMagicAndVersion) {
  TronModel m(toy_config(Variant::s_gru));
  Scaler scaler;
  scaler.sensors.fit(random_tensor({4, 2}, 1));
  scaler.field.fit(random_tensor({4, 2}, 2));
  scaler.coords.fit(random_tensor({4, 2}, 3));
  const auto bytes = Checkpoint::capture(m, scaler).serialize();
  ASSERT_GT(bytes.size(), 10u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "TRON");
  EXPECT_EQ(bytes[4] | (bytes[5] << 8), kCheckpointVersion);
  const std::uint32_t crc = bytes[bytes.size() - 4] | (bytes[bytes.size() - 3] << 8) |
                            (bytes[bytes.size() - 2] << 16) | (std::uint32_t(bytes[bytes.size() - 1]) << 24);
  EXPECT_EQ(crc, io::crc32({bytes.data(), bytes.size() - 4}));
}

TEST(Checkpoint, RejectsAnySingleFlippedByte) {
  TronModel m(toy_config(Variant::s_gru));
  m.initialize(1);
  Scaler scaler;
  scaler.sensors.fit(random_tensor({4, 2}, 1));
  scaler.field.fit(random_tensor({4, 2}, 2));
  scaler.coords.fit(random_tensor({4, 2}, 3));
  const auto bytes = Checkpoint::capture(m, scaler).serialize();
  for (std::size_t i = 0; i < bytes.size(); i += 7) {
    auto corrupt = bytes;
    corrupt[i] ^= 0x01;
    EXPECT_THROW(Checkpoint::deserialize(corrupt), DataError) << "byte " << i;
  }
  auto truncated = bytes;
  truncated.resize(bytes.size() / 2);
  EXPECT_THROW(Checkpoint::deserialize(truncated), DataError);
}

TEST(Checkpoint, ParameterLengthMustMatchConfig) {
  Checkpoint c;
  c.config = toy_config(Variant::s_gru);
  c.parameters.assign(3, 0.0);
  EXPECT_THROW(c.model(), DataError);
}
