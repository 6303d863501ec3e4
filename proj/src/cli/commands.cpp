// SPDX-License-Identifier: Apache-2.0
#include "tron/cli/commands.hpp"

#include <json.hpp>

#include "tron/data/dataset.hpp"
#include "tron/data/gap_fill.hpp"
#include "tron/errors.hpp"
#include "tron/eval/bench.hpp"
#include "tron/eval/metrics.hpp"
#include "tron/io/binary.hpp"
#include "tron/log.hpp"
#include "tron/model/checkpoint.hpp"
#include "tron/oracle/synthetic.hpp"
#include "tron/train/trainer.hpp"

namespace tron::cli {

namespace fs = std::filesystem;

namespace {

fs::path out_dir(const RunConfig& c) { return fs::path(c.paths.out); }

const std::string& require_path(const std::string& value, const std::string& key) {
  if (value.empty()) throw ConfigError(key + " is required for this command");
  if (!fs::exists(value)) throw ConfigError(key + ": path '" + value + "' does not exist");
  return value;
}

struct Prepared {
  Scaler scaler;
  QueryGrid grid;
  SequencedDataset train, val, test;
};

Prepared load_prepared(const RunConfig& c, bool need_all) {
  const fs::path dir = require_path(c.paths.data, "paths.data");
  Prepared p;
  p.scaler = read_scaler(dir / "scaler.bin");
  p.grid = normalized_grid(read_grid_csv(dir / "grid.csv"), p.scaler);
  if (need_all || c.eval.partition == "train") p.train = read_dataset(dir / "train.seqd");
  if (need_all || c.eval.partition == "val") p.val = read_dataset(dir / "val.seqd");
  if (need_all || c.eval.partition == "test") p.test = read_dataset(dir / "test.seqd");
  return p;
}

SensorSeries fill_if_needed(const SensorSeries& s, const RunConfig& c) {
  if (!s.has_missing()) return s;
  log_info("gap filling missing sensor values");
  return gap_fill(s, c.data.max_gap, c.data.poly_order);
}

}  // namespace

CommandResult cmd_generate(const RunConfig& c) {
  const auto& sc = c.scenario;
  const auto m = gen_modulation(sc);
  const auto sensors = gen_sensor_counts(m, sc);
  const auto field = gen_dose_field(m, sc);
  const auto dir = out_dir(c);
  write_sensors_csv(dir / "sensors.csv", sensors);
  write_field_bin(dir / "field.bin", field);
  write_grid_csv(dir / "grid.csv", field.grid.degrees);
  io::write_text(dir / "scenario.json", sc.to_json());
  log_info("generated " + std::to_string(sc.n_days) + " days, " + std::to_string(sc.n_sensors) + " sensors, " +
           std::to_string(field.points()) + " grid points");
  return {"generate", {"sensors.csv", "field.bin", "grid.csv", "scenario.json"}};
}

CommandResult cmd_prepare(const RunConfig& c) {
  auto sensors = fill_if_needed(read_sensors_csv(require_path(c.paths.sensors, "paths.sensors")), c);
  auto field = read_field_bin(require_path(c.paths.field, "paths.field"));
  if (field.days() != sensors.days()) {
    throw DataError("field has " + std::to_string(field.days()) + " days, sensors have " +
                    std::to_string(sensors.days()));
  }
  field.dates = sensors.dates;
  if (!c.paths.grid.empty()) {
    const Tensor grid = read_grid_csv(require_path(c.paths.grid, "paths.grid"));
    if (!(grid == field.grid.degrees)) throw DataError("paths.grid does not match the grid stored in paths.field");
  }
  const auto data = prepare_data(sensors, field, c.data.seq_len, c.data.test_days);
  const auto dir = out_dir(c);
  write_dataset(dir / "train.seqd", data.train);
  write_dataset(dir / "val.seqd", data.val);
  write_dataset(dir / "test.seqd", data.test);
  write_scaler(dir / "scaler.bin", data.scaler);
  write_grid_csv(dir / "grid.csv", data.grid.degrees);
  log_info("split days " + std::to_string(data.days.train) + "/" + std::to_string(data.days.val) + "/" +
           std::to_string(data.days.test) + ", windows " + std::to_string(data.train.size()) + "/" +
           std::to_string(data.val.size()) + "/" + std::to_string(data.test.size()) + " at T=" +
           std::to_string(c.data.seq_len));
  return {"prepare", {"train.seqd", "val.seqd", "test.seqd", "scaler.bin", "grid.csv"}};
}

CommandResult cmd_train(const RunConfig& c) {
  const auto p = load_prepared(c, true);
  TrainConfig tc;
  tc.model = ModelConfig{c.model.variant, p.train.seq_len(), p.train.sensors(), c.model.hidden, c.model.layers,
                         c.model.hd};
  tc.lr = c.train.lr;
  tc.batch_size = c.train.batch_size;
  tc.patience = c.train.patience;
  tc.max_epochs = c.train.max_epochs;
  tc.seed = c.train.seed;
  log_info(to_string(tc.model.variant) + ": " + std::to_string(param_count(tc.model)) + " trainable parameters");
  const auto result = train(p.train, p.val, p.grid, p.scaler, tc, [](const EpochRecord& e) {
    log_info("epoch " + std::to_string(e.epoch) + " train " + format_double(e.train_loss) + " val " +
             format_double(e.val_loss));
  });
  const auto dir = out_dir(c);
  result.checkpoint.save(dir / "checkpoint.tron");
  io::write_text(dir / "history.csv", result.history.to_csv());
  log_info("best epoch " + std::to_string(result.history.best_epoch) + ", val loss " +
           format_double(result.history.best_val_loss));
  return {"train", {"checkpoint.tron", "history.csv"}};
}

CommandResult cmd_evaluate(const RunConfig& c) {
  const auto ckpt = Checkpoint::load(require_path(c.paths.checkpoint, "paths.checkpoint"));
  const auto p = load_prepared(c, false);
  const SequencedDataset& ds = c.eval.partition == "train" ? p.train : c.eval.partition == "val" ? p.val : p.test;
  const TronModel model = ckpt.model();
  if (!(ckpt.scaler == p.scaler)) log_warning("checkpoint scaler differs from the prepared data scaler");
  const auto e = evaluate(model_predictor(model, p.grid), ds, ckpt.scaler, c.eval.units);
  const auto dir = out_dir(c);
  io::write_text(dir / "metrics.json", e.report.to_json());
  io::write_text(dir / "histogram.csv", error_histogram(e.report.rel_l2, c.eval.bins).to_csv());
  CommandResult r{"evaluate", {"metrics.json", "histogram.csv"}};
  for (const auto& path : export_percentile_fields(e, p.grid.degrees, dir / "fields")) {
    r.artifacts.push_back(fs::relative(path, dir).generic_string());
  }
  log_info("mean relative L2 " + format_double(e.report.mean_rel_l2) + " (" + to_string(c.eval.units) + ")");
  return r;
}

CommandResult cmd_infer(const RunConfig& c) {
  const auto ckpt = Checkpoint::load(require_path(c.paths.checkpoint, "paths.checkpoint"));
  const auto window = fill_if_needed(read_sensors_csv(require_path(c.paths.window, "paths.window")), c);
  const Tensor degrees = read_grid_csv(require_path(c.paths.queries, "paths.queries"));
  const auto& mc = ckpt.config;
  if (window.days() != mc.seq_len || window.sensors() != mc.n_sensors) {
    throw DimensionError("sensor window is " + std::to_string(window.days()) + "x" + std::to_string(window.sensors()) +
                         ", checkpoint expects " + std::to_string(mc.seq_len) + "x" + std::to_string(mc.n_sensors));
  }
  const Tensor scaled = ckpt.scaler.sensors.transform(window.counts);
  const TronModel model = ckpt.model();
  const Tensor pred = model.predict(scaled.reshaped({1, mc.seq_len, mc.n_sensors}), normalized_grid(degrees, ckpt.scaler));
  const Tensor physical = ckpt.scaler.field.inverse_transform(pred);
  write_field_csv(out_dir(c) / "field.csv", degrees, physical.data());
  return {"infer", {"field.csv"}};
}

CommandResult cmd_bench(const RunConfig& c) {
  std::vector<TronModel> models;
  if (!c.paths.checkpoints.empty()) {
    for (const auto& path : c.paths.checkpoints) models.push_back(Checkpoint::load(require_path(path, "paths.checkpoints")).model());
  } else {
    for (const auto& name : c.bench.variants) {
      TronModel m(ModelConfig{variant_from_string(name), c.data.seq_len, c.bench.n_sensors, c.model.hidden,
                              c.model.layers, c.model.hd});
      m.initialize(c.train.seed);
      models.push_back(std::move(m));
    }
  }
  const QueryGrid grid = make_grid(c.bench.lat_step, c.bench.lon_step);
  std::vector<const TronModel*> ptrs;
  for (const auto& m : models) ptrs.push_back(&m);
  const auto report = bench_inference(ptrs, grid, BenchOptions{c.bench.warmup, c.bench.reps, c.train.seed});
  for (const auto& r : report.rows) {
    log_info(r.variant + ": " + format_double(r.mean_ms) + " ms ± " + format_double(r.sd_ms) + " over " +
             std::to_string(r.reps) + " reps, P=" + std::to_string(r.points));
  }
  io::write_text(out_dir(c) / "latency.csv", report.to_csv());
  return {"bench", {"latency.csv"}};
}

void write_manifest(const RunConfig& c, const CommandResult& result) {
  nlohmann::json j;
  j["command"] = result.command;
  j["config_hash"] = c.hash();
  j["config"] = c.canonical_text();
  j["seed"] = result.command == "generate" ? c.scenario.seed : c.train.seed;
  nlohmann::json artifacts = nlohmann::json::object();
  for (const auto& a : result.artifacts) artifacts[a] = io::file_checksum(out_dir(c) / a);
  j["artifacts"] = artifacts;
  io::write_text(out_dir(c) / ("manifest_" + result.command + ".json"), j.dump(2) + "\n");
}

CommandResult run_command(const std::string& name, const RunConfig& config) {
  CommandResult r;
  if (name == "generate") r = cmd_generate(config);
  else if (name == "prepare") r = cmd_prepare(config);
  else if (name == "train") r = cmd_train(config);
  else if (name == "evaluate") r = cmd_evaluate(config);
  else if (name == "infer") r = cmd_infer(config);
  else if (name == "bench") r = cmd_bench(config);
  else throw ConfigError("unknown command '" + name + "'");
  write_manifest(config, r);
  return r;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const DivergenceError*>(&e)) return 4;
  return 1;
}

}  // namespace tron::cli
