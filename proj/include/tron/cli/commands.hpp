// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tron/cli/run_config.hpp"

namespace tron::cli {

/// Files a command wrote, relative to the output directory.
struct CommandResult {
  std::string command;
  std::vector<std::string> artifacts;
};

/// sensors.csv, field.bin, grid.csv, scenario.json from the configured scenario.
CommandResult cmd_generate(const RunConfig& config);
/// Gap fill, split, scale and window: train/val/test.seqd, scaler.bin, grid.csv.
CommandResult cmd_prepare(const RunConfig& config);
/// checkpoint.tron and history.csv.
CommandResult cmd_train(const RunConfig& config);
/// metrics.json, histogram.csv and percentile field exports under fields/.
CommandResult cmd_evaluate(const RunConfig& config);
/// field.csv (`lon,lat,value`, physical units) for one sensor window and a set of query points.
CommandResult cmd_infer(const RunConfig& config);
/// latency.csv, one row per variant (or per checkpoint when paths.checkpoints is set).
CommandResult cmd_bench(const RunConfig& config);

/// Writes `manifest_<command>.json`: config hash, canonical config, seed, artifact CRC-32s.
void write_manifest(const RunConfig& config, const CommandResult& result);

/// Dispatches by name and writes the manifest.
CommandResult run_command(const std::string& name, const RunConfig& config);

/// Exit code for an exception: 2 config, 3 data, 4 divergence, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace tron::cli
