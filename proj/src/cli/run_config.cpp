// SPDX-License-Identifier: Apache-2.0
#include "tron/cli/run_config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "tron/errors.hpp"
#include "tron/io/binary.hpp"

namespace tron::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double to_f64(const std::string& key, const std::string& v) {
  try {
    return parse_double(v, key);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::vector<double> to_f64_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_f64(key, item));
  return out;
}

std::string join_f64(const std::vector<double>& values) {
  std::vector<std::string> s;
  for (double v : values) s.push_back(format_double(v));
  return join(s);
}

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
};

template <typename M>
Field text_field(M member) {
  return {[member](const RunConfig& c) { return member(const_cast<RunConfig&>(c)); },
          [member](RunConfig& c, const std::string&, const std::string& v) { member(c) = v; }};
}

#define TRON_TEXT(expr) text_field([](RunConfig& c) -> std::string& { return c.expr; })

#define TRON_SIZE(expr)                                                                                     \
  Field {                                                                                                   \
    [](const RunConfig& c) { return std::to_string(c.expr); },                                              \
        [](RunConfig& c, const std::string& k, const std::string& v) {                                      \
          c.expr = static_cast<decltype(c.expr)>(to_u64(k, v));                                             \
        }                                                                                                   \
  }

#define TRON_REAL(expr)                                                                                     \
  Field {                                                                                                   \
    [](const RunConfig& c) { return format_double(c.expr); },                                               \
        [](RunConfig& c, const std::string& k, const std::string& v) { c.expr = to_f64(k, v); }            \
  }

const std::map<std::string, Field>& registry() {
  static const std::map<std::string, Field> fields = {
      {"paths.sensors", TRON_TEXT(paths.sensors)},
      {"paths.field", TRON_TEXT(paths.field)},
      {"paths.grid", TRON_TEXT(paths.grid)},
      {"paths.data", TRON_TEXT(paths.data)},
      {"paths.checkpoint", TRON_TEXT(paths.checkpoint)},
      {"paths.window", TRON_TEXT(paths.window)},
      {"paths.queries", TRON_TEXT(paths.queries)},
      {"paths.out", TRON_TEXT(paths.out)},
      {"paths.checkpoints",
       {[](const RunConfig& c) { return join(c.paths.checkpoints); },
        [](RunConfig& c, const std::string&, const std::string& v) { c.paths.checkpoints = split_list(v); }}},

      {"scenario.n_days", TRON_SIZE(scenario.n_days)},
      {"scenario.n_sensors", TRON_SIZE(scenario.n_sensors)},
      {"scenario.start_date", TRON_TEXT(scenario.start_date)},
      {"scenario.period_days", TRON_REAL(scenario.period_days)},
      {"scenario.amplitude", TRON_REAL(scenario.amplitude)},
      {"scenario.ar_coef", TRON_REAL(scenario.ar_coef)},
      {"scenario.modulation_noise_sd", TRON_REAL(scenario.modulation_noise_sd)},
      {"scenario.sensor_noise_sd", TRON_REAL(scenario.sensor_noise_sd)},
      {"scenario.base_dose", TRON_REAL(scenario.base_dose)},
      {"scenario.shield_exponent", TRON_REAL(scenario.shield_exponent)},
      {"scenario.memory_lag", TRON_SIZE(scenario.memory_lag)},
      {"scenario.seed", TRON_SIZE(scenario.seed)},
      {"scenario.sensor_offsets",
       {[](const RunConfig& c) { return join_f64(c.scenario.sensor_offsets); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.scenario.sensor_offsets = to_f64_list(k, v);
        }}},
      {"scenario.sensor_sensitivities",
       {[](const RunConfig& c) { return join_f64(c.scenario.sensor_sensitivities); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.scenario.sensor_sensitivities = to_f64_list(k, v);
        }}},

      {"data.seq_len", TRON_SIZE(data.seq_len)},
      {"data.test_days", TRON_SIZE(data.test_days)},
      {"data.max_gap", TRON_SIZE(data.max_gap)},
      {"data.poly_order", TRON_SIZE(data.poly_order)},
      {"data.lat_step", TRON_REAL(data.lat_step)},
      {"data.lon_step", TRON_REAL(data.lon_step)},

      {"model.variant",
       {[](const RunConfig& c) { return to_string(c.model.variant); },
        [](RunConfig& c, const std::string&, const std::string& v) { c.model.variant = variant_from_string(v); }}},
      {"model.hidden", TRON_SIZE(model.hidden)},
      {"model.layers", TRON_SIZE(model.layers)},
      {"model.hd", TRON_SIZE(model.hd)},

      {"train.lr", TRON_REAL(train.lr)},
      {"train.batch_size", TRON_SIZE(train.batch_size)},
      {"train.patience", TRON_SIZE(train.patience)},
      {"train.max_epochs", TRON_SIZE(train.max_epochs)},
      {"train.seed", TRON_SIZE(train.seed)},

      {"eval.units",
       {[](const RunConfig& c) { return to_string(c.eval.units); },
        [](RunConfig& c, const std::string&, const std::string& v) { c.eval.units = metric_units_from_string(v); }}},
      {"eval.bins", TRON_SIZE(eval.bins)},
      {"eval.partition", TRON_TEXT(eval.partition)},

      {"bench.variants",
       {[](const RunConfig& c) { return join(c.bench.variants); },
        [](RunConfig& c, const std::string&, const std::string& v) { c.bench.variants = split_list(v); }}},
      {"bench.reps", TRON_SIZE(bench.reps)},
      {"bench.warmup", TRON_SIZE(bench.warmup)},
      {"bench.n_sensors", TRON_SIZE(bench.n_sensors)},
      {"bench.lat_step", TRON_REAL(bench.lat_step)},
      {"bench.lon_step", TRON_REAL(bench.lon_step)},
  };
  return fields;
}

#undef TRON_TEXT
#undef TRON_SIZE
#undef TRON_REAL

}  // namespace

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : registry()) out.push_back(k);
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = registry().find(key);
  if (it == registry().end()) throw ConfigError("unknown config key '" + key + "'");
  try {
    it->second.set(*this, key, value);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what());
  }
  explicit_.insert(key);
}

RunConfig RunConfig::parse(const std::string& text, const std::string& source) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!seen.insert(key).second) throw ConfigError(source + ":" + std::to_string(no) + ": duplicate key '" + key + "'");
    c.set(key, trim(line.substr(eq + 1)));
  }
  c.finalize();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse(text, path.string());
}

void RunConfig::finalize() {
  const auto defaults = SyntheticScenario::with_sensors(scenario.n_sensors);
  if (!explicit_.count("scenario.sensor_offsets")) scenario.sensor_offsets = defaults.sensor_offsets;
  if (!explicit_.count("scenario.sensor_sensitivities")) scenario.sensor_sensitivities = defaults.sensor_sensitivities;
  scenario.lat_step = data.lat_step;
  scenario.lon_step = data.lon_step;
  scenario.validate();
  if (data.seq_len < 1) throw ConfigError("data.seq_len must be >= 1");
  if (eval.partition != "train" && eval.partition != "val" && eval.partition != "test") {
    throw ConfigError("eval.partition must be train, val or test");
  }
  if (eval.bins < 1) throw ConfigError("eval.bins must be >= 1");
  if (bench.reps < 1) throw ConfigError("bench.reps must be >= 1");
  for (const auto& v : bench.variants) variant_from_string(v);
  ModelConfig{model.variant, data.seq_len, scenario.n_sensors, model.hidden, model.layers, model.hd}.validate();
  if (!(train.lr > 0.0)) throw ConfigError("train.lr must be > 0");
  if (train.batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (train.patience < 1) throw ConfigError("train.patience must be >= 1");
  if (train.max_epochs < 1) throw ConfigError("train.max_epochs must be >= 1");
}

std::string RunConfig::canonical_text() const {
  std::string out;
  for (const auto& [key, field] : registry()) out += key + " = " + field.get(*this) + "\n";
  return out;
}

std::string RunConfig::hash() const {
  const auto text = canonical_text();
  return io::hex32(io::crc32({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}));
}

}  // namespace tron::cli
