// SPDX-License-Identifier: Apache-2.0
#include "tron/eval/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tron/errors.hpp"
#include "tron/data/series.hpp"
#include "tron/io/binary.hpp"

namespace tron {

std::string to_string(MetricUnits u) { return u == MetricUnits::physical ? "physical" : "normalized"; }

MetricUnits metric_units_from_string(const std::string& s) {
  if (s == "physical") return MetricUnits::physical;
  if (s == "normalized") return MetricUnits::normalized;
  throw ConfigError("unknown metric units '" + s + "' (expected physical or normalized)");
}

std::string MetricsReport::to_json() const {
  nlohmann::json j;
  j["rmse"] = rmse;
  j["mae"] = mae;
  j["r2"] = r2;
  j["mean_rel_l2"] = mean_rel_l2;
  j["n_samples"] = rel_l2.size();
  j["units"] = to_string(units);
  j["rel_l2"] = rel_l2;
  nlohmann::json pct;
  for (std::size_t k = 0; k < kReportPercentiles.size(); ++k) {
    char key[8];
    std::snprintf(key, sizeof key, "p%02d", static_cast<int>(std::lround(kReportPercentiles[k] * 100)));
    const auto idx = percentile_samples[k];
    pct[key] = {{"sample", idx}, {"rel_l2", idx < rel_l2.size() ? rel_l2[idx] : 0.0}};
  }
  j["percentiles"] = pct;
  return j.dump(2) + "\n";
}

MetricsReport compute_metrics(const Tensor& pred, const Tensor& target) {
  require_rank(target, 2, "metrics target");
  require_shape(pred, target.shape(), "metrics prediction");
  if (target.empty()) throw DataError("metrics on an empty tensor");
  const auto p = pred.matrix().array();
  const auto t = target.matrix().array();
  const double count = static_cast<double>(target.size());

  const Eigen::ArrayXXd diff = p - t;
  const double sse = diff.square().sum();
  const double sst = (t - t.mean()).square().sum();
  if (sst == 0.0) throw DataError("metrics: degenerate variance (constant target), R² undefined");

  MetricsReport r;
  r.rmse = std::sqrt(sse / count);
  r.mae = diff.abs().sum() / count;
  r.r2 = 1.0 - sse / sst;

  const Eigen::VectorXd err_norm = diff.matrix().rowwise().norm();
  const Eigen::VectorXd tgt_norm = target.matrix().rowwise().norm();
  r.rel_l2.resize(target.dim(0));
  for (std::size_t i = 0; i < r.rel_l2.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (tgt_norm(k) == 0.0) throw DataError("metrics: degenerate sample " + std::to_string(i) + " (zero-norm target)");
    r.rel_l2[i] = err_norm(k) / tgt_norm(k);
  }
  r.mean_rel_l2 = std::accumulate(r.rel_l2.begin(), r.rel_l2.end(), 0.0) / static_cast<double>(r.rel_l2.size());
  for (std::size_t k = 0; k < kReportPercentiles.size(); ++k) {
    r.percentile_samples[k] = percentile_sample(r.rel_l2, kReportPercentiles[k]);
  }
  return r;
}

std::size_t nearest_rank(std::size_t n, double p) {
  if (n == 0) throw DataError("percentile of an empty set");
  const double rank = std::ceil(p * static_cast<double>(n));
  if (rank <= 1.0) return 0;
  return std::min(n - 1, static_cast<std::size_t>(rank) - 1);
}

std::size_t percentile_sample(std::span<const double> values, double p) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return order[nearest_rank(values.size(), p)];
}

double Histogram::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) s += density[i] * (bin_hi[i] - bin_lo[i]);
  return s;
}

std::string Histogram::to_csv() const {
  std::ostringstream os;
  os << "bin_lo,bin_hi,density\n";
  for (std::size_t i = 0; i < density.size(); ++i) {
    os << format_double(bin_lo[i]) << ',' << format_double(bin_hi[i]) << ',' << format_double(density[i]) << '\n';
  }
  return os.str();
}

Histogram error_histogram(std::span<const double> values, std::size_t bins) {
  if (values.empty()) throw DataError("histogram of an empty set");
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn, hi = *mx;
  if (hi == lo) {
    const double half = 0.5 * (lo != 0.0 ? std::abs(lo) : 1.0);
    lo -= half;
    hi += half;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    counts[std::min(b, bins - 1)]++;
  }
  Histogram h;
  const double n = static_cast<double>(values.size());
  for (std::size_t b = 0; b < bins; ++b) {
    h.bin_lo.push_back(lo + static_cast<double>(b) * width);
    h.bin_hi.push_back(b + 1 == bins ? hi : lo + static_cast<double>(b + 1) * width);
    h.density.push_back(static_cast<double>(counts[b]) / (n * width));
  }
  return h;
}

Predictor model_predictor(const TronModel& model, const QueryGrid& grid) {
  auto trunk = std::make_shared<Tensor>(model.trunk_latent(grid));
  return [&model, trunk](const Tensor& inputs) { return model.fuse_latents(model.branch_latent(inputs), *trunk); };
}

Evaluation evaluate(const Predictor& predict, const SequencedDataset& data, const Scaler& scaler, MetricUnits units,
                    std::size_t chunk) {
  if (data.size() == 0) throw DataError("evaluate on an empty dataset");
  chunk = std::max<std::size_t>(chunk, 1);
  Tensor pred({data.size(), data.points()});
  for (std::size_t begin = 0; begin < data.size(); begin += chunk) {
    const std::size_t end = std::min(data.size(), begin + chunk);
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    const Tensor out = predict(data.batch(idx).first);
    require_shape(out, {idx.size(), data.points()}, "predictor output");
    std::copy(out.storage().begin(), out.storage().end(),
              pred.storage().begin() + static_cast<std::ptrdiff_t>(begin * data.points()));
  }
  Evaluation e;
  if (units == MetricUnits::physical) {
    e.pred = scaler.field.inverse_transform(pred);
    e.target = scaler.field.inverse_transform(data.targets);
  } else {
    e.pred = std::move(pred);
    e.target = data.targets;
  }
  e.report = compute_metrics(e.pred, e.target);
  e.report.units = units;
  return e;
}

void write_field_csv(const std::filesystem::path& path, const Tensor& degrees, std::span<const double> values) {
  require_rank(degrees, 2, "field export degrees");
  if (degrees.dim(0) != values.size()) throw DimensionError("field export: grid and value counts differ");
  std::ostringstream os;
  os << "lon,lat,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << format_double(degrees.at(i, 0)) << ',' << format_double(degrees.at(i, 1)) << ',' << format_double(values[i])
       << '\n';
  }
  io::write_text(path, os.str());
}

std::pair<Tensor, std::vector<double>> read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "lon,lat,value") throw DataError(path.string() + ": header must be 'lon,lat,value'");
  std::vector<double> deg, values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (cells.size() != 3) throw DataError(path.string() + ": malformed row '" + line + "'");
    const std::string where = path.string() + " row " + std::to_string(values.size() + 1);
    const double a = parse_double(cells[0], where), b = parse_double(cells[1], where), c = parse_double(cells[2], where);
    deg.push_back(a);
    deg.push_back(b);
    values.push_back(c);
  }
  return {Tensor({values.size(), 2}, std::move(deg)), std::move(values)};
}

std::vector<std::filesystem::path> export_percentile_fields(const Evaluation& eval, const Tensor& degrees,
                                                            const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  const std::size_t p = eval.pred.dim(1);
  for (std::size_t k = 0; k < kReportPercentiles.size(); ++k) {
    const std::size_t sample = eval.report.percentile_samples[k];
    char tag[8];
    std::snprintf(tag, sizeof tag, "p%02d", static_cast<int>(std::lround(kReportPercentiles[k] * 100)));
    std::vector<double> field(p), error(p);
    for (std::size_t j = 0; j < p; ++j) {
      field[j] = eval.pred.at(sample, j);
      error[j] = std::abs(eval.pred.at(sample, j) - eval.target.at(sample, j));
    }
    const auto field_path = out_dir / ("field_" + std::string(tag) + ".csv");
    const auto error_path = out_dir / ("abs_error_" + std::string(tag) + ".csv");
    write_field_csv(field_path, degrees, field);
    write_field_csv(error_path, degrees, error);
    written.push_back(field_path);
    written.push_back(error_path);
  }
  return written;
}

std::vector<std::filesystem::path> export_percentile_fields(const TronModel& model, const SequencedDataset& data,
                                                            const Scaler& scaler, const QueryGrid& grid,
                                                            const std::filesystem::path& out_dir) {
  const auto e = evaluate(model_predictor(model, grid), data, scaler);
  return export_percentile_fields(e, grid.degrees, out_dir);
}

}  // namespace tron
