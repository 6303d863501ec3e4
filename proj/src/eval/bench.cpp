// SPDX-License-Identifier: Apache-2.0
#include "tron/eval/bench.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <sstream>

#include "tron/data/series.hpp"
#include "tron/errors.hpp"
#include "tron/ndcore/random.hpp"

namespace tron {

std::string LatencyReport::to_csv() const {
  std::ostringstream os;
  os << "variant,seq_len,points,reps,mean_ms,sd_ms\n";
  for (const auto& r : rows) {
    os << r.variant << ',' << r.seq_len << ',' << r.points << ',' << r.reps << ',' << format_double(r.mean_ms) << ','
       << format_double(r.sd_ms)
       << '\n';
  }
  return os.str();
}

LatencyRow bench_model(const TronModel& model, const QueryGrid& grid, const BenchOptions& options) {
  if (options.reps < 1) throw ConfigError("bench.reps must be >= 1");
  if (grid.size() == 0) throw DataError("bench: empty query grid");
  Eigen::setNbThreads(1);
  const auto& cfg = model.config();
  Tensor window({1, cfg.seq_len, cfg.n_sensors});
  Rng rng(options.seed);
  fill_uniform(window, 1.0, rng);
  for (double& v : window.data()) v = 0.5 + 0.5 * v;

  volatile double sink = 0.0;
  for (std::size_t i = 0; i < options.warmup; ++i) sink = sink + model.predict(window, grid)[0];

  std::vector<double> ms(options.reps);
  for (auto& m : ms) {
    const auto t0 = std::chrono::steady_clock::now();
    const Tensor out = model.predict(window, grid);
    const auto t1 = std::chrono::steady_clock::now();
    sink = sink + out[0];
    m = std::chrono::duration<double, std::milli>(t1 - t0).count();
  }

  LatencyRow row{to_string(cfg.variant), cfg.seq_len, grid.size(), options.reps, 0.0, 0.0};
  for (double m : ms) row.mean_ms += m;
  row.mean_ms /= static_cast<double>(ms.size());
  if (ms.size() > 1) {
    double ss = 0.0;
    for (double m : ms) ss += (m - row.mean_ms) * (m - row.mean_ms);
    row.sd_ms = std::sqrt(ss / static_cast<double>(ms.size() - 1));
  }
  return row;
}

LatencyReport bench_inference(const std::vector<const TronModel*>& models, const QueryGrid& grid,
                              const BenchOptions& options) {
  LatencyReport report;
  for (const auto* m : models) report.rows.push_back(bench_model(*m, grid, options));
  return report;
}

}  // namespace tron
