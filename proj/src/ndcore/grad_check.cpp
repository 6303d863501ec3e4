// SPDX-License-Identifier: Apache-2.0
#include "tron/ndcore/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace tron {

GradCheckReport grad_check(const Objective& objective, const std::vector<Parameter*>& params,
                           double step) {
  for (auto* p : params) p->zero_grad();
  objective(true);

  GradCheckReport report;
  for (auto* p : params) {
    const Tensor analytic = p->grad;
    double diff_sq = 0.0, a_sq = 0.0, n_sq = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double original = p->value[i];
      const double plus = original + step;
      const double minus = original - step;
      p->value[i] = plus;
      const double f_plus = objective(false);
      p->value[i] = minus;
      const double f_minus = objective(false);
      p->value[i] = original;

      const double numeric = (f_plus - f_minus) / (plus - minus);
      const double d = analytic[i] - numeric;
      diff_sq += d * d;
      a_sq += analytic[i] * analytic[i];
      n_sq += numeric * numeric;
      max_abs = std::max(max_abs, std::abs(d));
    }
    const double scale = std::max(std::sqrt(a_sq), std::sqrt(n_sq));
    const double rel = scale > 0.0 ? std::sqrt(diff_sq) / scale : 0.0;
    report.entries.push_back({p->name, rel, max_abs});
    report.max_relative_error = std::max(report.max_relative_error, rel);
  }
  return report;
}

}  // namespace tron
