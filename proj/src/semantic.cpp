#include "bevkit/semantic.hpp"

#include <algorithm>
#include <cmath>

#include "bevkit/error.hpp"

namespace bevkit {

std::vector<double> calibrate_scores(const std::vector<double>& raw, double temperature) {
  if (raw.empty()) {
    throw InputError("calibrate_scores: empty score vector");
  }
  if (!(temperature > 0.0)) {
    throw InputError("calibrate_scores: temperature must be > 0");
  }
  const std::size_t n = raw.size();

  // Softmax with max subtraction for stability.
  const double hi = *std::max_element(raw.begin(), raw.end());
  std::vector<double> soft(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    soft[i] = std::exp((raw[i] - hi) / temperature);
    sum += soft[i];
  }
  for (double& v : soft) v /= sum;

  const auto [lo_it, hi_it] = std::minmax_element(soft.begin(), soft.end());
  const double lo = *lo_it, span = *hi_it - *lo_it;
  if (span < 1e-12) {
    return std::vector<double>(n, 0.5);
  }
  for (double& v : soft) v = (v - lo) / span;
  return soft;
}

QualityWeights quality_weights(const std::vector<double>& calibrated, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InputError("quality_weights: alpha must lie in [0, 1]");
  }
  QualityWeights w;
  w.alpha = alpha;
  w.q.resize(calibrated.size());
  for (std::size_t i = 0; i < calibrated.size(); ++i) {
    w.q[i] = (1.0 - alpha) + alpha * calibrated[i];
  }
  return w;
}

std::vector<double> aggregate_keyword_scores(
    const std::vector<std::vector<double>>& per_keyword) {
  if (per_keyword.empty()) {
    throw InputError("aggregate_keyword_scores: empty matrix");
  }
  std::vector<double> raw(per_keyword.size());
  for (std::size_t i = 0; i < per_keyword.size(); ++i) {
    if (per_keyword[i].empty()) {
      throw InputError("aggregate_keyword_scores: empty keyword set");
    }
    const double best = *std::max_element(per_keyword[i].begin(), per_keyword[i].end());
    raw[i] = std::clamp(best, 0.0, 1.0);
  }
  return raw;
}

}  // namespace bevkit
