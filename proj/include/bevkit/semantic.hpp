#pragma once

#include <string>
#include <vector>

namespace bevkit {

/// Per-frame semantic relevance, either as a raw score vector or as a
/// frame-by-keyword matrix to be aggregated.
struct SemanticScores {
  std::vector<double> raw;  // one score per frame, in [0, 1]
  std::vector<std::string> keywords;
  std::vector<std::vector<double>> per_keyword;  // [frame][keyword]
};

/// Diagonal quality weights q_i = (1 - alpha) + alpha * calibrated_i; always
/// within [1 - alpha, 1].
struct QualityWeights {
  std::vector<double> q;
  double alpha = 0.5;
  double temperature = 1.0;
};

/// Softmax over all frames at the given temperature, then min-max rescale to
/// [0, 1]. A constant softmax output (max - min < 1e-12) maps every frame to
/// 0.5; any constant would leave selection unchanged, 0.5 keeps the weights
/// strictly interior and the rule visible in logs.
std::vector<double> calibrate_scores(const std::vector<double>& raw, double temperature);

QualityWeights quality_weights(const std::vector<double>& calibrated, double alpha);

/// Raw per-frame score as the max over keyword columns, clamped to [0, 1]. A
/// frame counts as relevant if it strongly depicts any queried object.
std::vector<double> aggregate_keyword_scores(
    const std::vector<std::vector<double>>& per_keyword);

}  // namespace bevkit
