#include "bevkit/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "bevkit/error.hpp"

namespace bevkit {

LEnsemble build_l_ensemble(const ViewKernel& K, const QualityWeights& q, double ridge) {
  const int n = K.n;
  if (static_cast<int>(q.q.size()) != n) {
    throw InputError("l-ensemble: quality weight count does not match kernel size");
  }
  if (ridge < 0.0) {
    throw InputError("l-ensemble: ridge must be >= 0");
  }
  LEnsemble L;
  L.ridge = ridge;
  L.matrix.resize(n, n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      L.matrix(i, j) = q.q[i] * K.matrix(i, j) * q.q[j];
    }
    L.matrix(i, i) += ridge;
  }
  return L;
}

namespace {

void fill_floor_tail(SelectionResult& r, int n, int k, std::vector<char>& selected) {
  r.floor_filled = true;
  const double floor_gain = std::log(kVarianceFloor);
  for (int i = 0; i < n && static_cast<int>(r.indices.size()) < k; ++i) {
    if (!selected[i]) {
      selected[i] = 1;
      r.indices.push_back(i);
      r.gains.push_back(floor_gain);
    }
  }
}

}  // namespace

SelectionResult greedy_map(const LEnsemble& L, int k) {
  const int n = static_cast<int>(L.matrix.rows());
  if (k < 1 || k > n) {
    throw InputError("greedy_map: k must satisfy 1 <= k <= n");
  }
  if (!L.matrix.allFinite()) {
    throw NumericError("greedy_map: non-finite kernel");
  }

  // Incremental Cholesky state: row i of C holds the factor entries of
  // candidate i against the selected set; d2 is its conditional variance.
  Eigen::MatrixXd C(n, k);
  Eigen::VectorXd d2 = L.matrix.diagonal();
  std::vector<char> selected(n, 0);

  SelectionResult r;
  r.indices.reserve(k);
  r.gains.reserve(k);

  for (int t = 0; t < k; ++t) {
    int best = -1;
    double best_var = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!selected[i] && d2[i] > best_var) {
        best_var = d2[i];
        best = i;
      }
    }

    if (best < 0 || best_var < kVarianceFloor) {
      fill_floor_tail(r, n, k, selected);
      break;
    }

    selected[best] = 1;
    r.indices.push_back(best);
    r.gains.push_back(std::log(best_var));

    if (t + 1 == k) break;
    const double denom = std::sqrt(best_var);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      if (selected[i]) continue;
      double dot = 0.0;
      for (int s = 0; s < t; ++s) dot += C(best, s) * C(i, s);
      const double e = (L.matrix(best, i) - dot) / denom;
      C(i, t) = e;
      d2[i] -= e * e;
    }
  }

  r.objective = 0.0;
  for (double g : r.gains) r.objective += g;
  return r;
}

namespace {

double logdet_subset(const Eigen::MatrixXd& L, const std::vector<int>& subset) {
  const int m = static_cast<int>(subset.size());
  Eigen::MatrixXd sub(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) sub(a, b) = L(subset[a], subset[b]);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(sub);
  if (ldlt.info() != Eigen::Success) {
    return -std::numeric_limits<double>::infinity();
  }
  double acc = 0.0;
  for (int a = 0; a < m; ++a) {
    const double d = ldlt.vectorD()[a];
    if (!(d > 0.0)) return -std::numeric_limits<double>::infinity();
    acc += std::log(d);
  }
  return acc;
}

}  // namespace

SelectionResult exact_map(const LEnsemble& L, int k) {
  const int n = static_cast<int>(L.matrix.rows());
  if (n > 20) {
    throw GuardError("exact_map: n > 20 exceeds the enumeration ceiling");
  }
  if (k < 1 || k > n) {
    throw InputError("exact_map: k must satisfy 1 <= k <= n");
  }

  std::vector<int> subset(k);
  for (int i = 0; i < k; ++i) subset[i] = i;

  std::vector<int> best_subset;
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    const double v = logdet_subset(L.matrix, subset);
    if (v > best) {  // strict: lexicographic enumeration keeps the first tie
      best = v;
      best_subset = subset;
    }
    // next combination in lexicographic order
    int pos = k - 1;
    while (pos >= 0 && subset[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++subset[pos];
    for (int j = pos + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }

  SelectionResult r;
  r.indices = best_subset;
  r.objective = best;
  // Report gains as prefix log-det increments of the winning subset.
  r.gains.resize(k);
  double prev = 0.0;
  for (int t = 0; t < k; ++t) {
    const std::vector<int> prefix(best_subset.begin(), best_subset.begin() + t + 1);
    const double cur = logdet_subset(L.matrix, prefix);
    r.gains[t] = cur - prev;
    prev = cur;
  }
  return r;
}

SelectionResult select_keyframes(const std::vector<Pose>& poses,
                                 const SemanticScores& scores,
                                 const SelectionParams& params) {
  std::vector<double> raw = scores.raw;
  if (raw.empty() && !scores.per_keyword.empty()) {
    raw = aggregate_keyword_scores(scores.per_keyword);
  }
  if (raw.size() != poses.size()) {
    throw InputError("select_keyframes: score count does not match pose count");
  }

  const BandedAffinity W = build_banded_affinity(poses, params.geometry, params.bandwidth);
  const Eigen::MatrixXd lap = normalized_laplacian(W);
  const ViewKernel K = heat_kernel(lap, params.tau, params.trunc_eps);
  const std::vector<double> calibrated = calibrate_scores(raw, params.temperature);
  const QualityWeights q = quality_weights(calibrated, params.alpha);
  const LEnsemble L = build_l_ensemble(K, q, params.ridge);
  return greedy_map(L, params.k);
}

}  // namespace bevkit
