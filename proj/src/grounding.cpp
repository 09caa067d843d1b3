#include "bevkit/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bevkit/error.hpp"

namespace bevkit {

namespace {

double wrap_degrees_180(double d) {
  d = std::fmod(d, 360.0);
  if (d > 180.0) d -= 360.0;
  if (d < -180.0) d += 360.0;
  return d;
}

}  // namespace

double bev_similarity(const BevPose& query, const BevPose& frame,
                      const GroundingParams& p, const GridMeta& grid) {
  const double dx = (query.x - frame.x) * grid.cell_size;
  const double dy = (query.y - frame.y) * grid.cell_size;
  const double dr = wrap_degrees_180(query.r - frame.r) * std::numbers::pi / 180.0;
  const double d2 = (dx * dx + dy * dy) / (p.sigma_p * p.sigma_p) + p.beta * p.beta * dr * dr;
  return std::exp(-0.5 * d2);
}

QueryResult retrieve(const BevPose& query, const FramePoseTable& table,
                     const GroundingParams& p, bool keep_scores) {
  const long n = static_cast<long>(table.entries.size());
  if (n == 0) {
    throw InputError("retrieve: empty frame pose table");
  }

  std::vector<double> scores(n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    scores[i] = bev_similarity(query, table.entries[i].pose, p, table.grid);
  }

  // Argmax with ties resolved toward the smaller frame id; scan order makes
  // that deterministic regardless of thread count above.
  long best = 0;
  for (long i = 1; i < n; ++i) {
    const bool better = scores[i] > scores[best] ||
                        (scores[i] == scores[best] &&
                         table.entries[i].frame_id < table.entries[best].frame_id);
    if (better) best = i;
  }

  QueryResult r;
  r.frame_id = table.entries[best].frame_id;
  r.score = scores[best];
  r.hit = r.score >= p.tau_s;
  if (keep_scores) r.all_scores = std::move(scores);
  return r;
}

}  // namespace bevkit
