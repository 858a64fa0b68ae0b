#include "legalner/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "legalner/error.hpp"
#include "legalner/rng.hpp"

namespace legalner {

double lp_cost(std::span<const double> a, std::span<const double> b, int p) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    s += p == 1 ? d : d * d;
  }
  return s;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

namespace {

std::vector<Point> farthest_point_init(std::span<const Point> points, std::size_t k, int p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> chosen = {static_cast<std::size_t>(rng.below(points.size()))};
  std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
  std::vector<bool> taken(points.size(), false);
  taken[chosen[0]] = true;
  while (chosen.size() < k) {
    const Point& last = points[chosen.back()];
    std::size_t best = points.size();
    double best_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      nearest[i] = std::min(nearest[i], lp_cost(points[i], last, p));
      if (!taken[i] && nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    taken[best] = true;
    chosen.push_back(best);
  }
  std::vector<Point> centroids;
  for (std::size_t i : chosen) centroids.push_back(points[i]);
  return centroids;
}

}  // namespace

KMeansResult kmeans_lp(std::span<const Point> points, const KMeansOptions& options) {
  const std::size_t n = points.size(), k = options.k;
  const int p = options.p;
  if (k == 0) throw ParameterError("kmeans: K must be positive");
  if (k > n)
    throw ParameterError("kmeans: K = " + std::to_string(k) + " exceeds the number of points (" + std::to_string(n) + ")");
  if (p != 1 && p != 2) throw ParameterError("kmeans: p must be 1 or 2");
  const std::size_t dim = points[0].size();
  for (const Point& x : points)
    if (x.size() != dim) throw ParameterError("kmeans: points have different dimensions");

  KMeansResult result;
  result.centroids = farthest_point_init(points, k, p, options.seed);
  result.assignment.assign(n, k);  // k = unassigned
  std::vector<double> dist(n, 0.0);

  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    // assignment step; ties go to the lower cluster index
    std::vector<std::size_t> assignment(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = lp_cost(points[i], result.centroids[0], p);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = lp_cost(points[i], result.centroids[c], p);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assignment[i] = best;
      dist[i] = best_d;
    }

    // empty clusters take the point farthest from its centroid
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t c : assignment) ++sizes[c];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[assignment[i]] > 1 && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      }
      --sizes[assignment[far]];
      assignment[far] = c;
      sizes[c] = 1;
      dist[far] = 0.0;
      result.centroids[c] = points[far];
    }

    const bool stable = assignment == result.assignment;
    result.assignment = std::move(assignment);

    // update step: coordinate median (p = 1) or mean (p = 2)
    for (std::size_t c = 0; c < k; ++c) {
      Point centroid(dim, 0.0);
      for (std::size_t j = 0; j < dim; ++j) {
        std::vector<double> column;
        for (std::size_t i = 0; i < n; ++i)
          if (result.assignment[i] == c) column.push_back(points[i][j]);
        if (p == 1) {
          centroid[j] = median(std::move(column));
        } else {
          double s = 0.0;
          for (double v : column) s += v;
          centroid[j] = s / static_cast<double>(column.size());
        }
      }
      result.centroids[c] = std::move(centroid);
    }

    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) objective += lp_cost(points[i], result.centroids[result.assignment[i]], p);
    if (!result.objective_history.empty()) {
      const double prev = result.objective_history.back();
      if (objective > prev + 1e-9 * std::max(1.0, prev))
        throw std::logic_error("kmeans: objective increased from " + std::to_string(prev) + " to " +
                               std::to_string(objective));
    }
    const double improvement = result.objective_history.empty() ? std::numeric_limits<double>::infinity()
                                                                : result.objective_history.back() - objective;
    result.objective_history.push_back(objective);
    result.iterations = iter + 1;
    if (stable || (options.tol > 0.0 && improvement <= options.tol)) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace legalner
