#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace legalner {

using Point = std::vector<double>;

struct KMeansOptions {
  std::size_t k = 5;
  /// 1: L1 distance with coordinate-wise median centroids. 2: squared L2 with means.
  int p = 1;
  std::uint64_t seed = 0;
  std::size_t max_iters = 100;
  /// Stop once the objective improves by no more than tol. 0 means stop on
  /// assignment stability only.
  double tol = 0.0;
};

struct KMeansResult {
  std::vector<std::size_t> assignment;
  std::vector<Point> centroids;
  /// Objective after each iteration (after the centroid update).
  std::vector<double> objective_history;
  std::size_t iterations = 0;
  bool converged = false;

  double objective() const { return objective_history.empty() ? 0.0 : objective_history.back(); }
};

/// sum_i |x_i - c|_p^p
double lp_cost(std::span<const double> a, std::span<const double> b, int p);

/// Lloyd iteration under L_p. Initial centroids by farthest-point selection
/// starting from a seeded random point. Empty clusters take the point
/// farthest from its centroid. Throws ParameterError for k == 0,
/// k > |points|, p not in {1, 2} or ragged dimensions.
KMeansResult kmeans_lp(std::span<const Point> points, const KMeansOptions& options);

/// Median of the values; mean of the two middle values for even counts.
double median(std::vector<double> values);

}  // namespace legalner
