#pragma once

#include <string_view>
#include <vector>

#include "perflab/distmaps.hpp"

namespace perflab {

enum class W1Method { quantile_1d, assignment, gaussian_closed_form };
std::string_view to_string(W1Method method);

struct W1Estimate {
  double value = 0.0;
  W1Method method = W1Method::quantile_1d;
  std::size_t n = 0;
};

/// Largest batch accepted by the exact assignment route.
inline constexpr std::size_t kMaxAssignmentSize = 4096;

/// Exact W1 between two empirical measures (uniform weights on the rows).
/// One-dimensional data uses the sorted-quantile coupling and accepts unequal
/// sizes; higher dimensions solve the optimal assignment under the Euclidean
/// ground cost and require equal sizes up to kMaxAssignmentSize.
W1Estimate w1(const SampleBatch& a, const SampleBatch& b);
W1Estimate w1(const Matrix& a, const Matrix& b);

/// W1 between D(theta1) and D(theta2) for a Gaussian location map. The
/// covariance does not depend on theta, so the two laws are translates and
/// the distance is ||shift (theta1 - theta2)||.
W1Estimate w1_gaussian(const DistMapSpec& map, const Theta& theta1, const Theta& theta2);

/// Minimum-cost perfect matching on a square cost matrix (shortest augmenting
/// paths with potentials, O(n^3)). Returns the column assigned to each row.
std::vector<std::size_t> solve_assignment(const Matrix& cost);

}  // namespace perflab
