#pragma once

#include <utility>
#include <vector>

#include "vlmd/types.hpp"

//
// Recovery scoring. Estimated and true intrinsic modes are matched by the
// Hungarian algorithm on correlation distance; frequency error reuses the
// same assignment so both metrics describe one pairing.
//

namespace vlmd {

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (estimate index, truth index)
  std::vector<int> unmatched_estimates;
  double total_cost = 0.0;  // sum of matched costs
};

// Minimum-cost assignment for a rectangular cost matrix (rows = estimates,
// cols = ground truth); matches min(rows, cols) pairs.
Assignment hungarian_match(const Matrix& cost);

// Pearson correlation; returns 0 when either series has zero variance.
double pearson(const Vector& x, const Vector& y);

// Cost(i,j) = 1 - |mean over channels of pearson(est[i] ch, true[j] ch)|.
// Modes are T x C. Requires T >= 3.
Matrix mode_correlation_cost(const std::vector<Matrix>& estimated,
                             const std::vector<Matrix>& truth);

// Mean matched cost under the optimal assignment (optionally returned).
double im_correlation_error(const std::vector<Matrix>& estimated,
                            const std::vector<Matrix>& truth,
                            Assignment* assignment = nullptr);

// 100 * mean over matched pairs of |f_est - f_true| / f_true. True
// frequencies must be positive.
double freq_mape(const std::vector<double>& estimated_hz,
                 const std::vector<double>& true_hz,
                 const Assignment& assignment);

}  // namespace vlmd
