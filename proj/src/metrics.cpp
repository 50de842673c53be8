#include "vlmd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vlmd {

Assignment hungarian_match(const Matrix& cost) {
  const int m = static_cast<int>(cost.rows());
  const int n_real = static_cast<int>(cost.cols());
  if (m < 1 || n_real < 1) throw DimensionError("hungarian_match: empty cost");
  if (!cost.allFinite())
    throw InvalidInputError("hungarian_match: non-finite cost");

  // Potentials formulation on a square matrix padded with zero-cost dummy
  // columns; dummies cost the same for every row, so they never distort
  // which real pairs win.
  const int n = std::max(m, n_real);
  const double kInf = std::numeric_limits<double>::infinity();
  auto cost_at = [&](int i, int j) -> double {
    if (i < m && j < n_real) return cost(i, j);
    return 0.0;
  };

  std::vector<double> u(static_cast<size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> match(static_cast<size_t>(n) + 1, 0);  // col -> row, 1-based
  std::vector<int> way(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n) + 1, kInf);
    std::vector<bool> used(static_cast<size_t>(n) + 1, false);
    do {
      used[static_cast<size_t>(j0)] = true;
      const int i0 = match[static_cast<size_t>(j0)];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost_at(i0 - 1, j - 1) -
                           u[static_cast<size_t>(i0)] -
                           v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(match[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      match[static_cast<size_t>(j0)] = match[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  std::vector<int> row_to_col(static_cast<size_t>(m), -1);
  for (int j = 1; j <= n; ++j) {
    const int i = match[static_cast<size_t>(j)];
    if (i >= 1 && i <= m && j <= n_real) row_to_col[static_cast<size_t>(i - 1)] = j - 1;
  }
  for (int i = 0; i < m; ++i) {
    const int j = row_to_col[static_cast<size_t>(i)];
    if (j >= 0) {
      out.pairs.emplace_back(i, j);
      out.total_cost += cost(i, j);
    } else {
      out.unmatched_estimates.push_back(i);
    }
  }
  return out;
}

double pearson(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw DimensionError("pearson: length mismatch");
  const Eigen::Index n = x.size();
  if (n < 2) throw DimensionError("pearson: need at least 2 samples");
  const Vector xc = x.array() - x.mean();
  const Vector yc = y.array() - y.mean();
  const double sx = xc.squaredNorm();
  const double sy = yc.squaredNorm();
  if (sx <= 0.0 || sy <= 0.0) return 0.0;
  return xc.dot(yc) / std::sqrt(sx * sy);
}

Matrix mode_correlation_cost(const std::vector<Matrix>& estimated,
                             const std::vector<Matrix>& truth) {
  if (estimated.empty() || truth.empty())
    throw DimensionError("mode_correlation_cost: no modes");
  const Eigen::Index t = truth.front().rows();
  const Eigen::Index c = truth.front().cols();
  if (t < 3) throw InvalidInputError("mode_correlation_cost: need T >= 3");
  for (const auto& u : estimated)
    if (u.rows() != t || u.cols() != c)
      throw DimensionError("mode_correlation_cost: shape mismatch");
  for (const auto& u : truth)
    if (u.rows() != t || u.cols() != c)
      throw DimensionError("mode_correlation_cost: shape mismatch");

  Matrix cost(static_cast<Eigen::Index>(estimated.size()),
              static_cast<Eigen::Index>(truth.size()));
  for (size_t i = 0; i < estimated.size(); ++i) {
    for (size_t j = 0; j < truth.size(); ++j) {
      double mean_corr = 0.0;
      for (Eigen::Index ch = 0; ch < c; ++ch)
        mean_corr += pearson(estimated[i].col(ch), truth[j].col(ch));
      mean_corr /= static_cast<double>(c);
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          1.0 - std::abs(mean_corr);
    }
  }
  return cost;
}

double im_correlation_error(const std::vector<Matrix>& estimated,
                            const std::vector<Matrix>& truth,
                            Assignment* assignment) {
  const Matrix cost = mode_correlation_cost(estimated, truth);
  Assignment a = hungarian_match(cost);
  const double error =
      a.pairs.empty() ? 0.0 : a.total_cost / static_cast<double>(a.pairs.size());
  if (assignment) *assignment = std::move(a);
  return error;
}

double freq_mape(const std::vector<double>& estimated_hz,
                 const std::vector<double>& true_hz,
                 const Assignment& assignment) {
  if (assignment.pairs.empty())
    throw DimensionError("freq_mape: empty assignment");
  double sum = 0.0;
  for (const auto& [i, j] : assignment.pairs) {
    if (i < 0 || i >= static_cast<int>(estimated_hz.size()) || j < 0 ||
        j >= static_cast<int>(true_hz.size()))
      throw DimensionError("freq_mape: assignment index out of range");
    const double ft = true_hz[static_cast<size_t>(j)];
    if (!(ft > 0.0))
      throw InvalidInputError("freq_mape: true frequencies must be positive");
    sum += std::abs(estimated_hz[static_cast<size_t>(i)] - ft) / ft;
  }
  return 100.0 * sum / static_cast<double>(assignment.pairs.size());
}

}  // namespace vlmd
