#include "vlmd/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace vlmd {

namespace {

constexpr double kAtomEnergyFloor = 1e-30;

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

CoefficientMatrix lasso_solve(const Matrix& X, const Matrix& Z, double lambda,
                              const CoefficientMatrix* warm_start, double tol,
                              int max_sweeps, LassoReport* report) {
  const Eigen::Index t = X.rows();
  const Eigen::Index c_count = X.cols();
  const Eigen::Index l_count = Z.cols();
  if (Z.rows() != t)
    throw DimensionError("lasso_solve: X and Z row counts differ");
  if (lambda < 0.0) throw ConfigError("lasso_solve: lambda must be >= 0");
  if (!(tol > 0.0)) throw ConfigError("lasso_solve: tol must be positive");
  if (max_sweeps < 1) throw ConfigError("lasso_solve: max_sweeps must be >= 1");
  if (warm_start &&
      (warm_start->rows() != l_count || warm_start->cols() != c_count))
    throw DimensionError("lasso_solve: warm start has the wrong shape");

  CoefficientMatrix A = warm_start ? *warm_start
                                   : CoefficientMatrix::Zero(l_count, c_count);

  const Matrix G = Z.transpose() * Z;    // L x L gram
  const Matrix ZtX = Z.transpose() * X;  // L x C

  std::vector<bool> degenerate(static_cast<size_t>(l_count), false);
  for (Eigen::Index l = 0; l < l_count; ++l)
    degenerate[static_cast<size_t>(l)] = G(l, l) < kAtomEnergyFloor;

  int worst_sweeps = 0;
  double worst_kkt = 0.0;
  bool any_hit_max = false;

  for (Eigen::Index c = 0; c < c_count; ++c) {
    // g = Z^T (x_c - Z a) maintained across coordinate moves.
    Vector a = A.col(c);
    Vector g = ZtX.col(c) - G * a;

    int sweep = 0;
    double kkt = 0.0;
    for (; sweep < max_sweeps; ++sweep) {
      for (Eigen::Index l = 0; l < l_count; ++l) {
        if (degenerate[static_cast<size_t>(l)]) continue;
        const double rho_l = g[l] + G(l, l) * a[l];
        const double a_new = soft_threshold(rho_l, 0.5 * lambda) / G(l, l);
        const double delta = a_new - a[l];
        if (delta != 0.0) {
          g -= G.col(l) * delta;
          a[l] = a_new;
        }
      }
      kkt = 0.0;
      for (Eigen::Index l = 0; l < l_count; ++l) {
        if (degenerate[static_cast<size_t>(l)]) continue;
        const double grad2 = 2.0 * g[l];
        const double viol = (a[l] == 0.0)
                                ? std::max(0.0, std::abs(grad2) - lambda)
                                : std::abs(grad2 - lambda * (a[l] > 0 ? 1.0 : -1.0));
        kkt = std::max(kkt, viol);
      }
      if (kkt <= tol) {
        ++sweep;
        break;
      }
    }
    A.col(c) = a;
    worst_sweeps = std::max(worst_sweeps, sweep);
    worst_kkt = std::max(worst_kkt, kkt);
    if (kkt > tol) any_hit_max = true;
  }

  if (report) {
    report->sweeps = worst_sweeps;
    report->kkt_residual = worst_kkt;
    report->hit_max_sweeps = any_hit_max;
    report->degenerate_atoms.clear();
    for (Eigen::Index l = 0; l < l_count; ++l)
      if (degenerate[static_cast<size_t>(l)])
        report->degenerate_atoms.push_back(static_cast<int>(l));
  }
  return A;
}

double lasso_objective(const Matrix& X, const Matrix& Z,
                       const CoefficientMatrix& A, double lambda) {
  return (X - Z * A).squaredNorm() + lambda * A.cwiseAbs().sum();
}

CoefficientMatrix rescale_columns(const CoefficientMatrix& A) {
  CoefficientMatrix out = A;
  if (out.rows() == 0) return out;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double peak = out.col(c).cwiseAbs().maxCoeff();
    if (peak > 1.0) out.col(c) /= peak;
  }
  return out;
}

}  // namespace vlmd
