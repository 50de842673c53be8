#pragma once

#include "vlmd/types.hpp"

//
// Sparse coding stage: per-channel LASSO solved by cyclic coordinate descent
// with soft thresholding. The objective is unscaled,
//   min_A ||X - Z A||_F^2 + lambda * ||A||_1,
// which separates over channels (columns of A). The [-1,1] box is not applied
// here; callers clamp via rescale_columns().
//

namespace vlmd {

struct LassoReport {
  int sweeps = 0;             // max over channels
  double kkt_residual = 0.0;  // max subgradient violation at exit
  bool hit_max_sweeps = false;
  // Latent indices whose atom energy <z_l,z_l> is ~zero. Those coordinates
  // carry no information and are left at their warm-start value (0 on a cold
  // start, i.e. the minimum-norm choice).
  std::vector<int> degenerate_atoms;
};

// X is T x C, Z is T x L; returns A (L x C). warm_start of the same shape
// seeds the iteration, otherwise A starts at zero. Convergence is declared
// when the KKT residual (max violation of the subgradient optimality
// conditions) drops to tol.
CoefficientMatrix lasso_solve(const Matrix& X, const Matrix& Z, double lambda,
                              const CoefficientMatrix* warm_start = nullptr,
                              double tol = 1e-8, int max_sweeps = 1000,
                              LassoReport* report = nullptr);

// ||X - Z A||_F^2 + lambda * ||A||_1, exposed for tests and tuning.
double lasso_objective(const Matrix& X, const Matrix& Z,
                       const CoefficientMatrix& A, double lambda);

// Column rescale a_c <- a_c / max(1, max_i |a_ic|). Leaves already-boxed
// columns untouched; idempotent.
CoefficientMatrix rescale_columns(const CoefficientMatrix& A);

}  // namespace vlmd
