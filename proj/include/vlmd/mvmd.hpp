#pragma once

#include <vector>

#include "vlmd/types.hpp"
#include "vlmd/vlmd_solver.hpp"  // FreqInit

//
// Multivariate variational mode decomposition baseline: decomposes the C
// channels directly into K joint narrowband modes, no latent layer and no
// sparse mixing. Mode updates are channel-wise Wiener filters about shared
// central frequencies; the dual enforces sum_k u_k,c = x_c. The signal is
// always mirror-extended (the config deliberately has no switch), matching
// the reference treatment and keeping comparisons with the latent solver on
// the same boundary handling.
//

namespace vlmd {

struct MvmdConfig {
  int n_modes = 1;
  double alpha = 2000.0;
  double tau = 0.9;
  double tol = 1e-7;
  int max_iter = 500;
  FreqInit init = FreqInit::kZeros;
  std::vector<double> init_freqs;  // used when init == kExplicit

  void validate() const;  // throws ConfigError
};

struct MvmdResult {
  std::vector<Matrix> modes;            // K entries, T x C
  std::vector<double> central_freqs_hz; // K
  Matrix freq_trace;  // (n_iterations + 1) x K, Hz; row 0 is the init
  int n_iterations = 0;
  bool converged = false;
  std::vector<int> degenerate_modes;
};

MvmdResult mvmd_decompose(const TimeSeriesMatrix& input,
                          const MvmdConfig& config);

}  // namespace vlmd
