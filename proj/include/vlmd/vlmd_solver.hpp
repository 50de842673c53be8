#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vlmd/types.hpp"

//
// Variational latent mode decomposition.
//
// The signal model is X = Z A with Z = sum_k Theta^(k): C observed channels
// are sparse mixtures of L latent components, each latent a sum of K
// narrowband latent modes sharing per-k central frequencies. The solver
// alternates, per outer iteration:
//   (i)   sparse coding of A (LASSO + column rescale),
//   (ii)  a Gauss-Seidel sweep of closed-form spectral updates of z_l,
//   (iii) a Gauss-Seidel sweep of Wiener-filter updates of theta_l^(k),
//         with the central frequency omega_k refreshed after each mode's
//         sweep across latents,
//   (iv)  dual ascent on the constraint z_l = sum_k theta_l^(k).
// Iteration stops when the squared frequency drift sum_k (omega_k - prev_k)^2
// falls to tol. All spectral work happens on the one-sided analytic spectrum
// of the (by default) mirror-extended signal; frequencies are normalized
// cycles/sample internally and reported in Hz on the result.
//

namespace vlmd {

enum class FreqInit {
  kZeros,    // all central frequencies start at 0
  kUniform,  // 0.5 * j / (K + 1), j = 1..K
  kExplicit  // user-provided list, normalized cycles/sample
};

struct VlmdConfig {
  int n_latents = 1;
  int n_modes = 1;
  double alpha = 1000.0;  // bandwidth penalty
  double rho = 0.6;       // ADMM penalty
  double lambda = 0.04;   // sparsity penalty (unscaled objective)
  double tau = 0.9;       // dual step
  double tol = 1e-7;
  int max_iter = 500;
  FreqInit init = FreqInit::kZeros;
  std::vector<double> init_freqs;  // used when init == kExplicit
  bool mirror = true;
  bool freeze_A = false;  // test hook: skip sparse coding, keep initial A
  std::optional<CoefficientMatrix> initial_A;  // default delta_ij

  // Sparse-coding subproblem controls.
  double lasso_tol = 1e-8;
  int lasso_max_sweeps = 200;

  void validate() const;  // throws ConfigError
};

// Solver state on the extended domain. Spectra are column-per-latent.
struct VlmdState {
  ComplexMatrix Z_hat;                  // n_bins x L
  CoefficientMatrix A;                  // L x C
  std::vector<ComplexMatrix> Theta_hat; // K entries, n_bins x L
  std::vector<double> omega;            // K, normalized cycles/sample
  ComplexMatrix Gamma_hat;              // n_bins x L
  FrequencyGrid grid;
  int iteration = 0;
};

struct DecompositionResult {
  Matrix latent_components;             // T x L, the z iterate
  CoefficientMatrix coefficients;       // L x C
  std::vector<Matrix> latent_modes;     // K entries, T x L
  std::vector<double> central_freqs_hz; // K
  std::vector<Matrix> intrinsic_modes;  // K entries, T x C: Theta^(k) * A
  Matrix freq_trace;  // (n_iterations + 1) x K, Hz; row 0 is the init
  int n_iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;  // ||Z_hat - sum_k Theta_hat|| / ||Z_hat||
  std::vector<int> degenerate_modes;
  std::vector<std::string> warnings;
};

// --- Closed-form update steps, exposed for direct testing. ---

// z_l update, Gauss-Seidel: residual_hat is the n_bins x C channel residual
// spectrum with z_l's contribution removed, a_l the l-th row of A.
// Returns [ (2/rho) * residual_hat * a_l + theta_sum_l - gamma_l ]
//       / [ 1 + (2/rho) * |a_l|^2 ].
ComplexVector update_latent_component(const ComplexMatrix& residual_hat,
                                      const Vector& a_l,
                                      const ComplexVector& theta_sum_l,
                                      const ComplexVector& gamma_l, double rho);

// theta_l^(k) update: Wiener filter about omega_k applied to
// z_l - sum_{q != k} theta_l^(q) + gamma_l.
ComplexVector update_latent_mode(const ComplexVector& z_l,
                                 const ComplexVector& theta_excl_sum,
                                 const ComplexVector& gamma_l, double omega_k,
                                 double alpha, double rho,
                                 const FrequencyGrid& grid);

// Power-weighted centroid of mode k across latents. When the total energy is
// below 1e-30 the previous omega is kept and *degenerate is set.
double update_central_frequency(const ComplexMatrix& theta_k,
                                const FrequencyGrid& grid,
                                double previous_omega,
                                bool* degenerate = nullptr);

// gamma_l += tau * (z_l - sum_k theta_l^(k)) for every latent.
void update_duals(ComplexMatrix& gamma, const ComplexMatrix& z_hat,
                  const std::vector<ComplexMatrix>& theta_hat, double tau);

// --- Solver driver. ---

// Extended-domain views of the input consumed by initialize/iterate.
struct SolverInput {
  Matrix x_time;       // T' x C (mirror-extended when enabled)
  ComplexMatrix x_hat; // n_bins x C
  FrequencyGrid grid;
};
SolverInput prepare_solver_input(const TimeSeriesMatrix& input, bool mirror);

// Algorithm init: A = delta_ij (or config.initial_A), z_l = spectrum of
// channel l, Theta = 0, Gamma = 0, omega per config.init.
VlmdState initialize_state(const SolverInput& in, const VlmdConfig& config);

// One outer iteration in place; returns the frequency-drift statistic
// sum_k (omega_k - previous omega_k)^2. Collects warnings/degenerate-mode
// indices when the out-params are non-null.
double vlmd_iterate(VlmdState& state, const SolverInput& in,
                    const VlmdConfig& config,
                    std::vector<int>* degenerate_modes = nullptr,
                    std::vector<std::string>* warnings = nullptr);

// Full run. Requires L <= C and T >= 2K.
DecompositionResult vlmd_decompose(const TimeSeriesMatrix& input,
                                   const VlmdConfig& config);

}  // namespace vlmd
