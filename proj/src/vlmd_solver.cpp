#include "vlmd/vlmd_solver.hpp"

#include <cmath>
#include <set>

#include "vlmd/sparse.hpp"
#include "vlmd/spectral.hpp"

namespace vlmd {

namespace {

constexpr double kModeEnergyFloor = 1e-30;

std::vector<double> initial_frequencies(const VlmdConfig& cfg) {
  const int k_count = cfg.n_modes;
  std::vector<double> omega(static_cast<size_t>(k_count), 0.0);
  switch (cfg.init) {
    case FreqInit::kZeros:
      break;
    case FreqInit::kUniform:
      for (int k = 0; k < k_count; ++k)
        omega[static_cast<size_t>(k)] = 0.5 * (k + 1) / (k_count + 1);
      break;
    case FreqInit::kExplicit:
      if (static_cast<int>(cfg.init_freqs.size()) != k_count)
        throw ConfigError("init_freqs must list exactly n_modes frequencies");
      for (int k = 0; k < k_count; ++k) {
        const double w = cfg.init_freqs[static_cast<size_t>(k)];
        if (!(w >= 0.0 && w <= 0.5))
          throw ConfigError("explicit init frequency outside [0, 0.5]");
        omega[static_cast<size_t>(k)] = w;
      }
      break;
  }
  return omega;
}

// 1 + (4 alpha / rho) * (w - w_k)^2 on the grid.
Vector mode_denominator(const FrequencyGrid& grid, double omega_k,
                        double alpha, double rho) {
  const double c = 4.0 * alpha / rho;
  return (grid.normalized_freqs.array() - omega_k)
             .square()
             .matrix() * c + Vector::Ones(grid.n_bins);
}

}  // namespace

void VlmdConfig::validate() const {
  if (n_latents < 1) throw ConfigError("n_latents must be >= 1");
  if (n_modes < 1) throw ConfigError("n_modes must be >= 1");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(rho > 0.0)) throw ConfigError("rho must be positive");
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (init == FreqInit::kExplicit &&
      static_cast<int>(init_freqs.size()) != n_modes)
    throw ConfigError("init_freqs must list exactly n_modes frequencies");
}

ComplexVector update_latent_component(const ComplexMatrix& residual_hat,
                                      const Vector& a_l,
                                      const ComplexVector& theta_sum_l,
                                      const ComplexVector& gamma_l,
                                      double rho) {
  if (residual_hat.cols() != a_l.size())
    throw DimensionError("update_latent_component: residual/a_l mismatch");
  if (residual_hat.rows() != theta_sum_l.size() ||
      residual_hat.rows() != gamma_l.size())
    throw DimensionError("update_latent_component: bin count mismatch");
  const double two_over_rho = 2.0 / rho;
  const ComplexVector num =
      two_over_rho * (residual_hat * a_l) + theta_sum_l - gamma_l;
  const double den = 1.0 + two_over_rho * a_l.squaredNorm();
  return num / den;
}

ComplexVector update_latent_mode(const ComplexVector& z_l,
                                 const ComplexVector& theta_excl_sum,
                                 const ComplexVector& gamma_l, double omega_k,
                                 double alpha, double rho,
                                 const FrequencyGrid& grid) {
  if (z_l.size() != grid.n_bins || theta_excl_sum.size() != grid.n_bins ||
      gamma_l.size() != grid.n_bins)
    throw DimensionError("update_latent_mode: bin count mismatch");
  const Vector den = mode_denominator(grid, omega_k, alpha, rho);
  return (z_l - theta_excl_sum + gamma_l).cwiseQuotient(den.cast<std::complex<double>>());
}

double update_central_frequency(const ComplexMatrix& theta_k,
                                const FrequencyGrid& grid,
                                double previous_omega, bool* degenerate) {
  if (theta_k.rows() != grid.n_bins)
    throw DimensionError("update_central_frequency: bin count mismatch");
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index l = 0; l < theta_k.cols(); ++l) {
    for (int b = 0; b < grid.n_bins; ++b) {
      const double p = std::norm(theta_k(b, l));
      num += grid.normalized_freqs[b] * p;
      den += p;
    }
  }
  if (den < kModeEnergyFloor) {
    if (degenerate) *degenerate = true;
    return previous_omega;
  }
  if (degenerate) *degenerate = false;
  return num / den;
}

void update_duals(ComplexMatrix& gamma, const ComplexMatrix& z_hat,
                  const std::vector<ComplexMatrix>& theta_hat, double tau) {
  ComplexMatrix residual = z_hat;
  for (const auto& th : theta_hat) residual -= th;
  gamma += tau * residual;
}

SolverInput prepare_solver_input(const TimeSeriesMatrix& input, bool mirror) {
  input.validate();
  SolverInput in;
  in.x_time = mirror ? mirror_extend_columns(input.samples) : input.samples;
  in.x_hat = analytic_spectrum_columns(in.x_time, &in.grid);
  return in;
}

VlmdState initialize_state(const SolverInput& in, const VlmdConfig& config) {
  config.validate();
  const int l_count = config.n_latents;
  const int k_count = config.n_modes;
  const int c_count = static_cast<int>(in.x_hat.cols());
  if (l_count > c_count)
    throw ConfigError("n_latents must not exceed the channel count");

  VlmdState s;
  s.grid = in.grid;
  s.Z_hat = in.x_hat.leftCols(l_count);
  if (config.initial_A) {
    if (config.initial_A->rows() != l_count ||
        config.initial_A->cols() != c_count)
      throw ConfigError("initial_A has the wrong shape");
    s.A = *config.initial_A;
  } else {
    s.A = CoefficientMatrix::Identity(l_count, c_count);
  }
  s.Theta_hat.assign(static_cast<size_t>(k_count),
                     ComplexMatrix::Zero(in.grid.n_bins, l_count));
  s.Gamma_hat = ComplexMatrix::Zero(in.grid.n_bins, l_count);
  s.omega = initial_frequencies(config);
  s.iteration = 0;
  return s;
}

double vlmd_iterate(VlmdState& state, const SolverInput& in,
                    const VlmdConfig& config,
                    std::vector<int>* degenerate_modes,
                    std::vector<std::string>* warnings) {
  const int l_count = config.n_latents;
  const int k_count = config.n_modes;
  const int n_bins = state.grid.n_bins;
  const int n_time = static_cast<int>(in.x_time.rows());

  // (i) Sparse coding on the time-domain reconstruction of z.
  if (!config.freeze_A) {
    const Matrix z_time = real_signal_columns(state.Z_hat, state.grid, n_time);
    LassoReport rep;
    state.A = lasso_solve(in.x_time, z_time, config.lambda, &state.A,
                          config.lasso_tol, config.lasso_max_sweeps, &rep);
    state.A = rescale_columns(state.A);
    if (warnings) {
      if (rep.hit_max_sweeps)
        warnings->push_back("sparse coding stopped at max sweeps (kkt " +
                            std::to_string(rep.kkt_residual) + ")");
      for (int l : rep.degenerate_atoms)
        warnings->push_back("latent " + std::to_string(l) +
                            " has zero energy; coefficients kept");
    }
  }

  // Running sum_k Theta_hat, refreshed incrementally through both sweeps.
  ComplexMatrix theta_sum = ComplexMatrix::Zero(n_bins, l_count);
  for (const auto& th : state.Theta_hat) theta_sum += th;

  // (ii) Latent component sweep. For the Gauss-Seidel residual projection,
  //   sum_c a_lc * (x_hat_c - sum_{n != l} z_hat_n a_nc)
  //     = (X_hat A^T)_l - (Z_hat B)_l + B_ll z_hat_l,  B = A A^T,
  // evaluated against the current (partially updated) Z_hat.
  const Matrix b_gram = state.A * state.A.transpose();
  const ComplexMatrix q = in.x_hat * state.A.transpose();
  const double two_over_rho = 2.0 / config.rho;
  for (int l = 0; l < l_count; ++l) {
    const ComplexVector proj =
        q.col(l) - state.Z_hat * b_gram.col(l) + b_gram(l, l) * state.Z_hat.col(l);
    const ComplexVector num = two_over_rho * proj + theta_sum.col(l) -
                              state.Gamma_hat.col(l);
    const double den = 1.0 + two_over_rho * b_gram(l, l);
    state.Z_hat.col(l) = num / den;
  }

  // (iii) Mode sweep; omega_k refreshed right after mode k's latent sweep.
  double drift = 0.0;
  for (int k = 0; k < k_count; ++k) {
    auto& theta_k = state.Theta_hat[static_cast<size_t>(k)];
    const Vector den =
        mode_denominator(state.grid, state.omega[static_cast<size_t>(k)],
                         config.alpha, config.rho);
    for (int l = 0; l < l_count; ++l) {
      const ComplexVector excl = theta_sum.col(l) - theta_k.col(l);
      const ComplexVector m =
          state.Z_hat.col(l) - excl + state.Gamma_hat.col(l);
      ComplexVector updated = m.cwiseQuotient(den.cast<std::complex<double>>());
      theta_sum.col(l) += updated - theta_k.col(l);
      theta_k.col(l) = std::move(updated);
    }
    bool degenerate = false;
    const double prev = state.omega[static_cast<size_t>(k)];
    state.omega[static_cast<size_t>(k)] =
        update_central_frequency(theta_k, state.grid, prev, &degenerate);
    if (degenerate && degenerate_modes) degenerate_modes->push_back(k);
    const double d = state.omega[static_cast<size_t>(k)] - prev;
    drift += d * d;
  }

  // (iv) Dual ascent on z_l = sum_k theta_l^(k).
  state.Gamma_hat += config.tau * (state.Z_hat - theta_sum);

  ++state.iteration;
  return drift;
}

DecompositionResult vlmd_decompose(const TimeSeriesMatrix& input,
                                   const VlmdConfig& config) {
  config.validate();
  input.validate();
  const int t_count = input.n_samples();
  const int c_count = input.n_channels();
  if (config.n_latents > c_count)
    throw ConfigError("n_latents must not exceed the channel count");
  if (t_count < 2 * config.n_modes)
    throw ConfigError("signal too short for the requested mode count");

  const SolverInput in = prepare_solver_input(input, config.mirror);
  VlmdState state = initialize_state(in, config);
  const int k_count = config.n_modes;
  const int l_count = config.n_latents;
  const int n_time_ext = static_cast<int>(in.x_time.rows());

  std::vector<std::vector<double>> trace;
  trace.push_back(state.omega);

  DecompositionResult result;
  std::set<int> degenerate_set;
  std::vector<int> degenerate_this_iter;
  for (int iter = 0; iter < config.max_iter; ++iter) {
    degenerate_this_iter.clear();
    const double drift = vlmd_iterate(state, in, config, &degenerate_this_iter,
                                      &result.warnings);
    degenerate_set.insert(degenerate_this_iter.begin(),
                          degenerate_this_iter.end());
    trace.push_back(state.omega);
    if (drift <= config.tol) {
      result.converged = true;
      break;
    }
  }
  result.n_iterations = state.iteration;

  // Package on the original domain.
  const auto crop = [&](const ComplexMatrix& spec) {
    Matrix full = real_signal_columns(spec, state.grid, n_time_ext);
    return config.mirror ? mirror_crop_columns(full, t_count) : full;
  };
  result.latent_components = crop(state.Z_hat);
  result.coefficients = state.A;
  result.latent_modes.reserve(static_cast<size_t>(k_count));
  result.intrinsic_modes.reserve(static_cast<size_t>(k_count));
  for (int k = 0; k < k_count; ++k) {
    Matrix theta_t = crop(state.Theta_hat[static_cast<size_t>(k)]);
    result.intrinsic_modes.push_back(theta_t * state.A);
    result.latent_modes.push_back(std::move(theta_t));
  }
  result.central_freqs_hz.resize(static_cast<size_t>(k_count));
  for (int k = 0; k < k_count; ++k)
    result.central_freqs_hz[static_cast<size_t>(k)] =
        state.omega[static_cast<size_t>(k)] * input.sample_rate_hz;
  result.freq_trace.resize(static_cast<Eigen::Index>(trace.size()), k_count);
  for (size_t r = 0; r < trace.size(); ++r)
    for (int k = 0; k < k_count; ++k)
      result.freq_trace(static_cast<Eigen::Index>(r), k) =
          trace[r][static_cast<size_t>(k)] * input.sample_rate_hz;

  ComplexMatrix theta_sum = ComplexMatrix::Zero(state.grid.n_bins, l_count);
  for (const auto& th : state.Theta_hat) theta_sum += th;
  const double z_norm = state.Z_hat.norm();
  result.primal_residual =
      z_norm > 0.0 ? (state.Z_hat - theta_sum).norm() / z_norm : 0.0;
  result.degenerate_modes.assign(degenerate_set.begin(), degenerate_set.end());
  return result;
}

}  // namespace vlmd
