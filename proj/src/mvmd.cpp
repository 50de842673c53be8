#include "vlmd/mvmd.hpp"

#include <cmath>
#include <set>

#include "vlmd/spectral.hpp"

namespace vlmd {

namespace {

constexpr double kModeEnergyFloor = 1e-30;
constexpr double kDriftEps = 1e-12;  // guards the relative mode drift

std::vector<double> initial_frequencies(const MvmdConfig& cfg) {
  std::vector<double> omega(static_cast<size_t>(cfg.n_modes), 0.0);
  if (cfg.init == FreqInit::kUniform) {
    for (int k = 0; k < cfg.n_modes; ++k)
      omega[static_cast<size_t>(k)] = 0.5 * (k + 1) / (cfg.n_modes + 1);
  } else if (cfg.init == FreqInit::kExplicit) {
    for (int k = 0; k < cfg.n_modes; ++k) {
      const double w = cfg.init_freqs[static_cast<size_t>(k)];
      if (!(w >= 0.0 && w <= 0.5))
        throw ConfigError("explicit init frequency outside [0, 0.5]");
      omega[static_cast<size_t>(k)] = w;
    }
  }
  return omega;
}

}  // namespace

void MvmdConfig::validate() const {
  if (n_modes < 1) throw ConfigError("n_modes must be >= 1");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (init == FreqInit::kExplicit &&
      static_cast<int>(init_freqs.size()) != n_modes)
    throw ConfigError("init_freqs must list exactly n_modes frequencies");
}

MvmdResult mvmd_decompose(const TimeSeriesMatrix& input,
                          const MvmdConfig& config) {
  config.validate();
  input.validate();
  const int t_count = input.n_samples();
  const int c_count = input.n_channels();
  if (t_count < 2 * config.n_modes)
    throw ConfigError("signal too short for the requested mode count");
  const int k_count = config.n_modes;

  const Matrix x_ext = mirror_extend_columns(input.samples);
  FrequencyGrid grid;
  const ComplexMatrix x_hat = analytic_spectrum_columns(x_ext, &grid);
  const int n_bins = grid.n_bins;
  const int n_time_ext = static_cast<int>(x_ext.rows());

  std::vector<ComplexMatrix> u_hat(
      static_cast<size_t>(k_count), ComplexMatrix::Zero(n_bins, c_count));
  ComplexMatrix u_sum = ComplexMatrix::Zero(n_bins, c_count);
  ComplexMatrix lambda_hat = ComplexMatrix::Zero(n_bins, c_count);
  std::vector<double> omega = initial_frequencies(config);

  std::vector<std::vector<double>> trace;
  trace.push_back(omega);
  std::set<int> degenerate_set;

  int iterations = 0;
  bool converged = false;
  for (int iter = 0; iter < config.max_iter; ++iter) {
    double mode_drift = 0.0;
    double freq_drift = 0.0;
    for (int k = 0; k < k_count; ++k) {
      auto& u_k = u_hat[static_cast<size_t>(k)];
      const double prev_energy = u_k.squaredNorm();
      const Vector den =
          (grid.normalized_freqs.array() - omega[static_cast<size_t>(k)])
                  .square()
                  .matrix() *
              (2.0 * config.alpha) +
          Vector::Ones(n_bins);
      double change = 0.0;
      double num_w = 0.0;
      double den_w = 0.0;
      for (int c = 0; c < c_count; ++c) {
        u_sum.col(c) -= u_k.col(c);
        const ComplexVector m =
            x_hat.col(c) - u_sum.col(c) + 0.5 * lambda_hat.col(c);
        ComplexVector updated = m.cwiseQuotient(den.cast<std::complex<double>>());
        change += (updated - u_k.col(c)).squaredNorm();
        u_sum.col(c) += updated;
        u_k.col(c) = std::move(updated);
        for (int b = 0; b < n_bins; ++b) {
          const double p = std::norm(u_k(b, c));
          num_w += grid.normalized_freqs[b] * p;
          den_w += p;
        }
      }
      mode_drift += change / (prev_energy + kDriftEps);
      const double prev = omega[static_cast<size_t>(k)];
      if (den_w < kModeEnergyFloor) {
        degenerate_set.insert(k);
      } else {
        omega[static_cast<size_t>(k)] = num_w / den_w;
      }
      const double d = omega[static_cast<size_t>(k)] - prev;
      freq_drift += d * d;
    }
    lambda_hat += config.tau * (x_hat - u_sum);
    ++iterations;
    trace.push_back(omega);
    if (mode_drift + freq_drift <= config.tol) {
      converged = true;
      break;
    }
  }

  MvmdResult result;
  result.n_iterations = iterations;
  result.converged = converged;
  result.modes.reserve(static_cast<size_t>(k_count));
  for (int k = 0; k < k_count; ++k) {
    Matrix full =
        real_signal_columns(u_hat[static_cast<size_t>(k)], grid, n_time_ext);
    result.modes.push_back(mirror_crop_columns(full, t_count));
  }
  result.central_freqs_hz.resize(static_cast<size_t>(k_count));
  for (int k = 0; k < k_count; ++k)
    result.central_freqs_hz[static_cast<size_t>(k)] =
        omega[static_cast<size_t>(k)] * input.sample_rate_hz;
  result.freq_trace.resize(static_cast<Eigen::Index>(trace.size()), k_count);
  for (size_t r = 0; r < trace.size(); ++r)
    for (int k = 0; k < k_count; ++k)
      result.freq_trace(static_cast<Eigen::Index>(r), k) =
          trace[r][static_cast<size_t>(k)] * input.sample_rate_hz;
  result.degenerate_modes.assign(degenerate_set.begin(), degenerate_set.end());
  return result;
}

}  // namespace vlmd
