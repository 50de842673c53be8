#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "vlmd/errors.hpp"

namespace vlmd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Mixing matrix A, n_latents x n_channels. Entries lie in [-1, 1] once
// rescale_columns() has been applied; lasso_solve() alone does not box them.
using CoefficientMatrix = Matrix;

// Multichannel signal, one column per channel, one row per sample.
struct TimeSeriesMatrix {
  Matrix samples;  // T x C
  double sample_rate_hz = 1.0;
  std::vector<std::string> channel_names;  // empty or exactly C entries

  int n_samples() const { return static_cast<int>(samples.rows()); }
  int n_channels() const { return static_cast<int>(samples.cols()); }

  // Throws InvalidInputError / DimensionError on non-finite samples,
  // non-positive sample rate, or a name list of the wrong length.
  void validate() const;
};

// Half-spectrum frequency grid in normalized cycles/sample: bin b sits at
// b / (2*(n_bins-1)), so the grid spans [0, 0.5] with DC first, Nyquist last.
struct FrequencyGrid {
  int n_bins = 0;
  Vector normalized_freqs;

  // Grid for an n_time-point transform; n_time must be even and >= 2.
  static FrequencyGrid for_length(int n_time);

  int transform_length() const { return 2 * (n_bins - 1); }
  bool operator==(const FrequencyGrid& o) const {
    return n_bins == o.n_bins;
  }
};

// One-sided analytic spectrum: positive-frequency bins carry doubled DFT
// coefficients, DC and Nyquist are undoubled and real-valued.
struct HalfSpectrum {
  ComplexVector coeffs;
  std::shared_ptr<const FrequencyGrid> grid;
};

}  // namespace vlmd
