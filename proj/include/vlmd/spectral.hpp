#pragma once

#include "vlmd/types.hpp"

//
// Analytic-spectrum transforms shared by both solvers.
//
// Conventions, used consistently everywhere:
//  * For an even-length signal of N samples the one-sided spectrum holds
//    N/2+1 bins: c[0] = X[0], c[b] = 2*X[b] for 0 < b < N/2, c[N/2] = X[N/2],
//    where X is the unnormalized DFT. The implied analytic signal is
//    a[t] = (1/N) * sum_b c[b] e^{+2pi i b t / N}; Re(a) reproduces the input.
//  * Frequencies are normalized cycles/sample, bin b at b/N in [0, 0.5].
//  * Odd-length inputs are zero-padded by one sample before the transform and
//    cropped on inversion, so round-trips stay exact; mirror extension always
//    yields an even length, which is the path the solvers take.
//  * Plancherel under this scaling:
//    sum_t x[t]^2 = (1/N) * (|c[0]|^2 + |c[N/2]|^2 + 0.5 * sum_interior |c[b]|^2).
//

namespace vlmd {

// Forward transform of one channel. Throws DimensionError when x has fewer
// than 2 samples, InvalidInputError on non-finite values.
HalfSpectrum analytic_spectrum(const Vector& x);

// Inverse transform; n_time is the original signal length (the transform
// length is n_time rounded up to even). Throws DimensionError when the
// spectrum length is inconsistent with n_time.
Vector real_signal(const HalfSpectrum& s, int n_time);

// Column-wise variants used by the solvers; every column shares one grid.
ComplexMatrix analytic_spectrum_columns(const Matrix& x, FrequencyGrid* grid);
Matrix real_signal_columns(const ComplexMatrix& s, const FrequencyGrid& grid,
                           int n_time);

// Half-reflection boundary extension, T -> 2T: the first floor(T/2) samples
// reversed are prepended, the last ceil(T/2) reversed are appended.
// [1,2,3,4] -> [2,1,1,2,3,4,4,3].
Vector mirror_extend(const Vector& x);
Matrix mirror_extend_columns(const Matrix& x);

// Inverse of mirror_extend: recovers the central T samples of a 2T vector.
Vector mirror_crop(const Vector& y, int n_time);
Matrix mirror_crop_columns(const Matrix& y, int n_time);

// Signal energy sum_t x[t]^2 computed from the spectrum (see Plancherel
// note above).
double spectral_energy(const HalfSpectrum& s);

}  // namespace vlmd
