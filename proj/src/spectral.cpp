#include "vlmd/spectral.hpp"

#include <fftw3.h>

#include <mutex>
#include <unordered_map>

namespace vlmd {

void TimeSeriesMatrix::validate() const {
  if (samples.rows() < 1 || samples.cols() < 1)
    throw DimensionError("time series is empty");
  if (!samples.allFinite())
    throw InvalidInputError("time series contains non-finite samples");
  if (!(sample_rate_hz > 0.0))
    throw InvalidInputError("sample rate must be positive");
  if (!channel_names.empty() &&
      channel_names.size() != static_cast<size_t>(samples.cols()))
    throw DimensionError("channel name count does not match column count");
}

FrequencyGrid FrequencyGrid::for_length(int n_time) {
  if (n_time < 2 || n_time % 2 != 0)
    throw DimensionError("frequency grid requires an even length >= 2");
  FrequencyGrid g;
  g.n_bins = n_time / 2 + 1;
  g.normalized_freqs.resize(g.n_bins);
  for (int b = 0; b < g.n_bins; ++b)
    g.normalized_freqs[b] = static_cast<double>(b) / n_time;
  return g;
}

namespace {

// FFTW planning is not thread-safe; executing a plan on fresh buffers is.
// Plans are created once per length with FFTW_UNALIGNED so they can run on
// ordinary Eigen/std storage.
std::mutex g_plan_mutex;

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

PlanPair plans_for_length(int n) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  static std::unordered_map<int, PlanPair> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> re(static_cast<size_t>(n));
  std::vector<std::complex<double>> cx(static_cast<size_t>(n / 2 + 1));
  PlanPair p;
  p.r2c = fftw_plan_dft_r2c_1d(n, re.data(),
                               reinterpret_cast<fftw_complex*>(cx.data()),
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.c2r = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(cx.data()),
                               re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(n, p);
  return p;
}

int transform_length_for(int n_time) {
  return (n_time % 2 == 0) ? n_time : n_time + 1;
}

void forward_into(const double* x, int n_time, std::complex<double>* out) {
  const int n = transform_length_for(n_time);
  std::vector<double> buf(static_cast<size_t>(n), 0.0);
  std::copy(x, x + n_time, buf.begin());
  PlanPair p = plans_for_length(n);
  fftw_execute_dft_r2c(p.r2c, buf.data(),
                       reinterpret_cast<fftw_complex*>(out));
  const int n_bins = n / 2 + 1;
  for (int b = 1; b < n_bins - 1; ++b) out[b] *= 2.0;
}

void inverse_into(const std::complex<double>* coeffs, int n_bins,
                  double* out, int n_time) {
  const int n = 2 * (n_bins - 1);
  std::vector<std::complex<double>> buf(coeffs, coeffs + n_bins);
  for (int b = 1; b < n_bins - 1; ++b) buf[static_cast<size_t>(b)] *= 0.5;
  std::vector<double> re(static_cast<size_t>(n));
  PlanPair p = plans_for_length(n);
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(buf.data()),
                       re.data());
  const double scale = 1.0 / n;
  for (int t = 0; t < n_time; ++t) out[t] = re[static_cast<size_t>(t)] * scale;
}

}  // namespace

HalfSpectrum analytic_spectrum(const Vector& x) {
  if (x.size() < 2)
    throw DimensionError("analytic_spectrum: need at least 2 samples");
  if (!x.allFinite())
    throw InvalidInputError("analytic_spectrum: non-finite sample");
  const int n = transform_length_for(static_cast<int>(x.size()));
  HalfSpectrum s;
  s.grid = std::make_shared<FrequencyGrid>(FrequencyGrid::for_length(n));
  s.coeffs.resize(s.grid->n_bins);
  forward_into(x.data(), static_cast<int>(x.size()), s.coeffs.data());
  return s;
}

Vector real_signal(const HalfSpectrum& s, int n_time) {
  if (n_time < 1) throw DimensionError("real_signal: n_time must be positive");
  if (!s.grid || s.coeffs.size() != s.grid->n_bins)
    throw DimensionError("real_signal: spectrum/grid mismatch");
  const int n = s.grid->transform_length();
  if (n != transform_length_for(n_time))
    throw DimensionError("real_signal: spectrum length inconsistent with n_time");
  Vector out(n_time);
  inverse_into(s.coeffs.data(), s.grid->n_bins, out.data(), n_time);
  return out;
}

ComplexMatrix analytic_spectrum_columns(const Matrix& x, FrequencyGrid* grid) {
  if (x.rows() < 2)
    throw DimensionError("analytic_spectrum: need at least 2 samples");
  if (!x.allFinite())
    throw InvalidInputError("analytic_spectrum: non-finite sample");
  const int n = transform_length_for(static_cast<int>(x.rows()));
  FrequencyGrid g = FrequencyGrid::for_length(n);
  ComplexMatrix out(g.n_bins, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    forward_into(x.col(c).data(), static_cast<int>(x.rows()), out.col(c).data());
  if (grid) *grid = std::move(g);
  return out;
}

Matrix real_signal_columns(const ComplexMatrix& s, const FrequencyGrid& grid,
                           int n_time) {
  if (s.rows() != grid.n_bins)
    throw DimensionError("real_signal: spectrum/grid mismatch");
  if (grid.transform_length() != transform_length_for(n_time))
    throw DimensionError("real_signal: spectrum length inconsistent with n_time");
  Matrix out(n_time, s.cols());
  for (Eigen::Index c = 0; c < s.cols(); ++c)
    inverse_into(s.col(c).data(), grid.n_bins, out.col(c).data(), n_time);
  return out;
}

Vector mirror_extend(const Vector& x) {
  const int t = static_cast<int>(x.size());
  if (t < 2) throw DimensionError("mirror_extend: need at least 2 samples");
  const int front = t / 2;
  const int back = t - front;
  Vector y(2 * t);
  for (int i = 0; i < front; ++i) y[i] = x[front - 1 - i];
  y.segment(front, t) = x;
  for (int i = 0; i < back; ++i) y[front + t + i] = x[t - 1 - i];
  return y;
}

Matrix mirror_extend_columns(const Matrix& x) {
  Matrix y(2 * x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    y.col(c) = mirror_extend(x.col(c));
  return y;
}

Vector mirror_crop(const Vector& y, int n_time) {
  if (y.size() != 2 * static_cast<Eigen::Index>(n_time))
    throw DimensionError("mirror_crop: expected a 2*n_time vector");
  return y.segment(n_time / 2, n_time);
}

Matrix mirror_crop_columns(const Matrix& y, int n_time) {
  if (y.rows() != 2 * static_cast<Eigen::Index>(n_time))
    throw DimensionError("mirror_crop: expected 2*n_time rows");
  return y.middleRows(n_time / 2, n_time);
}

double spectral_energy(const HalfSpectrum& s) {
  if (!s.grid || s.coeffs.size() != s.grid->n_bins)
    throw DimensionError("spectral_energy: spectrum/grid mismatch");
  const int n_bins = s.grid->n_bins;
  const int n = s.grid->transform_length();
  double e = std::norm(s.coeffs[0]) + std::norm(s.coeffs[n_bins - 1]);
  for (int b = 1; b < n_bins - 1; ++b) e += 0.5 * std::norm(s.coeffs[b]);
  return e / n;
}

}  // namespace vlmd
