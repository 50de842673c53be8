#include "vlmd/preprocess.hpp"

#include <cmath>

namespace vlmd {

void demean(TimeSeriesMatrix& x) {
  x.validate();
  for (Eigen::Index c = 0; c < x.samples.cols(); ++c)
    x.samples.col(c).array() -= x.samples.col(c).mean();
}

std::vector<int> zscore(TimeSeriesMatrix& x) {
  demean(x);
  std::vector<int> flat;
  const double n = static_cast<double>(x.samples.rows());
  for (Eigen::Index c = 0; c < x.samples.cols(); ++c) {
    const double sd = std::sqrt(x.samples.col(c).squaredNorm() / n);
    if (sd < 1e-12) {
      x.samples.col(c).setZero();
      flat.push_back(static_cast<int>(c));
    } else {
      x.samples.col(c) /= sd;
    }
  }
  return flat;
}

TimeSeriesMatrix filter_channels(const TimeSeriesMatrix& x, int drop_head_rows,
                                 int drop_tail_rows, double max_zero_frac) {
  x.validate();
  if (drop_head_rows < 0 || drop_tail_rows < 0)
    throw ConfigError("row drops must be >= 0");
  if (!(max_zero_frac >= 0.0 && max_zero_frac <= 1.0))
    throw ConfigError("max_zero_frac must lie in [0, 1]");
  const Eigen::Index t = x.samples.rows();
  const Eigen::Index kept_rows = t - drop_head_rows - drop_tail_rows;
  if (kept_rows < 1) throw EmptyOutputError("all rows dropped");

  Matrix window = x.samples.middleRows(drop_head_rows, kept_rows);
  std::vector<int> keep;
  for (Eigen::Index c = 0; c < window.cols(); ++c) {
    Eigen::Index zeros = 0;
    for (Eigen::Index r = 0; r < kept_rows; ++r)
      if (window(r, c) == 0.0) ++zeros;
    const double frac = static_cast<double>(zeros) / static_cast<double>(kept_rows);
    if (frac <= max_zero_frac) keep.push_back(static_cast<int>(c));
  }
  if (keep.empty()) throw EmptyOutputError("every channel exceeded the zero-fraction limit");

  TimeSeriesMatrix out;
  out.sample_rate_hz = x.sample_rate_hz;
  out.samples.resize(kept_rows, static_cast<Eigen::Index>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) {
    out.samples.col(static_cast<Eigen::Index>(i)) = window.col(keep[i]);
    if (!x.channel_names.empty())
      out.channel_names.push_back(x.channel_names[static_cast<size_t>(keep[i])]);
  }
  return out;
}

}  // namespace vlmd
