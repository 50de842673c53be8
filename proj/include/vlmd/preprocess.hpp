#pragma once

#include "vlmd/types.hpp"

namespace vlmd {

// Subtract the per-channel mean in place.
void demean(TimeSeriesMatrix& x);

// Demean and divide each channel by its standard deviation. Channels with
// (near-)zero variance are left at zero and reported through the return
// value as indices.
std::vector<int> zscore(TimeSeriesMatrix& x);

// Row/column filtering for raw multichannel dumps: drops the first
// drop_head_rows and last drop_tail_rows samples, then removes channels
// whose fraction of exact zeros exceeds max_zero_frac. Throws
// EmptyOutputError when nothing survives.
TimeSeriesMatrix filter_channels(const TimeSeriesMatrix& x, int drop_head_rows,
                                 int drop_tail_rows, double max_zero_frac);

}  // namespace vlmd
