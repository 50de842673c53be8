#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "vlmd/types.hpp"

//
// Synthetic benchmark data: K amplitude/frequency-modulated cosines shared
// across L latents (common carrier phase per mode, independent AM per latent
// mode), sparsely mixed into C channels with entries in [-1,1], plus white
// Gaussian noise. Everything is drawn from a seeded generator with pinned
// variate recipes, so a seed fully determines the dataset.
//

namespace vlmd {

struct AmParams {
  double depth_max = 0.0;   // depth d drawn from U(0, depth_max/2)
  double rate_max_hz = 0.0; // rate drawn from U(0, rate_max_hz)
};

struct FmParams {
  double deviation_max_hz = 0.0;  // peak instantaneous-frequency deviation
  double rate_max_hz = 0.0;
};

struct SynthSpec {
  int n_channels = 1;
  int n_latents = 1;
  double sparsity = 0.0;  // probability that a mixing entry is zero
  int n_modes = 1;
  std::vector<double> freqs_hz;
  double sample_rate_hz = 1.0;
  double duration_s = 1.0;
  AmParams am;
  std::optional<FmParams> fm;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  int n_samples() const;
  void validate() const;  // throws SpecError / ConfigError
};

// Per-mode drawn modulation parameters, exposed so tests can verify the
// instantaneous-frequency bounds analytically.
struct ModeDraw {
  double phase0 = 0.0;
  double fm_deviation_hz = 0.0;
  double fm_rate_hz = 0.0;
};

struct GroundTruth {
  CoefficientMatrix coefficients;       // L x C
  std::vector<Matrix> latent_modes;     // K entries, T x L
  std::vector<Matrix> intrinsic_modes;  // K entries, T x C
  std::vector<double> freqs_hz;
  TimeSeriesMatrix clean;               // sum_k intrinsic_modes[k], exactly
  std::vector<ModeDraw> mode_draws;     // K entries
};

// Structural draws (mixing, modulations) stream from spec.seed; the noise
// stream is seeded separately so benchmark repeats can vary noise alone.
std::pair<TimeSeriesMatrix, GroundTruth> generate(const SynthSpec& spec,
                                                  std::uint64_t noise_seed);
std::pair<TimeSeriesMatrix, GroundTruth> generate(const SynthSpec& spec);

// Benchmark scenario presets ('A', 'B', 'C'), 1 kHz for 2.048 s.
SynthSpec scenario_spec(char scenario, double noise_sigma, std::uint64_t seed);

}  // namespace vlmd
