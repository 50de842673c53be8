#include "vlmd/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace vlmd {

namespace {

// Variates are derived from raw mt19937_64 draws rather than std
// distributions so outputs are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {  // Box-Muller, one spare cached
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

CoefficientMatrix draw_mixing(Rng& rng, int l_count, int c_count,
                              double sparsity) {
  CoefficientMatrix a(l_count, c_count);
  for (int c = 0; c < c_count; ++c) {
    bool any_nonzero = false;
    while (!any_nonzero) {
      for (int l = 0; l < l_count; ++l) {
        if (rng.uniform() < sparsity) {
          a(l, c) = 0.0;
        } else {
          a(l, c) = rng.uniform(-1.0, 1.0);
          any_nonzero = true;
        }
      }
    }
  }
  return a;
}

}  // namespace

int SynthSpec::n_samples() const {
  return static_cast<int>(std::llround(sample_rate_hz * duration_s));
}

void SynthSpec::validate() const {
  if (n_channels < 1) throw ConfigError("n_channels must be >= 1");
  if (n_latents < 1) throw ConfigError("n_latents must be >= 1");
  if (n_latents > n_channels)
    throw ConfigError("n_latents must not exceed n_channels");
  if (!(sparsity >= 0.0 && sparsity < 1.0))
    throw ConfigError("sparsity must lie in [0, 1)");
  if (n_modes < 1) throw ConfigError("n_modes must be >= 1");
  if (static_cast<int>(freqs_hz.size()) != n_modes)
    throw ConfigError("freqs_hz must list exactly n_modes frequencies");
  if (!(sample_rate_hz > 0.0)) throw ConfigError("sample rate must be positive");
  if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  if (n_samples() < 2) throw ConfigError("duration too short");
  const double nyquist = 0.5 * sample_rate_hz;
  const double deviation = fm ? fm->deviation_max_hz : 0.0;
  if (deviation < 0.0) throw SpecError("FM deviation must be >= 0");
  for (double f : freqs_hz) {
    if (!(f > 0.0)) throw SpecError("mode frequencies must be positive");
    if (f - deviation <= 0.0)
      throw SpecError("FM deviation drives the instantaneous frequency to 0");
    if (f + deviation >= nyquist)
      throw SpecError("FM deviation drives the instantaneous frequency past Nyquist");
  }
  for (size_t i = 0; i < freqs_hz.size(); ++i)
    for (size_t j = i + 1; j < freqs_hz.size(); ++j)
      if (freqs_hz[i] == freqs_hz[j])
        throw ConfigError("mode frequencies must be distinct");
  if (am.depth_max < 0.0 || am.rate_max_hz < 0.0)
    throw SpecError("AM parameters must be >= 0");
}

std::pair<TimeSeriesMatrix, GroundTruth> generate(const SynthSpec& spec,
                                                  std::uint64_t noise_seed) {
  spec.validate();
  const int t_count = spec.n_samples();
  const int c_count = spec.n_channels;
  const int l_count = spec.n_latents;
  const int k_count = spec.n_modes;
  const double fs = spec.sample_rate_hz;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  Rng rng(spec.seed);
  GroundTruth gt;
  gt.coefficients = draw_mixing(rng, l_count, c_count, spec.sparsity);
  gt.freqs_hz = spec.freqs_hz;
  gt.latent_modes.reserve(static_cast<size_t>(k_count));
  gt.intrinsic_modes.reserve(static_cast<size_t>(k_count));
  gt.mode_draws.resize(static_cast<size_t>(k_count));

  for (int k = 0; k < k_count; ++k) {
    auto& draw = gt.mode_draws[static_cast<size_t>(k)];
    draw.phase0 = rng.uniform(0.0, two_pi);
    if (spec.fm) {
      draw.fm_deviation_hz = rng.uniform(0.0, spec.fm->deviation_max_hz);
      draw.fm_rate_hz = rng.uniform(0.0, spec.fm->rate_max_hz);
    }
    const double f_k = spec.freqs_hz[static_cast<size_t>(k)];

    // Common carrier phase across latents; amplitude modulation per latent.
    Vector phase(t_count);
    for (int i = 0; i < t_count; ++i) {
      const double t = i / fs;
      double p = two_pi * f_k * t + draw.phase0;
      if (spec.fm && draw.fm_rate_hz > 0.0)
        p += (draw.fm_deviation_hz / draw.fm_rate_hz) *
             std::sin(two_pi * draw.fm_rate_hz * t);
      phase[i] = p;
    }

    Matrix theta(t_count, l_count);
    for (int l = 0; l < l_count; ++l) {
      const double depth = rng.uniform(0.0, 0.5 * spec.am.depth_max);
      const double rate = rng.uniform(0.0, spec.am.rate_max_hz);
      const double am_phase0 = rng.uniform(0.0, two_pi);
      for (int i = 0; i < t_count; ++i) {
        const double t = i / fs;
        const double amp =
            1.0 + depth * std::sin(two_pi * rate * t + am_phase0);
        theta(i, l) = amp * std::cos(phase[i]);
      }
    }
    gt.intrinsic_modes.push_back(theta * gt.coefficients);
    gt.latent_modes.push_back(std::move(theta));
  }

  gt.clean.samples = Matrix::Zero(t_count, c_count);
  for (const auto& u : gt.intrinsic_modes) gt.clean.samples += u;
  gt.clean.sample_rate_hz = fs;

  TimeSeriesMatrix data;
  data.samples = gt.clean.samples;
  data.sample_rate_hz = fs;
  data.channel_names.reserve(static_cast<size_t>(c_count));
  for (int c = 0; c < c_count; ++c)
    data.channel_names.push_back("ch_" + std::to_string(c + 1));
  gt.clean.channel_names = data.channel_names;

  if (spec.noise_sigma > 0.0) {
    Rng noise_rng(noise_seed);
    for (int c = 0; c < c_count; ++c)
      for (int i = 0; i < t_count; ++i)
        data.samples(i, c) += spec.noise_sigma * noise_rng.gaussian();
  }
  return {std::move(data), std::move(gt)};
}

std::pair<TimeSeriesMatrix, GroundTruth> generate(const SynthSpec& spec) {
  return generate(spec, spec.seed);
}

SynthSpec scenario_spec(char scenario, double noise_sigma, std::uint64_t seed) {
  SynthSpec s;
  s.sample_rate_hz = 1000.0;
  s.duration_s = 2.048;
  s.noise_sigma = noise_sigma;
  s.seed = seed;
  switch (scenario) {
    case 'A':
      s.n_channels = 5;
      s.n_latents = 3;
      s.sparsity = 0.6;
      s.n_modes = 5;
      s.freqs_hz = {5.0, 17.0, 50.0, 73.0, 110.0};
      s.am = {2.0, 2.0};
      break;
    case 'B':
      s.n_channels = 5;
      s.n_latents = 3;
      s.sparsity = 0.6;
      s.n_modes = 5;
      s.freqs_hz = {7.0, 12.0, 61.0, 73.0, 79.0};
      s.am = {2.0, 2.0};
      s.fm = FmParams{1.0, 3.0};
      break;
    case 'C':
      s.n_channels = 100;
      s.n_latents = 35;
      s.sparsity = 0.6;
      s.n_modes = 5;
      s.freqs_hz = {7.0, 12.0, 61.0, 73.0, 79.0};
      s.am = {2.0, 2.0};
      s.fm = FmParams{1.0, 3.0};
      break;
    default:
      throw ConfigError("unknown scenario (expected A, B or C)");
  }
  return s;
}

}  // namespace vlmd
