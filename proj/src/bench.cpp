#include "vlmd/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <thread>

#include "vlmd/metrics.hpp"

namespace vlmd {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct CellSpec {
  char scenario;
  int dataset_id;
  int noise_index;
  int repeat;
  double noise;
  std::string solver;
  int k;
};

struct Scored {
  double corr_error;
  double freq_mape;
  int iters;
  bool converged;
};

Scored score_vlmd(const TimeSeriesMatrix& data, const GroundTruth& gt,
                  const VlmdConfig& cfg) {
  const DecompositionResult r = vlmd_decompose(data, cfg);
  Assignment a;
  const double corr = im_correlation_error(r.intrinsic_modes, gt.intrinsic_modes, &a);
  const double mape = freq_mape(r.central_freqs_hz, gt.freqs_hz, a);
  return {corr, mape, r.n_iterations, r.converged};
}

Scored score_mvmd(const TimeSeriesMatrix& data, const GroundTruth& gt,
                  const MvmdConfig& cfg) {
  const MvmdResult r = mvmd_decompose(data, cfg);
  Assignment a;
  const double corr = im_correlation_error(r.modes, gt.intrinsic_modes, &a);
  const double mape = freq_mape(r.central_freqs_hz, gt.freqs_hz, a);
  return {corr, mape, r.n_iterations, r.converged};
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("VLMD_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

// Tuned parameter sets. Protocol: zeros init, tol 1e-7, max_iter 500 for
// both solvers; dual ascent stays active (tau in {0.5, 0.9}) since both
// formulations are constrained problems. Per (scenario, noise band) the
// regularization weights (alpha, and rho/lambda for the latent solver) plus
// tau were grid-searched against generator ground truth over the scenario's
// ten datasets — scenarios A and C select by mean frequency MAPE, scenario B
// by mean relative error of the close 73/79 Hz pair, ties broken by matched
// mode correlation. C's high-noise bands reuse B's values (same signal
// shape, only the channel count differs).
VlmdConfig tuned_vlmd_config(char scenario, double noise, int k, int n_latents) {
  VlmdConfig cfg;
  cfg.n_latents = n_latents;
  cfg.n_modes = k;
  cfg.init = FreqInit::kZeros;
  cfg.max_iter = 500;
  switch (scenario) {
    case 'A':
      if (noise < 1.0) {
        cfg.alpha = 550.0;  cfg.rho = 0.35; cfg.lambda = 0.5;   cfg.tau = 0.9;
      } else if (noise < 10.0) {
        cfg.alpha = 2000.0; cfg.rho = 1.8;  cfg.lambda = 50.0;  cfg.tau = 0.9;
      } else {
        cfg.alpha = 20000.0; cfg.rho = 0.9; cfg.lambda = 200.0; cfg.tau = 0.9;
      }
      break;
    case 'B':
      if (noise < 1.0) {
        cfg.alpha = 3000.0; cfg.rho = 2.7;  cfg.lambda = 5.0;   cfg.tau = 0.5;
      } else if (noise < 10.0) {
        cfg.alpha = 3000.0; cfg.rho = 1.8;  cfg.lambda = 200.0; cfg.tau = 0.5;
      } else {
        cfg.alpha = 20000.0; cfg.rho = 2.7; cfg.lambda = 50.0;  cfg.tau = 0.9;
      }
      break;
    case 'C':
      if (noise < 1.0) {
        cfg.alpha = 3000.0; cfg.rho = 1.8;  cfg.lambda = 50.0;  cfg.tau = 0.5;
      } else if (noise < 10.0) {
        cfg.alpha = 3000.0; cfg.rho = 1.8;  cfg.lambda = 200.0; cfg.tau = 0.5;
      } else {
        cfg.alpha = 20000.0; cfg.rho = 2.7; cfg.lambda = 50.0;  cfg.tau = 0.9;
      }
      break;
    default:
      throw ConfigError("unknown scenario");
  }
  return cfg;
}

MvmdConfig tuned_mvmd_config(char scenario, double noise, int k) {
  MvmdConfig cfg;
  cfg.n_modes = k;
  cfg.init = FreqInit::kZeros;
  cfg.max_iter = 500;
  switch (scenario) {
    case 'A':
      if (noise < 0.05) {
        cfg.alpha = 2000.0;  cfg.tau = 0.5;
      } else if (noise < 1.0) {
        cfg.alpha = 10000.0; cfg.tau = 0.9;
      } else {
        cfg.alpha = 40000.0; cfg.tau = 0.9;
      }
      break;
    case 'B':
    case 'C':
      if (noise < 1.0) {
        cfg.alpha = 5000.0;  cfg.tau = 0.9;
      } else if (noise < 10.0) {
        cfg.alpha = 20000.0; cfg.tau = 0.9;
      } else {
        cfg.alpha = 5000.0;  cfg.tau = 0.5;
      }
      break;
    default:
      throw ConfigError("unknown scenario");
  }
  return cfg;
}

std::vector<BenchCell> benchmark_run(const BenchConfig& config) {
  if (config.n_datasets < 1 || config.n_noise_seeds < 1)
    throw ConfigError("benchmark needs at least one dataset and one seed");

  std::vector<CellSpec> cells;
  for (char scenario : config.scenarios) {
    const SynthSpec probe = scenario_spec(scenario, 0.0, 0);
    std::vector<int> ks = config.k_values;
    if (ks.empty()) ks = {probe.n_modes};
    for (int d = 0; d < config.n_datasets; ++d)
      for (int ni = 0; ni < static_cast<int>(config.noise_grid.size()); ++ni)
        for (int si = 0; si < config.n_noise_seeds; ++si)
          for (const auto& solver : config.solvers)
            for (int k : ks)
              cells.push_back({scenario, d, ni, si,
                               config.noise_grid[static_cast<size_t>(ni)],
                               solver, k});
    (void)probe;
  }
  // Noise seeds differ per (dataset, noise, repeat) but stay fixed across
  // solvers and K so every solver sees the same realization.
  const auto noise_seed_of = [&](const CellSpec& c) {
    return config.base_seed + 1000003ull * static_cast<std::uint64_t>(c.dataset_id) +
           1009ull * static_cast<std::uint64_t>(c.noise_index) +
           static_cast<std::uint64_t>(c.repeat) + 1ull;
  };

  std::vector<BenchCell> rows(cells.size());
  const auto run_cell = [&](size_t idx) {
    const CellSpec& c = cells[idx];
    BenchCell row;
    row.scenario = std::string(1, c.scenario);
    row.dataset_id = c.dataset_id;
    row.noise = c.noise;
    row.solver = c.solver;
    row.k = c.k;

    SynthSpec spec = scenario_spec(c.scenario, c.noise,
                                   config.base_seed + static_cast<std::uint64_t>(c.dataset_id));
    row.seed = noise_seed_of(c);
    try {
      const auto t0 = std::chrono::steady_clock::now();
      auto [data, gt] = generate(spec, row.seed);
      Scored s{};
      if (c.solver == "vlmd") {
        s = score_vlmd(data, gt,
                       tuned_vlmd_config(c.scenario, c.noise, c.k, spec.n_latents));
      } else if (c.solver == "mvmd") {
        s = score_mvmd(data, gt, tuned_mvmd_config(c.scenario, c.noise, c.k));
      } else {
        throw ConfigError("unknown solver '" + c.solver + "'");
      }
      const auto t1 = std::chrono::steady_clock::now();
      row.corr_error = s.corr_error;
      row.freq_mape = s.freq_mape;
      row.iters = s.iters;
      row.converged = s.converged;
      row.wall_ms =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
    } catch (const std::exception&) {
      row.failed = true;
      row.corr_error = kNan;
      row.freq_mape = kNan;
      row.wall_ms = kNan;
    }
    rows[idx] = std::move(row);
  };

  const int threads = resolve_threads(config.threads);
  if (threads <= 1) {
    for (size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        while (true) {
          const size_t i = next.fetch_add(1);
          if (i >= cells.size()) break;
          run_cell(i);
        }
      });
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::vector<BenchSummary> summarize(const std::vector<BenchCell>& cells) {
  std::map<std::tuple<std::string, double, std::string, int>, BenchSummary> agg;
  for (const auto& c : cells) {
    auto& s = agg[{c.scenario, c.noise, c.solver, c.k}];
    s.scenario = c.scenario;
    s.noise = c.noise;
    s.solver = c.solver;
    s.k = c.k;
    ++s.n_cells;
    if (c.failed) {
      ++s.n_failed;
      continue;
    }
    s.mean_corr_error += c.corr_error;
    s.mean_freq_mape += c.freq_mape;
    s.mean_wall_ms += c.wall_ms;
    s.mean_iters += c.iters;
  }
  std::vector<BenchSummary> out;
  for (auto& [key, s] : agg) {
    const int n = s.n_cells - s.n_failed;
    if (n > 0) {
      s.mean_corr_error /= n;
      s.mean_freq_mape /= n;
      s.mean_wall_ms /= n;
      s.mean_iters /= n;
    } else {
      s.mean_corr_error = s.mean_freq_mape = s.mean_wall_ms = s.mean_iters = kNan;
    }
    out.push_back(std::move(s));
  }
  return out;
}

VlmdConfig tune_vlmd(char scenario, double noise, std::uint64_t seed) {
  const SynthSpec spec = scenario_spec(scenario, noise, seed);
  auto [data, gt] = generate(spec);
  VlmdConfig best = tuned_vlmd_config(scenario, noise, spec.n_modes, spec.n_latents);
  double best_err = std::numeric_limits<double>::infinity();
  for (double alpha : {550.0, 2000.0, 5000.0, 20000.0}) {
    for (double rho : {0.35, 0.9, 1.8, 2.7}) {
      for (double lambda : {0.5, 5.0, 50.0, 200.0}) {
        VlmdConfig cfg = best;
        cfg.alpha = alpha;
        cfg.rho = rho;
        cfg.lambda = lambda;
        try {
          const Scored s = score_vlmd(data, gt, cfg);
          if (s.corr_error < best_err) {
            best_err = s.corr_error;
            best = cfg;
          }
        } catch (const std::exception&) {
          // a diverging grid point is not an error, just not a winner
        }
      }
    }
  }
  return best;
}

MvmdConfig tune_mvmd(char scenario, double noise, std::uint64_t seed) {
  const SynthSpec spec = scenario_spec(scenario, noise, seed);
  auto [data, gt] = generate(spec);
  MvmdConfig best = tuned_mvmd_config(scenario, noise, spec.n_modes);
  double best_err = std::numeric_limits<double>::infinity();
  for (double alpha : {2000.0, 5000.0, 10000.0, 40000.0}) {
    for (double tau : {0.5, 0.9}) {
      MvmdConfig cfg = best;
      cfg.alpha = alpha;
      cfg.tau = tau;
      try {
        const Scored s = score_mvmd(data, gt, cfg);
        if (s.corr_error < best_err) {
          best_err = s.corr_error;
          best = cfg;
        }
      } catch (const std::exception&) {
      }
    }
  }
  return best;
}

}  // namespace vlmd
