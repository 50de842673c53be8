//
// vlmd: command-line front end for the decomposition library. Subcommands
// cover the full workflow: synthesize benchmark data, decompose a CSV,
// sweep solver benchmarks, cluster decomposition outputs, and filter raw
// channel dumps. Exit codes: 0 success, 2 usage error, 1 runtime failure;
// failures are single "error: <category>: <message>" lines on stderr.
//

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vlmd/bench.hpp"
#include "vlmd/cluster.hpp"
#include "vlmd/csv_io.hpp"
#include "vlmd/mvmd.hpp"
#include "vlmd/preprocess.hpp"
#include "vlmd/synth.hpp"
#include "vlmd/vlmd_solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vlmd;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void write_manifest(const fs::path& out_dir, const std::string& command,
                    json config, const std::optional<fs::path>& input,
                    std::optional<std::uint64_t> seed, double wall_ms,
                    const std::vector<std::string>& outputs) {
  json m;
  m["tool"] = "vlmd";
  m["version"] = kVersion;
  m["command"] = command;
  m["config"] = std::move(config);
  if (input)
    m["input"] = {{"path", input->string()}, {"fnv1a", fnv1a_hex(*input)}};
  else
    m["input"] = nullptr;
  if (seed)
    m["seed"] = *seed;
  else
    m["seed"] = nullptr;
  m["wall_ms"] = wall_ms;
  m["outputs"] = outputs;
  write_text_atomic(out_dir / "manifest.json", m.dump(2) + "\n");
}

std::vector<std::string> label_seq(const std::string& prefix, int n) {
  std::vector<std::string> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& s, const std::string& what) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number for " + what + ", got '" + s + "'");
  }
  if (used != s.size())
    throw ConfigError("trailing characters in " + what + ": '" + s + "'");
  return v;
}

int to_int(const std::string& s, const std::string& what) {
  const double v = to_double(s, what);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError(what + " must be an integer, got '" + s + "'");
  return i;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::vector<double> parse_double_list(const std::string& s,
                                      const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : split(s, ','))
    if (!tok.empty()) out.push_back(to_double(tok, what));
  if (out.empty()) throw ConfigError(what + " list is empty");
  return out;
}

// "lo:hi" inclusive range or a comma list.
std::vector<int> parse_int_set(const std::string& s, const std::string& what) {
  std::vector<int> out;
  const auto colon = s.find(':');
  if (colon != std::string::npos) {
    const int lo = to_int(trim(s.substr(0, colon)), what);
    const int hi = to_int(trim(s.substr(colon + 1)), what);
    if (lo < 1 || hi < lo)
      throw ConfigError("bad range for " + what + ": '" + s + "'");
    for (int k = lo; k <= hi; ++k) out.push_back(k);
  } else {
    for (const auto& tok : split(s, ','))
      if (!tok.empty()) out.push_back(to_int(tok, what));
  }
  if (out.empty()) throw ConfigError(what + " list is empty");
  return out;
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError("expected a boolean for " + what + ", got '" + s + "'");
}

// key=value settings, applied only where the command line left the default;
// keys are the long option names without the leading dashes.
using ConfigKeys =
    std::vector<std::pair<std::string, std::function<void(const std::string&)>>>;

void apply_config_file(const fs::path& file, CLI::App* cmd,
                       const ConfigKeys& keys) {
  std::ifstream in(file);
  if (!in)
    throw InvalidInputError("cannot open config file '" + file.string() + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key=value in config file", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    bool known = false;
    for (const auto& [name, set] : keys) {
      if (name != key) continue;
      known = true;
      if (cmd->count("--" + name) == 0) {
        try {
          set(val);
        } catch (const ConfigError& e) {
          throw ParseError(e.what(), line_no);
        }
      }
      break;
    }
    if (!known)
      throw ParseError("unknown setting '" + key + "' in config file", line_no);
  }
}

void apply_freq_init(const std::string& text, double rate_hz, FreqInit& init,
                     std::vector<double>& init_freqs) {
  if (text == "zeros") {
    init = FreqInit::kZeros;
  } else if (text == "uniform") {
    init = FreqInit::kUniform;
  } else {
    init = FreqInit::kExplicit;
    init_freqs = parse_double_list(text, "--init-freqs");
    for (double& f : init_freqs) f /= rate_hz;  // Hz -> cycles/sample
  }
}

void emit_warnings(const std::vector<std::string>& warnings,
                   const std::vector<int>& degenerate_modes) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  for (int k : degenerate_modes)
    std::cerr << "warning: mode " << (k + 1)
              << " carried no spectral energy; its frequency was held\n";
}

void write_frequencies_csv(const fs::path& path,
                           const std::vector<double>& freqs_hz,
                           double rate_hz) {
  std::vector<std::vector<std::string>> rows;
  for (size_t k = 0; k < freqs_hz.size(); ++k) {
    const double f = freqs_hz[k];
    rows.push_back({std::to_string(k + 1), format_double(f),
                    format_double(f / rate_hz),
                    format_double(f > 0.0
                                      ? 1.0 / f
                                      : std::numeric_limits<double>::infinity())});
  }
  write_csv_rows(path, {"mode", "freq_hz", "freq_normalized", "period"}, rows);
}

void write_trace_csv(const fs::path& path, const Matrix& trace) {
  std::vector<std::string> header = {"iteration"};
  for (const auto& name : label_seq("mode_", static_cast<int>(trace.cols())))
    header.push_back(name);
  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index i = 0; i < trace.rows(); ++i) {
    std::vector<std::string> row = {std::to_string(i)};
    for (Eigen::Index k = 0; k < trace.cols(); ++k)
      row.push_back(format_double(trace(i, k)));
    rows.push_back(std::move(row));
  }
  write_csv_rows(path, header, rows);
}

// --- synth spec persistence (same key=value format in and out) ---

std::string spec_to_text(const SynthSpec& s) {
  std::ostringstream o;
  o << "n_channels=" << s.n_channels << "\n";
  o << "n_latents=" << s.n_latents << "\n";
  o << "sparsity=" << format_double(s.sparsity) << "\n";
  o << "n_modes=" << s.n_modes << "\n";
  o << "freqs_hz=";
  for (size_t i = 0; i < s.freqs_hz.size(); ++i)
    o << (i ? "," : "") << format_double(s.freqs_hz[i]);
  o << "\n";
  o << "sample_rate_hz=" << format_double(s.sample_rate_hz) << "\n";
  o << "duration_s=" << format_double(s.duration_s) << "\n";
  o << "am_depth_max=" << format_double(s.am.depth_max) << "\n";
  o << "am_rate_max_hz=" << format_double(s.am.rate_max_hz) << "\n";
  if (s.fm) {
    o << "fm_deviation_max_hz=" << format_double(s.fm->deviation_max_hz) << "\n";
    o << "fm_rate_max_hz=" << format_double(s.fm->rate_max_hz) << "\n";
  }
  o << "noise_sigma=" << format_double(s.noise_sigma) << "\n";
  o << "seed=" << s.seed << "\n";
  return o.str();
}

SynthSpec parse_spec_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw InvalidInputError("cannot open spec file '" + path.string() + "'");
  SynthSpec s;
  double fm_dev = 0.0, fm_rate = 0.0;
  bool has_fm = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key=value in spec file", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "n_channels") s.n_channels = to_int(val, key);
      else if (key == "n_latents") s.n_latents = to_int(val, key);
      else if (key == "sparsity") s.sparsity = to_double(val, key);
      else if (key == "n_modes") s.n_modes = to_int(val, key);
      else if (key == "freqs_hz") s.freqs_hz = parse_double_list(val, key);
      else if (key == "sample_rate_hz") s.sample_rate_hz = to_double(val, key);
      else if (key == "duration_s") s.duration_s = to_double(val, key);
      else if (key == "am_depth_max") s.am.depth_max = to_double(val, key);
      else if (key == "am_rate_max_hz") s.am.rate_max_hz = to_double(val, key);
      else if (key == "fm_deviation_max_hz") { fm_dev = to_double(val, key); has_fm = true; }
      else if (key == "fm_rate_max_hz") { fm_rate = to_double(val, key); has_fm = true; }
      else if (key == "noise_sigma") s.noise_sigma = to_double(val, key);
      else if (key == "seed") s.seed = static_cast<std::uint64_t>(std::stoull(val));
      else throw ParseError("unknown spec key '" + key + "'", line_no);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (has_fm) s.fm = FmParams{fm_dev, fm_rate};
  return s;
}

// --- subcommand bodies ---

struct DecomposeArgs {
  fs::path input;
  fs::path out;
  fs::path config_file;
  std::string solver = "vlmd";
  int latents = 0;  // 0: one per channel
  int modes = 5;
  double alpha = 0.0;
  bool alpha_set = false;
  double rho = 0.6;
  double lambda = 0.04;
  double tau = 0.9;
  double tol = 1e-7;
  int max_iter = 500;
  std::string init_freqs = "uniform";
  bool mirror = true;
  bool do_demean = false;
  bool do_zscore = false;
  double rate = 1.0;
};

int run_decompose(const DecomposeArgs& a) {
  Timer timer;
  TimeSeriesMatrix data = read_time_series(a.input, a.rate);
  if (a.do_zscore) {
    for (int c : zscore(data))
      std::cerr << "warning: channel " << data.channel_names[static_cast<size_t>(c)]
                << " has zero variance; left at zero\n";
  } else if (a.do_demean) {
    demean(data);
  }

  fs::create_directories(a.out);
  const std::vector<std::string>& ch = data.channel_names;
  std::vector<std::string> outputs;

  json cfg_json = {{"solver", a.solver},
                   {"modes", a.modes},
                   {"alpha", a.alpha},
                   {"tau", a.tau},
                   {"tol", a.tol},
                   {"max_iter", a.max_iter},
                   {"init_freqs", a.init_freqs},
                   {"demean", a.do_demean},
                   {"zscore", a.do_zscore},
                   {"rate", a.rate}};

  int iters = 0;
  bool converged = false;
  std::vector<double> freqs_hz;

  if (a.solver == "vlmd") {
    VlmdConfig cfg;
    cfg.n_latents = a.latents > 0 ? a.latents : data.n_channels();
    cfg.n_modes = a.modes;
    cfg.alpha = a.alpha;
    cfg.rho = a.rho;
    cfg.lambda = a.lambda;
    cfg.tau = a.tau;
    cfg.tol = a.tol;
    cfg.max_iter = a.max_iter;
    cfg.mirror = a.mirror;
    apply_freq_init(a.init_freqs, a.rate, cfg.init, cfg.init_freqs);
    cfg_json["latents"] = cfg.n_latents;
    cfg_json["rho"] = a.rho;
    cfg_json["lambda"] = a.lambda;
    cfg_json["mirror"] = a.mirror;

    const DecompositionResult r = vlmd_decompose(data, cfg);
    emit_warnings(r.warnings, r.degenerate_modes);

    for (size_t k = 0; k < r.intrinsic_modes.size(); ++k) {
      const std::string name = "modes_k" + std::to_string(k + 1) + ".csv";
      write_csv(a.out / name, ch, r.intrinsic_modes[k]);
      outputs.push_back(name);
    }
    write_csv(a.out / "latents.csv", label_seq("latent_", cfg.n_latents),
              r.latent_components);
    outputs.push_back("latents.csv");
    write_csv(a.out / "coefficients.csv", ch, r.coefficients);
    outputs.push_back("coefficients.csv");
    write_frequencies_csv(a.out / "frequencies.csv", r.central_freqs_hz, a.rate);
    outputs.push_back("frequencies.csv");
    write_trace_csv(a.out / "trace.csv", r.freq_trace);
    outputs.push_back("trace.csv");
    iters = r.n_iterations;
    converged = r.converged;
    freqs_hz = r.central_freqs_hz;
  } else {
    if (a.latents > 0)
      std::cerr << "warning: --latents is ignored by the mvmd solver\n";
    MvmdConfig cfg;
    cfg.n_modes = a.modes;
    cfg.alpha = a.alpha;
    cfg.tau = a.tau;
    cfg.tol = a.tol;
    cfg.max_iter = a.max_iter;
    apply_freq_init(a.init_freqs, a.rate, cfg.init, cfg.init_freqs);

    const MvmdResult r = mvmd_decompose(data, cfg);
    emit_warnings({}, r.degenerate_modes);
    for (size_t k = 0; k < r.modes.size(); ++k) {
      const std::string name = "modes_k" + std::to_string(k + 1) + ".csv";
      write_csv(a.out / name, ch, r.modes[k]);
      outputs.push_back(name);
    }
    write_frequencies_csv(a.out / "frequencies.csv", r.central_freqs_hz, a.rate);
    outputs.push_back("frequencies.csv");
    write_trace_csv(a.out / "trace.csv", r.freq_trace);
    outputs.push_back("trace.csv");
    iters = r.n_iterations;
    converged = r.converged;
    freqs_hz = r.central_freqs_hz;
  }

  write_manifest(a.out, "decompose", cfg_json, a.input, std::nullopt,
                 timer.ms(), outputs);

  std::cout << a.solver << ": " << data.n_samples() << " x "
            << data.n_channels() << " input, " << a.modes << " modes, "
            << iters << " iterations ("
            << (converged ? "converged" : "max-iter") << ")\n";
  std::cout << "central frequencies (Hz):";
  for (double f : freqs_hz) std::cout << " " << format_double(f);
  std::cout << "\n";
  return 0;
}

struct SynthArgs {
  std::string scenario;
  fs::path spec_file;
  bool has_scenario = false;
  bool has_spec = false;
  double noise = 0.0;
  bool noise_set = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  fs::path out;
};

int run_synth(const SynthArgs& a) {
  Timer timer;
  SynthSpec spec;
  json cfg_json;
  if (a.has_scenario) {
    spec = scenario_spec(a.scenario[0], a.noise, a.seed);
    cfg_json["scenario"] = a.scenario;
  } else {
    spec = parse_spec_file(a.spec_file);
    if (a.noise_set) spec.noise_sigma = a.noise;
    if (a.seed_set) spec.seed = a.seed;
    cfg_json["spec_file"] = a.spec_file.string();
  }
  cfg_json["noise"] = spec.noise_sigma;

  const auto [data, gt] = generate(spec);

  fs::create_directories(a.out);
  std::vector<std::string> outputs;
  const std::vector<std::string>& ch = data.channel_names;

  write_csv(a.out / "data.csv", ch, data.samples);
  outputs.push_back("data.csv");
  write_csv(a.out / "gt_clean.csv", ch, gt.clean.samples);
  outputs.push_back("gt_clean.csv");
  write_csv(a.out / "gt_coefficients.csv", ch, gt.coefficients);
  outputs.push_back("gt_coefficients.csv");
  for (size_t k = 0; k < gt.intrinsic_modes.size(); ++k) {
    const std::string name = "gt_mode_k" + std::to_string(k + 1) + ".csv";
    write_csv(a.out / name, ch, gt.intrinsic_modes[k]);
    outputs.push_back(name);
  }
  for (size_t k = 0; k < gt.latent_modes.size(); ++k) {
    const std::string name = "gt_latent_k" + std::to_string(k + 1) + ".csv";
    write_csv(a.out / name, label_seq("latent_", spec.n_latents),
              gt.latent_modes[k]);
    outputs.push_back(name);
  }
  write_frequencies_csv(a.out / "gt_frequencies.csv", gt.freqs_hz,
                        spec.sample_rate_hz);
  outputs.push_back("gt_frequencies.csv");
  write_text_atomic(a.out / "spec.txt", spec_to_text(spec));
  outputs.push_back("spec.txt");

  write_manifest(a.out, "synth", cfg_json, std::nullopt, spec.seed, timer.ms(),
                 outputs);
  std::cout << "synthesized " << data.n_samples() << " x " << data.n_channels()
            << " dataset (noise " << format_double(spec.noise_sigma)
            << ", seed " << spec.seed << ")\n";
  return 0;
}

struct BenchArgs {
  fs::path config_file;
  std::string scenarios = "A";
  std::string solvers = "vlmd,mvmd";
  std::string noise_grid = "0.01,0.1,1,10";
  int datasets = 10;
  int seeds = 5;
  std::string k_sweep;
  std::uint64_t base_seed = 42;
  int threads = 0;
  fs::path out;
};

int run_bench(const BenchArgs& a) {
  Timer timer;
  BenchConfig cfg;
  cfg.scenarios.clear();
  for (char c : a.scenarios)
    if (c != ',' && c != ' ') cfg.scenarios.push_back(c);
  if (cfg.scenarios.empty()) throw ConfigError("--scenarios is empty");
  cfg.solvers = split(a.solvers, ',');
  cfg.noise_grid = parse_double_list(a.noise_grid, "--noise-grid");
  cfg.n_datasets = a.datasets;
  cfg.n_noise_seeds = a.seeds;
  if (!a.k_sweep.empty()) cfg.k_values = parse_int_set(a.k_sweep, "--k-sweep");
  cfg.base_seed = a.base_seed;
  cfg.threads = a.threads;

  const std::vector<BenchCell> rows = benchmark_run(cfg);

  fs::create_directories(a.out);
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows)
    cells.push_back({r.scenario, std::to_string(r.dataset_id),
                     format_double(r.noise), std::to_string(r.seed), r.solver,
                     std::to_string(r.k), format_double(r.corr_error),
                     format_double(r.freq_mape), format_double(r.wall_ms),
                     std::to_string(r.iters), r.converged ? "1" : "0",
                     r.failed ? "1" : "0"});
  write_csv_rows(a.out / "results.csv",
                 {"scenario", "dataset", "noise", "noise_seed", "solver", "k",
                  "corr_error", "freq_mape", "wall_ms", "iters", "converged",
                  "failed"},
                 cells);

  std::vector<std::vector<std::string>> sum_rows;
  for (const auto& s : summarize(rows))
    sum_rows.push_back({s.scenario, format_double(s.noise), s.solver,
                        std::to_string(s.k), std::to_string(s.n_cells),
                        std::to_string(s.n_failed),
                        format_double(s.mean_corr_error),
                        format_double(s.mean_freq_mape),
                        format_double(s.mean_wall_ms),
                        format_double(s.mean_iters)});
  write_csv_rows(a.out / "summary.csv",
                 {"scenario", "noise", "solver", "k", "n_cells", "n_failed",
                  "mean_corr_error", "mean_freq_mape", "mean_wall_ms",
                  "mean_iters"},
                 sum_rows);

  json cfg_json = {{"scenarios", a.scenarios},
                   {"solvers", a.solvers},
                   {"noise_grid", a.noise_grid},
                   {"datasets", a.datasets},
                   {"seeds", a.seeds},
                   {"k_sweep", a.k_sweep},
                   {"threads", a.threads}};
  write_manifest(a.out, "bench", cfg_json, std::nullopt, a.base_seed,
                 timer.ms(), {"results.csv", "summary.csv"});
  std::cout << "ran " << rows.size()
            << " benchmark cells -> results.csv, summary.csv\n";
  return 0;
}

struct ClusterArgs {
  fs::path run_dir;
  std::string target = "coefficients";
  std::string linkage = "average";
  std::string metric = "auto";
  int max_leaves = 0;
  fs::path out;
};

int run_cluster(const ClusterArgs& a) {
  Timer timer;
  Linkage linkage = Linkage::kAverage;
  if (a.linkage == "single") linkage = Linkage::kSingle;
  else if (a.linkage == "complete") linkage = Linkage::kComplete;
  else if (a.linkage != "average")
    throw ConfigError("unknown --linkage '" + a.linkage + "'");

  int mode_k = 0;
  if (a.target.rfind("mode:", 0) == 0) {
    mode_k = to_int(a.target.substr(5), "--target mode index");
    if (mode_k < 1) throw ConfigError("--target mode index must be >= 1");
  } else if (a.target != "coefficients") {
    throw ConfigError("--target must be 'coefficients' or 'mode:K', got '" +
                      a.target + "'");
  }

  const bool on_modes = mode_k > 0;
  if (a.metric != "auto") {
    if (!on_modes && a.metric != "euclidean")
      throw ConfigError("--target coefficients uses the euclidean metric");
    if (on_modes && a.metric != "correlation")
      throw ConfigError("--target mode:K uses the correlation metric");
  }
  const std::string metric = on_modes ? "correlation" : "euclidean";

  const fs::path source =
      a.run_dir / (on_modes ? "modes_k" + std::to_string(mode_k) + ".csv"
                            : "coefficients.csv");
  if (!fs::exists(source))
    throw InvalidInputError("'" + source.string() +
                            "' not found; run 'vlmd decompose --out " +
                            a.run_dir.string() + "' first");

  const CsvTable table = read_csv(source);
  Dendrogram dendro;
  ClusterDiagnostics diag;
  if (on_modes)
    dendro = cluster_modes(table.values, table.header, linkage, &diag);
  else
    dendro = cluster_coefficients(table.values, table.header, linkage);

  fs::create_directories(a.out);
  json j;
  j["target"] = a.target;
  j["linkage"] = a.linkage;
  j["metric"] = metric;
  j["leaf_labels"] = dendro.leaf_labels;
  j["merges"] = json::array();
  for (const auto& m : dendro.merges)
    j["merges"].push_back({{"cluster_a", m.cluster_a},
                           {"cluster_b", m.cluster_b},
                           {"height", m.height},
                           {"size", m.size}});
  if (on_modes) j["zero_variance_channels"] = diag.zero_variance_channels;
  write_text_atomic(a.out / "dendrogram.json", j.dump(2) + "\n");
  write_text_atomic(a.out / "dendrogram.newick",
                    to_newick(dendro, a.max_leaves) + "\n");

  json cfg_json = {{"target", a.target},
                   {"linkage", a.linkage},
                   {"metric", metric},
                   {"max_leaves", a.max_leaves}};
  write_manifest(a.out, "cluster", cfg_json, source, std::nullopt, timer.ms(),
                 {"dendrogram.json", "dendrogram.newick"});
  std::cout << "clustered " << dendro.leaf_labels.size() << " channels ("
            << a.target << ", " << a.linkage
            << ") -> dendrogram.json, dendrogram.newick\n";
  return 0;
}

struct FilterArgs {
  fs::path input;
  int drop_head_rows = 0;
  int drop_tail_rows = 0;
  double max_zero_frac = 1.0;
  double rate = 1.0;
  fs::path out;
};

int run_filter(const FilterArgs& a) {
  Timer timer;
  const TimeSeriesMatrix raw = read_time_series(a.input, a.rate);
  const TimeSeriesMatrix kept = filter_channels(
      raw, a.drop_head_rows, a.drop_tail_rows, a.max_zero_frac);

  fs::create_directories(a.out);
  write_csv(a.out / "filtered.csv", kept.channel_names, kept.samples);

  json cfg_json = {{"drop_head_rows", a.drop_head_rows},
                   {"drop_tail_rows", a.drop_tail_rows},
                   {"max_zero_frac", a.max_zero_frac},
                   {"rate", a.rate}};
  write_manifest(a.out, "filter-clients", cfg_json, a.input, std::nullopt,
                 timer.ms(), {"filtered.csv"});
  std::cout << "retained " << kept.n_channels() << " of " << raw.n_channels()
            << " channels, " << kept.n_samples() << " rows\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent mode decomposition toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  DecomposeArgs dec;
  auto* cmd_dec = app.add_subcommand(
      "decompose", "decompose a multichannel CSV into narrow-band modes");
  cmd_dec->add_option("--config", dec.config_file,
                      "key=value settings file (flags win)")
      ->check(CLI::ExistingFile);
  cmd_dec->add_option("input", dec.input, "input CSV (header row + samples)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_dec->add_option("--solver", dec.solver, "vlmd | mvmd")
      ->check(CLI::IsMember({"vlmd", "mvmd"}))
      ->capture_default_str();
  cmd_dec->add_option("--latents", dec.latents,
                      "latent components (default: one per channel)");
  cmd_dec->add_option("--modes", dec.modes, "modes per component K")
      ->capture_default_str();
  auto* alpha_opt =
      cmd_dec->add_option("--alpha", dec.alpha, "bandwidth penalty");
  cmd_dec->add_option("--rho", dec.rho, "reconstruction weight (vlmd)")
      ->capture_default_str();
  cmd_dec->add_option("--lambda", dec.lambda, "sparsity penalty (vlmd)")
      ->capture_default_str();
  cmd_dec->add_option("--tau", dec.tau, "dual step size")->capture_default_str();
  cmd_dec->add_option("--tol", dec.tol, "frequency-drift stopping tolerance")
      ->capture_default_str();
  cmd_dec->add_option("--max-iter", dec.max_iter, "iteration cap")
      ->capture_default_str();
  cmd_dec->add_option("--init-freqs", dec.init_freqs,
                      "zeros | uniform | comma-separated Hz list")
      ->capture_default_str();
  cmd_dec->add_flag("--mirror,!--no-mirror", dec.mirror,
                    "mirror-extend before the transform");
  auto* demean_opt =
      cmd_dec->add_flag("--demean", dec.do_demean, "subtract channel means");
  auto* zscore_opt = cmd_dec->add_flag("--zscore", dec.do_zscore,
                                       "demean and scale to unit variance");
  demean_opt->excludes(zscore_opt);
  zscore_opt->excludes(demean_opt);
  cmd_dec->add_option("--rate", dec.rate, "sample rate in Hz")
      ->capture_default_str();
  cmd_dec->add_option("--out", dec.out, "output directory")->required();

  SynthArgs syn;
  auto* cmd_syn = app.add_subcommand("synth", "generate a benchmark dataset");
  auto* scen_opt = cmd_syn->add_option("--scenario", syn.scenario,
                                       "preset scenario (A, B, or C)")
                       ->check(CLI::IsMember({"A", "B", "C"}));
  auto* spec_opt = cmd_syn->add_option("--spec", syn.spec_file,
                                       "spec file (key=value, see spec.txt)")
                       ->check(CLI::ExistingFile);
  scen_opt->excludes(spec_opt);
  spec_opt->excludes(scen_opt);
  auto* noise_opt =
      cmd_syn->add_option("--noise", syn.noise, "noise sigma")->capture_default_str();
  auto* seed_opt =
      cmd_syn->add_option("--seed", syn.seed, "generator seed")->capture_default_str();
  cmd_syn->add_option("--out", syn.out, "output directory")->required();

  BenchArgs ben;
  auto* cmd_ben =
      app.add_subcommand("bench", "sweep solvers over synthetic scenarios");
  cmd_ben->add_option("--config", ben.config_file,
                      "key=value settings file (flags win)")
      ->check(CLI::ExistingFile);
  cmd_ben->add_option("--scenarios", ben.scenarios, "e.g. A or A,B,C")
      ->capture_default_str();
  cmd_ben->add_option("--solvers", ben.solvers, "comma list")
      ->capture_default_str();
  cmd_ben->add_option("--noise-grid", ben.noise_grid, "comma list of sigmas")
      ->capture_default_str();
  cmd_ben->add_option("--datasets", ben.datasets, "datasets per scenario")
      ->capture_default_str();
  cmd_ben->add_option("--seeds", ben.seeds, "noise repeats per dataset")
      ->capture_default_str();
  cmd_ben->add_option("--k-sweep", ben.k_sweep,
                      "mode counts, e.g. 5:8 or 5,6,8 (default: true K)");
  cmd_ben->add_option("--base-seed", ben.base_seed, "seed for dataset draws")
      ->capture_default_str();
  cmd_ben->add_option("--threads", ben.threads,
                      "worker threads (0: VLMD_THREADS or hardware)")
      ->capture_default_str();
  cmd_ben->add_option("--out", ben.out, "output directory")->required();

  ClusterArgs clu;
  auto* cmd_clu = app.add_subcommand(
      "cluster", "cluster channels from a decomposition run directory");
  cmd_clu->add_option("run_dir", clu.run_dir, "decompose output directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd_clu->add_option("--target", clu.target, "coefficients | mode:K")
      ->capture_default_str();
  cmd_clu->add_option("--linkage", clu.linkage, "average | single | complete")
      ->capture_default_str();
  cmd_clu->add_option("--metric", clu.metric,
                      "auto | euclidean | correlation (fixed per target)")
      ->capture_default_str();
  cmd_clu->add_option("--max-leaves", clu.max_leaves,
                      "truncate the exported tree (0: full)")
      ->capture_default_str();
  cmd_clu->add_option("--out", clu.out, "output directory")->required();

  FilterArgs fil;
  auto* cmd_fil = app.add_subcommand(
      "filter-clients", "trim rows and drop mostly-zero channels");
  cmd_fil->add_option("input", fil.input, "input CSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_fil->add_option("--drop-head-rows", fil.drop_head_rows, "rows to drop")
      ->capture_default_str();
  cmd_fil->add_option("--drop-tail-rows", fil.drop_tail_rows, "rows to drop")
      ->capture_default_str();
  cmd_fil->add_option("--max-zero-frac", fil.max_zero_frac,
                      "drop channels whose zero fraction exceeds this")
      ->capture_default_str();
  cmd_fil->add_option("--rate", fil.rate, "sample rate in Hz")
      ->capture_default_str();
  cmd_fil->add_option("--out", fil.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  dec.alpha_set = alpha_opt->count() > 0;
  syn.has_scenario = scen_opt->count() > 0;
  syn.has_spec = spec_opt->count() > 0;
  syn.noise_set = noise_opt->count() > 0;
  syn.seed_set = seed_opt->count() > 0;

  try {
    if (cmd_dec->parsed()) {
      if (!dec.config_file.empty()) {
        const ConfigKeys keys = {
            {"solver",
             [&](const std::string& v) {
               if (v != "vlmd" && v != "mvmd")
                 throw ConfigError("solver must be vlmd or mvmd");
               dec.solver = v;
             }},
            {"latents", [&](const std::string& v) { dec.latents = to_int(v, "latents"); }},
            {"modes", [&](const std::string& v) { dec.modes = to_int(v, "modes"); }},
            {"alpha",
             [&](const std::string& v) {
               dec.alpha = to_double(v, "alpha");
               dec.alpha_set = true;
             }},
            {"rho", [&](const std::string& v) { dec.rho = to_double(v, "rho"); }},
            {"lambda", [&](const std::string& v) { dec.lambda = to_double(v, "lambda"); }},
            {"tau", [&](const std::string& v) { dec.tau = to_double(v, "tau"); }},
            {"tol", [&](const std::string& v) { dec.tol = to_double(v, "tol"); }},
            {"max-iter", [&](const std::string& v) { dec.max_iter = to_int(v, "max-iter"); }},
            {"init-freqs", [&](const std::string& v) { dec.init_freqs = v; }},
            {"mirror", [&](const std::string& v) { dec.mirror = parse_bool(v, "mirror"); }},
            {"demean", [&](const std::string& v) { dec.do_demean = parse_bool(v, "demean"); }},
            {"zscore", [&](const std::string& v) { dec.do_zscore = parse_bool(v, "zscore"); }},
            {"rate", [&](const std::string& v) { dec.rate = to_double(v, "rate"); }},
        };
        apply_config_file(dec.config_file, cmd_dec, keys);
      }
      if (!dec.alpha_set) dec.alpha = dec.solver == "mvmd" ? 2000.0 : 1000.0;
      return run_decompose(dec);
    }
    if (cmd_syn->parsed()) {
      if (!syn.has_scenario && !syn.has_spec)
        throw ConfigError("synth needs --scenario or --spec");
      return run_synth(syn);
    }
    if (cmd_ben->parsed()) {
      if (!ben.config_file.empty()) {
        const ConfigKeys keys = {
            {"scenarios", [&](const std::string& v) { ben.scenarios = v; }},
            {"solvers", [&](const std::string& v) { ben.solvers = v; }},
            {"noise-grid", [&](const std::string& v) { ben.noise_grid = v; }},
            {"datasets", [&](const std::string& v) { ben.datasets = to_int(v, "datasets"); }},
            {"seeds", [&](const std::string& v) { ben.seeds = to_int(v, "seeds"); }},
            {"k-sweep", [&](const std::string& v) { ben.k_sweep = v; }},
            {"base-seed",
             [&](const std::string& v) {
               try {
                 ben.base_seed = std::stoull(v);
               } catch (const std::exception&) {
                 throw ConfigError("expected a seed for base-seed, got '" + v + "'");
               }
             }},
            {"threads", [&](const std::string& v) { ben.threads = to_int(v, "threads"); }},
        };
        apply_config_file(ben.config_file, cmd_ben, keys);
      }
      return run_bench(ben);
    }
    if (cmd_clu->parsed()) return run_cluster(clu);
    if (cmd_fil->parsed()) return run_filter(fil);
  } catch (const ParseError& e) {
    std::cerr << "error: parse: " << e.what() << " (line " << e.line << ")\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const SpecError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const EmptyOutputError& e) {
    std::cerr << "error: empty-output: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
