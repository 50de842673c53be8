#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "vlmd/csv_io.hpp"

using namespace vlmd;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "vlmd_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

// Runs the installed binary; returns the process exit code.
int run_cli(const std::string& args, const fs::path& stderr_to = {}) {
  std::string cmd = std::string(VLMD_CLI_BIN) + " " + args + " >/dev/null";
  cmd += stderr_to.empty() ? " 2>/dev/null" : " 2>" + stderr_to.string();
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_two_tone_csv(const fs::path& p) {
  const double pi = 3.14159265358979323846;
  Matrix x(96, 2);
  for (int t = 0; t < 96; ++t) {
    x(t, 0) = std::cos(2 * pi * 0.1 * t) + 0.4 * std::cos(2 * pi * 0.3 * t);
    x(t, 1) = 0.8 * std::cos(2 * pi * 0.1 * t) - 0.5 * std::cos(2 * pi * 0.3 * t);
  }
  write_csv(p, {"left", "right"}, x);
}

}  // namespace

TEST_CASE("numeric CSV round-trips exactly") {
  const fs::path dir = scratch_dir("roundtrip");
  Matrix m(3, 3);
  m << 1.0 / 3.0, -0.1, 1e-300,
       1e300, 0.0, 3.141592653589793,
       -12345.678901234567, 5e-324, 2.2250738585072014e-308;
  write_csv(dir / "m.csv", {"a", "b", "c"}, m);
  const CsvTable t = read_csv(dir / "m.csv");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.values.rows() == 3);
  REQUIRE(t.values.cols() == 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      CHECK(t.values(r, c) == m(r, c));
}

TEST_CASE("format_double is shortest-exact") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(0.1) == "0.1");  // 15 digits suffice
  CHECK(format_double(1.0) == "1");
  for (double v : {1.0 / 3.0, 2.0 / 3.0, 1e-17, 123456.789012345678, -0.7}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("parse errors carry 1-based line numbers") {
  const fs::path dir = scratch_dir("parse_errors");
  SUBCASE("bad number") {
    write_file(dir / "bad.csv", "a,b\n1,2\n3,oops\n");
    try {
      read_csv(dir / "bad.csv");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 3);
      CHECK(std::string(e.what()).find(":3:") != std::string::npos);
      CHECK(std::string(e.what()).find("column 2") != std::string::npos);
    }
  }
  SUBCASE("ragged row") {
    write_file(dir / "ragged.csv", "a,b\n1\n");
    try {
      read_csv(dir / "ragged.csv");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
    }
  }
  SUBCASE("empty header") {
    write_file(dir / "blank.csv", "\n1,2\n");
    try {
      read_csv(dir / "blank.csv");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 1);
    }
  }
  SUBCASE("missing or empty file") {
    CHECK_THROWS_AS(read_csv(dir / "nope.csv"), ParseError);
    write_file(dir / "empty.csv", "");
    CHECK_THROWS_AS(read_csv(dir / "empty.csv"), ParseError);
  }
  SUBCASE("header-only file has no data rows") {
    write_file(dir / "hdr.csv", "a,b\n");
    const CsvTable t = read_csv(dir / "hdr.csv");
    CHECK(t.values.rows() == 0);
    CHECK_THROWS_AS(read_time_series(dir / "hdr.csv", 1.0), ParseError);
  }
}

TEST_CASE("reader tolerates BOM, CRLF, and blank lines") {
  const fs::path dir = scratch_dir("lenient");
  write_file(dir / "bom.csv", std::string("\xEF\xBB\xBF") + "a,b\n1,2\n");
  const CsvTable bom = read_csv(dir / "bom.csv");
  CHECK(bom.header == std::vector<std::string>{"a", "b"});

  write_file(dir / "crlf.csv", "a,b\r\n1,2\r\n");
  const CsvTable crlf = read_csv(dir / "crlf.csv");
  CHECK(crlf.header == std::vector<std::string>{"a", "b"});
  CHECK(crlf.values(0, 1) == 2.0);

  write_file(dir / "gaps.csv", "a,b\n1,2\n\n3,4\n\n");
  const CsvTable gaps = read_csv(dir / "gaps.csv");
  CHECK(gaps.values.rows() == 2);
  CHECK(gaps.values(1, 0) == 3.0);
}

TEST_CASE("atomic writes leave no temp files behind") {
  const fs::path dir = scratch_dir("atomic");
  write_text_atomic(dir / "out.txt", "payload");
  CHECK(read_file(dir / "out.txt") == "payload");
  int entries = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++entries;
    CHECK(e.path().extension() != ".tmp");
  }
  CHECK(entries == 1);
}

TEST_CASE("writer shape validation") {
  const fs::path dir = scratch_dir("writer");
  CHECK_THROWS_AS(write_csv(dir / "x.csv", {"a"}, Matrix::Zero(2, 2)),
                  DimensionError);
  CHECK_THROWS_AS(write_csv_rows(dir / "x.csv", {"a", "b"}, {{"1"}}),
                  DimensionError);
}

TEST_CASE("file hashing is content-determined") {
  const fs::path dir = scratch_dir("hash");
  write_file(dir / "hello.txt", "hello");
  CHECK(fnv1a_hex(dir / "hello.txt") == "a430d84680aabd0b");
  write_file(dir / "empty.txt", "");
  CHECK(fnv1a_hex(dir / "empty.txt") == "cbf29ce484222325");
  write_file(dir / "other.txt", "hellp");
  CHECK(fnv1a_hex(dir / "other.txt") != fnv1a_hex(dir / "hello.txt"));
}

TEST_CASE("cli: synth is byte-deterministic and validates flags") {
  const fs::path dir = scratch_dir("cli_synth");
  const std::string base = "synth --scenario A --noise 0.01 --seed 7 --out ";
  REQUIRE(run_cli(base + (dir / "one").string()) == 0);
  REQUIRE(run_cli(base + (dir / "two").string()) == 0);
  CHECK(read_file(dir / "one" / "data.csv") == read_file(dir / "two" / "data.csv"));
  CHECK(read_file(dir / "one" / "gt_coefficients.csv") ==
        read_file(dir / "two" / "gt_coefficients.csv"));
  CHECK(fs::exists(dir / "one" / "spec.txt"));
  CHECK(fs::exists(dir / "one" / "manifest.json"));

  const fs::path errs = dir / "stderr.txt";
  CHECK(run_cli("synth --scenario A --noise -1 --out " + (dir / "bad").string(),
                errs) == 2);
  CHECK(read_file(errs).rfind("error: usage:", 0) == 0);
  CHECK(run_cli("synth --out " + (dir / "bad").string()) == 2);
  CHECK(run_cli("synth --scenario D --out " + (dir / "bad").string()) == 2);
}

TEST_CASE("cli: synth accepts a spec file and flag overrides") {
  const fs::path dir = scratch_dir("cli_specfile");
  REQUIRE(run_cli("synth --scenario B --noise 0.5 --seed 3 --out " +
                  (dir / "orig").string()) == 0);
  // regenerate from the emitted spec: identical dataset
  REQUIRE(run_cli("synth --spec " + (dir / "orig" / "spec.txt").string() +
                  " --out " + (dir / "re").string()) == 0);
  CHECK(read_file(dir / "orig" / "data.csv") == read_file(dir / "re" / "data.csv"));
  // a flag override changes the output
  REQUIRE(run_cli("synth --spec " + (dir / "orig" / "spec.txt").string() +
                  " --seed 4 --out " + (dir / "reseed").string()) == 0);
  CHECK(read_file(dir / "orig" / "data.csv") !=
        read_file(dir / "reseed" / "data.csv"));

  write_file(dir / "broken.spec", "n_channels=2\nwhatever=1\n");
  const fs::path errs = dir / "stderr.txt";
  CHECK(run_cli("synth --spec " + (dir / "broken.spec").string() + " --out " +
                    (dir / "bad").string(),
                errs) == 1);
  CHECK(read_file(errs).rfind("error: parse:", 0) == 0);
}

TEST_CASE("cli: decompose writes the full artifact set deterministically") {
  const fs::path dir = scratch_dir("cli_decompose");
  write_two_tone_csv(dir / "in.csv");
  const std::string flags =
      " --solver vlmd --latents 2 --modes 2 --max-iter 80 --tol 1e-9 --out ";
  REQUIRE(run_cli("decompose " + (dir / "in.csv").string() + flags +
                  (dir / "run").string()) == 0);

  for (const char* name :
       {"modes_k1.csv", "modes_k2.csv", "latents.csv", "coefficients.csv",
        "frequencies.csv", "trace.csv", "manifest.json"})
    CHECK(fs::exists(dir / "run" / name));

  const CsvTable freqs = read_csv(dir / "run" / "frequencies.csv");
  REQUIRE(freqs.values.rows() == 2);
  std::vector<double> f = {freqs.values(0, 2), freqs.values(1, 2)};
  std::sort(f.begin(), f.end());
  CHECK(f[0] == doctest::Approx(0.1).epsilon(0.05));
  CHECK(f[1] == doctest::Approx(0.3).epsilon(0.05));

  const nlohmann::json manifest =
      nlohmann::json::parse(read_file(dir / "run" / "manifest.json"));
  CHECK(manifest["tool"] == "vlmd");
  CHECK(manifest["command"] == "decompose");
  CHECK(manifest["config"]["solver"] == "vlmd");
  CHECK(manifest["input"]["fnv1a"] == fnv1a_hex(dir / "in.csv"));
  CHECK(manifest["outputs"].size() == 6);

  REQUIRE(run_cli("decompose " + (dir / "in.csv").string() + flags +
                  (dir / "run2").string()) == 0);
  CHECK(read_file(dir / "run" / "modes_k1.csv") ==
        read_file(dir / "run2" / "modes_k1.csv"));
  CHECK(read_file(dir / "run" / "coefficients.csv") ==
        read_file(dir / "run2" / "coefficients.csv"));
}

TEST_CASE("cli: decompose covers mvmd, zero input, and error codes") {
  const fs::path dir = scratch_dir("cli_decompose_edge");
  write_two_tone_csv(dir / "in.csv");

  REQUIRE(run_cli("decompose " + (dir / "in.csv").string() +
                  " --solver mvmd --modes 2 --max-iter 80 --out " +
                  (dir / "mrun").string()) == 0);
  CHECK(fs::exists(dir / "mrun" / "modes_k2.csv"));
  CHECK(fs::exists(dir / "mrun" / "frequencies.csv"));
  CHECK(!fs::exists(dir / "mrun" / "latents.csv"));

  std::string zeros = "x,y\n";
  for (int i = 0; i < 8; ++i) zeros += "0,0\n";
  write_file(dir / "zeros.csv", zeros);
  CHECK(run_cli("decompose " + (dir / "zeros.csv").string() +
                " --latents 1 --modes 2 --out " + (dir / "zrun").string()) == 0);

  CHECK(run_cli("decompose " + (dir / "in.csv").string() +
                " --latents 9 --out " + (dir / "bad").string()) == 2);
  write_file(dir / "broken.csv", "a,b\n1,2\n3,oops\n");
  const fs::path errs = dir / "stderr.txt";
  CHECK(run_cli("decompose " + (dir / "broken.csv").string() + " --out " +
                    (dir / "bad").string(),
                errs) == 1);
  CHECK(read_file(errs).rfind("error: parse:", 0) == 0);
  CHECK(run_cli("decompose " + (dir / "in.csv").string() +
                " --solver nope --out " + (dir / "bad").string()) == 2);
  CHECK(run_cli("decompose missing.csv --out " + (dir / "bad").string()) == 2);
}

TEST_CASE("cli: config file fills in flags without overriding them") {
  const fs::path dir = scratch_dir("cli_config");
  write_two_tone_csv(dir / "in.csv");
  write_file(dir / "settings.cfg", "modes=3\nmax-iter=5\n");
  REQUIRE(run_cli("decompose " + (dir / "in.csv").string() + " --config " +
                  (dir / "settings.cfg").string() + " --latents 2 --modes 2" +
                  " --out " + (dir / "run").string()) == 0);
  CHECK(fs::exists(dir / "run" / "modes_k2.csv"));
  CHECK(!fs::exists(dir / "run" / "modes_k3.csv"));  // flag beat the file
  const nlohmann::json manifest =
      nlohmann::json::parse(read_file(dir / "run" / "manifest.json"));
  CHECK(manifest["config"]["max_iter"] == 5);  // file beat the default

  write_file(dir / "bad.cfg", "warp_factor=9\n");
  const fs::path errs = dir / "stderr.txt";
  CHECK(run_cli("decompose " + (dir / "in.csv").string() + " --config " +
                    (dir / "bad.cfg").string() + " --out " +
                    (dir / "bad").string(),
                errs) == 1);
  CHECK(read_file(errs).rfind("error: parse:", 0) == 0);
}

TEST_CASE("cli: cluster consumes decompose outputs") {
  const fs::path dir = scratch_dir("cli_cluster");
  write_two_tone_csv(dir / "in.csv");
  REQUIRE(run_cli("decompose " + (dir / "in.csv").string() +
                  " --latents 2 --modes 2 --max-iter 40 --out " +
                  (dir / "run").string()) == 0);

  REQUIRE(run_cli("cluster " + (dir / "run").string() +
                  " --target coefficients --out " + (dir / "cc").string()) == 0);
  const nlohmann::json dj =
      nlohmann::json::parse(read_file(dir / "cc" / "dendrogram.json"));
  CHECK(dj["metric"] == "euclidean");
  CHECK(dj["leaf_labels"] == nlohmann::json({"left", "right"}));
  CHECK(dj["merges"].size() == 1);
  const std::string newick = read_file(dir / "cc" / "dendrogram.newick");
  CHECK(newick.find(';') != std::string::npos);

  REQUIRE(run_cli("cluster " + (dir / "run").string() +
                  " --target mode:1 --out " + (dir / "cm").string()) == 0);
  const nlohmann::json dm =
      nlohmann::json::parse(read_file(dir / "cm" / "dendrogram.json"));
  CHECK(dm["metric"] == "correlation");
  CHECK(dm["merges"].size() == 1);

  CHECK(run_cli("cluster " + (dir / "run").string() +
                " --target nonsense --out " + (dir / "bad").string()) == 2);
  CHECK(run_cli("cluster " + (dir / "run").string() +
                " --target mode:1 --metric euclidean --out " +
                (dir / "bad").string()) == 2);
  fs::create_directories(dir / "not_a_run");
  const fs::path errs = dir / "stderr.txt";
  CHECK(run_cli("cluster " + (dir / "not_a_run").string() +
                    " --target coefficients --out " + (dir / "bad").string(),
                errs) == 1);
  CHECK(read_file(errs).find("decompose") != std::string::npos);
}

TEST_CASE("cli: filter-clients trims rows and drops zero-heavy channels") {
  const fs::path dir = scratch_dir("cli_filter");
  write_file(dir / "raw.csv", "t,a,b\n0,0,1\n1,0,2\n2,0,1.5\n3,0,0.5\n");

  REQUIRE(run_cli("filter-clients " + (dir / "raw.csv").string() +
                  " --max-zero-frac 0.5 --out " + (dir / "f1").string()) == 0);
  const CsvTable kept = read_csv(dir / "f1" / "filtered.csv");
  CHECK(kept.header == std::vector<std::string>{"t", "b"});
  CHECK(kept.values.rows() == 4);

  REQUIRE(run_cli("filter-clients " + (dir / "raw.csv").string() +
                  " --max-zero-frac 1.0 --drop-head-rows 1 --drop-tail-rows 1" +
                  " --out " + (dir / "f2").string()) == 0);
  const CsvTable trimmed = read_csv(dir / "f2" / "filtered.csv");
  CHECK(trimmed.header.size() == 3);
  CHECK(trimmed.values.rows() == 2);
  CHECK(trimmed.values(0, 2) == 2.0);

  // dropping every channel is a runtime failure, not a usage error
  write_file(dir / "raw2.csv", "t,a,b\n0,0,1\n1,0,0\n2,0,1.5\n3,0,0.5\n");
  const fs::path errs = dir / "stderr.txt";
  CHECK(run_cli("filter-clients " + (dir / "raw2.csv").string() +
                    " --max-zero-frac 0 --drop-head-rows 0 --out " +
                    (dir / "f3").string(),
                errs) == 1);
  CHECK(read_file(errs).rfind("error: empty-output:", 0) == 0);
}

TEST_CASE("cli: bench produces one row per grid cell") {
  const fs::path dir = scratch_dir("cli_bench");
  REQUIRE(run_cli("bench --scenarios A --noise-grid 0.01 --datasets 1"
                  " --seeds 1 --out " +
                  (dir / "b").string()) == 0);
  const std::string results = read_file(dir / "b" / "results.csv");
  CHECK(std::count(results.begin(), results.end(), '\n') == 3);  // header + 2
  CHECK(results.rfind("scenario,", 0) == 0);
  CHECK(results.find(",vlmd,") != std::string::npos);
  CHECK(results.find(",mvmd,") != std::string::npos);
  const std::string summary = read_file(dir / "b" / "summary.csv");
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);
  CHECK(run_cli("bench --noise-grid nope --out " + (dir / "bad").string()) == 2);
}
