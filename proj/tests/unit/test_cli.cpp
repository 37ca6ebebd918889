#include "wlsm/errors.hpp"
#include "wlsm/runner/runner.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unistd.h>

using namespace wlsm;
using namespace wlsm::runner;
namespace fs = std::filesystem;

namespace {
constexpr double kPi = std::numbers::pi;

fs::path scratch(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("wlsm_cli_" + std::to_string(::getpid())) / tag;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(WLSM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmall = R"(name: small
dimension: 2
wave: {k: 6}
aperture: {alpha: pi/3, n_points: 12}
geometry:
  - {type: disk, center: [0.1, 0.2], radius: 0.15}
grid: {lo: [-1, -1], hi: [1, 1], resolution: 21}
noise: {level: 0.05, seed: 3}
)";

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}
}  // namespace

TEST(Config, BundledConfigsParse) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(WLSM_CONFIG_DIR)) {
    if (e.path().extension() != ".yaml") continue;
    EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
    ++n;
  }
  EXPECT_EQ(n, 13);
}

TEST(Config, Example1Pi3MatchesCaption) {
  const auto c = load_config(std::string(WLSM_CONFIG_DIR) + "/example1_pi3.yaml");
  EXPECT_EQ(c.wave.k, 6.0);
  EXPECT_NEAR(c.aperture.alpha, kPi / 3, 1e-15);
  EXPECT_EQ(c.aperture.n_points, 16);
  EXPECT_EQ(c.noise.level, 0.05);
  EXPECT_EQ(c.geometry.shapes.size(), 2u);
  EXPECT_EQ(c.methods.size(), 4u);
}

TEST(Config, Example6MatchesCaption) {
  const auto c = load_config(std::string(WLSM_CONFIG_DIR) + "/example6_3d.yaml");
  EXPECT_EQ(c.dimension, 3);
  EXPECT_EQ(c.wave.k, 8.0);
  EXPECT_EQ(c.aperture.n_points, 78);
  EXPECT_NEAR(c.aperture.beta, kPi / 4, 1e-15);
  EXPECT_EQ(c.noise.level, 0.1);
  EXPECT_EQ(c.weights.method, WeightMethod::normal_eq_3d);
}

TEST(Config, UnknownKeyIsLineAnchored) {
  std::string t = kSmall;
  t.replace(t.find("noise:"), 6, "noize:");
  EXPECT_EQ(error_line(t), 8);
  EXPECT_EQ(error_line(std::string(kSmall) + "weights: {method: vandermonde, rank: 3}\n"), 9);
}

TEST(Config, RejectsBadValues) {
  auto with = [](const std::string& from, const std::string& to) {
    std::string t = kSmall;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  EXPECT_EQ(error_line(with("{k: 6}", "{k: -6}")), 3);
  EXPECT_EQ(error_line(with("{k: 6}", "{k: six}")), 3);
  EXPECT_EQ(error_line(with("n_points: 12", "n_points: 2")), 4);
  EXPECT_EQ(error_line(with("alpha: pi/3", "alpha: 4")), 4);
  EXPECT_EQ(error_line(with("type: disk", "type: blob")), 6);
  EXPECT_EQ(error_line(with("radius: 0.15", "radius: 0")), 6);
  EXPECT_EQ(error_line(with("center: [0.1, 0.2]", "center: [0.1, 0.2, 0]")), 6);
  EXPECT_EQ(error_line(with("resolution: 21", "resolution: 1")), 7);
  EXPECT_EQ(error_line(with("level: 0.05", "level: -1")), 8);
  EXPECT_EQ(error_line(with("seed: 3", "seed: -3")), 8);
  // even point count with Vandermonde weights
  EXPECT_EQ(error_line(std::string(kSmall) + "weights: {method: vandermonde}\n"), 9);
  EXPECT_EQ(error_line(std::string(kSmall) + "methods: [wlsm, wlsm]\n"), 9);
  EXPECT_EQ(error_line(std::string(kSmall) + "methods: [lsm, sampling]\n"), 9);
  EXPECT_EQ(error_line(std::string(kSmall) + "wave: {k: 7}\n"), 9);  // duplicate key
  EXPECT_EQ(error_line("name: x\nwave: [1\n"), 3);                    // YAML syntax
}

TEST(Config, ShapeDimensionMustMatch) {
  std::string t = kSmall;
  t.replace(t.find("{type: disk, center: [0.1, 0.2], radius: 0.15}"), 47,
            "{type: ball, center: [0, 0, 0], radius: 0.1}");
  EXPECT_EQ(error_line(t), 6);
}

TEST(Config, MissingSectionsAreReported) {
  EXPECT_THROW(parse_config("name: a\n"), ConfigError);
  EXPECT_THROW(parse_config(""), ConfigError);
  std::string t = kSmall;
  t.erase(t.find("grid:"), std::string("grid: {lo: [-1, -1], hi: [1, 1], resolution: 21}\n").size());
  EXPECT_THROW(parse_config(t), ConfigError);
  EXPECT_THROW(parse_config("name: d\nmode: diagnose\n"), ConfigError);
  EXPECT_THROW(parse_config("name: d\nmode: diagnose\nwave: {k: 1}\ndiagnose: {concentration: {}}\n"), ConfigError);
}

TEST(Config, AngleForms) {
  EXPECT_NEAR(*parse_angle("pi"), kPi, 1e-15);
  EXPECT_NEAR(*parse_angle("pi/3"), kPi / 3, 1e-15);
  EXPECT_NEAR(*parse_angle("2*pi/3"), 2 * kPi / 3, 1e-15);
  EXPECT_NEAR(*parse_angle("0.5 pi"), kPi / 2, 1e-15);
  EXPECT_NEAR(*parse_angle("pi/3.5"), kPi / 3.5, 1e-15);
  EXPECT_EQ(*parse_angle("1.25"), 1.25);
  EXPECT_FALSE(parse_angle("pie"));
  EXPECT_FALSE(parse_angle("pi/0"));
  EXPECT_FALSE(parse_angle(""));
}

TEST(Config, HashReferenceValues) {
  // published FNV-1a 64-bit test vectors
  EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
  EXPECT_EQ(hex64(fnv1a64("foobar")), "85944171f73967e8");
}

TEST(Run, EmptyGeometryNoNoiseIsFlat) {
  const auto dir = scratch("empty");
  std::ofstream(dir / "empty.yaml") << "name: empty\nwave: {k: 6}\naperture: {alpha: pi/3, n_points: 12}\n"
                                       "geometry: []\ngrid: {lo: [-1, -1], hi: [1, 1], resolution: 11}\n";
  EXPECT_EQ(cli("run " + (dir / "empty.yaml").string() + " --out " + (dir / "out").string()), 0);
  const auto c = load_config((dir / "empty.yaml").string());
  RunOptions o;
  o.out_dir = (dir / "api").string();
  const auto r = run_experiment(c, o);
  ASSERT_EQ(r.fields.size(), 4u);
  for (const auto& f : r.fields) {
    EXPECT_TRUE(f.flat);
    for (double v : f.values) EXPECT_EQ(v, 0.0);
  }
  EXPECT_TRUE(fs::exists(dir / "out" / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
}

TEST(Run, WritesDocumentedFiles) {
  const auto dir = scratch("files");
  RunOptions o;
  o.out_dir = (dir / "a").string();
  const auto r = run_experiment(parse_config(kSmall), o);
  for (const char* f : {"far_field.txt", "weights.txt", "summary.csv", "manifest.json", "index_wlsm.csv",
                        "index_wlsm.pgm", "index_wlsm_record.txt", "index_lsm.csv", "index_music.csv",
                        "index_factorization.csv"})
    EXPECT_TRUE(fs::exists(dir / "a" / f)) << f;
  std::ifstream ff(dir / "a" / "far_field.txt");
  const auto F = read_far_field(ff);
  EXPECT_EQ((F.entries - r.far_field.entries).norm(), 0.0);
  EXPECT_EQ(F.provenance.seed, 3u);
  std::istringstream csv(slurp(dir / "a" / "index_wlsm.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "x,y,value");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 21 * 21);
}

TEST(Run, SeedOverrideAndDeterminism) {
  const auto dir = scratch("seed");
  const auto c = parse_config(kSmall);
  RunOptions o;
  o.out_dir = (dir / "a").string();
  o.threads = 1;
  run_experiment(c, o);
  o.out_dir = (dir / "b").string();
  o.threads = 4;
  run_experiment(c, o);
  o.out_dir = (dir / "c").string();
  o.seed = 99;
  run_experiment(c, o);
  for (const char* f : {"far_field.txt", "index_wlsm.csv", "index_lsm.csv", "index_music.csv", "summary.csv"})
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  EXPECT_NE(slurp(dir / "a" / "far_field.txt"), slurp(dir / "c" / "far_field.txt"));
}

TEST(Run, WeightCacheHitReproducesOutputs) {
  const auto dir = scratch("cache");
  const auto c = parse_config(kSmall);
  RunOptions o;
  o.cache_dir = (dir / "cache").string();
  o.out_dir = (dir / "a").string();
  EXPECT_FALSE(run_experiment(c, o).weights_from_cache);
  o.out_dir = (dir / "b").string();
  EXPECT_TRUE(run_experiment(c, o).weights_from_cache);
  EXPECT_EQ(slurp(dir / "a" / "index_wlsm.csv"), slurp(dir / "b" / "index_wlsm.csv"));
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "cache")) ++entries;
  EXPECT_EQ(entries, 1);
}

TEST(Run, CacheKeyDistinguishesAssembly) {
  auto a = parse_config(kSmall);
  auto b = a;
  b.weights.assembly = NormalAssembly::continuous;
  EXPECT_NE(weight_key(a), weight_key(b));
  b = a;
  b.weights.M = 3;
  EXPECT_NE(weight_key(a), weight_key(b));
}

TEST(Run, CacheDirFromEnvironment) {
  const auto dir = scratch("env");
  ::setenv("WLSM_CACHE_DIR", (dir / "envcache").c_str(), 1);
  RunOptions o;
  o.out_dir = (dir / "a").string();
  run_experiment(parse_config(kSmall), o);
  ::unsetenv("WLSM_CACHE_DIR");
  EXPECT_TRUE(fs::exists(dir / "envcache"));
  EXPECT_FALSE(fs::exists(dir / "a" / "cache"));
}

TEST(Run, ReplayIsBitIdentical) {
  const auto dir = scratch("replay");
  RunOptions o;
  o.out_dir = (dir / "a").string();
  o.seed = 17;
  run_experiment(parse_config(kSmall), o);
  const auto rep = replay_manifest((dir / "a" / "manifest.json").string(), RunOptions{});
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(slurp(dir / "a" / "far_field.txt"), slurp(dir / "a" / "replay" / "far_field.txt"));
  EXPECT_EQ(cli("replay " + (dir / "a" / "manifest.json").string() + " --out " + (dir / "r2").string()), 0);
  // a manifest whose recorded hash disagrees is reported
  std::string m = slurp(dir / "a" / "manifest.json");
  const auto pos = m.find("\"summary.csv\"");
  ASSERT_NE(pos, std::string::npos);
  const auto h = m.find("\"fnv1a64\": \"", pos) + 12;
  m[h] = m[h] == '0' ? '1' : '0';
  std::ofstream(dir / "a" / "manifest.json", std::ios::binary) << m;
  EXPECT_EQ(cli("replay " + (dir / "a" / "manifest.json").string() + " --out " + (dir / "r4").string()), 1);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("exit");
  EXPECT_EQ(cli("run " + (dir / "missing.yaml").string()), 2);
  std::ofstream(dir / "bad.yaml") << "name: bad\nwave: {k: 6}\nbogus: 1\n";
  EXPECT_EQ(cli("run " + (dir / "bad.yaml").string()), 2);
  EXPECT_EQ(cli("frobnicate"), 2);
  EXPECT_EQ(cli("run " + std::string(WLSM_CONFIG_DIR) + "/diagnose_fig2.yaml"), 2);
  // 41 points on a narrow arc: the Vandermonde system is too ill-conditioned
  std::ofstream(dir / "ill.yaml") << "name: ill\nwave: {k: 6}\naperture: {alpha: pi/12, n_points: 41}\n"
                                     "geometry: []\ngrid: {lo: [-1, -1], hi: [1, 1], resolution: 5}\n"
                                     "weights: {method: vandermonde}\nmethods: [wlsm]\n";
  EXPECT_EQ(cli("run " + (dir / "ill.yaml").string() + " --out " + (dir / "ill").string()), 3);
}

TEST(Diagnose, KernelAndSweepFiles) {
  const auto dir = scratch("diag");
  const auto c = parse_config(R"(name: d
mode: diagnose
diagnose:
  kernel: {k: 8, alpha: pi/3, z: [0.2, 0], n_points: [12, 64], grid: {lo: [-0.5, -0.5], hi: [0.5, 0.5], resolution: 11}}
  norm_sweeps:
    - {name: full, k: 6, alpha: pi, n_points: [12, 16], noise_levels: [0.05]}
  concentration: {k: 4, delta: 0.3, r: 0.6, N: [4, 8]}
)");
  RunOptions o;
  o.out_dir = dir.string();
  const auto files = run_diagnose(c, o);
  EXPECT_EQ(files.size(), 5u);
  std::istringstream summary(slurp(dir / "kernel_summary.csv"));
  std::string line;
  std::getline(summary, line);
  std::vector<double> werr, uerr;
  while (std::getline(summary, line)) {
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> t;
    while (std::getline(ls, tok, ',')) t.push_back(tok);
    werr.push_back(std::stod(t[1]));
    uerr.push_back(std::stod(t[2]));
  }
  ASSERT_EQ(werr.size(), 2u);
  // weighted kernel is the closer match at both point counts
  EXPECT_LT(werr[0], uerr[0]);
  EXPECT_LT(werr[1], uerr[1]);
  // full aperture: weights are near uniform, so the normalized norms agree to 10%
  std::istringstream norms(slurp(dir / "norms_full.csv"));
  std::getline(norms, line);
  int rows = 0;
  while (std::getline(norms, line)) {
    const double uni = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_NEAR(uni, 1.0, 0.1) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 2);
}
