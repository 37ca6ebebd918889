#pragma once

#include "wlsm/geometry.hpp"
#include "wlsm/methods.hpp"
#include "wlsm/weights.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wlsm::runner {

// Carries a 1-based line/column into the config text when one is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& origin, int line, int column, const std::string& msg);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

struct GridOptions {
  Point lo = Point(-1, -1, -1);
  Point hi = Point(1, 1, 1);
  std::array<int, 3> resolution{81, 81, 1};
};

struct ForwardOptions {
  std::string model = "born";  // born | exact
  double h = 0.0125;           // volume mesh spacing for the exact solver
  double quad_h = 0.0;         // Born quadrature spacing for kites (0 = automatic)
};

struct NoiseOptions {
  double level = 0.0;
  std::uint64_t seed = 1;
};

struct WeightOptions {
  WeightMethod method = WeightMethod::normal_eq_2d;
  int M = -1;  // -1 selects the library default
  double R = 1.0;
  NormalAssembly assembly = NormalAssembly::discrete;
  int tsvd_rank = 16;
  int tsvd_resolution = 41;
};

struct MethodOptions {
  int music_rank = -1;
  double factorization_eps = 1e-8;
  double rho_floor = 1e-6;
};

struct KernelDiagnostic {
  double k = 8.0;
  double alpha = 3.141592653589793 / 3;
  Point z = Point(0.2, 0, 0);
  std::vector<int> n_points{12, 64};
  GridOptions grid{Point(-0.5, -0.5, 0), Point(0.5, 0.5, 0), {101, 101, 1}};
  WeightOptions weights{};
};

struct NormSweep {
  std::string name;
  double k = 4.0;
  std::vector<double> alpha;
  std::vector<int> n_points;
  double disk_radius = 0.5;
  std::vector<double> noise_levels{0.0};
  std::uint64_t seed = 1;
  WeightOptions weights{};
};

struct ConcentrationDiagnostic {
  double k = 4.0, delta = 0.3, r = 0.6;
  std::vector<int> N{4, 8, 12, 16};
};

struct DiagnoseOptions {
  std::optional<KernelDiagnostic> kernel;
  std::vector<NormSweep> norm_sweeps;
  std::optional<ConcentrationDiagnostic> concentration;
};

struct ExperimentConfig {
  std::string name;
  std::string origin;  // path or "<string>"
  std::string text;    // raw config text, hashed and embedded in the manifest
  int dimension = 2;
  WaveConfig wave{};
  ApertureSpec aperture{};
  InclusionGeometry geometry{};
  GridOptions grid{};
  ForwardOptions forward{};
  NoiseOptions noise{};
  WeightOptions weights{};
  std::vector<IndexMethod> methods{IndexMethod::wlsm, IndexMethod::lsm, IndexMethod::factorization,
                                   IndexMethod::music};
  MethodOptions method_options{};
  std::string output_dir;  // empty: derived from name
  bool write_pgm = true;
  std::optional<DiagnoseOptions> diagnose;  // present only for diagnose configs

  SamplingGrid sampling_grid() const;
};

// Parses and validates; throws ConfigError with the offending line on any problem.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);

// Accepts plain numbers and forms like "pi", "pi/3", "2*pi/3", "0.5*pi".
std::optional<double> parse_angle(const std::string& s);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace wlsm::runner
