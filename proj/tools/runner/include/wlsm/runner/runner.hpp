#pragma once

#include "wlsm/runner/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wlsm::runner {

struct RunOptions {
  std::string out_dir;                 // overrides config output.dir
  std::optional<std::uint64_t> seed;   // overrides noise.seed
  int threads = 0;                     // 0 leaves the current setting
  std::string cache_dir;               // empty: $WLSM_CACHE_DIR, else <out>/cache
  std::ostream* log = nullptr;         // progress and summary table
};

struct MethodSummary {
  IndexMethod method = IndexMethod::wlsm;
  double contrast = 0.0;
  Point argmax = Point::Zero();
  bool argmax_inside = false;
  bool flat = false;
  double seconds = 0.0;
};

struct RunResult {
  std::string out_dir;
  FarFieldMatrix far_field;
  WeightVector weights;
  bool weights_from_cache = false;
  std::vector<IndexField> fields;
  std::vector<MethodSummary> summary;
  std::vector<std::string> outputs;  // files written, relative to out_dir
};

// Pieces of a run, exposed for tests and the acceptance driver.
FarFieldMatrix simulate_far_field(const ExperimentConfig& cfg, std::uint64_t seed);
std::string weight_key(const ExperimentConfig& cfg);
WeightVector compute_weights(const ExperimentConfig& cfg);
IndexField compute_index(const ExperimentConfig& cfg, IndexMethod method, const FarFieldMatrix& F,
                         const WeightVector& w, const SamplingGrid& grid);

std::string resolve_out_dir(const ExperimentConfig& cfg, const RunOptions& opt);

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt);
// Writes the kernel, norm-sweep and concentration CSVs; returns files written.
std::vector<std::string> run_diagnose(const ExperimentConfig& cfg, const RunOptions& opt);

struct ReplayReport {
  std::vector<std::string> mismatched;  // files whose hash differs from the manifest
  std::vector<std::string> missing;
  bool ok() const { return mismatched.empty() && missing.empty(); }
};
// Re-runs the embedded config with the recorded seed and thread count into
// opt.out_dir (default <manifest dir>/replay) and compares file hashes.
ReplayReport replay_manifest(const std::string& manifest_path, RunOptions opt);

std::string file_fnv1a64(const std::string& path);

}  // namespace wlsm::runner
