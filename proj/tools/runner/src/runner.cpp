#include "wlsm/runner/runner.hpp"

#include "wlsm/errors.hpp"
#include "wlsm/io.hpp"
#include "wlsm/parallel.hpp"
#include "wlsm/specfun.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#ifndef WLSM_VERSION
#define WLSM_VERSION "0.0.0"
#endif

namespace wlsm::runner {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sanitize(const std::string& key) {
  std::string s = key;
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')) c = '_';
  return s;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

// Writes through a callback and records the file name.
template <class F>
void emit(const fs::path& dir, const std::string& name, std::vector<std::string>& outputs, F&& body) {
  auto os = open_out(dir / name);
  body(os);
  os.close();
  if (!os) throw std::runtime_error("failed writing " + (dir / name).string());
  outputs.push_back(name);
}

std::string cache_dir_for(const RunOptions& opt, const fs::path& out) {
  if (!opt.cache_dir.empty()) return opt.cache_dir;
  if (const char* env = std::getenv("WLSM_CACHE_DIR"); env && *env) return env;
  return (out / "cache").string();
}

json versions() {
  json v;
  v["wlsm"] = WLSM_VERSION;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
#if defined(__VERSION__)
  v["compiler"] = __VERSION__;
#endif
  return v;
}

json manifest_base(const ExperimentConfig& cfg, std::uint64_t seed) {
  json m;
  m["format"] = "wlsm-manifest-v1";
  m["name"] = cfg.name;
  m["mode"] = cfg.diagnose ? "diagnose" : "run";
  m["config_origin"] = cfg.origin;
  m["config_hash"] = hex64(fnv1a64(cfg.text));
  m["seed"] = seed;
  m["threads"] = thread_count();
  m["versions"] = versions();
  m["config_text"] = cfg.text;
  return m;
}

void write_manifest(const fs::path& dir, json m, const std::vector<std::string>& outputs) {
  json files = json::array();
  for (const auto& f : outputs) files.push_back({{"file", f}, {"fnv1a64", file_fnv1a64((dir / f).string())}});
  m["outputs"] = files;
  auto os = open_out(dir / "manifest.json");
  os << m.dump(2) << "\n";
}

ApertureSpec sweep_aperture(double alpha, int n) {
  ApertureSpec s;
  s.alpha = alpha;
  s.n_points = n;
  s.layout = std::abs(alpha - std::numbers::pi) < 1e-12 ? Layout::periodic : Layout::closed;
  return s;
}

WeightVector weights_for(const WeightOptions& o, const ApertureSpec& spec, const WaveConfig& wave,
                         const GridOptions& g) {
  switch (o.method) {
    case WeightMethod::uniform:
      return weights_uniform(spec.n_points);
    case WeightMethod::vandermonde:
      return weights_vandermonde(spec);
    case WeightMethod::tsvd: {
      Point lo = g.lo, hi = g.hi;
      if (spec.dimension == 2) lo.z() = hi.z() = 0.0;
      return weights_tsvd(spec, wave, make_grid(spec.dimension, lo, hi, o.tsvd_resolution), o.tsvd_rank);
    }
    case WeightMethod::normal_eq_2d:
      return weights_normal_eq_2d(spec, wave, o.M, o.R, o.assembly);
    case WeightMethod::normal_eq_3d:
      return weights_normal_eq_3d(spec, wave, o.M, o.R);
  }
  throw std::logic_error("unhandled weight method");
}

}  // namespace

std::string file_fnv1a64(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::ostringstream ss;
  ss << in.rdbuf();
  return hex64(fnv1a64(ss.str()));
}

FarFieldMatrix simulate_far_field(const ExperimentConfig& cfg, std::uint64_t seed) {
  FarFieldMatrix F;
  if (cfg.forward.model == "exact") {
    const VolumeMesh mesh = build_mesh(cfg.geometry, cfg.dimension, cfg.forward.h);
    F = far_field_exact(mesh, cfg.wave, cfg.aperture);
  } else {
    F = far_field_born(cfg.geometry, cfg.wave, cfg.aperture, cfg.forward.quad_h);
  }
  F = add_noise(F, cfg.noise.level, seed);
  F.provenance.config_hash = hex64(fnv1a64(cfg.text));
  return F;
}

std::string weight_key(const ExperimentConfig& cfg) {
  const WeightOptions& o = cfg.weights;
  std::ostringstream os;
  os << weight_cache_key(cfg.aperture, cfg.wave, o.method, o.M) << std::setprecision(17);
  if (cfg.aperture.layout != Layout::automatic)
    os << "_L" << (cfg.aperture.layout == Layout::closed ? "closed" : "periodic");
  if (cfg.dimension == 3) os << "_rings" << cfg.aperture.n_rings;
  if (o.method == WeightMethod::normal_eq_2d || o.method == WeightMethod::normal_eq_3d) os << "_R" << o.R;
  if (o.method == WeightMethod::normal_eq_2d) os << "_" << to_string(o.assembly);
  if (o.method == WeightMethod::tsvd) {
    os << "_r" << o.tsvd_rank << "_g" << o.tsvd_resolution;
    for (int a = 0; a < cfg.dimension; ++a) os << "_" << cfg.grid.lo[a] << "_" << cfg.grid.hi[a];
  }
  return os.str();
}

WeightVector compute_weights(const ExperimentConfig& cfg) {
  return weights_for(cfg.weights, cfg.aperture, cfg.wave, cfg.grid);
}

IndexField compute_index(const ExperimentConfig& cfg, IndexMethod method, const FarFieldMatrix& F,
                         const WeightVector& w, const SamplingGrid& grid) {
  const MeasurementSet ms = measurement_points(cfg.aperture);
  SamplingOptions so;
  so.rho_floor = cfg.method_options.rho_floor;
  switch (method) {
    case IndexMethod::wlsm:
      return index_wlsm(F, ms, w, grid, cfg.wave, cfg.noise.level, so);
    case IndexMethod::lsm:
      return index_lsm(F, ms, grid, cfg.wave, cfg.noise.level, so);
    case IndexMethod::factorization:
      return index_factorization(F, ms, grid, cfg.wave, cfg.method_options.factorization_eps);
    case IndexMethod::music:
      return index_music(F, ms, grid, cfg.wave, cfg.method_options.music_rank);
  }
  throw std::logic_error("unhandled index method");
}

std::string resolve_out_dir(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return (fs::path("out") / cfg.name).string();
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.diagnose) throw std::invalid_argument("run_experiment: config is a diagnose config");
  if (opt.threads > 0) set_thread_count(opt.threads);
  const auto t_all = std::chrono::steady_clock::now();
  RunResult res;
  const fs::path out = resolve_out_dir(cfg, opt);
  fs::create_directories(out);
  res.out_dir = out.string();
  const std::uint64_t seed = opt.seed.value_or(cfg.noise.seed);
  json timings;

  auto t0 = std::chrono::steady_clock::now();
  res.far_field = simulate_far_field(cfg, seed);
  timings["far_field"] = seconds_since(t0);
  emit(out, "far_field.txt", res.outputs, [&](std::ostream& os) { write_far_field(os, res.far_field); });

  const bool need_weights = std::find(cfg.methods.begin(), cfg.methods.end(), IndexMethod::wlsm) != cfg.methods.end();
  const std::string key = weight_key(cfg);
  t0 = std::chrono::steady_clock::now();
  if (need_weights) {
    const fs::path cdir = cache_dir_for(opt, out);
    const fs::path cfile = cdir / (sanitize(key) + ".txt");
    if (std::ifstream in(cfile, std::ios::binary); in) {
      try {
        std::string stored;
        WeightVector w = read_weights(in, &stored);
        if (stored == key && w.size() == cfg.aperture.n_points) {
          res.weights = std::move(w);
          res.weights_from_cache = true;
        }
      } catch (const std::exception&) {
        // unreadable cache entry: recompute and overwrite
      }
    }
    if (!res.weights_from_cache) {
      res.weights = compute_weights(cfg);
      fs::create_directories(cdir);
      auto os = open_out(cfile);
      write_weights(os, res.weights, key);
    }
    emit(out, "weights.txt", res.outputs, [&](std::ostream& os) { write_weights(os, res.weights, key); });
  }
  timings["weights"] = seconds_since(t0);

  const SamplingGrid grid = cfg.sampling_grid();
  for (IndexMethod m : cfg.methods) {
    t0 = std::chrono::steady_clock::now();
    IndexField f = compute_index(cfg, m, res.far_field, res.weights, grid);
    MethodSummary s;
    s.method = m;
    s.seconds = seconds_since(t0);
    s.flat = f.flat;
    s.contrast = inside_outside_contrast(f, cfg.geometry);
    const int am = f.argmax();
    if (am >= 0) {
      s.argmax = grid.points[am];
      s.argmax_inside = cfg.geometry.inside(s.argmax);
    }
    const std::string stem = "index_" + to_string(m);
    emit(out, stem + ".csv", res.outputs, [&](std::ostream& os) { write_index_csv(os, f); });
    emit(out, stem + "_record.txt", res.outputs, [&](std::ostream& os) { write_regularization_record(os, f); });
    if (cfg.write_pgm && cfg.dimension == 2)
      emit(out, stem + ".pgm", res.outputs, [&](std::ostream& os) { write_index_pgm(os, f); });
    timings[to_string(m)] = s.seconds;
    res.summary.push_back(s);
    res.fields.push_back(std::move(f));
  }

  emit(out, "summary.csv", res.outputs, [&](std::ostream& os) {
    os << "method,contrast,argmax_x,argmax_y,argmax_z,argmax_inside,flat\n";
    for (const auto& s : res.summary)
      os << to_string(s.method) << ',' << g17(s.contrast) << ',' << g17(s.argmax.x()) << ',' << g17(s.argmax.y())
         << ',' << g17(s.argmax.z()) << ',' << (s.argmax_inside ? 1 : 0) << ',' << (s.flat ? 1 : 0) << '\n';
  });

  json m = manifest_base(cfg, seed);
  m["forward_model"] = cfg.forward.model;
  m["weights"] = need_weights ? json{{"key", key},
                                     {"method", to_string(res.weights.method)},
                                     {"M", res.weights.M},
                                     {"sum", g17(res.weights.sum().real())},
                                     {"condition", g17(res.weights.condition)},
                                     {"truncated_modes", res.weights.truncated_modes},
                                     {"from_cache", res.weights_from_cache}}
                              : json(nullptr);
  timings["total"] = seconds_since(t_all);
  m["timings_seconds"] = timings;
  write_manifest(out, m, res.outputs);

  if (opt.log) {
    auto& os = *opt.log;
    os << cfg.name << ": k=" << cfg.wave.k << " n_points=" << cfg.aperture.n_points << " alpha=" << cfg.aperture.alpha
       << " noise=" << cfg.noise.level << " seed=" << seed << " model=" << cfg.forward.model << "\n";
    os << std::left << std::setw(15) << "method" << std::setw(14) << "contrast" << std::setw(26) << "argmax"
       << "inside\n";
    for (const auto& s : res.summary) {
      std::ostringstream am;
      am << std::fixed << std::setprecision(3) << "(" << s.argmax.x() << ", " << s.argmax.y();
      if (cfg.dimension == 3) am << ", " << s.argmax.z();
      am << ")";
      std::ostringstream c;
      c << std::setprecision(5) << s.contrast;
      os << std::left << std::setw(15) << to_string(s.method) << std::setw(14) << c.str() << std::setw(26)
         << am.str() << (s.argmax_inside ? "yes" : "no") << (s.flat ? " (flat)" : "") << "\n";
    }
    os << "wrote " << res.outputs.size() << " files to " << res.out_dir << "\n";
  }
  return res;
}

std::vector<std::string> run_diagnose(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (!cfg.diagnose) throw std::invalid_argument("run_diagnose: config has no diagnose section");
  if (opt.threads > 0) set_thread_count(opt.threads);
  const DiagnoseOptions& d = *cfg.diagnose;
  const fs::path out = resolve_out_dir(cfg, opt);
  fs::create_directories(out);
  std::vector<std::string> outputs;
  json timings;

  if (d.kernel) {
    const auto t0 = std::chrono::steady_clock::now();
    const KernelDiagnostic& kd = *d.kernel;
    const WaveConfig wave{2, kd.k};
    const SamplingGrid grid = make_grid(2, kd.grid.lo, kd.grid.hi, kd.grid.resolution);
    std::vector<std::array<double, 4>> rows;  // n, rms(K_w - J0), rms(K/N - J0), max|K_w - J0|
    for (int n : kd.n_points) {
      const ApertureSpec spec = sweep_aperture(kd.alpha, n);
      const MeasurementSet ms = measurement_points(spec);
      const WeightVector w = weights_for(kd.weights, spec, wave, kd.grid);
      double e_w = 0.0, e_u = 0.0, e_max = 0.0;
      emit(out, "kernel_n" + std::to_string(n) + ".csv", outputs, [&](std::ostream& os) {
        os << "x,y,kw_re,kw_im,k_mean_re,k_mean_im,full\n";
        for (const auto& x : grid.points) {
          const cplx kw = kernel_Kw(ms, wave, w, x, kd.z);
          const cplx ku = kernel_K(ms, wave, x, kd.z) / static_cast<double>(n);
          const double full = reference_kernel(wave, (x - kd.z).norm());
          e_w += std::norm(kw - full);
          e_u += std::norm(ku - full);
          e_max = std::max(e_max, std::abs(kw - full));
          os << g17(x.x()) << ',' << g17(x.y()) << ',' << g17(kw.real()) << ',' << g17(kw.imag()) << ','
             << g17(ku.real()) << ',' << g17(ku.imag()) << ',' << g17(full) << '\n';
        }
      });
      rows.push_back({double(n), std::sqrt(e_w / grid.size()), std::sqrt(e_u / grid.size()), e_max});
    }
    emit(out, "kernel_summary.csv", outputs, [&](std::ostream& os) {
      os << "n_points,rms_weighted_error,rms_unweighted_error,max_weighted_error\n";
      for (const auto& r : rows)
        os << int(r[0]) << ',' << g17(r[1]) << ',' << g17(r[2]) << ',' << g17(r[3]) << '\n';
    });
    timings["kernel"] = seconds_since(t0);
  }

  for (const NormSweep& s : d.norm_sweeps) {
    const auto t0 = std::chrono::steady_clock::now();
    const WaveConfig wave{2, s.k};
    InclusionGeometry disk;
    disk.shapes.push_back({Disk{Point::Zero(), s.disk_radius}, 1.0});
    emit(out, "norms_" + s.name + ".csv", outputs, [&](std::ostream& os) {
      // uniformity = weighted / (unweighted * N_y / sqrt(sum w)); 1 for constant weights
      os << "alpha,n_points,k,noise,inv_norm,weighted_inv_norm,sigma_min_ratio,weighted_sigma_min_ratio,"
            "weight_sum,uniformity\n";
      for (double a : s.alpha)
        for (int n : s.n_points) {
          const ApertureSpec spec = sweep_aperture(a, n);
          const WeightVector w = weights_for(s.weights, spec, wave, GridOptions{});
          const FarFieldMatrix F0 = far_field_born(disk, wave, spec);
          for (double lvl : s.noise_levels) {
            const FarFieldMatrix F = add_noise(F0, lvl, s.seed);
            const StabilityNorms r = stability_norms(F.entries, w);
            const double sw = std::abs(w.sum());
            const double uni = r.weighted_inv_norm / (r.inv_norm * n / std::sqrt(sw));
            os << g17(a) << ',' << n << ',' << g17(s.k) << ',' << g17(lvl) << ',' << g17(r.inv_norm) << ','
               << g17(r.weighted_inv_norm) << ',' << g17(r.sigma_min_ratio) << ','
               << g17(r.weighted_sigma_min_ratio) << ',' << g17(sw) << ',' << g17(uni) << '\n';
          }
        }
    });
    timings["norms_" + s.name] = seconds_since(t0);
  }

  if (d.concentration) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& c = *d.concentration;
    const auto rows = concentration_ratio(c.delta, c.r, c.N, WaveConfig{2, c.k});
    emit(out, "concentration.csv", outputs, [&](std::ostream& os) {
      os << "N,inner_mean,outer_mean,ratio\n";
      for (const auto& r : rows)
        os << r.N << ',' << g17(r.inner_mean) << ',' << g17(r.outer_mean) << ',' << g17(r.ratio) << '\n';
    });
    timings["concentration"] = seconds_since(t0);
  }

  json m = manifest_base(cfg, 0);
  m["timings_seconds"] = timings;
  write_manifest(out, m, outputs);
  if (opt.log) *opt.log << cfg.name << ": wrote " << outputs.size() << " files to " << out.string() << "\n";
  return outputs;
}

ReplayReport replay_manifest(const std::string& manifest_path, RunOptions opt) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw ConfigError(manifest_path, 0, 0, "cannot open manifest");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(manifest_path, 0, 0, std::string("manifest is not valid JSON: ") + e.what());
  }
  for (const char* k : {"format", "config_text", "seed", "threads", "outputs"})
    if (!m.contains(k)) throw ConfigError(manifest_path, 0, 0, std::string("manifest lacks '") + k + "'");
  if (m["format"] != "wlsm-manifest-v1") throw ConfigError(manifest_path, 0, 0, "unsupported manifest format");

  const ExperimentConfig cfg = parse_config(m["config_text"].get<std::string>(), manifest_path + "#config_text");
  const fs::path base = fs::path(manifest_path).parent_path();
  if (opt.out_dir.empty()) opt.out_dir = (base / "replay").string();
  if (opt.threads <= 0) opt.threads = m["threads"].get<int>();
  if (!cfg.diagnose) {
    opt.seed = m["seed"].get<std::uint64_t>();
    run_experiment(cfg, opt);
  } else {
    run_diagnose(cfg, opt);
  }

  ReplayReport rep;
  for (const auto& f : m["outputs"]) {
    const std::string name = f["file"].get<std::string>();
    const std::string h = file_fnv1a64((fs::path(opt.out_dir) / name).string());
    if (h.empty())
      rep.missing.push_back(name);
    else if (h != f["fnv1a64"].get<std::string>())
      rep.mismatched.push_back(name);
  }
  return rep;
}

}  // namespace wlsm::runner
