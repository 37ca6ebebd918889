#include "wlsm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wlsm {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double parse_double(const std::string& token, const std::string& what) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error(what + ": expected a number, got '" + token + "'");
  }
  if (pos != token.size()) throw std::runtime_error(what + ": trailing characters in '" + token + "'");
  return v;
}

void write_far_field(std::ostream& os, const FarFieldMatrix& F) {
  os << "# wlsm far-field v1\n";
  os << "dimension " << F.dimension << "\n";
  os << "k " << g17(F.k) << "\n";
  os << "alpha " << g17(F.alpha) << "\n";
  os << "beta " << g17(F.beta) << "\n";
  os << "n_points " << F.size() << "\n";
  os << "model " << F.provenance.model << "\n";
  os << "noise_level " << g17(F.provenance.noise_level) << "\n";
  os << "seed " << F.provenance.seed << "\n";
  os << "config_hash " << (F.provenance.config_hash.empty() ? "-" : F.provenance.config_hash) << "\n";
  os << "end_header\n";
  for (int i = 0; i < F.size(); ++i)
    for (int j = 0; j < F.size(); ++j)
      os << g17(F.entries(i, j).real()) << ' ' << g17(F.entries(i, j).imag()) << '\n';
}

FarFieldMatrix read_far_field(std::istream& is) {
  std::map<std::string, std::string> hdr;
  std::string line;
  bool ended = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "end_header") {
      ended = true;
      break;
    }
    std::istringstream ls(line);
    std::string key, val;
    ls >> key >> val;
    hdr[key] = val;
  }
  if (!ended) throw std::runtime_error("far-field file: missing end_header");
  for (const char* k : {"dimension", "k", "alpha", "beta", "n_points", "model", "noise_level", "seed"})
    if (!hdr.count(k)) throw std::runtime_error(std::string("far-field file: missing header key '") + k + "'");
  FarFieldMatrix F;
  F.dimension = std::stoi(hdr["dimension"]);
  F.k = parse_double(hdr["k"], "far-field k");
  F.alpha = parse_double(hdr["alpha"], "far-field alpha");
  F.beta = parse_double(hdr["beta"], "far-field beta");
  const int n = std::stoi(hdr["n_points"]);
  F.provenance.model = hdr["model"];
  F.provenance.noise_level = parse_double(hdr["noise_level"], "far-field noise_level");
  F.provenance.seed = std::stoull(hdr["seed"]);
  F.provenance.config_hash = hdr.count("config_hash") && hdr["config_hash"] != "-" ? hdr["config_hash"] : "";
  F.entries.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::string re, im;
      if (!(is >> re >> im)) throw std::runtime_error("far-field file: truncated data");
      F.entries(i, j) = {parse_double(re, "far-field entry"), parse_double(im, "far-field entry")};
    }
  return F;
}

void write_index_csv(std::ostream& os, const IndexField& f) {
  const bool three = f.grid.dimension == 3;
  os << (three ? "x,y,z,value\n" : "x,y,value\n");
  for (int i = 0; i < f.grid.size(); ++i) {
    const auto& p = f.grid.points[i];
    os << g17(p.x()) << ',' << g17(p.y()) << ',';
    if (three) os << g17(p.z()) << ',';
    os << g17(f.values[i]) << '\n';
  }
}

void write_index_pgm(std::ostream& os, const IndexField& f) {
  if (f.grid.dimension != 2) throw std::invalid_argument("write_index_pgm: 2D fields only");
  const int nx = f.grid.resolution[0], ny = f.grid.resolution[1];
  double mx = 0.0;
  for (double v : f.values)
    if (std::isfinite(v)) mx = std::max(mx, std::sqrt(std::max(v, 0.0)));
  os << "P5\n" << nx << ' ' << ny << "\n255\n";
  for (int j = ny - 1; j >= 0; --j)
    for (int i = 0; i < nx; ++i) {
      const double v = f.values[static_cast<size_t>(j) * nx + i];
      double s = mx > 0.0 && std::isfinite(v) ? std::sqrt(std::max(v, 0.0)) / mx : 0.0;
      os.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * std::clamp(s, 0.0, 1.0)))));
    }
}

void write_regularization_record(std::ostream& os, const IndexField& f) {
  const auto& r = f.record;
  os << "# wlsm regularization record v1\n";
  os << "method " << to_string(f.method) << "\n";
  os << "points " << f.grid.size() << "\n";
  os << "flat " << (f.flat ? 1 : 0) << "\n";
  os << "noise_ratio " << g17(r.noise_ratio) << "\n";
  os << "truncation_rank " << r.truncation_rank << "\n";
  os << "singular_values";
  for (int i = 0; i < r.singular_values.size(); ++i) os << ' ' << g17(r.singular_values[i]);
  os << "\n";
  for (const auto& n : r.notes) os << "note " << n << "\n";
  os << "end_header\n";
  if (r.tau.empty()) return;
  os << "# index tau discrepancy target flag\n";
  for (size_t i = 0; i < r.tau.size(); ++i)
    os << i << ' ' << g17(r.tau[i]) << ' ' << g17(r.discrepancy[i]) << ' ' << g17(r.target[i]) << ' ' << r.flag[i]
       << '\n';
}

}  // namespace wlsm
