#include "wlsm/runner/config.hpp"

#include "wlsm/io.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

namespace wlsm::runner {

namespace {

std::string locate(const std::string& origin, int line, int column) {
  std::ostringstream os;
  os << origin;
  if (line > 0) os << ":" << line << ":" << column;
  return os.str();
}

class Reader;

[[noreturn]] void fail_at(const std::string& origin, const YAML::Node& n, const std::string& msg) {
  const YAML::Mark m = n.IsDefined() ? n.Mark() : YAML::Mark::null_mark();
  if (m.is_null()) throw ConfigError(origin, 0, 0, msg);
  throw ConfigError(origin, m.line + 1, m.column + 1, msg);
}

// A mapping whose keys are checked against an allow-list up front.
class Reader {
 public:
  Reader(const std::string& origin, const YAML::Node& node, std::string path, std::set<std::string> allowed)
      : origin_(origin), node_(node), path_(std::move(path)) {
    if (!node.IsMap()) fail(node, "'" + path_ + "' must be a mapping");
    std::set<std::string> seen;
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        fail(kv.first, "unknown key '" + qualified(key) + "' (allowed: " + list + ")");
      }
      if (!seen.insert(key).second) fail(kv.first, "duplicate key '" + qualified(key) + "'");
    }
  }

  const std::string& origin() const { return origin_; }
  const YAML::Node& node() const { return node_; }
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }
  YAML::Node at(const std::string& key) const { return node_[key]; }

  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const { fail_at(origin_, n, msg); }

  YAML::Node required(const std::string& key) const {
    YAML::Node n = node_[key];
    if (!n) fail(node_, "missing required key '" + qualified(key) + "'");
    return n;
  }

  std::string scalar(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(n, "'" + qualified(key) + "' must be a scalar");
    return n.Scalar();
  }

  double number(const YAML::Node& n, const std::string& key) const {
    const std::string s = scalar(n, key);
    try {
      const double v = parse_double(s, qualified(key));
      if (!std::isfinite(v)) fail(n, "'" + qualified(key) + "' must be finite");
      return v;
    } catch (const std::runtime_error&) {
      fail(n, "'" + qualified(key) + "' must be a number, got '" + s + "'");
    }
  }

  double number(const std::string& key, double fallback) const {
    return has(key) ? number(at(key), key) : fallback;
  }
  double number(const std::string& key) const { return number(required(key), key); }

  double angle(const YAML::Node& n, const std::string& key) const {
    const auto v = parse_angle(scalar(n, key));
    if (!v) fail(n, "'" + qualified(key) + "' must be a number or a multiple of pi such as pi/3");
    return *v;
  }
  double angle(const std::string& key, double fallback) const { return has(key) ? angle(at(key), key) : fallback; }

  long long integer(const YAML::Node& n, const std::string& key) const {
    const std::string s = scalar(n, key);
    size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) fail(n, "'" + qualified(key) + "' must be an integer, got '" + s + "'");
    return v;
  }
  long long integer(const std::string& key, long long fallback) const {
    return has(key) ? integer(at(key), key) : fallback;
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string s = scalar(at(key), key);
    size_t pos = 0;
    std::uint64_t v = 0;
    try {
      if (!s.empty() && s[0] != '-') v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) fail(at(key), "'" + qualified(key) + "' must be a non-negative integer");
    return v;
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? scalar(at(key), key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string s = scalar(at(key), key);
    if (s == "true") return true;
    if (s == "false") return false;
    fail(at(key), "'" + qualified(key) + "' must be true or false");
  }

  // Point with exactly `dim` coordinates; unused trailing coordinates stay 0.
  Point point(const YAML::Node& n, const std::string& key, int dim) const {
    if (!n.IsSequence() || static_cast<int>(n.size()) != dim)
      fail(n, "'" + qualified(key) + "' must be a list of " + std::to_string(dim) + " numbers");
    Point p = Point::Zero();
    for (int a = 0; a < dim; ++a) p[a] = number(n[a], key);
    return p;
  }
  Point point(const std::string& key, int dim) const { return point(required(key), key, dim); }

  template <class T, class F>
  std::vector<T> scalar_or_list(const std::string& key, F&& item) const {
    const YAML::Node n = required(key);
    std::vector<T> out;
    if (n.IsSequence()) {
      if (n.size() == 0) fail(n, "'" + qualified(key) + "' must not be empty");
      for (const auto& e : n) out.push_back(item(e));
    } else {
      out.push_back(item(n));
    }
    return out;
  }

 private:
  std::string origin_;
  YAML::Node node_;
  std::string path_;
};

template <class Enum, class F>
Enum parse_enum(const Reader& r, const std::string& key, const std::string& s, F&& from) {
  try {
    return from(s);
  } catch (const std::exception&) {
    r.fail(r.at(key), "'" + r.qualified(key) + "' has unknown value '" + s + "'");
  }
}

void require(bool ok, const Reader& r, const YAML::Node& n, const std::string& msg) {
  if (!ok) r.fail(n.IsDefined() ? n : r.node(), msg);
}

GridOptions parse_grid(const Reader& parent, const std::string& key, int dim) {
  Reader r(parent.origin(), parent.required(key), parent.qualified(key), {"lo", "hi", "resolution"});
  GridOptions g;
  g.lo = r.point("lo", dim);
  g.hi = r.point("hi", dim);
  for (int a = 0; a < dim; ++a)
    require(g.lo[a] < g.hi[a], r, r.at("hi"), "'" + r.qualified("hi") + "' must exceed lo on every axis");
  const YAML::Node res = r.required("resolution");
  g.resolution = {1, 1, 1};
  if (res.IsSequence()) {
    require(static_cast<int>(res.size()) == dim, r, res,
            "'" + r.qualified("resolution") + "' must be one integer or a list of " + std::to_string(dim));
    for (int a = 0; a < dim; ++a) g.resolution[a] = static_cast<int>(r.integer(res[a], "resolution"));
  } else {
    const int n = static_cast<int>(r.integer(res, "resolution"));
    for (int a = 0; a < dim; ++a) g.resolution[a] = n;
  }
  for (int a = 0; a < dim; ++a)
    require(g.resolution[a] >= 2 && g.resolution[a] <= 2001, r, res,
            "'" + r.qualified("resolution") + "' must lie in [2, 2001]");
  return g;
}

WeightOptions parse_weights(const Reader& parent, const std::string& key, int dim, int n_points) {
  WeightOptions w;
  w.method = dim == 2 ? WeightMethod::normal_eq_2d : WeightMethod::normal_eq_3d;
  if (!parent.has(key)) return w;
  Reader r(parent.origin(), parent.at(key), parent.qualified(key),
           {"method", "M", "R", "assembly", "tsvd_rank", "tsvd_resolution"});
  if (r.has("method"))
    w.method = parse_enum<WeightMethod>(r, "method", r.string("method", ""), weight_method_from_string);
  w.M = static_cast<int>(r.integer("M", -1));
  w.R = r.number("R", 1.0);
  if (r.has("assembly"))
    w.assembly = parse_enum<NormalAssembly>(r, "assembly", r.string("assembly", ""), normal_assembly_from_string);
  w.tsvd_rank = static_cast<int>(r.integer("tsvd_rank", 16));
  w.tsvd_resolution = static_cast<int>(r.integer("tsvd_resolution", 41));

  const YAML::Node mnode = r.has("method") ? r.at("method") : r.node();
  require(w.M >= -1, r, r.at("M"), "'" + r.qualified("M") + "' must be -1 (default) or non-negative");
  require(w.R > 0.0, r, r.at("R"), "'" + r.qualified("R") + "' must be positive");
  require(w.tsvd_rank >= 1, r, r.at("tsvd_rank"), "'" + r.qualified("tsvd_rank") + "' must be positive");
  require(w.tsvd_resolution >= 2, r, r.at("tsvd_resolution"),
          "'" + r.qualified("tsvd_resolution") + "' must be at least 2");
  switch (w.method) {
    case WeightMethod::vandermonde:
      require(dim == 2, r, mnode, "vandermonde weights are 2D only");
      require(n_points % 2 == 1, r, mnode, "vandermonde weights need an odd number of measurement points");
      break;
    case WeightMethod::normal_eq_2d:
      require(dim == 2, r, mnode, "normal_eq_2d weights need dimension 2");
      require(w.M <= 64, r, r.at("M"), "'" + r.qualified("M") + "' is limited to 64");
      break;
    case WeightMethod::normal_eq_3d:
      require(dim == 3, r, mnode, "normal_eq_3d weights need dimension 3");
      require(w.M <= 6, r, r.at("M"), "'" + r.qualified("M") + "' is limited to 6 in 3D");
      break;
    default:
      break;
  }
  return w;
}

Shape parse_shape(const Reader& parent, const YAML::Node& n, int index, int dim) {
  const std::string path = parent.qualified("geometry") + "[" + std::to_string(index) + "]";
  if (!n.IsMap() || !n["type"]) fail_at(parent.origin(), n, "'" + path + "' must be a mapping with a 'type'");
  const std::string type = n["type"].IsScalar() ? n["type"].Scalar() : "";
  static const std::map<std::string, std::set<std::string>> keys = {
      {"disk", {"type", "center", "radius", "q"}},        {"box", {"type", "lo", "hi", "q"}},
      {"ellipse", {"type", "center", "a", "b", "rotation", "q"}},
      {"kite", {"type", "center", "scale", "x_coeff", "q"}}, {"ball", {"type", "center", "radius", "q"}},
      {"box3", {"type", "lo", "hi", "q"}}};
  const auto it = keys.find(type);
  if (it == keys.end())
    fail_at(parent.origin(), n["type"], "'" + path + ".type' must be one of disk, box, ellipse, kite, ball, box3");
  Reader r(parent.origin(), n, path, it->second);
  const int need = (type == "ball" || type == "box3") ? 3 : 2;
  require(need == dim, r, r.at("type"),
          "'" + path + "' is a " + std::to_string(need) + "D shape in a " + std::to_string(dim) + "D config");
  Shape s;
  s.q = r.number("q", 1.0);
  auto positive = [&](const std::string& key) {
    const double v = r.number(key);
    require(v > 0.0, r, r.at(key), "'" + r.qualified(key) + "' must be positive");
    return v;
  };
  if (type == "disk") {
    s.primitive = Disk{r.point("center", 2), positive("radius")};
  } else if (type == "ball") {
    s.primitive = Ball{r.point("center", 3), positive("radius")};
  } else if (type == "ellipse") {
    const Point c = r.point("center", 2);
    const double a = positive("a"), b = positive("b");
    s.primitive = Ellipse{c, a, b, r.angle("rotation", 0.0)};
  } else if (type == "kite") {
    const Point c = r.point("center", 2);
    const double sc = positive("scale");
    s.primitive = Kite{c, sc, r.has("x_coeff") ? positive("x_coeff") : 1.5};
  } else {
    const Point lo = r.point("lo", need), hi = r.point("hi", need);
    for (int a = 0; a < need; ++a) require(lo[a] < hi[a], r, r.at("hi"), "'" + path + ".hi' must exceed lo");
    if (type == "box")
      s.primitive = Box2{lo, hi};
    else
      s.primitive = Box3{lo, hi};
  }
  return s;
}

KernelDiagnostic parse_kernel(const Reader& parent) {
  Reader r(parent.origin(), parent.at("kernel"), parent.qualified("kernel"),
           {"k", "alpha", "z", "n_points", "grid", "weights"});
  KernelDiagnostic d;
  d.k = r.number("k");
  require(d.k > 0.0, r, r.at("k"), "'" + r.qualified("k") + "' must be positive");
  d.alpha = r.angle("alpha", d.alpha);
  require(d.alpha > 0.0 && d.alpha <= std::numbers::pi + 1e-15, r, r.at("alpha"),
          "'" + r.qualified("alpha") + "' must lie in (0, pi]");
  d.z = r.point("z", 2);
  d.n_points = r.scalar_or_list<int>("n_points", [&](const YAML::Node& e) {
    const int n = static_cast<int>(r.integer(e, "n_points"));
    require(n >= 3, r, e, "'" + r.qualified("n_points") + "' entries must be at least 3");
    return n;
  });
  if (r.has("grid")) d.grid = parse_grid(r, "grid", 2);
  int nmax = 3;
  for (int n : d.n_points) nmax = std::max(nmax, n);
  d.weights = parse_weights(r, "weights", 2, nmax);
  if (d.weights.method == WeightMethod::vandermonde)
    for (int n : d.n_points) require(n % 2 == 1, r, r.at("n_points"), "vandermonde weights need odd n_points");
  return d;
}

NormSweep parse_sweep(const Reader& parent, const YAML::Node& n, int index) {
  const std::string path = parent.qualified("norm_sweeps") + "[" + std::to_string(index) + "]";
  Reader r(parent.origin(), n, path,
           {"name", "k", "alpha", "n_points", "disk_radius", "noise_levels", "seed", "weights"});
  NormSweep s;
  s.name = r.string("name", "sweep" + std::to_string(index));
  s.k = r.number("k");
  require(s.k > 0.0, r, r.at("k"), "'" + r.qualified("k") + "' must be positive");
  s.alpha = r.scalar_or_list<double>("alpha", [&](const YAML::Node& e) {
    const double a = r.angle(e, "alpha");
    require(a > 0.0 && a <= std::numbers::pi + 1e-15, r, e, "'" + r.qualified("alpha") + "' must lie in (0, pi]");
    return a;
  });
  s.n_points = r.scalar_or_list<int>("n_points", [&](const YAML::Node& e) {
    const int v = static_cast<int>(r.integer(e, "n_points"));
    require(v >= 3, r, e, "'" + r.qualified("n_points") + "' entries must be at least 3");
    return v;
  });
  s.disk_radius = r.number("disk_radius", 0.5);
  require(s.disk_radius > 0.0, r, r.at("disk_radius"), "'" + r.qualified("disk_radius") + "' must be positive");
  if (r.has("noise_levels"))
    s.noise_levels = r.scalar_or_list<double>("noise_levels", [&](const YAML::Node& e) {
      const double v = r.number(e, "noise_levels");
      require(v >= 0.0, r, e, "'" + r.qualified("noise_levels") + "' must be non-negative");
      return v;
    });
  s.seed = r.unsigned64("seed", 1);
  int nmax = 3;
  for (int v : s.n_points) nmax = std::max(nmax, v);
  s.weights = parse_weights(r, "weights", 2, nmax);
  return s;
}

ConcentrationDiagnostic parse_concentration(const Reader& parent) {
  Reader r(parent.origin(), parent.at("concentration"), parent.qualified("concentration"), {"k", "delta", "r", "N"});
  ConcentrationDiagnostic c;
  c.k = r.number("k", c.k);
  c.delta = r.number("delta", c.delta);
  c.r = r.number("r", c.r);
  require(c.k > 0.0 && c.delta > 0.0, r, r.node(), "'" + r.qualified("k") + "' and delta must be positive");
  require(c.k * c.delta < std::numbers::pi / 2, r, r.at("delta"), "concentration needs k*delta < pi/2");
  require(c.r >= c.delta, r, r.at("r"), "'" + r.qualified("r") + "' must be at least delta");
  if (r.has("N"))
    c.N = r.scalar_or_list<int>("N", [&](const YAML::Node& e) {
      const int v = static_cast<int>(r.integer(e, "N"));
      require(v >= 1 && v <= 200, r, e, "'" + r.qualified("N") + "' entries must lie in [1, 200]");
      return v;
    });
  return c;
}

ExperimentConfig build(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin, e.mark.is_null() ? 0 : e.mark.line + 1, e.mark.is_null() ? 0 : e.mark.column + 1,
                      e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError(origin, 0, 0, "config is empty");
  Reader top(origin, root, "",
             {"name", "mode", "dimension", "wave", "aperture", "geometry", "grid", "forward", "noise", "weights",
              "methods", "method_options", "output", "diagnose"});

  ExperimentConfig c;
  c.origin = origin;
  c.text = text;
  c.name = top.string("name", "");
  if (c.name.empty()) top.fail(top.node(), "missing required key 'name'");
  if (!std::regex_match(c.name, std::regex("[A-Za-z0-9_.-]+")))
    top.fail(top.at("name"), "'name' may contain only letters, digits, '_', '.', '-'");
  const std::string mode = top.string("mode", "run");
  require(mode == "run" || mode == "diagnose", top, top.at("mode"), "'mode' must be run or diagnose");

  if (top.has("output")) {
    Reader o(origin, top.at("output"), "output", {"dir", "pgm"});
    c.output_dir = o.string("dir", "");
    c.write_pgm = o.boolean("pgm", true);
  }

  if (mode == "diagnose") {
    for (const char* k : {"wave", "aperture", "geometry", "grid", "forward", "noise", "weights", "methods",
                          "method_options"})
      if (top.has(k)) top.fail(top.at(k), std::string("'") + k + "' is not used by diagnose configs");
    Reader d(origin, top.required("diagnose"), "diagnose", {"kernel", "norm_sweeps", "concentration"});
    DiagnoseOptions opt;
    if (d.has("kernel")) opt.kernel = parse_kernel(d);
    if (d.has("norm_sweeps")) {
      const YAML::Node n = d.at("norm_sweeps");
      require(n.IsSequence(), d, n, "'diagnose.norm_sweeps' must be a list");
      for (size_t i = 0; i < n.size(); ++i) opt.norm_sweeps.push_back(parse_sweep(d, n[i], static_cast<int>(i)));
    }
    if (d.has("concentration")) opt.concentration = parse_concentration(d);
    require(opt.kernel || !opt.norm_sweeps.empty() || opt.concentration, d, d.node(),
            "'diagnose' needs at least one of kernel, norm_sweeps, concentration");
    c.diagnose = std::move(opt);
    return c;
  }
  if (top.has("diagnose")) top.fail(top.at("diagnose"), "'diagnose' requires mode: diagnose");

  c.dimension = static_cast<int>(top.integer("dimension", 2));
  require(c.dimension == 2 || c.dimension == 3, top, top.at("dimension"), "'dimension' must be 2 or 3");
  const int dim = c.dimension;

  {
    Reader w(origin, top.required("wave"), "wave", {"k"});
    c.wave = WaveConfig{dim, w.number("k")};
    require(c.wave.k > 0.0, w, w.at("k"), "'wave.k' must be positive");
  }
  {
    Reader a(origin, top.required("aperture"), "aperture", {"alpha", "beta", "n_points", "layout", "n_rings"});
    c.aperture.dimension = dim;
    c.aperture.alpha = a.angle("alpha", std::numbers::pi);
    c.aperture.beta = a.angle("beta", std::numbers::pi);
    if (!a.has("n_points")) a.fail(a.node(), "missing required key 'aperture.n_points'");
    c.aperture.n_points = static_cast<int>(a.integer("n_points", 0));
    const std::string layout = a.string("layout", "automatic");
    if (layout == "automatic")
      c.aperture.layout = Layout::automatic;
    else if (layout == "closed")
      c.aperture.layout = Layout::closed;
    else if (layout == "periodic")
      c.aperture.layout = Layout::periodic;
    else
      a.fail(a.at("layout"), "'aperture.layout' must be automatic, closed or periodic");
    c.aperture.n_rings = static_cast<int>(a.integer("n_rings", 0));
    require(dim == 3 || !a.has("beta"), a, a.at("beta"), "'aperture.beta' applies to 3D configs only");
    require(dim == 3 || !a.has("n_rings"), a, a.at("n_rings"), "'aperture.n_rings' applies to 3D configs only");
    require(c.aperture.n_points <= 4096, a, a.at("n_points"), "'aperture.n_points' is limited to 4096");
    try {
      c.aperture.validate();
      measurement_points(c.aperture);
    } catch (const std::invalid_argument& e) {
      a.fail(a.node(), std::string("invalid aperture: ") + e.what());
    }
  }
  {
    const YAML::Node g = top.required("geometry");
    require(g.IsSequence(), top, g, "'geometry' must be a list (possibly empty)");
    for (size_t i = 0; i < g.size(); ++i) c.geometry.shapes.push_back(parse_shape(top, g[i], static_cast<int>(i), dim));
  }
  c.grid = parse_grid(top, "grid", dim);
  if (top.has("forward")) {
    Reader f(origin, top.at("forward"), "forward", {"model", "h", "quad_h"});
    c.forward.model = f.string("model", "born");
    require(c.forward.model == "born" || c.forward.model == "exact", f, f.at("model"),
            "'forward.model' must be born or exact");
    c.forward.h = f.number("h", c.forward.h);
    c.forward.quad_h = f.number("quad_h", 0.0);
    require(c.forward.h > 0.0, f, f.at("h"), "'forward.h' must be positive");
    require(c.forward.quad_h >= 0.0, f, f.at("quad_h"), "'forward.quad_h' must be non-negative");
  }
  if (top.has("noise")) {
    Reader n(origin, top.at("noise"), "noise", {"level", "seed"});
    c.noise.level = n.number("level", 0.0);
    c.noise.seed = n.unsigned64("seed", 1);
    require(c.noise.level >= 0.0, n, n.at("level"), "'noise.level' must be non-negative");
  }
  c.weights = parse_weights(top, "weights", dim, c.aperture.n_points);
  if (top.has("methods")) {
    const YAML::Node m = top.at("methods");
    require(m.IsSequence() && m.size() > 0, top, m, "'methods' must be a non-empty list");
    c.methods.clear();
    for (const auto& e : m) {
      const std::string s = top.scalar(e, "methods");
      IndexMethod im;
      try {
        im = index_method_from_string(s);
      } catch (const std::exception&) {
        top.fail(e, "'methods' entry '" + s + "' must be one of wlsm, lsm, factorization, music");
      }
      for (auto prev : c.methods) require(prev != im, top, e, "'methods' lists '" + s + "' twice");
      c.methods.push_back(im);
    }
  }
  if (top.has("method_options")) {
    Reader m(origin, top.at("method_options"), "method_options", {"music_rank", "factorization_eps", "rho_floor"});
    c.method_options.music_rank = static_cast<int>(m.integer("music_rank", -1));
    c.method_options.factorization_eps = m.number("factorization_eps", 1e-8);
    c.method_options.rho_floor = m.number("rho_floor", 1e-6);
    require(c.method_options.music_rank >= -1 && c.method_options.music_rank < c.aperture.n_points, m,
            m.at("music_rank"), "'method_options.music_rank' must be -1 or in [0, n_points)");
    require(c.method_options.factorization_eps > 0.0 && c.method_options.factorization_eps <= 1.0, m,
            m.at("factorization_eps"), "'method_options.factorization_eps' must lie in (0, 1]");
    require(c.method_options.rho_floor > 0.0, m, m.at("rho_floor"), "'method_options.rho_floor' must be positive");
  }
  return c;
}

}  // namespace

ConfigError::ConfigError(const std::string& origin, int line, int column, const std::string& msg)
    : std::runtime_error(locate(origin, line, column) + ": " + msg), line_(line), column_(column) {}

std::optional<double> parse_angle(const std::string& s) {
  try {
    return parse_double(s, "angle");
  } catch (const std::runtime_error&) {
  }
  static const std::regex re(R"(^\s*(?:([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\*?\s*)?pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) return std::nullopt;
  double v = std::numbers::pi;
  if (m[1].matched) v *= std::stod(m[1].str());
  if (m[2].matched) {
    const double d = std::stod(m[2].str());
    if (d == 0.0) return std::nullopt;
    v /= d;
  }
  return v;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) { return build(text, origin); }

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, 0, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return build(ss.str(), path);
}

SamplingGrid ExperimentConfig::sampling_grid() const {
  Point lo = grid.lo, hi = grid.hi;
  if (dimension == 2) lo.z() = hi.z() = 0.0;
  return make_grid(dimension, lo, hi, grid.resolution);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace wlsm::runner
