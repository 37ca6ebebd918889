#include "wlsm/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wlsm {

namespace {
constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<double> uniform(double a, int n, bool periodic) {
  std::vector<double> t(n);
  if (periodic) {
    const double d = 2.0 * kPi / n;
    for (int j = 0; j < n; ++j) t[j] = (2.0 * j - (n - 1)) * 0.5 * d;
  } else if (n == 1) {
    t[0] = 0.0;
  } else {
    // integer numerator keeps t[n-1-j] == -t[j] bit for bit
    for (int j = 0; j < n; ++j) t[j] = a * (2.0 * j - (n - 1)) / (n - 1);
  }
  return t;
}

bool polygon_even_odd(const std::vector<Eigen::Vector2d>& poly, double x, double y) {
  bool in = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > y) != (b.y() > y)) {
      const double xc = a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x < xc) in = !in;
    }
  }
  return in;
}
}  // namespace

void ApertureSpec::validate() const {
  if (dimension != 2 && dimension != 3) throw std::invalid_argument("aperture: dimension must be 2 or 3");
  if (!(alpha > 0.0 && alpha <= kPi + 1e-15)) throw std::invalid_argument("aperture: need 0 < alpha <= pi");
  if (dimension == 3 && !(beta > 0.0 && beta <= kPi + 1e-15))
    throw std::invalid_argument("aperture: need 0 < beta <= pi");
  if (n_points < 3) throw std::invalid_argument("aperture: need at least 3 measurement points");
  if (dimension == 3 && n_rings > 0 && n_points % n_rings != 0)
    throw std::invalid_argument("aperture: n_rings must divide n_points");
}

int default_ring_count(int n_points) {
  const double target = std::sqrt(0.5 * n_points);
  int best = 1;
  for (int r = 1; r <= n_points; ++r)
    if (n_points % r == 0 && std::abs(r - target) < std::abs(best - target)) best = r;
  return best;
}

MeasurementSet measurement_points(const ApertureSpec& spec) {
  spec.validate();
  MeasurementSet m;
  const int n = spec.n_points;
  if (spec.dimension == 2) {
    m.theta = uniform(spec.alpha, n, spec.layout == Layout::periodic);
    m.phi.assign(n, 0.0);
    for (double t : m.theta) m.directions.emplace_back(std::cos(t), std::sin(t), 0.0);
    m.per_ring = n;
    return m;
  }
  m.n_rings = spec.n_rings > 0 ? spec.n_rings : default_ring_count(n);
  m.per_ring = n / m.n_rings;
  const bool full = std::abs(spec.alpha - kPi) < 1e-12;
  const bool periodic = spec.layout == Layout::periodic || (spec.layout == Layout::automatic && full);
  const auto phis = uniform(spec.alpha, m.per_ring, periodic);
  for (int r = 0; r < m.n_rings; ++r) {
    const double th = spec.beta * (r + 0.5) / m.n_rings;
    for (double ph : phis) {
      m.theta.push_back(th);
      m.phi.push_back(ph);
      m.directions.emplace_back(std::cos(ph) * std::sin(th), std::sin(ph) * std::sin(th), std::cos(th));
    }
  }
  return m;
}

cplx WaveConfig::gamma() const {
  if (dimension == 2) return std::polar(1.0, 0.25 * kPi) / std::sqrt(8.0 * kPi * k);
  return {1.0 / (4.0 * kPi), 0.0};
}

Point kite_boundary(const Kite& k, double t) {
  return k.center + k.scale * Point(k.x_coeff * std::sin(t), std::cos(t) + 0.65 * std::cos(2.0 * t) - 0.65, 0.0);
}

std::vector<Eigen::Vector2d> kite_polygon(const Kite& k, int segments) {
  std::vector<Eigen::Vector2d> poly(segments);
  for (int i = 0; i < segments; ++i) {
    const Point p = kite_boundary(k, 2.0 * kPi * i / segments);
    poly[i] = p.head<2>();
  }
  return poly;
}

bool contains(const Primitive& p, const Point& z) {
  return std::visit(
      overloaded{
          [&](const Disk& d) { return (z.head<2>() - d.center.head<2>()).squaredNorm() <= d.radius * d.radius; },
          [&](const Box2& b) {
            return z.x() >= b.lo.x() && z.x() <= b.hi.x() && z.y() >= b.lo.y() && z.y() <= b.hi.y();
          },
          [&](const Ellipse& e) {
            const double c = std::cos(e.rotation), s = std::sin(e.rotation);
            const double dx = z.x() - e.center.x(), dy = z.y() - e.center.y();
            const double u = c * dx + s * dy, v = -s * dx + c * dy;
            return (u * u) / (e.a * e.a) + (v * v) / (e.b * e.b) <= 1.0;
          },
          [&](const Kite& k) {
            const double dx = z.x() - k.center.x(), dy = z.y() - k.center.y();
            if (std::abs(dx) > k.scale * std::abs(k.x_coeff) * 1.001 || dy > 1.001 * k.scale || dy < -2.0 * k.scale)
              return false;
            // membership is affine invariant, so test against the unit kite
            static const std::vector<Eigen::Vector2d> unit = kite_polygon(Kite{Point::Zero(), 1.0, 1.0});
            return polygon_even_odd(unit, dx / (k.scale * k.x_coeff), dy / k.scale);
          },
          [&](const Ball& b) { return (z - b.center).squaredNorm() <= b.radius * b.radius; },
          [&](const Box3& b) {
            return (z.array() >= b.lo.array()).all() && (z.array() <= b.hi.array()).all();
          }},
      p);
}

double shape_measure(const Primitive& p) {
  return std::visit(overloaded{[](const Disk& d) { return kPi * d.radius * d.radius; },
                               [](const Box2& b) { return (b.hi.x() - b.lo.x()) * (b.hi.y() - b.lo.y()); },
                               [](const Ellipse& e) { return kPi * e.a * e.b; },
                               [](const Kite& k) {
                                 // shoelace on the polygon
                                 const auto poly = kite_polygon(k, 4096);
                                 double a = 0.0;
                                 for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
                                   a += poly[j].x() * poly[i].y() - poly[i].x() * poly[j].y();
                                 return 0.5 * std::abs(a);
                               },
                               [](const Ball& b) { return 4.0 / 3.0 * kPi * std::pow(b.radius, 3); },
                               [](const Box3& b) { return (b.hi - b.lo).prod(); }},
                    p);
}

void bounding_box(const Primitive& p, Point& lo, Point& hi) {
  std::visit(overloaded{[&](const Disk& d) {
                          lo = d.center - Point(d.radius, d.radius, 0.0);
                          hi = d.center + Point(d.radius, d.radius, 0.0);
                        },
                        [&](const Box2& b) { lo = b.lo; hi = b.hi; lo.z() = hi.z() = 0.0; },
                        [&](const Ellipse& e) {
                          const double c = std::cos(e.rotation), s = std::sin(e.rotation);
                          const Point half(std::hypot(e.a * c, e.b * s), std::hypot(e.a * s, e.b * c), 0.0);
                          lo = e.center - half;
                          hi = e.center + half;
                        },
                        [&](const Kite& k) {
                          lo = k.center + k.scale * Point(-std::abs(k.x_coeff), -2.0, 0.0);
                          hi = k.center + k.scale * Point(std::abs(k.x_coeff), 1.0, 0.0);
                        },
                        [&](const Ball& b) {
                          lo = b.center - Point::Constant(b.radius);
                          hi = b.center + Point::Constant(b.radius);
                        },
                        [&](const Box3& b) { lo = b.lo; hi = b.hi; }},
             p);
}

int primitive_dimension(const Primitive& p) {
  return (std::holds_alternative<Ball>(p) || std::holds_alternative<Box3>(p)) ? 3 : 2;
}

std::string primitive_name(const Primitive& p) {
  static const char* names[] = {"disk", "box", "ellipse", "kite", "ball", "box3"};
  return names[p.index()];
}

double InclusionGeometry::contrast_at(const Point& z) const {
  for (const auto& s : shapes)
    if (contains(s.primitive, z)) return s.q;
  return 0.0;
}

bool InclusionGeometry::inside_dilated(const Point& z, double pad, int dimension) const {
  const int nz = dimension == 3 ? 1 : 0;
  for (int dz = -nz; dz <= nz; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (inside(z + pad * Point(dx, dy, dz))) return true;
  return false;
}

double SamplingGrid::spacing(int axis) const {
  if (resolution[axis] < 2) return 0.0;
  return (hi[axis] - lo[axis]) / (resolution[axis] - 1);
}

SamplingGrid make_grid(int dimension, const Point& lo, const Point& hi, int resolution) {
  return make_grid(dimension, lo, hi, {resolution, resolution, dimension == 3 ? resolution : 1});
}

SamplingGrid make_grid(int dimension, const Point& lo, const Point& hi, const std::array<int, 3>& res) {
  if (dimension != 2 && dimension != 3) throw std::invalid_argument("make_grid: dimension must be 2 or 3");
  SamplingGrid g;
  g.dimension = dimension;
  g.lo = lo;
  g.hi = hi;
  g.resolution = res;
  if (dimension == 2) {
    g.lo.z() = g.hi.z() = 0.0;
    g.resolution[2] = 1;
  }
  for (int a = 0; a < dimension; ++a) {
    if (g.resolution[a] < 2) throw std::invalid_argument("make_grid: resolution must be >= 2 per axis");
    if (!(hi[a] > lo[a])) throw std::invalid_argument("make_grid: degenerate bounds");
  }
  g.points.reserve(static_cast<size_t>(g.resolution[0]) * g.resolution[1] * g.resolution[2]);
  for (int k = 0; k < g.resolution[2]; ++k)
    for (int j = 0; j < g.resolution[1]; ++j)
      for (int i = 0; i < g.resolution[0]; ++i) {
        Point p = g.lo;
        p.x() += i * g.spacing(0);
        p.y() += j * g.spacing(1);
        if (dimension == 3) p.z() += k * g.spacing(2);
        if (i == g.resolution[0] - 1) p.x() = g.hi.x();
        if (j == g.resolution[1] - 1) p.y() = g.hi.y();
        if (dimension == 3 && k == g.resolution[2] - 1) p.z() = g.hi.z();
        g.points.push_back(p);
      }
  return g;
}

}  // namespace wlsm
