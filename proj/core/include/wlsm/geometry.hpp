#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace wlsm {

using Point = Eigen::Vector3d;  // 2D problems keep z = 0
using cplx = std::complex<double>;

enum class Layout {
  automatic,  // 2D: closed; 3D: closed azimuths unless alpha == pi
  closed,     // uniform on [-alpha, alpha] including both endpoints
  periodic    // uniform, centered, endpoints excluded (full circle use)
};

struct ApertureSpec {
  int dimension = 2;
  double alpha = 3.141592653589793;
  double beta = 3.141592653589793;
  int n_points = 16;
  Layout layout = Layout::automatic;
  int n_rings = 0;  // 3D only; 0 picks a default from n_points

  void validate() const;
};

// Directions plus the angles that generated them. In 3D, theta is the polar
// angle and phi the azimuth; points are stored ring by ring (theta outer).
struct MeasurementSet {
  std::vector<Point> directions;
  std::vector<double> theta;
  std::vector<double> phi;
  int n_rings = 1;
  int per_ring = 0;

  int size() const { return static_cast<int>(directions.size()); }
};

MeasurementSet measurement_points(const ApertureSpec& spec);
int default_ring_count(int n_points);

struct WaveConfig {
  int dimension = 2;
  double k = 1.0;
  cplx gamma() const;
};

struct Disk { Point center; double radius; };
struct Box2 { Point lo, hi; };
struct Ellipse { Point center; double a, b, rotation; };
struct Kite { Point center; double scale; double x_coeff = 1.5; };
struct Ball { Point center; double radius; };
struct Box3 { Point lo, hi; };

using Primitive = std::variant<Disk, Box2, Ellipse, Kite, Ball, Box3>;

struct Shape {
  Primitive primitive;
  double q = 1.0;
};

bool contains(const Primitive& p, const Point& z);
double shape_measure(const Primitive& p);
void bounding_box(const Primitive& p, Point& lo, Point& hi);
int primitive_dimension(const Primitive& p);
std::string primitive_name(const Primitive& p);

// Parametric kite boundary and its closed polygon (first vertex not repeated).
Point kite_boundary(const Kite& k, double t);
std::vector<Eigen::Vector2d> kite_polygon(const Kite& k, int segments = 720);

struct InclusionGeometry {
  std::vector<Shape> shapes;

  // q of the first shape containing z, else 0
  double contrast_at(const Point& z) const;
  bool inside(const Point& z) const { return contrast_at(z) != 0.0; }
  // true if any shape contains a point within `pad` (Chebyshev ball) of z
  bool inside_dilated(const Point& z, double pad, int dimension) const;
  bool empty() const { return shapes.empty(); }
};

struct SamplingGrid {
  int dimension = 2;
  Point lo = Point::Zero(), hi = Point::Zero();
  std::array<int, 3> resolution{1, 1, 1};
  std::vector<Point> points;  // x fastest, then y, then z

  int size() const { return static_cast<int>(points.size()); }
  double spacing(int axis) const;
};

SamplingGrid make_grid(int dimension, const Point& lo, const Point& hi, int resolution);
SamplingGrid make_grid(int dimension, const Point& lo, const Point& hi,
                       const std::array<int, 3>& resolution);

}  // namespace wlsm
