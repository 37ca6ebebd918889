#include "wlsm/forward.hpp"

#include "wlsm/errors.hpp"
#include "wlsm/parallel.hpp"
#include "wlsm/specfun.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace wlsm {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

// H_1^(1)(x) for 0 < x <= 2. Y_1 from the Wronskian J_1 Y_0 - J_0 Y_1 = 2/(pi x),
// safe while J_0 stays away from its first zero.
cplx hankel1_1_small(double x) {
  if (!(x > 0.0 && x <= 2.0)) throw std::domain_error("hankel1_1_small: need 0 < x <= 2");
  const auto J = bessel_j_table(1, x);
  const double y0 = bessel_y0(x);
  const double y1 = (J[1] * y0 - 2.0 / (kPi * x)) / J[0];
  return {J[1], y1};
}

// int_a^b e^{i p s} ds
cplx slab(double p, double a, double b) {
  if (std::abs(p * (b - a)) < 1e-8) return (b - a) * std::exp(kI * p * 0.5 * (a + b));
  return (std::exp(kI * p * b) - std::exp(kI * p * a)) / (kI * p);
}

// 2 pi J_1(t)/t with the limit pi at t = 0
double disk_factor(double t) { return t < 1e-8 ? kPi * (1.0 - t * t / 8.0) : 2.0 * kPi * bessel_j(1, t) / t; }

FarFieldMatrix blank(const WaveConfig& wave, const ApertureSpec& spec, int n, const char* model) {
  FarFieldMatrix F;
  F.entries = CMatrix::Zero(n, n);
  F.dimension = spec.dimension;
  F.k = wave.k;
  F.alpha = spec.alpha;
  F.beta = spec.beta;
  F.provenance.model = model;
  return F;
}

}  // namespace

double VolumeMesh::volume() const {
  double v = 0.0;
  for (double w : weights) v += w;
  return v;
}

VolumeMesh build_mesh(const InclusionGeometry& geom, int dimension, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("build_mesh: h must be > 0");
  VolumeMesh mesh;
  mesh.dimension = dimension;
  mesh.h = h;
  if (geom.empty()) return mesh;
  Point lo = Point::Constant(1e300), hi = Point::Constant(-1e300);
  for (const auto& s : geom.shapes) {
    if (primitive_dimension(s.primitive) != dimension)
      throw std::invalid_argument("build_mesh: shape '" + primitive_name(s.primitive) + "' does not match dimension");
    Point a, b;
    bounding_box(s.primitive, a, b);
    lo = lo.cwiseMin(a);
    hi = hi.cwiseMax(b);
  }
  std::array<int, 3> i0{0, 0, 0}, i1{0, 0, 0};
  for (int a = 0; a < dimension; ++a) {
    i0[a] = static_cast<int>(std::floor(lo[a] / h)) - 1;
    i1[a] = static_cast<int>(std::ceil(hi[a] / h)) + 1;
  }
  std::vector<int> owner;
  std::vector<int> count(geom.shapes.size(), 0);
  for (int kz = i0[2]; kz <= i1[2]; ++kz)
    for (int jy = i0[1]; jy <= i1[1]; ++jy)
      for (int ix = i0[0]; ix <= i1[0]; ++ix) {
        const Point c((ix + 0.5) * h, (jy + 0.5) * h, dimension == 3 ? (kz + 0.5) * h : 0.0);
        int s = 0;
        while (s < static_cast<int>(geom.shapes.size()) && !contains(geom.shapes[s].primitive, c)) ++s;
        if (s == static_cast<int>(geom.shapes.size()) || geom.shapes[s].q == 0.0) continue;
        mesh.nodes.push_back(c);
        mesh.q.push_back(geom.shapes[s].q);
        mesh.cell.push_back({ix, jy, kz});
        owner.push_back(s);
        ++count[s];
      }
  // Uniform weights |D_s|/N_s per shape, so each shape's measure is exact
  // even where the staircase over- or under-covers it.
  mesh.weights.resize(mesh.nodes.size());
  for (size_t n = 0; n < owner.size(); ++n)
    mesh.weights[n] = shape_measure(geom.shapes[owner[n]].primitive) / count[owner[n]];
  return mesh;
}

cplx fundamental_solution(const WaveConfig& wave, double r) {
  if (wave.dimension == 2) return 0.25 * kI * hankel1_0(wave.k * r);
  return std::exp(kI * wave.k * r) / (4.0 * kPi * r);
}

cplx singular_cell_mean(const WaveConfig& wave, double h) {
  const double k = wave.k;
  if (wave.dimension == 2) {
    const double a = h / std::sqrt(kPi);
    return kI * hankel1_1_small(k * a) / (2.0 * k * a) - 1.0 / (kPi * k * k * a * a);
  }
  const double a = h * std::cbrt(3.0 / (4.0 * kPi));
  const cplx e = std::exp(kI * k * a);
  return 3.0 / (4.0 * kPi * a * a * a) * (e * (a / (kI * k) + 1.0 / (k * k)) - 1.0 / (k * k));
}

TotalField solve_total_field(const VolumeMesh& mesh, const WaveConfig& wave,
                             const std::vector<Point>& incidence) {
  const int n = mesh.size();
  const int nd = static_cast<int>(incidence.size());
  TotalField out;
  out.u.resize(n, nd);
  for (int j = 0; j < nd; ++j)
    for (int m = 0; m < n; ++m) out.u(m, j) = std::exp(kI * wave.k * incidence[j].dot(mesh.nodes[m]));
  out.rcond = 1.0;
  if (n == 0) return out;

  // Phi depends only on the integer cell offset; tabulate |offset| once.
  std::array<int, 3> span{1, 1, 1};
  for (int a = 0; a < mesh.dimension; ++a) {
    int mn = mesh.cell[0][a], mx = mn;
    for (const auto& c : mesh.cell) {
      mn = std::min(mn, c[a]);
      mx = std::max(mx, c[a]);
    }
    span[a] = mx - mn + 1;
  }
  std::vector<cplx> table(static_cast<size_t>(span[0]) * span[1] * span[2]);
  parallel_for(static_cast<int>(table.size()), [&](int idx) {
    const int dx = idx % span[0], dy = (idx / span[0]) % span[1], dz = idx / (span[0] * span[1]);
    if (idx == 0) {
      table[0] = singular_cell_mean(wave, mesh.h);
      return;
    }
    table[idx] = fundamental_solution(wave, mesh.h * std::sqrt(double(dx) * dx + double(dy) * dy + double(dz) * dz));
  });

  const double k2 = wave.k * wave.k;
  CMatrix A(n, n);
  parallel_for(n, [&](int col) {
    const cplx scale = -k2 * mesh.q[col] * mesh.weights[col];
    for (int m = 0; m < n; ++m) {
      const int dx = std::abs(mesh.cell[m][0] - mesh.cell[col][0]);
      const int dy = std::abs(mesh.cell[m][1] - mesh.cell[col][1]);
      const int dz = std::abs(mesh.cell[m][2] - mesh.cell[col][2]);
      A(m, col) = scale * table[dx + span[0] * (dy + span[1] * dz)];
    }
    A(col, col) += 1.0;
  });

  Eigen::PartialPivLU<CMatrix> lu(A);
  out.rcond = lu.rcond();
  if (!(out.rcond > 1e-14)) {
    std::ostringstream msg;
    msg << "Lippmann-Schwinger system is numerically singular (condition estimate " << 1.0 / out.rcond << ")";
    throw NumericError(msg.str(), 1.0 / out.rcond);
  }
  const CMatrix rhs = out.u;
  out.u = lu.solve(rhs);
  auto residual = [&](const CMatrix& x) {
    const CMatrix r = A * x - rhs;
    double worst = 0.0;
    for (int j = 0; j < nd; ++j) worst = std::max(worst, r.col(j).norm() / rhs.col(j).norm());
    return worst;
  };
  out.residual = residual(out.u);
  if (out.residual > 1e-12) {
    out.u += lu.solve(rhs - A * out.u);
    out.residual = residual(out.u);
  }
  if (out.residual > 1e-10) {
    std::ostringstream msg;
    msg << "Lippmann-Schwinger solve residual " << out.residual << " exceeds 1e-10 (condition estimate "
        << 1.0 / out.rcond << ")";
    throw NumericError(msg.str(), 1.0 / out.rcond);
  }
  return out;
}

FarFieldMatrix far_field_exact(const VolumeMesh& mesh, const WaveConfig& wave, const ApertureSpec& spec) {
  return far_field_exact(mesh, wave, spec, nullptr);
}

FarFieldMatrix far_field_exact(const VolumeMesh& mesh, const WaveConfig& wave, const ApertureSpec& spec,
                               TotalField* field) {
  const auto ms = measurement_points(spec);
  const int ny = ms.size();
  FarFieldMatrix F = blank(wave, spec, ny, "exact");
  if (mesh.size() == 0) return F;
  TotalField tf = solve_total_field(mesh, wave, ms.directions);
  const cplx pre = wave.k * wave.k * wave.gamma();
  CMatrix E(ny, mesh.size());
  for (int n = 0; n < mesh.size(); ++n)
    for (int i = 0; i < ny; ++i)
      E(i, n) = pre * mesh.q[n] * mesh.weights[n] * std::exp(-kI * wave.k * ms.directions[i].dot(mesh.nodes[n]));
  F.entries = E * tf.u;
  if (field) *field = std::move(tf);
  return F;
}

cplx shape_fourier(const Primitive& shape, const Point& p) {
  if (const auto* d = std::get_if<Disk>(&shape)) {
    const double pn = p.head<2>().norm();
    return std::exp(kI * p.head<2>().dot(d->center.head<2>())) * d->radius * d->radius * disk_factor(pn * d->radius);
  }
  if (const auto* b = std::get_if<Box2>(&shape))
    return slab(p.x(), b->lo.x(), b->hi.x()) * slab(p.y(), b->lo.y(), b->hi.y());
  if (const auto* e = std::get_if<Ellipse>(&shape)) {
    const double c = std::cos(e->rotation), s = std::sin(e->rotation);
    // z = center + R diag(a,b) u with u in the unit disk
    const double pu = e->a * (c * p.x() + s * p.y());
    const double pv = e->b * (-s * p.x() + c * p.y());
    return std::exp(kI * p.head<2>().dot(e->center.head<2>())) * e->a * e->b * disk_factor(std::hypot(pu, pv));
  }
  if (const auto* b = std::get_if<Ball>(&shape)) {
    const double t = p.norm() * b->radius;
    const double f = t < 1e-6 ? (1.0 / 3.0) * (1.0 - t * t / 10.0) : spherical_bessel_j(1, t) / t;
    return std::exp(kI * p.dot(b->center)) * 4.0 * kPi * std::pow(b->radius, 3) * f;
  }
  if (const auto* b = std::get_if<Box3>(&shape))
    return slab(p.x(), b->lo.x(), b->hi.x()) * slab(p.y(), b->lo.y(), b->hi.y()) *
           slab(p.z(), b->lo.z(), b->hi.z());
  throw std::invalid_argument("shape_fourier: no closed form for " + primitive_name(shape));
}

FarFieldMatrix far_field_born(const InclusionGeometry& geom, const WaveConfig& wave, const ApertureSpec& spec,
                              double quad_h) {
  const auto ms = measurement_points(spec);
  const int ny = ms.size();
  FarFieldMatrix F = blank(wave, spec, ny, "born");
  const cplx pre = wave.k * wave.k * wave.gamma();
  for (const auto& s : geom.shapes) {
    if (primitive_dimension(s.primitive) != spec.dimension)
      throw std::invalid_argument("far_field_born: shape '" + primitive_name(s.primitive) + "' does not match dimension");
    if (const auto* kite = std::get_if<Kite>(&s.primitive)) {
      InclusionGeometry one;
      one.shapes.push_back(s);
      const double h = quad_h > 0.0 ? quad_h : kite->scale / 150.0;
      F.entries += far_field_born_mesh(build_mesh(one, 2, h), wave, spec).entries;
      continue;
    }
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < ny; ++i) {
        const Point p = wave.k * (ms.directions[j] - ms.directions[i]);
        F.entries(i, j) += pre * s.q * shape_fourier(s.primitive, p);
      }
  }
  return F;
}

FarFieldMatrix far_field_born_mesh(const VolumeMesh& mesh, const WaveConfig& wave, const ApertureSpec& spec) {
  const auto ms = measurement_points(spec);
  const int ny = ms.size();
  FarFieldMatrix F = blank(wave, spec, ny, "born");
  if (mesh.size() == 0) return F;
  const cplx pre = wave.k * wave.k * wave.gamma();
  CMatrix E(ny, mesh.size()), P(mesh.size(), ny);
  for (int n = 0; n < mesh.size(); ++n)
    for (int i = 0; i < ny; ++i) {
      const double ph = wave.k * ms.directions[i].dot(mesh.nodes[n]);
      E(i, n) = pre * mesh.q[n] * mesh.weights[n] * std::exp(-kI * ph);
      P(n, i) = std::exp(kI * ph);
    }
  F.entries = E * P;
  return F;
}

FarFieldMatrix add_noise(const FarFieldMatrix& F, double delta, std::uint64_t seed) {
  if (delta < 0.0) throw std::invalid_argument("add_noise: delta must be >= 0");
  FarFieldMatrix out = F;
  out.provenance.noise_level = delta;
  out.provenance.seed = seed;
  if (delta == 0.0 || F.entries.size() == 0) return out;
  const double E = F.entries.cwiseAbs().mean();
  std::mt19937_64 rng(seed);
  auto uni = [&] { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
  for (int i = 0; i < F.entries.rows(); ++i)
    for (int j = 0; j < F.entries.cols(); ++j) {
      const double re = uni();
      const double im = uni();
      out.entries(i, j) += E * delta * cplx(re, im);
    }
  return out;
}

}  // namespace wlsm
