#include "wlsm/weights.hpp"

#include "wlsm/errors.hpp"
#include "wlsm/specfun.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace wlsm {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

double legendre_norm(int n, int m, double alpha, double beta) {
  // l_{n,m} = sqrt((2n+1)/(4 pi) (n-m)!/(n+m)! / (alpha beta))
  double ratio = 1.0;
  for (int i = n - m + 1; i <= n + m; ++i) ratio /= i;
  return std::sqrt((2.0 * n + 1.0) / (4.0 * kPi) * ratio / (alpha * beta));
}

// Solves the Hermitian PSD system A beta = b on the span of eigenvalues above
// rel_cut * lambda_max.
CVector psd_solve(const CMatrix& A, const CVector& b, double rel_cut, double& cond, int& dropped) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(A);
  if (es.info() != Eigen::Success) throw NumericError("normal equations: eigendecomposition failed");
  const auto& lam = es.eigenvalues();
  const double lmax = lam.maxCoeff();
  if (!(lmax > 0.0)) throw NumericError("normal equations: matrix is not positive definite (lambda_max <= 0)");
  if (lam.minCoeff() < -1e-10 * lmax) {
    std::ostringstream msg;
    msg << "normal equations: assembled matrix is indefinite (lambda_min/lambda_max = " << lam.minCoeff() / lmax
        << "); quadrature too coarse";
    throw NumericError(msg.str());
  }
  const CMatrix& V = es.eigenvectors();
  const CVector c = V.adjoint() * b;
  CVector y = CVector::Zero(c.size());
  dropped = 0;
  double lmin_kept = lmax;
  for (int i = 0; i < c.size(); ++i) {
    if (lam[i] > rel_cut * lmax) {
      y[i] = c[i] / lam[i];
      lmin_kept = std::min(lmin_kept, lam[i]);
    } else {
      ++dropped;
    }
  }
  cond = lmax / lmin_kept;
  return V * y;
}

double sinc_ratio(int dimension, double t) {
  // 2D: J_1(t)/t -> 1/2; 3D: j_1(t)/t -> 1/3
  if (dimension == 2) return t < 1e-6 ? 0.5 - t * t / 16.0 : bessel_j(1, t) / t;
  return t < 1e-6 ? 1.0 / 3.0 - t * t / 30.0 : spherical_bessel_j(1, t) / t;
}

}  // namespace

std::string to_string(WeightMethod m) {
  switch (m) {
    case WeightMethod::uniform: return "uniform";
    case WeightMethod::vandermonde: return "vandermonde";
    case WeightMethod::tsvd: return "tsvd";
    case WeightMethod::normal_eq_2d: return "normal_eq_2d";
    case WeightMethod::normal_eq_3d: return "normal_eq_3d";
  }
  return "uniform";
}

WeightMethod weight_method_from_string(const std::string& s) {
  for (auto m : {WeightMethod::uniform, WeightMethod::vandermonde, WeightMethod::tsvd, WeightMethod::normal_eq_2d,
                 WeightMethod::normal_eq_3d})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown weight method '" + s + "'");
}

WeightVector weights_uniform(int n_points) {
  WeightVector w;
  w.values = CVector::Ones(n_points);
  w.method = WeightMethod::uniform;
  return w;
}

WeightVector weights_vandermonde(const ApertureSpec& spec) {
  if (spec.dimension != 2) throw std::invalid_argument("weights_vandermonde: 2D apertures only");
  if (spec.n_points % 2 == 0) throw std::invalid_argument("weights_vandermonde: N_y must be odd (N_y = 2N+1)");
  const auto ms = measurement_points(spec);
  const int ny = ms.size(), N = (ny - 1) / 2;
  const double dtheta = ms.theta[1] - ms.theta[0];
  CMatrix V(ny, ny);
  for (int r = 0; r < ny; ++r)
    for (int j = 0; j < ny; ++j) V(r, j) = std::polar(1.0, (r - N) * (j - N) * dtheta);
  Eigen::JacobiSVD<CMatrix> svd(V);
  const auto& s = svd.singularValues();
  const double cond = s[ny - 1] > 0.0 ? s[0] / s[ny - 1] : INFINITY;
  if (!(cond <= 1e15)) {
    std::ostringstream msg;
    msg << "weights_vandermonde: condition number " << cond << " exceeds 1e15";
    throw NumericError(msg.str(), cond);
  }
  // With x_j = lambda^{j-N} and u_j = w_j x_j^{-N} the rows become
  // sum_j x_j^m u_j = delta_{mN}, m = 0..2N: a dual Vandermonde system,
  // solved by Bjorck-Pereyra in extended precision. With ||w||_1 near 1e8 on
  // narrow arcs the double residual floor is set by rounding w itself.
  using lcplx = std::complex<long double>;
  const long double dth = spec.layout == Layout::periodic ? 2.0L * std::numbers::pi_v<long double> / ny
                                                          : 2.0L * spec.alpha / (ny - 1);
  std::vector<lcplx> x(ny);
  for (int j = 0; j < ny; ++j) x[j] = std::polar(1.0L, static_cast<long double>(j - N) * dth);
  auto bjorck_pereyra = [&](std::vector<lcplx> b) {
    const int n = ny - 1;
    for (int k = 0; k < n; ++k)
      for (int i = n; i > k; --i) b[i] -= x[k] * b[i - 1];
    for (int k = n - 1; k >= 0; --k) {
      for (int i = k + 1; i <= n; ++i) b[i] /= x[i] - x[i - k - 1];
      for (int i = k; i < n; ++i) b[i] -= b[i + 1];
    }
    for (int j = 0; j < ny; ++j) b[j] *= std::pow(x[j], N);
    return b;
  };
  std::vector<lcplx> rhs(ny, 0.0L);
  rhs[N] = 1.0L;
  auto wl = bjorck_pereyra(rhs);
  for (int it = 0; it < 2; ++it) {
    std::vector<lcplx> r(rhs);
    for (int row = 0; row < ny; ++row)
      for (int j = 0; j < ny; ++j) r[row] -= std::pow(x[j], row - N) * wl[j];
    const auto d = bjorck_pereyra(r);
    for (int j = 0; j < ny; ++j) wl[j] += d[j];
  }
  CVector w(ny);
  for (int j = 0; j < ny; ++j) w[j] = cplx(static_cast<double>(wl[j].real()), static_cast<double>(wl[j].imag()));

  WeightVector out;
  out.values = w;
  out.method = WeightMethod::vandermonde;
  out.M = N;
  out.condition = cond;
  return out;
}

WeightVector weights_tsvd(const ApertureSpec& spec, const WaveConfig& wave, const SamplingGrid& grid, int rank,
                          bool* clamped) {
  const auto ms = measurement_points(spec);
  const int ny = ms.size(), nz = grid.size();
  CMatrix U(nz, ny);
  CVector v(nz);
  for (int n = 0; n < nz; ++n) {
    for (int j = 0; j < ny; ++j) U(n, j) = std::exp(kI * wave.k * grid.points[n].dot(ms.directions[j]));
    v[n] = reference_kernel(wave, grid.points[n].norm());
  }
  Eigen::BDCSVD<CMatrix> svd(U, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  int numerical = 0;
  while (numerical < s.size() && s[numerical] > 1e-13 * s[0]) ++numerical;
  const int r = std::clamp(rank, 1, std::max(numerical, 1));
  if (clamped) *clamped = rank > numerical;
  const CVector c = svd.matrixU().leftCols(r).adjoint() * v;
  CVector y(r);
  for (int i = 0; i < r; ++i) y[i] = c[i] / s[i];
  WeightVector out;
  out.values = svd.matrixV().leftCols(r) * y;
  out.method = WeightMethod::tsvd;
  out.M = r;
  out.condition = s[0] / s[r - 1];
  out.truncated_modes = static_cast<int>(s.size()) - r;
  return out;
}

double ball_kernel(int dimension, double k, double R, double dist) {
  const double t = k * R * dist;
  if (dimension == 2) return 2.0 * kPi * R * R * sinc_ratio(2, t);
  return 4.0 * kPi * R * R * R * sinc_ratio(3, t);
}

double reference_energy(int dimension, double k, double R) {
  // radial integral of v^2 with spectral Gauss-Legendre panels
  const int panels = std::max(4, static_cast<int>(std::ceil(k * R)));
  const auto g = composite_gauss_legendre(panels, 16, 0.0, R);
  double s = 0.0;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const double r = g.nodes[i];
    if (dimension == 2) {
      const double j0 = bessel_j(0, k * r);
      s += g.weights[i] * j0 * j0 * r;
    } else {
      const double j0 = spherical_bessel_j(0, k * r);
      s += g.weights[i] * j0 * j0 * r * r;
    }
  }
  return dimension == 2 ? 2.0 * kPi * s : 4.0 * kPi * s;
}

NormalSystem normal_system_2d(const ApertureSpec& spec, const WaveConfig& wave, int M, double R) {
  const auto ms = measurement_points(spec);
  const int ny = ms.size();
  NormalSystem sys;
  sys.basis.resize(ny, M + 1);
  for (int j = 0; j < ny; ++j)
    for (int m = 0; m <= M; ++m) sys.basis(j, m) = std::cos(kPi * m * ms.theta[j] / spec.alpha) / std::sqrt(spec.alpha);
  CMatrix K(ny, ny);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < ny; ++j) K(i, j) = ball_kernel(2, wave.k, R, (ms.directions[i] - ms.directions[j]).norm());
  sys.A = sys.basis.adjoint() * K * sys.basis;
  sys.b = sys.basis.adjoint() * CVector::Constant(ny, reference_energy(2, wave.k, R));
  return sys;
}

NormalSystem normal_system_3d(const ApertureSpec& spec, const WaveConfig& wave, int M, double R) {
  const auto ms = measurement_points(spec);
  const int ny = ms.size();
  const int nb = (M + 1) * (M + 1);
  NormalSystem sys;
  sys.basis.resize(ny, nb);
  for (int j = 0; j < ny; ++j) {
    const double x = std::cos(kPi * ms.theta[j] / spec.beta);
    for (int n = 0; n <= M; ++n)
      for (int m = -n; m <= n; ++m) {
        const int am = std::abs(m);
        const double radial = legendre_norm(n, am, spec.alpha, spec.beta) * assoc_legendre(n, am, x);
        sys.basis(j, n * n + n + m) = radial * std::polar(1.0, m * kPi * ms.phi[j] / spec.alpha);
      }
  }
  CMatrix K(ny, ny);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < ny; ++j) K(i, j) = ball_kernel(3, wave.k, R, (ms.directions[i] - ms.directions[j]).norm());
  sys.A = sys.basis.adjoint() * K * sys.basis;
  sys.A = 0.5 * (sys.A + sys.A.adjoint()).eval();
  sys.b = sys.basis.adjoint() * CVector::Constant(ny, reference_energy(3, wave.k, R));
  return sys;
}

std::string to_string(NormalAssembly a) { return a == NormalAssembly::discrete ? "discrete" : "continuous"; }

NormalAssembly normal_assembly_from_string(const std::string& s) {
  if (s == "discrete") return NormalAssembly::discrete;
  if (s == "continuous") return NormalAssembly::continuous;
  throw std::invalid_argument("unknown normal-equation assembly '" + s + "'");
}

Eigen::VectorXd arc_quadrature_weights(const ApertureSpec& spec) {
  const int n = spec.n_points;
  const bool periodic = spec.layout == Layout::periodic;
  Eigen::VectorXd q = Eigen::VectorXd::Constant(n, periodic ? 2.0 * kPi / n : 2.0 * spec.alpha / (n - 1));
  if (!periodic) q[0] = q[n - 1] = spec.alpha / (n - 1);
  return q;
}

NormalSystem normal_system_2d_continuous(const ApertureSpec& spec, const WaveConfig& wave, int M, double R) {
  const auto ms = measurement_points(spec);
  const int ny = ms.size();
  NormalSystem sys;
  sys.basis.resize(ny, M + 1);
  for (int j = 0; j < ny; ++j)
    for (int m = 0; m <= M; ++m) sys.basis(j, m) = std::cos(kPi * m * ms.theta[j] / spec.alpha) / std::sqrt(spec.alpha);
  // at least 8(M+1) nodes, and enough panels to follow the kernel's oscillation
  const int panels = std::max(M + 1, static_cast<int>(std::ceil(2.0 * wave.k * R * spec.alpha / kPi)) + 1);
  const auto g = composite_gauss_legendre(panels, 8, -spec.alpha, spec.alpha);
  const int nq = static_cast<int>(g.nodes.size());
  Eigen::MatrixXd V(nq, M + 1), K(nq, nq);
  for (int a = 0; a < nq; ++a)
    for (int m = 0; m <= M; ++m) V(a, m) = std::cos(kPi * m * g.nodes[a] / spec.alpha) / std::sqrt(spec.alpha);
  for (int a = 0; a < nq; ++a)
    for (int c = 0; c < nq; ++c) {
      const double dist = 2.0 * std::abs(std::sin(0.5 * (g.nodes[a] - g.nodes[c])));
      K(a, c) = g.weights[a] * g.weights[c] * ball_kernel(2, wave.k, R, dist);
    }
  sys.A = (V.transpose() * K * V).cast<cplx>();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(M + 1);
  // int v_m dtheta = 2 sqrt(alpha) delta_{m0}, exactly
  b[0] = 2.0 * std::sqrt(spec.alpha) * reference_energy(2, wave.k, R);
  sys.b = b.cast<cplx>();
  return sys;
}

WeightVector weights_normal_eq_2d(const ApertureSpec& spec, const WaveConfig& wave, int M, double R,
                                  NormalAssembly assembly) {
  if (spec.dimension != 2) throw std::invalid_argument("weights_normal_eq_2d: 2D apertures only");
  if (M < 0) M = (spec.n_points - 1) / 2;
  if (M >= spec.n_points) throw std::invalid_argument("weights_normal_eq_2d: need M < N_y");
  const bool discrete = assembly == NormalAssembly::discrete;
  const auto sys = discrete ? normal_system_2d(spec, wave, M, R) : normal_system_2d_continuous(spec, wave, M, R);
  WeightVector out;
  out.method = WeightMethod::normal_eq_2d;
  out.M = M;
  out.basis_coeffs = psd_solve(sys.A, sys.b, 1e-12, out.condition, out.truncated_modes);
  out.values = sys.basis * out.basis_coeffs;
  if (!discrete) out.values = out.values.cwiseProduct(arc_quadrature_weights(spec).cast<cplx>());
  return out;
}

WeightVector weights_normal_eq_3d(const ApertureSpec& spec, const WaveConfig& wave, int M, double R) {
  if (spec.dimension != 3) throw std::invalid_argument("weights_normal_eq_3d: 3D apertures only");
  if (M < 0) M = std::max(0, static_cast<int>(std::floor(std::sqrt(0.5 * spec.n_points))) - 1);
  const auto sys = normal_system_3d(spec, wave, M, R);
  WeightVector out;
  out.method = WeightMethod::normal_eq_3d;
  out.M = M;
  out.basis_coeffs = psd_solve(sys.A, sys.b, 1e-12, out.condition, out.truncated_modes);
  out.values = sys.basis * out.basis_coeffs;
  return out;
}

double reference_kernel(const WaveConfig& wave, double r) {
  return wave.dimension == 2 ? bessel_j(0, wave.k * r) : spherical_bessel_j(0, wave.k * r);
}

cplx kernel_K(const MeasurementSet& ms, const WaveConfig& wave, const Point& x, const Point& z) {
  cplx s = 0.0;
  const Point d = x - z;
  for (const auto& y : ms.directions) s += std::exp(kI * wave.k * d.dot(y));
  return s;
}

cplx kernel_Kw(const MeasurementSet& ms, const WaveConfig& wave, const WeightVector& w, const Point& x,
               const Point& z) {
  cplx s = 0.0;
  const Point d = x - z;
  for (int j = 0; j < ms.size(); ++j) s += w.values[j] * std::exp(kI * wave.k * d.dot(ms.directions[j]));
  return s;
}

cplx weight_moment(const MeasurementSet& ms, const WeightVector& w, int n) {
  // extended accumulation: large alternating weights cancel to O(1)
  std::complex<long double> s = 0.0L;
  for (int j = 0; j < ms.size(); ++j)
    s += std::polar(1.0L, static_cast<long double>(n) * ms.theta[j]) *
         std::complex<long double>(w.values[j].real(), w.values[j].imag());
  return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

double vandermonde_kernel_bound(int N, double alpha, double k, double r) {
  const double e3 = std::exp(3.0);
  return (2.0 * N + 1.0) / std::pow(2.0 * kPi * N, 1.5) * std::pow(e3 * k * r / (N * alpha * alpha), N);
}

CVector weight_sqrt(const WeightVector& w) { return w.values.unaryExpr([](cplx v) { return std::sqrt(v); }); }

std::string weight_cache_key(const ApertureSpec& spec, const WaveConfig& wave, WeightMethod method, int M) {
  std::ostringstream os;
  os << std::setprecision(17) << "d" << spec.dimension << "_k" << wave.k << "_a" << spec.alpha << "_b"
     << (spec.dimension == 3 ? spec.beta : 0.0) << "_n" << spec.n_points << "_M" << M << "_" << to_string(method);
  return os.str();
}

void write_weights(std::ostream& os, const WeightVector& w, const std::string& key) {
  os << "# wlsm weights v1\n";
  os << "key " << key << "\n";
  os << "method " << to_string(w.method) << "\n";
  os << "M " << w.M << "\n";
  os << std::setprecision(17);
  os << "condition " << w.condition << "\n";
  os << "truncated_modes " << w.truncated_modes << "\n";
  os << "n_values " << w.values.size() << "\n";
  os << "n_coeffs " << w.basis_coeffs.size() << "\n";
  os << "end_header\n";
  for (int i = 0; i < w.values.size(); ++i) os << w.values[i].real() << ' ' << w.values[i].imag() << '\n';
  for (int i = 0; i < w.basis_coeffs.size(); ++i)
    os << w.basis_coeffs[i].real() << ' ' << w.basis_coeffs[i].imag() << '\n';
}

WeightVector read_weights(std::istream& is, std::string* key) {
  std::string line, k;
  WeightVector w;
  int nv = -1, nc = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "end_header") break;
    std::istringstream ls(line);
    ls >> k;
    if (k == "key" && key) ls >> *key;
    else if (k == "method") { std::string m; ls >> m; w.method = weight_method_from_string(m); }
    else if (k == "M") ls >> w.M;
    else if (k == "condition") ls >> w.condition;
    else if (k == "truncated_modes") ls >> w.truncated_modes;
    else if (k == "n_values") ls >> nv;
    else if (k == "n_coeffs") ls >> nc;
  }
  if (nv < 0) throw std::runtime_error("weights file: missing header");
  auto read = [&](CVector& v, int n) {
    v.resize(n);
    for (int i = 0; i < n; ++i) {
      double re, im;
      if (!(is >> re >> im)) throw std::runtime_error("weights file: truncated data");
      v[i] = {re, im};
    }
  };
  read(w.values, nv);
  read(w.basis_coeffs, nc);
  return w;
}

}  // namespace wlsm
