#include "wlsm/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wlsm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBig = 1e250;

int miller_start(int nmax, double t) {
  const int need = std::max(nmax, static_cast<int>(std::ceil(t)));
  int start = need + 20 + static_cast<int>(std::sqrt(40.0 * need));
  if (start % 2) ++start;
  return start;
}

// Neumann series Y_0 = (2/pi)(ln(t/2)+gamma) J_0 - (4/pi) sum_k (-1)^k J_2k / k.
double y0_neumann(double t) {
  const int kmax = static_cast<int>(t) + 40;
  const auto J = bessel_j_table(2 * kmax, t);
  double s = 0.0;
  for (int k = kmax; k >= 1; --k) s += ((k % 2) ? -1.0 : 1.0) * J[2 * k] / k;
  return (2.0 / kPi) * (std::log(0.5 * t) + std::numbers::egamma) * J[0] - (4.0 / kPi) * s;
}

// Hankel's expansion: H_0^(1)(t) = sqrt(2/(pi t)) (P + iQ) e^{i(t - pi/4)}.
std::complex<double> h0_asymptotic(double t) {
  double P = 1.0, Q = 0.0, term = 1.0, last = 1.0;
  const double e8 = 8.0 * t;
  for (int k = 1; k < 200; ++k) {
    const double a = 2.0 * k - 1.0;
    term *= a * a / (k * e8);
    if (std::abs(term) > last) break;
    last = std::abs(term);
    // coefficients alternate P: k even with sign (-1)^{k/2}, Q: k odd with sign (-1)^{(k-1)/2}
    if (k % 2 == 0)
      P += ((k / 2) % 2 ? -1.0 : 1.0) * term;
    else
      Q += (((k - 1) / 2) % 2 ? 1.0 : -1.0) * term;
    if (last < 1e-18) break;
  }
  const double amp = std::sqrt(2.0 / (kPi * t));
  const double ph = t - 0.25 * kPi;
  const std::complex<double> pq(P, Q);
  return amp * pq * std::complex<double>(std::cos(ph), std::sin(ph));
}

double sph_series(int n, double t) {
  double pre = 1.0;
  for (int i = 1; i <= n; ++i) pre *= t / (2.0 * i + 1.0);
  const double x = -0.5 * t * t;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= x / (k * (2.0 * n + 2.0 * k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return pre * sum;
}

}  // namespace

std::vector<double> bessel_j_table(int nmax, double t) {
  if (nmax < 0) throw std::invalid_argument("bessel_j_table: nmax < 0");
  if (!(t >= 0.0)) throw std::domain_error("bessel_j_table: t must be >= 0");
  std::vector<double> J(nmax + 1, 0.0);
  if (t == 0.0) {
    J[0] = 1.0;
    return J;
  }
  const int start = miller_start(nmax, t);
  double jp = 0.0, j = 1e-300, norm = 0.0;
  for (int n = start; n >= 1; --n) {
    const double jm = (2.0 * n / t) * j - jp;
    jp = j;
    j = jm;
    // j now holds J_{n-1}, jp holds J_n (unnormalized)
    if (n - 1 <= nmax) J[n - 1] = j;
    if (n <= nmax) J[n] = jp;
    if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * j;
    if (std::abs(j) > kBig) {
      j /= kBig;
      jp /= kBig;
      norm /= kBig;
      for (int m = n - 1; m <= nmax; ++m) J[m] /= kBig;
    }
  }
  norm += j;  // J_0 term
  for (double& v : J) v /= norm;
  return J;
}

double bessel_j(int n, double t) {
  const int an = std::abs(n);
  const double v = bessel_j_table(an, t)[an];
  return (n < 0 && (an % 2)) ? -v : v;
}

std::vector<double> spherical_bessel_j_table(int nmax, double t) {
  if (nmax < 0) throw std::invalid_argument("spherical_bessel_j_table: nmax < 0");
  if (!(t >= 0.0)) throw std::domain_error("spherical_bessel_j_table: t must be >= 0");
  std::vector<double> j(nmax + 1, 0.0);
  if (t < 0.5) {
    for (int n = 0; n <= nmax; ++n) j[n] = sph_series(n, t);
    return j;
  }
  const int start = miller_start(nmax, t);
  double fp = 0.0, f = 1e-300;
  std::vector<double> raw(std::max(nmax, 1) + 1, 0.0);
  for (int n = start; n >= 1; --n) {
    const double fm = ((2.0 * n + 1.0) / t) * f - fp;
    fp = f;
    f = fm;
    if (n - 1 < static_cast<int>(raw.size())) raw[n - 1] = f;
    if (n < static_cast<int>(raw.size())) raw[n] = fp;
    if (std::abs(f) > kBig) {
      f /= kBig;
      fp /= kBig;
      for (int m = n - 1; m < static_cast<int>(raw.size()); ++m) raw[m] /= kBig;
    }
  }
  const double j0 = std::sin(t) / t;
  const double j1 = std::sin(t) / (t * t) - std::cos(t) / t;
  const double scale = (std::abs(j0) >= std::abs(j1)) ? j0 / raw[0] : j1 / raw[1];
  for (int n = 0; n <= nmax; ++n) j[n] = raw[n] * scale;
  return j;
}

double spherical_bessel_j(int n, double t) {
  if (n < 0) throw std::invalid_argument("spherical_bessel_j: n < 0");
  return spherical_bessel_j_table(n, t)[n];
}

double bessel_y0(double t) {
  if (!(t > 0.0)) throw std::domain_error("bessel_y0: t must be > 0");
  if (t <= 25.0) return y0_neumann(t);
  return h0_asymptotic(t).imag();
}

std::complex<double> hankel1_0(double t) {
  if (!(t > 0.0)) throw std::domain_error("hankel1_0: singular at t <= 0");
  if (t <= 25.0) return {bessel_j(0, t), y0_neumann(t)};
  return h0_asymptotic(t);
}

double modified_bessel_i0(double t) {
  const double x = 0.25 * t * t;
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 500; ++m) {
    term *= x / (static_cast<double>(m) * m);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

double assoc_legendre(int n, int m, double x) {
  if (n < 0 || m < 0 || m > n) throw std::invalid_argument("assoc_legendre: need 0 <= m <= n");
  if (x < -1.0 || x > 1.0) throw std::domain_error("assoc_legendre: |x| > 1");
  double pmm = 1.0;
  const double s = std::sqrt((1.0 - x) * (1.0 + x));
  for (int i = 1; i <= m; ++i) pmm *= -(2.0 * i - 1.0) * s;
  if (n == m) return pmm;
  double p1 = x * (2.0 * m + 1.0) * pmm;
  if (n == m + 1) return p1;
  double p0 = pmm;
  for (int l = m + 2; l <= n; ++l) {
    const double p2 = ((2.0 * l - 1.0) * x * p1 - (l + m - 1.0) * p0) / (l - m);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  // P_n(x) and P_n'(x) by the three-term recurrence
  auto legendre = [n](double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int l = 2; l <= n; ++l) {
      const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = mid - half * x;
    r.nodes[n - 1 - i] = mid + half * x;
    r.weights[i] = r.weights[n - 1 - i] = half * w;
  }
  return r;
}

GaussRule composite_gauss_legendre(int panels, int n_per_panel, double a, double b) {
  if (panels < 1) throw std::invalid_argument("composite_gauss_legendre: panels < 1");
  GaussRule out;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const auto g = gauss_legendre(n_per_panel, a + p * h, a + (p + 1) * h);
    out.nodes.insert(out.nodes.end(), g.nodes.begin(), g.nodes.end());
    out.weights.insert(out.weights.end(), g.weights.begin(), g.weights.end());
  }
  return out;
}

double lommel_integral(int n, double k, double delta) {
  n = std::abs(n);
  const double t = k * delta;
  const auto J = bessel_j_table(n + 1, t);
  const double jm = (n == 0) ? -J[1] : J[n - 1];
  return 0.5 * delta * delta * (J[n] * J[n] - jm * J[n + 1]);
}

}  // namespace wlsm
