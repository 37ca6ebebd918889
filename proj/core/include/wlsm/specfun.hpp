#pragma once

#include <complex>
#include <vector>

namespace wlsm {

// Bessel J_n(t) for any integer n and t >= 0. Miller's downward recurrence,
// normalized with J_0 + 2 sum J_2k = 1.
double bessel_j(int n, double t);

// J_0(t) .. J_nmax(t) from a single recurrence sweep.
std::vector<double> bessel_j_table(int nmax, double t);

double spherical_bessel_j(int n, double t);
std::vector<double> spherical_bessel_j_table(int nmax, double t);

// Y_0 for t > 0; throws std::domain_error otherwise.
double bessel_y0(double t);

// H_0^(1)(t) = J_0(t) + i Y_0(t). Throws std::domain_error at t <= 0: the
// logarithmic singularity belongs to the caller (singular mesh cell).
std::complex<double> hankel1_0(double t);

double modified_bessel_i0(double t);

// P_n^m(x) with the Condon-Shortley phase, 0 <= m <= n, |x| <= 1.
double assoc_legendre(int n, int m, double x);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);
GaussRule composite_gauss_legendre(int panels, int n_per_panel, double a, double b);

// int_0^delta J_n(k r)^2 r dr in closed form,
// delta^2/2 (J_n(k delta)^2 - J_{n-1}(k delta) J_{n+1}(k delta)).
double lommel_integral(int n, double k, double delta);

}  // namespace wlsm
