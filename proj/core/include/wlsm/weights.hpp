#pragma once

#include "wlsm/forward.hpp"
#include "wlsm/geometry.hpp"

#include <iosfwd>
#include <string>

namespace wlsm {

enum class WeightMethod { uniform, vandermonde, tsvd, normal_eq_2d, normal_eq_3d };

std::string to_string(WeightMethod m);
WeightMethod weight_method_from_string(const std::string& s);

struct WeightVector {
  CVector values;        // w(y_j)
  CVector basis_coeffs;  // beta_m (2D) or beta_[m,n] (3D); empty for uniform/vandermonde
  WeightMethod method = WeightMethod::uniform;
  int M = 0;
  double condition = 1.0;   // condition number of the solved system
  int truncated_modes = 0;  // eigen/singular modes dropped during the solve

  int size() const { return static_cast<int>(values.size()); }
  cplx sum() const { return values.sum(); }
};

WeightVector weights_uniform(int n_points);

// Moment system V w = e_{N+1}, V_{n,j} = lambda^{n (j-N-1)}, lambda = e^{i d_theta},
// on a uniformly spaced symmetric 2D point set with N_y = 2N+1.
WeightVector weights_vandermonde(const ApertureSpec& spec);

// w = U^+ v on the sampling grid, where U_{n,j} = e^{i k z_n . y_j} and v is
// J_0(k|z|) in 2D, j_0(k|z|) in 3D. The rank is clamped to the numerical
// rank (relative 1e-13); *clamped reports whether that happened.
WeightVector weights_tsvd(const ApertureSpec& spec, const WaveConfig& wave, const SamplingGrid& grid, int rank,
                          bool* clamped = nullptr);

// discrete: the aperture integral is the sum over measurement points, i.e.
//   the kernel that actually enters F_w.
// continuous: Gauss-Legendre integrals over the arc; w is the fitted density
//   times the trapezoid weight of each point.
enum class NormalAssembly { discrete, continuous };
std::string to_string(NormalAssembly a);
NormalAssembly normal_assembly_from_string(const std::string& s);

// Least-squares fit of K_w(0, .) to the full-aperture kernel over B(0, R),
// with w in the cosine basis v_m(theta) = cos(pi m theta / alpha)/sqrt(alpha).
// M < 0 selects floor((N_y-1)/2).
WeightVector weights_normal_eq_2d(const ApertureSpec& spec, const WaveConfig& wave, int M = -1, double R = 1.0,
                                  NormalAssembly assembly = NormalAssembly::discrete);

// Same fit on a spherical cap with the basis l_{n,m} e^{i m pi phi/alpha} P_n^|m|(cos(pi theta/beta)),
// flattened with [m,n] = n^2 + n + m. M < 0 selects floor(sqrt(N_y/2)) - 1.
WeightVector weights_normal_eq_3d(const ApertureSpec& spec, const WaveConfig& wave, int M = -1, double R = 1.0);

// Normal-equation pieces, exposed for diagnostics and tests.
struct NormalSystem {
  CMatrix basis;  // N_y x n_basis, basis functions at the measurement points
  CMatrix A;      // basis^H K basis
  CVector b;
};
NormalSystem normal_system_2d(const ApertureSpec& spec, const WaveConfig& wave, int M, double R);
// basis holds v_m at the measurement points; A and b are the arc integrals.
NormalSystem normal_system_2d_continuous(const ApertureSpec& spec, const WaveConfig& wave, int M, double R);
// Trapezoid weights of the 2D layout (closed: endpoints halved; periodic: uniform).
Eigen::VectorXd arc_quadrature_weights(const ApertureSpec& spec);
NormalSystem normal_system_3d(const ApertureSpec& spec, const WaveConfig& wave, int M, double R);

// Kernel of int_{B(0,R)} e^{i k z.(y - y')} dz at |y - y'| = dist.
double ball_kernel(int dimension, double k, double R, double dist);
// int_{B(0,R)} v(z)^2 dz for the reference kernel v.
double reference_energy(int dimension, double k, double R);

// sum_j e^{ik(x-z).y_j} (w_j)
cplx kernel_K(const MeasurementSet& ms, const WaveConfig& wave, const Point& x, const Point& z);
cplx kernel_Kw(const MeasurementSet& ms, const WaveConfig& wave, const WeightVector& w, const Point& x,
               const Point& z);
// J_0(k r) in 2D, j_0(k r) in 3D
double reference_kernel(const WaveConfig& wave, double r);

// sum_j e^{i n theta_j} w_j
cplx weight_moment(const MeasurementSet& ms, const WeightVector& w, int n);

// A priori bound on the vandermonde-weighted kernel error:
// ((2N+1)/(2 pi N)^{3/2}) (e^3 k r/(N alpha^2))^N.
double vandermonde_kernel_bound(int N, double alpha, double k, double r);

// Principal square root of each weight.
CVector weight_sqrt(const WeightVector& w);

std::string weight_cache_key(const ApertureSpec& spec, const WaveConfig& wave, WeightMethod method, int M);
void write_weights(std::ostream& os, const WeightVector& w, const std::string& key);
WeightVector read_weights(std::istream& is, std::string* key = nullptr);

}  // namespace wlsm
