#pragma once

#include "wlsm/forward.hpp"
#include "wlsm/geometry.hpp"
#include "wlsm/weights.hpp"

#include <Eigen/SVD>

#include <string>
#include <vector>

namespace wlsm {

enum class MorozovFlag : int {
  converged = 0,
  noise_below_floor = 1,  // r(0+) >= target; tau -> 0 limit returned
  data_below_noise = 2,   // ||b|| <= target; g = 0
  zero_operator = 3       // A == 0; g = 0
};

struct MorozovResult {
  double tau = 0.0;
  double residual = 0.0;   // achieved ||A g - b||
  double target = 0.0;
  double g_norm2 = 0.0;    // ||g||^2
  MorozovFlag flag = MorozovFlag::converged;
};

// Thin SVD reused across right-hand sides.
struct SvdFactors {
  CMatrix U, V;
  Eigen::VectorXd s;
  static SvdFactors of(const CMatrix& A);
};

// Morozov-matched Tikhonov on precomputed factors; g is filled when non-null.
MorozovResult morozov_solve(const SvdFactors& f, const CVector& b, double target, CVector* g = nullptr);

// Convenience: SVD of A, then morozov_solve.
struct TikhonovSolution {
  CVector g;
  MorozovResult info;
  Eigen::VectorXd singular_values;
};
TikhonovSolution tikhonov_morozov(const CMatrix& A, const CVector& b, double delta_abs);

// Closed-form squared residual r(tau)^2 from the spectral coefficients.
double morozov_residual(const SvdFactors& f, const CVector& b, double tau);

enum class IndexMethod { wlsm, lsm, factorization, music };
std::string to_string(IndexMethod m);
IndexMethod index_method_from_string(const std::string& s);

struct RegularizationRecord {
  std::vector<double> tau;
  std::vector<double> discrepancy;
  std::vector<double> target;
  std::vector<int> flag;
  Eigen::VectorXd singular_values;
  int truncation_rank = 0;
  double noise_ratio = 0.0;  // rho in delta_abs = rho ||eta_x||
  std::vector<std::string> notes;
};

struct IndexField {
  SamplingGrid grid;
  std::vector<double> values;
  IndexMethod method = IndexMethod::wlsm;
  RegularizationRecord record;
  bool flat = false;

  int argmax() const;
};

// Psi_x(y) = gamma e^{-ik x.y} at every measurement direction.
CVector test_vector(const MeasurementSet& ms, const WaveConfig& wave, const Point& x);

struct SamplingOptions {
  double rho_floor = 1e-6;  // lower bound on the relative noise ratio
  double target_scale = 1.0;
};

// rho = max(delta E(|F|) N_y sqrt(2/3) / ||F||_F, rho_floor): the expected
// relative Frobenius size of noise injected by add_noise.
double relative_noise_ratio(const CMatrix& F, double delta, double rho_floor);
// Same ratio for the weighted operator: the injected noise propagates to
// W^{1/2} eps W^{1/2}, whose expected Frobenius norm is
// delta E(|F|) sqrt(2/3) ||w^{1/2}||_2^2. Equals relative_noise_ratio for w = 1.
double weighted_noise_ratio(const CMatrix& F, const CVector& sqrt_w, double delta, double rho_floor);

// Solves F_w g = w^{1/2} Psi_x by Morozov-matched Tikhonov with
// target rho_w ||w^{1/2} Psi_x|| (rho_w from weighted_noise_ratio); I_w(x) = 1/||g||^2.
IndexField index_wlsm(const FarFieldMatrix& F, const MeasurementSet& ms, const WeightVector& w,
                      const SamplingGrid& grid, const WaveConfig& wave, double delta,
                      const SamplingOptions& opt = {});
IndexField index_lsm(const FarFieldMatrix& F, const MeasurementSet& ms, const SamplingGrid& grid,
                     const WaveConfig& wave, double delta, const SamplingOptions& opt = {});

// [sum_{sigma_j > eps sigma_1} |<u_j, Psi_x>|^2 / sigma_j]^{-1}
IndexField index_factorization(const FarFieldMatrix& F, const MeasurementSet& ms, const SamplingGrid& grid,
                               const WaveConfig& wave, double eps_rank = 1e-8);

// 1/||P_noise Psi_x / ||Psi_x||||^2 with P_noise spanned by u_{s+1..N_y};
// signal_rank < 0 selects the largest gap in log sigma among the first ceil(N_y/2) ranks.
IndexField index_music(const FarFieldMatrix& F, const MeasurementSet& ms, const SamplingGrid& grid,
                       const WaveConfig& wave, int signal_rank = -1);
int music_rank_from_gap(const Eigen::VectorXd& s);

struct StabilityNorms {
  double inv_norm = 0.0;           // ||F^{-1}||_2, or inf
  double weighted_inv_norm = 0.0;  // ||F_w^{-1}||_2 ||w^{1/2}||_2, or inf
  double sigma_min_ratio = 0.0;
  double weighted_sigma_min_ratio = 0.0;
};
StabilityNorms stability_norms(const CMatrix& F, const WeightVector& w);

// Born disk B(0, delta) Fourier coefficients without the prefactor:
// pi delta^2 (J_n(k delta)^2 - J_{n-1} J_{n+1}).
double disk_coefficient(int n, double k, double delta);

struct ConcentrationRow {
  int N = 0;
  double outer_mean = 0.0;  // average of sum J_n(k|x|)^2/s_n^2 over B(0, r)
  double inner_mean = 0.0;  // same over B(0, delta)
  double ratio = 0.0;
};
std::vector<ConcentrationRow> concentration_ratio(double delta, double r, const std::vector<int>& Ns,
                                                  const WaveConfig& wave);

struct ApproxSolutionResidual {
  double residual = 0.0;
  double bound = 0.0;
  double eta_norm = 0.0;
};
// Residual of the Fourier-mode approximate solution for the Born disk B(0, delta)
// on a 2D aperture with weights w, against w^{1/2} e^{ik x.y}.
ApproxSolutionResidual approx_solution_residual(double delta, const WaveConfig& wave, const ApertureSpec& spec,
                                                const WeightVector& w, const Point& x);
double approx_solution_bound(int N, double alpha, double k, double delta, double xnorm);

// mean(sqrt I over D) / mean(sqrt I over Omega minus D dilated by one cell),
// with sqrt I normalized to [0, 1].
double inside_outside_contrast(const IndexField& f, const InclusionGeometry& geom);

}  // namespace wlsm
