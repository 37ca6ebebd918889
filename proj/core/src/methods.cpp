#include "wlsm/methods.hpp"

#include "wlsm/parallel.hpp"
#include "wlsm/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace wlsm {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);
constexpr double kInf = std::numeric_limits<double>::infinity();

IndexField make_field(const SamplingGrid& grid, IndexMethod m) {
  IndexField f;
  f.grid = grid;
  f.method = m;
  f.values.assign(grid.size(), 0.0);
  return f;
}

void resize_record(RegularizationRecord& r, int n) {
  r.tau.assign(n, 0.0);
  r.discrepancy.assign(n, 0.0);
  r.target.assign(n, 0.0);
  r.flag.assign(n, 0);
}

IndexField zero_data_field(const SamplingGrid& grid, IndexMethod m, int ny) {
  IndexField f = make_field(grid, m);
  f.flat = true;
  f.record.singular_values = Eigen::VectorXd::Zero(ny);
  f.record.notes.push_back("zero far-field data: index set to 0 everywhere");
  resize_record(f.record, grid.size());
  std::fill(f.record.flag.begin(), f.record.flag.end(), static_cast<int>(MorozovFlag::zero_operator));
  return f;
}
}  // namespace

SvdFactors SvdFactors::of(const CMatrix& A) {
  Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors f;
  f.U = svd.matrixU();
  f.V = svd.matrixV();
  f.s = svd.singularValues();
  return f;
}

double morozov_residual(const SvdFactors& f, const CVector& b, double tau) {
  const CVector beta = f.U.adjoint() * b;
  const double perp = std::max(0.0, b.squaredNorm() - beta.squaredNorm());
  double r2 = perp;
  for (int j = 0; j < beta.size(); ++j) {
    const double s2 = f.s[j] * f.s[j];
    const double fac = (s2 + tau) > 0.0 ? tau / (s2 + tau) : 1.0;
    r2 += fac * fac * std::norm(beta[j]);
  }
  return r2;
}

MorozovResult morozov_solve(const SvdFactors& f, const CVector& b, double target, CVector* g) {
  MorozovResult res;
  res.target = target;
  const int n = static_cast<int>(f.s.size());
  const CVector beta = f.U.adjoint() * b;
  const double bnorm2 = b.squaredNorm();
  const double perp = std::max(0.0, bnorm2 - beta.squaredNorm());
  std::vector<double> a2(n), s2(n);
  for (int j = 0; j < n; ++j) {
    a2[j] = std::norm(beta[j]);
    s2[j] = f.s[j] * f.s[j];
  }
  auto r2 = [&](double tau) {
    double acc = perp;
    for (int j = 0; j < n; ++j) {
      if (s2[j] == 0.0) {
        acc += a2[j];
        continue;
      }
      const double fac = tau / (s2[j] + tau);
      acc += fac * fac * a2[j];
    }
    return acc;
  };
  auto finish = [&](double tau) {
    res.tau = tau;
    double gn = 0.0;
    for (int j = 0; j < n; ++j) {
      if (s2[j] == 0.0) continue;
      const double fac = f.s[j] / (s2[j] + tau);
      gn += fac * fac * a2[j];
    }
    res.g_norm2 = gn;
    res.residual = std::sqrt(r2(tau));
    if (g) {
      CVector c(n);
      for (int j = 0; j < n; ++j) c[j] = s2[j] == 0.0 ? cplx(0.0) : beta[j] * (f.s[j] / (s2[j] + tau));
      *g = f.V * c;
    }
    return res;
  };
  auto zero = [&](MorozovFlag flag) {
    res.flag = flag;
    res.tau = kInf;
    res.g_norm2 = 0.0;
    res.residual = std::sqrt(bnorm2);
    if (g) *g = CVector::Zero(f.V.rows());
    return res;
  };

  if (n == 0 || !(f.s[0] > 0.0)) return zero(MorozovFlag::zero_operator);
  const double t2 = target * target;
  if (bnorm2 <= t2) return zero(MorozovFlag::data_below_noise);
  if (r2(0.0) >= t2) {
    res.flag = MorozovFlag::noise_below_floor;
    return finish(0.0);
  }
  // r is increasing in tau; bracket in log space and bisect
  const double scale = s2[0];
  double lo = 1e-30 * scale, hi = 1e2 * scale;
  for (int i = 0; i < 40 && r2(lo) >= t2; ++i) lo *= 1e-10;
  for (int i = 0; i < 40 && r2(hi) <= t2; ++i) hi *= 1e10;
  if (r2(lo) >= t2) {
    res.flag = MorozovFlag::noise_below_floor;
    return finish(lo);
  }
  for (int it = 0; it < 300; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double r = r2(mid);
    if (r > t2) hi = mid;
    else lo = mid;
    if (hi / lo < 1.0 + 1e-14 || std::abs(r - t2) <= 1e-14 * t2) break;
  }
  res.flag = MorozovFlag::converged;
  return finish(std::sqrt(lo * hi));
}

TikhonovSolution tikhonov_morozov(const CMatrix& A, const CVector& b, double delta_abs) {
  if (delta_abs < 0.0) throw std::invalid_argument("tikhonov_morozov: delta_abs must be >= 0");
  const auto f = SvdFactors::of(A);
  TikhonovSolution sol;
  sol.info = morozov_solve(f, b, delta_abs, &sol.g);
  sol.singular_values = f.s;
  return sol;
}

std::string to_string(IndexMethod m) {
  switch (m) {
    case IndexMethod::wlsm: return "wlsm";
    case IndexMethod::lsm: return "lsm";
    case IndexMethod::factorization: return "factorization";
    case IndexMethod::music: return "music";
  }
  return "wlsm";
}

IndexMethod index_method_from_string(const std::string& s) {
  for (auto m : {IndexMethod::wlsm, IndexMethod::lsm, IndexMethod::factorization, IndexMethod::music})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown method '" + s + "'");
}

int IndexField::argmax() const {
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

CVector test_vector(const MeasurementSet& ms, const WaveConfig& wave, const Point& x) {
  CVector psi(ms.size());
  const cplx g = wave.gamma();
  for (int j = 0; j < ms.size(); ++j) psi[j] = g * std::exp(-kI * wave.k * x.dot(ms.directions[j]));
  return psi;
}

double relative_noise_ratio(const CMatrix& F, double delta, double rho_floor) {
  const double fn = F.norm();
  if (fn == 0.0) return rho_floor;
  const double E = F.cwiseAbs().mean();
  const double noise = delta * E * static_cast<double>(F.rows()) * std::sqrt(2.0 / 3.0);
  return std::max(noise / fn, rho_floor);
}

double weighted_noise_ratio(const CMatrix& F, const CVector& sqrt_w, double delta, double rho_floor) {
  const CMatrix Fw = sqrt_w.asDiagonal() * F * sqrt_w.asDiagonal();
  const double fn = Fw.norm();
  if (fn == 0.0) return rho_floor;
  const double E = F.cwiseAbs().mean();
  // E ||W^{1/2} eps W^{1/2}||_F^2 = (delta E)^2 (2/3) (sum_j |w_j|)^2
  const double noise = delta * E * std::sqrt(2.0 / 3.0) * sqrt_w.squaredNorm();
  return std::max(noise / fn, rho_floor);
}

IndexField index_wlsm(const FarFieldMatrix& F, const MeasurementSet& ms, const WeightVector& w,
                      const SamplingGrid& grid, const WaveConfig& wave, double delta, const SamplingOptions& opt) {
  const int ny = F.size();
  if (ms.size() != ny || w.size() != ny)
    throw std::invalid_argument("index_wlsm: far field, measurement set and weights differ in size");
  const IndexMethod tag = w.method == WeightMethod::uniform ? IndexMethod::lsm : IndexMethod::wlsm;
  if (F.entries.norm() == 0.0) return zero_data_field(grid, tag, ny);

  const CVector sw = weight_sqrt(w);
  const CMatrix Fw = sw.asDiagonal() * F.entries * sw.asDiagonal();
  const auto fac = SvdFactors::of(Fw);
  const double rho = weighted_noise_ratio(F.entries, sw, delta, opt.rho_floor) * opt.target_scale;

  IndexField out = make_field(grid, tag);
  out.record.singular_values = fac.s;
  out.record.noise_ratio = rho;
  resize_record(out.record, grid.size());
  parallel_for(grid.size(), [&](int i) {
    const CVector eta = sw.cwiseProduct(test_vector(ms, wave, grid.points[i]));
    const auto r = morozov_solve(fac, eta, rho * eta.norm());
    out.values[i] = r.g_norm2 > 0.0 ? 1.0 / r.g_norm2 : 0.0;
    out.record.tau[i] = r.tau;
    out.record.discrepancy[i] = r.residual;
    out.record.target[i] = r.target;
    out.record.flag[i] = static_cast<int>(r.flag);
  });
  const bool all_below = std::all_of(out.record.flag.begin(), out.record.flag.end(),
                                     [](int f) { return f == static_cast<int>(MorozovFlag::data_below_noise); });
  if (all_below) {
    out.flat = true;
    out.record.notes.push_back("noise target exceeds every right-hand side: flat field");
  }
  return out;
}

IndexField index_lsm(const FarFieldMatrix& F, const MeasurementSet& ms, const SamplingGrid& grid,
                     const WaveConfig& wave, double delta, const SamplingOptions& opt) {
  return index_wlsm(F, ms, weights_uniform(F.size()), grid, wave, delta, opt);
}

IndexField index_factorization(const FarFieldMatrix& F, const MeasurementSet& ms, const SamplingGrid& grid,
                               const WaveConfig& wave, double eps_rank) {
  const int ny = F.size();
  if (F.entries.norm() == 0.0) return zero_data_field(grid, IndexMethod::factorization, ny);
  const auto fac = SvdFactors::of(F.entries);
  IndexField out = make_field(grid, IndexMethod::factorization);
  out.record.singular_values = fac.s;
  int rank = 0;
  while (rank < fac.s.size() && fac.s[rank] > eps_rank * fac.s[0]) ++rank;
  rank = std::max(rank, 1);
  out.record.truncation_rank = rank;
  const double fn2 = F.entries.squaredNorm();
  const double defect = (F.entries.adjoint() * F.entries - F.entries * F.entries.adjoint()).norm() / fn2;
  if (defect > 0.05) {
    std::ostringstream os;
    os << "far-field matrix is not normal (relative defect " << defect << ")";
    out.record.notes.push_back(os.str());
  }
  parallel_for(grid.size(), [&](int i) {
    const CVector c = fac.U.leftCols(rank).adjoint() * test_vector(ms, wave, grid.points[i]);
    double s = 0.0;
    for (int j = 0; j < rank; ++j) s += std::norm(c[j]) / fac.s[j];
    out.values[i] = s > 0.0 ? 1.0 / s : 0.0;
  });
  return out;
}

int music_rank_from_gap(const Eigen::VectorXd& s) {
  const int n = static_cast<int>(s.size());
  if (n < 2) return 1;
  const double floor = std::max(s[0], 1e-300) * 1e-20;
  // Search only the upper half: the tail of a limited-aperture spectrum
  // drops steeply and would otherwise win the gap contest.
  const int last = std::min(n - 1, (n + 1) / 2);
  int best = 0;
  double gap = -1.0;
  for (int j = 0; j < last; ++j) {
    const double g = std::log(std::max(s[j], floor)) - std::log(std::max(s[j + 1], floor));
    if (g > gap) {
      gap = g;
      best = j;
    }
  }
  return std::clamp(best + 1, 1, n - 1);
}

IndexField index_music(const FarFieldMatrix& F, const MeasurementSet& ms, const SamplingGrid& grid,
                       const WaveConfig& wave, int signal_rank) {
  const int ny = F.size();
  if (F.entries.norm() == 0.0) return zero_data_field(grid, IndexMethod::music, ny);
  if (signal_rank >= ny) throw std::invalid_argument("index_music: signal rank must be < N_y");
  Eigen::JacobiSVD<CMatrix> svd(F.entries, Eigen::ComputeFullU);
  const Eigen::VectorXd s = svd.singularValues();
  const int sr = signal_rank < 0 ? music_rank_from_gap(s) : signal_rank;
  IndexField out = make_field(grid, IndexMethod::music);
  out.record.singular_values = s;
  out.record.truncation_rank = sr;
  const CMatrix Un = svd.matrixU().rightCols(ny - sr);
  parallel_for(grid.size(), [&](int i) {
    CVector psi = test_vector(ms, wave, grid.points[i]);
    psi /= psi.norm();
    const double p = (Un.adjoint() * psi).squaredNorm();
    out.values[i] = p > 0.0 ? 1.0 / p : kInf;
  });
  return out;
}

StabilityNorms stability_norms(const CMatrix& F, const WeightVector& w) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  StabilityNorms out;
  auto inv = [&](const CMatrix& A, double& ratio) {
    Eigen::JacobiSVD<CMatrix> svd(A);
    const auto& s = svd.singularValues();
    const double smin = s[s.size() - 1];
    ratio = s[0] > 0.0 ? smin / s[0] : 0.0;
    if (!(smin > 1e3 * eps * s[0])) return kInf;
    return 1.0 / smin;
  };
  out.inv_norm = inv(F, out.sigma_min_ratio);
  const CVector sw = weight_sqrt(w);
  const CMatrix Fw = sw.asDiagonal() * F * sw.asDiagonal();
  out.weighted_inv_norm = inv(Fw, out.weighted_sigma_min_ratio) * sw.norm();
  return out;
}

double disk_coefficient(int n, double k, double delta) { return 2.0 * kPi * lommel_integral(n, k, delta); }

std::vector<ConcentrationRow> concentration_ratio(double delta, double r, const std::vector<int>& Ns,
                                                  const WaveConfig& wave) {
  if (!(r >= delta && delta > 0.0)) throw std::invalid_argument("concentration_ratio: need r >= delta > 0");
  const double k = wave.k;
  auto mean = [&](double rho, int nmax) {
    // (2/rho^2) sum_n (1/s_n^2) int_0^rho J_n(kt)^2 t dt, |n| <= nmax
    const int panels = std::max(4, static_cast<int>(std::ceil(2.0 * k * rho)));
    const auto g = composite_gauss_legendre(panels, 20, 0.0, rho);
    std::vector<double> inv_s2(nmax + 1);
    for (int n = 0; n <= nmax; ++n) {
      const double s = disk_coefficient(n, k, delta);
      inv_s2[n] = 1.0 / (s * s);
    }
    double acc = 0.0;
    for (size_t i = 0; i < g.nodes.size(); ++i) {
      const auto J = bessel_j_table(nmax, k * g.nodes[i]);
      double sum = J[0] * J[0] * inv_s2[0];
      for (int n = 1; n <= nmax; ++n) sum += 2.0 * J[n] * J[n] * inv_s2[n];
      acc += g.weights[i] * g.nodes[i] * sum;
    }
    return 2.0 * acc / (rho * rho);
  };
  std::vector<ConcentrationRow> rows;
  for (int N : Ns) {
    // |n| < N/2
    const int nmax = (N % 2 == 0) ? N / 2 - 1 : N / 2;
    if (nmax < 0) throw std::invalid_argument("concentration_ratio: N must be >= 1");
    ConcentrationRow row;
    row.N = N;
    row.outer_mean = mean(r, nmax);
    row.inner_mean = mean(delta, nmax);
    row.ratio = row.outer_mean / row.inner_mean;
    rows.push_back(row);
  }
  return rows;
}

double approx_solution_bound(int N, double alpha, double k, double delta, double xnorm) {
  const double e = std::numbers::e;
  const double t1 = 4.0 * modified_bessel_i0(k * delta) / std::sqrt(kPi * N) *
                    std::pow(std::sqrt(2.0) * e * k * delta / (alpha * N), 2 * N);
  const double t2 = std::pow(std::sqrt(2.0) * k * xnorm * e * e / (alpha * N), N);
  return std::exp(0.5 * k * xnorm) / (2.0 * kPi * N) * (t1 + t2);
}

ApproxSolutionResidual approx_solution_residual(double delta, const WaveConfig& wave, const ApertureSpec& spec,
                                                const WeightVector& w, const Point& x) {
  if (spec.dimension != 2) throw std::invalid_argument("approx_solution_residual: 2D only");
  const auto ms = measurement_points(spec);
  const int ny = ms.size();
  const int N = (ny - 1) / 2;
  InclusionGeometry disk;
  disk.shapes.push_back({Disk{Point::Zero(), delta}, 1.0});
  const cplx pre = wave.k * wave.k * wave.gamma();
  // strip the Born prefactor so that F_ij = sum_n s_n e^{in(theta_i - theta_j)}
  const CMatrix F = far_field_born(disk, wave, spec).entries / pre;
  const CVector sw = weight_sqrt(w);
  const CMatrix Fw = sw.asDiagonal() * F * sw.asDiagonal();

  const double xr = x.head<2>().norm();
  const double thx = xr > 0.0 ? std::atan2(x.y(), x.x()) : 0.0;
  const int mmax = N / 2;
  const auto J = bessel_j_table(mmax, wave.k * xr);
  CVector g = CVector::Zero(ny), eta(ny);
  for (int j = 0; j < ny; ++j) {
    for (int m = -mmax; m <= mmax; ++m) {
      const int am = std::abs(m);
      const double jm = (m < 0 && (am % 2)) ? -J[am] : J[am];
      g[j] += std::pow(kI, m) * (jm / disk_coefficient(m, wave.k, delta)) * std::polar(1.0, m * (thx - ms.theta[j]));
    }
    g[j] *= sw[j];
    eta[j] = sw[j] * std::exp(kI * wave.k * x.dot(ms.directions[j]));
  }
  ApproxSolutionResidual out;
  out.residual = (Fw * g - eta).norm();
  out.eta_norm = eta.norm();
  out.bound = approx_solution_bound(N, spec.alpha, wave.k, delta, xr);
  return out;
}

double inside_outside_contrast(const IndexField& f, const InclusionGeometry& geom) {
  double mx = 0.0;
  for (double v : f.values) mx = std::max(mx, std::sqrt(std::max(v, 0.0)));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (!(mx > 0.0) || !std::isfinite(mx)) return nan;
  const double pad = f.grid.spacing(0);
  double sin = 0.0, sout = 0.0;
  int nin = 0, nout = 0;
  for (int i = 0; i < f.grid.size(); ++i) {
    const double v = std::sqrt(std::max(f.values[i], 0.0)) / mx;
    const Point& p = f.grid.points[i];
    if (geom.inside(p)) {
      sin += v;
      ++nin;
    } else if (!geom.inside_dilated(p, pad, f.grid.dimension)) {
      sout += v;
      ++nout;
    }
  }
  if (nin == 0 || nout == 0 || sout == 0.0) return nan;
  return (sin / nin) / (sout / nout);
}

}  // namespace wlsm
