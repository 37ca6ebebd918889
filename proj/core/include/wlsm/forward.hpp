#pragma once

#include "wlsm/geometry.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace wlsm {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct Provenance {
  std::string model = "born";  // "exact" or "born"
  double noise_level = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
};

// Rows are observation directions y_i, columns incidence directions d_j.
struct FarFieldMatrix {
  CMatrix entries;
  Provenance provenance;
  int dimension = 2;
  double k = 0.0;
  double alpha = 0.0;
  double beta = 0.0;

  int size() const { return static_cast<int>(entries.rows()); }
};

// Uniform cell-centered lattice (spacing h, centers at (i + 1/2) h) restricted
// to cells whose center lies in a shape. Each node carries q and the weight
// |D_s|/N_s of the shape s it belongs to (first match).
struct VolumeMesh {
  int dimension = 2;
  double h = 0.0;
  std::vector<Point> nodes;
  std::vector<double> weights;
  std::vector<double> q;
  std::vector<std::array<int, 3>> cell;

  int size() const { return static_cast<int>(nodes.size()); }
  double volume() const;
};

VolumeMesh build_mesh(const InclusionGeometry& geom, int dimension, double h);

// Total fields u(z_n; d_j), one column per incidence direction.
struct TotalField {
  CMatrix u;
  double residual = 0.0;    // max relative residual over columns
  double rcond = 0.0;       // reciprocal condition estimate of the system
};

TotalField solve_total_field(const VolumeMesh& mesh, const WaveConfig& wave,
                             const std::vector<Point>& incidence);

// Mean of the fundamental solution over the disk (ball) with the same measure
// as one cell; replaces the singular diagonal entry.
cplx singular_cell_mean(const WaveConfig& wave, double h);
cplx fundamental_solution(const WaveConfig& wave, double r);

FarFieldMatrix far_field_exact(const VolumeMesh& mesh, const WaveConfig& wave,
                               const ApertureSpec& spec);
FarFieldMatrix far_field_exact(const VolumeMesh& mesh, const WaveConfig& wave,
                               const ApertureSpec& spec, TotalField* field);

// Analytic Born data for disks, boxes, ellipses and balls; kites fall back to
// mesh quadrature with spacing quad_h (0 picks scale/150). Shapes are summed
// independently, so they are assumed disjoint.
FarFieldMatrix far_field_born(const InclusionGeometry& geom, const WaveConfig& wave,
                              const ApertureSpec& spec, double quad_h = 0.0);

// Born integral evaluated with the mesh quadrature itself.
FarFieldMatrix far_field_born_mesh(const VolumeMesh& mesh, const WaveConfig& wave,
                                   const ApertureSpec& spec);

// Plane-wave volume integral of one primitive, int e^{i p.z} dz.
cplx shape_fourier(const Primitive& shape, const Point& p);

// u + E(|u|) delta eps, eps complex with independent U[-1,1] parts, drawn
// row-major (re then im) from a seeded mt19937_64.
FarFieldMatrix add_noise(const FarFieldMatrix& F, double delta, std::uint64_t seed);

void write_far_field(std::ostream& os, const FarFieldMatrix& F);
FarFieldMatrix read_far_field(std::istream& is);

}  // namespace wlsm
