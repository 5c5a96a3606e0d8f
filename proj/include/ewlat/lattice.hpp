#pragma once

#include <array>
#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace ewlat {

using cplx = std::complex<double>;

/// Integer 2x2 matrix [[a, b], [c, d]] acting on tau by (a tau + b)/(c tau + d).
using Mat2i = std::array<long long, 4>;

/// Lattice Z e1 + Z e2 with e2/e1 = tau (as complex numbers), scaled to cell area 2*pi.
class LatticeShape {
 public:
  explicit LatticeShape(cplx tau);

  cplx tau() const { return tau_; }
  /// Basis vector e_i, i in {0, 1}.
  const Eigen::Vector2d& e(int i) const { return e_[i]; }
  /// Dual vector K_i with K_i . e_j = 2 pi delta_ij.
  const Eigen::Vector2d& K(int i) const { return K_[i]; }
  /// Matrix with columns e1, e2 (x = E t).
  const Eigen::Matrix2d& E() const { return E_; }
  /// E^{-T}: Cartesian gradient = Einv_T * (d/dt1, d/dt2).
  const Eigen::Matrix2d& EinvT() const { return EinvT_; }
  /// Inverse metric (E^T E)^{-1}, so Laplacian = sum G^{ij} d_ti d_tj.
  const Eigen::Matrix2d& Ginv() const { return Ginv_; }
  /// |e1| = sqrt(2 pi / Im tau).
  double length() const { return len_; }
  double cell_area() const;

 private:
  cplx tau_;
  double len_;
  std::array<Eigen::Vector2d, 2> e_;
  std::array<Eigen::Vector2d, 2> K_;
  Eigen::Matrix2d E_, EinvT_, Ginv_;
};

/// Moebius action of an integer matrix on tau.
cplx mobius(const Mat2i& m, cplx tau);

/// True when tau lies in -1/2 < Re tau <= 1/2, |tau| >= 1 (with the tie
/// convention: |tau| = 1 requires Re tau >= 0), up to tolerance tol.
bool in_fundamental_domain(cplx tau, double tol = 1e-12);

/// Reduces tau to the SL(2,Z) fundamental domain. Returns the reduced value
/// and the SL(2,Z) matrix mapping tau to it.
std::pair<cplx, Mat2i> reduce_to_fundamental(cplx tau);

/// Uniform N x N sampling of the cell in lattice coordinates t_i = j_i/N.
/// Nodes are ordered row-major in (t1, t2): index = j1 * N + j2.
class Grid {
 public:
  Grid(const LatticeShape& shape, int N);

  const LatticeShape& shape() const { return shape_; }
  int N() const { return N_; }
  int size() const { return N_ * N_; }
  int index(int j1, int j2) const { return j1 * N_ + j2; }
  /// Physical coordinates of node (j1, j2).
  Eigen::Vector2d point(int j1, int j2) const;
  /// Physical coordinates of node with flat index k.
  Eigen::Vector2d point(int k) const { return point(k / N_, k % N_); }
  /// Quadrature weight |cell|/N^2.
  double weight() const { return shape_.cell_area() / (double(N_) * N_); }

 private:
  LatticeShape shape_;
  int N_;
};

/// Preconditions: N >= 8, N even.
Grid make_grid(const LatticeShape& shape, int N);

}  // namespace ewlat
