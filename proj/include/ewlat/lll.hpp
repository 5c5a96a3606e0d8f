#pragma once

#include <vector>

#include "ewlat/fields.hpp"

namespace ewlat {

/// theta_n(z) = sum_m d_{m mod n} exp(i pi m^2 tau / n + 2 pi i m z).
/// Satisfies theta(z+1) = theta(z) and theta(z+tau) = e^{-2 pi i n z} e^{-i pi n tau} theta(z).
struct ThetaSeries {
  cplx tau;
  int n = 1;
  std::vector<cplx> coeffs{1.0};
  /// Terms |m - m0| <= M around the dominant index m0.
  int M = 0;

  ThetaSeries(cplx tau_, int n_, std::vector<cplx> coeffs_ = {});
  /// Default truncation: ceil(sqrt(34 n / (pi Im tau))) + 2.
  static int default_truncation(cplx tau, int n);
};

struct ThetaValue {
  cplx value;
  /// Bound on the neglected terms relative to the largest retained term.
  double tail;
};

ThetaValue theta_eval(const ThetaSeries& series, cplx z);

/// Evaluates exp(A) * theta(z) with the Gaussian prefactor folded into each
/// term (no intermediate overflow). Used for the lowest-Landau-level state.
cplx theta_scaled(const ThetaSeries& series, cplx z, cplx logprefactor);

/// Lowest-Landau-level state beta (flux-n scalar, <|beta|^2> = 1/2) and
/// chi = (beta, i beta) with <|chi|^2> = 1.
struct LLLState {
  GridField beta;
  GridField chi;
  int n = 1;
  ThetaSeries series;
  /// beta(x) = scale * exp(-(pi n / (2 Im tau)) (|z|^2 - z^2)) theta(z).
  double scale = 1.0;
  double tail = 0.0;

  /// Unnormalized-grid evaluation at an arbitrary physical point.
  cplx beta_at(const Eigen::Vector2d& x) const;
};

/// Preconditions: seed empty (defaults to d_0 = 1, rest 0) or of length n.
/// truncation > 0 overrides the default theta truncation M.
LLLState build_chi(const LatticeShape& shape, int n, const GridPtr& grid,
                   const std::vector<cplx>& seed = {}, int truncation = 0);

/// Normalized (dbar*)^k state computed with the given calculus. Throws
/// std::runtime_error when the norm collapses below 1e-10.
GridField ladder_up(const GridField& state, int k, const FluxCalculus& calc);

/// Winding numbers of beta around the plaquettes of the half-step shifted
/// grid (whose plaquette centres are the grid nodes). Entry index is the
/// node index of the enclosed centre.
std::vector<int> vortex_windings(const LLLState& state);

/// Orthonormal Landau-level basis phi_{k,r}, k = 0..K, r = 0..n-1, in the
/// flux-n sector: dbar phi_k = sqrt(2 n k) phi_{k-1}, dbar* phi_k = sqrt(2 n (k+1)) phi_{k+1},
/// phi_k(-x) = (-1)^k phi_k(x) for r = 0, and <|phi|^2> = 1.
class LandauBasis {
 public:
  LandauBasis(const GridPtr& grid, int n, int K);

  int n() const { return n_; }
  int K() const { return K_; }
  int size() const { return int(S_.cols()); }
  /// Column index of phi_{k,r}.
  int index(int k, int r) const { return k * n_ + r; }
  const GridPtr& grid() const { return grid_; }
  /// Node samples, one column per basis state.
  const Eigen::MatrixXcd& samples() const { return S_; }
  CVec state(int k, int r = 0) const { return S_.col(index(k, r)); }

  /// Coefficients <phi_{k,r}, f> (averaged inner product).
  CVec project(const CVec& f) const;
  CVec synthesize(const CVec& c) const { return S_ * c; }

  /// Coefficient matrix of dbar restricted to levels 0..K.
  Eigen::MatrixXcd dbar_matrix() const;
  /// Cartesian covariant derivative on coefficients: (dbar - dbar*)/2 and (dbar + dbar*)/(2i).
  Eigen::MatrixXcd grad_matrix(int j) const;

 private:
  GridPtr grid_;
  int n_, K_;
  Eigen::MatrixXcd S_;
};

/// Covariant calculus through the Landau basis: grad = S D P, adjoint = S D^H P.
/// Exact on the span of levels 0..K; annihilates everything orthogonal to it.
class LandauCalculus : public FluxCalculus {
 public:
  explicit LandauCalculus(std::shared_ptr<const LandauBasis> basis);
  int flux() const override { return basis_->n(); }
  CVec grad(const CVec& f, int j) const override;
  CVec grad_adjoint(const CVec& f, int j) const override;
  const LandauBasis& basis() const { return *basis_; }

 private:
  std::shared_ptr<const LandauBasis> basis_;
  Eigen::MatrixXcd D_[2];
};

}  // namespace ewlat
