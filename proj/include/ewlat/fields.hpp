#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ewlat/lattice.hpp"

namespace ewlat {

using GridPtr = std::shared_ptr<const Grid>;
using CVec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<cplx>;

inline GridPtr share(const Grid& g) { return std::make_shared<const Grid>(g); }

/// Samples of a scalar (1 column) or 2-vector (2 columns) field on a grid.
/// flux == 0 is the periodic sector; flux == n > 0 is the sector
/// w(x+s) = exp(i((n/2) s x x + c_s)) w(x) with c_{e1} = c_{e2} = 0.
struct GridField {
  GridPtr grid;
  int flux = 0;
  Eigen::MatrixXcd v;

  GridField() = default;
  GridField(GridPtr g, int flux_, int components);

  int components() const { return int(v.cols()); }
  CVec comp(int c) const { return v.col(c); }

  static GridField scalar(GridPtr g, int flux, const CVec& values);
  static GridField vector(GridPtr g, int flux, const CVec& c0, const CVec& c1);
};

/// Candidate configuration (w, a, z, phi). The gauge field is stored as the
/// deviation alpha = a - a^n/e (periodic, real); the background is analytic.
struct FieldState {
  GridField w;      // flux-n 2-vector
  GridField alpha;  // periodic real 2-vector
  GridField z;      // periodic real 2-vector
  GridField phi;    // periodic real scalar

  /// Zero fields except phi = phi_value on the given grid and flux.
  static FieldState constant(GridPtr g, int n, double phi_value);
  /// Throws unless all four fields share the grid and have the right sectors.
  void validate() const;
};

/// Throws unless a and b share grid, sector and component count.
void require_compatible(const GridField& a, const GridField& b, const char* what);

/// Cell average of a periodic scalar.
cplx average(const GridField& f);
/// <f, g> = average of conj(f) . g over components (any matching sector).
cplx inner(const GridField& f, const GridField& g);
double norm(const GridField& f);

/// Spectral calculus for periodic fields on the index torus (FFT based).
/// Nyquist rows (m_i = N/2) are annihilated by every operator.
class Spectral {
 public:
  explicit Spectral(const Grid& grid);

  const Grid& grid() const { return grid_; }
  int N() const { return grid_.N(); }

  CVec forward(const CVec& f) const;
  /// Inverse transform including the 1/N^2 factor.
  CVec backward(const CVec& F) const;

  /// Cartesian wave vector of flat spectral index (zero on Nyquist rows).
  double kx(int idx) const { return kx_[idx]; }
  double ky(int idx) const { return ky_[idx]; }
  double k2(int idx) const { return k2_[idx]; }
  bool active(int idx) const { return mask_[idx]; }
  /// Signed mode numbers of a flat index.
  std::pair<int, int> mode(int idx) const;
  int flat(int m1, int m2) const;

  CVec deriv(const CVec& f, int j) const;
  CVec laplacian(const CVec& f) const;
  /// curl v = d1 v2 - d2 v1.
  CVec curl(const CVec& v1, const CVec& v2) const;
  /// curl* s = (d2 s, -d1 s).
  std::pair<CVec, CVec> curl_adj(const CVec& s) const;
  CVec div(const CVec& v1, const CVec& v2) const;
  std::pair<CVec, CVec> project_divfree(const CVec& v1, const CVec& v2) const;
  struct Plans;

  /// Applies the Fourier multiplier mult(|k|^2) (Nyquist rows set to 0).
  template <class F>
  CVec multiplier(const CVec& f, F mult) const {
    CVec F_ = forward(f);
    for (int i = 0; i < F_.size(); ++i) F_[i] = mask_[i] ? F_[i] * mult(k2_[i]) : cplx(0.0);
    return backward(F_);
  }

 private:
  Grid grid_;
  Eigen::VectorXd kx_, ky_, k2_;
  std::vector<bool> mask_;
  std::shared_ptr<Plans> plans_;
};

/// Covariant derivative (nabla_{a^n})_j on flat flux-sector node vectors
/// together with its exact adjoint for the averaged inner product.
class FluxCalculus {
 public:
  virtual ~FluxCalculus() = default;
  virtual int flux() const = 0;
  virtual CVec grad(const CVec& f, int j) const = 0;
  virtual CVec grad_adjoint(const CVec& f, int j) const = 0;

  /// dbar* f = -nabla_1 f + i nabla_2 f.
  CVec dbar_adj_apply(const CVec& f) const;
  CVec dbar_apply(const CVec& f) const;
};

/// Covariant central differences with Peierls link phases for the flux-n
/// background a^n = (n/2) J x. All matrices act on flat node vectors.
class LinkDifference : public FluxCalculus {
 public:
  LinkDifference(const Grid& grid, int n);

  const Grid& grid() const { return grid_; }
  int flux() const override { return n_; }
  CVec grad(const CVec& f, int j) const override { return grad_[j] * f; }
  CVec grad_adjoint(const CVec& f, int j) const override { return -(grad_[j] * f); }

  /// Parallel transport by (d1, d2) grid steps: (T f)(x) = U(x, x+d) f(x+d).
  SpMat transport(int d1, int d2) const;
  /// Central difference along lattice direction i (derivative in t_i).
  const SpMat& Dt(int i) const { return Dt_[i]; }
  /// Cartesian covariant derivative (nabla_{a^n})_j as a matrix.
  const SpMat& grad_matrix(int j) const { return grad_[j]; }
  /// dbar = nabla_1 + i nabla_2 and its exact adjoint.
  SpMat dbar() const;
  SpMat dbar_adj() const;
  /// Compact second-order -Delta_{a^n} (Hermitian, nearest and diagonal neighbours).
  const SpMat& neg_laplacian() const { return neg_lap_; }

 private:
  Grid grid_;
  int n_;
  SpMat Dt_[2];
  SpMat grad_[2];
  SpMat neg_lap_;
};

/// Covariant gradient of a scalar. Periodic sector: spectral. Flux sector:
/// link-phase central differences. qprime (periodic real 2-vector, optional)
/// adds -i q' f.
GridField cov_grad(const GridField& f, const GridField* qprime = nullptr);
/// curl_q v = (nabla_q)_1 v2 - (nabla_q)_2 v1.
GridField curl2(const GridField& v, const GridField* qprime = nullptr);
/// Exact discrete adjoint of curl2.
GridField curl2_adj(const GridField& s, const GridField* qprime = nullptr);
/// Projection onto divergence-free periodic vector fields; constants pass through.
GridField project_divfree(const GridField& v);

/// Hodge split of a flux-sector 2-vector: w = w0 + nabla f with div w0 = 0
/// using the link-difference stencil. Returns (w0, f).
std::pair<GridField, GridField> hodge_split(const GridField& w);

/// Writes (t1, t2, re, im) rows (two re/im pairs for 2-vectors).
void write_csv(std::ostream& os, const GridField& f);

}  // namespace ewlat
