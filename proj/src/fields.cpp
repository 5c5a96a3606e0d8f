#include "ewlat/fields.hpp"

#include <fftw3.h>

#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>

#include <Eigen/SparseCholesky>

#include "ewlat/params.hpp"

namespace ewlat {

GridField::GridField(GridPtr g, int flux_, int components) : grid(std::move(g)), flux(flux_) {
  if (!grid) throw ValidationError("GridField needs a grid");
  if (components != 1 && components != 2) throw ValidationError("GridField has 1 or 2 components");
  if (flux_ < 0) throw ValidationError("flux sector must be non-negative");
  v = Eigen::MatrixXcd::Zero(grid->size(), components);
}

GridField GridField::scalar(GridPtr g, int flux, const CVec& values) {
  GridField f(std::move(g), flux, 1);
  if (values.size() != f.v.rows()) throw ValidationError("scalar field size mismatch");
  f.v.col(0) = values;
  return f;
}

GridField GridField::vector(GridPtr g, int flux, const CVec& c0, const CVec& c1) {
  GridField f(std::move(g), flux, 2);
  if (c0.size() != f.v.rows() || c1.size() != f.v.rows())
    throw ValidationError("vector field size mismatch");
  f.v.col(0) = c0;
  f.v.col(1) = c1;
  return f;
}

namespace {

bool same_grid(const Grid& a, const Grid& b) {
  return a.N() == b.N() && a.shape().tau() == b.shape().tau();
}

void require_grid(const GridField& f, const char* what) {
  if (!f.grid) throw ValidationError(std::string(what) + ": field has no grid");
}

}  // namespace

void require_compatible(const GridField& a, const GridField& b, const char* what) {
  require_grid(a, what);
  require_grid(b, what);
  if (!same_grid(*a.grid, *b.grid)) throw ValidationError(std::string(what) + ": grids differ");
  if (a.flux != b.flux) throw ValidationError(std::string(what) + ": flux sectors differ");
  if (a.components() != b.components())
    throw ValidationError(std::string(what) + ": component counts differ");
}

cplx average(const GridField& f) {
  require_grid(f, "average");
  if (f.flux != 0) throw ValidationError("average: only defined for periodic fields");
  if (f.components() != 1) throw ValidationError("average: expects a scalar");
  return f.v.col(0).mean();
}

cplx inner(const GridField& f, const GridField& g) {
  require_compatible(f, g, "inner");
  cplx s = 0.0;
  for (int c = 0; c < f.components(); ++c) s += f.v.col(c).dot(g.v.col(c));
  return s / double(f.v.rows());
}

FieldState FieldState::constant(GridPtr g, int n, double phi_value) {
  if (n < 1) throw ValidationError("FieldState needs flux n >= 1");
  FieldState s{GridField(g, n, 2), GridField(g, 0, 2), GridField(g, 0, 2), GridField(g, 0, 1)};
  s.phi.v.setConstant(phi_value);
  return s;
}

void FieldState::validate() const {
  require_grid(w, "FieldState.w");
  if (w.flux < 1 || w.components() != 2) throw ValidationError("FieldState.w must be a flux-sector 2-vector");
  GridField ref2(w.grid, 0, 2), ref1(w.grid, 0, 1);
  require_compatible(alpha, ref2, "FieldState.alpha");
  require_compatible(z, ref2, "FieldState.z");
  require_compatible(phi, ref1, "FieldState.phi");
}

double norm(const GridField& f) { return std::sqrt(std::max(0.0, inner(f, f).real())); }

// ---------------------------------------------------------------- Spectral

struct Spectral::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~Plans() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

namespace {

// Plan creation is not thread safe in FFTW; execution on fresh arrays is.
std::mutex g_plan_mutex;

std::shared_ptr<Spectral::Plans>* plan_slot(int N) {
  static std::map<int, std::shared_ptr<Spectral::Plans>> cache;
  return &cache[N];
}

int signed_mode(int idx, int N) { return idx < N / 2 ? idx : idx - N; }

}  // namespace

Spectral::Spectral(const Grid& grid) : grid_(grid) {
  const int N = grid.N();
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto* slot = plan_slot(N);
    if (!*slot) {
      auto p = std::make_shared<Plans>();
      std::vector<cplx> a(size_t(N) * N), b(size_t(N) * N);
      auto* in = reinterpret_cast<fftw_complex*>(a.data());
      auto* out = reinterpret_cast<fftw_complex*>(b.data());
      const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
      p->fwd = fftw_plan_dft_2d(N, N, in, out, FFTW_FORWARD, flags);
      p->bwd = fftw_plan_dft_2d(N, N, in, out, FFTW_BACKWARD, flags);
      *slot = p;
    }
    plans_ = *slot;
  }
  const int M = N * N;
  kx_.resize(M);
  ky_.resize(M);
  k2_.resize(M);
  mask_.assign(M, true);
  const auto& K1 = grid.shape().K(0);
  const auto& K2 = grid.shape().K(1);
  for (int i1 = 0; i1 < N; ++i1) {
    for (int i2 = 0; i2 < N; ++i2) {
      const int idx = i1 * N + i2;
      if (i1 == N / 2 || i2 == N / 2) {
        mask_[idx] = false;
        kx_[idx] = ky_[idx] = k2_[idx] = 0.0;
        continue;
      }
      const Eigen::Vector2d k = double(signed_mode(i1, N)) * K1 + double(signed_mode(i2, N)) * K2;
      kx_[idx] = k.x();
      ky_[idx] = k.y();
      k2_[idx] = k.squaredNorm();
    }
  }
}

std::pair<int, int> Spectral::mode(int idx) const {
  const int N = grid_.N();
  return {signed_mode(idx / N, N), signed_mode(idx % N, N)};
}

int Spectral::flat(int m1, int m2) const {
  const int N = grid_.N();
  return ((m1 % N + N) % N) * N + ((m2 % N + N) % N);
}

CVec Spectral::forward(const CVec& f) const {
  if (f.size() != grid_.size()) throw ValidationError("Spectral::forward: size mismatch");
  CVec in = f;
  CVec out(f.size());
  fftw_execute_dft(plans_->fwd, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

CVec Spectral::backward(const CVec& F) const {
  if (F.size() != grid_.size()) throw ValidationError("Spectral::backward: size mismatch");
  CVec in = F;
  CVec out(F.size());
  fftw_execute_dft(plans_->bwd, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out / double(F.size());
}

CVec Spectral::deriv(const CVec& f, int j) const {
  CVec F = forward(f);
  const auto& k = j == 0 ? kx_ : ky_;
  for (int i = 0; i < F.size(); ++i) F[i] *= cplx(0.0, k[i]);
  return backward(F);
}

CVec Spectral::laplacian(const CVec& f) const {
  return multiplier(f, [](double k2) { return -k2; });
}

CVec Spectral::curl(const CVec& v1, const CVec& v2) const {
  CVec A = forward(v1), B = forward(v2);
  CVec C(A.size());
  for (int i = 0; i < C.size(); ++i) C[i] = cplx(0.0, kx_[i]) * B[i] - cplx(0.0, ky_[i]) * A[i];
  return backward(C);
}

std::pair<CVec, CVec> Spectral::curl_adj(const CVec& s) const {
  CVec S = forward(s);
  CVec A(S.size()), B(S.size());
  for (int i = 0; i < S.size(); ++i) {
    A[i] = cplx(0.0, ky_[i]) * S[i];
    B[i] = -cplx(0.0, kx_[i]) * S[i];
  }
  return {backward(A), backward(B)};
}

CVec Spectral::div(const CVec& v1, const CVec& v2) const {
  CVec A = forward(v1), B = forward(v2);
  CVec D(A.size());
  for (int i = 0; i < D.size(); ++i) D[i] = cplx(0.0, kx_[i]) * A[i] + cplx(0.0, ky_[i]) * B[i];
  return backward(D);
}

std::pair<CVec, CVec> Spectral::project_divfree(const CVec& v1, const CVec& v2) const {
  CVec A = forward(v1), B = forward(v2);
  for (int i = 0; i < A.size(); ++i) {
    if (i == 0) continue;  // constants are divergence free
    if (!mask_[i]) {
      A[i] = B[i] = 0.0;
      continue;
    }
    const cplx kv = kx_[i] * A[i] + ky_[i] * B[i];
    A[i] -= kx_[i] * kv / k2_[i];
    B[i] -= ky_[i] * kv / k2_[i];
  }
  return {backward(A), backward(B)};
}

// ---------------------------------------------------------- LinkDifference

CVec FluxCalculus::dbar_apply(const CVec& f) const {
  return grad(f, 0) + cplx(0.0, 1.0) * grad(f, 1);
}

CVec FluxCalculus::dbar_adj_apply(const CVec& f) const {
  return -grad(f, 0) + cplx(0.0, 1.0) * grad(f, 1);
}

namespace {

int floor_div(int a, int N) { return a >= 0 ? a / N : -((-a + N - 1) / N); }

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

LinkDifference::LinkDifference(const Grid& grid, int n) : grid_(grid), n_(n) {
  if (n < 0) throw ValidationError("LinkDifference: flux must be non-negative");
  const double N = grid.N();
  for (int i = 0; i < 2; ++i) {
    const int d1 = i == 0 ? 1 : 0, d2 = i == 0 ? 0 : 1;
    Dt_[i] = (transport(d1, d2) - transport(-d1, -d2)) * cplx(N / 2.0);
  }
  const auto& EinvT = grid.shape().EinvT();
  for (int j = 0; j < 2; ++j) grad_[j] = Dt_[0] * cplx(EinvT(j, 0)) + Dt_[1] * cplx(EinvT(j, 1));

  SpMat I(grid.size(), grid.size());
  I.setIdentity();
  const auto& G = grid.shape().Ginv();
  SpMat second = (transport(1, 0) - 2.0 * I + transport(-1, 0)) * cplx(G(0, 0) * N * N) +
                 (transport(0, 1) - 2.0 * I + transport(0, -1)) * cplx(G(1, 1) * N * N);
  SpMat mixed = transport(1, 1) - transport(1, -1) - transport(-1, 1) + transport(-1, -1);
  second += mixed * cplx(2.0 * G(0, 1) * N * N / 4.0);
  neg_lap_ = -second;
}

SpMat LinkDifference::transport(int d1, int d2) const {
  const int N = grid_.N();
  const auto& E = grid_.shape().E();
  const double hn = 0.5 * n_;
  const Eigen::Vector2d dphys = E * Eigen::Vector2d(double(d1) / N, double(d2) / N);
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(size_t(N) * N);
  for (int j1 = 0; j1 < N; ++j1) {
    for (int j2 = 0; j2 < N; ++j2) {
      const int J1 = j1 + d1, J2 = j2 + d2;
      const int s1 = floor_div(J1, N), s2 = floor_div(J2, N);
      const int k1 = J1 - s1 * N, k2 = J2 - s2 * N;
      const Eigen::Vector2d x = grid_.point(j1, j2);
      const Eigen::Vector2d xp = grid_.point(k1, k2);
      const Eigen::Vector2d sphys = E * Eigen::Vector2d(s1, s2);
      // Link phase U(x, x+d) times the sector condition f(x'+s) = e^{i(...)} f(x').
      const double ph = -hn * cross(x, dphys) + hn * cross(sphys, xp) + M_PI * n_ * double(s1) * s2;
      trip.emplace_back(grid_.index(j1, j2), grid_.index(k1, k2), std::polar(1.0, ph));
    }
  }
  SpMat T(grid_.size(), grid_.size());
  T.setFromTriplets(trip.begin(), trip.end());
  return T;
}

SpMat LinkDifference::dbar() const { return grad_[0] + cplx(0.0, 1.0) * grad_[1]; }

SpMat LinkDifference::dbar_adj() const { return SpMat(dbar().adjoint()); }

// ------------------------------------------------------- covariant calculus

namespace {

void require_connection(const GridField& f, const GridField* q) {
  if (!q) return;
  require_grid(*q, "connection");
  if (q->flux != 0 || q->components() != 2)
    throw ValidationError("connection must be a periodic 2-vector");
  if (!same_grid(*f.grid, *q->grid)) throw ValidationError("connection lives on another grid");
}

// Applies nabla_j (no q') or its adjoint to a flat vector in the field's sector.
struct Nabla {
  const GridField& f;
  std::unique_ptr<Spectral> sp;
  std::unique_ptr<LinkDifference> ld;
  explicit Nabla(const GridField& field) : f(field) {
    if (f.flux == 0)
      sp = std::make_unique<Spectral>(*f.grid);
    else
      ld = std::make_unique<LinkDifference>(*f.grid, f.flux);
  }
  CVec apply(const CVec& u, int j) const { return sp ? sp->deriv(u, j) : CVec(ld->grad_matrix(j) * u); }
  // Both discretizations are exactly anti-Hermitian.
  CVec adjoint(const CVec& u, int j) const { return -apply(u, j); }
};

}  // namespace

GridField cov_grad(const GridField& f, const GridField* qprime) {
  require_grid(f, "cov_grad");
  if (f.components() != 1) throw ValidationError("cov_grad expects a scalar");
  require_connection(f, qprime);
  Nabla nab(f);
  GridField out(f.grid, f.flux, 2);
  const CVec u = f.v.col(0);
  for (int j = 0; j < 2; ++j) {
    out.v.col(j) = nab.apply(u, j);
    if (qprime) out.v.col(j) -= cplx(0.0, 1.0) * qprime->v.col(j).cwiseProduct(u);
  }
  return out;
}

GridField curl2(const GridField& v, const GridField* qprime) {
  require_grid(v, "curl2");
  if (v.components() != 2) throw ValidationError("curl2 expects a 2-vector");
  require_connection(v, qprime);
  Nabla nab(v);
  CVec c = nab.apply(v.v.col(1), 0) - nab.apply(v.v.col(0), 1);
  if (qprime) {
    c -= cplx(0.0, 1.0) *
         (qprime->v.col(0).cwiseProduct(v.v.col(1)) - qprime->v.col(1).cwiseProduct(v.v.col(0)));
  }
  return GridField::scalar(v.grid, v.flux, c);
}

GridField curl2_adj(const GridField& s, const GridField* qprime) {
  require_grid(s, "curl2_adj");
  if (s.components() != 1) throw ValidationError("curl2_adj expects a scalar");
  require_connection(s, qprime);
  Nabla nab(s);
  const CVec u = s.v.col(0);
  CVec a = -nab.adjoint(u, 1);
  CVec b = nab.adjoint(u, 0);
  if (qprime) {
    // (nabla_q)_j^* = nabla_j^* + i q_j
    a -= cplx(0.0, 1.0) * qprime->v.col(1).cwiseProduct(u);
    b += cplx(0.0, 1.0) * qprime->v.col(0).cwiseProduct(u);
  }
  return GridField::vector(s.grid, s.flux, a, b);
}

GridField project_divfree(const GridField& v) {
  require_grid(v, "project_divfree");
  if (v.flux != 0 || v.components() != 2)
    throw ValidationError("project_divfree expects a periodic 2-vector");
  Spectral sp(*v.grid);
  auto [a, b] = sp.project_divfree(v.v.col(0), v.v.col(1));
  return GridField::vector(v.grid, 0, a, b);
}

std::pair<GridField, GridField> hodge_split(const GridField& w) {
  require_grid(w, "hodge_split");
  if (w.flux == 0 || w.components() != 2)
    throw ValidationError("hodge_split expects a flux-sector 2-vector");
  LinkDifference ld(*w.grid, w.flux);
  SpMat A = SpMat(ld.grad_matrix(0).adjoint()) * ld.grad_matrix(0) + SpMat(ld.grad_matrix(1).adjoint()) * ld.grad_matrix(1);
  CVec rhs = ld.grad_matrix(0).adjoint() * w.v.col(0) + ld.grad_matrix(1).adjoint() * w.v.col(1);
  Eigen::SimplicialLDLT<SpMat> solver(A);
  if (solver.info() != Eigen::Success) throw std::runtime_error("hodge_split: factorization failed");
  CVec f = solver.solve(rhs);
  GridField phi = GridField::scalar(w.grid, w.flux, f);
  GridField w0 = w;
  w0.v.col(0) -= ld.grad_matrix(0) * f;
  w0.v.col(1) -= ld.grad_matrix(1) * f;
  return {w0, phi};
}

void write_csv(std::ostream& os, const GridField& f) {
  require_grid(f, "write_csv");
  const int N = f.grid->N();
  os << std::setprecision(17);
  os << "t1,t2";
  if (f.components() == 1)
    os << ",re,im\n";
  else
    os << ",re1,im1,re2,im2\n";
  for (int j1 = 0; j1 < N; ++j1) {
    for (int j2 = 0; j2 < N; ++j2) {
      const int k = f.grid->index(j1, j2);
      os << double(j1) / N << ',' << double(j2) / N;
      for (int c = 0; c < f.components(); ++c) os << ',' << f.v(k, c).real() << ',' << f.v(k, c).imag();
      os << '\n';
    }
  }
}

}  // namespace ewlat
