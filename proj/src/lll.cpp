#include "ewlat/lll.hpp"

#include <cmath>
#include <stdexcept>

#include "ewlat/params.hpp"

namespace ewlat {

namespace {

constexpr cplx I1(0.0, 1.0);

int pmod(long long a, int n) { return int(((a % n) + n) % n); }

}  // namespace

ThetaSeries::ThetaSeries(cplx tau_, int n_, std::vector<cplx> coeffs_)
    : tau(tau_), n(n_), coeffs(std::move(coeffs_)) {
  if (!(tau.imag() > 0.0)) throw ValidationError("theta series needs Im tau > 0");
  if (n < 1) throw ValidationError("theta series needs n >= 1");
  if (coeffs.empty()) {
    coeffs.assign(n, 0.0);
    coeffs[0] = 1.0;
  }
  if (int(coeffs.size()) != n) throw ValidationError("theta seed must have exactly n coefficients");
  M = default_truncation(tau, n);
}

int ThetaSeries::default_truncation(cplx tau, int n) {
  return int(std::ceil(std::sqrt(34.0 * n / (M_PI * tau.imag())))) + 2;
}

cplx theta_scaled(const ThetaSeries& s, cplx z, cplx logprefactor) {
  const long long m0 = std::llround(-double(s.n) * z.imag() / s.tau.imag());
  cplx sum = 0.0;
  for (long long m = m0 - s.M; m <= m0 + s.M; ++m) {
    const cplx d = s.coeffs[pmod(m, s.n)];
    if (d == 0.0) continue;
    const double md = double(m);
    sum += d * std::exp(logprefactor + I1 * M_PI * md * md * s.tau / double(s.n) + 2.0 * M_PI * I1 * md * z);
  }
  return sum;
}

ThetaValue theta_eval(const ThetaSeries& s, cplx z) {
  // Term moduli are Gaussian in m around m* = -n Im z / Im tau with |m0 - m*| <= 1/2.
  double tail = 0.0;
  for (int j = s.M + 1; j < s.M + 60; ++j) {
    const double t = 2.0 * std::exp(-M_PI * s.tau.imag() * (j - 0.5) * (j - 0.5) / s.n);
    tail += t;
    if (t < 1e-300) break;
  }
  return {theta_scaled(s, z, 0.0), tail};
}

namespace {

cplx lll_logprefactor(cplx z, double n, double imtau) {
  return -(M_PI * n / (2.0 * imtau)) * (std::norm(z) - z * z);
}

}  // namespace

cplx LLLState::beta_at(const Eigen::Vector2d& x) const {
  const double L = beta.grid->shape().length();
  const cplx z = cplx(x.x(), x.y()) / L;
  return scale * theta_scaled(series, z, lll_logprefactor(z, n, series.tau.imag()));
}

LLLState build_chi(const LatticeShape& shape, int n, const GridPtr& grid,
                   const std::vector<cplx>& seed, int truncation) {
  if (!grid) throw ValidationError("build_chi needs a grid");
  if (n < 1) throw ValidationError("build_chi needs n >= 1");
  if (!seed.empty() && int(seed.size()) != n)
    throw ValidationError("theta seed length must equal the flux n");
  LLLState st{GridField(grid, n, 1), GridField(grid, n, 2), n, ThetaSeries(shape.tau(), n, seed)};
  if (truncation > 0) st.series.M = truncation;
  st.tail = theta_eval(st.series, 0.0).tail;
  const double L = shape.length();
  CVec b(grid->size());
  for (int k = 0; k < grid->size(); ++k) {
    const Eigen::Vector2d x = grid->point(k);
    const cplx z = cplx(x.x(), x.y()) / L;
    b[k] = theta_scaled(st.series, z, lll_logprefactor(z, n, shape.tau().imag()));
  }
  const double m2 = b.squaredNorm() / double(b.size());
  if (!(m2 > 0.0)) throw std::runtime_error("build_chi: theta state vanishes on the grid");
  st.scale = std::sqrt(0.5 / m2);
  b *= st.scale;
  st.beta.v.col(0) = b;
  st.chi.v.col(0) = b;
  st.chi.v.col(1) = I1 * b;
  return st;
}

GridField ladder_up(const GridField& state, int k, const FluxCalculus& calc) {
  if (k < 1) throw ValidationError("ladder_up needs k >= 1");
  if (state.components() != 1 || state.flux != calc.flux())
    throw ValidationError("ladder_up: state must be a scalar in the calculus flux sector");
  CVec f = state.v.col(0);
  for (int i = 0; i < k; ++i) f = calc.dbar_adj_apply(f);
  const double nrm = std::sqrt(f.squaredNorm() / double(f.size()));
  if (nrm < 1e-10) throw std::runtime_error("ladder_up: norm collapsed (input has no component to raise)");
  return GridField::scalar(state.grid, state.flux, f / nrm);
}

std::vector<int> vortex_windings(const LLLState& st) {
  const Grid& g = *st.beta.grid;
  const int N = g.N();
  const auto& E = g.shape().E();
  const double hn = 0.5 * st.n;
  auto pt = [&](int j1, int j2) {
    return Eigen::Vector2d(E * Eigen::Vector2d((j1 - 0.5) / N, (j2 - 0.5) / N));
  };
  Eigen::MatrixXcd val(N + 1, N + 1);
  for (int j1 = 0; j1 <= N; ++j1)
    for (int j2 = 0; j2 <= N; ++j2) val(j1, j2) = st.beta_at(pt(j1, j2));
  auto edge = [&](int a1, int a2, int b1, int b2) {
    const Eigen::Vector2d x = pt(a1, a2), y = pt(b1, b2);
    const double cross = x.x() * y.y() - x.y() * y.x();
    return std::arg(std::conj(val(a1, a2)) * std::polar(1.0, -hn * cross) * val(b1, b2));
  };
  const double flux_per_plaquette = st.n * g.shape().cell_area() / (double(N) * N);
  std::vector<int> w(g.size());
  for (int j1 = 0; j1 < N; ++j1) {
    for (int j2 = 0; j2 < N; ++j2) {
      const double s = edge(j1, j2, j1 + 1, j2) + edge(j1 + 1, j2, j1 + 1, j2 + 1) +
                       edge(j1 + 1, j2 + 1, j1, j2 + 1) + edge(j1, j2 + 1, j1, j2);
      w[g.index(j1, j2)] = int(std::lround((s + flux_per_plaquette) / (2.0 * M_PI)));
    }
  }
  return w;
}

// ------------------------------------------------------------ LandauBasis

LandauBasis::LandauBasis(const GridPtr& grid, int n, int K) : grid_(grid), n_(n), K_(K) {
  if (!grid) throw ValidationError("LandauBasis needs a grid");
  if (n < 1 || K < 0) throw ValidationError("LandauBasis needs n >= 1 and K >= 0");
  const LatticeShape& sh = grid->shape();
  const double L = sh.length();
  const double ret = sh.tau().real();
  const double sn = std::sqrt(double(n));
  const double cut = std::max(14.0, std::sqrt(2.0 * K + 1.0) + 8.0);
  const double C = std::sqrt(2.0 * M_PI / L) * std::pow(n / M_PI, 0.25);
  const int P = grid->size();
  S_ = Eigen::MatrixXcd::Zero(P, (K + 1) * n);
  std::vector<double> h(K + 1);
  std::vector<cplx> acc((K + 1) * n);
  for (int p = 0; p < P; ++p) {
    const Eigen::Vector2d x = grid->point(p);
    std::fill(acc.begin(), acc.end(), cplx(0.0));
    const double scale = n * L / (2.0 * M_PI);
    const long long mlo = (long long)std::ceil((-cut / sn - x.y()) * scale);
    const long long mhi = (long long)std::floor((cut / sn - x.y()) * scale);
    for (long long m = mlo; m <= mhi; ++m) {
      const double md = double(m);
      const double km = 2.0 * M_PI * md / L;
      const double u = sn * (x.y() + km / n);
      h[0] = std::exp(-0.5 * u * u);
      if (K >= 1) h[1] = std::sqrt(2.0) * u * h[0];
      for (int k = 1; k < K; ++k)
        h[k + 1] = std::sqrt(2.0 / (k + 1)) * u * h[k] - std::sqrt(double(k) / (k + 1)) * h[k - 1];
      const cplx ph = std::polar(1.0, M_PI * md * md * ret / n + km * x.x());
      const int r = pmod(m, n);
      for (int k = 0; k <= K; ++k) acc[index(k, r)] += ph * h[k];
    }
    const cplx pre = C * std::polar(1.0, 0.5 * n * x.x() * x.y());
    cplx mi = 1.0;
    for (int k = 0; k <= K; ++k) {
      for (int r = 0; r < n; ++r) S_(p, index(k, r)) = pre * mi * acc[index(k, r)];
      mi *= -I1;
    }
  }
}

CVec LandauBasis::project(const CVec& f) const {
  if (f.size() != S_.rows()) throw ValidationError("LandauBasis::project: size mismatch");
  return S_.adjoint() * f / double(S_.rows());
}

Eigen::MatrixXcd LandauBasis::dbar_matrix() const {
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(size(), size());
  for (int k = 1; k <= K_; ++k)
    for (int r = 0; r < n_; ++r) D(index(k - 1, r), index(k, r)) = std::sqrt(2.0 * n_ * k);
  return D;
}

Eigen::MatrixXcd LandauBasis::grad_matrix(int j) const {
  const Eigen::MatrixXcd D = dbar_matrix();
  const Eigen::MatrixXcd Dh = D.adjoint();
  if (j == 0) return 0.5 * (D - Dh);
  return (D + Dh) / (2.0 * I1);
}

LandauCalculus::LandauCalculus(std::shared_ptr<const LandauBasis> basis) : basis_(std::move(basis)) {
  if (!basis_) throw ValidationError("LandauCalculus needs a basis");
  D_[0] = basis_->grad_matrix(0);
  D_[1] = basis_->grad_matrix(1);
}

CVec LandauCalculus::grad(const CVec& f, int j) const {
  return basis_->synthesize(D_[j] * basis_->project(f));
}

CVec LandauCalculus::grad_adjoint(const CVec& f, int j) const {
  return basis_->synthesize(D_[j].adjoint() * basis_->project(f));
}

}  // namespace ewlat
