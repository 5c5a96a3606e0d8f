#include "ewlat/energy.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "ewlat/lll.hpp"

namespace ewlat {

namespace {

constexpr cplx I1(0.0, 1.0);

// Fields derived from a state that both the energy and the residual need.
struct Derived {
  CVec w1, w2, nu1, nu2, C, X, curl_nu, curl_alpha, curl_z, phi;
  CVec alpha1, alpha2, z1, z2;
};

Derived derive(const FieldState& s, const PhysParams& p, const FluxCalculus& calc, const Spectral& sp) {
  s.validate();
  if (s.w.flux != calc.flux()) throw ValidationError("state flux differs from the calculus flux");
  Derived d;
  d.w1 = s.w.v.col(0);
  d.w2 = s.w.v.col(1);
  d.alpha1 = s.alpha.v.col(0).real().cast<cplx>();
  d.alpha2 = s.alpha.v.col(1).real().cast<cplx>();
  d.z1 = s.z.v.col(0).real().cast<cplx>();
  d.z2 = s.z.v.col(1).real().cast<cplx>();
  d.phi = s.phi.v.col(0).real().cast<cplx>();
  const double gc = p.g * p.cos_theta;
  d.nu1 = p.e * d.alpha1 + gc * d.z1;
  d.nu2 = p.e * d.alpha2 + gc * d.z2;
  d.C = calc.grad(d.w2, 0) - calc.grad(d.w1, 1) -
        I1 * (d.nu1.cwiseProduct(d.w2) - d.nu2.cwiseProduct(d.w1));
  d.X = d.w1.conjugate().cwiseProduct(d.w2) - d.w2.conjugate().cwiseProduct(d.w1);
  d.curl_alpha = sp.curl(d.alpha1, d.alpha2).real().cast<cplx>();
  d.curl_z = sp.curl(d.z1, d.z2).real().cast<cplx>();
  // curl nu = n + curl nu'; the background part is analytic.
  d.curl_nu = (double(s.w.flux) + (p.e * d.curl_alpha + gc * d.curl_z).array()).matrix();
  return d;
}

}  // namespace

EnergyModel::EnergyModel(const PhysParams& p, double xi, std::shared_ptr<const FluxCalculus> calc)
    : p_(p), xi_(xi), calc_(std::move(calc)) {
  if (!calc_) throw ValidationError("EnergyModel needs a covariant calculus");
  if (!(xi >= 0.0)) throw ValidationError("xi must be non-negative");
}

EnergyBreakdown EnergyModel::energy(const FieldState& s) const {
  const Spectral sp(*s.w.grid);
  const Derived d = derive(s, p_, *calc_, sp);
  const double n = s.w.flux;
  const CVec phi2 = d.phi.cwiseAbs2().cast<cplx>();
  const Eigen::ArrayXd w2abs = d.w1.cwiseAbs2().array() + d.w2.cwiseAbs2().array();
  const Eigen::ArrayXd z2abs = d.z1.cwiseAbs2().array() + d.z2.cwiseAbs2().array();

  EnergyBreakdown e;
  e.area = s.w.grid->shape().cell_area();
  e.curl_w = d.C.cwiseAbs2().mean();
  const double vac = 0.5 * n * n / (p_.e * p_.e);
  // <curl alpha> vanishes identically for periodic alpha, so the cross term drops.
  const double curl_a_excess = 0.5 * d.curl_alpha.cwiseAbs2().mean();
  e.curl_a = vac + curl_a_excess;
  e.curl_z = 0.5 * d.curl_z.cwiseAbs2().mean();
  e.higgs_w = 0.5 * p_.g * p_.g * (phi2.real().array() * w2abs).mean();
  e.higgs_z = 0.5 * p_.kappa * (phi2.real().array() * z2abs).mean();
  e.quartic_w = 0.5 * p_.g * p_.g * d.X.cwiseAbs2().mean();
  const cplx mom = (I1 * d.curl_nu.cwiseProduct(d.X)).mean();
  e.moment = mom.real();
  e.moment_imag = mom.imag();
  e.grad_phi = sp.deriv(d.phi, 0).cwiseAbs2().mean() + sp.deriv(d.phi, 1).cwiseAbs2().mean();
  const Eigen::ArrayXd pot = phi2.real().array() - xi_ * xi_;
  e.potential = 0.5 * p_.lambda * (pot * pot).mean();
  e.excess = e.curl_w + curl_a_excess + e.curl_z + e.higgs_w + e.higgs_z + e.quartic_w + e.moment +
             e.grad_phi + e.potential;
  e.total = vac + e.excess;
  return e;
}

Residual EnergyModel::residual(const FieldState& s) const {
  const Spectral sp(*s.w.grid);
  const Derived d = derive(s, p_, *calc_, sp);
  const auto& g = s.w.grid;
  const double g2 = p_.g * p_.g;
  const double gc = p_.g * p_.cos_theta;
  const CVec phi2 = d.phi.cwiseAbs2().cast<cplx>();

  // G1 = curl_nu* C + g^2/2 phi^2 w - i (curl nu) J w + g^2 X J w, with J w = (-w2, w1).
  CVec a1 = -calc_->grad_adjoint(d.C, 1) - I1 * d.nu2.cwiseProduct(d.C);
  CVec a2 = calc_->grad_adjoint(d.C, 0) + I1 * d.nu1.cwiseProduct(d.C);
  const CVec coef = -I1 * d.curl_nu + g2 * d.X;
  a1 += 0.5 * g2 * phi2.cwiseProduct(d.w1) - coef.cwiseProduct(d.w2);
  a2 += 0.5 * g2 * phi2.cwiseProduct(d.w2) + coef.cwiseProduct(d.w1);

  // Current Im[C J wbar] - curl* Im(wbar1 w2) written as Im[C J wbar] + curl*(iX)/2.
  const CVec j1 = (-d.C.cwiseProduct(d.w2.conjugate())).imag().cast<cplx>();
  const CVec j2 = d.C.cwiseProduct(d.w1.conjugate()).imag().cast<cplx>();
  const auto [m1, m2] = sp.curl_adj((I1 * d.X).real().cast<cplx>());
  const CVec cur1 = 2.0 * j1 + m1, cur2 = 2.0 * j2 + m2;

  const auto [ca1, ca2] = sp.curl_adj(d.curl_alpha);
  const auto [cz1, cz2] = sp.curl_adj(d.curl_z);
  const CVec b1 = ca1 + p_.e * cur1, b2 = ca2 + p_.e * cur2;
  const CVec c1 = cz1 + p_.kappa * phi2.cwiseProduct(d.z1) + gc * cur1;
  const CVec c2 = cz2 + p_.kappa * phi2.cwiseProduct(d.z2) + gc * cur2;

  const Eigen::ArrayXd w2abs = d.w1.cwiseAbs2().array() + d.w2.cwiseAbs2().array();
  const Eigen::ArrayXd z2abs = d.z1.cwiseAbs2().array() + d.z2.cwiseAbs2().array();
  const Eigen::ArrayXd pref =
      p_.lambda * (phi2.real().array() - xi_ * xi_) + 0.5 * g2 * w2abs + 0.5 * p_.kappa * z2abs;
  CVec h = -sp.laplacian(d.phi) + (pref * d.phi.real().array()).matrix().cast<cplx>();

  Residual r;
  r.G1 = GridField::vector(g, s.w.flux, a1, a2);
  r.G2 = GridField::vector(g, 0, b1.real().cast<cplx>(), b2.real().cast<cplx>());
  r.G3 = GridField::vector(g, 0, c1.real().cast<cplx>(), c2.real().cast<cplx>());
  r.G4 = GridField::scalar(g, 0, h.real().cast<cplx>());
  return r;
}

double EnergyModel::directional(const Residual& r, const FieldState& dir) const {
  return 2.0 * inner(r.G1, dir.w).real() + inner(r.G2, dir.alpha).real() + inner(r.G3, dir.z).real() +
         2.0 * inner(r.G4, dir.phi).real();
}

std::shared_ptr<const FluxCalculus> default_calculus(const GridPtr& grid, int n, int K) {
  return std::make_shared<LandauCalculus>(std::make_shared<LandauBasis>(grid, n, K));
}

EnergyBreakdown energy(const FieldState& s, const PhysParams& p, double xi) {
  return EnergyModel(p, xi, default_calculus(s.w.grid, s.w.flux)).energy(s);
}

Residual residual(const FieldState& s, const PhysParams& p, double xi) {
  return EnergyModel(p, xi, default_calculus(s.w.grid, s.w.flux)).residual(s);
}

FieldState axpy(const FieldState& s, double t, const FieldState& dir) {
  FieldState out = s;
  out.w.v += t * dir.w.v;
  out.alpha.v += t * dir.alpha.v;
  out.z.v += t * dir.z.v;
  out.phi.v += t * dir.phi.v;
  return out;
}

GradientCheck gradient_check(const EnergyModel& m, const FieldState& s, const FieldState& dir,
                             double step) {
  if (!(step > 0.0)) throw ValidationError("gradient_check step must be positive");
  auto E = [&](double t) { return m.energy(axpy(s, t, dir)).excess; };
  const double dh = (E(step) - E(-step)) / (2.0 * step);
  const double dh2 = (E(0.5 * step) - E(-0.5 * step)) / step;
  GradientCheck gc;
  gc.finite_difference = (4.0 * dh2 - dh) / 3.0;
  gc.predicted = m.directional(m.residual(s), dir);
  const double scale = std::max({std::abs(gc.predicted), std::abs(gc.finite_difference), 1e-300});
  gc.rel_error = std::abs(gc.predicted - gc.finite_difference) / scale;
  return gc;
}

FieldState phase_rotate(const FieldState& s, double delta) {
  FieldState out = s;
  out.w.v *= std::polar(1.0, delta);
  return out;
}

Residual phase_rotate(const Residual& r, double delta) {
  Residual out = r;
  out.G1.v *= std::polar(1.0, delta);
  return out;
}

FieldState gauge_transform(const FieldState& s, const GridField& gamma, double e) {
  if (gamma.flux != 0 || gamma.components() != 1) throw ValidationError("gauge function must be a periodic scalar");
  FieldState out = s;
  const CVec gm = gamma.v.col(0).real().cast<cplx>();
  for (int c = 0; c < 2; ++c)
    out.w.v.col(c) = s.w.v.col(c).cwiseProduct((I1 * gm).array().exp().matrix());
  const Spectral sp(*gamma.grid);
  // With nabla_q = d - i q the compensating shift is +grad(gamma)/e.
  out.alpha.v.col(0) += sp.deriv(gm, 0).real().cast<cplx>() / e;
  out.alpha.v.col(1) += sp.deriv(gm, 1).real().cast<cplx>() / e;
  return out;
}

FieldState random_state(const GridPtr& grid, int n, double xi, double amplitude, std::uint64_t seed,
                        int levels) {
  if (levels < 1) throw ValidationError("random_state needs at least one Landau level");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const LandauBasis basis(grid, n, levels - 1);
  const int P = grid->size(), N = grid->N();
  FieldState s = FieldState::constant(grid, n, xi);
  for (int c = 0; c < 2; ++c) {
    CVec coef(basis.size());
    for (int i = 0; i < coef.size(); ++i) coef[i] = cplx(nd(rng), nd(rng));
    s.w.v.col(c) = amplitude * basis.synthesize(coef);
  }
  // Real trigonometric sums over |m_i| <= 2.
  auto smooth = [&] {
    CVec f = CVec::Zero(P);
    for (int m1 = -2; m1 <= 2; ++m1)
      for (int m2 = -2; m2 <= 2; ++m2) {
        if (m1 == 0 && m2 == 0) continue;
        const double a = nd(rng), b = nd(rng);
        for (int j1 = 0; j1 < N; ++j1)
          for (int j2 = 0; j2 < N; ++j2) {
            const double ph = 2.0 * std::numbers::pi * double(m1 * j1 + m2 * j2) / N;
            f[j1 * N + j2] += a * std::cos(ph) + b * std::sin(ph);
          }
      }
    return CVec(amplitude * f / 5.0);
  };
  const Spectral sp(*grid);
  auto [a1, a2] = sp.curl_adj(smooth());
  s.alpha.v.col(0) = (a1.real().array() + amplitude * nd(rng)).matrix().cast<cplx>();
  s.alpha.v.col(1) = (a2.real().array() + amplitude * nd(rng)).matrix().cast<cplx>();
  s.z.v.col(0) = smooth().real().cast<cplx>();
  s.z.v.col(1) = smooth().real().cast<cplx>();
  s.phi.v.col(0) = (smooth().real().array() + xi).matrix().cast<cplx>();
  return s;
}

FieldState vacuum_state(const GridPtr& grid, int n, double xi) { return FieldState::constant(grid, n, xi); }

}  // namespace ewlat
