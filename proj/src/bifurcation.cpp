#include "ewlat/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ewlat/green.hpp"

namespace ewlat {

namespace {

CVec real_part(const CVec& v) { return v.real().cast<cplx>(); }

double mean_real(const CVec& v) { return v.real().mean(); }

CVec density(const LLLState& chi) {
  const auto& v = chi.chi.v;
  return (v.col(0).cwiseAbs2() + v.col(1).cwiseAbs2()).cast<cplx>();
}

void require_order(const PhysParams& p) {
  if (p.m_z > p.m_h) throw ValidationError("shape functions need m_z <= m_h");
}

double max_abs(const CVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

ShapeFunctions alpha_eta(const LLLState& chi, const PhysParams& p) {
  require_order(p);
  const GridPtr& g = chi.chi.grid;
  const CVec rho = density(chi);
  const double m = mean_real(rho);
  ShapeFunctions out;
  // G_{mz} - G_{mh} vanishes identically at equal masses.
  if (p.m_z < p.m_h) {
    const GridField d = apply_diff(p.m_z, p.m_h, GridField::scalar(g, 0, rho));
    out.alpha = (rho.real().array() * d.v.col(0).real().array()).mean() / (m * m);
  }
  out.eta = 1.0 / (p.m_w * p.m_w * out.alpha + p.sin_theta * p.sin_theta);
  out.beta = (rho.real().array().square()).mean() / (m * m);
  return out;
}

FirstOrderFields first_order(const LLLState& chi, const PhysParams& p) {
  const GridPtr& g = chi.chi.grid;
  const Spectral sp(*g);
  const CVec rho = density(chi);
  const double m = mean_real(rho);
  const double n = chi.n;
  const CVec rho0 = (rho.array() - m).matrix();

  FirstOrderFields f;
  f.chi2_mean = m;
  f.eta = alpha_eta(chi, p).eta;
  f.xi1 = -(p.g / std::sqrt(2.0 * n)) * m / f.eta;

  const CVec sig = GreenOp(*g, 0.0).apply(GridField::scalar(g, 0, rho0)).v.col(0);
  auto [a1, a2] = sp.curl_adj(p.e * sig);
  f.a1 = GridField::vector(g, 0, real_part(a1), real_part(a2));

  const CVec gz = GreenOp(*g, p.m_z).apply(GridField::scalar(g, 0, rho)).v.col(0);
  auto [z1, z2] = sp.curl_adj(p.g * p.cos_theta * gz);
  f.z1 = GridField::vector(g, 0, real_part(z1), real_part(z2));

  const CVec gh = GreenOp(*g, p.m_h).apply(GridField::scalar(g, 0, rho)).v.col(0);
  f.psi1 = GridField::scalar(g, 0, real_part(-0.5 * p.g * std::sqrt(2.0 * n) * gh));

  const double g2 = p.g * p.g;
  f.curl_nu1 = GridField::scalar(
      g, 0, real_part((g2 * rho.array() - p.e * p.e * m - g2 * n * gz.array()).matrix()));
  return f;
}

double s_squared_of_omega(double omega, const LLLState& chi, const PhysParams& p) {
  const double m = mean_real(density(chi));
  return chi.n * alpha_eta(chi, p).eta * omega / (p.g * p.g * m);
}

double energy_expansion(double omega, double eta, const PhysParams& p) {
  const double b = p.b_of_omega(omega);
  const double s2 = p.sin_theta * p.sin_theta;
  return 0.5 * b * b - 0.5 * b * b * s2 * eta * omega * omega;
}

FirstOrderCheck check_first_order(const LLLState& chi, const PhysParams& p, const FirstOrderFields& f) {
  const GridPtr& g = chi.chi.grid;
  const Spectral sp(*g);
  const CVec rho = density(chi);
  const double m = mean_real(rho);
  const double n = chi.n;
  FirstOrderCheck c;
  auto [r1, r2] = sp.curl_adj(rho);
  for (int j = 0; j < 2; ++j) {
    const CVec a = f.a1.v.col(j), z = f.z1.v.col(j);
    const CVec& r = j == 0 ? r1 : r2;
    c.a_eq = std::max(c.a_eq, max_abs(-sp.laplacian(a) - p.e * r));
    c.z_eq = std::max(c.z_eq, max_abs(-sp.laplacian(z) + p.m_z * p.m_z * z - p.g * p.cos_theta * r));
  }
  const CVec psi = f.psi1.v.col(0);
  c.psi_eq = max_abs(-sp.laplacian(psi) + p.m_h * p.m_h * psi + 0.5 * p.g * std::sqrt(2.0 * n) * rho);
  const CVec ca = sp.curl(f.a1.v.col(0), f.a1.v.col(1));
  const CVec cz = sp.curl(f.z1.v.col(0), f.z1.v.col(1));
  c.curl_a_pointwise = max_abs(ca - p.e * (rho.array() - m).matrix());
  c.curl_nu_closed_form = max_abs(p.e * ca + p.g * p.cos_theta * cz - f.curl_nu1.v.col(0));

  // g sqrt(2n) xi' <|chi|^2> = -g^2 [m_w^2 <G_{mz,mh}(|chi|^2)|chi|^2> + sin^2 <|chi|^2>^2]
  const ShapeFunctions sf = alpha_eta(chi, p);
  const double lhs = p.g * std::sqrt(2.0 * n) * f.xi1 * m;
  const double rhs = -p.g * p.g * (p.m_w * p.m_w * sf.alpha * m * m + p.sin_theta * p.sin_theta * m * m);
  c.xi_scalar_identity = std::abs(lhs - rhs) / std::abs(rhs);
  return c;
}

double FirstOrderIdentities::phi0_rel() const {
  return std::abs(phi0_lhs - phi0_rhs) / std::max(std::abs(phi0_lhs), std::abs(phi0_rhs));
}

double FirstOrderIdentities::bracket_rel() const {
  return std::abs(bracket - bracket_closed) / std::abs(bracket_closed);
}

FirstOrderIdentities first_order_identities(const LLLState& chi, const PhysParams& p, const FirstOrderFields& f) {
  const GridPtr& g = chi.chi.grid;
  const Spectral sp(*g);
  const Eigen::ArrayXd rho = density(chi).real().array();
  const double m = rho.mean();
  const double n = chi.n;
  const double g2 = p.g * p.g;
  const double gs = p.g * std::sqrt(2.0 * n);
  const Eigen::ArrayXd psi = f.psi1.v.col(0).real().array();
  const Eigen::ArrayXd ca = sp.curl(f.a1.v.col(0), f.a1.v.col(1)).real().array();
  const Eigen::ArrayXd cz = sp.curl(f.z1.v.col(0), f.z1.v.col(1)).real().array();
  // curl nu' from the fields themselves, independent of the closed form.
  const Eigen::ArrayXd cnu = p.e * ca + p.g * p.cos_theta * cz;
  const Eigen::ArrayXd z2 = f.z1.v.col(0).cwiseAbs2().array() + f.z1.v.col(1).cwiseAbs2().array();
  const CVec pc = f.psi1.v.col(0);
  const Eigen::ArrayXd grad_psi2 = sp.deriv(pc, 0).cwiseAbs2().array() + sp.deriv(pc, 1).cwiseAbs2().array();

  FirstOrderIdentities out;
  out.phi0_lhs = gs * f.xi1 * m;
  out.phi0_rhs = (-gs * psi * rho + cnu * rho - g2 * rho * rho).mean();
  out.bracket = (0.5 * cz.square() + 0.5 * ca.square() + gs * (psi + f.xi1) * rho +
                 n / (2.0 * p.cos_theta * p.cos_theta) * z2 + grad_psi2 + p.m_h * p.m_h * psi.square() -
                 rho * cnu + 0.5 * g2 * rho.square())
                    .mean();
  out.bracket_closed = -0.5 * g2 * m * m / f.eta;
  return out;
}

AnsatzEnergy ansatz_energy(double s, const LLLState& chi, const PhysParams& p, const FirstOrderFields& f,
                           const FluxCalculus& calc) {
  const double s2 = s * s;
  const double xi_s = std::sqrt(2.0 * chi.n) / p.g + s2 * f.xi1;
  FieldState st;
  st.w = chi.chi;
  st.w.v *= s;
  st.alpha = f.a1;
  st.alpha.v *= s2;
  st.z = f.z1;
  st.z.v *= s2;
  st.phi = f.psi1;
  st.phi.v = (s2 * f.psi1.v.array() + xi_s).matrix();
  // Non-owning alias: the model only borrows the calculus for this call.
  const std::shared_ptr<const FluxCalculus> alias(std::shared_ptr<const FluxCalculus>{}, &calc);
  const EnergyModel model(p, xi_s, alias);
  AnsatzEnergy a;
  a.s = s;
  a.excess = model.energy(st).excess;
  a.predicted = s2 * s2 * first_order_identities(chi, p, f).bracket;
  return a;
}

namespace {

// Parity-even Galerkin space: w in even Landau levels, alpha = curl* sigma and
// z with odd Fourier modes, phi even. Coordinates are fields scaled by g.
class BranchSpace {
 public:
  BranchSpace(const LatticeShape& shape, const PhysParams& p, int N, int K, double xi)
      : p_(p), xi_(xi), grid_(share(Grid(shape, N))), sp_(*grid_) {
    if (K < 0) throw ValidationError("Landau level cut must be non-negative");
    levels_ = K / 2 + 1;
    // One extra level keeps the covariant derivative of the top retained level exact.
    basis_ = std::make_shared<LandauBasis>(grid_, 1, 2 * (levels_ - 1) + 1);
    calc_ = std::make_shared<LandauCalculus>(basis_);
    model_ = std::make_unique<EnergyModel>(p, xi, calc_);
    const int M = N / 3;
    for (int m1 = 0; m1 <= M; ++m1)
      for (int m2 = -M; m2 <= M; ++m2)
        if (m1 > 0 || m2 > 0) modes_.push_back({m1, m2});
    const int P = grid_->size(), H = int(modes_.size());
    cos_.resize(P, H);
    sin_.resize(P, H);
    kx_.resize(H);
    ky_.resize(H);
    for (int h = 0; h < H; ++h) {
      const auto [m1, m2] = modes_[h];
      const int idx = sp_.flat(m1, m2);
      kx_[h] = sp_.kx(idx);
      ky_[h] = sp_.ky(idx);
      for (int j1 = 0; j1 < N; ++j1)
        for (int j2 = 0; j2 < N; ++j2) {
          const double ph = 2.0 * std::numbers::pi * double(m1 * j1 + m2 * j2) / N;
          cos_(j1 * N + j2, h) = std::cos(ph);
          sin_(j1 * N + j2, h) = std::sin(ph);
        }
    }
    even_.resize(P, levels_);
    for (int l = 0; l < levels_; ++l) even_.col(l) = basis_->state(2 * l);
  }

  int H() const { return int(modes_.size()); }
  int w_size() const { return 4 * levels_; }
  int sigma_off() const { return w_size(); }
  int z_off() const { return sigma_off() + H(); }
  int phi_off() const { return z_off() + 2 * H(); }
  int dim() const { return phi_off() + 1 + H(); }

  const GridPtr& grid() const { return grid_; }
  const EnergyModel& model() const { return *model_; }
  const LandauBasis& basis() const { return *basis_; }
  const Spectral& spectral() const { return sp_; }

  /// chi = (phi_0, i phi_0)/sqrt2 in Landau coordinates.
  CVec chi_coeff() const {
    CVec c = CVec::Zero(2);
    c[0] = 1.0 / std::sqrt(2.0);
    c[1] = cplx(0.0, 1.0 / std::sqrt(2.0));
    return c;
  }

  cplx w_coeff(const Eigen::VectorXd& q, int l, int comp) const {
    const int o = 4 * l + 2 * comp;
    return cplx(q[o], q[o + 1]) / p_.g;
  }

  /// <chi, w>.
  cplx overlap(const Eigen::VectorXd& q) const {
    const CVec c = chi_coeff();
    return std::conj(c[0]) * w_coeff(q, 0, 0) + std::conj(c[1]) * w_coeff(q, 0, 1);
  }

  FieldState state(const Eigen::VectorXd& q) const {
    const double ig = 1.0 / p_.g;
    const int Hh = H();
    CVec c1(levels_), c2(levels_);
    for (int l = 0; l < levels_; ++l) {
      c1[l] = w_coeff(q, l, 0);
      c2[l] = w_coeff(q, l, 1);
    }
    const Eigen::VectorXd sig = q.segment(sigma_off(), Hh) * ig;
    const Eigen::VectorXd sa1 = -(ky_.array() * sig.array()).matrix();
    const Eigen::VectorXd sa2 = (kx_.array() * sig.array()).matrix();
    FieldState st;
    st.w = GridField::vector(grid_, 1, even_ * c1, even_ * c2);
    st.alpha = GridField::vector(grid_, 0, (sin_ * sa1).cast<cplx>(), (sin_ * sa2).cast<cplx>());
    st.z = GridField::vector(grid_, 0, (sin_ * (q.segment(z_off(), Hh) * ig)).cast<cplx>(),
                             (sin_ * (q.segment(z_off() + Hh, Hh) * ig)).cast<cplx>());
    const Eigen::VectorXd ph =
        (cos_ * (q.segment(phi_off() + 1, Hh) * ig)).array() + xi_ + q[phi_off()] * ig;
    st.phi = GridField::scalar(grid_, 0, ph.cast<cplx>());
    return st;
  }

  /// g times the gradient of E' in field coordinates.
  Eigen::VectorXd gradient(const Residual& r) const {
    const double P = grid_->size();
    const int Hh = H();
    Eigen::VectorXd F(dim());
    for (int comp = 0; comp < 2; ++comp) {
      const CVec pg = even_.adjoint() * r.G1.v.col(comp) / P;
      for (int l = 0; l < levels_; ++l) {
        F[4 * l + 2 * comp] = 2.0 * pg[l].real();
        F[4 * l + 2 * comp + 1] = 2.0 * pg[l].imag();
      }
    }
    const Eigen::VectorXd u1 = sin_.transpose() * r.G2.v.col(0).real() / P;
    const Eigen::VectorXd u2 = sin_.transpose() * r.G2.v.col(1).real() / P;
    F.segment(sigma_off(), Hh) = -(ky_.array() * u1.array()) + kx_.array() * u2.array();
    F.segment(z_off(), Hh) = sin_.transpose() * r.G3.v.col(0).real() / P;
    F.segment(z_off() + Hh, Hh) = sin_.transpose() * r.G3.v.col(1).real() / P;
    F[phi_off()] = 2.0 * r.G4.v.col(0).real().mean();
    F.segment(phi_off() + 1, Hh) = 2.0 * cos_.transpose() * r.G4.v.col(0).real() / P;
    return F * p_.g;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& q) const { return gradient(model_->residual(state(q))); }

  /// Coordinates of a smooth even scalar: constant and cos coefficients.
  Eigen::VectorXd cos_coeffs(const CVec& f) const {
    return 2.0 * cos_.transpose() * f.real() / double(grid_->size());
  }
  Eigen::VectorXd sin_coeffs(const CVec& f) const {
    return 2.0 * sin_.transpose() * f.real() / double(grid_->size());
  }

  int levels() const { return levels_; }
  const Eigen::MatrixXd& cos_samples() const { return cos_; }

 private:
  PhysParams p_;
  double xi_;
  GridPtr grid_;
  Spectral sp_;
  int levels_ = 0;
  std::shared_ptr<LandauBasis> basis_;
  std::shared_ptr<const FluxCalculus> calc_;
  std::unique_ptr<EnergyModel> model_;
  std::vector<std::pair<int, int>> modes_;
  Eigen::MatrixXd cos_, sin_;
  Eigen::VectorXd kx_, ky_;
  Eigen::MatrixXcd even_;
};

}  // namespace

BranchPoint newton_branch(double omega, const LatticeShape& shape, const PhysParams& p,
                          const NewtonOptions& opt) {
  if (p.n != 1) throw ValidationError("the branch solver supports n = 1 only");
  if (omega < 0.0) throw ValidationError("omega < 0 is the stable regime: no bifurcating branch");
  if (!(omega < 1.0)) throw ValidationError("omega must be below 1");
  if (opt.N < 12 || opt.N % 2) throw ValidationError("branch grid N must be even and at least 12");

  BranchPoint bp;
  bp.omega = omega;
  bp.b = p.b_of_omega(omega);
  bp.mu = p.n * (1.0 - omega);
  bp.vacuum_per_area = 0.5 * bp.b * bp.b;
  const double xi = p.xi_of_omega(omega);
  const BranchSpace sp(shape, p, opt.N, opt.K, xi);
  const int D = sp.dim();
  Eigen::VectorXd q = Eigen::VectorXd::Zero(D);

  if (omega > 0.0) {
    const LLLState chi = build_chi(shape, 1, sp.grid());
    const FirstOrderFields f = first_order(chi, p);
    const double s0 = std::sqrt(p.n * f.eta * omega / (p.g * p.g * f.chi2_mean));
    const double s = opt.negative ? -s0 : s0;
    const CVec c = sp.chi_coeff();
    for (int comp = 0; comp < 2; ++comp) {
      q[2 * comp] = p.g * s * c[comp].real();
      q[2 * comp + 1] = p.g * s * c[comp].imag();
    }
    const double gs2 = p.g * s * s;
    // alpha' = curl*(e G0(rho - <rho>)): recover the potential from curl alpha' = -Delta sigma.
    const Spectral& spec = sp.spectral();
    const CVec curl_a = spec.curl(f.a1.v.col(0), f.a1.v.col(1));
    const CVec sigma = GreenOp(*sp.grid(), 0.0).apply(GridField::scalar(sp.grid(), 0, curl_a)).v.col(0);
    q.segment(sp.sigma_off(), sp.H()) = gs2 * sp.cos_coeffs(sigma);
    q.segment(sp.z_off(), sp.H()) = gs2 * sp.sin_coeffs(f.z1.v.col(0));
    q.segment(sp.z_off() + sp.H(), sp.H()) = gs2 * sp.sin_coeffs(f.z1.v.col(1));
    q[sp.phi_off()] = gs2 * f.psi1.v.col(0).real().mean();
    q.segment(sp.phi_off() + 1, sp.H()) = gs2 * sp.cos_coeffs(f.psi1.v.col(0));

    // Bordered system: phase generator v with multiplier, constraint Im<chi, w> = 0.
    auto phase_gen = [&](const Eigen::VectorXd& x) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(D);
      for (int o = 0; o < sp.w_size(); o += 2) {
        v[o] = -x[o + 1];
        v[o + 1] = x[o];
      }
      return v;
    };
    Eigen::VectorXd u = Eigen::VectorXd::Zero(D);
    const CVec cc = sp.chi_coeff();
    // Im(conj(c0) w0 + conj(c1) w1) as a linear form on the scaled coordinates.
    for (int comp = 0; comp < 2; ++comp) {
      const cplx a = std::conj(cc[comp]) / p.g;
      u[2 * comp] = a.imag();
      u[2 * comp + 1] = a.real();
    }
    double lam = 0.0;
    auto full = [&](const Eigen::VectorXd& x, double l) {
      Eigen::VectorXd R(D + 1);
      R.head(D) = sp.gradient(x) + l * phase_gen(x);
      R[D] = p.g * u.dot(x);
      return R;
    };
    Eigen::VectorXd R = full(q, lam);
    bp.residual_history.push_back(R.norm());
    const double h = 1e-6;
    int it = 0;
    for (; it < opt.max_iter && R.norm() > opt.tol; ++it) {
      Eigen::MatrixXd J(D + 1, D + 1);
      for (int j = 0; j < D; ++j) {
        Eigen::VectorXd xp = q, xm = q;
        xp[j] += h;
        xm[j] -= h;
        J.col(j) = (full(xp, lam) - full(xm, lam)) / (2.0 * h);
      }
      J.col(D).head(D) = phase_gen(q);
      J(D, D) = 0.0;
      const Eigen::VectorXd dx = J.partialPivLu().solve(-R);
      double t = 1.0;
      for (int k = 0; k < 30; ++k, t *= 0.5) {
        const Eigen::VectorXd qn = q + t * dx.head(D);
        const Eigen::VectorXd Rn = full(qn, lam + t * dx[D]);
        if (Rn.norm() <= (1.0 - 1e-4 * t) * R.norm() || k == 29) {
          q = qn;
          lam += t * dx[D];
          R = Rn;
          break;
        }
      }
      bp.residual_history.push_back(R.norm());
    }
    bp.iterations = it;
    bp.residual_norm = R.norm();
    if (!(bp.residual_norm <= opt.tol))
      throw std::runtime_error("branch Newton did not converge: scaled residual " +
                               std::to_string(bp.residual_norm));
  }

  bp.state = sp.state(q);
  bp.s = sp.overlap(q).real();
  const Eigen::Vector2d cavg = bp.state.alpha.v.real().colwise().mean();
  bp.c = {cavg[0], cavg[1]};
  bp.energy = sp.model().energy(bp.state);
  const double scale = p.e * p.e * bp.b * bp.b / double(p.n * p.n);
  bp.energy_per_area = bp.vacuum_per_area + scale * bp.energy.excess;

  bp.u_perp = bp.state;
  {
    const CVec c = sp.chi_coeff();
    const CVec phi0 = sp.basis().state(0);
    bp.u_perp.w.v.col(0) -= bp.s * c[0] * phi0;
    bp.u_perp.w.v.col(1) -= bp.s * c[1] * phi0;
    bp.u_perp.phi.v.array() -= xi;
    const double un = norm(bp.u_perp.w);
    const cplx ov = std::conj(c[0]) * sp.basis().project(bp.u_perp.w.v.col(0))[0] +
                    std::conj(c[1]) * sp.basis().project(bp.u_perp.w.v.col(1))[0];
    bp.kernel_overlap = un > 0.0 ? std::abs(ov) / un : 0.0;
  }

  // Weak divergence of the current: J = (G2 - curl* curl alpha)/e against grad(cos k.x).
  if (omega > 0.0) {
    const Residual r = sp.model().residual(bp.state);
    const Spectral& spec = sp.spectral();
    const CVec ca = spec.curl(bp.state.alpha.v.col(0), bp.state.alpha.v.col(1));
    auto [cc1, cc2] = spec.curl_adj(ca);
    const CVec J1 = (r.G2.v.col(0) - cc1) / p.e, J2 = (r.G2.v.col(1) - cc2) / p.e;
    const double jn = std::sqrt((J1.cwiseAbs2() + J2.cwiseAbs2()).mean());
    for (int m1 = -2; m1 <= 2; ++m1)
      for (int m2 = -2; m2 <= 2; ++m2) {
        if (m1 == 0 && m2 == 0) continue;
        const int N = opt.N;
        CVec gam(N * N);
        for (int j1 = 0; j1 < N; ++j1)
          for (int j2 = 0; j2 < N; ++j2)
            gam[j1 * N + j2] = std::cos(2.0 * std::numbers::pi * double(m1 * j1 + m2 * j2) / N);
        const CVec d1 = spec.deriv(gam, 0), d2 = spec.deriv(gam, 1);
        const double gn = std::sqrt((d1.cwiseAbs2() + d2.cwiseAbs2()).mean());
        const double v = std::abs((d1.conjugate().cwiseProduct(J1) + d2.conjugate().cwiseProduct(J2)).mean());
        if (jn > 0.0) bp.div_current = std::max(bp.div_current, v / (jn * gn));
      }
  }
  return bp;
}

}  // namespace ewlat
