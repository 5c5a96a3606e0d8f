#include "ewlat/verify.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "ewlat/bifurcation.hpp"
#include "ewlat/green.hpp"
#include "ewlat/shapeopt.hpp"
#include "ewlat/spectrum.hpp"

namespace ewlat {

namespace {

constexpr double kPi = std::numbers::pi;

struct Suite {
  std::vector<CheckResult> out;
  void upper(const char* mod, const char* name, double v, double tol) {
    out.push_back({mod, name, v, tol, std::isfinite(v) && v <= tol, false});
  }
  void lower(const char* mod, const char* name, double v, double tol) {
    out.push_back({mod, name, v, tol, std::isfinite(v) && v >= tol, true});
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CVec cos_mode(const Grid& g, int m1, int m2) {
  const int N = g.N();
  CVec f(g.size());
  for (int j1 = 0; j1 < N; ++j1)
    for (int j2 = 0; j2 < N; ++j2) f[g.index(j1, j2)] = std::cos(2.0 * kPi * double(m1 * j1 + m2 * j2) / N);
  return f;
}

// Relative commutator error ||[dbar, dbar*]u - 2n u|| / ||u|| for smooth u.
double commutator_error(const LatticeShape& shape, int n, int N) {
  const auto grid = share(Grid(shape, N));
  const LandauBasis basis(grid, n, 2);
  const CVec u = basis.synthesize(CVec::Ones(basis.size()));
  const LinkDifference ld(*grid, n);
  const SpMat D = ld.dbar(), Da = ld.dbar_adj();
  const CVec cu = D * (Da * u) - Da * (D * u);
  return (cu - 2.0 * n * u).norm() / u.norm();
}

void params_checks(Suite& s, const PhysParams& p) {
  s.upper("params", "b_star = M_W^2/e", rel(p.b_star, p.M_W * p.M_W / p.e), 1e-12);
  s.upper("params", "e = g g'/sqrt(g^2+g'^2)", rel(p.e, p.g * p.gprime / std::hypot(p.g, p.gprime)), 1e-14);
  const PhysParams q = from_couplings(2.0 * p.g, 2.0 * p.gprime, 4.0 * p.lambda, 0.5, p.n);
  s.upper("params", "mass ratios invariant under normalization",
          std::max(rel(q.m_z / q.m_w, p.m_z / p.m_w), rel(q.m_h / q.m_w, p.m_h / p.m_w)), 1e-12);
  s.upper("params", "m_z/m_w = M_Z/M_W, m_h/m_w = M_H/M_W",
          std::max(rel(p.m_z / p.m_w, p.M_Z / p.M_W), rel(p.m_h / p.m_w, p.M_H / p.M_W)), 1e-12);
}

void lattice_checks(Suite& s, const LatticeShape& shape) {
  double dual = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) dual = std::max(dual, std::abs(shape.K(i).dot(shape.e(j)) - 2.0 * kPi * (i == j)));
  s.upper("lattice", "dual basis K_i.e_j = 2 pi delta_ij", dual, 1e-12);

  const Grid g(shape, 16);
  double quad = 0.0;
  for (int m1 = -7; m1 <= 7; ++m1)
    for (int m2 = -7; m2 <= 7; ++m2)
      if (m1 || m2) quad = std::max(quad, std::abs(cos_mode(g, m1, m2).mean()));
  s.upper("lattice", "quadrature exact below N/2", quad, 1e-12);

  double idem = 0.0;
  for (cplx t : {cplx(0.3, 0.2), cplx(2.7, 0.05), cplx(-1.4, 1.9), shape.tau()}) {
    const cplx r = reduce_to_fundamental(t).first;
    idem = std::max(idem, std::abs(reduce_to_fundamental(r).first - r));
  }
  s.upper("lattice", "reduce_to_fundamental idempotent", idem, 1e-12);
}

void lll_checks(Suite& s, const LatticeShape& shape, int N) {
  const double e1 = commutator_error(shape, 1, 32), e2 = commutator_error(shape, 1, 64);
  s.lower("lll", "commutator [dbar, dbar*] = 2n at O(N^-2) (order)", std::log2(e1 / e2), 1.9);

  const LLLState st = build_chi(shape, 1, share(Grid(shape, N)));
  const auto wind = vortex_windings(st);
  int total = 0, at = -1;
  for (size_t k = 0; k < wind.size(); ++k) {
    total += wind[k];
    if (wind[k]) at = int(k);
  }
  s.upper("lll", "winding sum per cell minus n", std::abs(total - 1), 0.0);
  s.upper("lll", "vortex at the cell centre", at == st.beta.grid->index(N / 2, N / 2) ? 0.0 : 1.0, 0.0);

  // beta(x + e_i) = exp(i (n/2) e_i x x) beta(x).
  double qp = 0.0, scale = 0.0;
  const Eigen::Vector2d pts[3] = {{0.3, 0.7}, {-1.1, 0.4}, {0.9, -0.6}};
  for (const auto& x : pts)
    for (int i = 0; i < 2; ++i) {
      const Eigen::Vector2d& sv = shape.e(i);
      const double cross = sv.x() * x.y() - sv.y() * x.x();
      const cplx lhs = st.beta_at(x + sv), rhs = std::polar(1.0, 0.5 * cross) * st.beta_at(x);
      qp = std::max(qp, std::abs(lhs - rhs));
      scale = std::max(scale, std::abs(rhs));
    }
  s.upper("lll", "quasiperiodicity of beta (relative)", qp / scale, 1e-10);
}

void field_checks(Suite& s, const LatticeShape& shape, const PhysParams& p) {
  // Gauge covariance: the Landau calculus is covariant up to level truncation, so use many levels.
  const auto grid = share(Grid(shape, 64));
  const double xi = p.xi_of_omega(0.01);
  const EnergyModel m(p, xi, default_calculus(grid, 1, 120));
  const FieldState st = random_state(grid, 1, xi, 0.3 / p.g, 11, 3);
  CVec gam = 0.2 * cos_mode(*grid, 1, 0) + 0.1 * cos_mode(*grid, 1, -1);
  const FieldState gt = gauge_transform(st, GridField::scalar(grid, 0, gam), p.e);
  const double e0 = m.energy(st).total, e1 = m.energy(gt).total;
  double obs = 0.0;
  for (int c = 0; c < 2; ++c)
    obs = std::max(obs, (st.w.v.col(c).cwiseAbs() - gt.w.v.col(c).cwiseAbs()).cwiseAbs().maxCoeff() /
                            st.w.v.cwiseAbs().maxCoeff());
  const Spectral sp(*grid);
  const CVec c0 = sp.curl(st.alpha.v.col(0), st.alpha.v.col(1));
  const CVec c1 = sp.curl(gt.alpha.v.col(0), gt.alpha.v.col(1));
  obs = std::max(obs, (c0 - c1).cwiseAbs().maxCoeff() / std::max(c0.cwiseAbs().maxCoeff(), 1e-300));
  s.upper("fields", "gauge covariance: energy (relative)", rel(e1, e0), 1e-9);
  s.upper("fields", "gauge covariance: |w|, curl a (relative)", obs, 1e-9);

  const auto g32 = share(Grid(shape, 32));
  const FieldState rs = random_state(g32, 1, xi, 1.0, 5, 3);
  const auto [w0, f] = hodge_split(rs.w);
  const LinkDifference ld(*g32, 1);
  const CVec div = ld.grad_adjoint(w0.v.col(0), 0) + ld.grad_adjoint(w0.v.col(1), 1);
  const CVec r0 = w0.v.col(0) + ld.grad(f.v.col(0), 0) - rs.w.v.col(0);
  const CVec r1 = w0.v.col(1) + ld.grad(f.v.col(0), 1) - rs.w.v.col(1);
  s.upper("fields", "Hodge split: div w0 (relative)", div.norm() / rs.w.v.norm(), 1e-9);
  s.upper("fields", "Hodge split: reconstruction (relative)", std::hypot(r0.norm(), r1.norm()) / rs.w.v.norm(), 1e-12);
}

void green_checks(Suite& s, const LatticeShape& shape, const PhysParams& p, const Faults& faults, int N) {
  const auto grid = share(Grid(shape, 32));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  CVec a(grid->size()), b(grid->size());
  for (int i = 0; i < a.size(); ++i) a[i] = nd(rng), b[i] = nd(rng);
  const GreenOp G1(*grid, p.m_z), G2(*grid, p.m_h);
  const GridField fa = GridField::scalar(grid, 0, a), fb = GridField::scalar(grid, 0, b);
  const cplx l = inner(G1.apply(fa), fb), r = inner(fa, G1.apply(fb));
  s.upper("green", "self-adjointness", std::abs(l - r) / std::abs(l), 1e-11);
  const CVec d = apply_diff(p.m_z, p.m_h, fa).v.col(0);
  const CVec rr = (p.m_h * p.m_h - p.m_z * p.m_z) * G1.apply(G2.apply(fa)).v.col(0);
  s.upper("green", "resolvent identity", (d - rr).norm() / d.norm(), 1e-10);

  const LLLState st = build_chi(shape, 1, share(Grid(shape, N)));
  const CVec rho = (st.chi.v.col(0).cwiseAbs2() + st.chi.v.col(1).cwiseAbs2()).cast<cplx>();
  const GridField fr = GridField::scalar(st.chi.grid, 0, rho);
  const GridField gd = faults.flip_gzh_sign ? apply_diff(p.m_h, p.m_z, fr) : apply_diff(p.m_z, p.m_h, fr);
  s.lower("green", "G_{m_z,m_h}|chi|^2 > 0 (minimum)", gd.v.col(0).real().minCoeff(), 1e-300);
}

void spectrum_checks(Suite& s, const LatticeShape& shape, const PhysParams& p) {
  auto lowest = [&](int N) {
    const LinkDifference ld(Grid(shape, N), 1);
    return lowest_eigenpairs(ld.neg_laplacian(), 1, -1.0).values[0];
  };
  const double a = std::abs(lowest(16) - 1.0), b = std::abs(lowest(32) - 1.0);
  s.lower("spectrum", "lowest -Delta eigenvalue convergence order", std::log2(a / b), 1.9);

  const auto grid = share(Grid(shape, 32));
  const double xi = std::sqrt(2.0) / p.g;  // mu = n
  const EnergyModel m(p, xi, default_calculus(grid, 1, 8));
  const FieldState vac = vacuum_state(grid, 1, xi);
  double zm = 0.0;
  for (int c = 0; c < 2; ++c) {
    FieldState dir = FieldState::constant(grid, 1, 0.0);
    dir.alpha.v.col(c).setOnes();
    const double h = 1e-3;
    const Residual rp = m.residual(axpy(vac, h, dir)), rm = m.residual(axpy(vac, -h, dir));
    zm = std::max({zm, (rp.G1.v - rm.G1.v).norm() / (2 * h), (rp.G2.v - rm.G2.v).norm() / (2 * h),
                   (rp.G3.v - rm.G3.v).norm() / (2 * h), (rp.G4.v - rm.G4.v).norm() / (2 * h)});
  }
  s.upper("spectrum", "gauge zero mode |L(0,c,0,0)|", zm, 1e-12);

  const SpMat H = h1_matrix(LinkDifference(Grid(shape, 16), 1), 0.8);
  s.upper("spectrum", "H1 Hermitian", (Eigen::MatrixXcd(H) - Eigen::MatrixXcd(H).adjoint()).cwiseAbs().maxCoeff(),
          1e-12);
}

void energy_checks(Suite& s, const LatticeShape& shape, const PhysParams& p, std::uint64_t seed) {
  const auto grid = share(Grid(shape, 32));
  const double xi = p.xi_of_omega(0.01);
  const EnergyModel m(p, xi, default_calculus(grid, 1, 40));
  const FieldState st = random_state(grid, 1, xi, 0.5 / p.g, seed, 4);
  const Residual r = m.residual(st);
  const cplx uf = inner(st.w, r.G1) + inner(st.alpha, r.G2) + inner(st.z, r.G3) + inner(st.phi, r.G4);
  s.upper("energy", "<u, F(u)> real (relative)", std::abs(uf.imag()) / std::abs(uf), 1e-10);

  const Residual rt = m.residual(phase_rotate(st, 0.7));
  const Residual tr = phase_rotate(r, 0.7);
  double eq = 0.0;
  for (auto [a, b] : {std::pair{&rt.G1, &tr.G1}, {&rt.G2, &tr.G2}, {&rt.G3, &tr.G3}, {&rt.G4, &tr.G4}})
    eq = std::max(eq, (a->v - b->v).norm() / std::max(b->v.norm(), 1e-300));
  s.upper("energy", "T_delta equivariance", eq, 1e-12);

  const FieldState dir = random_state(grid, 1, 0.0, 0.5 / p.g, seed + 1, 4);
  s.upper("energy", "gradient vs finite differences", gradient_check(m, st, dir, 1e-4 / p.g).rel_error, 1e-6);
}

void bifurcation_checks(Suite& s, const LatticeShape& shape, const PhysParams& p, const RunConfig& c) {
  const LLLState chi = build_chi(shape, 1, share(Grid(shape, c.grid_n)), {}, c.theta_truncation);
  const FirstOrderFields f = first_order(chi, p);
  const FirstOrderIdentities ai = first_order_identities(chi, p, f);
  s.upper("bifurcation", "phi0 identity (relative)", ai.phi0_rel(), 1e-8);
  s.upper("bifurcation", "s^4 bracket closed form (relative)", ai.bracket_rel(), 1e-7);
  s.lower("bifurcation", "psi' < 0 (negated maximum)", -f.psi1.v.col(0).real().maxCoeff(), 1e-300);
  const Spectral sp(*chi.chi.grid);
  const double da = sp.div(f.a1.v.col(0), f.a1.v.col(1)).cwiseAbs().maxCoeff() / f.a1.v.cwiseAbs().maxCoeff();
  const double dz = sp.div(f.z1.v.col(0), f.z1.v.col(1)).cwiseAbs().maxCoeff() / f.z1.v.cwiseAbs().maxCoeff();
  s.upper("bifurcation", "a', z' divergence free (relative)", std::max(da, dz), 1e-10);

  const auto calc = default_calculus(chi.chi.grid, 1, 40);
  double prev = 0.0, ps = 0.0, slope = INFINITY;
  for (double st : {0.2, 0.1, 0.05}) {
    const double rem = std::abs(ansatz_energy(st / p.g, chi, p, f, *calc).remainder());
    if (prev > 0.0) slope = std::min(slope, std::log(prev / rem) / std::log(ps / st));
    prev = rem;
    ps = st;
  }
  s.lower("bifurcation", "truncated ansatz remainder slope", slope, 5.5);

  double omega = 0.01;
  for (double w : c.omegas)
    if (w > 0.0) {
      omega = w;
      break;
    }
  NewtonOptions opt;
  opt.K = c.branch_levels;
  opt.N = c.branch_grid_n;
  opt.max_iter = c.branch_max_iter;
  opt.tol = c.branch_tol;
  const BranchPoint bp = newton_branch(omega, shape, p, opt);
  s.upper("bifurcation", "branch residual g|R|", bp.residual_norm, c.tolerance("branch_residual", 1e-8));
  s.upper("bifurcation", "weak div J on branch", bp.div_current, c.tolerance("div_current", 1e-8));
  s.lower("bifurcation", "branch energy below vacuum (b^2/2 - E)", bp.vacuum_per_area - bp.energy_per_area, 1e-300);
}

void shape_checks(Suite& s, const PhysParams& p) {
  if (p.m_z >= p.m_h) return;
  const ShapeScan sc = scan_eta(p, 12, 32);
  const Refinement r = refine_max(sc, p, 1e-4);
  bool mono = true;
  for (size_t i = 1; i < r.trace.size(); ++i) mono = mono && r.trace[i] >= r.trace[i - 1];
  s.upper("shapeopt", "monotone refinement trace", mono ? 0.0 : 1.0, 0.0);
  double inv = 0.0;
  for (const Mat2i& m : {Mat2i{0, -1, 1, 0}, Mat2i{1, 1, 0, 1}, Mat2i{2, 1, 1, 1}, Mat2i{1, -2, 1, -1}})
    inv = std::max(inv, modular_distance(mobius(m, r.tau_star), r.tau_star));
  s.upper("shapeopt", "argmax modular invariance", inv, 1e-4);
  const double hex = shape_at(p, std::polar(1.0, kPi / 3), 32).eta, sq = shape_at(p, cplx(0, 1), 32).eta;
  s.lower("shapeopt", "eta(hex) - eta(square)", hex - sq, 1e-300);
}

}  // namespace

std::vector<CheckResult> run_verify(const RunConfig& c, const Faults& faults) {
  const PhysParams p = c.params();
  const LatticeShape shape(reduce_to_fundamental(c.tau).first);
  Suite s;
  params_checks(s, p);
  lattice_checks(s, shape);
  lll_checks(s, shape, c.grid_n);
  field_checks(s, shape, p);
  green_checks(s, shape, p, faults, c.grid_n);
  spectrum_checks(s, shape, p);
  energy_checks(s, shape, p, c.seed);
  if (p.n == 1 && p.m_z < p.m_h) bifurcation_checks(s, shape, p, c);
  shape_checks(s, p);
  return s.out;
}

bool all_passed(const std::vector<CheckResult>& r) {
  for (const auto& c : r)
    if (!c.passed) return false;
  return true;
}

}  // namespace ewlat
