#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ewlat/bifurcation.hpp"
#include "ewlat/params.hpp"

using namespace ewlat;

namespace {

constexpr double kPi = std::numbers::pi;
const PhysParams kP = from_masses(80.379, 91.1876, 125.09, 1);

// Oracle: the normalized lowest-Landau-level density has Fourier weights
// |rho_k / rho_0|^2 = exp(-|k|^2 / 2) on the dual lattice (unit magnetic length),
// so beta and alpha are plain lattice sums.
ShapeFunctions lattice_sum_oracle(cplx tau, const PhysParams& p) {
  const LatticeShape s(tau);
  double beta = 0.0, alpha = 0.0;
  for (int a = -30; a <= 30; ++a)
    for (int b = -30; b <= 30; ++b) {
      const double k2 = (a * s.K(0) + b * s.K(1)).squaredNorm();
      const double w = std::exp(-0.5 * k2);
      beta += w;
      alpha += w * (1.0 / (k2 + p.m_z * p.m_z) - 1.0 / (k2 + p.m_h * p.m_h));
    }
  return {alpha, 1.0 / (p.m_w * p.m_w * alpha + p.sin_theta * p.sin_theta), beta};
}

}  // namespace

TEST_CASE("shape functions against the lattice-sum oracle") {
  for (cplx tau : {cplx(0, 1), std::polar(1.0, kPi / 3), cplx(0.2, 1.4)}) {
    const LatticeShape s(tau);
    const ShapeFunctions o = lattice_sum_oracle(tau, kP);
    const ShapeFunctions f = alpha_eta(build_chi(s, 1, share(Grid(s, 64))), kP);
    CHECK(f.alpha == doctest::Approx(o.alpha).epsilon(1e-10));
    CHECK(f.eta == doctest::Approx(o.eta).epsilon(1e-10));
    CHECK(f.beta == doctest::Approx(o.beta).epsilon(1e-10));
  }
  // Frozen from the oracle at the hexagonal point.
  const ShapeFunctions hex = lattice_sum_oracle(std::polar(1.0, kPi / 3), kP);
  CHECK(hex.eta == doctest::Approx(1.6969447889).epsilon(1e-9));
  CHECK(hex.beta == doctest::Approx(1.159595267).epsilon(1e-9));
  // Equal masses: alpha vanishes and eta = 1/sin^2.
  const PhysParams deg = from_couplings(0.65, 0.35, 0.13625, 1.0, 1);
  const LatticeShape sq(cplx(0, 1));
  const ShapeFunctions d = alpha_eta(build_chi(sq, 1, share(Grid(sq, 32))), deg);
  CHECK(std::abs(d.alpha) < 1e-12);  // couplings give m_z = m_h only up to rounding
  CHECK(d.eta == doctest::Approx(1.0 / (deg.sin_theta * deg.sin_theta)).epsilon(1e-10));
  CHECK_THROWS_AS(alpha_eta(build_chi(sq, 1, share(Grid(sq, 16))), from_couplings(0.65, 0.35, 0.05, 1.0)),
                  ValidationError);
}

TEST_CASE("first-order fields solve their equations") {
  const LatticeShape s(std::polar(1.0, kPi / 3));
  const LLLState chi = build_chi(s, 1, share(Grid(s, 64)));
  const FirstOrderFields f = first_order(chi, kP);
  const FirstOrderCheck c = check_first_order(chi, kP, f);
  const double scale = f.curl_nu1.v.cwiseAbs().maxCoeff();
  CHECK(c.a_eq < 1e-10 * scale);
  CHECK(c.z_eq < 1e-10 * scale);
  CHECK(c.psi_eq < 1e-10 * scale);
  CHECK(c.curl_a_pointwise < 1e-10 * scale);
  CHECK(c.curl_nu_closed_form < 1e-10 * scale);
  CHECK(c.xi_scalar_identity < 1e-12);
  CHECK(f.psi1.v.real().maxCoeff() < 0.0);
  CHECK(f.xi1 == doctest::Approx(-kP.g / std::sqrt(2.0) / f.eta).epsilon(1e-12));

  const FirstOrderIdentities ai = first_order_identities(chi, kP, f);
  CHECK(ai.phi0_rel() < 1e-10);
  CHECK(ai.bracket_rel() < 1e-10);
  CHECK(ai.bracket_closed == doctest::Approx(-0.5 * kP.g * kP.g / f.eta).epsilon(1e-12));
}

TEST_CASE("truncated ansatz energy is accurate to sixth order") {
  const LatticeShape s(std::polar(1.0, kPi / 3));
  const LLLState chi = build_chi(s, 1, share(Grid(s, 32)));
  const FirstOrderFields f = first_order(chi, kP);
  const auto calc = default_calculus(chi.chi.grid, 1, 40);
  const double r1 = std::abs(ansatz_energy(0.1 / kP.g, chi, kP, f, *calc).remainder());
  const double r2 = std::abs(ansatz_energy(0.05 / kP.g, chi, kP, f, *calc).remainder());
  CHECK(std::log2(r1 / r2) > 5.5);
}

TEST_CASE("leading-order relations") {
  const LatticeShape s(cplx(0, 1));
  const LLLState chi = build_chi(s, 1, share(Grid(s, 32)));
  const double eta = alpha_eta(chi, kP).eta;
  CHECK(s_squared_of_omega(0.01, chi, kP) == doctest::Approx(eta * 0.01 / (kP.g * kP.g)).epsilon(1e-12));
  const double b = kP.b_star / 0.99;
  CHECK(energy_expansion(0.01, eta, kP) ==
        doctest::Approx(0.5 * b * b * (1.0 - kP.sin_theta * kP.sin_theta * eta * 1e-4)).epsilon(1e-14));
}

TEST_CASE("Newton branch near threshold") {
  const LatticeShape s(std::polar(1.0, kPi / 3));
  const double omega = 0.01;
  const BranchPoint bp = newton_branch(omega, s, kP);
  CHECK(bp.residual_norm < 1e-10);
  const double s2 = s_squared_of_omega(omega, build_chi(s, 1, share(Grid(s, 32))), kP);
  CHECK(bp.s * bp.s == doctest::Approx(s2).epsilon(0.05));
  CHECK(bp.energy_per_area < bp.vacuum_per_area);
  CHECK(bp.div_current < 1e-8);

  // Starting from -s gives the image under w -> -w with the other fields unchanged.
  NewtonOptions neg;
  neg.negative = true;
  const BranchPoint bm = newton_branch(omega, s, kP, neg);
  CHECK(bm.s == doctest::Approx(-bp.s).epsilon(1e-8));
  CHECK((bm.state.w.v + bp.state.w.v).norm() < 1e-7 * bp.state.w.v.norm());
  CHECK((bm.state.phi.v - bp.state.phi.v).norm() < 1e-7 * bp.state.phi.v.norm());
  CHECK((bm.state.z.v - bp.state.z.v).norm() < 1e-7 * (bp.state.z.v.norm() + 1e-300));
  CHECK(bm.energy_per_area == doctest::Approx(bp.energy_per_area).epsilon(1e-12));

  const BranchPoint v = newton_branch(0.0, s, kP);
  CHECK(v.s == 0.0);
  CHECK(v.energy_per_area == doctest::Approx(v.vacuum_per_area).epsilon(1e-14));
  CHECK_THROWS_AS(newton_branch(-0.01, s, kP), ValidationError);
  CHECK_THROWS_AS(newton_branch(0.01, s, from_masses(80.379, 91.1876, 125.09, 2)), ValidationError);
}
