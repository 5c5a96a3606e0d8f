#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ewlat/params.hpp"
#include "ewlat/lll.hpp"

using namespace ewlat;

namespace {

constexpr double kPi = std::numbers::pi;

// Oracle: Abrikosov ratio from a plain wide theta sum (|m| <= 40, no centring,
// no folded prefactor), evaluated on an N x N grid.
double abrikosov_oracle(cplx tau, int N) {
  const LatticeShape s(tau);
  const Grid g(s, N);
  const double L = s.length();
  double m2 = 0.0, m4 = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    const Eigen::Vector2d x = g.point(k);
    const cplx z = cplx(x.x(), x.y()) / L;
    cplx th = 0.0;
    for (int m = -40; m <= 40; ++m) th += std::exp(cplx(0, kPi) * double(m * m) * tau + cplx(0, 2 * kPi * m) * z);
    const double a = std::norm(th) * std::exp(-kPi / tau.imag() * (std::norm(z) - (z * z).real()));
    m2 += a;
    m4 += a * a;
  }
  m2 /= g.size();
  m4 /= g.size();
  return m4 / (m2 * m2);
}

double abrikosov(const LLLState& st) {
  const Eigen::ArrayXd r = st.chi.v.col(0).cwiseAbs2().array() + st.chi.v.col(1).cwiseAbs2().array();
  return (r * r).mean() / (r.mean() * r.mean());
}

double dbar_ratio(const LatticeShape& s, int N) {
  const LLLState st = build_chi(s, 1, share(Grid(s, N)));
  const LinkDifference ld(*st.beta.grid, 1);
  const CVec b = st.beta.v.col(0);
  return (ld.dbar() * b).norm() / b.norm();
}

}  // namespace

TEST_CASE("Abrikosov ratio: oracle at two resolutions, then regression constants") {
  const cplx sq(0, 1), hex = std::polar(1.0, kPi / 3);
  // Oracle values agree between N = 64 and N = 128 (spectral quadrature of a smooth periodic density).
  const double o_sq64 = abrikosov_oracle(sq, 64), o_sq128 = abrikosov_oracle(sq, 128);
  const double o_hx64 = abrikosov_oracle(hex, 64), o_hx128 = abrikosov_oracle(hex, 128);
  CHECK(o_sq64 == doctest::Approx(o_sq128).epsilon(1e-12));
  CHECK(o_hx64 == doctest::Approx(o_hx128).epsilon(1e-12));
  // Frozen from the oracle above: 1.180340599 (square), 1.159595267 (hexagonal).
  CHECK(o_sq128 == doctest::Approx(1.180340599).epsilon(1e-9));
  CHECK(o_hx128 == doctest::Approx(1.159595267).epsilon(1e-9));
  for (int N : {32, 64}) {
    CHECK(abrikosov(build_chi(LatticeShape(sq), 1, share(Grid(LatticeShape(sq), N)))) ==
          doctest::Approx(o_sq128).epsilon(1e-10));
    CHECK(abrikosov(build_chi(LatticeShape(hex), 1, share(Grid(LatticeShape(hex), N)))) ==
          doctest::Approx(o_hx128).epsilon(1e-10));
  }
}

TEST_CASE("theta series quasi-periodicity") {
  for (int n : {1, 2, 3}) {
    const cplx tau(0.3, 1.1);
    const ThetaSeries th(tau, n);
    for (cplx z : {cplx(0.1, 0.2), cplx(-0.4, 0.7), cplx(0.25, -0.3)}) {
      const cplx t0 = theta_eval(th, z).value;
      CHECK(std::abs(theta_eval(th, z + 1.0).value - t0) < 1e-12 * std::abs(t0));
      const cplx f = std::exp(cplx(0, -2 * kPi * n) * z - cplx(0, kPi * n) * tau);
      CHECK(std::abs(theta_eval(th, z + tau).value - f * t0) < 1e-11 * std::abs(f * t0));
    }
  }
  CHECK(ThetaSeries::default_truncation(cplx(0, 1), 1) == int(std::ceil(std::sqrt(34.0 / kPi))) + 2);
}

TEST_CASE("normalization, parity and quasi-periodicity of the state") {
  const LatticeShape s(std::polar(1.0, kPi / 3));
  const LLLState st = build_chi(s, 1, share(Grid(s, 32)));
  CHECK(st.beta.v.col(0).cwiseAbs2().mean() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(st.chi.v(5, 1) - cplx(0, 1) * st.chi.v(5, 0)) < 1e-15);
  double par = 0.0, scale = 0.0;
  for (const Eigen::Vector2d& x : {Eigen::Vector2d(0.3, 0.1), Eigen::Vector2d(-1.2, 0.8), Eigen::Vector2d(0.7, -1.5)}) {
    par = std::max(par, std::abs(st.beta_at(-x) - st.beta_at(x)));
    scale = std::max(scale, std::abs(st.beta_at(x)));
    for (int i = 0; i < 2; ++i) {
      const Eigen::Vector2d& e = s.e(i);
      const double cross = e.x() * x.y() - e.y() * x.x();
      CHECK(std::abs(st.beta_at(x + e) - std::polar(1.0, 0.5 * cross) * st.beta_at(x)) < 1e-12 * scale + 1e-14);
    }
  }
  CHECK(par < 1e-10 * scale);
  // Grid samples match point evaluation.
  CHECK(std::abs(st.beta.v(37, 0) - st.beta_at(st.beta.grid->point(37))) < 1e-13);
}

TEST_CASE("null state quality converges at second order") {
  const LatticeShape s(cplx(0, 1));
  const double r32 = dbar_ratio(s, 32), r64 = dbar_ratio(s, 64), r128 = dbar_ratio(s, 128);
  CHECK(std::log2(r32 / r64) >= 1.9);
  CHECK(std::log2(r64 / r128) >= 1.9);
}

TEST_CASE("single vortex at the cell centre") {
  for (cplx tau : {cplx(0, 1), std::polar(1.0, kPi / 3)}) {
    const LatticeShape s(tau);
    const LLLState st = build_chi(s, 1, share(Grid(s, 16)));
    const auto w = vortex_windings(st);
    int total = 0, nonzero = 0;
    for (int x : w) total += x, nonzero += x != 0;
    CHECK(total == 1);
    CHECK(nonzero == 1);
    CHECK(w[st.beta.grid->index(8, 8)] == 1);
  }
  const LatticeShape s(cplx(0, 1));
  int total = 0;
  for (int x : vortex_windings(build_chi(s, 2, share(Grid(s, 16))))) total += x;
  CHECK(total == 2);
}

TEST_CASE("ladder states") {
  const LatticeShape s(cplx(0, 1));
  const auto grid = share(Grid(s, 64));
  const LLLState st = build_chi(s, 1, grid);
  const LandauCalculus lc(std::make_shared<LandauBasis>(grid, 1, 10));
  const GridField u1 = ladder_up(st.beta, 1, lc);
  CHECK(std::abs(inner(u1, st.beta)) < 1e-8);
  // Rayleigh quotients of -Delta with link differences: 3n and 5n.
  const LinkDifference ld(*grid, 1);
  for (int k : {1, 2}) {
    const CVec u = ladder_up(st.beta, k, ld).v.col(0);
    const double rq = (u.adjoint() * (ld.neg_laplacian() * u))(0).real() / u.squaredNorm();
    CHECK(rq == doctest::Approx(2 * k + 1).epsilon(1e-2));
  }
  CHECK_THROWS_AS(ladder_up(GridField::scalar(grid, 1, CVec::Zero(grid->size())), 1, lc), std::runtime_error);
  CHECK_THROWS_AS(ladder_up(st.beta, 0, lc), ValidationError);
}

TEST_CASE("Landau basis: orthonormal, ladder relations, parity") {
  const LatticeShape s(cplx(0.2, 1.3));
  const auto grid = share(Grid(s, 32));
  const LandauBasis b(grid, 2, 6);
  const Eigen::MatrixXcd G = b.samples().adjoint() * b.samples() / double(grid->size());
  CHECK((G - Eigen::MatrixXcd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff() < 1e-12);
  // Link-difference dbar* on level 1 approximates sqrt(2n*2) level 2.
  const LinkDifference ld(*grid, 2);
  const CVec up = ld.dbar_adj() * b.state(1, 0);
  CHECK((up - std::sqrt(8.0) * b.state(2, 0)).norm() / up.norm() < 0.05);
  const LandauBasis b1(grid, 1, 4);
  const LLLState st = build_chi(s, 1, grid);
  CHECK(std::abs(std::abs(b1.project(st.beta.v.col(0))[0]) - std::sqrt(0.5)) < 1e-12);
}

TEST_CASE("preconditions") {
  const LatticeShape s(cplx(0, 1));
  const auto grid = share(Grid(s, 16));
  CHECK_THROWS_AS(build_chi(s, 0, grid), ValidationError);
  CHECK_THROWS_AS(build_chi(s, 2, grid, {1.0}), ValidationError);
  CHECK_THROWS_AS(build_chi(s, 1, nullptr), ValidationError);
}
