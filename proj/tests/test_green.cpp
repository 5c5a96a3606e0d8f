#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ewlat/params.hpp"
#include "ewlat/green.hpp"

using namespace ewlat;

namespace {

// Oracle: naive O(N^4) Fourier synthesis of (|k|^2 + m^2)^{-1} without FFTs.
CVec naive_green(const Grid& g, double m, const CVec& f) {
  const int N = g.N();
  const auto& s = g.shape();
  CVec out = CVec::Zero(g.size());
  for (int m1 = -N / 2 + 1; m1 < N / 2; ++m1)
    for (int m2 = -N / 2 + 1; m2 < N / 2; ++m2) {
      const Eigen::Vector2d k = m1 * s.K(0) + m2 * s.K(1);
      const double d = k.squaredNorm() + m * m;
      if (d == 0.0) continue;
      cplx c = 0.0;
      for (int i = 0; i < g.size(); ++i) c += f[i] * std::exp(cplx(0, -k.dot(g.point(i))));
      c /= double(g.size()) * d;
      for (int i = 0; i < g.size(); ++i) out[i] += c * std::exp(cplx(0, k.dot(g.point(i))));
    }
  return out;
}

CVec random_vec(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CVec v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

}  // namespace

TEST_CASE("Green operator agrees with a direct Fourier sum") {
  const auto g = share(Grid(LatticeShape(cplx(0.25, 1.2)), 8));
  CVec f = random_vec(g->size(), 1);
  for (double m : {0.0, 0.7, 1.9}) {
    CVec in = f;
    if (m == 0.0) in.array() -= in.mean();
    const CVec a = GreenOp(*g, m).apply(GridField::scalar(g, 0, in)).v.col(0);
    CHECK((a - naive_green(*g, m, in)).norm() / a.norm() < 1e-12);
  }
}

TEST_CASE("self-adjoint and positive") {
  const auto g = share(Grid(LatticeShape(cplx(0, 1)), 32));
  const GreenOp G(*g, 1.3);
  const GridField a = GridField::scalar(g, 0, random_vec(g->size(), 2));
  const GridField b = GridField::scalar(g, 0, random_vec(g->size(), 3));
  CHECK(std::abs(inner(G.apply(a), b) - inner(a, G.apply(b))) < 1e-11 * std::abs(inner(a, G.apply(b))));
  CHECK(inner(a, G.apply(a)).real() > 0.0);
  // Constants: G_m 1 = 1/m^2.
  const GridField one = GridField::scalar(g, 0, CVec::Ones(g->size()));
  CHECK(G.apply(one).v.col(0).real().mean() == doctest::Approx(1.0 / (1.3 * 1.3)).epsilon(1e-14));
}

TEST_CASE("resolvent identity") {
  const auto g = share(Grid(LatticeShape(cplx(0.1, 1.4)), 32));
  const GridField f = GridField::scalar(g, 0, random_vec(g->size(), 4));
  const double m1 = 1.1, m2 = 1.6;
  const CVec d = apply_diff(m1, m2, f).v.col(0);
  const CVec r = (m2 * m2 - m1 * m1) * GreenOp(*g, m1).apply(GreenOp(*g, m2).apply(f)).v.col(0);
  CHECK((d - r).norm() / d.norm() < 1e-10);
}

TEST_CASE("positivity of the difference for m1 < m2") {
  const auto g = share(Grid(LatticeShape(cplx(0, 1)), 32));
  CVec bump(g->size());
  for (int i = 0; i < g->size(); ++i) bump[i] = std::exp(-g->point(i).squaredNorm());
  const CVec d = apply_diff(1.0, 2.0, GridField::scalar(g, 0, bump)).v.col(0);
  CHECK(d.real().minCoeff() > 0.0);
}

TEST_CASE("preconditions") {
  const auto g = share(Grid(LatticeShape(cplx(0, 1)), 16));
  const GridField one = GridField::scalar(g, 0, CVec::Ones(g->size()));
  CHECK_THROWS_AS(GreenOp(*g, 0.0).apply(one), ValidationError);
  CHECK_THROWS_AS(apply_diff(0.0, 1.0, one), ValidationError);
}
