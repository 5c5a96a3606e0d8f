#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ewlat/params.hpp"
#include "ewlat/shapeopt.hpp"

using namespace ewlat;

namespace {

constexpr double kPi = std::numbers::pi;
const PhysParams kP = from_masses(80.379, 91.1876, 125.09, 1);
const cplx kHex = std::polar(1.0, kPi / 3);

}  // namespace

TEST_CASE("eta is invariant under modular maps and mirror reflection") {
  const cplx t(0.21, 1.13);
  const double e0 = shape_at(kP, t, 32).eta;
  for (const Mat2i& m : {Mat2i{0, -1, 1, 0}, Mat2i{1, 1, 0, 1}, Mat2i{2, 1, 1, 1}})
    CHECK(shape_at(kP, mobius(m, t), 32).eta == doctest::Approx(e0).epsilon(1e-9));
  CHECK(shape_at(kP, -std::conj(t), 32).eta == doctest::Approx(e0).epsilon(1e-13));
}

TEST_CASE("hexagonal beats square") {
  const ShapeSample hex = shape_at(kP, kHex, 32), sq = shape_at(kP, cplx(0, 1), 32);
  CHECK(hex.eta > sq.eta);
  CHECK(hex.beta < sq.beta);
}

TEST_CASE("coarse scan and refinement find the hexagonal point") {
  const ShapeScan sc = scan_eta(kP, 10, 32, 2.0, 1);
  CHECK_FALSE(sc.flat);
  for (const ShapeSample& x : sc.samples) CHECK(in_fundamental_domain(x.tau, 1e-9));
  CHECK(std::abs(sc.argmax.tau - kHex) < std::hypot(sc.cell_re, sc.cell_im) + 1e-12);
  const Refinement r = refine_max(sc, kP, 1e-5);
  CHECK(r.refined);
  CHECK(modular_distance(r.tau_star, kHex) < 1e-3);
  for (size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1]);
  CHECK(r.resolution_check < 1e-5);
  // Worker count does not change results.
  const ShapeScan sc2 = scan_eta(kP, 10, 32, 2.0, 3);
  REQUIRE(sc2.samples.size() == sc.samples.size());
  for (size_t i = 0; i < sc.samples.size(); ++i) CHECK(sc2.samples[i].eta == sc.samples[i].eta);
}

TEST_CASE("equal Z and Higgs masses give a flat map") {
  const PhysParams deg = from_couplings(0.65, 0.35, 0.13625, 1.0, 1);
  const ShapeScan sc = scan_eta(deg, 6, 16, 2.0, 1);
  CHECK(sc.flat);
  const Refinement r = refine_max(sc, deg);
  CHECK(r.flat);
  CHECK_FALSE(r.warning.empty());
}

TEST_CASE("modular distance") {
  CHECK(modular_distance(kHex, kHex + 1.0) < 1e-14);
  CHECK(modular_distance(cplx(0, 1), cplx(0, 1) + 3.0) < 1e-14);
  CHECK(modular_distance(cplx(0.3, 1.2), mobius(Mat2i{0, -1, 1, 0}, cplx(0.3, 1.2))) < 1e-12);
  CHECK(modular_distance(cplx(0, 1), kHex) == doctest::Approx(std::abs(cplx(0, 1) - kHex)).epsilon(1e-12));
}
