#include "ewlat/lattice.hpp"

#include <cmath>

#include "ewlat/params.hpp"

namespace ewlat {

LatticeShape::LatticeShape(cplx tau) : tau_(tau) {
  if (!(tau.imag() > 0.0)) throw ValidationError("Im tau must be positive");
  len_ = std::sqrt(2.0 * M_PI / tau.imag());
  e_[0] = Eigen::Vector2d(len_, 0.0);
  e_[1] = Eigen::Vector2d(len_ * tau.real(), len_ * tau.imag());
  E_.col(0) = e_[0];
  E_.col(1) = e_[1];
  EinvT_ = E_.inverse().transpose();
  K_[0] = 2.0 * M_PI * EinvT_.col(0);
  K_[1] = 2.0 * M_PI * EinvT_.col(1);
  Ginv_ = (E_.transpose() * E_).inverse();
}

double LatticeShape::cell_area() const { return std::abs(E_.determinant()); }

cplx mobius(const Mat2i& m, cplx tau) {
  return (double(m[0]) * tau + double(m[1])) / (double(m[2]) * tau + double(m[3]));
}

bool in_fundamental_domain(cplx tau, double tol) {
  if (tau.imag() <= 0.0) return false;
  if (tau.real() <= -0.5 + tol || tau.real() > 0.5 + tol) return false;
  const double r = std::abs(tau);
  if (r < 1.0 - tol) return false;
  if (std::abs(r - 1.0) <= tol && tau.real() < -tol) return false;
  return true;
}

namespace {

Mat2i mul(const Mat2i& a, const Mat2i& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

}  // namespace

std::pair<cplx, Mat2i> reduce_to_fundamental(cplx tau) {
  if (!(tau.imag() > 0.0)) throw ValidationError("reduce_to_fundamental: Im tau must be positive");
  constexpr double tol = 1e-12;
  Mat2i m{1, 0, 0, 1};
  cplx t = tau;
  for (int iter = 0; iter < 10000; ++iter) {
    // Translate Re t into (-1/2, 1/2].
    long long k = static_cast<long long>(std::floor(0.5 - t.real() + tol));
    if (k != 0) {
      t += double(k);
      m = mul(Mat2i{1, k, 0, 1}, m);
    }
    if (std::abs(t) < 1.0 - tol || (std::abs(std::abs(t) - 1.0) <= tol && t.real() < -tol)) {
      t = -1.0 / t;
      m = mul(Mat2i{0, -1, 1, 0}, m);
      continue;
    }
    break;
  }
  if (m[2] < 0 || (m[2] == 0 && m[3] < 0)) {
    for (auto& x : m) x = -x;
  }
  return {t, m};
}

Grid::Grid(const LatticeShape& shape, int N) : shape_(shape), N_(N) {
  if (N < 8 || N % 2 != 0) throw ValidationError("grid size N must be even and >= 8");
}

Eigen::Vector2d Grid::point(int j1, int j2) const {
  return shape_.E() * Eigen::Vector2d(double(j1) / N_, double(j2) / N_);
}

Grid make_grid(const LatticeShape& shape, int N) { return Grid(shape, N); }

}  // namespace ewlat
