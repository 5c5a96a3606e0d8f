#include "ewlat/params.hpp"

#include <cmath>
#include <sstream>

namespace ewlat {

namespace {

void finish(PhysParams& p) {
  p.theta = std::atan2(p.gprime, p.g);
  const double norm = std::hypot(p.g, p.gprime);
  p.cos_theta = p.g / norm;
  p.sin_theta = p.gprime / norm;
  p.e = p.g * p.gprime / norm;
  p.M_W = p.g * p.phi0 / std::sqrt(2.0);
  p.M_Z = p.M_W / p.cos_theta;
  p.M_H = std::sqrt(2.0 * p.lambda) * p.phi0;
  p.b_star = p.g * p.g * p.phi0 * p.phi0 / (2.0 * p.e);
  p.kappa = p.g * p.g / (2.0 * p.cos_theta * p.cos_theta);
  const double n = p.n;
  p.m_w = std::sqrt(n);
  p.m_z = std::sqrt(n) / p.cos_theta;
  p.m_h = std::sqrt(4.0 * p.lambda * n) / p.g;
}

}  // namespace

double PhysParams::xi_of_b(double b) const {
  if (!(b > 0.0)) throw ValidationError("field strength b must be positive");
  return std::sqrt(n / (e * b)) * phi0;
}

double PhysParams::mu_of_b(double b) const {
  const double xi = xi_of_b(b);
  return 0.5 * g * g * xi * xi;
}

double PhysParams::xi_of_omega(double omega) const {
  if (!(omega < 1.0)) throw ValidationError("omega must be below 1");
  return std::sqrt(2.0 * n * (1.0 - omega)) / g;
}

PhysParams from_masses(double M_W, double M_Z, double M_H, int n) {
  if (!(M_W > 0.0)) throw ValidationError("M_W must be positive");
  if (!(M_W < M_Z)) {
    std::ostringstream os;
    os << "need M_W < M_Z (got M_W=" << M_W << ", M_Z=" << M_Z
       << "); M_W = M_Z would make the Weinberg angle vanish";
    throw ValidationError(os.str());
  }
  if (!(M_Z < M_H)) {
    std::ostringstream os;
    os << "need M_Z < M_H (got M_Z=" << M_Z << ", M_H=" << M_H << ")";
    throw ValidationError(os.str());
  }
  if (n < 1) throw ValidationError("flux integer n must be positive");
  PhysParams p;
  p.phi0 = 1.0;
  p.n = n;
  p.g = std::sqrt(2.0) * M_W / p.phi0;
  const double c = M_W / M_Z;
  p.gprime = p.g * std::sqrt(1.0 - c * c) / c;
  p.lambda = M_H * M_H / (2.0 * p.phi0 * p.phi0);
  finish(p);
  return p;
}

PhysParams from_couplings(double g, double gprime, double lambda, double phi0, int n) {
  if (!(g > 0.0)) throw ValidationError("g must be positive");
  if (!(gprime > 0.0)) throw ValidationError("gprime must be positive");
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  if (!(phi0 > 0.0)) throw ValidationError("phi0 must be positive");
  if (n < 1) throw ValidationError("flux integer n must be positive");
  PhysParams p;
  p.g = g;
  p.gprime = gprime;
  p.lambda = lambda;
  p.phi0 = phi0;
  p.n = n;
  finish(p);
  return p;
}

double gev2_to_tesla(double b_gev2) {
  // 1 T = 195.35 eV^2 in natural Heaviside-Lorentz units.
  return b_gev2 * 1e18 / 195.3548;
}

double critical_field_tesla(double M_W_gev, double e_phys) {
  return gev2_to_tesla(M_W_gev * M_W_gev / e_phys);
}

}  // namespace ewlat
