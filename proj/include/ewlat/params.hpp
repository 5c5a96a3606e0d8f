#pragma once

#include <stdexcept>
#include <string>

namespace ewlat {

/// Raised for any violated precondition on user-facing inputs.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Couplings of the electroweak model plus the constants derived from them.
///
/// Internal unit: phi0 = 1 when built from masses. Rescaled masses refer to
/// the cell of area 2*pi carrying n flux quanta.
struct PhysParams {
  double g = 0.0;
  double gprime = 0.0;
  double lambda = 0.0;
  double phi0 = 1.0;
  int n = 1;

  double theta = 0.0;
  double cos_theta = 1.0;
  double sin_theta = 0.0;
  double e = 0.0;
  double M_W = 0.0;
  double M_Z = 0.0;
  double M_H = 0.0;
  double b_star = 0.0;
  double kappa = 0.0;

  double m_w = 0.0;
  double m_z = 0.0;
  double m_h = 0.0;

  /// Rescaled Higgs vacuum value xi = sqrt(n/(e b)) phi0.
  double xi_of_b(double b) const;
  /// mu = g^2 xi^2 / 2 at field strength b.
  double mu_of_b(double b) const;
  /// omega = 1 - b_star / b.
  double omega_of_b(double b) const { return 1.0 - b_star / b; }
  /// Inverse of omega_of_b.
  double b_of_omega(double omega) const { return b_star / (1.0 - omega); }
  /// xi for a given distance omega above threshold.
  double xi_of_omega(double omega) const;
};

/// Builds parameters from boson masses; cos(theta) = M_W/M_Z, phi0 = 1,
/// g = sqrt(2) M_W, lambda = M_H^2/2.
PhysParams from_masses(double M_W, double M_Z, double M_H, int n = 1);

/// Builds parameters from couplings directly.
PhysParams from_couplings(double g, double gprime, double lambda, double phi0, int n = 1);

/// Field strength in GeV^2 converted to tesla (hbar = c = 1, Heaviside-Lorentz).
double gev2_to_tesla(double b_gev2);

/// Critical field M_W^2/e in tesla for a physical charge e_phys (default sqrt(4 pi alpha)).
double critical_field_tesla(double M_W_gev, double e_phys = 0.30282212);

}  // namespace ewlat
