#pragma once

#include <array>
#include <string>
#include <vector>

#include "ewlat/energy.hpp"
#include "ewlat/lll.hpp"

namespace ewlat {

/// Order-s^2 correction fields of the branch.
struct FirstOrderFields {
  GridField a1;    // a'
  GridField z1;    // z'
  GridField psi1;  // psi'
  double xi1 = 0.0;
  /// curl nu' from the closed form g^2|chi|^2 - e^2<|chi|^2> - g^2 n G_{m_z}|chi|^2.
  GridField curl_nu1;
  double chi2_mean = 0.0;  // <|chi|^2>
  double eta = 0.0;
};

/// Precondition: chi normalized, m_z <= m_h.
FirstOrderFields first_order(const LLLState& chi, const PhysParams& p);

struct ShapeFunctions {
  double alpha = 0.0;
  double eta = 0.0;
  double beta = 0.0;  // Abrikosov ratio <|chi|^4>/<|chi|^2>^2
};

/// Precondition: m_z <= m_h (equality gives alpha = 0).
ShapeFunctions alpha_eta(const LLLState& chi, const PhysParams& p);

/// Leading order s^2 = n eta omega / (g^2 <|chi|^2>).
double s_squared_of_omega(double omega, const LLLState& chi, const PhysParams& p);

/// Leading-order energy per unit area (unrescaled): b^2/2 - b^2 sin^2 eta omega^2 / 2,
/// with b = b_star/(1 - omega).
double energy_expansion(double omega, double eta, const PhysParams& p);

/// Residuals of the three order-s^4 field equations for (a', z', psi') (max norms).
struct FirstOrderCheck {
  double a_eq = 0.0, z_eq = 0.0, psi_eq = 0.0;
  double curl_a_pointwise = 0.0;  // |curl a' - e(|chi|^2 - <|chi|^2>)|_max
  double curl_nu_closed_form = 0.0;
  double xi_scalar_identity = 0.0;  // relative mismatch of the xi' scalar relation
};
FirstOrderCheck check_first_order(const LLLState& chi, const PhysParams& p, const FirstOrderFields& f);

/// Consistency identities satisfied by the first-order fields.
struct FirstOrderIdentities {
  double phi0_lhs = 0.0, phi0_rhs = 0.0;        // <g sqrt(2n) xi' |chi|^2> vs its field expression
  double bracket = 0.0, bracket_closed = 0.0;   // s^4 bracket vs -(g^2/2)<|chi|^2>^2/eta
  double phi0_rel() const;
  double bracket_rel() const;
};
FirstOrderIdentities first_order_identities(const LLLState& chi, const PhysParams& p, const FirstOrderFields& f);

/// Exact energy of the truncated ansatz (s chi, a^n/e + s^2 a', s^2 z', xi_s + s^2 psi')
/// with xi_s = sqrt(2n)/g + s^2 xi', minus n^2/(2e^2), together with s^4 * bracket.
struct AnsatzEnergy {
  double s = 0.0;
  double excess = 0.0;
  double predicted = 0.0;
  double remainder() const { return excess - predicted; }
};
AnsatzEnergy ansatz_energy(double s, const LLLState& chi, const PhysParams& p, const FirstOrderFields& f,
                           const FluxCalculus& calc);

struct NewtonOptions {
  int K = 32;          // highest Landau level kept in w
  int N = 32;          // grid
  int max_iter = 40;
  double tol = 1e-10;  // on the scaled residual g * ||R||
  bool negative = false;  // start from -s (tests the odd/even structure)
};

struct BranchPoint {
  double omega = 0.0;
  double b = 0.0;
  double s = 0.0;
  double mu = 0.0;
  std::array<double, 2> c{0.0, 0.0};  // <alpha>
  FieldState state;                   // full solution
  FieldState u_perp;                  // (w - s chi, alpha, z, phi - xi)
  double residual_norm = 0.0;         // g * ||R|| (scale free)
  std::vector<double> residual_history;
  int iterations = 0;
  EnergyBreakdown energy;             // rescaled, per cell
  double energy_per_area = 0.0;       // unrescaled, per unit area
  double vacuum_per_area = 0.0;       // b^2/2
  double div_current = 0.0;           // max over low modes of |<J, grad gamma>|/(|J| |grad gamma|)
  double kernel_overlap = 0.0;        // |P u_perp| relative to |u_perp|
};

/// Galerkin-Newton solve of the full system at distance omega above threshold.
/// Precondition: n = 1. omega = 0 returns the vacuum; omega < 0 is rejected.
BranchPoint newton_branch(double omega, const LatticeShape& shape, const PhysParams& p,
                          const NewtonOptions& opt = {});

}  // namespace ewlat
