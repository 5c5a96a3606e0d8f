#pragma once

#include <cstdint>
#include <memory>

#include "ewlat/fields.hpp"
#include "ewlat/params.hpp"

namespace ewlat {

/// Cell averages of the nine energy integrands (rescaled units).
struct EnergyBreakdown {
  double curl_w = 0.0;        // |curl_nu w|^2
  double curl_a = 0.0;        // 1/2 |curl a|^2, background included
  double curl_z = 0.0;        // 1/2 |curl z|^2
  double higgs_w = 0.0;       // 1/2 g^2 phi^2 |w|^2
  double higgs_z = 0.0;       // 1/2 kappa phi^2 |z|^2
  double quartic_w = 0.0;     // g^2/2 |wbar x w|^2
  double moment = 0.0;        // i (curl nu) wbar x w
  double moment_imag = 0.0;   // imaginary part of the moment term (should vanish)
  double grad_phi = 0.0;      // |grad phi|^2
  double potential = 0.0;     // 1/2 lambda (phi^2 - xi^2)^2
  double total = 0.0;         // per-cell average
  /// Total minus the vacuum value n^2/(2 e^2), summed without cancellation.
  double excess = 0.0;
  double area = 0.0;

  double integral() const { return total * area; }
};

/// Residual blocks: dE' = 2 Re<G1, dw> + <G2, dalpha> + <G3, dz> + 2 <G4, dphi>
/// for the averaged energy E'.
struct Residual {
  GridField G1, G2, G3, G4;
};

/// Evaluates the rescaled energy and its gradient. Periodic fields use the
/// spectral calculus; the flux sector uses the supplied covariant calculus.
class EnergyModel {
 public:
  EnergyModel(const PhysParams& p, double xi, std::shared_ptr<const FluxCalculus> calc);

  const PhysParams& params() const { return p_; }
  double xi() const { return xi_; }
  const FluxCalculus& calculus() const { return *calc_; }

  EnergyBreakdown energy(const FieldState& s) const;
  Residual residual(const FieldState& s) const;

  /// Directional derivative of E' predicted by the residual.
  double directional(const Residual& r, const FieldState& dir) const;

 private:
  PhysParams p_;
  double xi_;
  std::shared_ptr<const FluxCalculus> calc_;
};

/// Landau-basis calculus with levels 0..K on the state grid (default K = 40).
std::shared_ptr<const FluxCalculus> default_calculus(const GridPtr& grid, int n, int K = 40);

/// Convenience wrappers using default_calculus.
EnergyBreakdown energy(const FieldState& s, const PhysParams& p, double xi);
Residual residual(const FieldState& s, const PhysParams& p, double xi);

struct GradientCheck {
  double predicted = 0.0;
  double finite_difference = 0.0;
  double rel_error = 0.0;
};

/// Compares the residual directional derivative with a Richardson-extrapolated
/// central difference of the energy (steps h and h/2).
GradientCheck gradient_check(const EnergyModel& m, const FieldState& s, const FieldState& dir,
                             double step = 1e-5);

/// state + t * dir, fieldwise.
FieldState axpy(const FieldState& s, double t, const FieldState& dir);

/// Global phase rotation T_delta = (e^{i delta}, 1, 1, 1).
FieldState phase_rotate(const FieldState& s, double delta);
Residual phase_rotate(const Residual& r, double delta);

/// Periodic gauge transform w -> e^{i gamma} w, alpha -> alpha + grad(gamma)/e.
FieldState gauge_transform(const FieldState& s, const GridField& gamma, double e);

/// Smooth pseudo-random state: w from Landau levels below `levels`, alpha = c + curl* sigma,
/// z and phi - xi from Fourier modes |m_i| <= 2, all scaled by amplitude.
FieldState random_state(const GridPtr& grid, int n, double xi, double amplitude, std::uint64_t seed,
                        int levels = 4);

/// Vacuum (0, a^n/e, 0, xi).
FieldState vacuum_state(const GridPtr& grid, int n, double xi);

}  // namespace ewlat
