#pragma once

#include "ewlat/fields.hpp"

namespace ewlat {

/// Periodic resolvent (-Delta + m^2)^{-1} on the torus as a Fourier multiplier.
class GreenOp {
 public:
  GreenOp(const Grid& grid, double m);

  double mass() const { return m_; }

  /// Preconditions: periodic scalar; for m = 0 the input mean must vanish (|<f>| < 1e-10).
  GridField apply(const GridField& f) const;

 private:
  Spectral sp_;
  double m_;
};

/// (G_{m1} - G_{m2}) f. Positivity preserving when m1 < m2.
GridField apply_diff(double m1, double m2, const GridField& f);

}  // namespace ewlat
