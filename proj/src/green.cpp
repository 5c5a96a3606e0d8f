#include "ewlat/green.hpp"

#include <cmath>
#include <sstream>

#include "ewlat/params.hpp"

namespace ewlat {

namespace {

void require_periodic_scalar(const GridField& f, const char* what) {
  if (!f.grid) throw ValidationError(std::string(what) + ": field has no grid");
  if (f.flux != 0 || f.components() != 1)
    throw ValidationError(std::string(what) + ": expects a periodic scalar");
}

}  // namespace

GreenOp::GreenOp(const Grid& grid, double m) : sp_(grid), m_(m) {
  if (!(m >= 0.0) || !std::isfinite(m)) throw ValidationError("Green operator mass must be >= 0");
}

GridField GreenOp::apply(const GridField& f) const {
  require_periodic_scalar(f, "GreenOp::apply");
  const double m2 = m_ * m_;
  if (m_ == 0.0) {
    const cplx mean = average(f);
    if (std::abs(mean) >= 1e-10) {
      std::ostringstream os;
      os << "massless Green operator needs a mean-zero input (mean = " << std::abs(mean) << ")";
      throw ValidationError(os.str());
    }
  }
  CVec F = sp_.forward(f.v.col(0));
  for (int i = 0; i < F.size(); ++i) {
    if (i == 0 && m_ == 0.0) {
      F[i] = 0.0;
    } else if (!sp_.active(i)) {
      F[i] = 0.0;
    } else {
      F[i] /= sp_.k2(i) + m2;
    }
  }
  return GridField::scalar(f.grid, 0, sp_.backward(F));
}

GridField apply_diff(double m1, double m2, const GridField& f) {
  if (!(m1 > 0.0) || !(m2 > 0.0)) throw ValidationError("apply_diff needs positive masses");
  require_periodic_scalar(f, "apply_diff");
  Spectral sp(*f.grid);
  const double a = m1 * m1, b = m2 * m2;
  CVec out = sp.multiplier(f.v.col(0), [a, b](double k2) { return 1.0 / (k2 + a) - 1.0 / (k2 + b); });
  return GridField::scalar(f.grid, 0, out);
}

}  // namespace ewlat
