#pragma once

#include <string>
#include <vector>

#include "ewlat/bifurcation.hpp"

namespace ewlat {

struct ShapeSample {
  cplx tau;
  double eta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Shape functions at one tau (chi rebuilt on an N x N grid).
ShapeSample shape_at(const PhysParams& p, cplx tau, int N, int truncation = 0);

struct ShapeScan {
  int resolution = 0;
  int N = 0;
  double im_max = 2.0;
  double cell_re = 0.0, cell_im = 0.0;  // raster spacing
  /// Raster points inside the fundamental domain, row-major in (Re, Im).
  std::vector<ShapeSample> samples;
  ShapeSample argmax;
  ShapeSample beta_argmin;
  /// eta varies by less than 1e-12 relative over the raster (m_z = m_h).
  bool flat = false;
  int truncation = 0;  // theta truncation override (0 = default)
};

/// eta on the raster Re tau in (-1/2, 1/2], Im tau in [sqrt3/2, im_max]; points
/// with |tau| < 1 lie outside the fundamental domain and are skipped.
/// workers <= 0 selects the hardware concurrency. Precondition: m_z <= m_h.
ShapeScan scan_eta(const PhysParams& p, int resolution, int N, double im_max = 2.0, int workers = 0,
                   int truncation = 0);

struct Refinement {
  cplx tau_star;
  double eta_star = 0.0;
  bool refined = false;
  bool flat = false;
  std::string warning;
  /// Best eta after each simplex iteration (non-decreasing).
  std::vector<double> trace;
  std::vector<cplx> path;
  int iterations = 0;
  /// |eta(N) - eta(2N)| / eta(2N) at tau_star.
  double resolution_check = 0.0;
};

/// Nelder-Mead maximization of eta(reduce(tau)) from the raster argmax, stopping
/// when the simplex diameter drops below tol. The sides Re tau = +-1/2 and the
/// arc |tau| = 1 are identified edges, so only the Im tau = im_max cap counts
/// as a raster boundary.
Refinement refine_max(const ShapeScan& scan, const PhysParams& p, double tol = 1e-4, int max_iter = 200);

/// Distance between tau values modulo SL(2,Z) (both reduced, then compared up to Re shifts of +-1
/// and the boundary identifications).
double modular_distance(cplx a, cplx b);

}  // namespace ewlat
