#include "ewlat/shapeopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace ewlat {

ShapeSample shape_at(const PhysParams& p, cplx tau, int N, int truncation) {
  const LatticeShape shape(tau);
  const LLLState chi = build_chi(shape, p.n, share(Grid(shape, N)), {}, truncation);
  const ShapeFunctions sf = alpha_eta(chi, p);
  return {tau, sf.eta, sf.alpha, sf.beta};
}

ShapeScan scan_eta(const PhysParams& p, int resolution, int N, double im_max, int workers,
                   int truncation) {
  if (resolution < 2) throw ValidationError("scan resolution must be at least 2");
  const double im_min = std::sqrt(3.0) / 2.0;
  if (!(im_max > im_min)) throw ValidationError("empty scan window: im_max must exceed sqrt(3)/2");
  if (p.m_z > p.m_h) throw ValidationError("shape scan needs m_z <= m_h");

  ShapeScan scan;
  scan.resolution = resolution;
  scan.N = N;
  scan.im_max = im_max;
  scan.truncation = truncation;
  scan.cell_re = 1.0 / resolution;
  scan.cell_im = (im_max - im_min) / (resolution - 1);
  std::vector<cplx> taus;
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      const cplx t(-0.5 + (i + 1) * scan.cell_re, im_min + j * scan.cell_im);
      if (std::abs(t) >= 1.0 - 1e-12) taus.push_back(t);
    }
  if (taus.empty()) throw ValidationError("empty scan window");

  scan.samples.resize(taus.size());
  if (workers <= 0) workers = int(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, int(taus.size()));
  // Static partition; results land at fixed indices so the reduction order is deterministic.
  auto run = [&](int w) {
    for (size_t k = w; k < taus.size(); k += workers) scan.samples[k] = shape_at(p, taus[k], N, truncation);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  scan.argmax = scan.samples.front();
  scan.beta_argmin = scan.samples.front();
  double lo = scan.argmax.eta, hi = lo;
  for (const auto& s : scan.samples) {
    if (s.eta > scan.argmax.eta) scan.argmax = s;
    if (s.beta < scan.beta_argmin.beta) scan.beta_argmin = s;
    lo = std::min(lo, s.eta);
    hi = std::max(hi, s.eta);
  }
  scan.flat = hi - lo <= 1e-12 * std::abs(hi);
  return scan;
}

double modular_distance(cplx a, cplx b) {
  const cplx ra = reduce_to_fundamental(a).first, rb = reduce_to_fundamental(b).first;
  double d = std::numeric_limits<double>::infinity();
  // Boundary points have partners on the opposite edge (Re shifts) or across the arc (tau -> -1/tau).
  for (const cplx& x : {rb, -1.0 / rb})
    for (int k = -1; k <= 1; ++k) d = std::min(d, std::abs(ra - (x + double(k))));
  return d;
}

Refinement refine_max(const ShapeScan& scan, const PhysParams& p, double tol, int max_iter) {
  Refinement r;
  r.tau_star = scan.argmax.tau;
  r.eta_star = scan.argmax.eta;
  if (scan.flat) {
    r.flat = true;
    r.warning = "flat landscape: eta is constant over the raster, no refinement";
    return r;
  }
  if (scan.argmax.tau.imag() >= scan.im_max - 0.5 * scan.cell_im) {
    r.warning = "maximum on the raster boundary (Im tau cap), no refinement";
    return r;
  }

  auto f = [&](const Eigen::Vector2d& x) {
    const cplx t(x[0], x[1]);
    if (!(t.imag() > 0.1)) return -std::numeric_limits<double>::infinity();
    return shape_at(p, reduce_to_fundamental(t).first, scan.N, scan.truncation).eta;
  };
  std::array<Eigen::Vector2d, 3> v{Eigen::Vector2d(r.tau_star.real(), r.tau_star.imag()),
                                   Eigen::Vector2d(r.tau_star.real() + scan.cell_re, r.tau_star.imag()),
                                   Eigen::Vector2d(r.tau_star.real(), r.tau_star.imag() + scan.cell_im)};
  std::array<double, 3> fv{f(v[0]), f(v[1]), f(v[2])};
  auto diameter = [&] {
    return std::max({(v[0] - v[1]).norm(), (v[0] - v[2]).norm(), (v[1] - v[2]).norm()});
  };
  int it = 0;
  for (; it < max_iter && diameter() >= tol; ++it) {
    std::array<int, 3> ord{0, 1, 2};
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fv[a] > fv[b]; });
    const int best = ord[0], mid = ord[1], worst = ord[2];
    const Eigen::Vector2d c = 0.5 * (v[best] + v[mid]);
    const Eigen::Vector2d xr = c + (c - v[worst]);
    const double fr = f(xr);
    if (fr > fv[best]) {
      const Eigen::Vector2d xe = c + 2.0 * (c - v[worst]);
      const double fe = f(xe);
      if (fe > fr) v[worst] = xe, fv[worst] = fe;
      else v[worst] = xr, fv[worst] = fr;
    } else if (fr > fv[mid]) {
      v[worst] = xr, fv[worst] = fr;
    } else {
      const bool outside = fr > fv[worst];
      const Eigen::Vector2d xc = outside ? Eigen::Vector2d(c + 0.5 * (xr - c)) : Eigen::Vector2d(c + 0.5 * (v[worst] - c));
      const double fc = f(xc);
      if (fc > std::max(fr, fv[worst])) {
        v[worst] = xc, fv[worst] = fc;
      } else {
        for (int k : {mid, worst}) {
          v[k] = v[best] + 0.5 * (v[k] - v[best]);
          fv[k] = f(v[k]);
        }
      }
    }
    const int b = int(std::max_element(fv.begin(), fv.end()) - fv.begin());
    r.trace.push_back(fv[b]);
    r.path.push_back(cplx(v[b][0], v[b][1]));
  }
  const int b = int(std::max_element(fv.begin(), fv.end()) - fv.begin());
  r.iterations = it;
  r.refined = true;
  r.tau_star = reduce_to_fundamental(cplx(v[b][0], v[b][1])).first;
  r.eta_star = fv[b];
  const double fine = shape_at(p, r.tau_star, 2 * scan.N, scan.truncation).eta;
  r.resolution_check = std::abs(r.eta_star - fine) / std::abs(fine);
  return r;
}

}  // namespace ewlat
