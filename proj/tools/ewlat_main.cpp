#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ewlat/bifurcation.hpp"
#include "ewlat/io.hpp"
#include "ewlat/shapeopt.hpp"
#include "ewlat/spectrum.hpp"
#include "ewlat/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ewlat;

namespace {

struct Common {
  std::string config;
  std::string out;
  int grid_n = 0;
  std::vector<double> omegas;
  std::string tau;
};

cplx parse_tau(const std::string& s) {
  std::string t = s;
  for (char& ch : t)
    if (ch == ',') ch = ' ';
  std::istringstream is(t);
  double re = 0, im = 0;
  if (!(is >> re >> im) || !(is >> std::ws).eof()) throw ValidationError("--tau expects 're,im' (e.g. 0.5,0.866)");
  return {re, im};
}

RunConfig resolve(const Common& o) {
  RunConfig c;
  if (!o.config.empty()) {
    if (!fs::exists(o.config)) throw ValidationError("config file not found: " + o.config);
    c = load_config(o.config);
  }
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.grid_n) c.grid_n = o.grid_n;
  if (!o.omegas.empty()) c.omegas = o.omegas;
  if (!o.tau.empty()) c.tau = parse_tau(o.tau);
  // Re-validate after overrides.
  c = parse_config(to_json(c));
  fs::create_directories(c.out_dir);
  return c;
}

json tol_json(const RunConfig& c, json extra) {
  for (const auto& [k, v] : c.tolerances) extra[k] = v;
  return extra;
}

json spectral_json(const SpectralReport& r) {
  json cl = json::array();
  for (const auto& c : r.clusters) cl.push_back({{"value", c.value}, {"multiplicity", c.multiplicity}});
  return {{"op", r.op},           {"N", r.N},
          {"n", r.n},             {"eigenvalues", r.eigenvalues},
          {"extrapolated", r.extrapolated}, {"residuals", r.residuals},
          {"cluster_tol", r.cluster_tol},   {"clusters", cl},
          {"solver", r.solver},   {"iterations", r.iterations}};
}

int cmd_spectrum(const RunConfig& c) {
  const PhysParams p = c.params();
  const LatticeShape shape(reduce_to_fundamental(c.tau).first);
  SpectrumOptions opt;
  opt.extrapolate = c.extrapolate;
  SpectralReport r;
  json extra = json::object();
  if (c.spectrum_op == "h1") {
    const double b = c.b_ratio * p.b_star;
    const double mu = p.mu_of_b(b);
    r = h1_spectrum(shape, p.n, mu, c.grid_n, c.spectrum_count, opt);
    const StabilityResult sv = stability_verdict(p, b);
    extra = {{"b", b}, {"mu", mu}, {"verdict", to_string(sv.verdict)}, {"analytic_lowest", sv.eigenvalue}};
  } else {
    r = magnetic_laplacian_spectrum(shape, p.n, c.grid_n, c.spectrum_count, opt);
  }
  json j = spectral_json(r);
  j["tau"] = {shape.tau().real(), shape.tau().imag()};
  j.update(extra);
  const fs::path jf = fs::path(c.out_dir) / "spectrum.json", cf = fs::path(c.out_dir) / "spectrum.csv";
  write_json(jf, j);
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < r.eigenvalues.size(); ++i)
    rows.push_back({double(i), r.eigenvalues[i], r.residuals[i], r.extrapolated.empty() ? NAN : r.extrapolated[i]});
  write_csv_table(cf, {"index", "eigenvalue", "residual", "extrapolated"}, rows);
  const json tol = tol_json(c, {{"eigensolver_tol", 1e-9}, {"cluster_tol", r.cluster_tol}});
  write_manifest(jf, c, tol, "spectrum");
  write_manifest(cf, c, tol, "spectrum");
  std::cout << r.op << " lowest eigenvalues (N=" << r.N << "):";
  for (double v : r.eigenvalues) std::cout << ' ' << fmt17(v);
  std::cout << '\n';
  return 0;
}

int cmd_eta_map(const RunConfig& c) {
  const PhysParams p = c.params();
  const ShapeScan sc = scan_eta(p, c.scan_resolution, c.grid_n, c.scan_im_max, c.resolved_workers(), c.theta_truncation);
  const Refinement r = refine_max(sc, p, c.refine_tol);
  if (!r.warning.empty()) std::cerr << "warning: " << r.warning << '\n';

  std::vector<std::vector<double>> rows;
  for (const auto& s : sc.samples) rows.push_back({s.tau.real(), s.tau.imag(), s.eta, s.alpha, s.beta});
  const fs::path cf = fs::path(c.out_dir) / "eta_map.csv";
  write_csv_table(cf, {"re_tau", "im_tau", "eta", "alpha", "beta"}, rows);

  // gnuplot pm3d layout: one block per Re tau, blank line between blocks.
  const fs::path df = fs::path(c.out_dir) / "eta_map.dat";
  {
    std::ofstream out(df);
    out << "# re_tau im_tau eta\n";
    double last = NAN;
    for (const auto& s : sc.samples) {
      if (!std::isnan(last) && s.tau.real() != last) out << '\n';
      last = s.tau.real();
      out << fmt17(s.tau.real()) << ' ' << fmt17(s.tau.imag()) << ' ' << fmt17(s.eta) << '\n';
    }
  }
  json trace = json::array();
  for (size_t i = 0; i < r.trace.size(); ++i)
    trace.push_back({{"eta", r.trace[i]}, {"tau", {r.path[i].real(), r.path[i].imag()}}});
  const json summary = {{"tau_star", {r.tau_star.real(), r.tau_star.imag()}},
                        {"eta_star", r.eta_star},
                        {"refined", r.refined},
                        {"flat", r.flat},
                        {"warning", r.warning},
                        {"iterations", r.iterations},
                        {"resolution_check", r.resolution_check},
                        {"raster_argmax", {sc.argmax.tau.real(), sc.argmax.tau.imag()}},
                        {"beta_argmin", {sc.beta_argmin.tau.real(), sc.beta_argmin.tau.imag()}},
                        {"samples", sc.samples.size()},
                        {"trace", trace}};
  const fs::path jf = fs::path(c.out_dir) / "tau_star.json";
  write_json(jf, summary);
  const json tol = tol_json(c, {{"refine_tol", c.refine_tol}});
  for (const auto& f : {cf, df, jf}) write_manifest(f, c, tol, "eta-map");
  std::cout << "tau_star = " << fmt17(r.tau_star.real()) << " + " << fmt17(r.tau_star.imag())
            << "i, eta = " << fmt17(r.eta_star) << '\n';
  return 0;
}

int cmd_branch(const RunConfig& c) {
  const PhysParams p = c.params();
  const LatticeShape shape(reduce_to_fundamental(c.tau).first);
  const LLLState chi = build_chi(shape, p.n, share(Grid(shape, c.grid_n)), {}, c.theta_truncation);
  const double eta = alpha_eta(chi, p).eta;
  NewtonOptions opt;
  opt.K = c.branch_levels;
  opt.N = c.branch_grid_n;
  opt.max_iter = c.branch_max_iter;
  opt.tol = c.branch_tol;
  const json tol = tol_json(c, {{"newton_tol", c.branch_tol}, {"div_current", 1e-8}});
  std::vector<std::vector<double>> rows;
  int status = 0;
  for (size_t i = 0; i < c.omegas.size(); ++i) {
    const double w = c.omegas[i];
    const std::string tag = std::to_string(i);
    if (w < 0.0) {
      std::cerr << "omega = " << w << ": b < b_star is the stable regime; no bifurcating branch\n";
      const fs::path jf = fs::path(c.out_dir) / ("branch_" + tag + ".json");
      write_json(jf, {{"omega", w}, {"status", "stable"}, {"b", p.b_of_omega(w)}});
      write_manifest(jf, c, tol, "branch");
      continue;
    }
    BranchPoint bp;
    try {
      bp = newton_branch(w, shape, p, opt);
    } catch (const std::runtime_error& e) {
      std::cerr << "omega = " << w << ": " << e.what() << '\n';
      status = 1;
      continue;
    }
    const double s2_lead = s_squared_of_omega(w, chi, p);
    const double e_lead = energy_expansion(w, eta, p);
    const json j = {{"omega", w},
                    {"status", w == 0.0 ? "vacuum" : "converged"},
                    {"b", bp.b},
                    {"s", bp.s},
                    {"s2", bp.s * bp.s},
                    {"s2_leading", s2_lead},
                    {"mu", bp.mu},
                    {"c", {bp.c[0], bp.c[1]}},
                    {"residual_norm", bp.residual_norm},
                    {"residual_history", bp.residual_history},
                    {"iterations", bp.iterations},
                    {"energy_per_area", bp.energy_per_area},
                    {"vacuum_per_area", bp.vacuum_per_area},
                    {"energy_expansion", e_lead},
                    {"energy_excess_rescaled", bp.energy.excess},
                    {"div_current", bp.div_current},
                    {"kernel_overlap", bp.kernel_overlap},
                    {"eta", eta}};
    const fs::path jf = fs::path(c.out_dir) / ("branch_" + tag + ".json");
    write_json(jf, j);
    write_manifest(jf, c, tol, "branch");
    rows.push_back({w, bp.b, bp.s * bp.s, s2_lead, bp.energy_per_area, e_lead,
                    bp.vacuum_per_area - bp.energy_per_area, bp.vacuum_per_area - e_lead, bp.residual_norm});

    // Snapshot for vortex-lattice plots: |w|^2 and total curl a on the grid.
    const GridPtr& g = bp.state.w.grid;
    const Spectral sp(*g);
    const CVec ca = sp.curl(bp.state.alpha.v.col(0), bp.state.alpha.v.col(1));
    std::vector<std::vector<double>> snap;
    for (int k = 0; k < g->size(); ++k) {
      const Eigen::Vector2d x = g->point(k);
      const double w2 = std::norm(bp.state.w.v(k, 0)) + std::norm(bp.state.w.v(k, 1));
      snap.push_back({double(k / g->N()) / g->N(), double(k % g->N()) / g->N(), x.x(), x.y(), w2,
                      p.n / p.e + ca[k].real()});
    }
    const fs::path sf = fs::path(c.out_dir) / ("field_" + tag + ".csv");
    write_csv_table(sf, {"t1", "t2", "x", "y", "w_abs2", "curl_a"}, snap);
    write_manifest(sf, c, tol, "branch");
    std::cout << "omega = " << fmt17(w) << ": s^2 = " << fmt17(bp.s * bp.s) << ", residual = " << bp.residual_norm
              << ", E = " << fmt17(bp.energy_per_area) << " (vacuum " << fmt17(bp.vacuum_per_area) << ")\n";
  }
  const fs::path ef = fs::path(c.out_dir) / "energy_vs_omega.csv";
  write_csv_table(ef,
                  {"omega", "b", "s2", "s2_leading", "energy", "energy_expansion", "deficit", "deficit_leading",
                   "residual"},
                  rows);
  write_manifest(ef, c, tol, "branch");
  return status;
}

int cmd_verify(const RunConfig& c, bool flip) {
  Faults f;
  f.flip_gzh_sign = flip;
  const auto res = run_verify(c, f);
  json arr = json::array();
  for (const auto& r : res) {
    std::printf("%-4s %-12s %-55s %12.4e %s %.1e\n", r.passed ? "PASS" : "FAIL", r.module.c_str(), r.name.c_str(),
                r.value, r.lower_bound ? ">=" : "<=", r.tol);
    arr.push_back({{"module", r.module}, {"name", r.name}, {"value", r.value}, {"tol", r.tol},
                   {"lower_bound", r.lower_bound}, {"passed", r.passed}});
  }
  const fs::path jf = fs::path(c.out_dir) / "verify.json";
  write_json(jf, arr);
  write_manifest(jf, c, tol_json(c, {}), "verify");
  const bool ok = all_passed(res);
  std::printf("%s\n", ok ? "all checks passed" : "some checks FAILED");
  return ok ? 0 : 1;
}

int cmd_reduce_tau(const RunConfig& c, bool tau_given) {
  if (!tau_given) throw ValidationError("reduce-tau needs --tau re,im");
  const auto [t, m] = reduce_to_fundamental(c.tau);
  const json j = {{"tau", {c.tau.real(), c.tau.imag()}},
                  {"tau_reduced", {t.real(), t.imag()}},
                  {"matrix", {m[0], m[1], m[2], m[3]}}};
  std::cout << j.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electroweak vortex lattices on the torus: spectra, shape optimization, bifurcating branch"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Common o;
  bool flip = false;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", o.config, "JSON run configuration");
    s->add_option("--out", o.out, "output directory");
    s->add_option("--grid-n", o.grid_n, "grid resolution N");
    s->add_option("--tau", o.tau, "lattice shape tau as re,im");
  };
  auto* sp = app.add_subcommand("spectrum", "lowest eigenvalues of -Delta_{a^n} or H1");
  auto* em = app.add_subcommand("eta-map", "scan eta over the fundamental domain and refine its maximum");
  auto* br = app.add_subcommand("branch", "Newton solve of the bifurcating branch for each omega");
  auto* vf = app.add_subcommand("verify", "run the invariant suite; exit 0 iff all checks pass");
  auto* rt = app.add_subcommand("reduce-tau", "reduce tau to the fundamental domain");
  for (auto* s : {sp, em, br, vf, rt}) add_common(s);
  br->add_option("--omega", o.omegas, "omega values (repeatable)");
  vf->add_flag("--inject-flip-gzh-sign", flip, "deliberately flip the sign of G_{m_z,m_h}");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    const RunConfig c = resolve(o);
    if (*sp) return cmd_spectrum(c);
    if (*em) return cmd_eta_map(c);
    if (*br) return cmd_branch(c);
    if (*vf) return cmd_verify(c, flip);
    if (*rt) return cmd_reduce_tau(c, !o.tau.empty());
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
