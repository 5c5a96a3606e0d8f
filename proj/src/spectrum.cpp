#include "ewlat/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseCholesky>

namespace ewlat {

std::vector<Cluster> cluster_values(const std::vector<double>& v, double tol) {
  std::vector<Cluster> out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (!out.empty() && v[i] - v[i - 1] < tol) {
      Cluster& c = out.back();
      c.value = (c.value * c.multiplicity + v[i]) / (c.multiplicity + 1);
      ++c.multiplicity;
    } else {
      out.push_back({v[i], 1});
    }
  }
  return out;
}

namespace {

Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& Y) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Y);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(Y.rows(), Y.cols());
}

}  // namespace

EigenResult lowest_eigenpairs(const SpMat& A, int K, double shift, int dense_limit, double tol,
                              int max_iter) {
  const int dim = int(A.rows());
  if (K < 1 || K > dim / 4) throw ValidationError("requested eigenvalue count must be in [1, dim/4]");
  EigenResult res;
  if (dim <= dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(A)};
    if (es.info() != Eigen::Success) throw std::runtime_error("dense Hermitian eigensolver failed");
    res.values = es.eigenvalues().head(K);
    res.vectors = es.eigenvectors().leftCols(K);
    res.solver = "dense";
  } else {
    SpMat B = A;
    for (int i = 0; i < dim; ++i) B.coeffRef(i, i) -= shift;
    Eigen::SimplicialLLT<SpMat> llt(B);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("shift-invert factorization failed (shift not below the spectrum?)");
    const int p = K + 5;
    std::mt19937_64 rng(20240917);
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd X(dim, p);
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < dim; ++i) X(i, j) = cplx(nd(rng), nd(rng));
    X = orthonormalize(X);
    Eigen::VectorXd theta, r(K);
    int it = 0;
    for (; it < max_iter; ++it) {
      Eigen::MatrixXcd Q = orthonormalize(llt.solve(X));
      Eigen::MatrixXcd AQ = A * Q;
      Eigen::MatrixXcd H = Q.adjoint() * AQ;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (H + H.adjoint()));
      theta = es.eigenvalues();
      X = Q * es.eigenvectors();
      Eigen::MatrixXcd AX = AQ * es.eigenvectors();
      bool ok = true;
      for (int i = 0; i < K; ++i) {
        r[i] = (AX.col(i) - theta[i] * X.col(i)).norm();
        if (r[i] > tol * std::max(1.0, std::abs(theta[i]))) ok = false;
      }
      if (ok) break;
    }
    if (it == max_iter) {
      std::ostringstream os;
      os << "subspace iteration did not converge; residuals:";
      for (int i = 0; i < K; ++i) os << ' ' << r[i];
      throw std::runtime_error(os.str());
    }
    res.values = theta.head(K);
    res.vectors = X.leftCols(K);
    res.iterations = it + 1;
    res.solver = "shift-invert subspace iteration";
  }
  res.residuals.resize(K);
  for (int i = 0; i < K; ++i)
    res.residuals[i] = (A * res.vectors.col(i) - res.values[i] * res.vectors.col(i)).norm();
  return res;
}

SpMat h1_matrix(const LinkDifference& ld, double mu) {
  const int P = ld.grid().size();
  const double n = ld.flux();
  const SpMat& G0 = ld.grad_matrix(0);
  const SpMat& G1 = ld.grad_matrix(1);
  const SpMat& L = ld.neg_laplacian();
  const SpMat blocks[2][2] = {{L + SpMat(G0 * G0), SpMat(G0 * G1)},
                              {SpMat(G1 * G0), L + SpMat(G1 * G1)}};
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < blocks[a][b].outerSize(); ++k)
        for (SpMat::InnerIterator it(blocks[a][b], k); it; ++it)
          trip.emplace_back(a * P + int(it.row()), b * P + int(it.col()), it.value());
  for (int i = 0; i < P; ++i) {
    trip.emplace_back(i, i, mu);
    trip.emplace_back(P + i, P + i, mu);
    // -2n iJ with iJ = [[0, -i], [i, 0]]
    trip.emplace_back(i, P + i, cplx(0.0, 2.0 * n));
    trip.emplace_back(P + i, i, cplx(0.0, -2.0 * n));
  }
  SpMat H(2 * P, 2 * P);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

namespace {

template <class Build>
SpectralReport run_spectrum(const std::string& op, const LatticeShape& shape, int n, int N, int K,
                            double shift, const SpectrumOptions& opt, Build build) {
  SpectralReport rep;
  rep.op = op;
  rep.N = N;
  rep.n = n;
  auto solve = [&](int NN) {
    const Grid g(shape, NN);
    LinkDifference ld(g, n);
    return lowest_eigenpairs(build(ld), K, shift, opt.dense_limit);
  };
  EigenResult r = solve(N);
  rep.eigenvalues.assign(r.values.data(), r.values.data() + K);
  rep.residuals.assign(r.residuals.data(), r.residuals.data() + K);
  rep.solver = r.solver;
  rep.iterations = r.iterations;
  double err = 0.0;
  if (opt.extrapolate) {
    EigenResult r2 = solve(2 * N);
    for (int i = 0; i < K; ++i) {
      const double x = (4.0 * r2.values[i] - r.values[i]) / 3.0;
      rep.extrapolated.push_back(x);
      err = std::max(err, std::abs(r2.values[i] - x));
    }
  }
  if (opt.cluster_tol > 0.0) {
    rep.cluster_tol = opt.cluster_tol;
  } else if (opt.extrapolate) {
    rep.cluster_tol = std::max(10.0 * err, 1e-6);
  } else {
    double scale = 1.0;
    for (double v : rep.eigenvalues) scale = std::max(scale, std::abs(v));
    rep.cluster_tol = 0.02 * scale;
  }
  rep.clusters = cluster_values(opt.extrapolate ? rep.extrapolated : rep.eigenvalues, rep.cluster_tol);
  return rep;
}

}  // namespace

SpectralReport magnetic_laplacian_spectrum(const LatticeShape& shape, int n, int N, int K,
                                           const SpectrumOptions& opt) {
  if (n < 0) throw ValidationError("flux integer must be non-negative");
  if (K < 1 || 4 * K > N * N) throw ValidationError("eigenvalue count K must be in [1, N^2/4]");
  return run_spectrum("magnetic_laplacian", shape, n, N, K, -1.0, opt,
                      [](const LinkDifference& ld) { return ld.neg_laplacian(); });
}

SpectralReport h1_spectrum(const LatticeShape& shape, int n, double mu, int N, int K,
                           const SpectrumOptions& opt) {
  if (n < 1) throw ValidationError("H1 needs flux n >= 1");
  if (K < 1 || 2 * K > N * N) throw ValidationError("eigenvalue count K must be in [1, N^2/2]");
  return run_spectrum("h1", shape, n, N, K, mu - n - 0.3, opt,
                      [mu](const LinkDifference& ld) { return h1_matrix(ld, mu); });
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::critical: return "critical";
    case Verdict::unstable: return "unstable";
  }
  return "?";
}

StabilityResult stability_verdict(const PhysParams& p, double b) {
  if (!(b > 0.0)) throw ValidationError("field strength b must be positive");
  StabilityResult r;
  r.mu = p.mu_of_b(b);
  r.eigenvalue = (p.b_star / b - 1.0) * p.n;
  r.verdict = b < p.b_star ? Verdict::stable : (b == p.b_star ? Verdict::critical : Verdict::unstable);
  if (r.verdict == Verdict::critical) r.eigenvalue = 0.0;
  return r;
}

H234Report h234_checks(const PhysParams& p, const LatticeShape& shape, double b, int N, int K) {
  const double mu = p.mu_of_b(b);
  const Grid g(shape, N);
  Spectral sp(g);
  std::vector<double> k2;
  for (int i = 0; i < g.size(); ++i)
    if (sp.active(i)) k2.push_back(sp.k2(i));
  std::sort(k2.begin(), k2.end());
  if (K > int(k2.size())) throw ValidationError("too many eigenvalues requested");
  auto report = [&](const std::string& op, double shift, bool divfree) {
    SpectralReport r;
    r.op = op;
    r.N = N;
    r.n = 0;
    r.solver = "fourier symbol";
    // Div-free fields: two polarizations at k = 0, one otherwise.
    if (divfree) r.eigenvalues.push_back(shift);
    for (int i = 0; int(r.eigenvalues.size()) < K; ++i) r.eigenvalues.push_back(k2[i] + shift);
    r.residuals.assign(K, 0.0);
    r.cluster_tol = 1e-9 * std::max(1.0, std::abs(r.eigenvalues.back()));
    r.clusters = cluster_values(r.eigenvalues, r.cluster_tol);
    return r;
  };
  H234Report out;
  out.h2 = report("h2", 0.0, true);
  out.h3 = report("h3", mu / (p.cos_theta * p.cos_theta), false);
  out.h4 = report("h4", 4.0 * p.lambda * mu / (p.g * p.g), false);
  const CVec one = CVec::Ones(g.size()), zero = CVec::Zero(g.size());
  for (int c = 0; c < 2; ++c) {
    const CVec& v1 = c == 0 ? one : zero;
    const CVec& v2 = c == 0 ? zero : one;
    auto [a, bb] = sp.curl_adj(sp.curl(v1, v2));
    out.h2_null_residual = std::max({out.h2_null_residual, a.cwiseAbs().maxCoeff(), bb.cwiseAbs().maxCoeff()});
  }
  return out;
}

}  // namespace ewlat
