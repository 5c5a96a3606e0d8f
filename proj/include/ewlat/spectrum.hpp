#pragma once

#include <string>
#include <vector>

#include "ewlat/fields.hpp"
#include "ewlat/params.hpp"

namespace ewlat {

struct Cluster {
  double value = 0.0;
  int multiplicity = 0;
};

struct SpectralReport {
  std::string op;
  int N = 0;
  int n = 0;
  std::vector<double> eigenvalues;
  /// Richardson limit (4 lambda(2N) - lambda(N))/3; empty unless requested.
  std::vector<double> extrapolated;
  std::vector<double> residuals;
  double cluster_tol = 0.0;
  std::vector<Cluster> clusters;
  std::string solver;
  int iterations = 0;
};

/// Groups sorted values whose consecutive gaps are below tol.
std::vector<Cluster> cluster_values(const std::vector<double>& sorted, double tol);

struct EigenResult {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
  Eigen::VectorXd residuals;
  int iterations = 0;
  std::string solver;
};

/// Lowest K eigenpairs of a Hermitian sparse matrix. Dense solve when the
/// dimension is at most dense_limit; otherwise shift-invert block subspace
/// iteration with Rayleigh-Ritz. shift must lie strictly below the spectrum.
/// Throws std::runtime_error with residual norms on non-convergence.
EigenResult lowest_eigenpairs(const SpMat& A, int K, double shift, int dense_limit = 1200,
                              double tol = 1e-9, int max_iter = 2000);

/// H1(mu) = curl* curl + mu - n iJ on flux-n 2-vectors, assembled as
/// -Delta (compact) + grad div - 2n iJ + mu. Unknowns ordered (w1 nodes, w2 nodes).
SpMat h1_matrix(const LinkDifference& ld, double mu);

/// Options common to the spectral drivers.
struct SpectrumOptions {
  bool extrapolate = false;
  /// Negative selects the automatic tolerance (10x the Richardson error
  /// estimate, or 2% of the spectral scale without extrapolation).
  double cluster_tol = -1.0;
  int dense_limit = 1200;
};

SpectralReport magnetic_laplacian_spectrum(const LatticeShape& shape, int n, int N, int K,
                                           const SpectrumOptions& opt = {});
SpectralReport h1_spectrum(const LatticeShape& shape, int n, double mu, int N, int K,
                           const SpectrumOptions& opt = {});

enum class Verdict { stable, critical, unstable };
const char* to_string(Verdict v);

struct StabilityResult {
  Verdict verdict;
  double mu;
  /// Lowest H1 eigenvalue mu - n = (b_star/b - 1) n.
  double eigenvalue;
};

/// Precondition: b > 0.
StabilityResult stability_verdict(const PhysParams& p, double b);

struct H234Report {
  SpectralReport h2, h3, h4;
  /// max |curl* curl c| over the constant fields (1,0) and (0,1).
  double h2_null_residual = 0.0;
};

/// Spectra of the periodic blocks from their Fourier symbols at field b:
/// H2 = curl* curl on div-free fields, H3 = -Delta + mu/cos^2, H4 = -Delta + 4 lambda mu/g^2.
H234Report h234_checks(const PhysParams& p, const LatticeShape& shape, double b, int N, int K = 10);

}  // namespace ewlat
