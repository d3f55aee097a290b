#pragma once

#include "hke/eigensolver.h"
#include "hke/frames.h"
#include "hke/manifold.h"

#include <vector>

namespace hke {

// n x n heat-kernel block sum_{i<=m} e^{-lambda_i t} X_i(p) X_i(q)^T in the
// local frames at p (rows) and q (columns). m = kFullKernel applies the
// e^{-lambda t} < 1e-10 truncation rule.
Mat truncated_kernel(const Spectrum& spec, int p, double t, int q, int m = kFullKernel);

// Squared Hilbert-Schmidt norm of the block, trace(K^T K).
double hs_norm_sq(const Spectrum& spec, int p, double t, int q, int m = kFullKernel);

// Same quantity through the spectral double sum over (i, j); O(m^2) reference
// path used to cross-check the matrix route.
double hs_norm_sq_double_sum(const Spectrum& spec, int p, double t, int q, int m);

// ||K(., t; q)||_HS^2 at every vertex for one fixed column q.
Vec hs_norm_field(const Spectrum& spec, double t, int q, int m = kFullKernel);

// Per-vertex gradient (in the local frame) of the HS-norm-squared field of
// column q: weighted least squares of field differences against tangent
// displacements over graph neighbors.
Mat kernel_gradient_hs(const SampledManifold& M, const FrameField& frames,
                       const Spectrum& spec, double t, int q, int m = kFullKernel);

// Gradient of an arbitrary per-vertex scalar field, same estimator.
Mat field_gradient(const SampledManifold& M, const FrameField& frames, const Vec& field);

struct PairDiagnostic {
  int p = 0, q = 0;
  double dist = 0.0;
  double hs = 0.0;       // ||K_TM(p,t;q)||_HS
  double n_km = 0.0;     // n K_M(p,t;q)
  double ratio = 0.0;    // hs / n_km
  bool violation = false;
};

struct GaussianBoundReport {
  std::vector<PairDiagnostic> pairs;
  double t = 0.0;
  double fit_slope = 0.0;     // slope of log hs against d^2
  double expected_slope = 0.0; // -1/(4t)
  double fit_dmin = 0.0, fit_dmax = 0.0;
  int fit_points = 0;
  double tolerance = 0.0;
  bool pass = false;
};

// Checks ||K_TM||_HS <= n K_M pairwise and fits the Gaussian decay exponent.
// Pairs where n K_M falls below `floor_rel` times its diagonal maximum carry
// no reliable ratio and are exempt from the violation flag.
GaussianBoundReport gaussian_bound_check(const SampledManifold& M, const Spectrum& conn,
                                         const Spectrum& scalar, double t,
                                         const std::vector<std::pair<int, int>>& pairs,
                                         double tolerance = 0.05,
                                         double floor_rel = 1e-3);

struct TraceDominationReport {
  double t = 0.0;
  double trace_conn = 0.0;
  double trace_scalar = 0.0;
  double ratio = 0.0;          // trace_conn / (n * trace_scalar)
  double tail_estimate = 0.0;  // e^{-lambda_max t} of the truncated sums
  int modes_conn = 0, modes_scalar = 0;
  double tolerance = 0.0;
  bool pass = false;
};

// Discrete analogue of Tr e^{t Delta_TM} <= n Tr e^{t Delta_M}, compared on
// equal-count truncations of the two spectra.
TraceDominationReport trace_domination_check(const Spectrum& conn, const Spectrum& scalar,
                                             double t, double tolerance = 0.02);

// (2t)^{(3n+2)/2} * sum over vertices outside B_radius(p) of
// mu_q |grad_q ||K(p,t;q)||_HS^2|^2, maximized over the sampled p.
double tail_energy(const SampledManifold& M, const FrameField& frames, const Spectrum& spec,
                   const std::vector<int>& p_samples, double t, double radius,
                   int m = kFullKernel);

struct TruncationErrorReport {
  double sup_diff = 0.0;   // sup over sampled pairs of |HS^2_m - HS^2_{m'}|
  double tail_bound = 0.0; // spectral cross-term bound, >= sup_diff
};

TruncationErrorReport truncation_error(const Spectrum& spec, double t, int m, int m_prime,
                                       const std::vector<std::pair<int, int>>& pairs);

} // namespace hke
