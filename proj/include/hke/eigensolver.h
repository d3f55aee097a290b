#pragma once

#include "hke/laplacian.h"
#include "hke/types.h"

namespace hke {

// Sentinel for "truncate where e^{-lambda t} drops below 1e-10".
inline constexpr int kFullKernel = -1;

// Low-lying generalized eigenpairs L X = lambda M X, mass-orthonormal and
// ascending. Fields are stored as frame coefficients, n rows per vertex.
struct Spectrum {
  Vec eigenvalues;   // calibrated, ascending, >= -1e-9 * lambda_max
  Mat fields;        // (N n) x m, column i is X_i
  Vec mass;          // per-vertex weights used for normalization
  Vec residuals;     // per-pair ||L x - lambda M x|| in the M^{-1} norm
  int n = 0;
  int num_vertices = 0;
  double bandwidth = 0.0;
  double calibration = 1.0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  // n-coefficient vector of field i at vertex p
  Eigen::Block<const Mat> field_at(int i, int p) const {
    return fields.block(p * n, i, n, 1);
  }
};

Spectrum eigendecompose(const ConnectionLaplacian& L, int m, unsigned seed = 1234);
Spectrum eigendecompose(const ScalarLaplacian& L, int m, unsigned seed = 1234);

// Smallest truncation m with e^{-lambda_m t} < tol, extended so degenerate
// clusters are never split. Falls back to all available modes.
int full_truncation(const Spectrum& spec, double t, double tol = 1e-10);

// Covariant change of gauge: X_i(p) -> G_p^T X_i(p). The result is the exact
// eigendecomposition of the operator assembled in the rotated frames.
Spectrum apply_gauges(const Spectrum& spec, const std::vector<Mat>& gauges);

// Solver core, exposed for tests: smallest m eigenpairs of a symmetric
// sparse matrix (standard problem). Dense below `dense_threshold`,
// shift-invert Lanczos with full reorthogonalization above it.
struct EigenOptions {
  unsigned seed = 1234;
  double residual_tol = 1e-11; // relative to a Gershgorin bound of B
  int dense_threshold = 1200;
  int max_basis = 0;           // 0: choose from m
};

void smallest_eigenpairs(const SpMat& B, int m, Vec& values, Mat& vectors,
                         Vec& residuals, const EigenOptions& opts = {});

} // namespace hke
