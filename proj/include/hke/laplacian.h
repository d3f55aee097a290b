#pragma once

#include "hke/frames.h"
#include "hke/manifold.h"
#include "hke/types.h"

namespace hke {

// Block-sparse graph connection Laplacian: diagonal blocks (sum_q w_pq) I_n,
// off-diagonal blocks -w_pq O_pq with Gaussian edge weights and Procrustes
// transports. `scale` is the continuum calibration constant multiplying the
// eigenvalues; raw assembly keeps scale = 1.
struct ConnectionLaplacian {
  SpMat matrix;     // (N n) x (N n), symmetric PSD
  Vec mass;         // per-vertex measure weights (length N)
  int n = 0;
  double bandwidth = 0.0;
  double scale = 1.0;

  int num_vertices() const { return static_cast<int>(mass.size()); }
};

struct ScalarLaplacian {
  SpMat matrix;     // N x N, symmetric PSD, zero row sums against the kernel
  Vec mass;
  double bandwidth = 0.0;
  double scale = 1.0;

  int num_vertices() const { return static_cast<int>(mass.size()); }
};

double default_bandwidth(const SampledManifold& M); // (mean edge length)^2

ConnectionLaplacian build_connection_laplacian(const SampledManifold& M,
                                               const FrameField& frames,
                                               double bandwidth);

ScalarLaplacian build_scalar_laplacian(const SampledManifold& M, double bandwidth);

// Smallest nonzero Laplace-Beltrami eigenvalue and its multiplicity where the
// generator knows them in closed form.
bool known_first_eigenvalue(const SampledManifold& M, double& lambda, int& multiplicity);

// Calibration constant fitted so the smallest nonzero scalar eigenvalue (mean
// of its known multiplet) matches lambda_ref. Applied identically to both
// operators by the caller.
double fit_calibration(const ScalarLaplacian& L, double lambda_ref, int multiplicity,
                       unsigned seed = 1234);

} // namespace hke
