#include "hke/laplacian.h"

#include "hke/eigensolver.h"

#include <cmath>
#include <numbers>

namespace hke {

double default_bandwidth(const SampledManifold& M) {
  double sum = 0.0;
  long count = 0;
  for (int p = 0; p < M.num_vertices(); ++p)
    for (auto [q, len] : M.edges[p]) { sum += len; ++count; }
  if (count == 0) throw StageError("laplacian", "empty edge set");
  const double mean = sum / count;
  return mean * mean;
}

ConnectionLaplacian build_connection_laplacian(const SampledManifold& M,
                                               const FrameField& frames,
                                               double bandwidth) {
  if (bandwidth <= 0.0) throw InputError("laplacian", "bandwidth must be positive");
  const int N = M.num_vertices();
  const int n = frames.n();
  std::vector<Triplet> trip;
  Vec degree = Vec::Zero(N);
  for (int p = 0; p < N; ++p) {
    if (M.edges[p].empty())
      throw StageError("laplacian", "empty neighborhood at vertex " + std::to_string(p));
    for (auto [q, len] : M.edges[p]) {
      if (q <= p) continue;
      const double w = std::exp(-len * len / bandwidth);
      Mat O = align_frames(frames.frames[q], frames.frames[p]); // q-coeffs -> p-coeffs
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          trip.emplace_back(p * n + a, q * n + b, -w * O(a, b));
          trip.emplace_back(q * n + b, p * n + a, -w * O(a, b));
        }
      degree(p) += w;
      degree(q) += w;
    }
  }
  for (int p = 0; p < N; ++p)
    for (int a = 0; a < n; ++a) trip.emplace_back(p * n + a, p * n + a, degree(p));

  ConnectionLaplacian L;
  L.matrix.resize(N * n, N * n);
  L.matrix.setFromTriplets(trip.begin(), trip.end());
  L.mass = M.weights;
  L.n = n;
  L.bandwidth = bandwidth;
  return L;
}

ScalarLaplacian build_scalar_laplacian(const SampledManifold& M, double bandwidth) {
  if (bandwidth <= 0.0) throw InputError("laplacian", "bandwidth must be positive");
  const int N = M.num_vertices();
  std::vector<Triplet> trip;
  Vec degree = Vec::Zero(N);
  for (int p = 0; p < N; ++p) {
    if (M.edges[p].empty())
      throw StageError("laplacian", "empty neighborhood at vertex " + std::to_string(p));
    for (auto [q, len] : M.edges[p]) {
      if (q <= p) continue;
      const double w = std::exp(-len * len / bandwidth);
      trip.emplace_back(p, q, -w);
      trip.emplace_back(q, p, -w);
      degree(p) += w;
      degree(q) += w;
    }
  }
  for (int p = 0; p < N; ++p) trip.emplace_back(p, p, degree(p));

  ScalarLaplacian L;
  L.matrix.resize(N, N);
  L.matrix.setFromTriplets(trip.begin(), trip.end());
  L.mass = M.weights;
  L.bandwidth = bandwidth;
  return L;
}

bool known_first_eigenvalue(const SampledManifold& M, double& lambda, int& multiplicity) {
  constexpr double kPi = std::numbers::pi;
  switch (M.generator) {
    case SampledManifold::Generator::circle:
      lambda = 1.0 / (M.gen_radius * M.gen_radius);
      multiplicity = 2;
      return true;
    case SampledManifold::Generator::flat_torus:
      lambda = 4.0 * kPi * kPi / (M.gen_side * M.gen_side);
      multiplicity = 4;
      return true;
    case SampledManifold::Generator::sphere:
      lambda = 2.0 / (M.gen_radius * M.gen_radius);
      multiplicity = 3;
      return true;
    default:
      return false;
  }
}

double fit_calibration(const ScalarLaplacian& L, double lambda_ref, int multiplicity,
                       unsigned seed) {
  ScalarLaplacian raw = L;
  raw.scale = 1.0;
  Spectrum spec = eigendecompose(raw, std::min(L.num_vertices(), multiplicity + 4), seed);
  // skip the constant kernel, then average the known multiplet
  const double floor = 1e-8 * std::max(spec.eigenvalues(spec.size() - 1), 1e-300);
  int first = 0;
  while (first < spec.size() && spec.eigenvalues(first) <= floor) ++first;
  if (first + multiplicity > spec.size())
    throw StageError("laplacian", "not enough eigenvalues to calibrate");
  const double raw_mean =
      spec.eigenvalues.segment(first, multiplicity).mean();
  if (raw_mean <= 0.0) throw StageError("laplacian", "degenerate raw spectrum");
  return lambda_ref / raw_mean;
}

} // namespace hke
