#pragma once

#include "hke/manifold.h"
#include "hke/types.h"

#include <vector>

namespace hke {

// Orthonormal tangent basis per vertex (D x n, columns orthonormal). All
// vector quantities downstream are coefficient vectors in these bases; any
// per-vertex orthogonal change of basis is a gauge transformation.
struct FrameField {
  std::vector<Mat> frames;

  int num_vertices() const { return static_cast<int>(frames.size()); }
  int n() const { return frames.empty() ? 0 : static_cast<int>(frames.front().cols()); }
};

// Local-PCA tangent estimation over the k nearest ambient neighbors.
// Deterministic: principal directions sorted by descending variance, sign
// fixed by making the largest-magnitude entry positive.
FrameField estimate_frames(const SampledManifold& M, int k);

// Orthogonal matrix closest in HS distance to the projection frame_b^T
// frame_a, i.e. the Procrustes transport taking coefficients in frame_a to
// coefficients in frame_b. Determinant is not constrained.
Mat align_frames(const Mat& frame_a, const Mat& frame_b);

// Deterministic random orthogonal matrices (reflections included), for gauge
// invariance checks.
std::vector<Mat> random_gauges(int num_vertices, int n, unsigned seed);

FrameField apply_gauges(const FrameField& frames, const std::vector<Mat>& gauges);

} // namespace hke
