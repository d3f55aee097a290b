#pragma once

#include "hke/eigensolver.h"
#include "hke/frames.h"
#include "hke/manifold.h"

#include <vector>

namespace hke {

// Rescaled coordinate chart around a center vertex: coordinates x with
// r x = (exp-map or projected) physical coordinates, so the chart lives on
// U/r. Kernel blocks are expressed in the chart axes through per-vertex
// gauge matrices.
struct Chart {
  int center = 0;
  double r = 0.0;       // rescaling factor (length)
  double radius = 0.0;  // physical chart radius used for vertex selection
  std::vector<int> vertices;     // manifold vertex ids inside the chart
  Mat coords;                    // |C| x n rescaled chart coordinates
  std::vector<Mat> gauge;        // frame coefficients -> chart components
  std::vector<Mat> metric;       // fitted gbar at each chart vertex (n x n)
  double distortion = 0.0;       // max |gbar - identity| entrywise

  int size() const { return static_cast<int>(vertices.size()); }
  int local_index(int vertex) const; // -1 when outside
  int nearest_vertex(const Vec& x) const; // local index of nearest chart point
};

// Chart via closed-form exponential coordinates for generated manifolds and
// tangent-plane projection rescaled to geodesic length for loaded data. The
// metric is fitted per chart vertex by least squares of squared geodesic
// distances against coordinate differences.
Chart build_chart(const SampledManifold& M, const FrameField& frames, int center,
                  double r, double radius);

struct RescaledKernelValue {
  Mat block;        // r^n K(u^{-1}(x r), s r^2; u^{-1}(y r)) in chart axes
  Vec snapped_x;    // chart coordinates actually evaluated
  Vec snapped_y;
  double snap_dist = 0.0; // max of the two snapping distances
  double tail = 0.0;      // e^{-lambda_max t} of the truncation used
};

RescaledKernelValue rescaled_kernel(const Spectrum& spec, const Chart& chart, const Vec& x,
                                    double s, const Vec& y, int m = kFullKernel);

// (4 pi s)^{-n/2} e^{-|x-y|^2 / 4s} I_n
Mat euclidean_kernel(const Vec& x, double s, const Vec& y, int n);

// Frozen-coefficient kernel with constant metric gbar:
// sqrt(det gbar) (4 pi s)^{-n/2} e^{-gbar(x-y, x-y)/4s} I_n
Mat z_kernel(const Vec& x, double s, const Vec& y, const Mat& gbar);

// gbar taken from the chart vertex nearest to y.
Mat z_kernel_at(const Spectrum& spec, const Chart& chart, const Vec& x, double s,
                const Vec& y);

struct KernelComparison {
  double r = 0.0;
  int chart_center = 0;
  double distortion = 0.0;
  double sup_euclid = 0.0;      // max |Gamma_E| over the sample set
  double sup_diff_euclid = 0.0; // sup |Kbar - Gamma_E| entrywise
  double sup_diff_Z = 0.0;      // sup |Kbar - Z| entrywise
  double grad_sup_diff = 0.0;   // finite-difference gradient discrepancy
  double decay_fit_C = 0.0;     // fitted constant of |K| <= C s^{-n/2} e^{-|x-y|^2/8s}
  double max_snap_dist = 0.0;
  int samples = 0;
};

// Sup differences over the sample set, skipping (x, s) inside the parabolic
// cylinder P_{1/2,1/4}(y). All kernels are evaluated at the snapped chart
// coordinates so the comparison is free of snapping bias.
KernelComparison compare_kernels(const Spectrum& spec, const Chart& chart,
                                 const std::vector<Vec>& xs,
                                 const std::vector<double>& s_values,
                                 const std::vector<Vec>& ys,
                                 double grad_step = 0.25);

} // namespace hke
