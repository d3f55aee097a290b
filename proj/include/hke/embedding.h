#pragma once

#include "hke/heat_kernel.h"
#include "hke/net_partition.h"

namespace hke {

// Normalization constant V_e: the L^2 norm of d/dx1 of the squared HS norm of
// the Euclidean heat kernel at time 1/2.
double ve_closed_form(int n); // n (2 pi)^{-n} (pi/2)^{n/4}
double compute_Ve(int n);     // adaptive quadrature of the defining integral

struct EmbeddingConfig {
  double t = 0.0;
  int m = kFullKernel;
  double delta = 0.0;
  std::string variant = "weighted"; // or "uniform"
  double A = 0.0;                   // per-point mass, uniform variant only
};

struct EmbeddedCloud {
  Mat coords;                      // N x N0, all entries >= 0
  EmbeddingConfig config;
  double prefactor = 0.0;          // (2t)^{(3n+2)/4} / V_e
  double Ve = 0.0;
  Vec column_weights;              // sqrt of column masses
  std::vector<int> column_center;  // vertex index behind each column
  int truncation = 0;              // m actually used
};

// Theorem-1 style map: coordinate j at p is
//   prefactor * |A_j|^{1/2} * ||K^(m)(p, t; q_j)||_HS^2.
EmbeddedCloud embed_weighted(const SampledManifold& M, const Spectrum& spec,
                             const DeltaNet& net, const Partition& partition, double t,
                             int m = kFullKernel);

// Theorem-2 style map: centers replicated ceil(|A_i|/A) times, every copy
// weighted by the square root of its equal-split mass.
EmbeddedCloud embed_uniform(const SampledManifold& M, const Spectrum& spec,
                            const DeltaNet& net, const Partition& partition, double t,
                            int m, double A);

struct DilatationReport {
  Vec dil;    // per-vertex largest singular value of the fitted differential
  Vec codil;  // smallest singular value
  double min_sq = 0.0, max_sq = 0.0; // range of |dH_p|^2
  double epsilon_achieved = 0.0;     // max_p ||dH_p|^2 - 1|
};

DilatationReport estimate_dilatation(const SampledManifold& M, const FrameField& frames,
                                     const EmbeddedCloud& cloud);

struct IsometryCheck {
  bool pass = false;
  double epsilon = 0.0;
  double worst_low = 0.0, worst_high = 0.0; // extreme |dH|^2 values
  int arg_low = 0, arg_high = 0;
};

// Pass iff 1 - eps < |dH_p|^2 < 1 + eps at every vertex.
IsometryCheck verify_almost_isometry(const DilatationReport& report, double epsilon);

struct InjectivityReport {
  double min_ratio = 0.0, max_ratio = 0.0; // |H(p)-H(q)| / d(p,q)
  double separation = 0.0;
  long pairs_checked = 0;
  int argmin_p = 0, argmin_q = 0;
};

// Scans all vertex pairs at geodesic distance >= separation.
InjectivityReport verify_injectivity(const SampledManifold& M, const EmbeddedCloud& cloud,
                                     double separation);

} // namespace hke
