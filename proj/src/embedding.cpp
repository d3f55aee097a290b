#include "hke/embedding.h"

#include "hke/chart.h"
#include "hke/quadrature.h"

#include <cmath>
#include <numbers>

namespace hke {

namespace {

constexpr double kPi = std::numbers::pi;

EmbeddedCloud assemble_cloud(const SampledManifold& M, const Spectrum& spec,
                             const DeltaNet& net, double t, int m,
                             const std::vector<int>& column_center_pos, const Vec& masses,
                             const EmbeddingConfig& config) {
  const int n = spec.n;
  const int N = spec.num_vertices;
  const int cols = static_cast<int>(column_center_pos.size());
  const int mt = (m == kFullKernel) ? full_truncation(spec, t) : m;
  if (mt < 1 || mt > spec.size())
    throw InputError("embedding", "missing spectrum columns for requested truncation");

  EmbeddedCloud cloud;
  cloud.config = config;
  cloud.Ve = ve_closed_form(n);
  cloud.prefactor = std::pow(2.0 * t, (3.0 * n + 2.0) / 4.0) / cloud.Ve;
  cloud.truncation = mt;
  cloud.column_weights = masses.cwiseSqrt();
  cloud.coords.resize(N, cols);
  cloud.column_center.resize(cols);

  Vec field;
  int last_center = -1;
  for (int j = 0; j < cols; ++j) {
    const int center_vertex = net.centers[column_center_pos[j]];
    cloud.column_center[j] = center_vertex;
    if (center_vertex != last_center) {
      field = hs_norm_field(spec, t, center_vertex, mt);
      last_center = center_vertex;
    }
    cloud.coords.col(j) = cloud.prefactor * cloud.column_weights(j) * field;
  }
  return cloud;
}

} // namespace

double ve_closed_form(int n) {
  return n * std::pow(2.0 * kPi, -n) * std::pow(kPi / 2.0, n / 4.0);
}

double compute_Ve(int n) {
  if (n < 1) throw InputError("embedding", "dimension must be >= 1");
  if (n > 3) throw InputError("embedding", "quadrature supported for n <= 3");
  const double s = 0.5;
  const double h = 1e-5; // FD step for the x1-derivative of the HS-norm field
  Vec zero = Vec::Zero(n);
  auto hs_sq = [&](const double* y) {
    Eigen::Map<const Vec> yv(y, n);
    return euclidean_kernel(zero, s, yv, n).squaredNorm();
  };
  auto integrand = [&](const double* y) {
    double yp[3], ym[3];
    for (int i = 0; i < n; ++i) { yp[i] = y[i]; ym[i] = y[i]; }
    yp[0] += h;
    ym[0] -= h;
    const double d = (hs_sq(yp) - hs_sq(ym)) / (2.0 * h);
    return d * d;
  };
  // scale-aware absolute tolerance: integrals shrink fast with n
  const double tol = 1e-10 * std::pow(0.05, n - 1);
  const double integral = adaptive_cube(integrand, n, 7.0, tol);
  return std::sqrt(integral);
}

EmbeddedCloud embed_weighted(const SampledManifold& M, const Spectrum& spec,
                             const DeltaNet& net, const Partition& partition, double t,
                             int m) {
  if (t <= 0.0) throw InputError("embedding", "time t must be positive");
  const int N0 = static_cast<int>(net.centers.size());
  std::vector<int> pos(N0);
  for (int i = 0; i < N0; ++i) pos[i] = i;
  EmbeddingConfig cfg;
  cfg.t = t;
  cfg.m = m;
  cfg.delta = net.delta;
  cfg.variant = "weighted";
  return assemble_cloud(M, spec, net, t, m, pos, partition.masses, cfg);
}

EmbeddedCloud embed_uniform(const SampledManifold& M, const Spectrum& spec,
                            const DeltaNet& net, const Partition& partition, double t,
                            int m, double A) {
  if (t <= 0.0) throw InputError("embedding", "time t must be positive");
  if (A <= 0.0) throw InputError("embedding", "per-point mass A must be positive");
  ReplicatedCenters rep = replicate_centers(partition, A);
  EmbeddingConfig cfg;
  cfg.t = t;
  cfg.m = m;
  cfg.delta = net.delta;
  cfg.variant = "uniform";
  cfg.A = A;
  return assemble_cloud(M, spec, net, t, m, rep.center_of_copy, rep.copy_mass, cfg);
}

DilatationReport estimate_dilatation(const SampledManifold& M, const FrameField& frames,
                                     const EmbeddedCloud& cloud) {
  const int N = M.num_vertices();
  const int n = frames.n();
  const double bw = default_bandwidth(M);
  DilatationReport rep;
  rep.dil.resize(N);
  rep.codil.resize(N);
  for (int p = 0; p < N; ++p) {
    Mat AtA = Mat::Zero(n, n);
    Mat AtB = Mat::Zero(n, cloud.coords.cols());
    for (auto [q, len] : M.edges[p]) {
      Vec d = frames.frames[p].transpose() *
              (M.vertices.row(q) - M.vertices.row(p)).transpose();
      const double w = std::exp(-len * len / bw);
      AtA.noalias() += w * d * d.transpose();
      AtB.noalias() += w * d * (cloud.coords.row(q) - cloud.coords.row(p));
    }
    Eigen::SelfAdjointEigenSolver<Mat> chk(AtA);
    if (chk.eigenvalues()(0) <= 1e-12 * std::max(chk.eigenvalues()(n - 1), 1e-300))
      throw StageError("embedding",
                       "rank-deficient neighborhood at vertex " + std::to_string(p));
    Mat D = AtA.ldlt().solve(AtB); // n x N0, rows: differential in tangent coords
    Eigen::SelfAdjointEigenSolver<Mat> es(D * D.transpose());
    rep.dil(p) = std::sqrt(std::max(0.0, es.eigenvalues()(n - 1)));
    rep.codil(p) = std::sqrt(std::max(0.0, es.eigenvalues()(0)));
  }
  const Vec sq = rep.dil.cwiseProduct(rep.dil);
  rep.min_sq = sq.minCoeff();
  rep.max_sq = sq.maxCoeff();
  rep.epsilon_achieved = std::max(std::abs(rep.min_sq - 1.0), std::abs(rep.max_sq - 1.0));
  return rep;
}

IsometryCheck verify_almost_isometry(const DilatationReport& report, double epsilon) {
  IsometryCheck chk;
  chk.epsilon = epsilon;
  chk.worst_low = std::numeric_limits<double>::infinity();
  chk.worst_high = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < report.dil.size(); ++p) {
    const double sq = report.dil(p) * report.dil(p);
    if (sq < chk.worst_low) { chk.worst_low = sq; chk.arg_low = p; }
    if (sq > chk.worst_high) { chk.worst_high = sq; chk.arg_high = p; }
  }
  chk.pass = (chk.worst_low > 1.0 - epsilon) && (chk.worst_high < 1.0 + epsilon);
  return chk;
}

InjectivityReport verify_injectivity(const SampledManifold& M, const EmbeddedCloud& cloud,
                                     double separation) {
  if (separation <= 0.0) throw InputError("embedding", "separation must be positive");
  const int N = M.num_vertices();
  InjectivityReport rep;
  rep.separation = separation;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;

  const Vec sqnorm = cloud.coords.rowwise().squaredNorm();
  const int block = 512;
  const bool exact = M.generator != SampledManifold::Generator::none;
  for (int q0 = 0; q0 < N; q0 += block) {
    const int bs = std::min(block, N - q0);
    Mat G = cloud.coords * cloud.coords.middleRows(q0, bs).transpose(); // N x bs
    for (int j = 0; j < bs; ++j) {
      const int q = q0 + j;
      const Vec dist_col = exact ? Vec() : graph_distance(M, q);
      for (int p = 0; p < q; ++p) {
        const double d = exact ? exact_pair_distance(M, p, q) : dist_col(p);
        if (d < separation) continue;
        const double img2 = std::max(0.0, sqnorm(p) + sqnorm(q) - 2.0 * G(p, j));
        const double ratio = std::sqrt(img2) / d;
        ++rep.pairs_checked;
        if (ratio < rep.min_ratio) {
          rep.min_ratio = ratio;
          rep.argmin_p = p;
          rep.argmin_q = q;
        }
        rep.max_ratio = std::max(rep.max_ratio, ratio);
      }
    }
  }
  if (rep.pairs_checked == 0) rep.min_ratio = 0.0;
  return rep;
}

} // namespace hke
