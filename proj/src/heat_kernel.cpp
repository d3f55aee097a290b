#include "hke/heat_kernel.h"

#include <Eigen/Cholesky>

#include <cmath>

namespace hke {

namespace {

int resolve_m(const Spectrum& spec, double t, int m) {
  if (m == kFullKernel) return full_truncation(spec, t);
  if (m < 0 || m > spec.size())
    throw InputError("heat_kernel", "truncation m exceeds computed spectrum");
  return m;
}

Vec exp_weights(const Spectrum& spec, double t, int m) {
  Vec e(m);
  for (int i = 0; i < m; ++i) e(i) = std::exp(-spec.eigenvalues(i) * t);
  return e;
}

} // namespace

Mat truncated_kernel(const Spectrum& spec, int p, double t, int q, int m) {
  if (t <= 0.0) throw InputError("heat_kernel", "time t must be positive");
  m = resolve_m(spec, t, m);
  const int n = spec.n;
  const Vec e = exp_weights(spec, t, m);
  Mat Fp = spec.fields.block(p * n, 0, n, m);
  Mat Fq = spec.fields.block(q * n, 0, n, m);
  return Fp * e.asDiagonal() * Fq.transpose();
}

double hs_norm_sq(const Spectrum& spec, int p, double t, int q, int m) {
  return truncated_kernel(spec, p, t, q, m).squaredNorm();
}

double hs_norm_sq_double_sum(const Spectrum& spec, int p, double t, int q, int m) {
  m = resolve_m(spec, t, m);
  const int n = spec.n;
  Mat Fp = spec.fields.block(p * n, 0, n, m);
  Mat Fq = spec.fields.block(q * n, 0, n, m);
  const Vec e = exp_weights(spec, t, m);
  double total = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      total += e(i) * e(j) * Fp.col(i).dot(Fp.col(j)) * Fq.col(i).dot(Fq.col(j));
  return total;
}

Vec hs_norm_field(const Spectrum& spec, double t, int q, int m) {
  if (t <= 0.0) throw InputError("heat_kernel", "time t must be positive");
  m = resolve_m(spec, t, m);
  const int n = spec.n;
  const int N = spec.num_vertices;
  const Vec e = exp_weights(spec, t, m);
  Mat Wq = spec.fields.block(q * n, 0, n, m) * e.asDiagonal(); // n x m
  Mat G = spec.fields.leftCols(m) * Wq.transpose();            // (N n) x n
  Vec out(N);
  for (int p = 0; p < N; ++p) out(p) = G.middleRows(p * n, n).squaredNorm();
  return out;
}

Mat field_gradient(const SampledManifold& M, const FrameField& frames, const Vec& field) {
  const int N = M.num_vertices();
  const int n = frames.n();
  const double bw = default_bandwidth(M);
  Mat grad(N, n);
  for (int p = 0; p < N; ++p) {
    Mat AtA = Mat::Zero(n, n);
    Vec Atb = Vec::Zero(n);
    for (auto [q, len] : M.edges[p]) {
      Vec d = frames.frames[p].transpose() *
              (M.vertices.row(q) - M.vertices.row(p)).transpose();
      const double w = std::exp(-len * len / bw);
      AtA.noalias() += w * d * d.transpose();
      Atb.noalias() += w * d * (field(q) - field(p));
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(AtA);
    if (es.eigenvalues()(0) <= 1e-12 * std::max(es.eigenvalues()(n - 1), 1e-300))
      throw StageError("heat_kernel",
                       "degenerate neighbor configuration at vertex " + std::to_string(p));
    grad.row(p) = AtA.ldlt().solve(Atb).transpose();
  }
  return grad;
}

Mat kernel_gradient_hs(const SampledManifold& M, const FrameField& frames,
                       const Spectrum& spec, double t, int q, int m) {
  return field_gradient(M, frames, hs_norm_field(spec, t, q, m));
}

GaussianBoundReport gaussian_bound_check(const SampledManifold& M, const Spectrum& conn,
                                         const Spectrum& scalar, double t,
                                         const std::vector<std::pair<int, int>>& pairs,
                                         double tolerance, double floor_rel) {
  GaussianBoundReport rep;
  rep.t = t;
  rep.tolerance = tolerance;
  const int n = conn.n;
  const int mc = full_truncation(conn, t);
  const int ms = full_truncation(scalar, t);

  // diagonal scale sets the reliability floor for ratios
  double diag_max = 0.0;
  for (auto [p, q] : pairs) {
    diag_max = std::max(diag_max, n * truncated_kernel(scalar, p, t, p, ms)(0, 0));
    diag_max = std::max(diag_max, n * truncated_kernel(scalar, q, t, q, ms)(0, 0));
  }
  const double floor = floor_rel * diag_max;

  bool ok = true;
  for (auto [p, q] : pairs) {
    PairDiagnostic d;
    d.p = p;
    d.q = q;
    d.dist = (M.generator != SampledManifold::Generator::none)
                 ? exact_pair_distance(M, p, q)
                 : graph_distance(M, p)(q);
    d.hs = std::sqrt(hs_norm_sq(conn, p, t, q, mc));
    d.n_km = n * truncated_kernel(scalar, p, t, q, ms)(0, 0);
    d.ratio = d.n_km != 0.0 ? d.hs / d.n_km : std::numeric_limits<double>::infinity();
    d.violation = (d.n_km > floor) && (d.hs > d.n_km * (1.0 + tolerance));
    ok = ok && !d.violation;
    rep.pairs.push_back(d);
  }

  // decay fit of log hs against d^2 over the spec'd window
  rep.expected_slope = -1.0 / (4.0 * t);
  rep.fit_dmin = 3.0 * std::sqrt(t);
  rep.fit_dmax = 6.0 * std::sqrt(t);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& d : rep.pairs) {
    if (d.dist < rep.fit_dmin || d.dist > rep.fit_dmax || d.hs <= 0.0) continue;
    const double x = d.dist * d.dist, y = std::log(d.hs);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++cnt;
  }
  rep.fit_points = cnt;
  if (cnt >= 2) {
    const double denom = cnt * sxx - sx * sx;
    rep.fit_slope = denom != 0.0 ? (cnt * sxy - sx * sy) / denom : 0.0;
  }
  rep.pass = ok;
  return rep;
}

TraceDominationReport trace_domination_check(const Spectrum& conn, const Spectrum& scalar,
                                             double t, double tolerance) {
  TraceDominationReport rep;
  rep.t = t;
  rep.tolerance = tolerance;
  const int n = conn.n;
  int ms = std::min(scalar.size(), conn.size() / n);
  int mc = n * ms;
  rep.modes_conn = mc;
  rep.modes_scalar = ms;
  double tc = 0.0, ts = 0.0;
  for (int i = 0; i < mc; ++i) tc += std::exp(-conn.eigenvalues(i) * t);
  for (int i = 0; i < ms; ++i) ts += std::exp(-scalar.eigenvalues(i) * t);
  rep.trace_conn = tc;
  rep.trace_scalar = ts;
  rep.ratio = tc / (n * ts);
  rep.tail_estimate = std::exp(-scalar.eigenvalues(ms - 1) * t);
  rep.pass = rep.ratio <= 1.0 + tolerance;
  return rep;
}

double tail_energy(const SampledManifold& M, const FrameField& frames, const Spectrum& spec,
                   const std::vector<int>& p_samples, double t, double radius, int m) {
  if (radius <= 0.0) throw InputError("heat_kernel", "radius must be positive");
  const int n = spec.n;
  double worst = 0.0;
  for (int p : p_samples) {
    const Vec dist = geodesic_distance(M, p);
    const Vec field = hs_norm_field(spec, t, p, m); // column p via transpose duality
    const Mat grad = field_gradient(M, frames, field);
    double sum = 0.0;
    for (int q = 0; q < M.num_vertices(); ++q)
      if (dist(q) > radius) sum += M.weights(q) * grad.row(q).squaredNorm();
    worst = std::max(worst, sum);
  }
  return std::pow(2.0 * t, (3.0 * n + 2.0) / 2.0) * worst;
}

TruncationErrorReport truncation_error(const Spectrum& spec, double t, int m, int m_prime,
                                       const std::vector<std::pair<int, int>>& pairs) {
  if (m > m_prime) throw InputError("heat_kernel", "need m <= m'");
  TruncationErrorReport rep;
  const int n = spec.n;
  const Vec e = exp_weights(spec, t, m_prime);
  for (auto [p, q] : pairs) {
    const double a = hs_norm_sq(spec, p, t, q, m);
    const double b = hs_norm_sq(spec, p, t, q, m_prime);
    rep.sup_diff = std::max(rep.sup_diff, std::abs(a - b));
    // |HS^2_{m'} - HS^2_m| <= S_{m'}^2 - S_m^2 with S_k = sum e^{-lambda t}|X(p)||X(q)|
    double Sm = 0.0, Smp = 0.0;
    for (int i = 0; i < m_prime; ++i) {
      const double c =
          e(i) * spec.field_at(i, p).norm() * spec.field_at(i, q).norm();
      if (i < m) Sm += c;
      Smp += c;
    }
    rep.tail_bound = std::max(rep.tail_bound, Smp * Smp - Sm * Sm);
  }
  (void)n;
  return rep;
}

} // namespace hke
