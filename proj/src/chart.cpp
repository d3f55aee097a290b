#include "hke/chart.h"

#include "hke/heat_kernel.h"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace hke {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_periodic(double x, double period) {
  return x - period * std::round(x / period);
}

// Analytic tangent basis of the generated manifolds in ambient coordinates,
// the gauge in which parallel fields have constant coefficients.
Mat analytic_tangent_basis(const SampledManifold& M, int v) {
  switch (M.generator) {
    case SampledManifold::Generator::circle: {
      const double th = M.param(v, 0);
      Mat T(2, 1);
      T << -std::sin(th), std::cos(th);
      return T;
    }
    case SampledManifold::Generator::flat_torus: {
      const double au = 2.0 * kPi * M.param(v, 0) / M.gen_side;
      const double av = 2.0 * kPi * M.param(v, 1) / M.gen_side;
      Mat T = Mat::Zero(4, 2);
      T(0, 0) = -std::sin(au);
      T(1, 0) = std::cos(au);
      T(2, 1) = -std::sin(av);
      T(3, 1) = std::cos(av);
      return T;
    }
    default:
      throw StageError("chart", "no analytic tangent basis for this manifold");
  }
}

// Rotation taking the unit vector a to b (ambient 3-vectors).
Mat rotation_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d axis = a.cross(b);
  const double s = axis.norm();
  const double c = a.dot(b);
  if (s < 1e-15) {
    Mat I = Mat::Identity(3, 3);
    return c > 0 ? I : Mat(-I);
  }
  return Eigen::AngleAxisd(std::atan2(s, c), axis / s).toRotationMatrix();
}

double exact_or_edge_length(const SampledManifold& M, int a, int b, double fallback) {
  if (M.generator == SampledManifold::Generator::none) return fallback;
  return exact_pair_distance(M, a, b);
}

} // namespace

int Chart::local_index(int vertex) const {
  for (int i = 0; i < size(); ++i)
    if (vertices[i] == vertex) return i;
  return -1;
}

int Chart::nearest_vertex(const Vec& x) const {
  int best = 0;
  double best_d = (coords.row(0).transpose() - x).norm();
  for (int i = 1; i < size(); ++i) {
    const double d = (coords.row(i).transpose() - x).norm();
    if (d < best_d) { best_d = d; best = i; }
  }
  return best;
}

Chart build_chart(const SampledManifold& M, const FrameField& frames, int center,
                  double r, double radius) {
  if (r <= 0.0 || radius <= 0.0) throw InputError("chart", "r and radius must be positive");
  const int n = M.intrinsic_dim;
  Chart chart;
  chart.center = center;
  chart.r = r;
  chart.radius = radius;

  const Vec dist = geodesic_distance(M, center);
  for (int v = 0; v < M.num_vertices(); ++v)
    if (dist(v) <= radius) chart.vertices.push_back(v);
  if (chart.size() < 3 * n)
    throw StageError("chart", "too few vertices in chart: " + std::to_string(chart.size()));

  chart.coords.resize(chart.size(), n);
  chart.gauge.resize(chart.size());

  const auto gen = M.generator;
  if (gen == SampledManifold::Generator::flat_torus ||
      gen == SampledManifold::Generator::circle) {
    // exact flat coordinates from the parameterization
    for (int i = 0; i < chart.size(); ++i) {
      const int v = chart.vertices[i];
      Vec x(n);
      if (gen == SampledManifold::Generator::flat_torus) {
        x(0) = wrap_periodic(M.param(v, 0) - M.param(center, 0), M.gen_side);
        x(1) = wrap_periodic(M.param(v, 1) - M.param(center, 1), M.gen_side);
      } else {
        double d = M.param(v, 0) - M.param(center, 0);
        d = wrap_periodic(d, 2.0 * kPi);
        x(0) = M.gen_radius * d;
      }
      chart.coords.row(i) = (x / r).transpose();
      chart.gauge[i] = analytic_tangent_basis(M, v).transpose() * frames.frames[v];
    }
  } else if (gen == SampledManifold::Generator::sphere) {
    // exact exponential map: chord direction projected to the tangent plane
    // carries the geodesic direction; chart axes are the center frame
    const Mat& Fc = frames.frames[center];
    const Eigen::Vector3d pc = M.vertices.row(center).transpose() / M.gen_radius;
    for (int i = 0; i < chart.size(); ++i) {
      const int v = chart.vertices[i];
      Vec x = Vec::Zero(n);
      if (v != center) {
        Vec proj = Fc.transpose() *
                   (M.vertices.row(v) - M.vertices.row(center)).transpose();
        const double pn = proj.norm();
        if (pn < 1e-14) throw StageError("chart", "antipodal point in chart");
        x = proj * (dist(v) / pn);
      }
      chart.coords.row(i) = (x / r).transpose();
      // chart components at v: radially transported center frame
      const Eigen::Vector3d pv = M.vertices.row(v).transpose() / M.gen_radius;
      Mat transported = rotation_between(pc, pv) * Fc;
      chart.gauge[i] = align_frames(frames.frames[v], transported);
    }
  } else {
    // loaded data: tangent projection rescaled to geodesic length,
    // single-hop Procrustes gauge to the center frame
    const Mat& Fc = frames.frames[center];
    for (int i = 0; i < chart.size(); ++i) {
      const int v = chart.vertices[i];
      Vec x = Vec::Zero(n);
      if (v != center) {
        Vec proj = Fc.transpose() *
                   (M.vertices.row(v) - M.vertices.row(center)).transpose();
        const double pn = proj.norm();
        if (pn < 1e-14) throw StageError("chart", "degenerate projection in chart");
        x = proj * (dist(v) / pn);
      }
      chart.coords.row(i) = (x / r).transpose();
      chart.gauge[i] = align_frames(frames.frames[v], Fc);
    }
  }

  // metric fit: r^2 gbar_ab dx^a dx^b ~ squared geodesic edge lengths
  chart.metric.resize(chart.size());
  const int params = n * (n + 1) / 2;
  for (int i = 0; i < chart.size(); ++i) {
    const int v = chart.vertices[i];
    Mat AtA = Mat::Zero(params, params);
    Vec Atb = Vec::Zero(params);
    int rows = 0;
    for (auto [w, len] : M.edges[v]) {
      const int j = chart.local_index(w);
      if (j < 0) continue;
      const Vec dx = (chart.coords.row(j) - chart.coords.row(i)).transpose();
      Vec row(params);
      int idx = 0;
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
          row(idx++) = (a == b ? 1.0 : 2.0) * dx(a) * dx(b) * r * r;
      const double target = exact_or_edge_length(M, v, w, len);
      AtA.noalias() += row * row.transpose();
      Atb.noalias() += row * (target * target);
      ++rows;
    }
    if (rows < params)
      throw StageError("chart", "metric fit underdetermined at vertex " + std::to_string(v));
    Eigen::SelfAdjointEigenSolver<Mat> chk(AtA);
    if (chk.eigenvalues()(0) <= 1e-12 * std::max(chk.eigenvalues()(params - 1), 1e-300))
      throw StageError("chart", "metric fit failure at vertex " + std::to_string(v));
    const Vec sol = AtA.ldlt().solve(Atb);
    Mat g(n, n);
    int idx = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) { g(a, b) = sol(idx); g(b, a) = sol(idx); ++idx; }
    chart.metric[i] = g;
    chart.distortion =
        std::max(chart.distortion, (g - Mat::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  return chart;
}

RescaledKernelValue rescaled_kernel(const Spectrum& spec, const Chart& chart, const Vec& x,
                                    double s, const Vec& y, int m) {
  if (s <= 0.0) throw InputError("chart", "scale time s must be positive");
  const int n = spec.n;
  const double limit = chart.radius / chart.r;
  if (x.norm() > limit + 1e-9 || y.norm() > limit + 1e-9)
    throw InputError("chart", "point outside chart");

  const int iv = chart.nearest_vertex(x);
  const int iw = chart.nearest_vertex(y);
  RescaledKernelValue out;
  out.snapped_x = chart.coords.row(iv).transpose();
  out.snapped_y = chart.coords.row(iw).transpose();
  out.snap_dist = std::max((out.snapped_x - x).norm(), (out.snapped_y - y).norm());

  const double t = s * chart.r * chart.r;
  const int mt = (m == kFullKernel) ? std::min(full_truncation(spec, t), spec.size())
                                    : m;
  Mat block = truncated_kernel(spec, chart.vertices[iv], t, chart.vertices[iw], mt);
  out.block = std::pow(chart.r, n) * chart.gauge[iv] * block * chart.gauge[iw].transpose();
  out.tail = std::exp(-spec.eigenvalues(mt - 1) * t);
  return out;
}

Mat euclidean_kernel(const Vec& x, double s, const Vec& y, int n) {
  if (s <= 0.0) throw InputError("chart", "time must be positive");
  const double d2 = (x - y).squaredNorm();
  const double c = std::pow(4.0 * kPi * s, -0.5 * n) * std::exp(-d2 / (4.0 * s));
  return c * Mat::Identity(n, n);
}

Mat z_kernel(const Vec& x, double s, const Vec& y, const Mat& gbar) {
  if (s <= 0.0) throw InputError("chart", "time must be positive");
  const int n = static_cast<int>(gbar.rows());
  const Vec d = x - y;
  const double quad = d.dot(gbar * d);
  const double c = std::sqrt(gbar.determinant()) * std::pow(4.0 * kPi * s, -0.5 * n) *
                   std::exp(-quad / (4.0 * s));
  return c * Mat::Identity(n, n);
}

Mat z_kernel_at(const Spectrum& spec, const Chart& chart, const Vec& x, double s,
                const Vec& y) {
  (void)spec;
  const int iw = chart.nearest_vertex(y);
  return z_kernel(x, s, y, chart.metric[iw]);
}

KernelComparison compare_kernels(const Spectrum& spec, const Chart& chart,
                                 const std::vector<Vec>& xs,
                                 const std::vector<double>& s_values,
                                 const std::vector<Vec>& ys, double grad_step) {
  KernelComparison cmp;
  cmp.r = chart.r;
  cmp.chart_center = chart.center;
  cmp.distortion = chart.distortion;
  const int n = spec.n;

  for (const Vec& y_req : ys) {
    const int iy = chart.nearest_vertex(y_req);
    const Vec y = chart.coords.row(iy).transpose();
    const Mat gbar = chart.metric[iy];
    for (double s : s_values) {
      for (const Vec& x_req : xs) {
        if (s < 0.25 && (x_req - y).norm() < 0.5) continue; // P_{1/2,1/4}(y)
        RescaledKernelValue K = rescaled_kernel(spec, chart, x_req, s, y_req);
        const Vec x = K.snapped_x;
        const Mat GE = euclidean_kernel(x, s, y, n);
        const Mat Z = z_kernel(x, s, y, gbar);
        cmp.sup_euclid = std::max(cmp.sup_euclid, GE.cwiseAbs().maxCoeff());
        cmp.sup_diff_euclid =
            std::max(cmp.sup_diff_euclid, (K.block - GE).cwiseAbs().maxCoeff());
        cmp.sup_diff_Z = std::max(cmp.sup_diff_Z, (K.block - Z).cwiseAbs().maxCoeff());
        cmp.max_snap_dist = std::max(cmp.max_snap_dist, K.snap_dist);
        const double kmax = K.block.cwiseAbs().maxCoeff();
        cmp.decay_fit_C = std::max(
            cmp.decay_fit_C,
            kmax * std::pow(s, 0.5 * n) * std::exp((x - y).squaredNorm() / (8.0 * s)));
        ++cmp.samples;

        // finite-difference gradient discrepancy along each chart axis,
        // both kernels evaluated at the same snapped pair
        for (int a = 0; a < n; ++a) {
          Vec xp = x_req, xm = x_req;
          xp(a) += grad_step;
          xm(a) -= grad_step;
          const double limit = chart.radius / chart.r;
          if (xp.norm() > limit || xm.norm() > limit) continue;
          RescaledKernelValue Kp = rescaled_kernel(spec, chart, xp, s, y_req);
          RescaledKernelValue Km = rescaled_kernel(spec, chart, xm, s, y_req);
          const double dxa = Kp.snapped_x(a) - Km.snapped_x(a);
          if (std::abs(dxa) < 0.2 * grad_step) continue;
          if (s < 0.25 && ((Kp.snapped_x - y).norm() < 0.5 ||
                           (Km.snapped_x - y).norm() < 0.5))
            continue;
          const Mat fd_K = (Kp.block - Km.block) / dxa;
          const Mat fd_G = (euclidean_kernel(Kp.snapped_x, s, y, n) -
                            euclidean_kernel(Km.snapped_x, s, y, n)) /
                           dxa;
          cmp.grad_sup_diff =
              std::max(cmp.grad_sup_diff, (fd_K - fd_G).cwiseAbs().maxCoeff());
        }
      }
    }
  }
  return cmp;
}

} // namespace hke
