#include "hke/frames.h"

#include <Eigen/SVD>

#include <algorithm>
#include <random>

namespace hke {

namespace {

// Largest-magnitude entry made positive; ties resolved by the first index.
void fix_sign(Eigen::Ref<Vec> col) {
  int arg = 0;
  double best = 0.0;
  for (int i = 0; i < col.size(); ++i)
    if (std::abs(col(i)) > best) { best = std::abs(col(i)); arg = i; }
  if (col(arg) < 0.0) col = -col;
}

} // namespace

FrameField estimate_frames(const SampledManifold& M, int k) {
  const int N = M.num_vertices();
  const int D = M.ambient_dim();
  const int n = M.intrinsic_dim;
  if (k < n + 1) throw InputError("frames", "need k >= n+1 neighbors for PCA");
  if (k >= N) k = N - 1;
  const int jet_terms = 1 + n + n * (n + 1) / 2;

  FrameField F;
  F.frames.resize(N);
  std::vector<std::pair<double, int>> dist(N);
  for (int p = 0; p < N; ++p) {
    for (int q = 0; q < N; ++q)
      dist[q] = {(M.vertices.row(q) - M.vertices.row(p)).norm(), q};
    dist[p].first = std::numeric_limits<double>::infinity();
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(D);
    for (int j = 0; j < k; ++j) mean += M.vertices.row(dist[j].second);
    mean /= k;

    Mat C = Mat::Zero(D, D);
    for (int j = 0; j < k; ++j) {
      Eigen::RowVectorXd d = M.vertices.row(dist[j].second) - mean;
      C += d.transpose() * d;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(C);
    const Vec& ev = es.eigenvalues(); // ascending
    if (ev(D - n) <= 1e-12 * std::max(ev(D - 1), 1e-300))
      throw StageError("frames", "rank-deficient neighborhood at vertex " + std::to_string(p));
    Mat frame(D, n);
    for (int a = 0; a < n; ++a) frame.col(a) = es.eigenvectors().col(D - 1 - a);

    // Osculating-jet refinement: fit each normal coordinate as a quadratic in
    // the tangent coordinates; the linear part is the plane tilt. The plain
    // PCA plane is only first-order accurate on asymmetric neighborhoods.
    if (D > n && k >= jet_terms) {
      for (int iter = 0; iter < 2; ++iter) {
        Eigen::HouseholderQR<Mat> qr(frame);
        Mat Q = qr.householderQ() * Mat::Identity(D, D);
        Mat normals = Q.rightCols(D - n);
        Mat A(k, jet_terms);
        Mat B(k, D - n);
        for (int j = 0; j < k; ++j) {
          Vec d = (M.vertices.row(dist[j].second) - M.vertices.row(p)).transpose();
          Vec tc = frame.transpose() * d;
          int idx = 0;
          A(j, idx++) = 1.0;
          for (int a = 0; a < n; ++a) A(j, idx++) = tc(a);
          for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) A(j, idx++) = tc(a) * tc(b);
          B.row(j) = (normals.transpose() * d).transpose();
        }
        Mat sol = (A.transpose() * A).ldlt().solve(A.transpose() * B);
        Mat tilt = sol.middleRows(1, n); // n x (D-n) linear coefficients
        Mat corrected = frame + normals * tilt.transpose();
        Eigen::HouseholderQR<Mat> reortho(corrected);
        frame = reortho.householderQ() * Mat::Identity(D, n);
      }
      // restore the descending-variance ordering inside the refined plane
      Mat S = Mat::Zero(n, n);
      for (int j = 0; j < k; ++j) {
        Vec tc = frame.transpose() *
                 (M.vertices.row(dist[j].second) - mean).transpose();
        S += tc * tc.transpose();
      }
      Eigen::SelfAdjointEigenSolver<Mat> inplane(S);
      Mat order(n, n);
      for (int a = 0; a < n; ++a) order.col(a) = inplane.eigenvectors().col(n - 1 - a);
      frame = frame * order;
    }
    for (int a = 0; a < n; ++a) fix_sign(frame.col(a));
    F.frames[p] = frame;
  }
  return F;
}

Mat align_frames(const Mat& frame_a, const Mat& frame_b) {
  Mat S = frame_b.transpose() * frame_a;
  Eigen::JacobiSVD<Mat> svd(S, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 1e-10 * std::max(smax, 1.0))
    throw StageError("frames", "singular frame projection (near-orthogonal tangent spaces)");
  return svd.matrixU() * svd.matrixV().transpose();
}

std::vector<Mat> random_gauges(int num_vertices, int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Mat> G(num_vertices);
  for (int p = 0; p < num_vertices; ++p) {
    Mat A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
    Eigen::HouseholderQR<Mat> qr(A);
    Mat Q = qr.householderQ() * Mat::Identity(n, n);
    // make the factorization unique, keeping both orientations reachable
    Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
      if (R(j, j) < 0) Q.col(j) = -Q.col(j);
    G[p] = Q;
  }
  return G;
}

FrameField apply_gauges(const FrameField& frames, const std::vector<Mat>& gauges) {
  FrameField out = frames;
  for (int p = 0; p < out.num_vertices(); ++p) out.frames[p] = frames.frames[p] * gauges[p];
  return out;
}

} // namespace hke
