#include "hke/eigensolver.h"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace hke {

namespace {

double gershgorin_bound(const SpMat& B) {
  Vec rowsum = Vec::Zero(B.rows());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SpMat::InnerIterator it(B, k); it; ++it) rowsum(it.row()) += std::abs(it.value());
  return rowsum.size() ? rowsum.maxCoeff() : 0.0;
}

void dense_smallest(const SpMat& B, int m, Vec& values, Mat& vectors) {
  Mat D = Mat(B);
  Eigen::SelfAdjointEigenSolver<Mat> es(D);
  if (es.info() != Eigen::Success)
    throw StageError("eigensolve", "dense eigensolver failed");
  values = es.eigenvalues().head(m);
  vectors = es.eigenvectors().leftCols(m);
}

struct LanczosState {
  Mat V;      // orthonormal basis, dim x K
  Vec alpha;  // diagonal of T
  Vec beta;   // subdiagonal of T
  int K = 0;
};

// Shift-invert Lanczos with full (two-pass) reorthogonalization. Op is
// (B + zeta I)^{-1}; the m largest Ritz values of Op are the m smallest
// eigenvalues of B. Deterministic for a fixed seed.
void lanczos_smallest(const SpMat& B, int m, Vec& values, Mat& vectors, Vec& residuals,
                      const EigenOptions& opts, double gersh) {
  const int dim = static_cast<int>(B.rows());
  const double zeta = std::max(1e-8, 1e-6 * gersh);
  SpMat A = B;
  for (int i = 0; i < dim; ++i) A.coeffRef(i, i) += zeta;
  Eigen::SimplicialLDLT<SpMat> factor(A);
  if (factor.info() != Eigen::Success)
    throw StageError("eigensolve", "sparse factorization failed");

  const double res_tol = std::max(opts.residual_tol * gersh, 1e-300);
  int max_basis = opts.max_basis > 0 ? opts.max_basis
                                     : std::min(dim, std::max(2 * m + 400, m + 200));

  std::mt19937 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_vec = [&]() {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
    return v;
  };

  for (int attempt = 0; attempt < 3; ++attempt) {
    LanczosState st;
    st.V.resize(dim, max_basis);
    st.alpha.resize(max_basis);
    st.beta = Vec::Zero(max_basis);

    Vec v = random_vec();
    v.normalize();
    st.V.col(0) = v;

    Vec theta_prev;
    const int chunk = 96;
    int next_check = std::min(max_basis - 1, m + 32);
    bool done = false;

    while (st.K < max_basis - 1 && !done) {
      const int k = st.K;
      Vec w = factor.solve(st.V.col(k));
      st.alpha(k) = st.V.col(k).dot(w);
      // full reorthogonalization, two passes
      for (int pass = 0; pass < 2; ++pass) {
        Vec c = st.V.leftCols(k + 1).transpose() * w;
        w.noalias() -= st.V.leftCols(k + 1) * c;
      }
      double b = w.norm();
      if (b < 1e-13) {
        // invariant subspace hit; continue in a fresh random direction
        w = random_vec();
        for (int pass = 0; pass < 2; ++pass) {
          Vec c = st.V.leftCols(k + 1).transpose() * w;
          w.noalias() -= st.V.leftCols(k + 1) * c;
        }
        b = w.norm();
        if (b < 1e-13) break; // basis exhausted the space
        st.beta(k) = 0.0;
      } else {
        st.beta(k) = b;
      }
      st.V.col(k + 1) = w / b;
      ++st.K;

      if (st.K < next_check) continue;
      next_check = std::min(max_basis - 1, st.K + chunk);
      if (st.K < m + 2) continue;

      const int K = st.K;
      Eigen::SelfAdjointEigenSolver<Mat> tri;
      tri.computeFromTridiagonal(st.alpha.head(K), st.beta.head(K - 1),
                                 Eigen::EigenvaluesOnly);
      Vec theta = tri.eigenvalues().tail(m); // ascending; top m of Op
      if (theta_prev.size() == m) {
        const double drift =
            (theta - theta_prev).cwiseAbs().maxCoeff() /
            std::max(theta.cwiseAbs().maxCoeff(), 1e-300);
        if (drift < 1e-13) {
          // extract Ritz vectors and verify true residuals
          Eigen::SelfAdjointEigenSolver<Mat> full;
          full.computeFromTridiagonal(st.alpha.head(K), st.beta.head(K - 1));
          Mat S = full.eigenvectors().rightCols(m).rowwise().reverse();
          Vec th = full.eigenvalues().tail(m).reverse(); // descending in Op
          Mat X = st.V.leftCols(K) * S;
          Vec lam(m);
          for (int i = 0; i < m; ++i) lam(i) = 1.0 / th(i) - zeta;
          Mat R = B * X - X * lam.asDiagonal();
          Vec rn = R.colwise().norm();
          if (rn.maxCoeff() <= res_tol) {
            values = lam;
            vectors = X;
            residuals = rn;
            done = true;
          }
        }
      }
      theta_prev = theta;
    }
    if (done) return;
    max_basis = std::min(dim, static_cast<int>(max_basis * 1.6) + 64);
  }
  throw StageError("eigensolve",
                   "Lanczos failed to converge " + std::to_string(m) +
                       " eigenpairs (basis exhausted); residual tolerance " +
                       std::to_string(res_tol));
}

Spectrum eigendecompose_impl(const SpMat& L, const Vec& vertex_mass, int n,
                             double bandwidth, double scale, int m, unsigned seed) {
  const int dim = static_cast<int>(L.rows());
  const int N = dim / n;
  if (m < 1 || m > dim)
    throw InputError("eigensolve", "eigenpair count m out of range");

  Vec minv(dim);
  for (int p = 0; p < N; ++p) {
    if (vertex_mass(p) <= 0.0) throw StageError("eigensolve", "nonpositive vertex mass");
    for (int a = 0; a < n; ++a) minv(p * n + a) = 1.0 / std::sqrt(vertex_mass(p));
  }
  // B = M^{-1/2} L M^{-1/2}: standard form of the generalized pencil
  SpMat B = L;
  for (int k = 0; k < B.outerSize(); ++k)
    for (SpMat::InnerIterator it(B, k); it; ++it)
      it.valueRef() *= minv(it.row()) * minv(it.col());

  EigenOptions opts;
  opts.seed = seed;
  Vec values, residuals;
  Mat vectors;
  smallest_eigenpairs(B, m, values, vectors, residuals, opts);

  Spectrum spec;
  spec.eigenvalues = scale * values;
  spec.fields = minv.asDiagonal() * vectors;
  spec.mass = vertex_mass;
  spec.residuals = scale * residuals;
  spec.n = n;
  spec.num_vertices = N;
  spec.bandwidth = bandwidth;
  spec.calibration = scale;
  return spec;
}

} // namespace

void smallest_eigenpairs(const SpMat& B, int m, Vec& values, Mat& vectors,
                         Vec& residuals, const EigenOptions& opts) {
  const int dim = static_cast<int>(B.rows());
  m = std::min(m, dim);
  const double gersh = std::max(gershgorin_bound(B), 1e-300);
  if (dim <= opts.dense_threshold || m > static_cast<int>(0.6 * dim)) {
    dense_smallest(B, m, values, vectors);
    Mat R = B * vectors - vectors * values.asDiagonal();
    residuals = R.colwise().norm();
    return;
  }
  lanczos_smallest(B, m, values, vectors, residuals, opts, gersh);
}

Spectrum eigendecompose(const ConnectionLaplacian& L, int m, unsigned seed) {
  return eigendecompose_impl(L.matrix, L.mass, L.n, L.bandwidth, L.scale, m, seed);
}

Spectrum eigendecompose(const ScalarLaplacian& L, int m, unsigned seed) {
  return eigendecompose_impl(L.matrix, L.mass, 1, L.bandwidth, L.scale, m, seed);
}

Spectrum apply_gauges(const Spectrum& spec, const std::vector<Mat>& gauges) {
  Spectrum out = spec;
  for (int p = 0; p < spec.num_vertices; ++p)
    out.fields.middleRows(p * spec.n, spec.n) =
        gauges[p].transpose() * spec.fields.middleRows(p * spec.n, spec.n);
  return out;
}

int full_truncation(const Spectrum& spec, double t, double tol) {
  if (t <= 0.0) throw InputError("heat_kernel", "time t must be positive");
  const double lambda_cut = std::log(1.0 / tol) / t;
  const int size = spec.size();
  int m = 0;
  while (m < size && spec.eigenvalues(m) <= lambda_cut) ++m;
  if (m < size) ++m; // first mode past the cutoff, so e^{-lambda_m t} < tol holds
  // never split a numerically degenerate cluster
  while (m < size &&
         spec.eigenvalues(m) <= spec.eigenvalues(m - 1) * (1.0 + 1e-8) + 1e-12)
    ++m;
  return m;
}

} // namespace hke
