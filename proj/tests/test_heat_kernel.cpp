#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hke/heat_kernel.h"
#include "oracles.h"

#include <numbers>
#include <random>

using namespace hke;

namespace {
constexpr double kPi = std::numbers::pi;

struct TorusFixture {
  SampledManifold M;
  FrameField frames;
  Spectrum conn;
  Spectrum scalar;
  double calibration = 0.0;

  // frame coefficients -> flat parameter gauge at vertex p
  Mat to_param(int p) const {
    const double au = 2.0 * kPi * M.param(p, 0) / M.gen_side;
    const double av = 2.0 * kPi * M.param(p, 1) / M.gen_side;
    Mat T = Mat::Zero(4, 2);
    T(0, 0) = -std::sin(au);
    T(1, 0) = std::cos(au);
    T(2, 1) = -std::sin(av);
    T(3, 1) = std::cos(av);
    return T.transpose() * frames.frames[p]; // 2x2 orthogonal
  }
};

// 32^2 unit torus with bandwidth h^2 and enough modes for t >= 0.005.
const TorusFixture& torus() {
  static TorusFixture* fix = [] {
    auto* f = new TorusFixture;
    f->M = generate_manifold("flat_torus", 32, {.side = 1.0});
    f->frames = estimate_frames(f->M, 12);
    const double h = 1.0 / 32.0;
    const double bw = h * h;
    auto Ls = build_scalar_laplacian(f->M, bw);
    double lam_ref;
    int mult;
    known_first_eigenvalue(f->M, lam_ref, mult);
    f->calibration = fit_calibration(Ls, lam_ref, mult);
    Ls.scale = f->calibration;
    auto Lc = build_connection_laplacian(f->M, f->frames, bw);
    Lc.scale = f->calibration;
    f->scalar = eigendecompose(Ls, 300);
    f->conn = eigendecompose(Lc, 600);
    return f;
  }();
  return *fix;
}

int torus_vertex(int i, int j) { return ((i % 32 + 32) % 32) * 32 + ((j % 32 + 32) % 32); }
} // namespace

TEST_CASE("zero-mode truncation: blocks are parallel transports") {
  const auto& f = torus();
  // diagonal blocks are exactly the identity in any gauge
  for (int p = 0; p < f.M.num_vertices(); p += 131) {
    Mat B = truncated_kernel(f.conn, p, 1.0, p, 2);
    CHECK((B - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
  }
  // off-diagonal blocks are orthogonal with ||.||_HS^2 = 2, and equal the
  // identity once both sides are rotated to the flat gauge
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    int p = static_cast<int>(rng() % f.M.num_vertices());
    int q = static_cast<int>(rng() % f.M.num_vertices());
    Mat B = truncated_kernel(f.conn, p, 1.0, q, 2);
    CHECK((B.transpose() * B - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(hs_norm_sq(f.conn, p, 1.0, q, 2) == doctest::Approx(2.0).epsilon(1e-8));
    Mat Bflat = f.to_param(p) * B * f.to_param(q).transpose();
    CHECK((Bflat - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("large t: kernel collapses to the zero-mode projector") {
  const auto& f = torus();
  const double t = 0.2;
  const int mfull = full_truncation(f.conn, t);
  // tail bound from the spectrum itself
  double supX = 0.0;
  for (int i = 2; i < mfull; ++i)
    for (int p = 0; p < f.M.num_vertices(); p += 57)
      supX = std::max(supX, f.conn.field_at(i, p).norm());
  const double bound =
      (mfull - 2) * std::exp(-f.conn.eigenvalues(2) * t) * supX * supX;
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    int p = static_cast<int>(rng() % f.M.num_vertices());
    int q = static_cast<int>(rng() % f.M.num_vertices());
    Mat diff = truncated_kernel(f.conn, p, t, q, mfull) -
               truncated_kernel(f.conn, p, t, q, 2);
    CHECK(diff.cwiseAbs().maxCoeff() < bound);
    CHECK(diff.cwiseAbs().maxCoeff() < std::exp(-f.conn.eigenvalues(2) * t) * 20.0);
  }
}

TEST_CASE("full kernel matches the lattice-sum oracle at t=0.01") {
  const auto& f = torus();
  const double t = 0.01;
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    int p = static_cast<int>(rng() % f.M.num_vertices());
    int q = static_cast<int>(rng() % f.M.num_vertices());
    const double d = exact_pair_distance(f.M, p, q);
    if (d > 0.25) continue; // dispersion dominates farther out at this resolution
    Mat got = f.to_param(p) * truncated_kernel(f.conn, p, t, q) * f.to_param(q).transpose();
    const double want = oracle::torus_heat_kernel(f.M.param(p, 0) - f.M.param(q, 0),
                                                  f.M.param(p, 1) - f.M.param(q, 1), t);
    CHECK((got - want * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.05 * want);
  }
}

TEST_CASE("hs_norm_sq: diagonal example, double-sum route, duality, trace id") {
  const auto& f = torus();
  // block diag(a, b) has HS^2 = a^2 + b^2 (uses the raw definition)
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = -2.0;
  CHECK(D.squaredNorm() == doctest::Approx(13.0));

  std::mt19937 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    int p = static_cast<int>(rng() % f.M.num_vertices());
    int q = static_cast<int>(rng() % f.M.num_vertices());
    const double t = 0.01 + 0.01 * (trial % 3);
    const int m = 40 + 30 * (trial % 4);
    const double a = hs_norm_sq(f.conn, p, t, q, m);
    const double b = hs_norm_sq_double_sum(f.conn, p, t, q, m);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    // transpose duality
    Mat K1 = truncated_kernel(f.conn, p, t, q, m);
    Mat K2 = truncated_kernel(f.conn, q, t, p, m);
    CHECK((K1.transpose() - K2).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, K1.norm()));
  }

  // semigroup property at the trace level is a spectral identity
  const double t1 = 0.013, t2 = 0.021;
  double lhs = 0.0, rhs = 0.0;
  for (int i = 0; i < f.conn.size(); ++i) {
    lhs += std::exp(-f.conn.eigenvalues(i) * (t1 + t2));
    rhs += std::exp(-f.conn.eigenvalues(i) * t1) * std::exp(-f.conn.eigenvalues(i) * t2);
  }
  CHECK(std::abs(lhs - rhs) < 1e-12 * lhs);
}

TEST_CASE("hs field: zero-mode constant, diagonal lattice value") {
  const auto& f = torus();
  Vec field2 = hs_norm_field(f.conn, 0.05, 77, 2);
  CHECK((field2.array() - 2.0).abs().maxCoeff() < 1e-8);

  const double t = 0.01;
  Vec field = hs_norm_field(f.conn, t, 40);
  const double want = oracle::torus_hs_sq(0, 0, t);
  CHECK(field(40) == doctest::Approx(want).epsilon(0.10));
}

TEST_CASE("gauge invariance: hs quantities stable to 1e-10 under rotation") {
  const auto& f = torus();
  auto G = random_gauges(f.M.num_vertices(), 2, 1717);
  Spectrum rotated = apply_gauges(f.conn, G);
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    int p = static_cast<int>(rng() % f.M.num_vertices());
    int q = static_cast<int>(rng() % f.M.num_vertices());
    const double a = hs_norm_sq(f.conn, p, 0.01, q);
    const double b = hs_norm_sq(rotated, p, 0.01, q);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("kernel gradient: flat cases and the Gaussian derivative") {
  const auto& f = torus();
  // constant field (zero-mode kernel) has zero gradient
  Mat g0 = kernel_gradient_hs(f.M, f.frames, f.conn, 0.05, 10, 2);
  CHECK(g0.cwiseAbs().maxCoeff() < 1e-8);

  // at p = q the field peaks; symmetry kills the gradient
  const double t = 0.01;
  const int q = torus_vertex(5, 9);
  Mat g = kernel_gradient_hs(f.M, f.frames, f.conn, t, q);
  Vec mags(f.M.num_vertices());
  for (int p = 0; p < f.M.num_vertices(); ++p) mags(p) = g.row(p).norm();
  CHECK(mags(q) < 1e-3 * mags.maxCoeff());

  // 2 sqrt(t) away along x: dominant-Gaussian derivative within 10%
  const double tt = std::pow(6.0 / 32.0 / 2.0, 2); // puts 2 sqrt(t) on a vertex
  const int p = torus_vertex(5 + 6, 9);
  Mat gt = kernel_gradient_hs(f.M, f.frames, f.conn, tt, q);
  const double got = gt.row(p).norm();
  const double want = std::abs(oracle::torus_hs_sq_du(6.0 / 32.0, 0.0, tt));
  CHECK(got == doctest::Approx(want).epsilon(0.10));
}

TEST_CASE("gaussian bound: trivial flat bundle ratio is 1/sqrt(2)") {
  const auto& f = torus();
  const double t = 0.01;
  std::vector<std::pair<int, int>> pairs;
  std::mt19937 rng(23);
  for (int trial = 0; trial < 50; ++trial)
    pairs.emplace_back(static_cast<int>(rng() % f.M.num_vertices()),
                       static_cast<int>(rng() % f.M.num_vertices()));
  pairs.emplace_back(100, 100); // diagonal pair
  auto rep = gaussian_bound_check(f.M, f.conn, f.scalar, t, pairs);
  CHECK(rep.pass);
  for (const auto& d : rep.pairs) {
    CHECK(d.ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
    CHECK(!d.violation);
  }
  // diagonal respects domination outright
  CHECK(rep.pairs.back().ratio <= 1.05);
  // decay slope within 25% of -1/(4t) needs far pairs; build a radial sweep
  pairs.clear();
  for (int j = 1; j < 16; ++j) pairs.emplace_back(torus_vertex(0, 0), torus_vertex(j, j));
  for (int j = 1; j < 16; ++j) pairs.emplace_back(torus_vertex(0, 0), torus_vertex(0, j));
  auto rep2 = gaussian_bound_check(f.M, f.conn, f.scalar, t, pairs);
  CHECK(rep2.fit_points >= 5);
  CHECK(std::abs(rep2.fit_slope / rep2.expected_slope - 1.0) < 0.25);
}

TEST_CASE("trace domination: flat torus equality and degenerate operator") {
  const auto& f = torus();
  for (double t : {0.05, 0.1, 0.5}) {
    auto rep = trace_domination_check(f.conn, f.scalar, t, 0.01);
    CHECK(rep.pass);
    CHECK(rep.ratio == doctest::Approx(1.0).epsilon(0.01));
  }
  // single-vertex zero operator: both traces equal their dimension count
  Spectrum conn1, scal1;
  conn1.eigenvalues = Vec::Zero(2);
  conn1.n = 2;
  scal1.eigenvalues = Vec::Zero(1);
  scal1.n = 1;
  auto rep = trace_domination_check(conn1, scal1, 0.7, 0.0);
  CHECK(rep.ratio == 1.0);
  CHECK(rep.pass);
}

TEST_CASE("tail energy: empty region, Gaussian smallness, monotone in t") {
  const auto& f = torus();
  std::vector<int> samples = {0, torus_vertex(7, 21)};
  CHECK(tail_energy(f.M, f.frames, f.conn, samples, 0.005, 1.0) == 0.0);
  const double v1 = tail_energy(f.M, f.frames, f.conn, samples, 0.005, 0.4);
  CHECK(v1 < 1e-6);
  const double v2 = tail_energy(f.M, f.frames, f.conn, samples, 0.01, 0.4);
  CHECK(v2 > v1);
}

TEST_CASE("truncation error: zero at m=m', bounded, monotone") {
  const auto& f = torus();
  const double t = 0.01;
  std::vector<std::pair<int, int>> pairs;
  std::mt19937 rng(29);
  for (int trial = 0; trial < 30; ++trial)
    pairs.emplace_back(static_cast<int>(rng() % f.M.num_vertices()),
                       static_cast<int>(rng() % f.M.num_vertices()));

  auto same = truncation_error(f.conn, t, 120, 120, pairs);
  CHECK(same.sup_diff == 0.0);

  const int m8 = full_truncation(f.conn, t, 1e-8);
  auto rep = truncation_error(f.conn, t, m8, std::min(m8 + 50, f.conn.size()), pairs);
  CHECK(rep.sup_diff < 1e-6);
  CHECK(rep.sup_diff <= rep.tail_bound + 1e-15);

  auto e1 = truncation_error(f.conn, t, 60, 400, pairs);
  auto e2 = truncation_error(f.conn, t, 150, 400, pairs);
  auto e3 = truncation_error(f.conn, t, 300, 400, pairs);
  CHECK(e1.sup_diff >= e2.sup_diff);
  CHECK(e2.sup_diff >= e3.sup_diff);
  CHECK(e1.tail_bound >= e2.tail_bound);
  CHECK(e2.tail_bound >= e3.tail_bound);
}
