#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hke/net_partition.h"
#include "oracles.h"

#include <numbers>
#include <set>

using namespace hke;

namespace {
constexpr double kPi = std::numbers::pi;
} // namespace

TEST_CASE("single ball covers everything when delta >= diameter") {
  SampledManifold C = generate_manifold("circle", 64, {.radius = 1.0});
  DeltaNet net = farthest_point_net(C, kPi + 0.1);
  CHECK(net.centers.size() == 1);
  Partition part = voronoi_partition(C, net);
  CHECK(part.masses(0) == doctest::Approx(C.total_weight()).epsilon(1e-14));
}

TEST_CASE("circle net at delta = pi/4: four near-even centers") {
  SampledManifold C = generate_manifold("circle", 512, {.radius = 1.0});
  DeltaNet net = farthest_point_net(C, kPi / 4.0 + 1e-12);
  CHECK(net.centers.size() == 4);
  CHECK(net.covering_radius <= kPi / 4.0 + 1e-12);
  // brute-force covering-radius check over all vertices
  double worst = 0.0;
  for (int v = 0; v < C.num_vertices(); ++v) {
    double best = 1e300;
    for (int c : net.centers) best = std::min(best, exact_pair_distance(C, v, c));
    worst = std::max(worst, best);
  }
  CHECK(worst == doctest::Approx(net.covering_radius));
  CHECK(worst <= kPi / 4.0 + 1e-12);

  // four cells of mass pi/2 within one vertex weight
  Partition part = voronoi_partition(C, net);
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(part.masses(i) - kPi / 2.0) <= C.weights(0) + 1e-12);
  CHECK(part.masses.sum() == doctest::Approx(2.0 * kPi).epsilon(1e-12));
}

TEST_CASE("torus net at delta = 0.1: size range and exhaustive covering") {
  SampledManifold T = generate_manifold("flat_torus", 64, {.side = 1.0});
  DeltaNet net = farthest_point_net(T, 0.1);
  CHECK(net.centers.size() >= 50);
  CHECK(net.centers.size() <= 200);
  double worst = 0.0;
  for (int v = 0; v < T.num_vertices(); ++v) {
    double best = 1e300;
    for (int c : net.centers) best = std::min(best, exact_pair_distance(T, v, c));
    worst = std::max(worst, best);
  }
  CHECK(worst <= 0.1);

  // subordination: every vertex within delta of its own center
  Partition part = voronoi_partition(T, net);
  for (int v = 0; v < T.num_vertices(); ++v)
    CHECK(exact_pair_distance(T, v, net.centers[part.assignment[v]]) <= 0.1);
  CHECK(part.masses.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(part.masses.minCoeff() > 0.0);
}

TEST_CASE("net refinement never shrinks and reruns are identical") {
  SampledManifold T = generate_manifold("flat_torus", 32, {.side = 1.0});
  DeltaNet coarse = farthest_point_net(T, 0.2);
  DeltaNet fine = farthest_point_net(T, 0.1);
  CHECK(fine.centers.size() >= coarse.centers.size());

  DeltaNet again = farthest_point_net(T, 0.2);
  CHECK(again.centers == coarse.centers);
  Partition p1 = voronoi_partition(T, coarse);
  Partition p2 = voronoi_partition(T, again);
  CHECK(p1.assignment == p2.assignment);
}

TEST_CASE("replicate_centers ceiling arithmetic") {
  Partition part;
  part.delta = 0.1;
  part.masses = Vec(3);
  const double A = 0.037;
  part.masses << A, 2.5 * A, 0.2 * A;
  ReplicatedCenters rep = replicate_centers(part, A);
  CHECK(rep.copies_per_cell == std::vector<int>{1, 3, 1});
  CHECK(rep.center_of_copy == std::vector<int>{0, 1, 1, 1, 2});
  // equal-split copy masses re-sum to the cell masses exactly
  CHECK(rep.copy_mass.sum() == doctest::Approx(part.masses.sum()).epsilon(1e-15));
  CHECK(rep.copy_mass(1) == doctest::Approx(2.5 * A / 3.0));
  // total copies >= total mass / A (ceiling superadditivity)
  CHECK(static_cast<double>(rep.center_of_copy.size()) >= part.masses.sum() / A);
}

TEST_CASE("partition masses are a reindexed sum of vertex weights") {
  SampledManifold S = generate_manifold("sphere", 3, {});
  DeltaNet net = farthest_point_net(S, 0.7);
  Partition part = voronoi_partition(S, net);
  CHECK(part.masses.sum() == doctest::Approx(S.total_weight()).epsilon(1e-12));
  // cells are disjoint and cover: every vertex appears in exactly one cell
  std::set<int> seen;
  for (int v = 0; v < S.num_vertices(); ++v) {
    CHECK(part.assignment[v] >= 0);
    CHECK(part.assignment[v] < static_cast<int>(net.centers.size()));
    seen.insert(v);
  }
  CHECK(static_cast<int>(seen.size()) == S.num_vertices());
}
