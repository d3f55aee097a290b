#include "hke/net_partition.h"

#include <cmath>

namespace hke {

DeltaNet farthest_point_net(const SampledManifold& M, double delta) {
  if (delta <= 0.0) throw InputError("net", "delta must be positive");
  const int N = M.num_vertices();
  DeltaNet net;
  net.delta = delta;

  std::vector<Vec> rows;
  net.centers.push_back(0);
  rows.push_back(geodesic_distance(M, 0));
  Vec nearest = rows.back();

  while (true) {
    int far = 0;
    double far_d = -1.0;
    for (int v = 0; v < N; ++v)
      if (nearest(v) > far_d) { far_d = nearest(v); far = v; }
    net.covering_radius = far_d;
    if (far_d <= delta) break;
    net.centers.push_back(far);
    rows.push_back(geodesic_distance(M, far));
    nearest = nearest.cwiseMin(rows.back());
  }

  net.center_distances.resize(static_cast<int>(rows.size()), N);
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    net.center_distances.row(i) = rows[i].transpose();
  return net;
}

Partition voronoi_partition(const SampledManifold& M, const DeltaNet& net) {
  const int N = M.num_vertices();
  const int N0 = static_cast<int>(net.centers.size());
  if (N0 == 0 || net.center_distances.rows() != N0)
    throw InputError("net", "invalid net");
  Partition part;
  part.delta = net.delta;
  part.assignment.resize(N);
  part.masses = Vec::Zero(N0);
  for (int v = 0; v < N; ++v) {
    int best = 0;
    double best_d = net.center_distances(0, v);
    for (int i = 1; i < N0; ++i)
      if (net.center_distances(i, v) < best_d) { best_d = net.center_distances(i, v); best = i; }
    part.assignment[v] = best;
    part.masses(best) += M.weights(v);
  }
  return part;
}

ReplicatedCenters replicate_centers(const Partition& partition, double A) {
  if (A <= 0.0) throw InputError("net", "per-point mass A must be positive");
  ReplicatedCenters out;
  const int N0 = static_cast<int>(partition.masses.size());
  out.copies_per_cell.resize(N0);
  std::vector<double> masses;
  for (int i = 0; i < N0; ++i) {
    // tolerate one-ulp overshoot so |A_i| = k A yields exactly k copies
    const int Ni = std::max(1, static_cast<int>(std::ceil(partition.masses(i) / A - 1e-9)));
    out.copies_per_cell[i] = Ni;
    for (int j = 0; j < Ni; ++j) {
      out.center_of_copy.push_back(i);
      masses.push_back(partition.masses(i) / Ni);
    }
  }
  out.copy_mass = Eigen::Map<Vec>(masses.data(), static_cast<long>(masses.size()));
  return out;
}

} // namespace hke
