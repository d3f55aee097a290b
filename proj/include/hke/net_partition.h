#pragma once

#include "hke/manifold.h"

#include <vector>

namespace hke {

struct DeltaNet {
  std::vector<int> centers;
  double delta = 0.0;
  double covering_radius = 0.0;
  Mat center_distances; // N0 x N geodesic distances, row i from centers[i]
};

struct Partition {
  std::vector<int> assignment; // per-vertex center index (position in net)
  Vec masses;                  // |A_i|, measure units
  double delta = 0.0;
};

// Greedy farthest-point sampling from vertex 0 until the covering radius
// drops to delta. Ties on the farthest vertex go to the lowest index.
DeltaNet farthest_point_net(const SampledManifold& M, double delta);

// Nearest-center cells; ties to the lowest center index. Masses are summed
// member weights, so they repartition the total measure exactly.
Partition voronoi_partition(const SampledManifold& M, const DeltaNet& net);

struct ReplicatedCenters {
  std::vector<int> center_of_copy;  // flattened p_k, as net center positions
  std::vector<int> copies_per_cell; // N_i = ceil(|A_i| / A)
  Vec copy_mass;                    // equal split |A_i| / N_i per copy
};

ReplicatedCenters replicate_centers(const Partition& partition, double A);

} // namespace hke
