#pragma once

#include "hke/types.h"

#include <array>
#include <utility>
#include <vector>

namespace hke {

// Discrete stand-in for a closed Riemannian manifold: sampled vertices with
// measure weights and a symmetric weighted neighbor graph. For generated
// manifolds the parameterization is kept so geodesic distances come from
// closed forms instead of the graph.
struct SampledManifold {
  enum class Generator { none, circle, flat_torus, sphere };

  Mat vertices;  // N x D ambient coordinates
  Vec weights;   // N positive vertex measures, summing to ~Vol(M)
  int intrinsic_dim = 0;
  std::vector<std::vector<std::pair<int, double>>> edges; // (neighbor, length)
  std::string label;

  Generator generator = Generator::none;
  double gen_radius = 1.0; // circle/sphere radius
  double gen_side = 1.0;   // flat torus side length
  Mat param;               // per-vertex intrinsic coordinates (generator-dependent)
  std::vector<std::array<int, 3>> faces; // triangles, when measure comes from a mesh

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int ambient_dim() const { return static_cast<int>(vertices.cols()); }
  double total_weight() const { return weights.sum(); }
};

struct GeneratorParams {
  double radius = 1.0;
  double side = 1.0;
  int k = 0; // neighbor count for the graph; 0 picks 4 for curves, 12 for surfaces
};

// name is one of {circle, flat_torus, sphere}. resolution is the per-side
// sample count for circle/flat_torus and the subdivision level for sphere.
SampledManifold generate_manifold(const std::string& name, int resolution,
                                  const GeneratorParams& params = {});

struct LoadParams {
  std::string format = "csv_points"; // or "off_mesh"
  int k = 12;
  int intrinsic_dim = 2;
  double total_volume = 1.0; // point clouds carry no measure; split uniformly
};

SampledManifold load_manifold(const std::string& path, const LoadParams& params);

// All-vertex distances from one source. Closed form for generated manifolds,
// Dijkstra over the edge graph otherwise.
Vec geodesic_distance(const SampledManifold& M, int source);

// Dijkstra unconditionally (used to compare the graph metric to exact ones).
Vec graph_distance(const SampledManifold& M, int source);

double exact_pair_distance(const SampledManifold& M, int a, int b);

// Symmetrized k-nearest-neighbor adjacency by ambient distance; ties broken
// by vertex index. Lengths are ambient unless overwritten by the caller.
std::vector<std::vector<std::pair<int, double>>> knn_edges(const Mat& vertices, int k);

// Number of connected components of the edge graph.
int count_components(const std::vector<std::vector<std::pair<int, double>>>& edges);

} // namespace hke
