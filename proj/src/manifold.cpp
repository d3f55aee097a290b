#include "hke/manifold.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <queue>
#include <sstream>

namespace hke {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMinVertices = 8;

double wrap_periodic(double x, double period) {
  x -= period * std::round(x / period);
  return x;
}

// Exact quotient-lattice distance on the square torus of given side.
double torus_distance(double du, double dv, double side) {
  du = wrap_periodic(du, side);
  dv = wrap_periodic(dv, side);
  return std::sqrt(du * du + dv * dv);
}

double sphere_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double radius) {
  const double chord = (a - b).norm();
  return radius * 2.0 * std::asin(std::min(1.0, chord / (2.0 * radius)));
}

void fill_exact_edge_lengths(SampledManifold& M) {
  for (int p = 0; p < M.num_vertices(); ++p)
    for (auto& [q, len] : M.edges[p]) len = exact_pair_distance(M, p, q);
}

SampledManifold make_circle(int resolution, const GeneratorParams& params) {
  SampledManifold M;
  const int N = resolution;
  const double R = params.radius;
  M.vertices.resize(N, 2);
  M.param.resize(N, 1);
  for (int i = 0; i < N; ++i) {
    const double theta = 2.0 * kPi * i / N;
    M.param(i, 0) = theta;
    M.vertices(i, 0) = R * std::cos(theta);
    M.vertices(i, 1) = R * std::sin(theta);
  }
  M.weights = Vec::Constant(N, 2.0 * kPi * R / N);
  M.intrinsic_dim = 1;
  M.generator = SampledManifold::Generator::circle;
  M.gen_radius = R;
  M.label = "circle";
  M.edges = knn_edges(M.vertices, params.k > 0 ? params.k : 4);
  fill_exact_edge_lengths(M);
  return M;
}

SampledManifold make_flat_torus(int resolution, const GeneratorParams& params) {
  SampledManifold M;
  const int res = resolution;
  const int N = res * res;
  const double s = params.side;
  const double r0 = s / (2.0 * kPi); // embedding radius giving du^2 + dv^2 exactly
  M.vertices.resize(N, 4);
  M.param.resize(N, 2);
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      const int id = i * res + j;
      const double u = s * i / res;
      const double v = s * j / res;
      M.param(id, 0) = u;
      M.param(id, 1) = v;
      const double au = 2.0 * kPi * u / s;
      const double av = 2.0 * kPi * v / s;
      M.vertices(id, 0) = r0 * std::cos(au);
      M.vertices(id, 1) = r0 * std::sin(au);
      M.vertices(id, 2) = r0 * std::cos(av);
      M.vertices(id, 3) = r0 * std::sin(av);
    }
  }
  M.weights = Vec::Constant(N, s * s / N);
  M.intrinsic_dim = 2;
  M.generator = SampledManifold::Generator::flat_torus;
  M.gen_side = s;
  M.label = "flat_torus";
  M.edges = knn_edges(M.vertices, params.k > 0 ? params.k : 12);
  fill_exact_edge_lengths(M);
  return M;
}

struct IcoMesh {
  std::vector<Eigen::Vector3d> verts;
  std::vector<std::array<int, 3>> faces;
};

IcoMesh icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  IcoMesh m;
  auto add = [&](double x, double y, double z) {
    Eigen::Vector3d v(x, y, z);
    m.verts.push_back(v.normalized());
  };
  add(-1, t, 0); add(1, t, 0); add(-1, -t, 0); add(1, -t, 0);
  add(0, -1, t); add(0, 1, t); add(0, -1, -t); add(0, 1, -t);
  add(t, 0, -1); add(t, 0, 1); add(-t, 0, -1); add(-t, 0, 1);
  m.faces = {{0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return m;
}

IcoMesh subdivide(const IcoMesh& in) {
  IcoMesh out;
  out.verts = in.verts;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Eigen::Vector3d v = (out.verts[a] + out.verts[b]).normalized();
    out.verts.push_back(v);
    int id = static_cast<int>(out.verts.size()) - 1;
    midpoint.emplace(key, id);
    return id;
  };
  for (const auto& f : in.faces) {
    int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
    out.faces.push_back({f[0], ab, ca});
    out.faces.push_back({f[1], bc, ab});
    out.faces.push_back({f[2], ca, bc});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

SampledManifold make_sphere(int subdiv, const GeneratorParams& params) {
  IcoMesh mesh = icosahedron();
  for (int s = 0; s < subdiv; ++s) mesh = subdivide(mesh);
  const double R = params.radius;
  const int N = static_cast<int>(mesh.verts.size());

  SampledManifold M;
  M.vertices.resize(N, 3);
  M.param.resize(N, 3);
  for (int i = 0; i < N; ++i) {
    M.param.row(i) = mesh.verts[i].transpose();
    M.vertices.row(i) = R * mesh.verts[i].transpose();
  }
  // Lumped one-ring areas of the inscribed triangulation.
  M.faces.assign(mesh.faces.begin(), mesh.faces.end());
  M.weights = Vec::Zero(N);
  for (const auto& f : mesh.faces) {
    Eigen::Vector3d a = R * mesh.verts[f[0]], b = R * mesh.verts[f[1]],
                    c = R * mesh.verts[f[2]];
    const double area = 0.5 * ((b - a).cross(c - a)).norm();
    for (int v : f) M.weights(v) += area / 3.0;
  }
  M.intrinsic_dim = 2;
  M.generator = SampledManifold::Generator::sphere;
  M.gen_radius = R;
  M.label = "sphere";
  M.edges = knn_edges(M.vertices, params.k > 0 ? params.k : 12);
  fill_exact_edge_lengths(M);
  return M;
}

bool parse_doubles(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    if (!tok.empty() && tok.back() == ',') tok.pop_back();
    std::replace(tok.begin(), tok.end(), ',', ' ');
    std::istringstream ts(tok);
    double v;
    if (!(ts >> v)) return false;
    out.push_back(v);
  }
  return !out.empty();
}

SampledManifold load_csv_points(const std::string& path, const LoadParams& params) {
  std::ifstream in(path);
  if (!in) throw InputError("ingest", "cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    // commas are column separators
    std::replace(line.begin(), line.end(), ',', ' ');
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<double> vals;
    if (!parse_doubles(line, vals)) {
      if (first) { first = false; continue; } // optional header
      throw InputError("ingest", "unparseable row in " + path + ": " + line);
    }
    first = false;
    if (!rows.empty() && vals.size() != rows.front().size())
      throw InputError("ingest", "inconsistent column count in " + path);
    rows.push_back(vals);
  }
  if (static_cast<int>(rows.size()) < kMinVertices)
    throw InputError("ingest", "below minimum size: " + std::to_string(rows.size()) +
                                   " vertices (need >= " + std::to_string(kMinVertices) + ")");

  SampledManifold M;
  const int N = static_cast<int>(rows.size());
  const int D = static_cast<int>(rows.front().size());
  M.vertices.resize(N, D);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < D; ++j) M.vertices(i, j) = rows[i][j];
  M.weights = Vec::Constant(N, params.total_volume / N);
  M.intrinsic_dim = params.intrinsic_dim;
  M.label = path;
  M.edges = knn_edges(M.vertices, params.k);
  return M;
}

SampledManifold load_off_mesh(const std::string& path, const LoadParams& params) {
  std::ifstream in(path);
  if (!in) throw InputError("ingest", "cannot open file: " + path);
  std::string tok;
  if (!(in >> tok) || tok != "OFF") throw InputError("ingest", "missing OFF header in " + path);
  long nv = 0, nf = 0, ne = 0;
  if (!(in >> nv >> nf >> ne)) throw InputError("ingest", "bad OFF counts in " + path);
  if (nv < kMinVertices)
    throw InputError("ingest", "below minimum size: " + std::to_string(nv) + " vertices");

  SampledManifold M;
  M.vertices.resize(nv, 3);
  for (long i = 0; i < nv; ++i) {
    double x, y, z;
    if (!(in >> x >> y >> z)) throw InputError("ingest", "truncated OFF vertex list");
    M.vertices(i, 0) = x; M.vertices(i, 1) = y; M.vertices(i, 2) = z;
  }
  M.weights = Vec::Zero(nv);
  for (long f = 0; f < nf; ++f) {
    int k;
    if (!(in >> k) || k < 3) throw InputError("ingest", "bad OFF face record");
    std::vector<int> idx(k);
    for (int j = 0; j < k; ++j) {
      if (!(in >> idx[j]) || idx[j] < 0 || idx[j] >= nv)
        throw InputError("ingest", "OFF face index out of range");
    }
    for (int j = 1; j + 1 < k; ++j) { // fan-triangulate
      Eigen::Vector3d a = M.vertices.row(idx[0]), b = M.vertices.row(idx[j]),
                      c = M.vertices.row(idx[j + 1]);
      const double area = 0.5 * ((b - a).cross(c - a)).norm();
      M.weights(idx[0]) += area / 3.0;
      M.weights(idx[j]) += area / 3.0;
      M.weights(idx[j + 1]) += area / 3.0;
      M.faces.push_back({idx[0], idx[j], idx[j + 1]});
    }
  }
  if (M.weights.minCoeff() <= 0.0)
    throw InputError("ingest", "mesh has isolated or zero-area vertices");
  M.intrinsic_dim = 2;
  M.label = path;
  M.edges = knn_edges(M.vertices, params.k);
  return M;
}

} // namespace

std::vector<std::vector<std::pair<int, double>>> knn_edges(const Mat& vertices, int k) {
  const int N = static_cast<int>(vertices.rows());
  if (k >= N) k = N - 1;
  std::vector<std::vector<std::pair<int, double>>> edges(N);
  std::vector<std::pair<double, int>> dist(N);
  for (int p = 0; p < N; ++p) {
    for (int q = 0; q < N; ++q)
      dist[q] = {(vertices.row(q) - vertices.row(p)).norm(), q};
    dist[p].first = std::numeric_limits<double>::infinity();
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    for (int j = 0; j < k; ++j) edges[p].emplace_back(dist[j].second, dist[j].first);
  }
  // symmetrize by union
  for (int p = 0; p < N; ++p) {
    for (auto [q, len] : edges[p]) {
      bool found = false;
      for (auto& [r, l2] : edges[q])
        if (r == p) { found = true; break; }
      if (!found) edges[q].emplace_back(p, len);
    }
  }
  for (int p = 0; p < N; ++p)
    std::sort(edges[p].begin(), edges[p].end());
  return edges;
}

int count_components(const std::vector<std::vector<std::pair<int, double>>>& edges) {
  const int N = static_cast<int>(edges.size());
  std::vector<int> comp(N, -1);
  int ncomp = 0;
  for (int s = 0; s < N; ++s) {
    if (comp[s] >= 0) continue;
    std::queue<int> bfs;
    bfs.push(s);
    comp[s] = ncomp;
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop();
      for (auto [v, len] : edges[u])
        if (comp[v] < 0) { comp[v] = ncomp; bfs.push(v); }
    }
    ++ncomp;
  }
  return ncomp;
}

SampledManifold generate_manifold(const std::string& name, int resolution,
                                  const GeneratorParams& params) {
  SampledManifold M;
  if (name == "circle") {
    if (resolution < 8) throw InputError("ingest", "resolution below minimum (8)");
    M = make_circle(resolution, params);
  } else if (name == "flat_torus") {
    if (resolution < 8) throw InputError("ingest", "resolution below minimum (8)");
    M = make_flat_torus(resolution, params);
  } else if (name == "sphere") {
    if (resolution < 1) throw InputError("ingest", "sphere subdivision must be >= 1");
    M = make_sphere(resolution, params);
  } else {
    throw InputError("ingest", "unknown manifold name: " + name);
  }
  if (int nc = count_components(M.edges); nc != 1)
    throw StageError("ingest", "generated graph disconnected: " + std::to_string(nc) + " components");
  return M;
}

SampledManifold load_manifold(const std::string& path, const LoadParams& params) {
  SampledManifold M;
  if (params.format == "csv_points")
    M = load_csv_points(path, params);
  else if (params.format == "off_mesh")
    M = load_off_mesh(path, params);
  else
    throw InputError("ingest", "unknown format: " + params.format);
  if (int nc = count_components(M.edges); nc != 1)
    throw InputError("ingest", "graph disconnected: " + std::to_string(nc) + " components");
  return M;
}

double exact_pair_distance(const SampledManifold& M, int a, int b) {
  switch (M.generator) {
    case SampledManifold::Generator::circle: {
      double d = std::abs(M.param(a, 0) - M.param(b, 0));
      d = std::min(d, 2.0 * kPi - d);
      return M.gen_radius * d;
    }
    case SampledManifold::Generator::flat_torus:
      return torus_distance(M.param(a, 0) - M.param(b, 0), M.param(a, 1) - M.param(b, 1),
                            M.gen_side);
    case SampledManifold::Generator::sphere:
      return sphere_distance(M.vertices.row(a), M.vertices.row(b), M.gen_radius);
    default:
      throw StageError("ingest", "exact distances unavailable for loaded data");
  }
}

Vec graph_distance(const SampledManifold& M, int source) {
  const int N = M.num_vertices();
  Vec dist = Vec::Constant(N, std::numeric_limits<double>::infinity());
  dist(source) = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist(u)) continue;
    for (auto [v, len] : M.edges[u]) {
      const double nd = d + len;
      if (nd < dist(v)) {
        dist(v) = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return dist;
}

Vec geodesic_distance(const SampledManifold& M, int source) {
  if (M.generator == SampledManifold::Generator::none) return graph_distance(M, source);
  const int N = M.num_vertices();
  Vec dist(N);
  for (int i = 0; i < N; ++i) dist(i) = exact_pair_distance(M, source, i);
  return dist;
}

} // namespace hke
