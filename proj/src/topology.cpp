#include "handvox/error.hpp"
#include "handvox/geometry.hpp"
#include "handvox/register.hpp"

#include <algorithm>
#include <cmath>

namespace handvox {

std::vector<int> RingAdjacency::isolated() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    if (rings[i].empty()) out.push_back(static_cast<int>(i));
  }
  return out;
}

RingAdjacency build_rings(const Mesh& mesh, int hops) {
  if (hops < 0) throw ValidationError("rings: hop count must be >= 0");
  mesh.validate();
  const int k = static_cast<int>(mesh.vertex_count());

  std::vector<std::vector<int>> adjacent(k);
  for (const auto& [a, b] : edge_list(mesh)) {
    adjacent[a].push_back(b);
    adjacent[b].push_back(a);
  }

  RingAdjacency out;
  out.radius = hops;
  out.rings.resize(k);
  std::vector<int> depth(k, -1);
  std::vector<int> frontier, next, touched;
  for (int s = 0; s < k; ++s) {
    touched.assign(1, s);
    depth[s] = 0;
    frontier.assign(1, s);
    for (int d = 1; d <= hops && !frontier.empty(); ++d) {
      next.clear();
      for (int u : frontier) {
        for (int w : adjacent[u]) {
          if (depth[w] >= 0) continue;
          depth[w] = d;
          touched.push_back(w);
          next.push_back(w);
        }
      }
      frontier.swap(next);
    }
    auto& ring = out.rings[s];
    ring.assign(touched.begin() + 1, touched.end());
    std::sort(ring.begin(), ring.end());
    for (int t : touched) depth[t] = -1;
  }
  return out;
}

double laplacian_energy(const Mesh& mesh, const RingAdjacency& one_ring) {
  double energy = 0.0;
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    const auto& nb = one_ring.rings[i];
    if (nb.empty()) continue;
    Vec3 mean = Vec3::Zero();
    for (int j : nb) mean += mesh.vertices[j];
    mean /= static_cast<double>(nb.size());
    energy += (mesh.vertices[i] - mean).squaredNorm();
  }
  return energy;
}

double laplacian_energy(const Mesh& mesh) { return laplacian_energy(mesh, build_rings(mesh, 1)); }

Mesh laplacian_smooth(const Mesh& mesh, int iterations, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ValidationError("laplacian smoothing: lambda must lie in (0,1]");
  if (iterations < 0) throw ValidationError("laplacian smoothing: iterations must be >= 0");
  const RingAdjacency one_ring = build_rings(mesh, 1);

  Mesh out = mesh;
  std::vector<Vec3> next(out.vertices.size());
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < out.vertices.size(); ++i) {
      const auto& nb = one_ring.rings[i];
      if (nb.empty()) {
        next[i] = out.vertices[i];
        continue;
      }
      Vec3 mean = Vec3::Zero();
      for (int j : nb) mean += out.vertices[j];
      mean /= static_cast<double>(nb.size());
      next[i] = out.vertices[i] + lambda * (mean - out.vertices[i]);
    }
    out.vertices.swap(next);
  }
  return out;
}

}  // namespace handvox
