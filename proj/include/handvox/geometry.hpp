#pragma once

#include "handvox/types.hpp"

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace handvox {

// Closest point on triangle abc to p (Voronoi-region walk).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Area-weighted vertex normals; isolated vertices get the zero vector.
std::vector<Vec3> vertex_normals(const Mesh& mesh);

// Undirected edges (i < j), sorted and unique.
std::vector<std::pair<int, int>> edge_list(const Mesh& mesh);

Vec3 centroid(const std::vector<Vec3>& points);

// Nearest orthonormal matrix with det +1 (polar factor via SVD).
Mat3 orthonormalize(const Mat3& m);

// Largest absolute entry of R^T R - I.
double orthonormality_error(const Mat3& r);

// Seeded generator with a platform-independent uniform draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [lo, hi].
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  std::uint64_t next() { return engine_(); }
  // Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace handvox
