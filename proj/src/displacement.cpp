#include "handvox/error.hpp"
#include "handvox/register.hpp"
#include "handvox/voxgrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace handvox {

namespace {

// Visits every lattice cell at Chebyshev distance exactly r from c.
template <typename Fn>
void for_each_in_shell(const Index3& c, int r, const Index3& dims, Fn&& fn) {
  for (int dz = -r; dz <= r; ++dz) {
    const int z = c[2] + dz;
    if (z < 0 || z >= dims[2]) continue;
    for (int dy = -r; dy <= r; ++dy) {
      const int y = c[1] + dy;
      if (y < 0 || y >= dims[1]) continue;
      const bool face = std::abs(dz) == r || std::abs(dy) == r;
      const int step = face || r == 0 ? 1 : 2 * r;
      for (int dx = -r; dx <= r; dx += step) {
        const int x = c[0] + dx;
        if (x < 0 || x >= dims[0]) continue;
        fn(x, y, z);
      }
    }
  }
}

int max_shell(const Index3& dims) { return std::max({dims[0], dims[1], dims[2]}); }

}  // namespace

DisplacementField gt_displacement_field(const Mesh& gt_mesh, const Mesh& pred_mesh, const CubeFrame& frame,
                                        int q) {
  if (gt_mesh.vertex_count() != pred_mesh.vertex_count()) {
    throw ValidationError("gt displacement: vertex counts differ");
  }
  DisplacementField field(frame_geometry(frame, q));
  std::vector<Vec3> sum(field.geometry.count(), Vec3::Zero());
  std::vector<int> hits(field.geometry.count(), 0);
  for (std::size_t k = 0; k < pred_mesh.vertex_count(); ++k) {
    const Vec3& p = pred_mesh.vertices[k];
    if (!p.allFinite() || !frame.contains(p)) {
      std::ostringstream msg;
      msg << "gt displacement: predicted vertex " << k << " lies outside the cube frame";
      throw ValidationError(msg.str());
    }
    const Index3 i = voxel_index(field.geometry, p);
    const std::size_t l = field.geometry.linear(i[0], i[1], i[2]);
    sum[l] += gt_mesh.vertices[k] - p;
    ++hits[l];
  }
  for (std::size_t l = 0; l < sum.size(); ++l) {
    if (hits[l] > 0) field.vectors[l] = (sum[l] / hits[l]).cast<float>();
  }
  return field;
}

DisplacementField estimate_displacement_field(const VoxelGrid& source, const VoxelGrid& target,
                                              const DisplacementOptions& options) {
  source.geometry.validate();
  if (!source.geometry.is_cubic()) throw ValidationError("displacement estimate: grids must be cubic");
  if (source.geometry.dims != target.geometry.dims) {
    throw ValidationError("displacement estimate: source and target dimensions differ");
  }
  if (!(options.correspondence_radius_voxels >= 0.0)) {
    throw ValidationError("displacement estimate: correspondence radius must be >= 0");
  }
  if (source.occupied_count(options.threshold) == 0) throw ValidationError("displacement estimate: empty source grid");
  if (target.occupied_count(options.threshold) == 0) throw ValidationError("displacement estimate: empty target grid");

  const GridGeometry& g = source.geometry;
  DisplacementField field(g);
  const double r = options.correspondence_radius_voxels;
  const double r2 = r * r;
  const int reach = static_cast<int>(std::floor(r));
  const int shells = max_shell(g.dims);

  for (std::size_t l = 0; l < source.data.size(); ++l) {
    if (source.data[l] < options.threshold) continue;
    const Index3 s = g.unlinear(l);

    Vec3 sum = Vec3::Zero();
    int count = 0;
    for (int dz = -reach; dz <= reach; ++dz) {
      for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
          const int x = s[0] + dx, y = s[1] + dy, z = s[2] + dz;
          if (!g.in_bounds(x, y, z) || dx * dx + dy * dy + dz * dz > r2) continue;
          if (target.at(x, y, z) < options.threshold) continue;
          sum += Vec3(dx, dy, dz);
          ++count;
        }
      }
    }

    Vec3 offset;
    if (count > 0) {
      offset = sum / count;
    } else {
      long best_d2 = std::numeric_limits<long>::max();
      std::size_t best_l = 0;
      Index3 best{};
      for (int shell = 1; shell <= shells; ++shell) {
        for_each_in_shell(s, shell, g.dims, [&](int x, int y, int z) {
          if (target.at(x, y, z) < options.threshold) return;
          const long dx = x - s[0], dy = y - s[1], dz = z - s[2];
          const long d2 = dx * dx + dy * dy + dz * dz;
          const std::size_t tl = g.linear(x, y, z);
          if (d2 < best_d2 || (d2 == best_d2 && tl < best_l)) {
            best_d2 = d2;
            best_l = tl;
            best = {x, y, z};
          }
        });
        // Unvisited cells are at least shell + 1 away.
        if (best_d2 <= static_cast<long>(shell + 1) * (shell + 1)) break;
      }
      offset = Vec3(best[0] - s[0], best[1] - s[1], best[2] - s[2]);
    }
    field.vectors[l] = (offset * g.voxel_size).cast<float>();
  }
  return field;
}

Mesh apply_field(const Mesh& mesh, const DisplacementField& field) {
  field.validate();
  const Vec3 lo = field.geometry.origin;
  const Vec3 hi = field.geometry.extent_max();
  Mesh out = mesh;
  for (std::size_t k = 0; k < out.vertex_count(); ++k) {
    const Vec3& p = mesh.vertices[k];
    if (!p.allFinite() || (p.array() < lo.array()).any() || (p.array() > hi.array()).any()) {
      std::ostringstream msg;
      msg << "apply field: vertex " << k << " lies outside the field extent";
      throw ValidationError(msg.str());
    }
    out.vertices[k] = p + sample_trilinear(field, field.geometry.to_index(p));
  }
  return out;
}

double mean_distance_to_occupied(const Mesh& mesh, const VoxelGrid& grid, float threshold) {
  if (grid.occupied_count(threshold) == 0) throw ValidationError("target distance: grid has no occupied voxel");
  if (mesh.vertices.empty()) return 0.0;
  const GridGeometry& g = grid.geometry;
  const int shells = max_shell(g.dims);
  double total = 0.0;
  for (const auto& p : mesh.vertices) {
    const Index3 c = voxel_index(g, p);
    double best = std::numeric_limits<double>::infinity();
    for (int shell = 0; shell <= shells; ++shell) {
      for_each_in_shell(c, shell, g.dims, [&](int x, int y, int z) {
        if (grid.at(x, y, z) < threshold) return;
        best = std::min(best, (g.center(x, y, z) - p).squaredNorm());
      });
      // Cells in the next shell are at least (shell + 0.5) voxels from p.
      const double bound = (shell + 0.5) * g.voxel_size;
      if (best <= bound * bound) break;
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(mesh.vertices.size());
}

}  // namespace handvox
