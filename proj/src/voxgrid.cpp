#include "handvox/voxgrid.hpp"

#include "handvox/error.hpp"
#include "handvox/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace handvox {

namespace {

double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) < 1e-9 ? r : x;
}

struct Corners {
  std::array<int, 3> lo{};
  std::array<double, 3> frac{};
};

Corners split(const Vec3& index) {
  Corners c;
  for (int a = 0; a < 3; ++a) {
    const double s = snap(index[a]);
    const double f = std::floor(s);
    c.lo[a] = static_cast<int>(f);
    c.frac[a] = s - f;
  }
  return c;
}

void require_inside(const CubeFrame& frame, const Vec3& p, const char* what) {
  if (!frame.contains(p)) {
    std::ostringstream msg;
    msg << what << " (" << p.x() << ", " << p.y() << ", " << p.z() << ") lies outside the cube frame";
    throw ValidationError(msg.str());
  }
}

}  // namespace

PointCloud depth_to_points(const DepthMap& depth, const CameraIntrinsics& k) {
  depth.validate();
  k.validate();
  PointCloud cloud;
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const double z = depth.at(u, v);
      if (z <= 0.0) continue;
      cloud.points.emplace_back((u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z);
    }
  }
  return cloud;
}

PointCloud crop_points(const PointCloud& cloud, const CubeFrame& frame) {
  frame.validate();
  PointCloud out;
  for (const auto& p : cloud.points) {
    if (frame.contains(p)) out.points.push_back(p);
  }
  return out;
}

Index3 voxel_index(const GridGeometry& g, const Vec3& p) {
  Index3 idx{};
  for (int a = 0; a < 3; ++a) {
    const double t = std::floor((p[a] - g.origin[a]) / g.voxel_size);
    idx[a] = static_cast<int>(std::clamp(t, 0.0, static_cast<double>(g.dims[a] - 1)));
  }
  return idx;
}

VoxelGrid voxelize_points(const PointCloud& cloud, const CubeFrame& frame, int dim) {
  VoxelGrid grid(frame_geometry(frame, dim), GridKind::Occupancy);
  for (const auto& p : cloud.points) {
    require_inside(frame, p, "point");
    const Index3 i = voxel_index(grid.geometry, p);
    grid.at(i[0], i[1], i[2]) = 1.0f;
  }
  return grid;
}

VoxelGrid voxelize_mesh(const Mesh& mesh, const CubeFrame& frame, int dim) {
  mesh.validate();
  VoxelGrid grid(frame_geometry(frame, dim), GridKind::Occupancy);
  const GridGeometry& g = grid.geometry;
  for (const auto& v : mesh.vertices) {
    require_inside(frame, v, "mesh vertex");
    const Index3 i = voxel_index(g, v);
    grid.at(i[0], i[1], i[2]) = 1.0f;
  }

  const double radius = g.voxel_size / 2.0;
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f.v[0]];
    const Vec3& b = mesh.vertices[f.v[1]];
    const Vec3& c = mesh.vertices[f.v[2]];
    const Vec3 lo = a.cwiseMin(b).cwiseMin(c).array() - radius;
    const Vec3 hi = a.cwiseMax(b).cwiseMax(c).array() + radius;
    Index3 first{}, last{};
    for (int ax = 0; ax < 3; ++ax) {
      first[ax] = std::max(0, static_cast<int>(std::ceil((lo[ax] - g.origin[ax]) / g.voxel_size - 0.5)));
      last[ax] = std::min(g.dims[ax] - 1,
                          static_cast<int>(std::floor((hi[ax] - g.origin[ax]) / g.voxel_size - 0.5)));
    }
    for (int z = first[2]; z <= last[2]; ++z) {
      for (int y = first[1]; y <= last[1]; ++y) {
        for (int x = first[0]; x <= last[0]; ++x) {
          float& cell = grid.at(x, y, z);
          if (cell != 0.0f) continue;
          if (point_triangle_distance(g.center(x, y, z), a, b, c) <= radius) cell = 1.0f;
        }
      }
    }
  }
  return grid;
}

double sample_trilinear(const VoxelGrid& grid, const Vec3& index, Boundary boundary) {
  const auto& d = grid.geometry.dims;
  const Corners c = split(index);
  double acc = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    double w = 1.0;
    int p[3];
    bool outside = false;
    for (int a = 0; a < 3; ++a) {
      const int bit = (corner >> a) & 1;
      w *= bit ? c.frac[a] : 1.0 - c.frac[a];
      p[a] = c.lo[a] + bit;
      if (p[a] < 0 || p[a] >= d[a]) {
        if (boundary == Boundary::Zero) {
          outside = true;
        } else {
          p[a] = std::clamp(p[a], 0, d[a] - 1);
        }
      }
    }
    if (w == 0.0 || outside) continue;
    acc += w * grid.at(p[0], p[1], p[2]);
  }
  return acc;
}

Vec3 sample_trilinear(const DisplacementField& field, const Vec3& index) {
  const auto& d = field.geometry.dims;
  const Corners c = split(index);
  Vec3 acc = Vec3::Zero();
  for (int corner = 0; corner < 8; ++corner) {
    double w = 1.0;
    int p[3];
    for (int a = 0; a < 3; ++a) {
      const int bit = (corner >> a) & 1;
      w *= bit ? c.frac[a] : 1.0 - c.frac[a];
      p[a] = std::clamp(c.lo[a] + bit, 0, d[a] - 1);
    }
    if (w == 0.0) continue;
    acc += w * field.at(p[0], p[1], p[2]).cast<double>();
  }
  return acc;
}

VoxelGrid resize_grid(const VoxelGrid& grid, int dim) {
  if (dim < 1) throw ValidationError("resize: target dimension must be >= 1");
  grid.validate();
  if (!grid.geometry.is_cubic()) throw ValidationError("resize: grid must be cubic");

  const int src = grid.geometry.dims[0];
  GridGeometry g;
  g.dims = {dim, dim, dim};
  g.origin = grid.geometry.origin;
  g.voxel_size = grid.geometry.voxel_size * src / dim;
  VoxelGrid out(g, grid.kind);

  const double ratio = static_cast<double>(src) / dim;
  auto map = [ratio](int i) { return (i + 0.5) * ratio - 0.5; };
  for (int z = 0; z < dim; ++z) {
    for (int y = 0; y < dim; ++y) {
      for (int x = 0; x < dim; ++x) {
        const double v = sample_trilinear(grid, Vec3(map(x), map(y), map(z)), Boundary::Clamp);
        out.at(x, y, z) = grid.kind == GridKind::Occupancy ? (v >= 0.5 ? 1.0f : 0.0f)
                                                           : static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return out;
}

PointCloud grid_to_points(const VoxelGrid& grid, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ValidationError("grid_to_points: threshold must lie in [0,1]");
  PointCloud cloud;
  const auto& g = grid.geometry;
  for (std::size_t i = 0; i < grid.data.size(); ++i) {
    if (grid.data[i] >= threshold) {
      const Index3 p = g.unlinear(i);
      cloud.points.push_back(g.center(p[0], p[1], p[2]));
    }
  }
  return cloud;
}

Mesh normalize_vertices(const Mesh& mesh, const CubeFrame& frame) {
  frame.validate();
  Mesh out = mesh;
  const double half = frame.side / 2.0;
  for (auto& v : out.vertices) v = (v - frame.center) / half;
  return out;
}

Mesh denormalize_vertices(const Mesh& mesh, const CubeFrame& frame) {
  frame.validate();
  Mesh out = mesh;
  const double half = frame.side / 2.0;
  for (auto& v : out.vertices) v = v * half + frame.center;
  return out;
}

}  // namespace handvox
