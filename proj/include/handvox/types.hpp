#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace handvox {

using Vec3 = Eigen::Vector3d;
using Vec3f = Eigen::Vector3f;
using Mat3 = Eigen::Matrix3d;
using Index3 = std::array<int, 3>;

// Pipeline constants.
inline constexpr double kDefaultCubeSide = 300.0;
inline constexpr int kInputGridDim = 88;
inline constexpr int kHeatmapGridDim = 44;
inline constexpr int kShapeGridDim = 64;
inline constexpr int kHandVertexCount = 1193;
inline constexpr int kDefaultRingRadius = 4;

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  void validate() const;
};

// Range image in millimeters, row-major, 0 marks a missing pixel.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> depth;

  DepthMap() = default;
  DepthMap(int w, int h);

  double at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
  double& at(int u, int v) { return depth[static_cast<std::size_t>(v) * width + u]; }

  void validate() const;
};

struct PointCloud {
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct JointSet {
  std::vector<Vec3> joints;

  std::size_t size() const { return joints.size(); }
};

// Axis-aligned cube in camera space, centered on the palm.
struct CubeFrame {
  Vec3 center = Vec3::Zero();
  double side = kDefaultCubeSide;

  Vec3 min_corner() const { return center.array() - side / 2.0; }
  Vec3 max_corner() const { return center.array() + side / 2.0; }
  bool contains(const Vec3& p) const;
  void validate() const;
};

struct Triangle {
  std::array<int, 3> v{};
  bool operator==(const Triangle&) const = default;
};

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> faces;

  std::size_t vertex_count() const { return vertices.size(); }
  void validate() const;
};

// Placement of a dense cubic-voxel lattice in millimeter space.
// Linear index is (z * Dy + y) * Dx + x.
struct GridGeometry {
  Index3 dims{1, 1, 1};
  Vec3 origin = Vec3::Zero();
  double voxel_size = 1.0;

  std::size_t count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t linear(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * dims[1] + y) * dims[0] + x;
  }
  Index3 unlinear(std::size_t i) const;
  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < dims[0] && y < dims[1] && z < dims[2];
  }
  Vec3 center(int x, int y, int z) const {
    return origin + voxel_size * Vec3(x + 0.5, y + 0.5, z + 0.5);
  }
  // Continuous index coordinates, voxel (i,j,k) center at exactly (i,j,k).
  Vec3 to_index(const Vec3& p) const { return (p - origin) / voxel_size - Vec3::Constant(0.5); }
  Vec3 extent_max() const {
    return origin + voxel_size * Vec3(dims[0], dims[1], dims[2]);
  }
  bool is_cubic() const { return dims[0] == dims[1] && dims[1] == dims[2]; }
  void validate() const;

  bool operator==(const GridGeometry&) const = default;
};

// Grid whose lattice spans the given cube at dim^3 resolution.
GridGeometry frame_geometry(const CubeFrame& frame, int dim);
// Cube covered by a cubic grid.
CubeFrame geometry_frame(const GridGeometry& geometry);

enum class GridKind : std::uint8_t { Occupancy = 0, Probability = 1 };

struct VoxelGrid {
  GridGeometry geometry;
  GridKind kind = GridKind::Occupancy;
  std::vector<float> data;

  VoxelGrid() = default;
  VoxelGrid(GridGeometry g, GridKind k);

  const Index3& dims() const { return geometry.dims; }
  float at(int x, int y, int z) const { return data[geometry.linear(x, y, z)]; }
  float& at(int x, int y, int z) { return data[geometry.linear(x, y, z)]; }
  std::size_t occupied_count(float threshold = 0.5f) const;

  void validate() const;
};

// Per-voxel 3-vector field in millimeters on a cubic lattice.
struct DisplacementField {
  GridGeometry geometry;
  std::vector<Vec3f> vectors;

  DisplacementField() = default;
  explicit DisplacementField(GridGeometry g);

  Vec3f at(int x, int y, int z) const { return vectors[geometry.linear(x, y, z)]; }
  void validate() const;
};

}  // namespace handvox
