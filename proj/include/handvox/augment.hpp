#pragma once

#include "handvox/heatmap.hpp"
#include "handvox/types.hpp"

#include <cstdint>

namespace handvox {

// Legal ranges for random augmentation.
inline constexpr double kMaxTiltDegrees = 40.0;   // about x and y
inline constexpr double kMaxSpinDegrees = 120.0;  // about z
inline constexpr double kMinScale = 0.8;
inline constexpr double kMaxScale = 1.2;
inline constexpr double kMaxShiftVoxels = 8.0;

struct AugmentParams {
  double theta_x = 0.0;  // degrees
  double theta_y = 0.0;
  double theta_z = 0.0;
  double scale = 1.0;
  Vec3 translation = Vec3::Zero();  // voxels

  bool in_range() const;
};

// Uniform draw of every field over its legal range; deterministic per seed.
AugmentParams sample_params(std::uint64_t seed);

// Right-handed elementary rotations, angle in degrees.
Mat3 rot_x(double degrees);
Mat3 rot_y(double degrees);
Mat3 rot_z(double degrees);

// Rot_x(theta_x) * Rot_y(theta_y) * Rot_z(theta_z).
Mat3 rotation_matrix(const AugmentParams& p);

// Similarity about the grid center in voxel units:
//   q = scale * R * (x - c) + c + translation.
struct GridTransform {
  Mat3 rotation = Mat3::Identity();
  double scale = 1.0;
  Vec3 translation = Vec3::Zero();

  static GridTransform from_params(const AugmentParams& p);
  GridTransform inverse() const;
  bool is_identity() const;
};

// Inverse-warped trilinear resampling; samples outside the grid read 0 and
// occupancy output is re-thresholded at 0.5. Requires a cubic grid.
VoxelGrid transform_grid(const VoxelGrid& grid, const GridTransform& t);
VoxelGrid transform_grid(const VoxelGrid& grid, const AugmentParams& p);

HeatmapStack transform_heatmaps(const HeatmapStack& stack, const AugmentParams& p);

struct TransformedJoints {
  JointSet joints;
  bool inside_frame = true;  // false if any joint left the cube
};

// The same similarity applied in millimeters about the frame center, with the
// translation converted from voxels using the grid's voxel size (side / dim).
TransformedJoints transform_joints(const JointSet& joints, const CubeFrame& frame, int dim,
                                   const GridTransform& t);
TransformedJoints transform_joints(const JointSet& joints, const CubeFrame& frame, int dim,
                                   const AugmentParams& p);

}  // namespace handvox
