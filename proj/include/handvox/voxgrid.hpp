#pragma once

#include "handvox/types.hpp"

namespace handvox {

// Pinhole back-projection of every pixel with depth > 0.
PointCloud depth_to_points(const DepthMap& depth, const CameraIntrinsics& k);

// Points whose coordinates all lie in the closed cube.
PointCloud crop_points(const PointCloud& cloud, const CubeFrame& frame);

// floor((p - origin) / voxel_size) per axis, clamped into the lattice.
Index3 voxel_index(const GridGeometry& geometry, const Vec3& p);

// Occupancy grid of dim^3 voxels spanning the frame. Throws ValidationError
// if a point lies outside the frame; crop first.
VoxelGrid voxelize_points(const PointCloud& cloud, const CubeFrame& frame, int dim);

// Surface (shell) voxelization: a voxel is occupied iff its center is within
// voxel_size/2 of some face, or it contains a vertex.
VoxelGrid voxelize_mesh(const Mesh& mesh, const CubeFrame& frame, int dim = kShapeGridDim);

// Trilinear resampling onto dim^3 voxels covering the same cube. Occupancy
// grids are re-thresholded at 0.5 (ties occupied).
VoxelGrid resize_grid(const VoxelGrid& grid, int dim);

// Centers of voxels whose value is >= threshold.
PointCloud grid_to_points(const VoxelGrid& grid, double threshold);

Mesh normalize_vertices(const Mesh& mesh, const CubeFrame& frame);
Mesh denormalize_vertices(const Mesh& mesh, const CubeFrame& frame);

enum class Boundary { Zero, Clamp };

// Trilinear sample at a continuous index coordinate (voxel (i,j,k) center is
// at exactly (i,j,k)). Coordinates within 1e-9 of an integer are snapped so
// lattice-aligned resampling reproduces input values exactly.
double sample_trilinear(const VoxelGrid& grid, const Vec3& index, Boundary boundary);

// Same interpolation over a vector field; always clamps at the border.
Vec3 sample_trilinear(const DisplacementField& field, const Vec3& index);

}  // namespace handvox
