#pragma once

#include "handvox/heatmap.hpp"
#include "handvox/types.hpp"

#include <vector>

namespace handvox {

// Probability clamp used by the cross-entropy terms.
inline constexpr double kBceEpsilon = 1e-7;

struct LossReport {
  double value = 0.0;
  std::vector<double> per_element;
};

struct SampleFlag {
  bool is_synthetic = false;
};

// Mean per-voxel binary cross entropy; gt is thresholded occupancy, pred is
// clamped to [eps, 1 - eps].
LossReport bce_voxel(const VoxelGrid& pred, const VoxelGrid& gt);

// 0.5 * sum_k |pred_k - gt_k|^2 (callers pass normalized vertices).
LossReport euclidean_vertex_loss(const Mesh& pred, const Mesh& gt);

// (1/Q^3) * sum over voxels of |pred - gt|^2.
LossReport displacement_loss(const DisplacementField& pred, const DisplacementField& gt);

// Mean voxelwise squared difference across a whole heatmap stack.
LossReport heatmap_loss(const HeatmapStack& pred, const HeatmapStack& gt);

// Mean Euclidean distance over joints, in mm.
double joint_error(const JointSet& pred, const JointSet& gt);

// Mean Euclidean distance over vertices, in mm.
double vertex_error(const Mesh& pred, const Mesh& gt);

// Mean voxelized shape error; identical to bce_voxel.
double shape_error(const VoxelGrid& pred, const VoxelGrid& gt);

struct LossParts {
  double heatmap = 0.0;             // pose heatmaps
  double shape = 0.0;               // voxelized shape, synthetic only
  double surface = 0.0;             // shape surface vertices, synthetic only
  double depth_from_voxels = 0.0;   // depth-map synthesis from voxelized shape
  double depth_from_surface = 0.0;  // depth-map synthesis from surface
};

// heatmap + [synthetic](shape + surface) + depth_from_voxels + depth_from_surface.
LossReport total_loss(const LossParts& parts, SampleFlag flag);

}  // namespace handvox
