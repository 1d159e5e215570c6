#pragma once

#include "handvox/types.hpp"

#include <vector>

namespace handvox {

// Ratio of the default Gaussian width to the voxel edge.
inline constexpr double kDefaultSigmaVoxels = 1.7;

// One Probability grid per joint, all sharing geometry.
struct HeatmapStack {
  std::vector<VoxelGrid> maps;
  double sigma = 0.0;  // mm

  std::size_t size() const { return maps.size(); }
  void validate() const;
};

// Peak-valued Gaussians exp(-|c - j|^2 / (2 sigma^2)) sampled at voxel centers.
// sigma <= 0 selects kDefaultSigmaVoxels * voxel_size.
HeatmapStack make_heatmaps(const JointSet& joints, const CubeFrame& frame, int dim = kHeatmapGridDim,
                           double sigma = 0.0);

// Value-weighted centroid over the 3x3x3 window around each map's argmax
// (first maximum in linear order wins).
JointSet decode_heatmaps(const HeatmapStack& stack);

}  // namespace handvox
