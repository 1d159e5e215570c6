#include "handvox/heatmap.hpp"

#include "handvox/error.hpp"

#include <cmath>
#include <sstream>

namespace handvox {

void HeatmapStack::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("heatmaps: sigma must be positive");
  for (std::size_t n = 0; n < maps.size(); ++n) {
    maps[n].validate();
    if (maps[n].kind != GridKind::Probability) throw ValidationError("heatmaps: maps must be probability grids");
    if (!(maps[n].geometry == maps.front().geometry)) {
      throw ValidationError("heatmaps: all maps must share one grid geometry");
    }
  }
}

HeatmapStack make_heatmaps(const JointSet& joints, const CubeFrame& frame, int dim, double sigma) {
  const GridGeometry g = frame_geometry(frame, dim);
  if (sigma <= 0.0) sigma = kDefaultSigmaVoxels * g.voxel_size;
  if (!std::isfinite(sigma)) throw ValidationError("heatmaps: sigma must be finite");

  HeatmapStack stack;
  stack.sigma = sigma;
  stack.maps.reserve(joints.size());
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t n = 0; n < joints.size(); ++n) {
    const Vec3& j = joints.joints[n];
    if (!j.allFinite() || !frame.contains(j)) {
      std::ostringstream msg;
      msg << "heatmaps: joint " << n << " lies outside the cube frame";
      throw ValidationError(msg.str());
    }
    VoxelGrid map(g, GridKind::Probability);
    for (int z = 0; z < dim; ++z) {
      for (int y = 0; y < dim; ++y) {
        for (int x = 0; x < dim; ++x) {
          map.at(x, y, z) = static_cast<float>(std::exp(-(g.center(x, y, z) - j).squaredNorm() * inv));
        }
      }
    }
    stack.maps.push_back(std::move(map));
  }
  return stack;
}

JointSet decode_heatmaps(const HeatmapStack& stack) {
  JointSet out;
  out.joints.reserve(stack.size());
  for (std::size_t n = 0; n < stack.size(); ++n) {
    const VoxelGrid& map = stack.maps[n];
    const GridGeometry& g = map.geometry;
    std::size_t best = 0;
    for (std::size_t i = 1; i < map.data.size(); ++i) {
      if (map.data[i] > map.data[best]) best = i;
    }
    if (!(map.data[best] > 0.0f)) {
      std::ostringstream msg;
      msg << "heatmaps: map " << n << " has no positive value";
      throw ValidationError(msg.str());
    }
    const Index3 peak = g.unlinear(best);
    Vec3 sum = Vec3::Zero();
    double weight = 0.0;
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int x = peak[0] + dx, y = peak[1] + dy, z = peak[2] + dz;
          if (!g.in_bounds(x, y, z)) continue;
          const double w = map.at(x, y, z);
          sum += w * g.center(x, y, z);
          weight += w;
        }
      }
    }
    out.joints.push_back(sum / weight);
  }
  return out;
}

}  // namespace handvox
