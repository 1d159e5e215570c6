#include "handvox/augment.hpp"

#include "handvox/error.hpp"
#include "handvox/geometry.hpp"
#include "handvox/voxgrid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace handvox {

namespace {

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

}  // namespace

bool AugmentParams::in_range() const {
  auto within = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  return within(theta_x, -kMaxTiltDegrees, kMaxTiltDegrees) &&
         within(theta_y, -kMaxTiltDegrees, kMaxTiltDegrees) &&
         within(theta_z, -kMaxSpinDegrees, kMaxSpinDegrees) && within(scale, kMinScale, kMaxScale) &&
         within(translation.x(), -kMaxShiftVoxels, kMaxShiftVoxels) &&
         within(translation.y(), -kMaxShiftVoxels, kMaxShiftVoxels) &&
         within(translation.z(), -kMaxShiftVoxels, kMaxShiftVoxels);
}

AugmentParams sample_params(std::uint64_t seed) {
  Rng rng(seed);
  AugmentParams p;
  p.theta_x = rng.uniform(-kMaxTiltDegrees, kMaxTiltDegrees);
  p.theta_y = rng.uniform(-kMaxTiltDegrees, kMaxTiltDegrees);
  p.theta_z = rng.uniform(-kMaxSpinDegrees, kMaxSpinDegrees);
  p.scale = rng.uniform(kMinScale, kMaxScale);
  for (int a = 0; a < 3; ++a) p.translation[a] = rng.uniform(-kMaxShiftVoxels, kMaxShiftVoxels);
  return p;
}

Mat3 rot_x(double degrees) {
  const double c = std::cos(radians(degrees)), s = std::sin(radians(degrees));
  Mat3 r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

Mat3 rot_y(double degrees) {
  const double c = std::cos(radians(degrees)), s = std::sin(radians(degrees));
  Mat3 r;
  r << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return r;
}

Mat3 rot_z(double degrees) {
  const double c = std::cos(radians(degrees)), s = std::sin(radians(degrees));
  Mat3 r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

Mat3 rotation_matrix(const AugmentParams& p) {
  return rot_x(p.theta_x) * rot_y(p.theta_y) * rot_z(p.theta_z);
}

GridTransform GridTransform::from_params(const AugmentParams& p) {
  if (!(p.scale > 0.0) || !std::isfinite(p.scale)) throw ValidationError("augment: scale must be positive");
  return {rotation_matrix(p), p.scale, p.translation};
}

GridTransform GridTransform::inverse() const {
  GridTransform inv;
  inv.rotation = rotation.transpose();
  inv.scale = 1.0 / scale;
  inv.translation = -(inv.rotation * translation) / scale;
  return inv;
}

bool GridTransform::is_identity() const {
  return rotation == Mat3::Identity() && scale == 1.0 && translation == Vec3::Zero();
}

VoxelGrid transform_grid(const VoxelGrid& grid, const GridTransform& t) {
  grid.validate();
  if (!grid.geometry.is_cubic()) throw ValidationError("augment: grid must be cubic");
  if (t.is_identity()) return grid;

  const int dim = grid.geometry.dims[0];
  const double c = (dim - 1) / 2.0;
  const Vec3 center = Vec3::Constant(c);
  // x = R^T (q - c - t) / s + c
  const Mat3 back = t.rotation.transpose() / t.scale;
  const Vec3 shift = center + t.translation;

  VoxelGrid out(grid.geometry, grid.kind);
  for (int z = 0; z < dim; ++z) {
    for (int y = 0; y < dim; ++y) {
      for (int x = 0; x < dim; ++x) {
        const Vec3 src = back * (Vec3(x, y, z) - shift) + center;
        const double v = sample_trilinear(grid, src, Boundary::Zero);
        out.at(x, y, z) = grid.kind == GridKind::Occupancy ? (v >= 0.5 ? 1.0f : 0.0f)
                                                           : static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return out;
}

VoxelGrid transform_grid(const VoxelGrid& grid, const AugmentParams& p) {
  return transform_grid(grid, GridTransform::from_params(p));
}

HeatmapStack transform_heatmaps(const HeatmapStack& stack, const AugmentParams& p) {
  const GridTransform t = GridTransform::from_params(p);
  HeatmapStack out;
  out.sigma = stack.sigma;
  out.maps.reserve(stack.size());
  for (const auto& m : stack.maps) out.maps.push_back(transform_grid(m, t));
  return out;
}

TransformedJoints transform_joints(const JointSet& joints, const CubeFrame& frame, int dim,
                                   const GridTransform& t) {
  frame.validate();
  if (dim < 1) throw ValidationError("augment: grid dimension must be >= 1");
  const double voxel = frame.side / dim;
  TransformedJoints out;
  out.joints.joints.reserve(joints.size());
  for (std::size_t n = 0; n < joints.size(); ++n) {
    const Vec3& j = joints.joints[n];
    if (!frame.contains(j)) {
      std::ostringstream msg;
      msg << "augment: joint " << n << " lies outside the cube frame";
      throw ValidationError(msg.str());
    }
    if (t.is_identity()) {
      out.joints.joints.push_back(j);
      continue;
    }
    const Vec3 moved = t.scale * (t.rotation * (j - frame.center)) + frame.center + voxel * t.translation;
    if (!frame.contains(moved)) out.inside_frame = false;
    out.joints.joints.push_back(moved);
  }
  return out;
}

TransformedJoints transform_joints(const JointSet& joints, const CubeFrame& frame, int dim,
                                   const AugmentParams& p) {
  return transform_joints(joints, frame, dim, GridTransform::from_params(p));
}

}  // namespace handvox
