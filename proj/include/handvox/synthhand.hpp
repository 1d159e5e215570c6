#pragma once

#include "handvox/types.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace handvox {

inline constexpr int kHandJointCount = 21;
inline constexpr int kFingerCount = 5;

// Joint layout: 0 = wrist, then for finger f in (thumb, index, middle, ring,
// pinky) the joints 1+4f .. 4+4f are (metacarpal, proximal, intermediate, tip).
inline constexpr int finger_joint(int finger, int level) { return 1 + 4 * finger + level; }

struct FingerPose {
  double mcp_flexion = 0.0;  // degrees
  double mcp_abduction = 0.0;
  double pip_flexion = 0.0;
  double dip_flexion = 0.0;
};

struct PoseParams {
  std::array<FingerPose, kFingerCount> fingers{};
  Vec3 root_rotation = Vec3::Zero();     // degrees about x, y, z (applied z first)
  Vec3 root_translation = Vec3::Zero();  // mm
};

struct AngleRange {
  double lo;
  double hi;
};

struct FingerLimits {
  AngleRange mcp_flexion;
  AngleRange mcp_abduction;
  AngleRange pip_flexion;
  AngleRange dip_flexion;
};

inline constexpr FingerLimits kThumbLimits{{-10, 60}, {-30, 30}, {0, 70}, {0, 80}};
inline constexpr FingerLimits kFingerLimits{{-10, 90}, {-20, 20}, {0, 100}, {0, 80}};
inline constexpr double kRootRotationLimit = 30.0;     // degrees, per axis
inline constexpr double kRootTranslationLimit = 20.0;  // mm, per axis

const FingerLimits& finger_limits(int finger);
bool within_limits(const PoseParams& p);

// Articulated capsule hand: 21-joint skeleton and a 1193-vertex surface made of
// a palm ellipsoid and one capped tube per finger.
struct HandModel {
  std::array<Vec3, kHandJointCount> rest_joints{};
  std::array<int, kHandJointCount> parent{};  // -1 for the wrist
  Mesh surface;
  // Bone driving each vertex, named by the bone's child joint; 0 = wrist/root.
  std::vector<int> vertex_bone;

  static const HandModel& standard();
  double bone_length(int joint) const;
};

struct PosedHand {
  Mesh mesh;
  JointSet joints;
};

// Seed 0 is the rest pose; any other seed draws every angle uniformly within
// its limits plus a bounded global rotation and translation.
PoseParams sample_pose(std::uint64_t seed);

// Forward kinematics over the joint tree with rigid per-bone skinning.
PosedHand pose_hand(const HandModel& model, const PoseParams& p);

// Mean of the wrist and the five metacarpal joints.
Vec3 palm_center(const JointSet& joints21);

// The 21 joints followed by the palm center.
JointSet joints22(const JointSet& joints21);

// Z-buffered point-splat rendering: every face is sampled on a barycentric
// lattice with spacing <= sample_spacing (mm); pixel (u,v) receives the depth
// of the nearest sample projecting to it. Throws if any vertex has z <= 0.
DepthMap render_depth(const Mesh& mesh, const CameraIntrinsics& k, int width, int height,
                      double sample_spacing = 0.5);

// Smooth displacement along vertex normals, a(x) n(x), where a is a sum of
// low-frequency sinusoids scaled so that mean |a| equals mean_amplitude.
// Inward moves saturate at half the local thickness (measured along -n), so
// thin parts never fold through themselves.
Mesh perturb_surface(const Mesh& mesh, std::uint64_t seed, double mean_amplitude);

// Camera used by the synthetic pipeline.
CameraIntrinsics default_camera();
inline constexpr int kDefaultImageWidth = 640;
inline constexpr int kDefaultImageHeight = 480;
// Offset that places the rest-pose palm in front of default_camera().
Vec3 default_hand_placement();

}  // namespace handvox
