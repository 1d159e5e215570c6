#include "handvox/synthhand.hpp"

#include "handvox/error.hpp"
#include "handvox/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace handvox {

namespace {

constexpr double kPi = std::numbers::pi;

// Palm ellipsoid: latitude rings x slices plus two poles.
constexpr int kPalmRings = 13;
constexpr int kPalmSlices = 22;
const Vec3 kPalmCenter(0.0, 48.0, 0.0);
const Vec3 kPalmAxes(40.0, 50.0, 14.0);

// Finger tubes: rings along the bones, rings on the tip cap, one pole.
constexpr int kTubeSlices = 10;
constexpr int kTubeRings = 15;
constexpr std::array<double, 3> kCapAngles{30.0, 55.0, 75.0};

// Palm normal at rest; the palm faces the camera.
const Vec3 kPalmNormal(0.0, 0.0, -1.0);

struct FingerSpec {
  Vec3 base;
  Vec3 direction;
  std::array<double, 3> lengths;
  double radius;
};

const std::array<FingerSpec, kFingerCount>& finger_specs() {
  static const std::array<FingerSpec, kFingerCount> specs{{
      {{-30.0, 22.0, -4.0}, Vec3(-0.55, 0.8, -0.2).normalized(), {38.0, 32.0, 27.0}, 10.0},
      {{-27.0, 85.0, 0.0}, Vec3(-0.08, 1.0, 0.0).normalized(), {40.0, 25.0, 20.0}, 8.5},
      {{-9.0, 90.0, 0.0}, Vec3(0.0, 1.0, 0.0), {45.0, 28.0, 22.0}, 8.5},
      {{9.0, 86.0, 0.0}, Vec3(0.06, 1.0, 0.0).normalized(), {42.0, 26.0, 21.0}, 8.0},
      {{25.0, 78.0, 0.0}, Vec3(0.14, 1.0, 0.0).normalized(), {33.0, 20.0, 18.0}, 7.0},
  }};
  return specs;
}

Mat3 axis_rotation(const Vec3& axis, double degrees) {
  return Eigen::AngleAxisd(degrees * kPi / 180.0, axis.normalized()).toRotationMatrix();
}

Mat3 root_rotation_matrix(const Vec3& degrees) {
  return axis_rotation(Vec3::UnitX(), degrees.x()) * axis_rotation(Vec3::UnitY(), degrees.y()) *
         axis_rotation(Vec3::UnitZ(), degrees.z());
}

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

void add_quad(Mesh& m, int a, int b, int c, int d) {
  m.faces.push_back({{a, b, c}});
  m.faces.push_back({{a, c, d}});
}

// Flips faces whose normal points toward `inside(face centroid)`.
template <typename InsideFn>
void orient_outward(Mesh& m, std::size_t first_face, InsideFn&& inside) {
  for (std::size_t f = first_face; f < m.faces.size(); ++f) {
    auto& t = m.faces[f].v;
    const Vec3& a = m.vertices[t[0]];
    const Vec3& b = m.vertices[t[1]];
    const Vec3& c = m.vertices[t[2]];
    const Vec3 centroid = (a + b + c) / 3.0;
    if ((b - a).cross(c - a).dot(centroid - inside(centroid)) < 0.0) std::swap(t[1], t[2]);
  }
}

void build_palm(HandModel& h) {
  Mesh& m = h.surface;
  const std::size_t first_face = m.faces.size();
  const int south = static_cast<int>(m.vertices.size());
  m.vertices.push_back(kPalmCenter - Vec3(0.0, kPalmAxes.y(), 0.0));
  const int ring0 = static_cast<int>(m.vertices.size());
  for (int i = 1; i <= kPalmRings; ++i) {
    const double theta = kPi * i / (kPalmRings + 1);
    for (int j = 0; j < kPalmSlices; ++j) {
      const double phi = 2.0 * kPi * j / kPalmSlices;
      m.vertices.push_back(kPalmCenter + Vec3(kPalmAxes.x() * std::sin(theta) * std::cos(phi),
                                              -kPalmAxes.y() * std::cos(theta),
                                              kPalmAxes.z() * std::sin(theta) * std::sin(phi)));
    }
  }
  const int north = static_cast<int>(m.vertices.size());
  m.vertices.push_back(kPalmCenter + Vec3(0.0, kPalmAxes.y(), 0.0));

  auto at = [&](int ring, int slice) { return ring0 + ring * kPalmSlices + (slice % kPalmSlices); };
  for (int j = 0; j < kPalmSlices; ++j) {
    m.faces.push_back({{south, at(0, j), at(0, j + 1)}});
    m.faces.push_back({{north, at(kPalmRings - 1, j + 1), at(kPalmRings - 1, j)}});
  }
  for (int i = 0; i + 1 < kPalmRings; ++i) {
    for (int j = 0; j < kPalmSlices; ++j) add_quad(m, at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
  }
  orient_outward(m, first_face, [](const Vec3&) { return kPalmCenter; });
  h.vertex_bone.resize(m.vertices.size(), 0);
}

void build_finger(HandModel& h, int finger) {
  const FingerSpec& s = finger_specs()[finger];
  Mesh& m = h.surface;
  const std::size_t first_face = m.faces.size();
  const int first_vertex = static_cast<int>(m.vertices.size());

  const double total = s.lengths[0] + s.lengths[1] + s.lengths[2];
  const Vec3 u = s.direction.cross(kPalmNormal).normalized();
  const Vec3 w = u.cross(s.direction).normalized();
  const Vec3 tip = s.base + total * s.direction;
  auto radius_at = [&](double arc) { return s.radius * (1.0 - 0.15 * arc / total); };
  const double tip_radius = radius_at(total);

  auto add_ring = [&](const Vec3& center, double r) {
    for (int j = 0; j < kTubeSlices; ++j) {
      const double phi = 2.0 * kPi * j / kTubeSlices;
      m.vertices.push_back(center + r * (std::cos(phi) * u + std::sin(phi) * w));
    }
  };
  for (int i = 0; i < kTubeRings; ++i) {
    const double arc = total * i / (kTubeRings - 1);
    add_ring(s.base + arc * s.direction, radius_at(arc));
  }
  for (double a : kCapAngles) {
    const double rad = a * kPi / 180.0;
    add_ring(tip + tip_radius * std::sin(rad) * s.direction, tip_radius * std::cos(rad));
  }
  const int pole = static_cast<int>(m.vertices.size());
  m.vertices.push_back(tip + tip_radius * s.direction);

  const int rings = kTubeRings + static_cast<int>(kCapAngles.size());
  auto at = [&](int ring, int slice) { return first_vertex + ring * kTubeSlices + (slice % kTubeSlices); };
  for (int i = 0; i + 1 < rings; ++i) {
    for (int j = 0; j < kTubeSlices; ++j) add_quad(m, at(i, j), at(i, j + 1), at(i + 1, j + 1), at(i + 1, j));
  }
  for (int j = 0; j < kTubeSlices; ++j) m.faces.push_back({{pole, at(rings - 1, j), at(rings - 1, j + 1)}});
  orient_outward(m, first_face, [&](const Vec3& p) {
    const double t = std::clamp((p - s.base).dot(s.direction), 0.0, total);
    return Vec3(s.base + t * s.direction);
  });

  // Nearest phalanx at rest; ties go to the distal bone.
  for (int v = first_vertex; v < static_cast<int>(m.vertices.size()); ++v) {
    int best = finger_joint(finger, 1);
    double best_d = std::numeric_limits<double>::infinity();
    for (int level = 1; level <= 3; ++level) {
      const int child = finger_joint(finger, level);
      const double d = segment_distance(m.vertices[v], h.rest_joints[h.parent[child]], h.rest_joints[child]);
      if (d <= best_d + 1e-9) {
        best_d = std::min(best_d, d);
        best = child;
      }
    }
    h.vertex_bone.push_back(best);
  }
}

HandModel build_standard() {
  HandModel h;
  h.rest_joints[0] = Vec3::Zero();
  h.parent[0] = -1;
  for (int f = 0; f < kFingerCount; ++f) {
    const FingerSpec& s = finger_specs()[f];
    Vec3 p = s.base;
    h.rest_joints[finger_joint(f, 0)] = p;
    h.parent[finger_joint(f, 0)] = 0;
    for (int level = 1; level <= 3; ++level) {
      p += s.lengths[level - 1] * s.direction;
      h.rest_joints[finger_joint(f, level)] = p;
      h.parent[finger_joint(f, level)] = finger_joint(f, level - 1);
    }
  }
  build_palm(h);
  for (int f = 0; f < kFingerCount; ++f) build_finger(h, f);
  if (static_cast<int>(h.surface.vertex_count()) != kHandVertexCount) {
    throw Error("hand model: template vertex count mismatch");
  }
  h.surface.validate();
  return h;
}

}  // namespace

const FingerLimits& finger_limits(int finger) { return finger == 0 ? kThumbLimits : kFingerLimits; }

bool within_limits(const PoseParams& p) {
  auto in = [](double v, AngleRange r) { return v >= r.lo && v <= r.hi; };
  for (int f = 0; f < kFingerCount; ++f) {
    const FingerLimits& l = finger_limits(f);
    const FingerPose& fp = p.fingers[f];
    if (!in(fp.mcp_flexion, l.mcp_flexion) || !in(fp.mcp_abduction, l.mcp_abduction) ||
        !in(fp.pip_flexion, l.pip_flexion) || !in(fp.dip_flexion, l.dip_flexion)) {
      return false;
    }
  }
  for (int a = 0; a < 3; ++a) {
    if (std::abs(p.root_rotation[a]) > kRootRotationLimit) return false;
    if (std::abs(p.root_translation[a]) > kRootTranslationLimit) return false;
  }
  return true;
}

const HandModel& HandModel::standard() {
  static const HandModel model = build_standard();
  return model;
}

double HandModel::bone_length(int joint) const {
  if (joint <= 0 || joint >= kHandJointCount) throw ValidationError("hand model: joint has no parent bone");
  return (rest_joints[joint] - rest_joints[parent[joint]]).norm();
}

PoseParams sample_pose(std::uint64_t seed) {
  PoseParams p;
  if (seed == 0) return p;
  Rng rng(seed);
  auto draw = [&](AngleRange r) { return rng.uniform(r.lo, r.hi); };
  for (int f = 0; f < kFingerCount; ++f) {
    const FingerLimits& l = finger_limits(f);
    p.fingers[f] = {draw(l.mcp_flexion), draw(l.mcp_abduction), draw(l.pip_flexion), draw(l.dip_flexion)};
  }
  for (int a = 0; a < 3; ++a) p.root_rotation[a] = rng.uniform(-kRootRotationLimit, kRootRotationLimit);
  for (int a = 0; a < 3; ++a) p.root_translation[a] = rng.uniform(-kRootTranslationLimit, kRootTranslationLimit);
  return p;
}

PosedHand pose_hand(const HandModel& model, const PoseParams& p) {
  if (!within_limits(p)) throw ValidationError("pose: parameters outside joint limits");

  // Per bone (named by child joint): world rotation, rest anchor, posed anchor.
  std::array<Mat3, kHandJointCount> rot;
  std::array<Vec3, kHandJointCount> rest_anchor;
  std::array<Vec3, kHandJointCount> posed_anchor;
  std::array<Vec3, kHandJointCount> joints;

  const Mat3 root = root_rotation_matrix(p.root_rotation);
  rot[0] = root;
  rest_anchor[0] = Vec3::Zero();
  posed_anchor[0] = p.root_translation;
  joints[0] = p.root_translation;

  for (int f = 0; f < kFingerCount; ++f) {
    const FingerSpec& s = finger_specs()[f];
    const FingerPose& fp = p.fingers[f];
    const Vec3 lateral = s.direction.cross(kPalmNormal).normalized();

    const int mcp = finger_joint(f, 0);
    rot[mcp] = root;
    rest_anchor[mcp] = Vec3::Zero();
    posed_anchor[mcp] = p.root_translation;
    joints[mcp] = root * model.rest_joints[mcp] + p.root_translation;

    const std::array<Mat3, 3> local{
        axis_rotation(kPalmNormal, fp.mcp_abduction) * axis_rotation(lateral, fp.mcp_flexion),
        axis_rotation(lateral, fp.pip_flexion), axis_rotation(lateral, fp.dip_flexion)};
    Mat3 chain = root;
    for (int level = 1; level <= 3; ++level) {
      const int child = finger_joint(f, level);
      const int par = model.parent[child];
      chain = chain * local[level - 1];
      rot[child] = chain;
      rest_anchor[child] = model.rest_joints[par];
      posed_anchor[child] = joints[par];
      joints[child] = joints[par] + chain * (model.rest_joints[child] - model.rest_joints[par]);
    }
  }

  PosedHand out;
  out.mesh.faces = model.surface.faces;
  out.mesh.vertices.resize(model.surface.vertex_count());
  for (std::size_t v = 0; v < model.surface.vertex_count(); ++v) {
    const int b = model.vertex_bone[v];
    out.mesh.vertices[v] = posed_anchor[b] + rot[b] * (model.surface.vertices[v] - rest_anchor[b]);
  }
  out.joints.joints.assign(joints.begin(), joints.end());
  return out;
}

Vec3 palm_center(const JointSet& joints21) {
  if (joints21.size() < static_cast<std::size_t>(kHandJointCount)) {
    throw ValidationError("palm center: expected 21 joints");
  }
  Vec3 c = joints21.joints[0];
  for (int f = 0; f < kFingerCount; ++f) c += joints21.joints[finger_joint(f, 0)];
  return c / 6.0;
}

JointSet joints22(const JointSet& joints21) {
  JointSet out = joints21;
  out.joints.push_back(palm_center(joints21));
  return out;
}

DepthMap render_depth(const Mesh& mesh, const CameraIntrinsics& k, int width, int height, double sample_spacing) {
  k.validate();
  mesh.validate();
  if (!(sample_spacing > 0.0)) throw ValidationError("render: sample spacing must be positive");
  for (const auto& v : mesh.vertices) {
    if (!(v.z() > 0.0)) throw ValidationError("render: mesh must lie in front of the camera (z > 0)");
  }
  DepthMap map(width, height);
  auto splat = [&](const Vec3& p) {
    const double u = std::floor(k.fx * p.x() / p.z() + k.cx + 0.5);
    const double v = std::floor(k.fy * p.y() / p.z() + k.cy + 0.5);
    if (u < 0 || v < 0 || u >= width || v >= height) return;
    double& d = map.at(static_cast<int>(u), static_cast<int>(v));
    if (d == 0.0 || p.z() < d) d = p.z();
  };
  for (const auto& v : mesh.vertices) splat(v);
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f.v[0]];
    const Vec3& b = mesh.vertices[f.v[1]];
    const Vec3& c = mesh.vertices[f.v[2]];
    const double longest = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    const int n = std::max(1, static_cast<int>(std::ceil(longest / sample_spacing)));
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; i + j <= n; ++j) {
        splat(a + (static_cast<double>(i) / n) * (b - a) + (static_cast<double>(j) / n) * (c - a));
      }
    }
  }
  return map;
}

namespace {

// Distance from o along unit d to the nearest face hit, infinity if none.
double ray_hit(const Mesh& mesh, const Vec3& o, const Vec3& d) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f.v[0]];
    const Vec3 e1 = mesh.vertices[f.v[1]] - a;
    const Vec3 e2 = mesh.vertices[f.v[2]] - a;
    const Vec3 p = d.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-12) continue;
    const Vec3 s = o - a;
    const double u = s.dot(p) / det;
    if (u < 0.0 || u > 1.0) continue;
    const Vec3 q = s.cross(e1);
    const double v = d.dot(q) / det;
    if (v < 0.0 || u + v > 1.0) continue;
    const double t = e2.dot(q) / det;
    if (t > 1e-6 && t < best) best = t;
  }
  return best;
}

}  // namespace

Mesh perturb_surface(const Mesh& mesh, std::uint64_t seed, double mean_amplitude) {
  if (!(mean_amplitude >= 0.0)) throw ValidationError("perturb: amplitude must be >= 0");
  Mesh out = mesh;
  if (mesh.vertices.empty() || mean_amplitude == 0.0) return out;

  Rng rng(seed);
  struct Wave {
    Vec3 k;
    double phase;
  };
  std::array<Wave, 4> waves;
  for (auto& w : waves) {
    Vec3 dir(rng.normal(), rng.normal(), rng.normal());
    dir.normalize();
    const double wavelength = rng.uniform(60.0, 120.0);
    w = {dir * (2.0 * kPi / wavelength), rng.uniform(0.0, 2.0 * kPi)};
  }
  const auto normals = vertex_normals(mesh);
  const std::size_t n = mesh.vertex_count();
  std::vector<double> s(n);
  std::vector<double> inward_limit(n);
  for (std::size_t v = 0; v < n; ++v) {
    double sum = 0.0;
    for (const auto& w : waves) sum += std::sin(w.k.dot(mesh.vertices[v]) + w.phase);
    s[v] = sum;
    // Sinking deeper than half the local thickness would fold the surface
    // through itself; the inward swing saturates there.
    inward_limit[v] = 0.5 * ray_hit(mesh, mesh.vertices[v], -normals[v]);
  }
  auto amplitude = [&](double gain, std::size_t v) {
    const double a = gain * s[v];
    if (a >= 0.0 || !std::isfinite(inward_limit[v])) return a;
    return -inward_limit[v] * std::tanh(-a / inward_limit[v]);
  };
  auto mean_abs = [&](double gain) {
    double m = 0.0;
    for (std::size_t v = 0; v < n; ++v) m += std::abs(amplitude(gain, v));
    return m / static_cast<double>(n);
  };

  // mean |a| is increasing in the gain; bracket then bisect.
  double lo = 0.0, hi = 1.0;
  while (mean_abs(hi) < mean_amplitude) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return out;  // all-zero field
  }
  for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_abs(mid) < mean_amplitude ? lo : hi) = mid;
  }
  const double gain = 0.5 * (lo + hi);
  for (std::size_t v = 0; v < n; ++v) out.vertices[v] += amplitude(gain, v) * normals[v];
  return out;
}

CameraIntrinsics default_camera() { return {475.0, 475.0, 320.0, 240.0}; }

Vec3 default_hand_placement() { return {5.0, -60.0, 420.0}; }

}  // namespace handvox
