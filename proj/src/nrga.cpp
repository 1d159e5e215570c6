#include "handvox/error.hpp"
#include "handvox/geometry.hpp"
#include "handvox/register.hpp"
#include "handvox/voxgrid.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace handvox {

namespace {

struct Correspondence {
  bool matched = false;
  Vec3 target = Vec3::Zero();  // kernel-weighted centroid of nearby target points
  double weight = 0.0;         // total kernel weight
};

struct RigidTransform {
  bool valid = false;
  Mat3 rotation = Mat3::Identity();
  Vec3 source = Vec3::Zero();  // x -> R (x - source) + target
  Vec3 target = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return rotation * (x - source) + target; }
};

std::vector<Correspondence> gather(const std::vector<Vec3>& vertices, const VoxelGrid& target, double radius,
                                   double softening2) {
  const GridGeometry& g = target.geometry;
  const int reach = static_cast<int>(std::ceil(radius / g.voxel_size)) + 1;
  const double r2 = radius * radius;
  std::vector<Correspondence> out(vertices.size());
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    const Vec3& p = vertices[v];
    const Vec3 idx = g.to_index(p);
    Index3 lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
      const int c = static_cast<int>(std::lround(idx[a]));
      lo[a] = std::max(0, c - reach);
      hi[a] = std::min(g.dims[a] - 1, c + reach);
    }
    Vec3 sum = Vec3::Zero();
    double wsum = 0.0;
    for (int z = lo[2]; z <= hi[2]; ++z) {
      for (int y = lo[1]; y <= hi[1]; ++y) {
        for (int x = lo[0]; x <= hi[0]; ++x) {
          if (target.at(x, y, z) < 0.5f) continue;
          const Vec3 c = g.center(x, y, z);
          const double d2 = (c - p).squaredNorm();
          if (d2 > r2) continue;
          const double w = 1.0 / (d2 + softening2);
          sum += w * c;
          wsum += w;
        }
      }
    }
    if (wsum > 0.0) out[v] = {true, sum / wsum, wsum};
  }
  return out;
}

// Weighted orthogonal Procrustes over the matched vertices among ids.
template <typename Ids>
RigidTransform fit_rigid(const Ids& ids, const std::vector<Vec3>& x, const std::vector<Correspondence>& corr) {
  RigidTransform t;
  double wsum = 0.0;
  Vec3 mu_p = Vec3::Zero(), mu_q = Vec3::Zero();
  int pairs = 0;
  for (int u : ids) {
    if (!corr[u].matched) continue;
    mu_p += corr[u].weight * x[u];
    mu_q += corr[u].weight * corr[u].target;
    wsum += corr[u].weight;
    ++pairs;
  }
  if (pairs == 0) return t;
  mu_p /= wsum;
  mu_q /= wsum;
  t.valid = true;

  if (pairs >= 3) {
    Mat3 h = Mat3::Zero();
    for (int u : ids) {
      if (corr[u].matched) h += corr[u].weight * (x[u] - mu_p) * (corr[u].target - mu_q).transpose();
    }
    Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
    t.rotation = svd.matrixV() * d * svd.matrixU().transpose();
  }
  t.source = mu_p;
  t.target = mu_q;
  return t;
}

}  // namespace

void NrgaConfig::validate() const {
  if (iterations < 1) throw ValidationError("nrga: iterations must be >= 1");
  if (!(step > 0.0 && step <= 1.0)) throw ValidationError("nrga: step must lie in (0,1]");
  if (!(softening_voxels > 0.0)) throw ValidationError("nrga: softening must be positive");
  if (!(correspondence_radius_voxels > 0.0)) throw ValidationError("nrga: correspondence radius must be positive");
  if (!(radius_decay > 0.0 && radius_decay <= 1.0)) throw ValidationError("nrga: radius decay must lie in (0,1]");
  if (!(min_radius_voxels > 0.0)) throw ValidationError("nrga: minimum radius must be positive");
  if (!(tolerance_voxels >= 0.0)) throw ValidationError("nrga: tolerance must be >= 0");
  if (ring_radius < 0) throw ValidationError("nrga: ring radius must be >= 0");
}

std::string to_string(RegistrationStatus s) {
  switch (s) {
    case RegistrationStatus::Converged:
      return "converged";
    case RegistrationStatus::Completed:
      return "completed";
    case RegistrationStatus::CorrespondenceFailure:
      return "correspondence_failure";
  }
  return "unknown";
}

NrgaResult nrga_register(const Mesh& mesh, const VoxelGrid& target, const NrgaConfig& cfg) {
  cfg.validate();
  mesh.validate();
  target.geometry.validate();
  if (target.occupied_count() == 0) throw ValidationError("nrga: target grid has no occupied voxel");

  const double voxel = target.geometry.voxel_size;
  // Local fits and their diffusion both use the ring neighborhood.
  const RingAdjacency rings = build_rings(mesh, cfg.ring_radius);
  const double softening2 = std::pow(cfg.softening_voxels * voxel, 2);
  const double min_radius = std::min(cfg.min_radius_voxels, cfg.correspondence_radius_voxels) * voxel;

  NrgaResult result;
  result.mesh = mesh;
  result.initial_target_distance = mean_distance_to_occupied(mesh, target);
  result.rotations.assign(mesh.vertex_count(), Mat3::Identity());
  if (mesh.vertices.empty()) return result;

  const std::size_t k = mesh.vertex_count();
  std::vector<RigidTransform> local(k);
  std::vector<Vec3> next(k);
  std::vector<int> all(k);
  for (std::size_t v = 0; v < k; ++v) all[v] = static_cast<int>(v);
  double radius = cfg.correspondence_radius_voxels * voxel;
  double previous = result.initial_target_distance;

  for (int it = 0; it < cfg.iterations; ++it) {
    std::vector<Vec3>& x = result.mesh.vertices;
    const auto corr = gather(x, target, radius, softening2);
    const auto unmatched = std::count_if(corr.begin(), corr.end(), [](const auto& c) { return !c.matched; });
    NrgaIteration step;
    step.radius = radius;
    step.unmatched_fraction = static_cast<double>(unmatched) / static_cast<double>(k);
    if (2 * static_cast<std::size_t>(unmatched) > k) {
      step.mean_target_distance = previous;
      result.trace.push_back(step);
      result.status = RegistrationStatus::CorrespondenceFailure;
      return result;
    }

    // Whole-mesh rigid part first, so the local fits only see the residual.
    Mat3 global_rotation = Mat3::Identity();
    if (cfg.global_alignment) {
      const RigidTransform g = fit_rigid(all, x, corr);
      if (g.valid) {
        for (auto& p : x) p = g.apply(p);
        global_rotation = g.rotation;
      }
    }

    std::vector<int> hood;
    for (std::size_t v = 0; v < k; ++v) {
      hood.assign(1, static_cast<int>(v));
      hood.insert(hood.end(), rings.rings[v].begin(), rings.rings[v].end());
      local[v] = fit_rigid(hood, x, corr);
    }

    // Diffusion: every vertex moves to the mean of its neighbors' transforms
    // applied to itself; its rotation is the orthonormalized mean rotation.
    for (std::size_t v = 0; v < k; ++v) {
      Mat3 r_sum = Mat3::Zero();
      Vec3 p_sum = Vec3::Zero();
      int n = 0;
      auto add = [&](std::size_t u) {
        if (!local[u].valid) return;
        r_sum += local[u].rotation;
        p_sum += local[u].apply(x[v]);
        ++n;
      };
      add(v);
      for (int u : rings.rings[v]) add(static_cast<std::size_t>(u));
      if (n == 0) {
        result.rotations[v] = global_rotation;
        next[v] = x[v];
        continue;
      }
      const Mat3 r = orthonormalize(orthonormalize(r_sum / n) * global_rotation);
      result.rotations[v] = r;
      step.max_rotation_error = std::max(step.max_rotation_error, orthonormality_error(r));
      next[v] = x[v] + cfg.step * (p_sum / n - x[v]);
    }
    x = next;

    step.mean_target_distance = mean_distance_to_occupied(result.mesh, target);
    result.trace.push_back(step);
    const double gain = previous - step.mean_target_distance;
    previous = step.mean_target_distance;
    radius = std::max(min_radius, radius * cfg.radius_decay);
    // Stalled: further passes mostly shuffle vertices between voxel centers.
    if (previous < voxel && gain >= 0.0 && gain < cfg.tolerance_voxels * voxel) break;
  }
  result.status = previous < voxel ? RegistrationStatus::Converged : RegistrationStatus::Completed;
  return result;
}

}  // namespace handvox
