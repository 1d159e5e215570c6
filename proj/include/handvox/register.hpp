#pragma once

#include "handvox/types.hpp"

#include <string>
#include <vector>

namespace handvox {

// ---- mesh topology ----------------------------------------------------------

// Per-vertex sorted vertex lists. Symmetric, never contains the vertex itself.
struct RingAdjacency {
  int radius = 0;
  std::vector<std::vector<int>> rings;

  std::size_t size() const { return rings.size(); }
  // Vertices with an empty ring (no incident edges).
  std::vector<int> isolated() const;
};

// Edge-graph neighborhoods up to `hops` edges away (BFS closure).
RingAdjacency build_rings(const Mesh& mesh, int hops = kDefaultRingRadius);

// Sum over vertices with neighbors of |v - mean(neighbors)|^2.
double laplacian_energy(const Mesh& mesh);
double laplacian_energy(const Mesh& mesh, const RingAdjacency& one_ring);

// Jacobi umbrella smoothing: v <- v + lambda * (mean(neighbors) - v).
Mesh laplacian_smooth(const Mesh& mesh, int iterations = 5, double lambda = 0.5);

// ---- displacement-field registration ---------------------------------------

// Splats v_gt - v_pred into the voxel containing v_pred; shared voxels keep
// the mean, untouched voxels stay zero.
DisplacementField gt_displacement_field(const Mesh& gt_mesh, const Mesh& pred_mesh, const CubeFrame& frame,
                                        int q = kShapeGridDim);

struct DisplacementOptions {
  // Target voxels within this many voxel edges are averaged; with none in
  // range, the nearest occupied target voxel is used.
  double correspondence_radius_voxels = 1.0;
  float threshold = 0.5f;
};

// Closed-form stand-in for a learned per-voxel displacement estimator: every
// occupied source voxel points at the centroid of nearby occupied target
// voxel centers. Throws if either grid is empty.
DisplacementField estimate_displacement_field(const VoxelGrid& source, const VoxelGrid& target,
                                              const DisplacementOptions& options = {});

// Moves each vertex by the trilinearly interpolated field vector.
Mesh apply_field(const Mesh& mesh, const DisplacementField& field);

// ---- NRGA-style registration -----------------------------------------------

struct NrgaConfig {
  int ring_radius = kDefaultRingRadius;
  int iterations = 30;
  double step = 0.3;
  double softening_voxels = 0.5;             // epsilon of 1/(d^2 + eps^2)
  double correspondence_radius_voxels = 6.0;
  // Per-iteration shrink factor of the correspondence radius, floored at
  // min_radius_voxels. 1 keeps the radius fixed.
  double radius_decay = 0.8;
  double min_radius_voxels = 2.0;
  // Stop early once below one voxel and an iteration gains less than this.
  double tolerance_voxels = 0.01;
  // Apply a whole-mesh weighted rigid fit before the local fits each pass.
  bool global_alignment = true;

  void validate() const;
};

// Converged: final mean distance to the target below one voxel edge.
enum class RegistrationStatus { Converged, Completed, CorrespondenceFailure };

std::string to_string(RegistrationStatus s);

struct NrgaIteration {
  double mean_target_distance = 0.0;  // mm, after the iteration
  double unmatched_fraction = 0.0;
  double max_rotation_error = 0.0;    // max |R^T R - I| over diffused rotations
  double radius = 0.0;                // mm
};

struct NrgaResult {
  Mesh mesh;
  RegistrationStatus status = RegistrationStatus::Completed;
  double initial_target_distance = 0.0;
  std::vector<NrgaIteration> trace;
  std::vector<Mat3> rotations;  // diffused per-vertex rotations of the last iteration
};

// Per-vertex rigid transforms from gravitational-kernel correspondences,
// diffused over the ring neighborhood and applied with damping cfg.step.
// Stops with CorrespondenceFailure (returning the partial mesh) when more than
// half of the vertices have no target point in range.
NrgaResult nrga_register(const Mesh& mesh, const VoxelGrid& target, const NrgaConfig& cfg = {});

// Mean over vertices of the distance to the nearest occupied voxel center.
double mean_distance_to_occupied(const Mesh& mesh, const VoxelGrid& grid, float threshold = 0.5f);

// ---- end-to-end ------------------------------------------------------------

enum class RegistrationMethod { DisplacementField, Nrga };

struct RegisterOptions {
  RegistrationMethod method = RegistrationMethod::DisplacementField;
  DisplacementOptions displacement;
  // Each round re-voxelizes the current mesh, estimates and applies a field,
  // then runs smoothing_iterations Laplacian steps.
  int field_rounds = 2;
  int smoothing_iterations = 2;
  double smoothing_lambda = 0.5;
  NrgaConfig nrga;
};

struct RegistrationReport {
  RegistrationMethod method = RegistrationMethod::DisplacementField;
  RegistrationStatus status = RegistrationStatus::Completed;
  // mean_distance_to_occupied at the start and after every stage/iteration.
  std::vector<double> trace;
};

// Fits the surface mesh to the voxelized shape. Vertex count and faces are
// always preserved. The target must be a cubic grid covering `frame`.
Mesh register_mesh(const Mesh& mesh, const VoxelGrid& target, const CubeFrame& frame,
                   const RegisterOptions& options = {}, RegistrationReport* report = nullptr);

}  // namespace handvox
