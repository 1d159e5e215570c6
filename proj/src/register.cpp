#include "handvox/error.hpp"
#include "handvox/register.hpp"
#include "handvox/voxgrid.hpp"

#include <cmath>

namespace handvox {

Mesh register_mesh(const Mesh& mesh, const VoxelGrid& target, const CubeFrame& frame,
                   const RegisterOptions& options, RegistrationReport* report) {
  mesh.validate();
  target.validate();
  if (!target.geometry.is_cubic()) throw ValidationError("register: target grid must be cubic");
  const GridGeometry expected = frame_geometry(frame, target.geometry.dims[0]);
  if ((expected.origin - target.geometry.origin).cwiseAbs().maxCoeff() > 1e-3 ||
      std::abs(expected.voxel_size - target.geometry.voxel_size) > 1e-6 * expected.voxel_size) {
    throw ValidationError("register: target grid does not cover the cube frame");
  }

  RegistrationReport local;
  local.method = options.method;

  Mesh out;
  if (options.method == RegistrationMethod::DisplacementField) {
    if (options.field_rounds < 1) throw ValidationError("register: field_rounds must be >= 1");
    if (options.smoothing_iterations < 0) throw ValidationError("register: smoothing_iterations must be >= 0");
    out = mesh;
    local.trace.push_back(mean_distance_to_occupied(out, target));
    for (int round = 0; round < options.field_rounds; ++round) {
      const VoxelGrid source = voxelize_mesh(out, frame, target.geometry.dims[0]);
      const DisplacementField field = estimate_displacement_field(source, target, options.displacement);
      out = apply_field(out, field);
      local.trace.push_back(mean_distance_to_occupied(out, target));
      for (int i = 0; i < options.smoothing_iterations; ++i) {
        out = laplacian_smooth(out, 1, options.smoothing_lambda);
        local.trace.push_back(mean_distance_to_occupied(out, target));
      }
    }
    local.status = RegistrationStatus::Completed;
  } else {
    NrgaResult r = nrga_register(mesh, target, options.nrga);
    local.trace.push_back(r.initial_target_distance);
    for (const auto& step : r.trace) local.trace.push_back(step.mean_target_distance);
    local.status = r.status;
    out = std::move(r.mesh);
  }
  if (report) *report = std::move(local);
  return out;
}

}  // namespace handvox
