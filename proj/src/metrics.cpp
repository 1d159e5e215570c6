#include "handvox/metrics.hpp"

#include "handvox/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace handvox {

namespace {

void require_same_geometry(const GridGeometry& a, const GridGeometry& b, const char* what) {
  if (a.dims != b.dims) throw ValidationError(std::string(what) + ": grid dimensions differ");
}

void require_same_count(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ValidationError(std::string(what) + ": element counts differ (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
  }
}

double mean_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]).norm();
  return sum / static_cast<double>(a.size());
}

}  // namespace

LossReport bce_voxel(const VoxelGrid& pred, const VoxelGrid& gt) {
  require_same_geometry(pred.geometry, gt.geometry, "bce");
  require_same_count(pred.data.size(), gt.data.size(), "bce");
  LossReport r;
  r.per_element.resize(pred.data.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double p = std::clamp(static_cast<double>(pred.data[i]), kBceEpsilon, 1.0 - kBceEpsilon);
    const double g = gt.data[i] >= 0.5f ? 1.0 : 0.0;
    const double e = -(g * std::log(p) + (1.0 - g) * std::log(1.0 - p));
    r.per_element[i] = e;
    sum += e;
  }
  r.value = pred.data.empty() ? 0.0 : sum / static_cast<double>(pred.data.size());
  return r;
}

LossReport euclidean_vertex_loss(const Mesh& pred, const Mesh& gt) {
  require_same_count(pred.vertices.size(), gt.vertices.size(), "vertex loss");
  LossReport r;
  r.per_element.resize(pred.vertices.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < pred.vertices.size(); ++k) {
    const double e = (pred.vertices[k] - gt.vertices[k]).squaredNorm();
    r.per_element[k] = 0.5 * e;
    sum += e;
  }
  r.value = 0.5 * sum;
  return r;
}

LossReport displacement_loss(const DisplacementField& pred, const DisplacementField& gt) {
  if (!(pred.geometry == gt.geometry)) throw ValidationError("displacement loss: field geometries differ");
  require_same_count(pred.vectors.size(), gt.vectors.size(), "displacement loss");
  LossReport r;
  r.per_element.resize(pred.vectors.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.vectors.size(); ++i) {
    const double e = (pred.vectors[i].cast<double>() - gt.vectors[i].cast<double>()).squaredNorm();
    r.per_element[i] = e;
    sum += e;
  }
  r.value = pred.vectors.empty() ? 0.0 : sum / static_cast<double>(pred.vectors.size());
  return r;
}

LossReport heatmap_loss(const HeatmapStack& pred, const HeatmapStack& gt) {
  require_same_count(pred.size(), gt.size(), "heatmap loss");
  LossReport r;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    require_same_geometry(pred.maps[j].geometry, gt.maps[j].geometry, "heatmap loss");
    const auto& a = pred.maps[j].data;
    const auto& b = gt.maps[j].data;
    double map_sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = static_cast<double>(a[i]) - b[i];
      map_sum += d * d;
    }
    r.per_element.push_back(a.empty() ? 0.0 : map_sum / static_cast<double>(a.size()));
    sum += map_sum;
    n += a.size();
  }
  r.value = n == 0 ? 0.0 : sum / static_cast<double>(n);
  return r;
}

double joint_error(const JointSet& pred, const JointSet& gt) {
  require_same_count(pred.size(), gt.size(), "joint error");
  return mean_distance(pred.joints, gt.joints);
}

double vertex_error(const Mesh& pred, const Mesh& gt) {
  require_same_count(pred.vertices.size(), gt.vertices.size(), "vertex error");
  return mean_distance(pred.vertices, gt.vertices);
}

double shape_error(const VoxelGrid& pred, const VoxelGrid& gt) { return bce_voxel(pred, gt).value; }

LossReport total_loss(const LossParts& parts, SampleFlag flag) {
  const double values[] = {parts.heatmap, parts.shape, parts.surface, parts.depth_from_voxels,
                           parts.depth_from_surface};
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("total loss: every part must be finite and >= 0");
  }
  const double gate = flag.is_synthetic ? 1.0 : 0.0;
  LossReport r;
  r.per_element = {parts.heatmap, gate * parts.shape, gate * parts.surface, parts.depth_from_voxels,
                   parts.depth_from_surface};
  r.value = parts.heatmap;
  if (flag.is_synthetic) {
    r.value += parts.shape;
    r.value += parts.surface;
  }
  r.value += parts.depth_from_voxels;
  r.value += parts.depth_from_surface;
  return r;
}

}  // namespace handvox
