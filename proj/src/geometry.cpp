#include "handvox/geometry.hpp"

#include "handvox/error.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace handvox {

// ---- types.hpp out-of-line members ----------------------------------------

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(cx) || !std::isfinite(cy)) {
    throw ValidationError("camera intrinsics: focal lengths must be positive");
  }
}

DepthMap::DepthMap(int w, int h) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw ValidationError("depth map: width and height must be positive");
  depth.assign(static_cast<std::size_t>(w) * h, 0.0);
}

void DepthMap::validate() const {
  if (width <= 0 || height <= 0) throw ValidationError("depth map: width and height must be positive");
  if (depth.size() != static_cast<std::size_t>(width) * height) {
    throw ValidationError("depth map: pixel count does not match width*height");
  }
  for (double d : depth) {
    if (!std::isfinite(d) || d < 0.0) throw ValidationError("depth map: depth values must be finite and >= 0");
  }
}

bool CubeFrame::contains(const Vec3& p) const {
  const double h = side / 2.0;
  for (int a = 0; a < 3; ++a) {
    if (!(p[a] >= center[a] - h && p[a] <= center[a] + h)) return false;
  }
  return true;
}

void CubeFrame::validate() const {
  if (!(side > 0.0) || !std::isfinite(side) || !center.allFinite()) {
    throw ValidationError("cube frame: side must be positive and center finite");
  }
}

void Mesh::validate() const {
  const int k = static_cast<int>(vertices.size());
  for (const auto& v : vertices) {
    if (!v.allFinite()) throw ValidationError("mesh: non-finite vertex coordinate");
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& t = faces[f].v;
    for (int i : t) {
      if (i < 0 || i >= k) {
        std::ostringstream msg;
        msg << "mesh: face " << f << " references vertex " << i << " (K=" << k << ")";
        throw ValidationError(msg.str());
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      std::ostringstream msg;
      msg << "mesh: face " << f << " is degenerate";
      throw ValidationError(msg.str());
    }
  }
}

Index3 GridGeometry::unlinear(std::size_t i) const {
  const std::size_t plane = static_cast<std::size_t>(dims[0]) * dims[1];
  const int z = static_cast<int>(i / plane);
  const std::size_t r = i % plane;
  return {static_cast<int>(r % dims[0]), static_cast<int>(r / dims[0]), z};
}

void GridGeometry::validate() const {
  for (int d : dims) {
    if (d < 1) throw ValidationError("grid: every dimension must be >= 1");
  }
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) throw ValidationError("grid: voxel size must be positive");
  if (!origin.allFinite()) throw ValidationError("grid: origin must be finite");
}

GridGeometry frame_geometry(const CubeFrame& frame, int dim) {
  frame.validate();
  if (dim < 1) throw ValidationError("grid dimension must be >= 1");
  GridGeometry g;
  g.dims = {dim, dim, dim};
  g.origin = frame.min_corner();
  g.voxel_size = frame.side / dim;
  return g;
}

CubeFrame geometry_frame(const GridGeometry& geometry) {
  if (!geometry.is_cubic()) throw ValidationError("grid is not cubic");
  CubeFrame f;
  f.side = geometry.voxel_size * geometry.dims[0];
  f.center = geometry.origin.array() + f.side / 2.0;
  return f;
}

VoxelGrid::VoxelGrid(GridGeometry g, GridKind k) : geometry(std::move(g)), kind(k) {
  geometry.validate();
  data.assign(geometry.count(), 0.0f);
}

std::size_t VoxelGrid::occupied_count(float threshold) const {
  return static_cast<std::size_t>(
      std::count_if(data.begin(), data.end(), [threshold](float v) { return v >= threshold; }));
}

void VoxelGrid::validate() const {
  geometry.validate();
  if (data.size() != geometry.count()) throw ValidationError("grid: payload length does not match dims");
  for (float v : data) {
    if (kind == GridKind::Occupancy) {
      if (v != 0.0f && v != 1.0f) throw ValidationError("grid: occupancy values must be 0 or 1");
    } else if (!(v >= 0.0f && v <= 1.0f)) {
      throw ValidationError("grid: probability values must lie in [0,1]");
    }
  }
}

DisplacementField::DisplacementField(GridGeometry g) : geometry(std::move(g)) {
  geometry.validate();
  vectors.assign(geometry.count(), Vec3f::Zero());
}

void DisplacementField::validate() const {
  geometry.validate();
  if (!geometry.is_cubic()) throw ValidationError("displacement field: grid must be cubic");
  if (vectors.size() != geometry.count()) throw ValidationError("displacement field: payload length does not match dims");
  for (const auto& v : vectors) {
    if (!v.allFinite()) throw ValidationError("displacement field: non-finite vector");
  }
}

// ---- geometry ---------------------------------------------------------------

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return a + v * ab;
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return a + w * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return a + ab * v + ac * w;
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  return (p - closest_point_on_triangle(p, a, b, c)).norm();
}

std::vector<Vec3> vertex_normals(const Mesh& mesh) {
  std::vector<Vec3> n(mesh.vertices.size(), Vec3::Zero());
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f.v[0]];
    const Vec3& b = mesh.vertices[f.v[1]];
    const Vec3& c = mesh.vertices[f.v[2]];
    const Vec3 fn = (b - a).cross(c - a);  // length = 2*area
    for (int i : f.v) n[i] += fn;
  }
  for (auto& v : n) {
    const double len = v.norm();
    if (len > 0.0) v /= len;
  }
  return n;
}

std::vector<std::pair<int, int>> edge_list(const Mesh& mesh) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces) {
    for (int e = 0; e < 3; ++e) {
      int a = f.v[e];
      int b = f.v[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.emplace_back(a, b);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

Vec3 centroid(const std::vector<Vec3>& points) {
  Vec3 c = Vec3::Zero();
  if (points.empty()) return c;
  for (const auto& p : points) c += p;
  return c / static_cast<double>(points.size());
}

Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

double orthonormality_error(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
}

double Rng::normal() {
  double u1 = uniform(0.0, 1.0);
  while (u1 <= 0.0) u1 = uniform(0.0, 1.0);
  const double u2 = uniform(0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace handvox
