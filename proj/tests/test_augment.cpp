#include "doctest.h"
#include "oracles.hpp"

#include "handvox/augment.hpp"
#include "handvox/error.hpp"
#include "handvox/voxgrid.hpp"

#include <cmath>

using namespace handvox;

namespace {

VoxelGrid random_occupancy(std::mt19937_64& g, int dim, double fill) {
  VoxelGrid gr(frame_geometry(CubeFrame{}, dim), GridKind::Occupancy);
  for (auto& v : gr.data) v = oracle::uniform(g, 0, 1) < fill ? 1.0f : 0.0f;
  return gr;
}

}  // namespace

TEST_CASE("rotation matrix equals the elementary product") {
  auto& g = oracle::rng();
  double worst = 0;
  for (int i = 0; i < 2000; ++i) {
    AugmentParams p;
    p.theta_x = oracle::uniform(g, -180, 180);
    p.theta_y = oracle::uniform(g, -180, 180);
    p.theta_z = oracle::uniform(g, -180, 180);
    const Mat3 r = rotation_matrix(p);
    const auto o = oracle::rotation_xyz(p.theta_x, p.theta_y, p.theta_z);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) worst = std::max(worst, std::abs(r(a, b) - o[a][b]));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("elementary rotations are right-handed") {
  CHECK((rot_z(90) * Vec3::UnitX() - Vec3::UnitY()).norm() < 1e-15);
  CHECK((rot_x(90) * Vec3::UnitY() - Vec3::UnitZ()).norm() < 1e-15);
  CHECK((rot_y(90) * Vec3::UnitZ() - Vec3::UnitX()).norm() < 1e-15);
}

TEST_CASE("sampled parameters stay in range and repeat per seed") {
  for (std::uint64_t s = 0; s < 500; ++s) {
    const AugmentParams p = sample_params(s);
    CHECK(p.in_range());
    const AugmentParams q = sample_params(s);
    CHECK(p.theta_x == q.theta_x);
    CHECK(p.translation == q.translation);
  }
  CHECK(sample_params(1).theta_z != sample_params(2).theta_z);
}

TEST_CASE("90 degree spin about z permutes voxels exactly") {
  auto& g = oracle::rng();
  for (int dim : {8, 9, 16}) {
    VoxelGrid gr = random_occupancy(g, dim, 0.4);
    AugmentParams p;
    p.theta_z = 90;
    const VoxelGrid out = transform_grid(gr, p);
    for (int z = 0; z < dim; ++z)
      for (int y = 0; y < dim; ++y)
        for (int x = 0; x < dim; ++x) CHECK(out.at(dim - 1 - y, x, z) == gr.at(x, y, z));
  }
}

TEST_CASE("90 degree tilt about x permutes voxels exactly") {
  auto& g = oracle::rng();
  const int dim = 10;
  VoxelGrid gr(frame_geometry(CubeFrame{}, dim), GridKind::Probability);
  for (auto& v : gr.data) v = static_cast<float>(oracle::uniform(g, 0, 1));
  AugmentParams p;
  p.theta_x = 90;
  const VoxelGrid out = transform_grid(gr, p);
  // (x, y, z) -> (x, -z, y) about the center
  for (int z = 0; z < dim; ++z)
    for (int y = 0; y < dim; ++y)
      for (int x = 0; x < dim; ++x) CHECK(out.at(x, dim - 1 - z, y) == gr.at(x, y, z));
}

TEST_CASE("integer translations shift voxels") {
  auto& g = oracle::rng();
  const int dim = 12;
  VoxelGrid gr = random_occupancy(g, dim, 0.5);
  AugmentParams p;
  p.translation = Vec3(2, -1, 3);
  const VoxelGrid out = transform_grid(gr, p);
  for (int z = 0; z < dim; ++z)
    for (int y = 0; y < dim; ++y)
      for (int x = 0; x < dim; ++x) {
        const int sx = x - 2, sy = y + 1, sz = z - 3;
        const float expected = gr.geometry.in_bounds(sx, sy, sz) ? gr.at(sx, sy, sz) : 0.0f;
        CHECK(out.at(x, y, z) == expected);
      }
}

TEST_CASE("identity parameters are the exact identity") {
  auto& g = oracle::rng();
  const AugmentParams id;
  VoxelGrid gr = random_occupancy(g, 16, 0.3);
  CHECK(transform_grid(gr, id).data == gr.data);

  CubeFrame f;
  f.center = Vec3(1, 2, 400);
  JointSet j;
  for (int i = 0; i < 21; ++i) j.joints.push_back(f.center + Vec3(oracle::uniform(g, -60, 60), 0, i));
  const HeatmapStack h = make_heatmaps(j, f, 16, 0);
  const HeatmapStack th = transform_heatmaps(h, id);
  for (std::size_t n = 0; n < h.size(); ++n) CHECK(th.maps[n].data == h.maps[n].data);
  const TransformedJoints tj = transform_joints(j, f, 16, id);
  CHECK(tj.inside_frame);
  for (std::size_t n = 0; n < j.size(); ++n) CHECK(tj.joints.joints[n] == j.joints[n]);
}

TEST_CASE("a transform followed by its inverse restores smooth content") {
  CubeFrame f;
  JointSet j;
  j.joints = {Vec3(10, -15, 5)};
  const HeatmapStack h = make_heatmaps(j, f, 32, 3 * f.side / 32);
  for (int trial = 0; trial < 5; ++trial) {
    const GridTransform t = GridTransform::from_params(sample_params(oracle::rng()()));
    const VoxelGrid there = transform_grid(h.maps[0], t);
    const VoxelGrid back = transform_grid(there, t.inverse());
    double worst = 0;
    for (std::size_t i = 0; i < back.data.size(); ++i) worst = std::max(worst, double(std::abs(back.data[i] - h.maps[0].data[i])));
    CHECK(worst < 0.08);
  }
}

TEST_CASE("inverse composes to the identity map") {
  for (std::uint64_t s = 1; s < 50; ++s) {
    const GridTransform t = GridTransform::from_params(sample_params(s));
    const GridTransform inv = t.inverse();
    const Vec3 x(3, -4, 7);
    const Vec3 q = t.scale * (t.rotation * x) + t.translation;
    const Vec3 back = inv.scale * (inv.rotation * q) + inv.translation;
    CHECK((back - x).norm() < 1e-12);
  }
}

TEST_CASE("transformed heatmaps decode to transformed joints") {
  CubeFrame f;
  f.center = Vec3(0, 0, 420);
  auto& g = oracle::rng();
  const double vs = f.side / 44;
  for (std::uint64_t s = 10; s < 20; ++s) {
    JointSet j;
    for (int i = 0; i < 21; ++i) {
      j.joints.push_back(f.center + Vec3(oracle::uniform(g, -60, 60), oracle::uniform(g, -60, 60), oracle::uniform(g, -60, 60)));
    }
    const AugmentParams p = sample_params(s);
    const HeatmapStack h = transform_heatmaps(make_heatmaps(j, f, 44, 0), p);
    const TransformedJoints tj = transform_joints(j, f, 44, p);
    if (!tj.inside_frame) continue;
    const JointSet d = decode_heatmaps(h);
    CHECK(oracle::mean_distance(d.joints, tj.joints.joints) < vs);
  }
}

TEST_CASE("non-cubic grids are rejected") {
  GridGeometry geo;
  geo.dims = {4, 4, 5};
  AugmentParams p;
  p.theta_z = 10;
  CHECK_THROWS_AS(transform_grid(VoxelGrid(geo, GridKind::Occupancy), p), ValidationError);
  p.scale = 0;
  CHECK_THROWS_AS(GridTransform::from_params(p), ValidationError);
}
