#include "doctest.h"
#include "oracles.hpp"

#include "handvox/error.hpp"
#include "handvox/voxgrid.hpp"

#include <cmath>

using namespace handvox;

TEST_CASE("voxel index of the cube center on an 88 grid is 44") {
  CubeFrame f;
  f.center = Vec3(10, -20, 400);
  const GridGeometry g = frame_geometry(f, 88);
  const Index3 i = voxel_index(g, f.center);
  CHECK(i == Index3{44, 44, 44});
  // closed upper face lands in the last voxel, lower face in the first
  CHECK(voxel_index(g, f.max_corner()) == Index3{87, 87, 87});
  CHECK(voxel_index(g, f.min_corner()) == Index3{0, 0, 0});
}

TEST_CASE("frame geometry and back") {
  CubeFrame f;
  f.center = Vec3(1, 2, 3);
  f.side = 250;
  const GridGeometry g = frame_geometry(f, 50);
  CHECK(g.voxel_size == doctest::Approx(5.0));
  CHECK(g.origin.isApprox(Vec3(-124, -123, -122)));
  const CubeFrame back = geometry_frame(g);
  CHECK((back.center - f.center).norm() < 1e-12);
  CHECK(back.side == doctest::Approx(250));
  CHECK(g.to_index(g.center(3, 4, 5)).isApprox(Vec3(3, 4, 5)));
}

TEST_CASE("depth back-projection follows the pinhole model") {
  DepthMap d(4, 3);
  d.at(0, 0) = 500;
  d.at(3, 2) = 250;
  d.at(1, 1) = 0;  // missing
  const CameraIntrinsics k{100, 200, 1.5, 1.0};
  const PointCloud c = depth_to_points(d, k);
  REQUIRE(c.size() == 2);
  CHECK(c.points[0].isApprox(Vec3((0 - 1.5) * 500 / 100, (0 - 1.0) * 500 / 200, 500)));
  CHECK(c.points[1].isApprox(Vec3((3 - 1.5) * 250 / 100, (2 - 1.0) * 250 / 200, 250)));
  CHECK_THROWS_AS(depth_to_points(d, CameraIntrinsics{0, 1, 0, 0}), ValidationError);
}

TEST_CASE("crop keeps the closed cube") {
  CubeFrame f;
  f.side = 2;
  PointCloud c;
  c.points = {{1, 1, 1}, {-1, 0, 0}, {1.0000001, 0, 0}, {0, 0, -1.5}};
  const PointCloud kept = crop_points(c, f);
  CHECK(kept.size() == 2);
}

TEST_CASE("voxelize_points matches the slab-scan oracle") {
  auto& g = oracle::rng();
  for (int trial = 0; trial < 20; ++trial) {
    CubeFrame f;
    f.center = Vec3(oracle::uniform(g, -50, 50), oracle::uniform(g, -50, 50), oracle::uniform(g, 300, 500));
    f.side = oracle::uniform(g, 100, 400);
    const int dim = 8 + trial * 4;
    PointCloud c;
    for (int i = 0; i < 500; ++i) {
      Vec3 p;
      for (int a = 0; a < 3; ++a) p[a] = oracle::uniform(g, f.center[a] - f.side / 2, f.center[a] + f.side / 2);
      c.points.push_back(p);
    }
    c.points.push_back(f.max_corner());
    const VoxelGrid v = voxelize_points(c, f, dim);
    CHECK(v.data == oracle::voxelize_points(c.points, f, dim));
  }
}

TEST_CASE("voxelize_points rejects points outside the cube") {
  CubeFrame f;
  PointCloud c;
  c.points = {Vec3(0, 0, 151)};
  CHECK_THROWS_AS(voxelize_points(c, f, 88), ValidationError);
  CHECK_THROWS_AS(voxelize_points({}, f, 0), ValidationError);
}

TEST_CASE("empty cloud gives an empty grid") {
  const VoxelGrid v = voxelize_points({}, CubeFrame{}, 16);
  CHECK(v.occupied_count() == 0);
  CHECK(v.data.size() == 16u * 16u * 16u);
}

TEST_CASE("voxelize_mesh matches a brute-force center-to-face oracle") {
  auto& g = oracle::rng();
  Mesh m = oracle::icosphere(2, 60.0);
  for (auto& v : m.vertices) v += Vec3(3, -2, 1) + Vec3(oracle::uniform(g, -4, 4), 0, 0);
  CubeFrame f;
  f.side = 200;
  const int dim = 32;
  const VoxelGrid v = voxelize_mesh(m, f, dim);
  const auto expected = oracle::voxelize_mesh(m, f, dim);
  REQUIRE(v.data.size() == expected.size());
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) mismatches += v.data[i] != expected[i];
  CHECK(mismatches == 0);
  CHECK(v.occupied_count() > 100);
}

TEST_CASE("voxelize_mesh marks a lone triangle's neighborhood only") {
  Mesh m;
  m.vertices = {{0, 0, 0}, {30, 0, 0}, {0, 30, 0}};
  m.faces = {{{0, 1, 2}}};
  CubeFrame f;
  f.side = 100;
  const VoxelGrid v = voxelize_mesh(m, f, 10);
  const auto expected = oracle::voxelize_mesh(m, f, 10);
  CHECK(v.data == expected);
}

TEST_CASE("trilinear sampling is exact on lattice points and linear between") {
  GridGeometry geo;
  geo.dims = {4, 4, 4};
  VoxelGrid gr(geo, GridKind::Probability);
  for (std::size_t i = 0; i < gr.data.size(); ++i) gr.data[i] = static_cast<float>(i % 7) / 7.0f;
  for (int z = 0; z < 4; ++z)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) CHECK(sample_trilinear(gr, Vec3(x, y, z), Boundary::Zero) == gr.at(x, y, z));
  const double mid = sample_trilinear(gr, Vec3(1.5, 2, 3), Boundary::Zero);
  CHECK(mid == doctest::Approx(0.5 * (gr.at(1, 2, 3) + gr.at(2, 2, 3))));
  CHECK(sample_trilinear(gr, Vec3(-1, 0, 0), Boundary::Zero) == 0.0);
  CHECK(sample_trilinear(gr, Vec3(-1, 0, 0), Boundary::Clamp) == gr.at(0, 0, 0));
}

TEST_CASE("resize to the same dimension is the identity") {
  auto& g = oracle::rng();
  GridGeometry geo = frame_geometry(CubeFrame{}, 16);
  VoxelGrid gr(geo, GridKind::Occupancy);
  for (auto& v : gr.data) v = oracle::uniform(g, 0, 1) < 0.3 ? 1.0f : 0.0f;
  const VoxelGrid same = resize_grid(gr, 16);
  CHECK(same.data == gr.data);
  CHECK(same.geometry == gr.geometry);
}

TEST_CASE("resize keeps the cube and solid blocks") {
  GridGeometry geo = frame_geometry(CubeFrame{}, 88);
  VoxelGrid gr(geo, GridKind::Occupancy);
  for (int z = 20; z < 60; ++z)
    for (int y = 20; y < 60; ++y)
      for (int x = 20; x < 60; ++x) gr.at(x, y, z) = 1.0f;
  const VoxelGrid small = resize_grid(gr, 44);
  CHECK(small.geometry.voxel_size == doctest::Approx(geo.voxel_size * 2));
  CHECK((small.geometry.origin - geo.origin).norm() < 1e-12);
  CHECK(small.at(20, 20, 20) == 1.0f);
  CHECK(small.at(5, 5, 5) == 0.0f);
  CHECK(small.occupied_count() == 20u * 20u * 20u);

  GridGeometry flat;
  flat.dims = {4, 4, 2};
  CHECK_THROWS_AS(resize_grid(VoxelGrid(flat, GridKind::Occupancy), 2), ValidationError);
}

TEST_CASE("grid_to_points returns voxel centers") {
  CubeFrame f;
  f.side = 8;
  VoxelGrid gr(frame_geometry(f, 4), GridKind::Occupancy);
  gr.at(0, 0, 0) = 1;
  gr.at(3, 2, 1) = 1;
  const PointCloud c = grid_to_points(gr, 0.5);
  REQUIRE(c.size() == 2);
  CHECK(c.points[0].isApprox(Vec3(-3, -3, -3)));
  CHECK(c.points[1].isApprox(Vec3(3, 1, -1)));
}

TEST_CASE("vertex normalization round-trips") {
  auto& g = oracle::rng();
  Mesh m = oracle::random_mesh(g, 50, 40);
  for (auto& v : m.vertices) v = v * 100 + Vec3(0, 0, 400);
  CubeFrame f;
  f.center = Vec3(5, 5, 410);
  const Mesh n = normalize_vertices(m, f);
  for (const auto& v : n.vertices) CHECK(v.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  const Mesh back = denormalize_vertices(n, f);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK((back.vertices[i] - m.vertices[i]).norm() < 1e-9);
}
