#include "doctest.h"
#include "oracles.hpp"

#include "handvox/error.hpp"
#include "handvox/io.hpp"
#include "handvox/synthhand.hpp"
#include "handvox/voxgrid.hpp"

#include <cstring>
#include <filesystem>

using namespace handvox;

namespace {

VoxelGrid random_grid(std::mt19937_64& g, int dim, GridKind kind) {
  CubeFrame f;
  f.center = Vec3(oracle::uniform(g, -20, 20), 3.25, 411.5);
  VoxelGrid gr(frame_geometry(f, dim), kind);
  for (auto& v : gr.data) {
    v = kind == GridKind::Occupancy ? (oracle::uniform(g, 0, 1) < 0.2 ? 1.0f : 0.0f)
                                    : static_cast<float>(oracle::uniform(g, 0, 1));
  }
  return gr;
}

std::uint32_t le32(const io::Bytes& b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[at + i];
  return v;
}

}  // namespace

TEST_CASE("grid round trip is bitwise and the header layout is fixed") {
  auto& g = oracle::rng();
  for (GridKind kind : {GridKind::Occupancy, GridKind::Probability}) {
    const VoxelGrid gr = random_grid(g, 64, kind);
    const io::Bytes b = io::write_grid(gr);
    CHECK(std::memcmp(b.data(), "VGRD", 4) == 0);
    CHECK(b[4] == 1);
    CHECK(b[5] == 0);
    CHECK(le32(b, 6) == 64u);
    CHECK(b[34] == static_cast<std::uint8_t>(kind));
    CHECK(b.size() == 35 + gr.data.size() * (kind == GridKind::Occupancy ? 1 : 4));
    const VoxelGrid back = io::read_grid(b);
    CHECK(back.kind == kind);
    CHECK(back.geometry.dims == gr.geometry.dims);
    CHECK(std::memcmp(back.data.data(), gr.data.data(), gr.data.size() * sizeof(float)) == 0);
    CHECK(io::write_grid(back) == b);
  }
}

TEST_CASE("grid reader rejects bad headers with offsets") {
  auto& g = oracle::rng();
  const io::Bytes good = io::write_grid(random_grid(g, 4, GridKind::Occupancy));
  io::Bytes bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(io::read_grid(bad), FormatError);
  bad = good;
  bad[6] = bad[7] = bad[8] = bad[9] = 0;
  CHECK_THROWS_WITH_AS(io::read_grid(bad), doctest::Contains("byte 6"), FormatError);
  bad = good;
  bad[6] = 0x01;
  bad[7] = 0x02;  // 513
  CHECK_THROWS_AS(io::read_grid(bad), FormatError);
  bad = good;
  bad[34] = 7;
  CHECK_THROWS_AS(io::read_grid(bad), FormatError);
  bad = good;
  bad.push_back(0);
  CHECK_THROWS_AS(io::read_grid(bad), FormatError);
  bad = good;
  bad.back() = 5;
  CHECK_THROWS_AS(io::read_grid(bad), FormatError);
}

TEST_CASE("field round trip is bitwise") {
  auto& g = oracle::rng();
  DisplacementField f(frame_geometry(CubeFrame{}, 16));
  for (auto& v : f.vectors) v = Vec3f(oracle::uniform(g, -9, 9), oracle::uniform(g, -9, 9), oracle::uniform(g, -9, 9));
  const io::Bytes b = io::write_field(f);
  CHECK(std::memcmp(b.data(), "VDSP", 4) == 0);
  CHECK(b[34] == 2);
  const DisplacementField back = io::read_field(b);
  CHECK(std::memcmp(back.vectors.data(), f.vectors.data(), f.vectors.size() * sizeof(Vec3f)) == 0);
  CHECK(io::write_field(back) == b);
  io::Bytes grid = io::write_grid(random_grid(g, 4, GridKind::Occupancy));
  CHECK_THROWS_AS(io::read_field(grid), FormatError);
}

TEST_CASE("heatmap stack round trip") {
  JointSet j;
  j.joints = {Vec3(1, 2, 3), Vec3(-20, 10, 0)};
  const HeatmapStack h = make_heatmaps(j, CubeFrame{}, 16, 0);
  const io::Bytes b = io::write_heatmaps(h);
  const HeatmapStack back = io::read_heatmaps(b);
  REQUIRE(back.size() == 2);
  CHECK(back.sigma == doctest::Approx(h.sigma).epsilon(1e-6));
  for (std::size_t n = 0; n < 2; ++n) CHECK(back.maps[n].data == h.maps[n].data);
  CHECK(io::write_heatmaps(back) == b);
}

TEST_CASE("mesh round trip of the hand keeps coordinates and topology") {
  const Mesh m = pose_hand(HandModel::standard(), sample_pose(3)).mesh;
  REQUIRE(m.vertex_count() == 1193);
  const std::string text = io::write_mesh(m);
  const Mesh back = io::read_mesh(text);
  CHECK(back.faces == m.faces);
  double worst = 0;
  for (std::size_t i = 0; i < m.vertex_count(); ++i) worst = std::max(worst, (back.vertices[i] - m.vertices[i]).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-6);
  CHECK(worst == 0.0);  // shortest round-trip formatting is exact
}

TEST_CASE("mesh reader diagnostics") {
  CHECK_THROWS_WITH_AS(io::read_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n"), doctest::Contains("line 4"), FormatError);
  CHECK_THROWS_AS(io::read_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n"), FormatError);
  CHECK_THROWS_AS(io::read_mesh("v 0 0\n"), FormatError);
  CHECK_THROWS_AS(io::read_mesh("v 0 0 zz\n"), FormatError);
  CHECK_THROWS_AS(io::read_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n"), FormatError);
  const Mesh m = io::read_mesh("# comment\nv 0 0 0\nv 1 0 0\nvn 0 0 1\nv 0 1 0\nf 1/1 2/2 3/3\n");
  CHECK(m.vertex_count() == 3);
  CHECK(m.faces.front().v == std::array<int, 3>{0, 1, 2});
}

TEST_CASE("depth PGM round trip with rounding") {
  DepthMap d(5, 3);
  for (std::size_t i = 0; i < d.depth.size(); ++i) d.depth[i] = 300.0 + 7.0 * i;
  d.depth[4] = 0;
  d.depth[5] = 412.4;
  d.depth[6] = 412.6;
  const io::Bytes b = io::write_depth(d);
  CHECK(std::string(b.begin(), b.begin() + 13) == "P5\n5 3\n65535\n");
  CHECK(b.size() == 13 + 2 * 15);
  const DepthMap back = io::read_depth(b);
  CHECK(back.width == 5);
  CHECK(back.height == 3);
  CHECK(back.depth[4] == 0);
  CHECK(back.depth[5] == 412);
  CHECK(back.depth[6] == 413);
  CHECK(back.depth[0] == 300);
  // big-endian samples
  CHECK(b[13] == (300 >> 8));
  CHECK(b[14] == (300 & 0xff));
  CHECK_THROWS_AS(io::read_depth(io::Bytes{'P', '6'}), FormatError);
}

TEST_CASE("joints JSON round trip and empty arrays") {
  auto& g = oracle::rng();
  JointSet j;
  for (int i = 0; i < 21; ++i) j.joints.emplace_back(oracle::uniform(g, -100, 100), oracle::uniform(g, -100, 100), oracle::uniform(g, 300, 500));
  const JointSet back = io::read_joints(io::write_joints(j));
  for (int i = 0; i < 21; ++i) CHECK((back.joints[i] - j.joints[i]).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(io::read_joints("[]").size() == 0);
  CHECK_THROWS_AS(io::read_joints("[[1,2]]"), FormatError);
  CHECK_THROWS_AS(io::read_joints("{\"a\":1}"), FormatError);
  CHECK_THROWS_AS(io::read_joints("[[1,2,\"x\"]]"), FormatError);
}

TEST_CASE("truncated binary inputs always fail with a diagnostic") {
  auto& g = oracle::rng();
  const io::Bytes grid = io::write_grid(random_grid(g, 6, GridKind::Probability));
  for (std::size_t n = 0; n < grid.size(); ++n) {
    CHECK_THROWS_AS(io::read_grid(std::span(grid.data(), n)), FormatError);
  }
  DepthMap d(4, 4);
  const io::Bytes pgm = io::write_depth(d);
  for (std::size_t n = 0; n < pgm.size(); ++n) CHECK_THROWS_AS(io::read_depth(std::span(pgm.data(), n)), FormatError);
}

TEST_CASE("file helpers report I/O errors") {
  const std::string dir = oracle::temp_dir("io");
  CHECK_THROWS_AS(io::read_file(dir + "/missing.bin"), IoError);
  CHECK_THROWS_AS(io::write_text_file(dir + "/no/such/dir/x.txt", "x"), IoError);
  io::write_text_file(dir + "/a.txt", "hello");
  CHECK(io::read_text_file(dir + "/a.txt") == "hello");
  std::filesystem::remove_all(dir);
}
