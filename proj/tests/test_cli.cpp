#include "doctest.h"
#include "oracles.hpp"

#include "handvox/cli.hpp"
#include "handvox/io.hpp"
#include "handvox/metrics.hpp"
#include "handvox/synthhand.hpp"
#include "handvox/voxgrid.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"

using namespace handvox;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("help and usage errors") {
  const Run h = call({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("synth") != std::string::npos);
  CHECK(h.out.find("register") != std::string::npos);
  CHECK(call({}).code == cli::kExitValidation);
  CHECK(call({"frobnicate"}).code == cli::kExitValidation);
  const Run r = call({"register", "--mesh", "a.obj"});
  CHECK(r.code == cli::kExitValidation);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("synth writes every artifact and is reproducible") {
  const std::string dir = oracle::temp_dir("cli_synth");
  REQUIRE(call({"synth", "--count", "2", "--seed", "11", "--out", dir + "/a", "--shape-dim", "32", "--grid-dim", "32"}).code == 0);
  REQUIRE(call({"synth", "--count", "2", "--seed", "11", "--out", dir + "/b", "--shape-dim", "32", "--grid-dim", "32"}).code == 0);
  for (const char* suffix : {".obj", ".init.obj", ".joints.json", ".joints22.json", ".depth.pgm", ".vd.vgrd", ".vs.vgrd"}) {
    for (const char* name : {"hand_0000", "hand_0001"}) {
      const std::string f = std::string(name) + suffix;
      REQUIRE(fs::exists(dir + "/a/" + f));
      CHECK(io::read_file(dir + "/a/" + f) == io::read_file(dir + "/b/" + f));
    }
  }
  CHECK(io::read_file(dir + "/a/hand_0000.obj") != io::read_file(dir + "/a/hand_0001.obj"));
  const auto manifest = nlohmann::json::parse(io::read_text_file(dir + "/a/manifest.json"));
  CHECK(manifest["samples"].size() == 2);
  CHECK(io::read_joints(io::read_text_file(dir + "/a/hand_0000.joints.json")).size() == 21);
  CHECK(io::read_joints(io::read_text_file(dir + "/a/hand_0000.joints22.json")).size() == 22);
  CHECK(call({"synth", "--count", "0", "--out", dir + "/c"}).code == cli::kExitValidation);
  fs::remove_all(dir);
}

TEST_CASE("voxelize, heatmap, augment and eval work together") {
  const std::string dir = oracle::temp_dir("cli_chain");
  REQUIRE(call({"synth", "--count", "1", "--out", dir, "--shape-dim", "32", "--grid-dim", "32"}).code == 0);
  const std::string h = dir + "/hand_0000";

  REQUIRE(call({"voxelize", "--depth", h + ".depth.pgm", "--joints", h + ".joints.json", "--grid-dim", "32", "--out", dir + "/vd.vgrd"}).code == 0);
  {
    // the PGM holds whole millimeters, so compare against the rounded depth
    CubeFrame f;
    f.center = palm_center(io::read_joints(io::read_text_file(h + ".joints.json")));
    const DepthMap d = io::read_depth(io::read_file(h + ".depth.pgm"));
    const VoxelGrid expected = voxelize_points(crop_points(depth_to_points(d, default_camera()), f), f, 32);
    CHECK(io::read_grid(io::read_file(dir + "/vd.vgrd")).data == expected.data);
  }
  REQUIRE(call({"voxelize", "--mesh", h + ".obj", "--joints", h + ".joints.json", "--shape-dim", "32", "--out", dir + "/vs.vgrd"}).code == 0);
  CHECK(io::read_file(dir + "/vs.vgrd") == io::read_file(h + ".vs.vgrd"));
  CHECK(call({"voxelize", "--depth", h + ".depth.pgm", "--mesh", h + ".obj", "--joints", h + ".joints.json", "--out", dir + "/x"}).code ==
        cli::kExitValidation);

  const Run hm = call({"heatmap", "--joints", h + ".joints.json", "--out", dir + "/hm.bin", "--decoded", dir + "/dec.json", "--report", "-"});
  REQUIRE(hm.code == 0);
  CHECK(nlohmann::json::parse(hm.out)["joints"] == 21);
  const HeatmapStack stack = io::read_heatmaps(io::read_file(dir + "/hm.bin"));
  CHECK(stack.size() == 21);

  REQUIRE(call({"augment", "--heatmaps", dir + "/hm.bin", "--joints", h + ".joints.json", "--joints-out", dir + "/aug.json", "--seed", "3",
                "--out", dir + "/hm_aug.bin"})
              .code == 0);
  CHECK(io::read_heatmaps(io::read_file(dir + "/hm_aug.bin")).size() == 21);
  REQUIRE(call({"augment", "--input", dir + "/vd.vgrd", "--seed", "3", "--out", dir + "/vd_aug.vgrd"}).code == 0);
  CHECK(io::read_grid(io::read_file(dir + "/vd_aug.vgrd")).geometry.dims == Index3{32, 32, 32});

  const Run ev = call({"eval", "--pred-joints", dir + "/dec.json", "--gt-joints", h + ".joints.json", "--pred-mesh", h + ".init.obj",
                       "--gt-mesh", h + ".obj", "--pred-grid", dir + "/vs.vgrd", "--gt-grid", h + ".vs.vgrd"});
  REQUIRE(ev.code == 0);
  const auto m = nlohmann::json::parse(ev.out);
  CHECK(m["joint_error"].get<double>() < 10.0);
  const double verr = m["vertex_error"].get<double>();
  CHECK(verr == doctest::Approx(vertex_error(io::read_mesh(io::read_text_file(h + ".init.obj")), io::read_mesh(io::read_text_file(h + ".obj")))));
  CHECK(m.contains("vertex_loss"));
  CHECK(m["shape_error"].get<double>() < 1e-5);
  fs::remove_all(dir);
}

TEST_CASE("register writes a mesh with the same topology") {
  const std::string dir = oracle::temp_dir("cli_reg");
  REQUIRE(call({"synth", "--count", "1", "--seed", "3", "--out", dir}).code == 0);
  const std::string h = dir + "/hand_0000";
  for (const char* method : {"dispfield", "nrga"}) {
    const Run r = call({"register", "--mesh", h + ".init.obj", "--target", h + ".vs.vgrd", "--method", method, "--out", dir + "/fit.obj", "--report", "-"});
    REQUIRE(r.code == 0);
    const auto rep = nlohmann::json::parse(r.out);
    CHECK(rep["vertices"] == 1193);
    const Mesh fit = io::read_mesh(io::read_text_file(dir + "/fit.obj"));
    const Mesh init = io::read_mesh(io::read_text_file(h + ".init.obj"));
    CHECK(fit.faces == init.faces);
  }
  CHECK(call({"register", "--mesh", h + ".init.obj", "--target", h + ".vs.vgrd", "--method", "magic", "--out", dir + "/x.obj"}).code ==
        cli::kExitValidation);
  CHECK(call({"register", "--mesh", h + ".init.obj", "--target", h + ".vs.vgrd", "--lambda", "2", "--out", dir + "/x.obj"}).code ==
        cli::kExitValidation);
  fs::remove_all(dir);
}

TEST_CASE("I/O failures exit with code 2 and write nothing") {
  const std::string dir = oracle::temp_dir("cli_io");
  const Run r = call({"register", "--mesh", dir + "/missing.obj", "--target", dir + "/missing.vgrd", "--out", dir + "/fit.obj"});
  CHECK(r.code == cli::kExitIo);
  CHECK_FALSE(fs::exists(dir + "/fit.obj"));
  io::write_text_file(dir + "/bad.vgrd", "VGRDjunk");
  io::write_text_file(dir + "/m.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  CHECK(call({"register", "--mesh", dir + "/m.obj", "--target", dir + "/bad.vgrd", "--out", dir + "/fit.obj"}).code == cli::kExitIo);
  CHECK_FALSE(fs::exists(dir + "/fit.obj"));
  fs::remove_all(dir);
}

TEST_CASE("the installed binary reports exit codes") {
  const char* bin = std::getenv("HANDVOX_BIN");
  if (!bin) return;
  auto status = [&](const std::string& args) {
    const int s = std::system((std::string(bin) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status("--help") == 0);
  CHECK(status("eval") == 1);
  CHECK(status("eval --pred-joints /nonexistent/a.json --gt-joints /nonexistent/b.json") == 2);
}
