#include "handvox/cli.hpp"

#include "handvox/augment.hpp"
#include "handvox/error.hpp"
#include "handvox/heatmap.hpp"
#include "handvox/io.hpp"
#include "handvox/metrics.hpp"
#include "handvox/register.hpp"
#include "handvox/synthhand.hpp"
#include "handvox/voxgrid.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>

namespace handvox::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  // shared
  double cube_size = kDefaultCubeSide;
  int grid_dim = kInputGridDim;
  int heatmap_dim = kHeatmapGridDim;
  int shape_dim = kShapeGridDim;
  double sigma = 0.0;
  std::string method = "dispfield";
  std::optional<int> iterations;
  double lambda = 0.5;
  std::uint64_t seed = 7;
  std::string report;

  // synth
  int count = 1;
  std::string out_dir;
  double perturb = 8.0;

  // inputs / outputs
  std::string depth_in, mesh_in, joints_in, grid_in, heatmaps_in, target_in;
  std::string out, joints_out;
  std::vector<double> center;
  std::vector<double> intrinsics;

  // eval
  std::string pred_mesh, gt_mesh, pred_joints, gt_joints, pred_grid, gt_grid;
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

void require_dim(int dim, const char* flag) {
  require(dim >= 1 && dim <= io::kMaxGridDim, std::string(flag) + " must lie in [1, 512]");
}

CameraIntrinsics camera_from(const Options& o) {
  if (o.intrinsics.empty()) return default_camera();
  require(o.intrinsics.size() == 4, "--intrinsics expects fx,fy,cx,cy");
  CameraIntrinsics k{o.intrinsics[0], o.intrinsics[1], o.intrinsics[2], o.intrinsics[3]};
  k.validate();
  return k;
}

// Cube from --center, or else from the palm center of a 21-joint file.
CubeFrame frame_from(const Options& o) {
  CubeFrame f;
  f.side = o.cube_size;
  if (!o.center.empty()) {
    require(o.center.size() == 3, "--center expects x,y,z");
    f.center = Vec3(o.center[0], o.center[1], o.center[2]);
  } else {
    require(!o.joints_in.empty(), "a cube center is required: pass --center or --joints");
    const JointSet j = io::read_joints(io::read_text_file(o.joints_in));
    require(j.size() == static_cast<std::size_t>(kHandJointCount) || j.size() == 22,
            "--joints must hold 21 or 22 joints to derive the palm center");
    f.center = palm_center(j);
  }
  f.validate();
  return f;
}

void emit_report(const Options& o, const json& report, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (o.report.empty() || o.report == "-") {
    out << text;
  } else {
    io::write_text_file(o.report, text);
  }
}

std::string sample_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "hand_%04d", i);
  return buf;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// ---- subcommands -------------------------------------------------------------

void cmd_synth(const Options& o, std::ostream& out) {
  require(o.count >= 1, "--count must be >= 1");
  require(!o.out_dir.empty(), "--out is required");
  require(o.perturb >= 0.0, "--perturb must be >= 0");
  require(o.cube_size > 0.0, "--cube-size must be positive");
  require_dim(o.grid_dim, "--grid-dim");
  require_dim(o.shape_dim, "--shape-dim");

  const CameraIntrinsics cam = default_camera();
  const HandModel& model = HandModel::standard();
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) throw IoError("cannot create " + o.out_dir + ": " + ec.message());

  json manifest;
  manifest["camera"] = {{"fx", cam.fx}, {"fy", cam.fy}, {"cx", cam.cx}, {"cy", cam.cy},
                        {"width", kDefaultImageWidth}, {"height", kDefaultImageHeight}};
  manifest["cube_size"] = o.cube_size;
  manifest["seed"] = o.seed;
  manifest["samples"] = json::array();

  for (int i = 0; i < o.count; ++i) {
    const std::uint64_t s = splitmix(o.seed + static_cast<std::uint64_t>(i));
    PoseParams pose = sample_pose(s);
    PosedHand hand = pose_hand(model, pose);
    const Vec3 place = default_hand_placement();
    for (auto& v : hand.mesh.vertices) v += place;
    for (auto& j : hand.joints.joints) j += place;

    CubeFrame frame;
    frame.center = palm_center(hand.joints);
    frame.side = o.cube_size;
    const DepthMap depth = render_depth(hand.mesh, cam, kDefaultImageWidth, kDefaultImageHeight);
    const PointCloud cloud = crop_points(depth_to_points(depth, cam), frame);
    const VoxelGrid vd = voxelize_points(cloud, frame, o.grid_dim);
    const VoxelGrid vs = voxelize_mesh(hand.mesh, frame, o.shape_dim);
    const Mesh init = perturb_surface(hand.mesh, splitmix(s ^ 0x5eedULL), o.perturb);

    const fs::path base = fs::path(o.out_dir) / sample_name(i);
    io::write_text_file(base.string() + ".obj", io::write_mesh(hand.mesh));
    io::write_text_file(base.string() + ".init.obj", io::write_mesh(init));
    io::write_text_file(base.string() + ".joints.json", io::write_joints(hand.joints));
    io::write_text_file(base.string() + ".joints22.json", io::write_joints(joints22(hand.joints)));
    io::write_file(base.string() + ".depth.pgm", io::write_depth(depth));
    io::write_file(base.string() + ".vd.vgrd", io::write_grid(vd));
    io::write_file(base.string() + ".vs.vgrd", io::write_grid(vs));

    manifest["samples"].push_back({{"name", sample_name(i)},
                                   {"pose_seed", s},
                                   {"palm_center", vec_json(frame.center)},
                                   {"depth_points", cloud.size()},
                                   {"depth_voxels", vd.occupied_count()},
                                   {"shape_voxels", vs.occupied_count()}});
  }
  io::write_text_file(fs::path(o.out_dir) / "manifest.json", manifest.dump(2) + "\n");
  if (!o.report.empty()) emit_report(o, manifest, out);
}

void cmd_voxelize(const Options& o, std::ostream& out) {
  require(o.depth_in.empty() != o.mesh_in.empty(), "pass exactly one of --depth or --mesh");
  require(!o.out.empty(), "--out is required");
  require_dim(o.grid_dim, "--grid-dim");
  require_dim(o.shape_dim, "--shape-dim");
  const CubeFrame frame = frame_from(o);

  VoxelGrid grid;
  json report;
  if (!o.depth_in.empty()) {
    const CameraIntrinsics cam = camera_from(o);
    const DepthMap depth = io::read_depth(io::read_file(o.depth_in));
    const PointCloud all = depth_to_points(depth, cam);
    const PointCloud cloud = crop_points(all, frame);
    grid = voxelize_points(cloud, frame, o.grid_dim);
    report["points"] = all.size();
    report["points_in_cube"] = cloud.size();
  } else {
    const Mesh mesh = io::read_mesh(io::read_text_file(o.mesh_in));
    grid = voxelize_mesh(mesh, frame, o.shape_dim);
  }
  report["dims"] = grid.geometry.dims;
  report["occupied"] = grid.occupied_count();
  io::write_file(o.out, io::write_grid(grid));
  if (!o.report.empty()) emit_report(o, report, out);
}

void cmd_heatmap(const Options& o, std::ostream& out) {
  require(!o.joints_in.empty(), "--joints is required");
  require(!o.out.empty(), "--out is required");
  require_dim(o.heatmap_dim, "--heatmap-dim");
  require(o.sigma >= 0.0, "--sigma must be >= 0 (0 selects the default)");
  const CubeFrame frame = frame_from(o);
  const JointSet joints = io::read_joints(io::read_text_file(o.joints_in));
  require(joints.size() >= 1, "--joints holds no joint");
  const HeatmapStack stack = make_heatmaps(joints, frame, o.heatmap_dim, o.sigma);
  const JointSet decoded = decode_heatmaps(stack);

  io::write_file(o.out, io::write_heatmaps(stack));
  if (!o.joints_out.empty()) io::write_text_file(o.joints_out, io::write_joints(decoded));
  if (!o.report.empty()) {
    emit_report(o, {{"joints", joints.size()}, {"sigma", stack.sigma}, {"decode_error", joint_error(decoded, joints)}},
                out);
  }
}

void cmd_augment(const Options& o, std::ostream& out) {
  require(o.grid_in.empty() != o.heatmaps_in.empty(), "pass exactly one of --input or --heatmaps");
  require(!o.out.empty(), "--out is required");
  require(o.joints_out.empty() || !o.joints_in.empty(), "--joints-out needs --joints");
  const AugmentParams p = sample_params(o.seed);

  json report;
  report["params"] = {{"theta_x", p.theta_x}, {"theta_y", p.theta_y}, {"theta_z", p.theta_z},
                      {"scale", p.scale},     {"translation", vec_json(p.translation)}};
  io::Bytes payload;
  GridGeometry geometry;
  if (!o.grid_in.empty()) {
    const VoxelGrid grid = io::read_grid(io::read_file(o.grid_in));
    geometry = grid.geometry;
    payload = io::write_grid(transform_grid(grid, p));
  } else {
    const HeatmapStack stack = io::read_heatmaps(io::read_file(o.heatmaps_in));
    require(stack.size() >= 1, "heatmap stack is empty");
    geometry = stack.maps.front().geometry;
    payload = io::write_heatmaps(transform_heatmaps(stack, p));
  }
  std::optional<TransformedJoints> moved;
  if (!o.joints_in.empty()) {
    const JointSet joints = io::read_joints(io::read_text_file(o.joints_in));
    moved = transform_joints(joints, geometry_frame(geometry), geometry.dims[0], p);
    report["joints_inside_frame"] = moved->inside_frame;
  }

  io::write_file(o.out, payload);
  if (moved && !o.joints_out.empty()) io::write_text_file(o.joints_out, io::write_joints(moved->joints));
  if (!o.report.empty()) emit_report(o, report, out);
}

void cmd_register(const Options& o, std::ostream& out) {
  require(!o.mesh_in.empty(), "--mesh is required");
  require(!o.target_in.empty(), "--target is required");
  require(!o.out.empty(), "--out is required");
  require(o.method == "dispfield" || o.method == "nrga", "--method must be dispfield or nrga");
  require(o.lambda > 0.0 && o.lambda <= 1.0, "--lambda must lie in (0, 1]");
  require(!o.iterations || *o.iterations >= 1, "--iterations must be >= 1");

  RegisterOptions opts;
  opts.smoothing_lambda = o.lambda;
  if (o.method == "nrga") {
    opts.method = RegistrationMethod::Nrga;
    if (o.iterations) opts.nrga.iterations = *o.iterations;
  } else {
    opts.method = RegistrationMethod::DisplacementField;
    if (o.iterations) opts.smoothing_iterations = *o.iterations;
  }

  const Mesh mesh = io::read_mesh(io::read_text_file(o.mesh_in));
  const VoxelGrid target = io::read_grid(io::read_file(o.target_in));
  require(target.geometry.is_cubic(), "--target must be a cubic grid");
  const CubeFrame frame = geometry_frame(target.geometry);

  RegistrationReport report;
  const Mesh fitted = register_mesh(mesh, target, frame, opts, &report);
  io::write_text_file(o.out, io::write_mesh(fitted));
  if (!o.report.empty()) {
    emit_report(o,
                {{"method", o.method},
                 {"status", to_string(report.status)},
                 {"vertices", fitted.vertex_count()},
                 {"mean_target_distance", report.trace}},
                out);
  }
}

void cmd_eval(const Options& o, std::ostream& out) {
  require(!o.pred_mesh.empty() || !o.pred_joints.empty() || !o.pred_grid.empty(),
          "nothing to evaluate: pass --pred-mesh, --pred-joints or --pred-grid");
  require(o.pred_mesh.empty() == o.gt_mesh.empty(), "--pred-mesh and --gt-mesh go together");
  require(o.pred_joints.empty() == o.gt_joints.empty(), "--pred-joints and --gt-joints go together");
  require(o.pred_grid.empty() == o.gt_grid.empty(), "--pred-grid and --gt-grid go together");

  json metrics = json::object();
  if (!o.pred_joints.empty()) {
    const JointSet pred = io::read_joints(io::read_text_file(o.pred_joints));
    const JointSet gt = io::read_joints(io::read_text_file(o.gt_joints));
    metrics["joint_error"] = joint_error(pred, gt);
  }
  if (!o.pred_mesh.empty()) {
    const Mesh pred = io::read_mesh(io::read_text_file(o.pred_mesh));
    const Mesh gt = io::read_mesh(io::read_text_file(o.gt_mesh));
    metrics["vertex_error"] = vertex_error(pred, gt);
    if (!o.center.empty() || !o.gt_joints.empty() || !o.joints_in.empty()) {
      Options fo = o;
      if (fo.joints_in.empty()) fo.joints_in = o.gt_joints;
      const CubeFrame frame = frame_from(fo);
      metrics["vertex_loss"] =
          euclidean_vertex_loss(normalize_vertices(pred, frame), normalize_vertices(gt, frame)).value;
    }
  }
  if (!o.pred_grid.empty()) {
    const VoxelGrid pred = io::read_grid(io::read_file(o.pred_grid));
    const VoxelGrid gt = io::read_grid(io::read_file(o.gt_grid));
    metrics["shape_error"] = shape_error(pred, gt);
  }
  for (const auto& [name, value] : metrics.items()) {
    require(std::isfinite(value.get<double>()), "metric " + name + " is not finite");
  }
  emit_report(o, metrics, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Voxel-based hand shape and pose geometry toolkit", "handvox"};
  app.require_subcommand(1);
  Options o;

  auto add_cube = [&](CLI::App* c) {
    c->add_option("--cube-size", o.cube_size, "Cube edge in mm")->capture_default_str();
    c->add_option("--center", o.center, "Cube center x,y,z in mm")->delimiter(',')->expected(3);
  };
  auto add_report = [&](CLI::App* c) {
    c->add_option("--report", o.report, "Write a JSON report to this path ('-' for stdout)");
  };

  auto* synth = app.add_subcommand("synth", "Generate synthetic hands: meshes, joints, depth maps and grids");
  synth->add_option("--count", o.count, "Number of samples")->capture_default_str();
  synth->add_option("--seed", o.seed, "Base random seed")->capture_default_str();
  synth->add_option("--out", o.out_dir, "Output directory")->required();
  synth->add_option("--perturb", o.perturb, "Mean amplitude (mm) of the perturbed initial mesh")->capture_default_str();
  synth->add_option("--cube-size", o.cube_size, "Cube edge in mm")->capture_default_str();
  synth->add_option("--grid-dim", o.grid_dim, "Depth voxel grid resolution")->capture_default_str();
  synth->add_option("--shape-dim", o.shape_dim, "Shape voxel grid resolution")->capture_default_str();
  add_report(synth);

  auto* vox = app.add_subcommand("voxelize", "Voxelize a depth map (PGM) or a mesh (OBJ)");
  vox->add_option("--depth", o.depth_in, "Depth map, 16-bit PGM in mm");
  vox->add_option("--mesh", o.mesh_in, "Mesh, OBJ");
  vox->add_option("--joints", o.joints_in, "Joints JSON; the palm center sets the cube");
  vox->add_option("--intrinsics", o.intrinsics, "fx,fy,cx,cy")->delimiter(',')->expected(4);
  vox->add_option("--out", o.out, "Output grid (VGRD)")->required();
  vox->add_option("--grid-dim", o.grid_dim, "Resolution for depth input")->capture_default_str();
  vox->add_option("--shape-dim", o.shape_dim, "Resolution for mesh input")->capture_default_str();
  add_cube(vox);
  add_report(vox);

  auto* hm = app.add_subcommand("heatmap", "Build 3D Gaussian joint heatmaps");
  hm->add_option("--joints", o.joints_in, "Joints JSON")->required();
  hm->add_option("--out", o.out, "Output heatmap stack")->required();
  hm->add_option("--decoded", o.joints_out, "Also write the decoded joints (JSON)");
  hm->add_option("--heatmap-dim", o.heatmap_dim, "Heatmap grid resolution")->capture_default_str();
  hm->add_option("--sigma", o.sigma, "Gaussian width in mm (0 = 1.7 voxels)")->capture_default_str();
  add_cube(hm);
  add_report(hm);

  auto* aug = app.add_subcommand("augment", "Randomly rotate, scale and translate a grid or heatmap stack");
  aug->add_option("--input", o.grid_in, "Input grid (VGRD)");
  aug->add_option("--heatmaps", o.heatmaps_in, "Input heatmap stack");
  aug->add_option("--joints", o.joints_in, "Joints JSON to transform alongside");
  aug->add_option("--joints-out", o.joints_out, "Transformed joints JSON");
  aug->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  aug->add_option("--out", o.out, "Output file")->required();
  add_report(aug);

  auto* reg = app.add_subcommand("register", "Fit a surface mesh to a voxelized shape");
  reg->add_option("--mesh", o.mesh_in, "Initial mesh (OBJ)")->required();
  reg->add_option("--target", o.target_in, "Target shape grid (VGRD)")->required();
  reg->add_option("--out", o.out, "Registered mesh (OBJ)")->required();
  reg->add_option("--method", o.method, "dispfield or nrga")->capture_default_str();
  reg->add_option("--iterations", o.iterations, "NRGA iterations, or smoothing iterations for dispfield");
  reg->add_option("--lambda", o.lambda, "Laplacian smoothing weight")->capture_default_str();
  add_report(reg);

  auto* ev = app.add_subcommand("eval", "Compute error metrics; prints JSON");
  ev->add_option("--pred-mesh", o.pred_mesh, "Predicted mesh (OBJ)");
  ev->add_option("--gt-mesh", o.gt_mesh, "Ground-truth mesh (OBJ)");
  ev->add_option("--pred-joints", o.pred_joints, "Predicted joints (JSON)");
  ev->add_option("--gt-joints", o.gt_joints, "Ground-truth joints (JSON)");
  ev->add_option("--pred-grid", o.pred_grid, "Predicted shape grid (VGRD)");
  ev->add_option("--gt-grid", o.gt_grid, "Ground-truth shape grid (VGRD)");
  ev->add_option("--joints", o.joints_in, "Joints whose palm center normalizes vertices");
  add_cube(ev);
  add_report(ev);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "handvox: " << e.what() << "\n";
    return kExitValidation;
  }

  const std::vector<std::pair<CLI::App*, std::function<void(const Options&, std::ostream&)>>> commands{
      {synth, cmd_synth}, {vox, cmd_voxelize}, {hm, cmd_heatmap},
      {aug, cmd_augment}, {reg, cmd_register}, {ev, cmd_eval}};
  try {
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) fn(o, out);
    }
  } catch (const IoError& e) {
    err << "handvox: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "handvox: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace handvox::cli
