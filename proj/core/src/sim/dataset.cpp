#include "plenocal/sim/dataset.hpp"

#include <cmath>
#include <cstdio>

#include "plenocal/io/image_io.hpp"
#include "plenocal/io/json_io.hpp"
#include "plenocal/precalib/omega.hpp"

namespace plenocal {

namespace {

Json pose_to_json(const Pose& pose) {
  const Vec3 w = rodrigues_inverse(pose.R);
  Json j;
  j["rotation_rvec"] = {w.x(), w.y(), w.z()};
  j["translation_mm"] = {pose.t.x(), pose.t.y(), pose.t.z()};
  return j;
}

Pose pose_from_json(const Json& j) {
  const auto& r = j.at("rotation_rvec");
  const auto& t = j.at("translation_mm");
  require(r.size() == 3 && t.size() == 3, ErrorCode::Validation, "pose arrays must have 3 entries");
  Pose pose;
  pose.R = rodrigues(Vec3(r[0].get<double>(), r[1].get<double>(), r[2].get<double>()));
  pose.t = Vec3(t[0].get<double>(), t[1].get<double>(), t[2].get<double>());
  return pose;
}

std::string frame_name(const char* prefix, int index, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03d%s", prefix, index, suffix);
  return buf;
}

Json board_to_json(const CheckerboardSpec& board) {
  Json j;
  j["rows"] = board.rows;
  j["cols"] = board.cols;
  j["square_mm"] = board.square_mm;
  return j;
}

CheckerboardSpec board_from_json(const Json& j) {
  CheckerboardSpec board;
  board.rows = j.at("rows").get<int>();
  board.cols = j.at("cols").get<int>();
  board.square_mm = j.at("square_mm").get<double>();
  board.validate();
  return board;
}

double white_f_number_from_json(const Json& j) {
  if (j.contains("f_number")) return j.at("f_number").get<double>();
  if (j.contains("aperture_value"))
    return f_number_from_aperture_value(j.at("aperture_value").get<double>());
  fail(ErrorCode::Validation, "white entry needs an f_number or aperture_value");
}

}  // namespace

std::vector<SidecarCorner> exact_corner_truth(const CameraIntrinsics& intr, const Pose& pose,
                                              const CheckerboardSpec& board, double f_number,
                                              double containment_margin_px) {
  intr.validate();
  board.validate();
  std::vector<SidecarCorner> out;
  for (int id = 0; id < board.corner_count(); ++id) {
    const Vec3 p = board.corner(id);
    for (int l = 0; l < intr.grid_height; ++l) {
      for (int k = 0; k < intr.grid_width; ++k) {
        BapProjection bap;
        try {
          bap = project_bap(intr, pose, p, k, l);
        } catch (const Error&) {
          continue;  // on a focal plane for this lens; not observable
        }
        if (bap.u < 0 || bap.v < 0 || bap.u > intr.sensor_width - 1 ||
            bap.v > intr.sensor_height - 1)
          continue;
        const Vec2 mic = project_mic(intr, k, l);
        const double reach = mi_radius_px(intr, bap.type, f_number) - containment_margin_px;
        if (sqr(bap.u - mic.x()) + sqr(bap.v - mic.y()) > sqr(reach)) continue;
        out.push_back({id, k, l, bap.type, bap.u, bap.v, bap.rho, bap.virtual_depth});
      }
    }
  }
  return out;
}

void save_frame_truth(const std::filesystem::path& path, const FrameTruth& truth) {
  Json j;
  j["schema"] = "plenocal-frame-truth/1";
  j["pose"] = pose_to_json(truth.pose);
  Json corners = Json::array();
  for (const SidecarCorner& c : truth.corners)
    corners.push_back({c.corner_id, c.k, c.l, c.type, c.u, c.v, c.rho, c.virtual_depth});
  j["corners"] = std::move(corners);
  save_json(path, j);
}

FrameTruth load_frame_truth(const std::filesystem::path& path) {
  const Json j = load_json(path);
  try {
    require(j.at("schema").get<std::string>() == "plenocal-frame-truth/1", ErrorCode::Validation,
            "unsupported frame truth schema in " + path.string());
    FrameTruth truth;
    truth.pose = pose_from_json(j.at("pose"));
    for (const Json& c : j.at("corners")) {
      require(c.size() == 8, ErrorCode::Validation, "frame truth corner rows must have 8 entries");
      truth.corners.push_back({c[0].get<int>(), c[1].get<int>(), c[2].get<int>(),
                               c[3].get<int>(), c[4].get<double>(), c[5].get<double>(),
                               c[6].get<double>(), c[7].get<double>()});
    }
    return truth;
  } catch (const Json::exception& e) {
    fail(ErrorCode::Validation, "invalid frame truth " + path.string() + ": " + e.what());
  }
}

std::vector<CornerObservation> corner_observations(const FrameTruth& truth, int frame_n) {
  std::vector<CornerObservation> obs;
  obs.reserve(truth.corners.size());
  for (const SidecarCorner& c : truth.corners) obs.push_back({c.u, c.v, c.k, c.l, frame_n});
  return obs;
}

void save_dataset_descriptor(const std::filesystem::path& path, const DatasetDescriptor& ds) {
  Json j;
  j["schema"] = "plenocal-dataset/1";
  j["pixel_size_mm"] = ds.pixel_size_mm;
  j["main_focal_mm"] = ds.main_focal_mm;
  if (std::isfinite(ds.focus_distance_mm))
    j["focus_distance_mm"] = ds.focus_distance_mm;
  else
    j["focus_distance_mm"] = nullptr;
  j["scene_f_number"] = ds.scene_f_number;
  j["arrangement"] = arrangement_name(ds.arrangement);
  j["board"] = board_to_json(ds.board);
  Json whites = Json::array();
  for (const auto& w : ds.whites) whites.push_back({{"path", w.path}, {"f_number", w.f_number}});
  j["whites"] = std::move(whites);
  j["white_reference"] = {{"path", ds.white_reference.path},
                          {"f_number", ds.white_reference.f_number}};
  j["devignette"] = ds.devignette_path;
  auto frames_to_json = [](const std::vector<DatasetDescriptor::Frame>& frames, bool with_dz) {
    Json arr = Json::array();
    for (const auto& f : frames) {
      Json e;
      e["image"] = f.image;
      if (!f.truth.empty()) e["truth"] = f.truth;
      if (with_dz) e["delta_z_mm"] = f.delta_z_mm;
      arr.push_back(std::move(e));
    }
    return arr;
  };
  j["calibration"] = frames_to_json(ds.calibration, false);
  j["evaluation"] = frames_to_json(ds.evaluation, true);
  if (!ds.ground_truth_intrinsics.empty()) j["ground_truth_intrinsics"] = ds.ground_truth_intrinsics;
  if (!ds.mic_truth.empty()) j["mic_truth"] = ds.mic_truth;
  save_json(path, j);
}

DatasetDescriptor load_dataset_descriptor(const std::filesystem::path& path) {
  const Json j = load_json(path);
  try {
    require(j.at("schema").get<std::string>() == "plenocal-dataset/1", ErrorCode::Validation,
            "unsupported dataset schema in " + path.string());
    DatasetDescriptor ds;
    ds.root = path.parent_path();
    ds.pixel_size_mm = j.at("pixel_size_mm").get<double>();
    ds.main_focal_mm = j.at("main_focal_mm").get<double>();
    const Json& fd = j.at("focus_distance_mm");
    ds.focus_distance_mm =
        fd.is_null() ? std::numeric_limits<double>::infinity() : fd.get<double>();
    ds.scene_f_number = j.value("scene_f_number", 0.0);
    ds.arrangement = arrangement_from_name(j.at("arrangement").get<std::string>());
    ds.board = board_from_json(j.at("board"));
    for (const Json& w : j.at("whites"))
      ds.whites.push_back({w.at("path").get<std::string>(), white_f_number_from_json(w)});
    if (j.contains("white_reference"))
      ds.white_reference = {j.at("white_reference").at("path").get<std::string>(),
                            white_f_number_from_json(j.at("white_reference"))};
    ds.devignette_path = j.value("devignette", std::string());
    auto frames_from_json = [](const Json& arr) {
      std::vector<DatasetDescriptor::Frame> frames;
      for (const Json& e : arr)
        frames.push_back({e.at("image").get<std::string>(), e.value("truth", std::string()),
                          e.value("delta_z_mm", 0.0)});
      return frames;
    };
    ds.calibration = frames_from_json(j.at("calibration"));
    if (j.contains("evaluation")) ds.evaluation = frames_from_json(j.at("evaluation"));
    ds.ground_truth_intrinsics = j.value("ground_truth_intrinsics", std::string());
    ds.mic_truth = j.value("mic_truth", std::string());
    return ds;
  } catch (const Json::exception& e) {
    fail(ErrorCode::Validation, "invalid dataset descriptor " + path.string() + ": " + e.what());
  }
}

DatasetDescriptor generate_dataset(const CameraIntrinsics& truth, const DatasetPlan& plan,
                                   const std::filesystem::path& root) {
  truth.validate();
  plan.board.validate();
  require(!plan.white_f_numbers.empty(), ErrorCode::Validation,
          "dataset plan needs at least one white aperture");
  require(!plan.calib_poses.empty(), ErrorCode::Validation,
          "dataset plan needs at least one calibration pose");

  namespace fs = std::filesystem;
  fs::create_directories(root / "whites");
  fs::create_directories(root / "calib");
  if (plan.eval_steps > 0) fs::create_directories(root / "eval");

  DatasetDescriptor ds;
  ds.root = root;
  ds.pixel_size_mm = truth.pixel_size;
  ds.main_focal_mm = truth.F;
  ds.focus_distance_mm = plan.focus_distance_mm;
  ds.scene_f_number = plan.render.f_number;
  ds.board = plan.board;
  ds.arrangement = truth.arrangement;

  for (std::size_t i = 0; i < plan.white_f_numbers.size(); ++i) {
    const double n = plan.white_f_numbers[i];
    const std::string name = "whites/" + frame_name("white", static_cast<int>(i), ".png");
    save_image((root / name).string(), render_white(truth, n, plan.white), 16);
    ds.whites.push_back({name, n});
  }
  {
    const std::string name = "whites/reference.png";
    save_image((root / name).string(), render_white_reference(truth, plan.white), 16);
    ds.white_reference = {name, tiling_f_number(truth)};
  }

  {
    // the devignetting frame divides into every raw, so spend extra rays on it
    SceneRenderOptions opt = plan.render;
    opt.rays_per_pixel *= 4;
    save_image((root / "devignette.png").string(), render_white_diffuse(truth, opt), 16);
    ds.devignette_path = "devignette.png";
  }

  for (std::size_t i = 0; i < plan.calib_poses.size(); ++i) {
    const Pose& pose = plan.calib_poses[i];
    SceneRenderOptions opt = plan.render;
    opt.seed = plan.render.seed ^ (0x100000001ULL * (i + 1));
    const std::string image = "calib/" + frame_name("frame", static_cast<int>(i), ".png");
    const std::string sidecar = "calib/" + frame_name("frame", static_cast<int>(i), "_truth.json");
    save_image((root / image).string(), render_checkerboard(truth, pose, plan.board, opt), 16);
    save_frame_truth(root / sidecar,
                     {pose, exact_corner_truth(truth, pose, plan.board, opt.f_number,
                                               plan.containment_margin_px)});
    ds.calibration.push_back({image, sidecar, 0.0});
  }

  for (int step = 0; plan.eval_steps > 0 && step <= plan.eval_steps; ++step) {
    Pose pose = plan.eval_base;
    pose.t.z() += step * plan.eval_step_mm;
    SceneRenderOptions opt = plan.render;
    opt.seed = plan.render.seed ^ (0x200000002ULL * (step + 1));
    const std::string image = "eval/" + frame_name("step", step, ".png");
    const std::string sidecar = "eval/" + frame_name("step", step, "_truth.json");
    save_image((root / image).string(), render_checkerboard(truth, pose, plan.board, opt), 16);
    save_frame_truth(root / sidecar,
                     {pose, exact_corner_truth(truth, pose, plan.board, opt.f_number,
                                               plan.containment_margin_px)});
    ds.evaluation.push_back({image, sidecar, step * plan.eval_step_mm});
  }

  save_intrinsics(root / "truth_intrinsics.json", truth);
  ds.ground_truth_intrinsics = "truth_intrinsics.json";

  {
    Json j;
    j["schema"] = "plenocal-mic-truth/1";
    Json mics = Json::array();
    for (int l = 0; l < truth.grid_height; ++l) {
      for (int k = 0; k < truth.grid_width; ++k) {
        const Vec2 mic = project_mic(truth, k, l);
        mics.push_back({k, l, truth.lens_type(k, l), mic.x(), mic.y()});
      }
    }
    j["mics"] = std::move(mics);
    save_json(root / "mic_truth.json", j);
    ds.mic_truth = "mic_truth.json";
  }

  save_dataset_descriptor(root / "dataset.json", ds);
  return ds;
}

}  // namespace plenocal
