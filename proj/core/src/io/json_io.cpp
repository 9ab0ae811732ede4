#include "plenocal/io/json_io.hpp"

#include <fstream>

#include "plenocal/error.hpp"

namespace plenocal {

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Io, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void save_json(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::Io, "cannot write " + path.string());
  out << doc.dump(2) << "\n";
  require(out.good(), ErrorCode::Io, "write failed for " + path.string());
}

Json intrinsics_to_json(const CameraIntrinsics& intr) {
  Json doc;
  doc["schema"] = "plenocal-intrinsics/1";
  doc["main_lens"] = {{"focal_mm", intr.F}, {"principal_point_px", {intr.u0, intr.v0}}};
  doc["distortion"] = {
      {"radial", {intr.distortion.q1, intr.distortion.q2, intr.distortion.q3}},
      {"tangential", {intr.distortion.p1, intr.distortion.p2}}};
  doc["gaps"] = {{"mla_to_sensor_mm", intr.d}, {"main_to_mla_mm", intr.D}};
  doc["mla"] = {{"offset_mm", {intr.tx, intr.ty}},
                {"rotation_rad",
                 {intr.mla_rotation.x(), intr.mla_rotation.y(), intr.mla_rotation.z()}},
                {"pitch_mm", intr.pitch},
                {"focals_mm", intr.focals},
                {"arrangement", arrangement_name(intr.arrangement)},
                {"grid", {intr.grid_width, intr.grid_height}}};
  doc["sensor"] = {{"pixel_size_mm", intr.pixel_size},
                   {"size_px", {intr.sensor_width, intr.sensor_height}}};
  return doc;
}

CameraIntrinsics intrinsics_from_json(const Json& doc) {
  try {
    CameraIntrinsics intr;
    const auto& main = doc.at("main_lens");
    intr.F = main.at("focal_mm").get<double>();
    intr.u0 = main.at("principal_point_px").at(0).get<double>();
    intr.v0 = main.at("principal_point_px").at(1).get<double>();
    const auto& dist = doc.at("distortion");
    intr.distortion.q1 = dist.at("radial").at(0).get<double>();
    intr.distortion.q2 = dist.at("radial").at(1).get<double>();
    intr.distortion.q3 = dist.at("radial").at(2).get<double>();
    intr.distortion.p1 = dist.at("tangential").at(0).get<double>();
    intr.distortion.p2 = dist.at("tangential").at(1).get<double>();
    const auto& gaps = doc.at("gaps");
    intr.d = gaps.at("mla_to_sensor_mm").get<double>();
    intr.D = gaps.at("main_to_mla_mm").get<double>();
    const auto& mla = doc.at("mla");
    intr.tx = mla.at("offset_mm").at(0).get<double>();
    intr.ty = mla.at("offset_mm").at(1).get<double>();
    intr.mla_rotation = Vec3(mla.at("rotation_rad").at(0).get<double>(),
                             mla.at("rotation_rad").at(1).get<double>(),
                             mla.at("rotation_rad").at(2).get<double>());
    intr.pitch = mla.at("pitch_mm").get<double>();
    intr.focals = mla.at("focals_mm").get<std::vector<double>>();
    intr.arrangement = arrangement_from_name(mla.at("arrangement").get<std::string>());
    intr.grid_width = mla.at("grid").at(0).get<int>();
    intr.grid_height = mla.at("grid").at(1).get<int>();
    const auto& sensor = doc.at("sensor");
    intr.pixel_size = sensor.at("pixel_size_mm").get<double>();
    intr.sensor_width = sensor.at("size_px").at(0).get<int>();
    intr.sensor_height = sensor.at("size_px").at(1).get<int>();
    intr.validate();
    return intr;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Validation, std::string("invalid intrinsics document: ") + e.what());
  }
}

void save_intrinsics(const std::filesystem::path& path, const CameraIntrinsics& intr) {
  save_json(path, intrinsics_to_json(intr));
}

CameraIntrinsics load_intrinsics(const std::filesystem::path& path) {
  return intrinsics_from_json(load_json(path));
}

Json mia_grid_to_json(const MiaGrid& grid) {
  Json doc;
  doc["schema"] = "plenocal-mia-grid/1";
  doc["arrangement"] = arrangement_name(grid.arrangement);
  doc["grid"] = {grid.grid_width, grid.grid_height};
  doc["pitch_px"] = grid.pitch_px;
  doc["rotation_rad"] = grid.vartheta_z;
  doc["origin_px"] = {grid.origin_px.x(), grid.origin_px.y()};
  doc["tau_px"] = {grid.tau_x, grid.tau_y};
  Json centers = Json::array();
  for (const auto& [key, c] : grid.centers)
    centers.push_back({key.first, key.second, c.x(), c.y()});
  doc["centers"] = std::move(centers);
  return doc;
}

MiaGrid mia_grid_from_json(const Json& doc) {
  try {
    MiaGrid grid;
    grid.arrangement = arrangement_from_name(doc.at("arrangement").get<std::string>());
    grid.grid_width = doc.at("grid").at(0).get<int>();
    grid.grid_height = doc.at("grid").at(1).get<int>();
    grid.pitch_px = doc.at("pitch_px").get<double>();
    grid.vartheta_z = doc.at("rotation_rad").get<double>();
    grid.origin_px = Vec2(doc.at("origin_px").at(0).get<double>(),
                          doc.at("origin_px").at(1).get<double>());
    grid.tau_x = doc.at("tau_px").at(0).get<double>();
    grid.tau_y = doc.at("tau_px").at(1).get<double>();
    for (const auto& row : doc.at("centers"))
      grid.centers[{row.at(0).get<int>(), row.at(1).get<int>()}] =
          Vec2(row.at(2).get<double>(), row.at(3).get<double>());
    grid.validate();
    return grid;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Validation, std::string("invalid micro-image grid document: ") + e.what());
  }
}

void save_mia_grid(const std::filesystem::path& path, const MiaGrid& grid) {
  save_json(path, mia_grid_to_json(grid));
}

MiaGrid load_mia_grid(const std::filesystem::path& path) {
  return mia_grid_from_json(load_json(path));
}

}  // namespace plenocal
