#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "plenocal/features/devignette.hpp"
#include "plenocal/io/json_io.hpp"
#include "plenocal/mia/detect.hpp"
#include "plenocal/mia/fit.hpp"
#include "plenocal/precalib/classify.hpp"
#include "plenocal/precalib/init.hpp"
#include "plenocal/precalib/moments.hpp"
#include "plenocal/precalib/omega.hpp"
#include "plenocal/sim/dataset.hpp"
#include "plenocal/sim/render.hpp"

using namespace plenocal;

namespace {

double max_spread(const Mat2& cov) {
  const double mean = 0.5 * (cov(0, 0) + cov(1, 1));
  const double diff = 0.5 * (cov(0, 0) - cov(1, 1));
  return std::sqrt(mean + std::sqrt(sqr(diff) + sqr(cov(0, 1))));
}

Vec2 window_centroid(const Image& img, const Vec2& center, double radius) {
  double mass = 0, mx = 0, my = 0;
  const int x0 = std::max(0, static_cast<int>(std::floor(center.x() - radius)));
  const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(center.x() + radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(center.y() - radius)));
  const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(center.y() + radius)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      if (sqr(x - center.x()) + sqr(y - center.y()) > sqr(radius)) continue;
      const double w = img.at(x, y);
      mass += w;
      mx += w * x;
      my += w * y;
    }
  REQUIRE(mass > 0);
  return {mx / mass, my / mass};
}

/// Lateral position at depth z that projects onto the given sensor target
/// through lens (k, l); Newton on the analytic projection.
Vec3 solve_lateral(const CameraIntrinsics& cam, int k, int l, double z, const Vec2& target) {
  Vec3 p(0, 0, z);
  for (int it = 0; it < 12; ++it) {
    BapJacobian jac;
    const BapProjection bp = project_bap(cam, Pose{}, p, k, l, &jac);
    const Vec2 r(bp.u - target.x(), bp.v - target.y());
    if (r.norm() < 1e-12) break;
    Mat2 j;
    j << jac.d_pose(0, 3), jac.d_pose(0, 4), jac.d_pose(1, 3), jac.d_pose(1, 4);
    const Vec2 step = j.inverse() * r;
    p.x() -= step.x();
    p.y() -= step.y();
  }
  return p;
}

MiaGrid fit_white_grid(const Image& flat, int expected) {
  DetectOptions opt;
  opt.expected_count = expected;
  const std::vector<Vec2> centers = detect_mics(flat, opt);
  GridFitReport report;
  const MiaGrid grid =
      fit_grid(centers, flat.width, flat.height, MLAArrangement::HexRowAligned, &report);
  REQUIRE(report.matched == expected);
  return grid;
}

}  // namespace

TEST_CASE("radius law and tiling aperture follow the design formulas") {
  const CameraIntrinsics desk = testing::desk_camera();
  CHECK(mi_radius_slope_px(desk) == doctest::Approx(25.559157).epsilon(1e-6));
  CHECK(mi_radius_intercept_px(desk, 0) == doctest::Approx(-4.268817).epsilon(1e-6));
  CHECK(mi_radius_intercept_px(desk, 1) == doctest::Approx(-5.287170).epsilon(1e-6));
  CHECK(mi_radius_intercept_px(desk, 2) == doctest::Approx(-6.058650).epsilon(1e-6));
  CHECK(mi_radius_px(desk, 0, 8) == doctest::Approx(7.463712).epsilon(1e-6));
  CHECK(mi_radius_px(desk, 1, 8) == doctest::Approx(8.482065).epsilon(1e-6));
  CHECK(mi_radius_px(desk, 2, 8) == doctest::Approx(9.253545).epsilon(1e-6));
  CHECK(tiling_f_number(desk) == doctest::Approx(4.569660).epsilon(1e-6));

  // at the tiling aperture the largest micro-images touch their same-type
  // diagonal neighbours exactly (lens distance is one MI pitch)
  const double n_tile = tiling_f_number(desk);
  double r_max = 0;
  for (int t = 0; t < 3; ++t) r_max = std::max(r_max, mi_radius_px(desk, t, n_tile));
  CHECK(std::abs(2 * r_max - desk.mi_pitch_px()) < 1e-9);

  const CameraIntrinsics upcs = testing::upcs_camera();
  CHECK(mi_radius_px(upcs, 0, 2) == doctest::Approx(7.171429).epsilon(1e-6));
  CHECK(tiling_f_number(upcs) == doctest::Approx(2.0).epsilon(1e-9));

  CHECK(mi_radius_slope_px(testing::upc_camera()) == doctest::Approx(30.0).epsilon(1e-9));
}

TEST_CASE("rendered whites reproduce the radius law through the measurement chain") {
  const CameraIntrinsics cam = testing::desk_camera(12, 10);
  const Image reference = render_white_reference(cam);
  const Image white16 = render_white(cam, 16);
  const Image white8 = render_white(cam, 8);

  const MiaGrid grid = fit_white_grid(devignette(white16, reference), 12 * 10);
  CHECK(grid.pitch_px == doctest::Approx(cam.mi_pitch_px()).epsilon(2e-4));

  const std::pair<double, const Image*> stacks[] = {{16, &white16}, {8, &white8}};
  for (const auto& [n, white] : stacks) {
    const Image flat = devignette(*white, reference);
    const std::vector<RadiusMeasurement> meas = measure_radii(flat, grid, n);
    CHECK(meas.size() == 120);
    double sum_err[3] = {0, 0, 0};
    int count[3] = {0, 0, 0};
    for (const RadiusMeasurement& m : meas) {
      const int type = cam.lens_type(m.k, m.l);
      const double err = m.rho_pix - mi_radius_px(cam, type, n);
      CHECK(std::abs(err) < 0.25);
      sum_err[type] += err;
      ++count[type];
    }
    for (int t = 0; t < 3; ++t) {
      REQUIRE(count[t] > 0);
      CHECK(std::abs(sum_err[t] / count[t]) < 0.1);
    }
  }

  // miniature unfocused design: fully open micro-images measure ~7.17 px
  const CameraIntrinsics upcs = testing::upcs_camera();
  const Image upcs_ref = render_white_reference(upcs);
  const Image upcs_white = render_white(upcs, 2.0000001);  // reference aperture itself tiles
  const MiaGrid upcs_grid = fit_white_grid(devignette(render_white(upcs, 3.5), upcs_ref), 120);
  const std::vector<RadiusMeasurement> upcs_meas =
      measure_radii(devignette(upcs_white, upcs_ref), upcs_grid, 2);
  REQUIRE(!upcs_meas.empty());
  double mean = 0;
  for (const auto& m : upcs_meas) mean += m.rho_pix;
  mean /= upcs_meas.size();
  CHECK(mean == doctest::Approx(7.172).epsilon(0.01));
}

TEST_CASE("white stack drives the pre-calibration chain end to end") {
  const CameraIntrinsics cam = testing::desk_camera(12, 10);
  const Image reference = render_white_reference(cam);
  const std::vector<double> apertures = {8, 10, 12.5, 16};
  std::vector<Image> flats;
  for (double n : apertures) flats.push_back(devignette(render_white(cam, n), reference));

  const MiaGrid grid = fit_white_grid(flats.back(), 120);
  std::vector<RadiusMeasurement> all;
  std::vector<RadiusMeasurement> most_closed;
  for (std::size_t i = 0; i < apertures.size(); ++i) {
    const auto meas = measure_radii(flats[i], grid, apertures[i]);
    all.insert(all.end(), meas.begin(), meas.end());
    if (apertures[i] == 16) most_closed = meas;
  }

  const TypeClassification types = classify_lens_types(most_closed, 3);
  CHECK(types.silhouette > 0.6);
  CHECK(types.agreement > 0.95);

  const OmegaCoefficients omega = estimate_omega(all, types, cam.pixel_size, grid.pitch_px,
                                                 InternalConfig::Galilean);
  const double m_true_um = -mi_radius_slope_px(cam) * cam.pixel_size * 1000;
  CHECK(omega.m_um == doctest::Approx(m_true_um).epsilon(0.01));

  const CameraIntrinsics init =
      init_intrinsics(omega, cam.F, testing::desk_focus_distance(cam), cam.pixel_size, grid,
                      cam.sensor_width, cam.sensor_height, InternalConfig::Galilean);
  CHECK(init.pitch == doctest::Approx(cam.pitch).epsilon(1e-3));
  CHECK(init.d == doctest::Approx(cam.d).epsilon(0.02));
  CHECK(init.D == doctest::Approx(cam.D).epsilon(0.01));
  for (int t = 0; t < 3; ++t)
    CHECK(init.focals[t] == doctest::Approx(cam.focals[t]).epsilon(0.05));
}

TEST_CASE("point sources land on the projected features with the modeled blur") {
  const CameraIntrinsics cam = testing::desk_camera(12, 10);
  const int k = 6, l = 5;  // focal type 1
  REQUIRE(cam.lens_type(k, l) == 1);
  const Vec2 mic = project_mic(cam, k, l);
  SceneRenderOptions opt;
  opt.f_number = 5.6;
  opt.seed = 7;

  // bisect the in-focus depth of this lens type along its chief ray
  Vec3 p_lo = solve_lateral(cam, k, l, 383, mic);
  Vec3 p_hi = solve_lateral(cam, k, l, 396, mic);
  const double rho_lo = project_bap(cam, Pose{}, p_lo, k, l).rho;
  REQUIRE(rho_lo * project_bap(cam, Pose{}, p_hi, k, l).rho < 0);
  double lo = 383, hi = 396;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Vec3 pm = solve_lateral(cam, k, l, mid, mic);
    if (project_bap(cam, Pose{}, pm, k, l).rho * rho_lo > 0)
      lo = mid;
    else
      hi = mid;
  }
  const Vec3 p_focus = solve_lateral(cam, k, l, 0.5 * (lo + hi), mic);
  const BapProjection focus_bp = project_bap(cam, Pose{}, p_focus, k, l);
  CHECK(std::abs(focus_bp.rho) < 1e-6);

  const double window = 0.45 * cam.mi_pitch_px();
  {
    const Image spot = render_point_source(cam, p_focus, opt, 400000);
    const Vec2 c = window_centroid(spot, Vec2(focus_bp.u, focus_bp.v), window);
    CHECK((c - Vec2(focus_bp.u, focus_bp.v)).norm() < 0.3);
    const Mat2 cov = intensity_covariance(spot, Vec2(focus_bp.u, focus_bp.v), window);
    CHECK(max_spread(cov) < 0.6);  // in focus: only pixel footprint and splat spread
  }

  // defocused: the rendered disc centroid still matches (u, v) and its
  // moment spread matches the predicted blur radius (uniform disc: rho / 2)
  {
    const Vec3 p = solve_lateral(cam, k, l, 360, mic);
    const BapProjection bp = project_bap(cam, Pose{}, p, k, l);
    REQUIRE(std::abs(bp.rho) > 2.0);
    const Image spot = render_point_source(cam, p, opt, 400000);
    const Vec2 c = window_centroid(spot, Vec2(bp.u, bp.v), window);
    CHECK((c - Vec2(bp.u, bp.v)).norm() < 0.3);
    const Mat2 cov = intensity_covariance(spot, Vec2(bp.u, bp.v), window);
    CHECK(max_spread(cov) == doctest::Approx(std::abs(bp.rho) / 2).epsilon(0.15));
  }
}

TEST_CASE("micro-images tile the sensor at the reference aperture") {
  const CameraIntrinsics cam = testing::desk_camera(12, 10);
  const double n_tile = tiling_f_number(cam);
  const Image ref = render_white_reference(cam);

  // find the largest type and one same-type diagonal neighbour pair
  int t_max = 0;
  for (int t = 1; t < 3; ++t)
    if (std::abs(mi_radius_intercept_px(cam, t)) > std::abs(mi_radius_intercept_px(cam, t_max)))
      t_max = t;
  // an odd-row lens and its lower-right neighbour sit exactly one micro-image
  // pitch apart and share the same focal type
  int k0 = -1, l0 = -1;
  for (int l = 3; l < cam.grid_height - 2 && k0 < 0; l += 2)
    for (int k = 2; k < cam.grid_width - 2 && k0 < 0; ++k)
      if (cam.lens_type(k, l) == t_max && cam.lens_type(k + 1, l + 1) == t_max) {
        k0 = k;
        l0 = l;
      }
  REQUIRE(k0 >= 0);
  const Vec2 a = project_mic(cam, k0, l0);
  const Vec2 b = project_mic(cam, k0 + 1, l0 + 1);
  CHECK((a - b).norm() == doctest::Approx(cam.mi_pitch_px()).epsilon(2e-3));

  // touching pair: no dark gap at the midpoint
  const Vec2 mid = 0.5 * (a + b);
  CHECK(ref.bilinear(mid.x(), mid.y()) > 0.6 * 0.85);

  // the two smallest types sit side by side in a row and leave a gap; probe
  // the center of that gap
  int ks = -1, ls = -1;
  for (int l = 2; l < cam.grid_height - 2 && ks < 0; ++l)
    for (int k = 2; k < cam.grid_width - 3 && ks < 0; ++k)
      if (cam.lens_type(k, l) == 0 && cam.lens_type(k + 1, l) == 1) {
        ks = k;
        ls = l;
      }
  REQUIRE(ks >= 0);
  const Vec2 c0 = project_mic(cam, ks, ls);
  const Vec2 c1 = project_mic(cam, ks + 1, ls);
  const double r0 = mi_radius_px(cam, 0, n_tile);
  const double r1 = mi_radius_px(cam, 1, n_tile);
  const double dist = (c1 - c0).norm();
  REQUIRE(dist > r0 + r1 + 1.5);  // a real gap exists between these discs
  const Vec2 probe = c0 + (c1 - c0) * ((r0 + 0.5 * (dist - r0 - r1)) / dist);
  CHECK(ref.bilinear(probe.x(), probe.y()) < 0.1);
}

TEST_CASE("raw renders are deterministic and conserve energy across seeds") {
  const CameraIntrinsics cam = testing::desk_camera(12, 10);
  const CheckerboardSpec board = testing::desk_board();
  const Pose pose = testing::desk_poses(3)[1];

  SceneRenderOptions opt;
  opt.f_number = 5.6;
  opt.rays_per_pixel = 64;
  opt.seed = 11;
  opt.jobs = 1;
  const Image a = render_checkerboard(cam, pose, board, opt);
  opt.jobs = 3;
  const Image b = render_checkerboard(cam, pose, board, opt);
  CHECK(a.px == b.px);  // job count never changes the result

  SceneRenderOptions e = opt;
  e.rays_per_pixel = 256;
  e.jobs = 0;
  e.seed = 1;
  const double sum1 = render_checkerboard(cam, pose, board, e).sum();
  e.seed = 2;
  const double sum2 = render_checkerboard(cam, pose, board, e).sum();
  CHECK(std::abs(sum1 - sum2) / sum1 < 0.01);
}

TEST_CASE("checkerboard raws flat-field against white diffuse renders") {
  const CameraIntrinsics cam = testing::desk_camera(12, 10);
  const CheckerboardSpec board = testing::desk_board();
  const Pose pose{rodrigues(Vec3(0.05, -0.04, 0.02)), Vec3(0.4, -0.3, 355)};

  SceneRenderOptions opt;
  opt.f_number = 5.6;
  opt.rays_per_pixel = 96;
  opt.seed = 21;
  const Image raw = render_checkerboard(cam, pose, board, opt);
  const Image wd = render_white_diffuse(cam, opt);  // same seed: same transport
  const Image flat = devignette(raw, wd);

  // project the center of every checker square through every lens; away from
  // micro-image borders the devignetted raw shows the pure albedo ratio
  const double w_mm = (board.cols + 1) * board.square_mm;
  const double h_mm = (board.rows + 1) * board.square_mm;
  double rms = 0;
  int n = 0;
  for (int iy = 0; iy <= board.rows; ++iy) {
    for (int ix = 0; ix <= board.cols; ++ix) {
      const Vec3 p((ix + 0.5) * board.square_mm - 0.5 * w_mm,
                   (iy + 0.5) * board.square_mm - 0.5 * h_mm, 0.0);
      const double expected = (ix + iy) % 2 == 0 ? 1.0 : 0.08 / 0.92;
      for (int l = 0; l < cam.grid_height; ++l) {
        for (int k = 0; k < cam.grid_width; ++k) {
          BapProjection bp;
          try {
            bp = project_bap(cam, pose, p, k, l);
          } catch (const Error&) {
            continue;
          }
          if (!flat.in_bounds(static_cast<int>(bp.u), static_cast<int>(bp.v))) continue;
          const Vec2 mic = project_mic(cam, k, l);
          if (sqr(bp.u - mic.x()) + sqr(bp.v - mic.y()) >
              sqr(mi_radius_px(cam, bp.type, opt.f_number) - 3.0))
            continue;
          rms += sqr(flat.bilinear(bp.u, bp.v) - expected);
          ++n;
        }
      }
    }
  }
  REQUIRE(n > 50);
  CHECK(std::sqrt(rms / n) < 0.05);
}

TEST_CASE("dataset generation writes a complete, exact, reloadable tree") {
  const CameraIntrinsics cam = testing::desk_camera(12, 10);
  const auto root = std::filesystem::temp_directory_path() / "plenocal_test_dataset";
  std::filesystem::remove_all(root);

  DatasetPlan plan;
  plan.board = testing::desk_board();
  plan.calib_poses = testing::desk_poses(3);
  plan.eval_base = Pose{Mat3::Identity(), Vec3(0.2, -0.1, 358)};
  plan.eval_steps = 2;
  plan.eval_step_mm = 10;
  plan.white_f_numbers = {8, 16};
  plan.focus_distance_mm = testing::desk_focus_distance(cam);
  plan.render.f_number = 5.6;
  plan.render.rays_per_pixel = 32;
  plan.render.seed = 5;

  const DatasetDescriptor ds = generate_dataset(cam, plan, root);
  CHECK(ds.whites.size() == 2);
  CHECK(ds.calibration.size() == 3);
  CHECK(ds.evaluation.size() == 3);
  for (const auto& w : ds.whites) CHECK(std::filesystem::exists(ds.resolve(w.path)));
  CHECK(std::filesystem::exists(ds.resolve(ds.devignette_path)));
  CHECK(std::filesystem::exists(ds.resolve(ds.white_reference.path)));

  const DatasetDescriptor back = load_dataset_descriptor(root / "dataset.json");
  CHECK(back.pixel_size_mm == cam.pixel_size);
  CHECK(back.main_focal_mm == cam.F);
  CHECK(back.focus_distance_mm == plan.focus_distance_mm);
  CHECK(back.scene_f_number == 5.6);
  CHECK(back.whites.size() == 2);
  CHECK(back.whites[1].f_number == 16);
  CHECK(back.board.cols == plan.board.cols);
  CHECK(back.evaluation[2].delta_z_mm == 20);
  CHECK(back.ground_truth_intrinsics == "truth_intrinsics.json");

  // sidecars hold the exact analytic projections and reload bit-exactly
  const FrameTruth truth = load_frame_truth(ds.resolve(back.calibration[1].truth));
  const auto expected = exact_corner_truth(cam, plan.calib_poses[1], plan.board, 5.6,
                                           plan.containment_margin_px);
  REQUIRE(truth.corners.size() == expected.size());
  REQUIRE(!truth.corners.empty());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(truth.corners[i].u == expected[i].u);
    CHECK(truth.corners[i].v == expected[i].v);
    CHECK(truth.corners[i].rho == expected[i].rho);
    CHECK(truth.corners[i].k == expected[i].k);
  }
  CHECK((truth.pose.t - plan.calib_poses[1].t).norm() < 1e-12);

  // corners stay inside their micro-image footprint and on the sensor
  for (const SidecarCorner& c : truth.corners) {
    CHECK(c.type == cam.lens_type(c.k, c.l));
    CHECK(c.u >= 0);
    CHECK(c.v >= 0);
    CHECK(c.u <= cam.sensor_width - 1);
    CHECK(c.v <= cam.sensor_height - 1);
    const Vec2 mic = project_mic(cam, c.k, c.l);
    CHECK(std::hypot(c.u - mic.x(), c.v - mic.y()) <=
          mi_radius_px(cam, c.type, 5.6) - plan.containment_margin_px + 1e-9);
  }

  // ground-truth intrinsics and MIC table match the camera
  const CameraIntrinsics reloaded = load_intrinsics(ds.resolve(back.ground_truth_intrinsics));
  CHECK((reloaded.pack() - cam.pack()).norm() == 0);
  const Json mics = load_json(ds.resolve(back.mic_truth));
  CHECK(mics.at("mics").size() == 120);
  const Json& first = mics.at("mics").at(0);
  const Vec2 mic00 = project_mic(cam, first[0].get<int>(), first[1].get<int>());
  CHECK(first[3].get<double>() == mic00.x());
  CHECK(first[4].get<double>() == mic00.y());

  // descriptor writes are byte stable
  const auto read_file = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string before = read_file(root / "dataset.json");
  save_dataset_descriptor(root / "dataset.json", back);
  CHECK(read_file(root / "dataset.json") == before);

  std::filesystem::remove_all(root);
}
