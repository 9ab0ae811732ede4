#include "plenocal/sim/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "plenocal/error.hpp"
#include "plenocal/features/devignette.hpp"
#include "plenocal/parallel.hpp"
#include "plenocal/precalib/moments.hpp"

namespace plenocal {

double mi_radius_slope_px(const CameraIntrinsics& intr) {
  return intr.d * intr.F / (2.0 * intr.D * intr.pixel_size);
}

double mi_radius_intercept_px(const CameraIntrinsics& intr, int type) {
  const double q_mm =
      intr.pitch * intr.d / (2.0 * intr.focals.at(type)) - 0.5 * intr.mi_pitch_metric();
  return q_mm / intr.pixel_size;
}

double mi_radius_px(const CameraIntrinsics& intr, int type, double f_number) {
  require(f_number > 0, ErrorCode::Validation, "f-number must be positive");
  return mi_radius_slope_px(intr) / f_number + std::abs(mi_radius_intercept_px(intr, type));
}

double tiling_f_number(const CameraIntrinsics& intr) {
  double q_max = 0;
  for (int t = 0; t < intr.type_count(); ++t)
    q_max = std::max(q_max, std::abs(mi_radius_intercept_px(intr, t)));
  const double half_pitch = 0.5 * intr.mi_pitch_px();
  require(half_pitch > q_max, ErrorCode::Degenerate,
          "micro-images overlap at every aperture for this configuration");
  return mi_radius_slope_px(intr) / (half_pitch - q_max);
}

namespace {

/// splitmix64; every pixel owns an independent stream so renders are
/// reproducible for any job count.
struct SplitMix {
  std::uint64_t state;
  explicit SplitMix(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double normal() {
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
};

std::uint64_t pixel_seed(std::uint64_t seed, std::uint64_t x, std::uint64_t y) {
  SplitMix m(seed ^ (x * 0xA24BAED4963EE407ULL) ^ (y * 0x9FB21C651E98DF25ULL));
  return m.next();
}

double plateau_profile(double r, double radius, double edge) {
  if (r <= radius - edge) return 1.0;
  if (r >= radius + edge) return 0.0;
  const double t = (r - (radius - edge)) / (2.0 * edge);
  return 0.5 * (1.0 + std::cos(kPi * t));
}

/// Measures a centered model spot exactly the way the pipeline does:
/// devignette against the plateau reference, then moment radius. sigma <= 0
/// means plateau only.
double measure_model_spot(double sigma, double plateau_radius, double window_radius,
                          const WhiteRenderOptions& opt) {
  const int half = static_cast<int>(
                       std::ceil(std::max(window_radius, plateau_radius + opt.edge_px))) +
                   2;
  const int side = 2 * half + 1;
  Image plateau(side, side, 0.f);
  Image spot(side, side, 0.f);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const double r = std::hypot(x - half, y - half);
      const double base = opt.peak * plateau_profile(r, plateau_radius, opt.edge_px);
      plateau.at(x, y) = static_cast<float>(base);
      const double g = sigma > 0 ? std::exp(-0.5 * sqr(r / sigma)) : 1.0;
      spot.at(x, y) = static_cast<float>(base * g);
    }
  }
  const Image flat = devignette(spot, plateau);
  return measure_mi_radius(flat, Vec2(half, half), window_radius, opt.alpha);
}

/// Gaussian width whose measured radius equals the target. The measured
/// radius grows monotonically with sigma and saturates at the plateau-only
/// value, so a bisection converges to pixel-quantization accuracy.
double calibrate_spot_sigma(double target, double plateau_radius, double window_radius,
                            const WhiteRenderOptions& opt) {
  const double saturated = measure_model_spot(-1.0, plateau_radius, window_radius, opt);
  require(target < saturated, ErrorCode::Degenerate,
          "white model cannot reach the requested micro-image radius at this aperture");
  double lo = 0.05;
  double hi = 4.0 * (plateau_radius + opt.edge_px);
  require(measure_model_spot(lo, plateau_radius, window_radius, opt) < target,
          ErrorCode::Degenerate, "requested micro-image radius is below the pixel scale");
  for (int it = 0; it < 90 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (measure_model_spot(mid, plateau_radius, window_radius, opt) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void paint_spots(Image& img, const CameraIntrinsics& intr, const std::vector<double>& plateau_r,
                 const std::vector<double>* sigma, const WhiteRenderOptions& opt) {
  for (int l = 0; l < intr.grid_height; ++l) {
    for (int k = 0; k < intr.grid_width; ++k) {
      const Vec2 mic = project_mic(intr, k, l);
      const int type = intr.lens_type(k, l);
      const double reach = plateau_r[type] + opt.edge_px;
      const int x0 = std::max(0, static_cast<int>(std::floor(mic.x() - reach)));
      const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(mic.x() + reach)));
      const int y0 = std::max(0, static_cast<int>(std::floor(mic.y() - reach)));
      const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(mic.y() + reach)));
      const double inv_two_s2 = sigma ? 0.5 / sqr((*sigma)[type]) : 0.0;
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double r2 = sqr(x - mic.x()) + sqr(y - mic.y());
          const double r = std::sqrt(r2);
          double val = opt.peak * plateau_profile(r, plateau_r[type], opt.edge_px);
          if (sigma) val *= std::exp(-r2 * inv_two_s2);
          img.at(x, y) += static_cast<float>(val);
        }
      }
    }
  }
  img.clamp01();
}

std::vector<double> plateau_radii(const CameraIntrinsics& intr) {
  const double n_ref = tiling_f_number(intr);
  std::vector<double> r(intr.type_count());
  for (int t = 0; t < intr.type_count(); ++t) r[t] = mi_radius_px(intr, t, n_ref);
  return r;
}

struct LensSite {
  Vec2 mic = Vec2::Zero();
  Vec3 center = Vec3::Zero();
  double support_px = 0;
  double focal = 0;
};

/// Backward path tracer shared by the scene renderers. scene(px, py, sx, sy)
/// returns the radiance of the ray leaving the main lens at (px, py, 0)
/// towards slope (sx, sy) per unit z.
template <class SceneFn>
Image render_backward(const CameraIntrinsics& intr, const SceneFn& scene,
                      const SceneRenderOptions& opt) {
  intr.validate();
  require(opt.f_number > 0, ErrorCode::Validation, "f-number must be positive");
  require(opt.rays_per_pixel > 0, ErrorCode::Validation, "ray count must be positive");

  const int gw = intr.grid_width, gh = intr.grid_height;
  const Mat3 r_mu = intr.mla_rotation_matrix();
  const Mat3 r_mu_t = r_mu.transpose();
  const Vec3 t_mla(intr.tx, intr.ty, -intr.D);
  const double s = intr.pixel_size;
  const double sensor_z = -(intr.D + intr.d);
  const double aperture_r2 = sqr(0.5 * intr.F / opt.f_number);
  const double lambda = intr.lambda();
  const bool hex = intr.arrangement == MLAArrangement::HexRowAligned;
  const double row_h = hex ? std::sqrt(3.0) / 2.0 : 1.0;

  std::vector<LensSite> sites(static_cast<std::size_t>(gw) * gh);
  for (int l = 0; l < gh; ++l) {
    for (int k = 0; k < gw; ++k) {
      LensSite& ls = sites[static_cast<std::size_t>(l) * gw + k];
      ls.mic = project_mic(intr, k, l);
      ls.center = intr.micro_lens_center(k, l);
      ls.support_px =
          mi_radius_px(intr, intr.lens_type(k, l), opt.f_number) + opt.support_margin_px;
      ls.focal = intr.lens_focal(k, l);
    }
  }

  Image img(intr.sensor_width, intr.sensor_height, 0.f);
  const int jobs = opt.jobs > 0 ? opt.jobs : default_jobs();
  parallel_chunks(intr.sensor_height, jobs, [&](std::int64_t y_begin, std::int64_t y_end) {
    for (std::int64_t y = y_begin; y < y_end; ++y) {
      for (int x = 0; x < intr.sensor_width; ++x) {
        SplitMix rng(pixel_seed(opt.seed, static_cast<std::uint64_t>(x),
                                static_cast<std::uint64_t>(y)));

        // nearest lattice site of the lens whose micro-image covers this pixel
        const Vec3 c_target =
            r_mu_t * (Vec3((x - intr.u0) * s * lambda, (y - intr.v0) * s * lambda, -intr.D) -
                      t_mla);
        const double ux = c_target.x() / intr.pitch;
        const double uy = c_target.y() / intr.pitch;
        const int l0 = static_cast<int>(std::lround(uy / row_h));

        const LensSite* cand[9];
        int n_cand = 0;
        for (int dl = -1; dl <= 1; ++dl) {
          const int l = l0 + dl;
          const double shift = hex && (l % 2 != 0) ? 0.5 : 0.0;
          const int k_row = static_cast<int>(std::lround(ux - shift));
          for (int dk = -1; dk <= 1; ++dk) {
            const int k = k_row + dk;
            if (k < 0 || l < 0 || k >= gw || l >= gh) continue;
            const LensSite& ls = sites[static_cast<std::size_t>(l) * gw + k];
            if (sqr(x - ls.mic.x()) + sqr(y - ls.mic.y()) <= sqr(ls.support_px))
              cand[n_cand++] = &ls;
          }
        }

        double accum = 0;
        const int per_lens = std::max(1, opt.rays_per_pixel / std::max(1, n_cand));
        for (int c = 0; c < n_cand; ++c) {
          const LensSite& ls = *cand[c];
          double lens_sum = 0;
          for (int ray = 0; ray < per_lens; ++ray) {
            const double jx = rng.uniform() - 0.5;
            const double jy = rng.uniform() - 0.5;
            const Vec3 x_s((x + jx - intr.u0) * s, (y + jy - intr.v0) * s, sensor_z);

            const double rr = 0.5 * intr.pitch * std::sqrt(rng.uniform());
            const double ph = 2.0 * kPi * rng.uniform();
            const double xi_x = rr * std::cos(ph), xi_y = rr * std::sin(ph);
            const Vec3 hit = ls.center + r_mu * Vec3(xi_x, xi_y, 0);

            const Vec3 dir_l = r_mu_t * (hit - x_s);
            if (dir_l.z() < 1e-12) continue;
            const double sx_l = dir_l.x() / dir_l.z() - xi_x / ls.focal;
            const double sy_l = dir_l.y() / dir_l.z() - xi_y / ls.focal;
            const Vec3 dir = r_mu * Vec3(sx_l, sy_l, 1.0);
            if (dir.z() < 1e-12) continue;

            const double tt = -hit.z() / dir.z();
            const double px = hit.x() + tt * dir.x();
            const double py = hit.y() + tt * dir.y();
            if (px * px + py * py > aperture_r2) continue;

            const double sx = dir.x() / dir.z() - px / intr.F;
            const double sy = dir.y() / dir.z() - py / intr.F;
            lens_sum += scene(px, py, sx, sy);
          }
          accum += lens_sum / per_lens;
        }

        if (opt.read_noise > 0) accum += opt.read_noise * rng.normal();
        img.at(x, static_cast<int>(y)) = static_cast<float>(std::clamp(accum, 0.0, 1.0));
      }
    }
  });
  return img;
}

}  // namespace

Image render_white(const CameraIntrinsics& intr, double f_number,
                   const WhiteRenderOptions& opt) {
  intr.validate();
  require(f_number > 0, ErrorCode::Validation, "f-number must be positive");
  const double window_radius = opt.window_scale * intr.mi_pitch_px();
  const std::vector<double> plateau_r = plateau_radii(intr);
  std::vector<double> sigma(intr.type_count());
  for (int t = 0; t < intr.type_count(); ++t)
    sigma[t] =
        calibrate_spot_sigma(mi_radius_px(intr, t, f_number), plateau_r[t], window_radius, opt);
  Image img(intr.sensor_width, intr.sensor_height, 0.f);
  paint_spots(img, intr, plateau_r, &sigma, opt);
  return img;
}

Image render_white_reference(const CameraIntrinsics& intr, const WhiteRenderOptions& opt) {
  intr.validate();
  Image img(intr.sensor_width, intr.sensor_height, 0.f);
  paint_spots(img, intr, plateau_radii(intr), nullptr, opt);
  return img;
}

Image render_checkerboard(const CameraIntrinsics& intr, const Pose& world_to_camera,
                          const CheckerboardSpec& board, const SceneRenderOptions& opt) {
  board.validate();
  world_to_camera.validate();
  const Mat3 rb = world_to_camera.R;
  const Vec3 tb = world_to_camera.t;
  const Vec3 normal = rb.col(2);
  const Mat3 rb_t = rb.transpose();
  return render_backward(
      intr,
      [&](double px, double py, double sx, double sy) -> double {
        const Vec3 origin(px, py, 0.0);
        const Vec3 dir(sx, sy, 1.0);
        const double denom = normal.dot(dir);
        if (std::abs(denom) < 1e-12) return 0.92;  // grazing ray onto the white mount
        const double tt = normal.dot(tb - origin) / denom;
        if (tt <= 0) return 0.0;  // board behind the camera
        const Vec3 local = rb_t * (origin + tt * dir - tb);
        return board.albedo(local.x(), local.y());
      },
      opt);
}

Image render_white_diffuse(const CameraIntrinsics& intr, const SceneRenderOptions& opt) {
  return render_backward(
      intr, [](double, double, double, double) -> double { return 0.92; }, opt);
}

Image render_point_source(const CameraIntrinsics& intr, const Vec3& p_camera,
                          const SceneRenderOptions& opt, int ray_count) {
  intr.validate();
  require(opt.f_number > 0, ErrorCode::Validation, "f-number must be positive");
  require(ray_count > 0, ErrorCode::Validation, "ray count must be positive");
  require(p_camera.z() > 0, ErrorCode::Validation, "point source must sit in front of the camera");

  const int gw = intr.grid_width, gh = intr.grid_height;
  const Mat3 r_mu = intr.mla_rotation_matrix();
  const Mat3 r_mu_t = r_mu.transpose();
  const Vec3 t_mla(intr.tx, intr.ty, -intr.D);
  const Vec3 n_mla = r_mu.col(2);
  const double sensor_z = -(intr.D + intr.d);
  const double ap_r = 0.5 * intr.F / opt.f_number;
  const bool hex = intr.arrangement == MLAArrangement::HexRowAligned;
  const double row_h = hex ? std::sqrt(3.0) / 2.0 : 1.0;

  Image img(intr.sensor_width, intr.sensor_height, 0.f);
  SplitMix rng(pixel_seed(opt.seed, 0x706F696E74ULL, 0x73706C6174ULL));
  for (int i = 0; i < ray_count; ++i) {
    const double rr = ap_r * std::sqrt(rng.uniform());
    const double ph = 2.0 * kPi * rng.uniform();
    const double ax = rr * std::cos(ph), ay = rr * std::sin(ph);

    // travel towards -z; slopes are dx/dz, refraction s' = s + x/f
    const double dz = -p_camera.z();
    double sx = (ax - p_camera.x()) / dz;
    double sy = (ay - p_camera.y()) / dz;
    sx += ax / intr.F;
    sy += ay / intr.F;

    // intersect the (possibly tilted) MLA plane, parametrized by z
    const double denom = n_mla.x() * sx + n_mla.y() * sy + n_mla.z();
    if (std::abs(denom) < 1e-12) continue;
    const double z_mla = (n_mla.dot(t_mla) - n_mla.x() * ax - n_mla.y() * ay) / denom;
    const Vec3 pm(ax + sx * z_mla, ay + sy * z_mla, z_mla);

    // nearest micro-lens; rays in the gaps between lens discs are absorbed
    const Vec3 local = r_mu_t * (pm - t_mla);
    const double ux = local.x() / intr.pitch;
    const double uy = local.y() / intr.pitch;
    const int l0 = static_cast<int>(std::lround(uy / row_h));
    int best_k = -1, best_l = -1;
    double best_d2 = sqr(0.5 * intr.pitch);
    for (int dl = -1; dl <= 1; ++dl) {
      for (int dk = -1; dk <= 1; ++dk) {
        const int l = l0 + dl;
        const double shift = hex && (l % 2 != 0) ? 0.5 : 0.0;
        const int k = static_cast<int>(std::lround(ux - shift)) + dk;
        if (k < 0 || l < 0 || k >= gw || l >= gh) continue;
        const Vec2 g = mla_unit_offset(intr.arrangement, k, l) * intr.pitch;
        const double d2 = sqr(local.x() - g.x()) + sqr(local.y() - g.y());
        if (d2 < best_d2) {
          best_d2 = d2;
          best_k = k;
          best_l = l;
        }
      }
    }
    if (best_k < 0) continue;

    const Vec2 g = mla_unit_offset(intr.arrangement, best_k, best_l) * intr.pitch;
    const Vec3 w_l = r_mu_t * Vec3(sx, sy, 1.0);
    if (std::abs(w_l.z()) < 1e-12) continue;
    const double f = intr.lens_focal(best_k, best_l);
    const double sx_l = w_l.x() / w_l.z() + (local.x() - g.x()) / f;
    const double sy_l = w_l.y() / w_l.z() + (local.y() - g.y()) / f;
    const Vec3 w = r_mu * Vec3(sx_l, sy_l, 1.0);
    if (std::abs(w.z()) < 1e-12) continue;

    const double dzz = sensor_z - pm.z();
    const double x_mm = pm.x() + (w.x() / w.z()) * dzz;
    const double y_mm = pm.y() + (w.y() / w.z()) * dzz;
    const double u = intr.u0 + x_mm / intr.pixel_size;
    const double v = intr.v0 + y_mm / intr.pixel_size;

    const int x0 = static_cast<int>(std::floor(u));
    const int y0 = static_cast<int>(std::floor(v));
    const double fx = u - x0, fy = v - y0;
    const auto deposit = [&](int px, int py, double w_px) {
      if (img.in_bounds(px, py)) img.at(px, py) += static_cast<float>(w_px);
    };
    deposit(x0, y0, (1 - fx) * (1 - fy));
    deposit(x0 + 1, y0, fx * (1 - fy));
    deposit(x0, y0 + 1, (1 - fx) * fy);
    deposit(x0 + 1, y0 + 1, fx * fy);
  }

  const float peak = img.max_value();
  if (peak > 0)
    for (float& v : img.px) v /= peak;
  return img;
}

}  // namespace plenocal
