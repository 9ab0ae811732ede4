#include "plenocal/model/bap.hpp"

#include "plenocal/error.hpp"
#include "plenocal/model/distortion.hpp"
#include "plenocal/model/main_lens.hpp"
#include "plenocal/model/mla.hpp"

namespace plenocal {

namespace {

constexpr double kDegenerateTol = 1e-12;

struct MlaFrames {
  Mat3 R;          // MLA rotation
  Mat3 dR[3];      // d R / d theta_{x,y,z}
  Vec3 offset;     // micro-lens offset from the MLA origin, metric
  Vec3 ghat;       // unit-pitch offset (d offset / d pitch)
  Vec3 t;          // MLA origin in camera frame
  Vec3 center;     // micro-lens center in camera frame: R * offset + t
};

MlaFrames make_frames(const CameraIntrinsics& intr, int k, int l) {
  require(k >= 0 && k < intr.grid_width && l >= 0 && l < intr.grid_height,
          ErrorCode::Validation, "micro-lens index outside the grid");
  MlaFrames fr;
  const Vec3& r = intr.mla_rotation;
  const Mat3 Rx = rot_x(r.x()), Ry = rot_y(r.y()), Rz = rot_z(r.z());
  fr.R = Rz * Ry * Rx;
  fr.dR[0] = Rz * Ry * drot_x(r.x());
  fr.dR[1] = Rz * drot_y(r.y()) * Rx;
  fr.dR[2] = drot_z(r.z()) * Ry * Rx;
  const Vec2 g = mla_unit_offset(intr.arrangement, k, l);
  fr.ghat = Vec3(g.x(), g.y(), 0.0);
  fr.offset = intr.pitch * fr.ghat;
  fr.t = Vec3(intr.tx, intr.ty, -intr.D);
  fr.center = fr.R * fr.offset + fr.t;
  return fr;
}

}  // namespace

BapProjection project_bap(const CameraIntrinsics& intr, const Pose& world_to_camera,
                          const Vec3& p_world, int k, int l, BapJacobian* jac) {
  const MlaFrames fr = make_frames(intr, k, l);
  const double s = intr.pixel_size;
  const double d = intr.d;
  const double F = intr.F;
  const int type = intr.lens_type(k, l);
  const double f = intr.focals.at(static_cast<std::size_t>(type));

  const Vec3 rp = world_to_camera.R * p_world;
  const Vec3 p_c = rp + world_to_camera.t;

  const double w = F - p_c.z();
  require(std::abs(w) > kDegenerateTol, ErrorCode::Degenerate,
          "point on the main-lens focal plane projects to infinity");
  const double g = F / w;
  const Vec3 q = g * p_c;

  const Vec3 q_u = distort(intr.distortion, q);
  const Vec3 e = q_u - fr.t;
  const Vec3 m = fr.R.transpose() * e - fr.offset;
  require(std::abs(m.z()) > kDegenerateTol, ErrorCode::Degenerate,
          "virtual point on the micro-lens plane");

  const double inv_mz = 1.0 / m.z();
  const double ds = d / s;
  const double rho_gain = intr.pitch * d / (2.0 * s);

  BapProjection out;
  out.u = intr.u0 + fr.center.x() / s - ds * m.x() * inv_mz;
  out.v = intr.v0 + fr.center.y() / s - ds * m.y() * inv_mz;
  out.rho = rho_gain * (1.0 / f - inv_mz - 1.0 / d);
  out.type = type;
  out.ml_distance = m.z();
  out.virtual_depth = -m.z() / d;

  if (jac == nullptr) return out;

  const int np = intr.parameter_count();
  jac->d_intrinsics = MatX::Zero(3, np);
  jac->d_pose.setZero();

  // Sensitivity of the output triple to the micro-lens frame point m and the
  // micro-lens center C (all other dependencies handled as direct terms).
  const auto emit = [&](const Vec3& dm, const Vec3& dC) -> Vec3 {
    Vec3 r;
    r.x() = dC.x() / s - ds * (dm.x() * inv_mz - m.x() * sqr(inv_mz) * dm.z());
    r.y() = dC.y() / s - ds * (dm.y() * inv_mz - m.y() * sqr(inv_mz) * dm.z());
    r.z() = rho_gain * sqr(inv_mz) * dm.z();
    return r;
  };

  const Mat3 j_phi = distort_point_jacobian(intr.distortion, q);
  const Eigen::Matrix<double, 3, 5> j_coef = distort_coeff_jacobian(q);
  Mat3 dq_dpc = g * Mat3::Identity();
  dq_dpc.col(2) += (g * g / F) * p_c;  // d q / d z_c through g(z)
  const Mat3 chain = fr.R.transpose() * j_phi;   // d m / d q_u applied to point jacobians
  const Mat3 dm_dpc = chain * dq_dpc;

  // Pose: left-multiplicative rotation increment, then translation.
  jac->d_pose.block<3, 3>(0, 0) = -(dm_dpc * skew(rp));
  for (int c = 0; c < 3; ++c) {
    const Vec3 r = emit(jac->d_pose.col(c), Vec3::Zero());
    jac->d_pose.col(c) = r;
  }
  for (int c = 0; c < 3; ++c)
    jac->d_pose.col(3 + c) = emit(dm_dpc.col(c), Vec3::Zero());

  // Main focal length.
  const Vec3 dq_dF = (-p_c.z() / sqr(w)) * p_c;
  jac->d_intrinsics.col(intr::kF) = emit(chain * dq_dF, Vec3::Zero());

  // Distortion coefficients act on the virtual point only.
  for (int c = 0; c < 5; ++c)
    jac->d_intrinsics.col(intr::kQ1 + c) = emit(fr.R.transpose() * j_coef.col(c), Vec3::Zero());

  jac->d_intrinsics(0, intr::kU0) = 1.0;
  jac->d_intrinsics(1, intr::kV0) = 1.0;

  // Sensor gap d: direct terms in u, v and rho.
  {
    Vec3 r = Vec3::Zero();
    r.x() = -m.x() * inv_mz / s;
    r.y() = -m.y() * inv_mz / s;
    r.z() = (intr.pitch / (2.0 * s)) * (1.0 / f - inv_mz);  // d/dd of rho_gain*(1/f - 1/mz - 1/d)
    jac->d_intrinsics.col(intr::kGapSensor) = r;
  }

  // MLA gap D: shifts the MLA origin along -z.
  jac->d_intrinsics.col(intr::kGapMla) =
      emit(fr.R.transpose() * Vec3::UnitZ(), -Vec3::UnitZ());

  // MLA offset.
  jac->d_intrinsics.col(intr::kTx) = emit(-fr.R.transpose() * Vec3::UnitX(), Vec3::UnitX());
  jac->d_intrinsics.col(intr::kTy) = emit(-fr.R.transpose() * Vec3::UnitY(), Vec3::UnitY());

  // MLA rotation.
  for (int j = 0; j < 3; ++j) {
    const Vec3 dm = fr.dR[j].transpose() * e;
    const Vec3 dC = fr.dR[j] * fr.offset;
    jac->d_intrinsics.col(intr::kThetaX + j) = emit(dm, dC);
  }

  // Pitch: moves the lens within the array and scales the aperture.
  {
    Vec3 r = emit(-fr.ghat, fr.R * fr.ghat);
    r.z() += out.rho / intr.pitch;
    jac->d_intrinsics.col(intr::kPitch) = r;
  }

  // Micro-lens focal of this type.
  jac->d_intrinsics(2, intr::kFocal0 + type) = -rho_gain / sqr(f);

  return out;
}

Vec2 project_mic(const CameraIntrinsics& intr, int k, int l, MatX* jac) {
  const MlaFrames fr = make_frames(intr, k, l);
  const double s = intr.pixel_size;
  const double d = intr.d;

  // Image of the main lens center through the micro-lens relay: the virtual
  // point is the origin, so the micro-lens frame point is -R^T C.
  const Vec3 e = -fr.t;
  const Vec3 m = fr.R.transpose() * e - fr.offset;
  require(std::abs(m.z()) > kDegenerateTol, ErrorCode::Degenerate,
          "micro-lens center in the main-lens plane");
  const double inv_mz = 1.0 / m.z();
  const double ds = d / s;

  Vec2 out(intr.u0 + fr.center.x() / s - ds * m.x() * inv_mz,
           intr.v0 + fr.center.y() / s - ds * m.y() * inv_mz);
  if (jac == nullptr) return out;

  *jac = MatX::Zero(2, intr.parameter_count());
  const auto emit = [&](const Vec3& dm, const Vec3& dC) -> Vec2 {
    return {dC.x() / s - ds * (dm.x() * inv_mz - m.x() * sqr(inv_mz) * dm.z()),
            dC.y() / s - ds * (dm.y() * inv_mz - m.y() * sqr(inv_mz) * dm.z())};
  };

  (*jac)(0, intr::kU0) = 1.0;
  (*jac)(1, intr::kV0) = 1.0;
  jac->col(intr::kGapSensor) =
      Vec2(-m.x() * inv_mz / s, -m.y() * inv_mz / s);
  jac->col(intr::kGapMla) = emit(fr.R.transpose() * Vec3::UnitZ(), -Vec3::UnitZ());
  jac->col(intr::kTx) = emit(-fr.R.transpose() * Vec3::UnitX(), Vec3::UnitX());
  jac->col(intr::kTy) = emit(-fr.R.transpose() * Vec3::UnitY(), Vec3::UnitY());
  for (int j = 0; j < 3; ++j)
    jac->col(intr::kThetaX + j) = emit(fr.dR[j].transpose() * e, fr.dR[j] * fr.offset);
  jac->col(intr::kPitch) = emit(-fr.ghat, fr.R * fr.ghat);
  return out;
}

}  // namespace plenocal
