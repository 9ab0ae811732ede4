#include "plenocal/model/intrinsics.hpp"

namespace plenocal {

InternalConfig internal_config_from_name(const std::string& s) {
  if (s == "keplerian") return InternalConfig::Keplerian;
  if (s == "galilean") return InternalConfig::Galilean;
  if (s == "unfocused") return InternalConfig::Unfocused;
  fail(ErrorCode::Validation, "unknown internal configuration: " + s);
}

VecX CameraIntrinsics::pack() const {
  VecX x(parameter_count());
  x[intr::kF] = F;
  x[intr::kQ1] = distortion.q1;
  x[intr::kQ2] = distortion.q2;
  x[intr::kQ3] = distortion.q3;
  x[intr::kP1] = distortion.p1;
  x[intr::kP2] = distortion.p2;
  x[intr::kU0] = u0;
  x[intr::kV0] = v0;
  x[intr::kGapSensor] = d;
  x[intr::kGapMla] = D;
  x[intr::kTx] = tx;
  x[intr::kTy] = ty;
  x[intr::kThetaX] = mla_rotation.x();
  x[intr::kThetaY] = mla_rotation.y();
  x[intr::kThetaZ] = mla_rotation.z();
  x[intr::kPitch] = pitch;
  for (int i = 0; i < type_count(); ++i) x[intr::kFocal0 + i] = focals[i];
  return x;
}

void CameraIntrinsics::unpack(const VecX& x) {
  require(x.size() == parameter_count(), ErrorCode::Validation,
          "intrinsics: parameter vector size mismatch");
  F = x[intr::kF];
  distortion.q1 = x[intr::kQ1];
  distortion.q2 = x[intr::kQ2];
  distortion.q3 = x[intr::kQ3];
  distortion.p1 = x[intr::kP1];
  distortion.p2 = x[intr::kP2];
  u0 = x[intr::kU0];
  v0 = x[intr::kV0];
  d = x[intr::kGapSensor];
  D = x[intr::kGapMla];
  tx = x[intr::kTx];
  ty = x[intr::kTy];
  mla_rotation = Vec3(x[intr::kThetaX], x[intr::kThetaY], x[intr::kThetaZ]);
  pitch = x[intr::kPitch];
  for (int i = 0; i < type_count(); ++i) focals[i] = x[intr::kFocal0 + i];
}

std::vector<std::string> CameraIntrinsics::parameter_names(int type_count) {
  std::vector<std::string> names = {"F",  "Q1", "Q2", "Q3",      "P1",      "P2",
                                    "u0", "v0", "d",  "D",       "tx",      "ty",
                                    "theta_x", "theta_y", "theta_z", "pitch"};
  for (int i = 0; i < type_count; ++i) names.push_back("f" + std::to_string(i + 1));
  return names;
}

}  // namespace plenocal
