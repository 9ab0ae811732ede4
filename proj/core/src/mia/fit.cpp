#include "plenocal/mia/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "plenocal/error.hpp"
#include "plenocal/solver/levmar.hpp"

namespace plenocal {

namespace {

double median_of(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

Vec2 rot_apply(double angle, const Vec2& v) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

struct Assignment {
  std::map<std::pair<int, int>, int> index_to_center;
  int matched = 0;
};

/// Rounds each center to the nearest lattice vertex of the current model.
/// Keeps the closest center when several round to the same index.
Assignment assign_indices(const std::vector<Vec2>& centers, MLAArrangement arrangement,
                          const Vec2& origin, double pitch, double vartheta_z,
                          double tolerance) {
  const bool hex = arrangement == MLAArrangement::HexRowAligned;
  const double row_h = hex ? std::sqrt(3.0) / 2.0 : 1.0;
  Assignment out;
  std::map<std::pair<int, int>, double> best;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    // Undo the grid rotation, work in pitch units.
    const Vec2 t = rot_apply(vartheta_z, centers[i] - origin) / pitch;
    const int l = static_cast<int>(std::lround(t.y() / row_h));
    const double shift = (hex && l % 2 != 0) ? 0.5 : 0.0;
    const int k = static_cast<int>(std::lround(t.x() - shift));
    const double dx = t.x() - shift - k;
    const double dy = t.y() - l * row_h;
    const double miss = std::hypot(dx, dy);
    if (miss > tolerance) continue;
    const auto key = std::make_pair(k, l);
    const auto it = best.find(key);
    if (it != best.end() && it->second <= miss) continue;
    best[key] = miss;
    out.index_to_center[key] = static_cast<int>(i);
  }
  out.matched = static_cast<int>(out.index_to_center.size());
  return out;
}

/// Shifts indices so the top left assigned lens is (0, 0). A row shift by an
/// odd amount swaps which hexagonal rows carry the half pitch offset; the
/// k fixup below restores the convention, the leftover half pitch lands in
/// the origin on the next refinement.
void normalize_indices(Assignment& a, MLAArrangement arrangement) {
  if (a.index_to_center.empty()) return;
  const bool hex = arrangement == MLAArrangement::HexRowAligned;
  int lmin = std::numeric_limits<int>::max();
  for (const auto& [key, idx] : a.index_to_center) lmin = std::min(lmin, key.second);
  std::map<std::pair<int, int>, int> shifted;
  int kmin = std::numeric_limits<int>::max();
  for (const auto& [key, idx] : a.index_to_center) {
    int k = key.first;
    const int l = key.second - lmin;
    if (hex && lmin % 2 != 0 && l % 2 != 0) k -= 1;
    shifted[{k, l}] = idx;
    kmin = std::min(kmin, k);
  }
  a.index_to_center.clear();
  for (const auto& [key, idx] : shifted) a.index_to_center[{key.first - kmin, key.second}] = idx;
}

/// Least squares over (origin_x, origin_y, pitch, vartheta_z).
class GridProblem final : public LeastSquaresProblem {
 public:
  GridProblem(const std::vector<Vec2>& centers, const Assignment& assignment,
              MLAArrangement arrangement) {
    for (const auto& [key, idx] : assignment.index_to_center) {
      offsets_.push_back(mla_unit_offset(arrangement, key.first, key.second));
      targets_.push_back(centers[idx]);
    }
  }

  int parameter_count() const override { return 4; }
  int residual_count() const override { return static_cast<int>(targets_.size()) * 2; }

  void evaluate(const VecX& x, VecX& r, MatX* jac) const override {
    const Vec2 origin(x[0], x[1]);
    const double pitch = x[2], theta = x[3];
    const double c = std::cos(-theta), s = std::sin(-theta);
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      const Vec2 g = offsets_[i] * pitch;
      const Vec2 rg(c * g.x() - s * g.y(), s * g.x() + c * g.y());
      const Vec2 v = origin + rg;
      r[2 * i] = v.x() - targets_[i].x();
      r[2 * i + 1] = v.y() - targets_[i].y();
      if (!jac) continue;
      jac->row(2 * i).setZero();
      jac->row(2 * i + 1).setZero();
      (*jac)(2 * i, 0) = 1;
      (*jac)(2 * i + 1, 1) = 1;
      (*jac)(2 * i, 2) = c * offsets_[i].x() - s * offsets_[i].y();
      (*jac)(2 * i + 1, 2) = s * offsets_[i].x() + c * offsets_[i].y();
      // d/dtheta of Rot(-theta) applied to g.
      (*jac)(2 * i, 3) = s * g.x() + c * g.y();
      (*jac)(2 * i + 1, 3) = -c * g.x() + s * g.y();
    }
  }

 private:
  std::vector<Vec2> offsets_;
  std::vector<Vec2> targets_;
};

}  // namespace

MiaGrid fit_grid(const std::vector<Vec2>& centers, int image_width, int image_height,
                 MLAArrangement arrangement, GridFitReport* report,
                 const GridFitOptions& options) {
  require(centers.size() >= 4, ErrorCode::Degenerate,
          "grid undetectable: need at least 4 micro-image centers");
  const bool hex = arrangement == MLAArrangement::HexRowAligned;

  // Seed pitch and rotation from nearest neighbour displacements. All grid
  // neighbours sit one pitch away; their image angles fold onto the grid
  // rotation modulo the lattice symmetry (60 degrees hexagonal, 90 square).
  std::vector<double> distances, angles;
  distances.reserve(centers.size());
  const double fold = hex ? kPi / 3.0 : kPi / 2.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    double best = std::numeric_limits<double>::max();
    Vec2 delta = Vec2::Zero();
    for (std::size_t j = 0; j < centers.size(); ++j) {
      if (i == j) continue;
      const double dist2 = (centers[j] - centers[i]).squaredNorm();
      if (dist2 < best) {
        best = dist2;
        delta = centers[j] - centers[i];
      }
    }
    distances.push_back(std::sqrt(best));
    const double angle = std::atan2(delta.y(), delta.x());
    angles.push_back(angle - fold * std::round(angle / fold));
  }
  const double pitch0 = median_of(distances);
  require(pitch0 > 1.0, ErrorCode::Degenerate, "micro-image pitch collapsed below one pixel");
  // vertex() applies Rot(-vartheta_z), so a measured lattice angle of -a
  // means vartheta_z = a.
  const double theta0 = -median_of(angles);

  Assignment assignment =
      assign_indices(centers, arrangement, centers.front(), pitch0, theta0,
                     options.match_tolerance);
  normalize_indices(assignment, arrangement);

  VecX x(4);
  double theta = theta0, pitch = pitch0;
  int total_iterations = 0;
  LevMarReport rep;
  for (int pass = 0; pass < options.refine_passes; ++pass) {
    require(assignment.matched >= 4, ErrorCode::Degenerate,
            "grid undetectable: too few centers match the lattice model");
    int kmax = 0, lmax = 0;
    for (const auto& [key, idx] : assignment.index_to_center) {
      kmax = std::max(kmax, key.first);
      lmax = std::max(lmax, key.second);
    }
    require(kmax >= 1 && lmax >= 1, ErrorCode::Degenerate,
            "grid undetectable: centers span a single row or column");
    // Optimal origin given pitch and rotation is the mean offset; use it to
    // re-seed after each index normalization.
    Vec2 origin = Vec2::Zero();
    for (const auto& [key, idx] : assignment.index_to_center)
      origin += centers[idx] -
                rot_apply(-theta, mla_unit_offset(arrangement, key.first, key.second) * pitch);
    origin /= static_cast<double>(assignment.matched);

    GridProblem problem(centers, assignment, arrangement);
    x << origin.x(), origin.y(), pitch, theta;
    LevMarOptions opt;
    opt.max_iterations = options.max_iterations;
    rep = levmar_solve(problem, x, opt);
    require(rep.converged, ErrorCode::NonConvergence,
            "micro-image grid refinement did not converge");
    total_iterations += rep.iterations;
    pitch = x[2];
    theta = x[3];
    assignment = assign_indices(centers, arrangement, {x[0], x[1]}, pitch, theta,
                                options.match_tolerance);
    normalize_indices(assignment, arrangement);
  }

  MiaGrid grid;
  grid.arrangement = arrangement;
  grid.pitch_px = pitch;
  grid.vartheta_z = theta;
  // Final origin consistent with the normalized indices.
  Vec2 origin = Vec2::Zero();
  for (const auto& [key, idx] : assignment.index_to_center)
    origin += centers[idx] -
              rot_apply(-theta, mla_unit_offset(arrangement, key.first, key.second) * pitch);
  origin /= static_cast<double>(assignment.matched);
  grid.origin_px = origin;

  double sq_sum = 0;
  for (const auto& [key, idx] : assignment.index_to_center) {
    grid.centers[key] = centers[idx];
    grid.grid_width = std::max(grid.grid_width, key.first + 1);
    grid.grid_height = std::max(grid.grid_height, key.second + 1);
    const Vec2 v = grid.vertex(key.first, key.second);
    sq_sum += (v - centers[idx]).squaredNorm();
  }
  grid.tau_x = 0.5 * (image_width - 1) - origin.x();
  grid.tau_y = 0.5 * (image_height - 1) - origin.y();
  grid.validate();

  if (report) {
    report->detected = static_cast<int>(centers.size());
    report->matched = assignment.matched;
    report->rms_px = std::sqrt(sq_sum / assignment.matched);
    report->iterations = total_iterations;
  }
  return grid;
}

}  // namespace plenocal
