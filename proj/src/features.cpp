#include "gaitemo/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "gaitemo/error.hpp"
#include "gaitemo/text.hpp"

namespace gaitemo {

std::optional<double> joint_angle(const Vec3& vertex, const Vec3& a, const Vec3& b) {
  const Vec3 u = a - vertex;
  const Vec3 v = b - vertex;
  if (u.squaredNorm() == 0.0 || v.squaredNorm() == 0.0) return std::nullopt;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

PostureFrame posture_features_frame(const Pose& p) {
  using J = JointId;
  PostureFrame out;
  auto& f = out.values;

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    const Vec3 q = p.joint(static_cast<J>(j));
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  f[0] = (hi - lo).prod();

  const Vec3 neck = p.joint(J::Neck);
  const Vec3 lsh = p.joint(J::LShoulder);
  const Vec3 rsh = p.joint(J::RShoulder);
  const Vec3 spine = p.joint(J::Spine);
  const Vec3 up = neck + Vec3::UnitY();
  const std::array<std::optional<double>, 5> angles = {
      joint_angle(neck, rsh, lsh),
      joint_angle(rsh, neck, lsh),
      joint_angle(lsh, neck, rsh),
      joint_angle(neck, up, spine),
      joint_angle(neck, p.joint(J::Head), spine),
  };
  for (std::size_t k = 0; k < angles.size(); ++k) {
    if (angles[k]) {
      f[1 + k] = *angles[k];
    } else {
      f[1 + k] = 0.0;
      out.degenerate_angle = true;
    }
  }

  const Vec3 root = p.joint(J::Root);
  f[6] = (p.joint(J::RHand) - root).norm();
  f[7] = (p.joint(J::LHand) - root).norm();
  f[8] = (p.joint(J::RFoot) - root).norm();
  f[9] = (p.joint(J::LFoot) - root).norm();

  f[10] = triangle_area(p.joint(J::LHand), p.joint(J::RHand), neck);
  f[11] = triangle_area(p.joint(J::LFoot), p.joint(J::RFoot), root);
  return out;
}

double stride_length(const Gait& g) {
  WalkCycle all;
  all.end_frame = g.size() - 1;
  return stride_length(g, all);
}

double stride_length(const Gait& g, const WalkCycle& window) {
  double best = 0.0;
  for (std::size_t t = window.start_frame; t <= window.end_frame; ++t)
    best = std::max(best, (g.joint(t, JointId::LFoot) - g.joint(t, JointId::RFoot)).norm());
  return best;
}

std::array<double, kPostureDim> PostureFeatures::as_array() const {
  return {volume,       angles[0],    angles[1],    angles[2],     angles[3],
          angles[4],    distances[0], distances[1], distances[2],  distances[3],
          stride_length, areas[0],    areas[1]};
}

std::array<double, kMovementDim> MovementFeatures::as_array() const {
  std::array<double, kMovementDim> out{};
  std::copy(speed.begin(), speed.end(), out.begin());
  std::copy(accel.begin(), accel.end(), out.begin() + 5);
  std::copy(jerk.begin(), jerk.end(), out.begin() + 10);
  out[15] = cycle_time;
  return out;
}

PostureFeatures posture_features(const Gait& g, const WalkCycle& window) {
  if (window.end_frame >= g.size() || window.start_frame > window.end_frame)
    throw DataError("window lies outside the gait");
  std::array<double, kPostureFrameDim> sum{};
  PostureFeatures out;
  for (std::size_t t = window.start_frame; t <= window.end_frame; ++t) {
    const PostureFrame frame = posture_features_frame(g[t]);
    out.degenerate_angle = out.degenerate_angle || frame.degenerate_angle;
    for (std::size_t k = 0; k < kPostureFrameDim; ++k) sum[k] += frame.values[k];
  }
  const auto n = static_cast<double>(window.frames());
  out.volume = sum[0] / n;
  for (std::size_t k = 0; k < 5; ++k) out.angles[k] = sum[1 + k] / n;
  for (std::size_t k = 0; k < 4; ++k) out.distances[k] = sum[6 + k] / n;
  out.areas = {sum[10] / n, sum[11] / n};
  out.stride_length = stride_length(g, window);
  return out;
}

MovementFeatures movement_features(const Gait& g, const WalkCycle& window) {
  if (window.end_frame >= g.size() || window.start_frame > window.end_frame)
    throw DataError("window lies outside the gait");
  const std::size_t n = window.frames();
  if (n < 4) throw WindowTooShort(n);

  const double fps = g.fps();
  MovementFeatures out;
  for (std::size_t k = 0; k < kMovementJoints.size(); ++k) {
    const JointId j = kMovementJoints[k];
    double v_sum = 0.0, a_sum = 0.0, j_sum = 0.0;
    for (std::size_t t = window.start_frame + 1; t <= window.end_frame; ++t) {
      const Vec3 p0 = g.joint(t, j);
      const Vec3 p1 = g.joint(t - 1, j);
      v_sum += (p0 - p1).norm() * fps;
      if (t >= window.start_frame + 2) {
        const Vec3 p2 = g.joint(t - 2, j);
        a_sum += (p0 - 2.0 * p1 + p2).norm() * fps * fps;
        if (t >= window.start_frame + 3) {
          const Vec3 p3 = g.joint(t - 3, j);
          j_sum += (p0 - 3.0 * p1 + 3.0 * p2 - p3).norm() * fps * fps * fps;
        }
      }
    }
    out.speed[k] = v_sum / static_cast<double>(n - 1);
    out.accel[k] = a_sum / static_cast<double>(n - 2);
    out.jerk[k] = j_sum / static_cast<double>(n - 3);
  }
  out.cycle_time = window.duration_s;
  return out;
}

AffectiveFeatures affective_features(const Gait& g) {
  const Gait normalized = normalize_root(g);
  const WalkCycle window = feature_window(normalized);
  const MovementFeatures movement = movement_features(normalized, window);
  const PostureFeatures posture = posture_features(normalized, window);

  AffectiveFeatures out;
  const auto m = movement.as_array();
  const auto p = posture.as_array();
  std::copy(m.begin(), m.end(), out.values.begin());
  std::copy(p.begin(), p.end(), out.values.begin() + kMovementDim);
  out.degenerate_angle = posture.degenerate_angle;
  out.whole_gait_window = window.whole_gait;
  return out;
}

const std::array<std::string, kAffectiveDim>& affective_feature_names() {
  static const std::array<std::string, kAffectiveDim> names = {
      "speed_rhand",          "speed_lhand",          "speed_head",
      "speed_rfoot",          "speed_lfoot",          "accel_rhand",
      "accel_lhand",          "accel_head",           "accel_rfoot",
      "accel_lfoot",          "jerk_rhand",           "jerk_lhand",
      "jerk_head",            "jerk_rfoot",           "jerk_lfoot",
      "cycle_time",           "volume",               "angle_neck_shoulders",
      "angle_rshoulder",      "angle_lshoulder",      "angle_neck_vertical_back",
      "angle_neck_head_back", "dist_rhand_root",      "dist_lhand_root",
      "dist_rfoot_root",      "dist_lfoot_root",      "stride_length",
      "area_hands_neck",      "area_feet_root"};
  return names;
}

std::string affective_features_csv(const std::vector<std::string>& ids,
                                   const std::vector<AffectiveFeatures>& rows) {
  if (ids.size() != rows.size()) throw DataError("id/feature row count mismatch");
  std::string out = "gait_id";
  for (const auto& name : affective_feature_names()) out += "," + name;
  out += '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += ids[i];
    for (double v : rows[i].values) out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

}  // namespace gaitemo
