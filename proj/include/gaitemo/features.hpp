#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gaitemo/gait.hpp"

namespace gaitemo {

inline constexpr std::size_t kPostureFrameDim = 12;
inline constexpr std::size_t kPostureDim = 13;
inline constexpr std::size_t kMovementDim = 16;
inline constexpr std::size_t kAffectiveDim = kMovementDim + kPostureDim;

/// Per-frame posture descriptor:
/// [volume, 5 angles, 4 distances, 2 areas].
struct PostureFrame {
  std::array<double, kPostureFrameDim> values{};
  bool degenerate_angle = false;
};

/// Posture block. `as_array` order: volume, neck-by-shoulders,
/// rshoulder-by-neck-and-lshoulder, lshoulder-by-neck-and-rshoulder,
/// neck-by-vertical-and-back, neck-by-head-and-back, rhand-root, lhand-root,
/// rfoot-root, lfoot-root, stride length, hands-neck area, feet-root area.
struct PostureFeatures {
  double volume = 0.0;
  std::array<double, 5> angles{};
  std::array<double, 4> distances{};
  double stride_length = 0.0;
  std::array<double, 2> areas{};
  bool degenerate_angle = false;

  std::array<double, kPostureDim> as_array() const;
};

/// Movement block. Joints in order RHand, LHand, Head, RFoot, LFoot.
/// `as_array` order: 5 speeds, 5 accelerations, 5 jerks, cycle time.
struct MovementFeatures {
  std::array<double, 5> speed{};
  std::array<double, 5> accel{};
  std::array<double, 5> jerk{};
  double cycle_time = 0.0;

  std::array<double, kMovementDim> as_array() const;
};

/// Movement block followed by posture block.
struct AffectiveFeatures {
  std::array<double, kAffectiveDim> values{};
  bool degenerate_angle = false;
  bool whole_gait_window = false;
};

/// The five joints tracked by the movement block, in feature order.
inline constexpr std::array<JointId, 5> kMovementJoints = {
    JointId::RHand, JointId::LHand, JointId::Head, JointId::RFoot, JointId::LFoot};

/// Unsigned angle at `vertex` between rays vertex->a and vertex->b, in
/// [0, pi]. Returns nullopt when either ray has zero length.
std::optional<double> joint_angle(const Vec3& vertex, const Vec3& a, const Vec3& b);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

PostureFrame posture_features_frame(const Pose& p);

/// Max inter-foot distance over frames [start, end] (whole gait by default).
double stride_length(const Gait& g);
double stride_length(const Gait& g, const WalkCycle& window);

PostureFeatures posture_features(const Gait& g, const WalkCycle& window);
MovementFeatures movement_features(const Gait& g, const WalkCycle& window);

/// Root-normalize, select the stride (whole gait if none), then compute
/// movement ++ posture.
AffectiveFeatures affective_features(const Gait& g);

const std::array<std::string, kAffectiveDim>& affective_feature_names();

/// CSV with header `gait_id,<29 names>` and one row per gait.
std::string affective_features_csv(const std::vector<std::string>& ids,
                                   const std::vector<AffectiveFeatures>& rows);

}  // namespace gaitemo
