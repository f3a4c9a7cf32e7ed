#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace gaitemo {

using Vec3 = Eigen::Vector3d;

inline constexpr std::size_t kNumJoints = 16;
inline constexpr std::size_t kPoseDim = 3 * kNumJoints;

/// Canonical 16-joint skeleton. The integer encoding is the column order of
/// every serialized pose. Y is up, the ground is the XZ plane.
enum class JointId : std::uint8_t {
  Root,
  Spine,
  Neck,
  Head,
  LShoulder,
  RShoulder,
  LElbow,
  RElbow,
  LHand,
  RHand,
  LHip,
  RHip,
  LKnee,
  RKnee,
  LFoot,
  RFoot,
};

constexpr std::size_t index_of(JointId j) noexcept { return static_cast<std::size_t>(j); }

std::string_view joint_name(JointId j) noexcept;
std::optional<JointId> parse_joint(std::string_view name);

/// 16 joint positions in meters, flattened joint-major (x, y, z per joint).
class Pose {
 public:
  Pose() { coords_.fill(0.0); }
  explicit Pose(std::span<const double> coords);

  Vec3 joint(JointId j) const {
    const std::size_t o = 3 * index_of(j);
    return {coords_[o], coords_[o + 1], coords_[o + 2]};
  }
  void set_joint(JointId j, const Vec3& p) {
    const std::size_t o = 3 * index_of(j);
    coords_[o] = p.x();
    coords_[o + 1] = p.y();
    coords_[o + 2] = p.z();
  }

  std::span<const double, kPoseDim> coords() const noexcept { return coords_; }
  std::span<double, kPoseDim> coords() noexcept { return coords_; }

  bool operator==(const Pose&) const = default;

 private:
  std::array<double, kPoseDim> coords_;
};

/// A timed sequence of poses. Immutable after construction; the constructor
/// enforces at least two frames, a positive frame rate and finite
/// coordinates.
class Gait {
 public:
  Gait(std::string id, double fps, std::vector<Pose> frames);

  const std::string& id() const noexcept { return id_; }
  double fps() const noexcept { return fps_; }
  std::size_t size() const noexcept { return frames_.size(); }
  const std::vector<Pose>& frames() const noexcept { return frames_; }
  const Pose& operator[](std::size_t t) const { return frames_[t]; }

  Vec3 joint(std::size_t t, JointId j) const { return frames_[t].joint(j); }

  bool operator==(const Gait&) const = default;

 private:
  std::string id_;
  double fps_;
  std::vector<Pose> frames_;
};

/// One stride between consecutive strikes of the same foot.
/// `whole_gait` marks the fallback window used when no stride was found.
struct WalkCycle {
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;
  double duration_s = 0.0;
  bool whole_gait = false;

  std::size_t frames() const noexcept { return end_frame - start_frame + 1; }
};

/// Subtract the root position from every joint, frame by frame.
Gait normalize_root(const Gait& g);

/// Translate every joint of every frame by `offset`.
Gait translate(const Gait& g, const Vec3& offset);

/// Frames where `foot` strikes the ground: a local minimum of height within
/// a full +-2 frame window whose horizontal speed is below 10% of the gait's mean
/// foot speed. Runs of adjacent qualifying frames collapse to the earliest.
/// Expects a root-normalized gait.
std::vector<std::size_t> detect_foot_strikes(const Gait& g, JointId foot);

/// First stride of the foot that strikes earliest. Throws
/// FewerThanTwoStrikes when neither foot strikes twice.
WalkCycle extract_walk_cycle(const Gait& g);

/// extract_walk_cycle, or the whole gait [0, tau-1] with duration tau/fps.
WalkCycle feature_window(const Gait& g);

/// Mean 3D speed of both feet in m/s (backward differences).
double mean_foot_speed(const Gait& g);

}  // namespace gaitemo
