#include "gaitemo/gait.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "gaitemo/error.hpp"

namespace gaitemo {

namespace {

constexpr std::array<std::string_view, kNumJoints> kJointNames = {
    "Root",      "Spine",  "Neck",  "Head", "LShoulder", "RShoulder", "LElbow", "RElbow",
    "LHand",     "RHand",  "LHip",  "RHip", "LKnee",     "RKnee",     "LFoot",  "RFoot"};

constexpr double kStrikeSpeedFraction = 0.1;
constexpr std::size_t kStrikeHalfWindow = 2;

double horizontal_speed(const Gait& g, JointId foot, std::size_t t) {
  const Vec3 d = g.joint(t, foot) - g.joint(t - 1, foot);
  return std::hypot(d.x(), d.z()) * g.fps();
}

}  // namespace

std::string_view joint_name(JointId j) noexcept { return kJointNames[index_of(j)]; }

std::optional<JointId> parse_joint(std::string_view name) {
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    if (kJointNames[i] == name) return static_cast<JointId>(i);
  }
  return std::nullopt;
}

Pose::Pose(std::span<const double> coords) {
  if (coords.size() != kPoseDim)
    throw DataError("expected 48 coordinates, got " + std::to_string(coords.size()));
  std::copy(coords.begin(), coords.end(), coords_.begin());
}

Gait::Gait(std::string id, double fps, std::vector<Pose> frames)
    : id_(std::move(id)), fps_(fps), frames_(std::move(frames)) {
  if (!(fps_ > 0.0) || !std::isfinite(fps_))
    throw DataError("frame rate must be positive, got " + std::to_string(fps_));
  if (frames_.size() < 2)
    throw DataError("a gait needs at least 2 frames, got " + std::to_string(frames_.size()));
  for (std::size_t t = 0; t < frames_.size(); ++t) {
    for (double v : frames_[t].coords()) {
      if (!std::isfinite(v))
        throw DataError("non-finite coordinate in frame " + std::to_string(t));
    }
  }
}

Gait normalize_root(const Gait& g) {
  std::vector<Pose> frames;
  frames.reserve(g.size());
  for (const Pose& p : g.frames()) {
    const Vec3 root = p.joint(JointId::Root);
    Pose q;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const auto id = static_cast<JointId>(j);
      q.set_joint(id, p.joint(id) - root);
    }
    frames.push_back(q);
  }
  return Gait(g.id(), g.fps(), std::move(frames));
}

Gait translate(const Gait& g, const Vec3& offset) {
  std::vector<Pose> frames;
  frames.reserve(g.size());
  for (const Pose& p : g.frames()) {
    Pose q;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const auto id = static_cast<JointId>(j);
      q.set_joint(id, p.joint(id) + offset);
    }
    frames.push_back(q);
  }
  return Gait(g.id(), g.fps(), std::move(frames));
}

double mean_foot_speed(const Gait& g) {
  double sum = 0.0;
  for (JointId foot : {JointId::LFoot, JointId::RFoot}) {
    for (std::size_t t = 1; t < g.size(); ++t)
      sum += (g.joint(t, foot) - g.joint(t - 1, foot)).norm() * g.fps();
  }
  return sum / (2.0 * static_cast<double>(g.size() - 1));
}

std::vector<std::size_t> detect_foot_strikes(const Gait& g, JointId foot) {
  if (foot != JointId::LFoot && foot != JointId::RFoot)
    throw DataError("foot strikes need LFoot or RFoot, got " + std::string(joint_name(foot)));
  const std::size_t n = g.size();
  std::vector<std::size_t> strikes;
  if (n < 2 * kStrikeHalfWindow + 1) return strikes;

  const double threshold = kStrikeSpeedFraction * mean_foot_speed(g);
  bool previous = false;
  // Only frames with a complete window qualify: near the ends a foot that is
  // lifting off slowly looks exactly like one touching down.
  for (std::size_t t = kStrikeHalfWindow; t + kStrikeHalfWindow < n; ++t) {
    const double y = g.joint(t, foot).y();
    bool is_min = true;
    for (std::size_t s = t - kStrikeHalfWindow; s <= t + kStrikeHalfWindow && is_min; ++s)
      is_min = y <= g.joint(s, foot).y();
    const bool hit = is_min && horizontal_speed(g, foot, t) < threshold;
    if (hit && !previous) strikes.push_back(t);
    previous = hit;
  }
  return strikes;
}

namespace {

std::optional<WalkCycle> find_walk_cycle(const Gait& g) {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (JointId foot : {JointId::LFoot, JointId::RFoot}) {
    const auto strikes = detect_foot_strikes(g, foot);
    if (strikes.size() < 2) continue;
    if (!best || strikes[0] < best->first) best = std::make_pair(strikes[0], strikes[1]);
  }
  if (!best) return std::nullopt;
  WalkCycle cycle;
  cycle.start_frame = best->first;
  cycle.end_frame = best->second;
  cycle.duration_s = static_cast<double>(best->second - best->first) / g.fps();
  return cycle;
}

}  // namespace

WalkCycle extract_walk_cycle(const Gait& g) {
  if (auto cycle = find_walk_cycle(g)) return *cycle;
  throw FewerThanTwoStrikes();
}

WalkCycle feature_window(const Gait& g) {
  if (auto cycle = find_walk_cycle(g)) return *cycle;
  WalkCycle whole;
  whole.start_frame = 0;
  whole.end_frame = g.size() - 1;
  whole.duration_s = static_cast<double>(g.size()) / g.fps();
  whole.whole_gait = true;
  return whole;
}

}  // namespace gaitemo
