#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "gaitemo/error.hpp"
#include "gaitemo/features.hpp"
#include "gaitemo/synth.hpp"
#include "oracles.hpp"

using namespace gaitemo;
using J = JointId;

namespace {

const double kPi = std::acos(-1.0);

std::vector<oracle::Frame> to_frames(const Gait& g) {
  std::vector<oracle::Frame> out;
  for (const Pose& p : g.frames()) {
    oracle::Frame f;
    std::copy(p.coords().begin(), p.coords().end(), f.begin());
    out.push_back(f);
  }
  return out;
}

bool close_rel(double a, double b, double rel, double abs_floor = 1e-12) {
  return std::abs(a - b) <= std::max(rel * std::abs(b), abs_floor);
}

// Every joint moves with its own constant velocity.
Gait linear_gait(std::size_t frames, double fps) {
  std::vector<Pose> poses(frames);
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const double s = static_cast<double>(t) / fps;
      const Vec3 v(0.1 * j, -0.05 * j + 0.3, 0.02 * j * j);
      poses[t].set_joint(static_cast<J>(j), Vec3(0.01 * j, 1.0 - 0.05 * j, 0.3) + s * v);
    }
  return Gait("lin", fps, poses);
}

Gait upsample_midpoints(const Gait& g) {
  std::vector<Pose> out;
  for (std::size_t t = 0; t < g.size(); ++t) {
    out.push_back(g[t]);
    if (t + 1 == g.size()) break;
    Pose mid;
    for (std::size_t k = 0; k < kPoseDim; ++k) mid.coords()[k] = 0.5 * (g[t].coords()[k] + g[t + 1].coords()[k]);
    out.push_back(mid);
  }
  return Gait(g.id(), 2.0 * g.fps(), out);
}

Pose t_pose() {
  Pose p;
  p.set_joint(J::Root, {0.0, 1.0, 0.0});
  p.set_joint(J::Spine, {0.0, 1.25, 0.0});
  p.set_joint(J::Neck, {0.0, 1.5, 0.0});
  p.set_joint(J::Head, {0.0, 1.7, 0.1});
  p.set_joint(J::LShoulder, {0.2, 1.4, 0.0});
  p.set_joint(J::RShoulder, {-0.2, 1.4, 0.0});
  p.set_joint(J::LElbow, {0.5, 1.4, 0.0});
  p.set_joint(J::RElbow, {-0.5, 1.4, 0.0});
  p.set_joint(J::LHand, {0.8, 1.4, 0.0});
  p.set_joint(J::RHand, {-0.8, 1.4, 0.0});
  p.set_joint(J::LHip, {0.1, 1.0, 0.0});
  p.set_joint(J::RHip, {-0.1, 1.0, 0.0});
  p.set_joint(J::LKnee, {0.1, 0.5, 0.0});
  p.set_joint(J::RKnee, {-0.1, 0.5, 0.05});
  p.set_joint(J::LFoot, {0.1, 0.0, 0.0});
  p.set_joint(J::RFoot, {-0.1, 0.0, 0.1});
  return p;
}

}  // namespace

TEST_CASE("posture primitives") {
  SUBCASE("unit cube volume") {
    Pose p;
    p.set_joint(J::Head, {1, 1, 1});
    CHECK(posture_features_frame(p).values[0] == 1.0);
  }
  SUBCASE("3-4-5 distance") {
    Pose p;
    p.set_joint(J::RHand, {3, 4, 0});
    CHECK(posture_features_frame(p).values[6] == 5.0);
  }
  SUBCASE("right triangle area") {
    Pose p;
    p.set_joint(J::LHand, {1, 0, 0});
    p.set_joint(J::RHand, {0, 1, 0});
    CHECK(posture_features_frame(p).values[10] == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("angles are unsigned") {
    CHECK(*joint_angle({0, 0, 0}, {1, 0, 0}, {0, 1, 0}) == doctest::Approx(kPi / 2));
    CHECK(*joint_angle({0, 0, 0}, {1, 0, 0}, {-1, 0, 0}) == doctest::Approx(kPi));
    CHECK(*joint_angle({0, 0, 0}, {1, 0, 0}, {2, 0, 0}) == 0.0);
    CHECK_FALSE(joint_angle({0, 0, 0}, {0, 0, 0}, {1, 0, 0}).has_value());
  }
}

TEST_CASE("T-pose posture values") {
  const Pose p = t_pose();
  const PostureFrame f = posture_features_frame(p);
  CHECK_FALSE(f.degenerate_angle);

  // Hand-derived values.
  CHECK(f.values[0] == doctest::Approx(1.6 * 1.7 * 0.1));
  CHECK(f.values[1] == doctest::Approx(std::acos(-0.6)));
  CHECK(f.values[2] == doctest::Approx(std::atan(0.5)));
  CHECK(f.values[3] == doctest::Approx(std::atan(0.5)));
  CHECK(f.values[4] == doctest::Approx(kPi));
  CHECK(f.values[5] == doctest::Approx(kPi - std::atan(0.5)));
  CHECK(f.values[6] == doctest::Approx(std::sqrt(0.64 + 0.16)));
  CHECK(f.values[8] == doctest::Approx(std::sqrt(0.01 + 1.0 + 0.01)));
  CHECK(f.values[10] == doctest::Approx(0.5 * 1.6 * 0.1));

  oracle::Frame raw;
  std::copy(p.coords().begin(), p.coords().end(), raw.begin());
  const auto expect = oracle::posture_frame(raw);
  for (std::size_t k = 0; k < kPostureFrameDim; ++k) CHECK(close_rel(f.values[k], expect[k], 1e-12));
}

TEST_CASE("degenerate angle is zeroed and flagged") {
  Pose p = t_pose();
  p.set_joint(J::Head, p.joint(J::Neck));
  const PostureFrame f = posture_features_frame(p);
  CHECK(f.degenerate_angle);
  CHECK(f.values[5] == 0.0);
}

TEST_CASE("stride length") {
  std::vector<Pose> poses(4);
  for (auto& p : poses) {
    p.set_joint(J::LFoot, {0.5, 0, 0});
    p.set_joint(J::RFoot, {-0.5, 0, 0});
  }
  CHECK(stride_length(Gait("s", 30, poses)) == 1.0);
  CHECK(stride_length(Gait("s", 30, std::vector<Pose>(4))) == 0.0);

  // Sinusoidal separation d + A sin(wt): brute force over frames.
  std::vector<Pose> sine(50);
  double expect = 0.0;
  for (std::size_t t = 0; t < sine.size(); ++t) {
    const double sep = 0.3 + 0.2 * std::sin(0.37 * t);
    sine[t].set_joint(J::LFoot, {0, 0, sep});
    expect = std::max(expect, sep);
  }
  CHECK(stride_length(Gait("s", 30, sine)) == doctest::Approx(expect).epsilon(1e-15));

  WalkCycle w;
  w.start_frame = 10;
  w.end_frame = 14;
  double windowed = 0.0;
  for (std::size_t t = 10; t <= 14; ++t) windowed = std::max(windowed, 0.3 + 0.2 * std::sin(0.37 * t));
  CHECK(stride_length(Gait("s", 30, sine), w) == doctest::Approx(windowed).epsilon(1e-15));
}

TEST_CASE("posture averaging") {
  SUBCASE("identical frames") {
    std::vector<Pose> poses(6, t_pose());
    WalkCycle w;
    w.end_frame = 5;
    const auto avg = posture_features(Gait("c", 30, poses), w);
    const auto one = posture_features_frame(t_pose());
    CHECK(avg.volume == doctest::Approx(one.values[0]).epsilon(1e-15));
    CHECK(avg.angles[0] == doctest::Approx(one.values[1]).epsilon(1e-15));
    CHECK(avg.areas[1] == doctest::Approx(one.values[11]).epsilon(1e-15));
  }
  SUBCASE("mean of two volumes") {
    std::vector<Pose> poses(2);
    poses[0].set_joint(J::Head, {1, 1, 1});
    poses[1].set_joint(J::Head, {1, 1, 3});
    WalkCycle w;
    w.end_frame = 1;
    CHECK(posture_features(Gait("v", 30, poses), w).volume == 2.0);
  }
  SUBCASE("random gait against the loop oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Pose> poses(20);
    for (auto& p : poses)
      for (double& c : p.coords()) c = u(rng);
    const Gait g("r", 30, poses);
    WalkCycle w;
    w.start_frame = 3;
    w.end_frame = 17;
    const auto got = posture_features(g, w).as_array();
    std::array<double, 12> sum{};
    for (std::size_t t = 3; t <= 17; ++t) {
      oracle::Frame f;
      std::copy(poses[t].coords().begin(), poses[t].coords().end(), f.begin());
      const auto v = oracle::posture_frame(f);
      for (int k = 0; k < 12; ++k) sum[k] += v[k] / 15.0;
    }
    for (int k = 0; k < 10; ++k) CHECK(close_rel(got[k], sum[k], 1e-12));
    CHECK(close_rel(got[11], sum[10], 1e-12));
    CHECK(close_rel(got[12], sum[11], 1e-12));
  }
}

TEST_CASE("movement features") {
  SUBCASE("constant velocity") {
    const Gait g = linear_gait(30, 30.0);
    WalkCycle w;
    w.end_frame = 29;
    const auto m = movement_features(g, w);
    const double v_rhand = Vec3(0.1 * 9, -0.05 * 9 + 0.3, 0.02 * 81).norm();
    CHECK(m.speed[0] == doctest::Approx(v_rhand).epsilon(1e-9));
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(m.accel[k] == doctest::Approx(0.0).epsilon(1e-6));
      CHECK(m.jerk[k] == doctest::Approx(0.0).epsilon(1e-6));
    }
  }
  SUBCASE("stationary") {
    WalkCycle w;
    w.end_frame = 9;
    w.duration_s = 0.3;
    const auto m = movement_features(Gait("s", 30, std::vector<Pose>(10)), w);
    const auto a = m.as_array();
    for (std::size_t k = 0; k < 15; ++k) CHECK(a[k] == 0.0);
    CHECK(a[15] == 0.3);
  }
  SUBCASE("quadratic trajectory") {
    const Vec3 acc(0.3, -1.2, 2.0);
    std::vector<Pose> poses(40);
    for (std::size_t t = 0; t < poses.size(); ++t) {
      const double s = t / 60.0;
      poses[t].set_joint(J::Head, 0.5 * s * s * acc);
    }
    WalkCycle w;
    w.end_frame = 39;
    const auto m = movement_features(Gait("q", 60, poses), w);
    CHECK(close_rel(m.accel[2], acc.norm(), 1e-6));
    CHECK(m.jerk[2] == doctest::Approx(0.0).epsilon(1e-6));
  }
  SUBCASE("window too short") {
    WalkCycle w;
    w.start_frame = 2;
    w.end_frame = 4;
    CHECK_THROWS_AS(movement_features(Gait("s", 30, std::vector<Pose>(10)), w), WindowTooShort);
  }
}

TEST_CASE("affective features agree with the brute-force oracle") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 40; ++i) {
    Gait g = [&] {
      if (i % 4 == 3) {
        std::vector<Pose> poses(12 + i);
        for (auto& p : poses)
          for (double& c : p.coords()) c = u(rng);
        return Gait("r", 30, poses);
      }
      SynthParams p = emotion_preset(kAllEmotions[i % 4]);
      p.seed = rng();
      p.noise_sigma = 0.001 * (i % 3);
      return synth_gait(p);
    }();
    const AffectiveFeatures got = affective_features(g);
    const auto expect = oracle::affective(to_frames(g), g.fps());
    for (std::size_t k = 0; k < kAffectiveDim; ++k) {
      INFO("gait " << i << " feature " << affective_feature_names()[k]);
      CHECK(close_rel(got.values[k], expect[k], 1e-9));
    }
  }
}

TEST_CASE("affective features of a stationary gait") {
  std::vector<Pose> poses(10, t_pose());
  const AffectiveFeatures f = affective_features(Gait("s", 30, poses));
  for (std::size_t k = 0; k < 15; ++k) CHECK(f.values[k] == 0.0);
  CHECK(f.whole_gait_window);
  CHECK(f.values[15] == doctest::Approx(10.0 / 30.0));
  for (double v : f.values) CHECK(std::isfinite(v));
}

TEST_CASE("translation invariance") {
  SynthParams p = emotion_preset(Emotion::Happy);
  p.seed = 99;
  const Gait g = synth_gait(p);
  // Shifting rounds every coordinate, so root normalization cancels the
  // offset only to within a few ulps.
  const Gait moved = translate(g, Vec3(12.5, -3.25, 100.0));
  const auto a = affective_features(g).values, b = affective_features(moved).values;
  for (std::size_t k = 0; k < kAffectiveDim; ++k) CHECK(close_rel(b[k], a[k], 1e-9));
}

TEST_CASE("midpoint upsampling at double rate keeps derivative magnitudes for linear motion") {
  const Gait g = linear_gait(25, 30.0);
  const Gait up = upsample_midpoints(g);
  WalkCycle wg, wu;
  wg.end_frame = g.size() - 1;
  wu.end_frame = up.size() - 1;
  const auto a = movement_features(g, wg), b = movement_features(up, wu);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(close_rel(b.speed[k], a.speed[k], 1e-9));
    CHECK(b.accel[k] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(b.jerk[k] == doctest::Approx(0.0).epsilon(1e-3));
  }
}

TEST_CASE("mirror symmetry of the shoulder angles") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  const std::pair<J, J> pairs[] = {{J::LShoulder, J::RShoulder}, {J::LElbow, J::RElbow}, {J::LHand, J::RHand},
                                   {J::LHip, J::RHip},           {J::LKnee, J::RKnee},   {J::LFoot, J::RFoot}};
  for (int i = 0; i < 50; ++i) {
    Pose p;
    for (double& c : p.coords()) c = u(rng);
    Pose m;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const auto id = static_cast<J>(j);
      Vec3 q = p.joint(id);
      q.x() = -q.x();
      m.set_joint(id, q);
    }
    for (auto [l, r] : pairs) {
      const Vec3 lq = m.joint(l);
      m.set_joint(l, m.joint(r));
      m.set_joint(r, lq);
    }
    const auto a = posture_features_frame(p).values, b = posture_features_frame(m).values;
    CHECK(b[1] == doctest::Approx(a[1]).epsilon(1e-12));
    CHECK(b[2] == doctest::Approx(a[3]).epsilon(1e-12));
    CHECK(b[3] == doctest::Approx(a[2]).epsilon(1e-12));
  }
}

TEST_CASE("range invariants on synthetic walkers") {
  for (Emotion e : kAllEmotions) {
    for (const Gait& g : synth_corpus(e, 10, 21)) {
      const auto f = affective_features(g).values;
      for (std::size_t k = 0; k < kAffectiveDim; ++k) {
        CHECK(std::isfinite(f[k]));
        if (k < 17 || k >= 22) CHECK(f[k] >= 0.0);
      }
      for (std::size_t k = 17; k < 22; ++k) {
        CHECK(f[k] >= 0.0);
        CHECK(f[k] <= kPi);
      }
    }
  }
}

TEST_CASE("feature names and csv") {
  const auto& names = affective_feature_names();
  CHECK(std::set<std::string>(names.begin(), names.end()).size() == kAffectiveDim);
  AffectiveFeatures f;
  f.values.fill(0.5);
  const std::string csv = affective_features_csv({"g1"}, {f});
  CHECK(csv.rfind("gait_id,speed_rhand,", 0) == 0);
  CHECK(csv.find("\ng1,0.5,") != std::string::npos);
  CHECK_THROWS_AS(affective_features_csv({"a", "b"}, {f}), DataError);
}
