#include "gaitemo/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "gaitemo/error.hpp"
#include "gaitemo/gait_io.hpp"
#include "gaitemo/text.hpp"

namespace gaitemo {

namespace {

constexpr double kPi = std::numbers::pi;

// Per-gait jitter applied by synth_corpus.
constexpr double kScaleJitter = 0.08;
constexpr double kTiltJitter = 0.05;
constexpr double kLeanJitter = 0.03;
constexpr double kBodyJitter = 0.08;

// Flattens a sinusoid near its extremes so the foot dwells at the front and
// back of the stride: g(s) = s (3 - s^2) / 2 has g'(+-1) = 0.
double dwell(double s) { return 0.5 * s * (3.0 - s * s); }

// Foot height above the ground over one leg cycle, as a fraction of the
// swing lift. Swing runs from toe-off, slightly before the rear extreme of the
// stride, to heel strike at the front extreme (phase pi/2). During stance the
// heel rises slowly, so heel strike is the lowest point of the cycle.
constexpr double kToeOffLead = 0.6;
constexpr double kHeelRise = 0.25;

double foot_lift(double phase) {
  constexpr double toe_off = -kPi / 2 - kToeOffLead;
  constexpr double strike = kPi / 2;
  double psi = std::remainder(phase, 2.0 * kPi);
  if (psi >= toe_off && psi < strike) {
    const double v = (psi - toe_off) / (strike - toe_off);
    const double r = std::sin(kPi * v);
    return kHeelRise * (1.0 - v) + r * r;
  }
  if (psi < strike) psi += 2.0 * kPi;
  const double u = (psi - strike) / (toe_off + 2.0 * kPi - strike);
  return kHeelRise * u;
}

// Unit direction of a limb segment hanging down, swung forward by `swing`
// and out to the side by `abduction`. `side` is +1 for left, -1 for right.
Vec3 limb_direction(double swing, double abduction, double side) {
  return {side * std::sin(abduction) * std::cos(swing), -std::cos(abduction) * std::cos(swing),
          std::sin(swing)};
}

struct Preset {
  double stride, speed, arm, tilt, lean, abduction;
};

Preset builtin_preset(Emotion e) {
  switch (e) {
    case Emotion::Happy: return {1.15, 1.15, 0.60, -0.12, 0.00, 0.15};
    case Emotion::Angry: return {1.30, 1.25, 0.45, 0.09, 0.10, 0.08};
    case Emotion::Sad: return {0.70, 0.70, 0.15, 20.0 * kPi / 180.0, 0.15, 0.00};
    case Emotion::Neutral: break;
  }
  return {1.0, 1.0, 0.35, 0.0, 0.0, 0.05};
}

}  // namespace

void SynthParams::validate() const {
  if (!(stride_scale > 0.0) || !(speed_scale > 0.0) || !(body_scale > 0.0))
    throw DataError("synth scales must be positive");
  if (!(noise_sigma >= 0.0)) throw DataError("noise_sigma must be >= 0");
  if (frames < 2) throw DataError("synth needs at least 2 frames");
  if (!(fps > 0.0)) throw DataError("fps must be positive");
}

SynthParams emotion_preset(Emotion e, const nlohmann::json* presets) {
  const Preset b = builtin_preset(e);
  SynthParams p;
  p.emotion = e;
  p.stride_scale = b.stride;
  p.speed_scale = b.speed;
  p.arm_swing_amp = b.arm;
  p.head_tilt = b.tilt;
  p.trunk_lean = b.lean;
  p.arm_abduction = b.abduction;
  if (presets && presets->contains(std::string(emotion_name(e)))) {
    const auto& j = presets->at(std::string(emotion_name(e)));
    p.stride_scale = j.value("stride_scale", p.stride_scale);
    p.speed_scale = j.value("speed_scale", p.speed_scale);
    p.arm_swing_amp = j.value("arm_swing_amp", p.arm_swing_amp);
    p.head_tilt = j.value("head_tilt", p.head_tilt);
    p.trunk_lean = j.value("trunk_lean", p.trunk_lean);
    p.arm_abduction = j.value("arm_abduction", p.arm_abduction);
    p.noise_sigma = j.value("noise_sigma", p.noise_sigma);
  }
  return p;
}

double synth_period(const SynthParams& p) noexcept { return kBasePeriodSeconds / p.speed_scale; }

Gait synth_gait(const SynthParams& p, std::string id) {
  p.validate();
  std::mt19937_64 rng(p.seed);
  const double phase0 = std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(rng);
  std::normal_distribution<double> noise(0.0, 1.0);

  const double s = p.body_scale;
  const double period = synth_period(p);
  const double half_stride = 0.28 * p.stride_scale * s;
  const double lift = 0.08 * s;
  const double walk_speed = 4.0 * half_stride / period;
  const double lean = p.trunk_lean;
  const Vec3 up(0.0, std::cos(lean), std::sin(lean));

  std::vector<Pose> frames;
  frames.reserve(static_cast<std::size_t>(p.frames));
  for (int t = 0; t < p.frames; ++t) {
    const double time = t / p.fps;
    const double phase = phase0 + 2.0 * kPi * time / period;
    Pose pose;

    pose.set_joint(JointId::Spine, 0.25 * s * up);
    const Vec3 neck = 0.5 * s * up;
    pose.set_joint(JointId::Neck, neck);
    const double head_angle = lean + p.head_tilt;
    pose.set_joint(JointId::Head, neck + 0.18 * s * Vec3(0.0, std::cos(head_angle), std::sin(head_angle)) +
                                      Vec3(0.0, 0.006 * s * std::sin(2.0 * phase), 0.0));

    for (double side : {1.0, -1.0}) {
      const bool left = side > 0.0;
      const double leg_phase = left ? phase : phase + kPi;

      const Vec3 hip(side * 0.1 * s, 0.0, 0.0);
      const double swing = foot_lift(leg_phase);
      const Vec3 foot(side * 0.1 * s, -0.9 * s + lift * swing,
                      half_stride * dwell(std::sin(leg_phase)));
      const Vec3 knee = 0.5 * (hip + foot) + Vec3(0.0, 0.0, 0.05 * s + 0.1 * s * swing);
      pose.set_joint(left ? JointId::LHip : JointId::RHip, hip);
      pose.set_joint(left ? JointId::LKnee : JointId::RKnee, knee);
      pose.set_joint(left ? JointId::LFoot : JointId::RFoot, foot);

      // Each arm swings against the leg on its own side.
      const double arm = -p.arm_swing_amp * std::sin(leg_phase);
      const double flex = 0.2 + 0.5 * std::max(0.0, std::sin(arm));
      const Vec3 shoulder = neck + Vec3(side * 0.17 * s, -0.04 * s * std::cos(lean), -0.04 * s * std::sin(lean));
      const Vec3 elbow = shoulder + 0.3 * s * limb_direction(arm, p.arm_abduction, side);
      const Vec3 hand = elbow + 0.27 * s * limb_direction(arm + flex, p.arm_abduction, side);
      pose.set_joint(left ? JointId::LShoulder : JointId::RShoulder, shoulder);
      pose.set_joint(left ? JointId::LElbow : JointId::RElbow, elbow);
      pose.set_joint(left ? JointId::LHand : JointId::RHand, hand);
    }

    const Vec3 root(0.0, 0.95 * s - 0.015 * s * std::cos(2.0 * phase), walk_speed * time);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const auto joint = static_cast<JointId>(j);
      Vec3 q = pose.joint(joint) + root;
      if (joint != JointId::Root && p.noise_sigma > 0.0)
        q += p.noise_sigma * Vec3(noise(rng), noise(rng), noise(rng));
      pose.set_joint(joint, q);
    }
    frames.push_back(pose);
  }
  if (id.empty()) id = std::string(emotion_name(p.emotion)) + "_" + std::to_string(p.seed);
  return Gait(std::move(id), p.fps, std::move(frames));
}

std::vector<Gait> synth_corpus(Emotion e, int n, std::uint64_t seed, const nlohmann::json* presets) {
  if (n < 0) throw DataError("corpus size must be >= 0");
  std::vector<Gait> out;
  out.reserve(static_cast<std::size_t>(n));
  const SynthParams base = emotion_preset(e, presets);
  for (int i = 0; i < n; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index_of(e)), static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> scale(1.0 - kScaleJitter, 1.0 + kScaleJitter);
    std::uniform_real_distribution<double> body(1.0 - kBodyJitter, 1.0 + kBodyJitter);
    std::normal_distribution<double> normal(0.0, 1.0);

    SynthParams p = base;
    p.stride_scale *= scale(rng);
    p.speed_scale *= scale(rng);
    p.arm_swing_amp *= scale(rng);
    p.head_tilt += kTiltJitter * normal(rng);
    p.trunk_lean += kLeanJitter * normal(rng);
    p.body_scale = body(rng);
    p.seed = rng();

    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "_%04d", i);
    out.push_back(synth_gait(p, std::string(emotion_name(e)) + "_s" + std::to_string(seed) + suffix));
  }
  return out;
}

GaitBank load_gait_bank(const std::filesystem::path& dir) { return load_gait_bank(dir, dir / "labels.csv"); }

GaitBank load_gait_bank(const std::filesystem::path& dir, const std::filesystem::path& labels) {
  if (!std::filesystem::is_directory(dir)) throw DataError(dir.string() + ": not a directory");
  std::vector<LabelRow> rows;
  try {
    rows = parse_labels_csv(read_text_file(labels));
  } catch (const ParseError& e) {
    throw ParseError(e, labels.string() + ": ");
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  GaitBank bank;
  for (const auto& [id, label] : rows) {
    if (!label) continue;
    std::filesystem::path path;
    for (const char* ext : {".csv", ".json"}) {
      if (std::filesystem::exists(dir / (id + ext))) {
        path = dir / (id + ext);
        break;
      }
    }
    if (path.empty()) throw DataError((dir / id).string() + ": gait file listed in labels.csv not found");
    bank.push_back({read_gait_file(path), *label, path});
  }
  return bank;
}

const BankEntry& gait_bank_select(const GaitBank& bank, Emotion e, const SelectCriterion& criterion) {
  std::vector<const BankEntry*> matches;
  for (const auto& entry : bank)
    if (entry.label == e) matches.push_back(&entry);
  if (matches.empty())
    throw NoGaitForEmotion("no gait labelled " + std::string(emotion_name(e)) + " in the bank");

  if (std::holds_alternative<SelectRandom>(criterion)) {
    std::mt19937_64 rng(std::get<SelectRandom>(criterion).seed);
    return *matches[std::uniform_int_distribution<std::size_t>(0, matches.size() - 1)(rng)];
  }
  if (const auto* closest = std::get_if<SelectClosestSpeed>(&criterion)) {
    const BankEntry* best = matches.front();
    double best_gap = std::abs(mean_foot_speed(best->gait) - closest->speed);
    for (const BankEntry* m : matches) {
      const double gap = std::abs(mean_foot_speed(m->gait) - closest->speed);
      if (gap < best_gap) {
        best = m;
        best_gap = gap;
      }
    }
    return *best;
  }
  return *matches.front();
}

}  // namespace gaitemo
