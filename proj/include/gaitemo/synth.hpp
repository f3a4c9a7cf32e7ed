#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaitemo/emotion.hpp"
#include "gaitemo/gait.hpp"

namespace gaitemo {

/// Procedural walker parameters. Scales are relative to the neutral walker;
/// angles are radians (head_tilt and trunk_lean positive = forward).
struct SynthParams {
  Emotion emotion = Emotion::Neutral;
  double stride_scale = 1.0;
  double speed_scale = 1.0;
  double arm_swing_amp = 0.35;
  double head_tilt = 0.0;
  double trunk_lean = 0.0;
  double arm_abduction = 0.05;
  double body_scale = 1.0;
  double noise_sigma = 0.0005;
  std::uint64_t seed = 0;
  int frames = 90;
  double fps = 30.0;

  void validate() const;
};

inline constexpr double kBasePeriodSeconds = 1.2;

/// Preset for one emotion; values live in `presets` when given, otherwise
/// the built-in table.
SynthParams emotion_preset(Emotion e, const nlohmann::json* presets = nullptr);

/// Gait period in seconds for the given parameters.
double synth_period(const SynthParams& p) noexcept;

/// 90-frame, 30 fps walker along +Z. Deterministic given p.seed.
Gait synth_gait(const SynthParams& p, std::string id = {});

/// `n` gaits of one emotion. Each gait draws its own phase and jitters the
/// preset scales by a few percent.
std::vector<Gait> synth_corpus(Emotion e, int n, std::uint64_t seed,
                               const nlohmann::json* presets = nullptr);

struct BankEntry {
  Gait gait;
  Emotion label;
  std::filesystem::path path;  // empty for in-memory banks
};

using GaitBank = std::vector<BankEntry>;

/// Load every labelled gait listed in `labels` (default `dir/labels.csv`)
/// from `dir/<id>.csv` or `dir/<id>.json`, sorted by gait id. Unlabeled rows
/// are skipped.
GaitBank load_gait_bank(const std::filesystem::path& dir);
GaitBank load_gait_bank(const std::filesystem::path& dir, const std::filesystem::path& labels);

struct SelectFirst {};
struct SelectRandom {
  std::uint64_t seed = 0;
};
struct SelectClosestSpeed {
  double speed = 0.0;
};

using SelectCriterion = std::variant<SelectFirst, SelectRandom, SelectClosestSpeed>;

/// A bank entry labelled `e`, chosen by `criterion`. Throws NoGaitForEmotion.
const BankEntry& gait_bank_select(const GaitBank& bank, Emotion e, const SelectCriterion& criterion);

}  // namespace gaitemo
