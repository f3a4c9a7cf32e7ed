#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gaitemo/emotion.hpp"
#include "gaitemo/features.hpp"
#include "gaitemo/forest.hpp"
#include "gaitemo/lstm.hpp"

namespace gaitemo {

inline constexpr std::size_t kDeepDim = 32;
inline constexpr std::size_t kFusedDim = kDeepDim + kAffectiveDim;

/// Probabilities indexed by Emotion (happy, angry, sad, neutral).
struct ClassProbabilities {
  std::array<double, kNumEmotions> p{};

  double operator[](Emotion e) const noexcept { return p[index_of(e)]; }
  static ClassProbabilities from(std::span<const double> v);
};

struct Affect {
  double valence = 0.0;
  double arousal = 0.0;
};

/// Valence/arousal from the happy/angry/sad probabilities; neutral maps to
/// the origin of the affect plane.
Affect valence_arousal(const ClassProbabilities& p) noexcept;

/// Argmax with ties resolved in class order happy, angry, sad, neutral.
Emotion most_likely(const ClassProbabilities& p) noexcept;

struct Prediction {
  Emotion label;
  ClassProbabilities probabilities;
  Affect affect;
};

/// LSTM deep features ++ affective features, classified by a forest.
class Pipeline {
 public:
  Pipeline(LstmModel lstm, RandomForest forest);

  /// deep(32) ++ affective(29).
  std::vector<double> fused_features(const Gait& g) const;

  Prediction classify(const Gait& g) const;

  const LstmModel& lstm() const noexcept { return lstm_; }
  const RandomForest& forest() const noexcept { return forest_; }

  /// Writes lstm.json and forest.json into `dir`.
  void save(const std::filesystem::path& dir) const;
  static Pipeline load(const std::filesystem::path& dir);

 private:
  LstmModel lstm_;
  RandomForest forest_;
};

struct PipelineTraining {
  Pipeline pipeline;
  std::vector<double> loss_curve;
};

/// Train the LSTM, then fit the forest (seed cfg.rng_seed + 1) on the fused
/// features of the same gaits.
PipelineTraining train_pipeline(std::span<const Gait> gaits, std::span<const Emotion> labels,
                                const TrainConfig& cfg);

}  // namespace gaitemo
