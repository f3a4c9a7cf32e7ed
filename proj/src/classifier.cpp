#include "gaitemo/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "gaitemo/error.hpp"
#include "gaitemo/text.hpp"

namespace gaitemo {

namespace {

// Principal axes of the happy/angry/sad rating space.
constexpr std::array<double, 3> kValence = {0.67, -0.04, -0.74};
constexpr std::array<double, 3> kArousal = {-0.35, 0.86, -0.37};

}  // namespace

ClassProbabilities ClassProbabilities::from(std::span<const double> v) {
  if (v.size() != kNumEmotions)
    throw DataError("expected 4 class probabilities, got " + std::to_string(v.size()));
  ClassProbabilities out;
  std::copy(v.begin(), v.end(), out.p.begin());
  return out;
}

Affect valence_arousal(const ClassProbabilities& p) noexcept {
  Affect a;
  for (std::size_t k = 0; k < 3; ++k) {
    a.valence += kValence[k] * p.p[k];
    a.arousal += kArousal[k] * p.p[k];
  }
  return a;
}

Emotion most_likely(const ClassProbabilities& p) noexcept {
  return static_cast<Emotion>(std::max_element(p.p.begin(), p.p.end()) - p.p.begin());
}

Pipeline::Pipeline(LstmModel lstm, RandomForest forest)
    : lstm_(std::move(lstm)), forest_(std::move(forest)) {
  if (forest_.stats().dims() != static_cast<std::size_t>(lstm_.params.shape().hidden) + kAffectiveDim)
    throw DataError("forest dimension does not match deep + affective features");
  if (forest_.n_classes() != kNumEmotions) throw DataError("forest must have 4 classes");
}

std::vector<double> Pipeline::fused_features(const Gait& g) const {
  const VectorXd deep = deep_features(lstm_, g);
  const AffectiveFeatures affective = affective_features(g);
  std::vector<double> out(deep.data(), deep.data() + deep.size());
  out.insert(out.end(), affective.values.begin(), affective.values.end());
  return out;
}

Prediction Pipeline::classify(const Gait& g) const {
  const auto probs = ClassProbabilities::from(forest_.predict_proba(fused_features(g)));
  return {most_likely(probs), probs, valence_arousal(probs)};
}

void Pipeline::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "lstm.json", lstm_to_json(lstm_).dump() + "\n");
  write_text_file(dir / "forest.json", forest_.to_json().dump() + "\n");
}

Pipeline Pipeline::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError(dir.string() + ": model directory not found");
  auto parse = [](const std::filesystem::path& path) {
    try {
      return nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  };
  try {
    return Pipeline(lstm_from_json(parse(dir / "lstm.json")),
                    RandomForest::from_json(parse(dir / "forest.json")));
  } catch (const DataError& e) {
    throw DataError(dir.string() + ": " + e.what());
  }
}

PipelineTraining train_pipeline(std::span<const Gait> gaits, std::span<const Emotion> labels,
                                const TrainConfig& cfg) {
  if (gaits.empty()) throw DataError("empty training set");
  if (gaits.size() != labels.size()) throw DataError("gait/label count mismatch");
  std::vector<int> y(labels.size());
  std::transform(labels.begin(), labels.end(), y.begin(), [](Emotion e) { return index_of(e); });

  TrainResult lstm = train_lstm(gaits, y, cfg);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(gaits.size()),
                    static_cast<Eigen::Index>(cfg.hidden) + static_cast<Eigen::Index>(kAffectiveDim));
  for (std::size_t i = 0; i < gaits.size(); ++i) {
    const VectorXd deep = deep_features(lstm.model, gaits[i]);
    const AffectiveFeatures affective = affective_features(gaits[i]);
    const auto r = static_cast<Eigen::Index>(i);
    x.row(r).head(deep.size()) = deep.transpose();
    for (std::size_t k = 0; k < kAffectiveDim; ++k)
      x(r, deep.size() + static_cast<Eigen::Index>(k)) = affective.values[k];
  }
  RandomForest forest = RandomForest::fit(x, y, kNumEmotions, cfg.rng_seed + 1);
  return {Pipeline(std::move(lstm.model), std::move(forest)), std::move(lstm.loss_curve)};
}

}  // namespace gaitemo
