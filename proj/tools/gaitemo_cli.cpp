// gaitemo: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaitemo/classifier.hpp"
#include "gaitemo/error.hpp"
#include "gaitemo/features.hpp"
#include "gaitemo/gait_io.hpp"
#include "gaitemo/perception.hpp"
#include "gaitemo/synth.hpp"
#include "gaitemo/text.hpp"

namespace fs = std::filesystem;
using namespace gaitemo;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

const std::vector<std::string> kEmotionNames = {"happy", "angry", "sad", "neutral"};

Emotion emotion_arg(const std::string& name) {
  if (auto e = parse_emotion(name)) return *e;
  throw CLI::ValidationError("--emotion", "unknown emotion: " + name);
}

nlohmann::json read_json_file(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<Gait> read_gaits(std::vector<std::string> paths) {
  std::sort(paths.begin(), paths.end());
  std::vector<Gait> gaits;
  gaits.reserve(paths.size());
  for (const auto& p : paths) gaits.push_back(read_gait_file(p));
  return gaits;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text_file(out, text);
}

// ---- extract ----------------------------------------------------------------

struct ExtractArgs {
  std::vector<std::string> inputs;
  std::string out;
};

void run_extract(const ExtractArgs& a) {
  std::vector<std::string> ids;
  std::vector<AffectiveFeatures> rows;
  for (const Gait& g : read_gaits(a.inputs)) {
    ids.push_back(g.id());
    rows.push_back(affective_features(g));
  }
  emit(affective_features_csv(ids, rows), a.out);
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  std::string gait_dir;
  std::string labels;
  std::string config;
  std::string out;
};

void run_train(const TrainArgs& a) {
  TrainConfig cfg;
  if (!a.config.empty()) {
    try {
      cfg = read_json_file(a.config).get<TrainConfig>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(a.config + ": " + e.what());
    }
  }
  cfg.validate();

  const GaitBank bank = load_gait_bank(a.gait_dir, a.labels);
  if (bank.empty()) throw DataError(a.labels + ": no labelled gaits");
  std::vector<Gait> gaits;
  std::vector<Emotion> labels;
  for (const auto& entry : bank) {
    gaits.push_back(entry.gait);
    labels.push_back(entry.label);
  }

  const PipelineTraining result = train_pipeline(gaits, labels, cfg);
  result.pipeline.save(a.out);
  std::string curve = "epoch,loss\n";
  for (std::size_t i = 0; i < result.loss_curve.size(); ++i)
    curve += std::to_string(i) + "," + format_double(result.loss_curve[i]) + "\n";
  write_text_file(fs::path(a.out) / "loss_curve.csv", curve);

  std::cerr << "trained on " << gaits.size() << " gaits";
  if (!result.loss_curve.empty()) std::cerr << ", final loss " << result.loss_curve.back();
  std::cerr << "\n";
}

// ---- classify ---------------------------------------------------------------

struct ClassifyArgs {
  std::vector<std::string> inputs;
  std::string model;
  std::string labels;
  std::string out;
};

void run_classify(const ClassifyArgs& a) {
  const Pipeline pipeline = Pipeline::load(a.model);
  std::map<std::string, Emotion> truth;
  if (!a.labels.empty()) {
    for (const auto& [id, label] : parse_labels_csv(read_text_file(a.labels)))
      if (label) truth[id] = *label;
  }

  std::string csv = "gait_id,label,p_happy,p_angry,p_sad,p_neutral,valence,arousal\n";
  std::size_t scored = 0, correct = 0;
  for (const Gait& g : read_gaits(a.inputs)) {
    const Prediction pred = pipeline.classify(g);
    csv += g.id() + "," + std::string(emotion_name(pred.label));
    for (double p : pred.probabilities.p) csv += "," + format_double(p);
    csv += "," + format_double(pred.affect.valence) + "," + format_double(pred.affect.arousal) + "\n";
    if (auto it = truth.find(g.id()); it != truth.end()) {
      ++scored;
      correct += it->second == pred.label;
    }
  }
  emit(csv, a.out);
  if (!a.labels.empty()) {
    std::cerr << "accuracy " << correct << "/" << scored;
    if (scored > 0) std::cerr << " = " << static_cast<double>(correct) / static_cast<double>(scored);
    std::cerr << "\n";
  }
}

// ---- saliency ---------------------------------------------------------------

struct SaliencyArgs {
  std::string input;
  std::string model;
  std::string out;
};

void run_saliency(const SaliencyArgs& a) {
  const Pipeline pipeline = Pipeline::load(a.model);
  const Gait g = read_gait_file(a.input);
  const Eigen::MatrixXd map = saliency(pipeline.lstm(), g);

  std::string csv = "frame";
  for (std::size_t j = 0; j < kNumJoints; ++j) csv += "," + std::string(joint_name(static_cast<JointId>(j)));
  csv += "\n";
  for (Eigen::Index t = 0; t < map.rows(); ++t) {
    csv += std::to_string(t);
    for (Eigen::Index j = 0; j < map.cols(); ++j) csv += "," + format_double(map(t, j));
    csv += "\n";
  }
  emit(csv, a.out);
}

// ---- aggregate --------------------------------------------------------------

struct AggregateArgs {
  std::string ratings;
  double theta = 3.5;
  bool drop_constant = false;
  std::string out = ".";
};

void run_aggregate(const AggregateArgs& a) {
  ResponseMatrix m;
  try {
    m = parse_ratings_csv(read_text_file(a.ratings));
  } catch (const ParseError& e) {
    throw ParseError(e, a.ratings + ": ");
  }
  if (a.drop_constant) m = drop_constant_raters(m);
  const AggregateReport report = aggregate(m, a.theta);

  const fs::path out(a.out);
  fs::create_directories(out);
  write_text_file(out / "labels.csv", labels_csv(report));
  write_text_file(out / "correlation.csv", correlation_csv(report.correlation));
  write_text_file(out / "pca.json", pca_report_json(report).dump(2) + "\n");

  std::size_t labelled = 0;
  for (const auto& l : report.labels) labelled += l.has_value();
  std::cerr << report.ratings.size() << " gaits, " << labelled << " labelled\n";
}

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string emotion;
  int n = 50;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  std::string presets;
};

void run_synth(const SynthArgs& a) {
  std::optional<nlohmann::json> presets;
  if (!a.presets.empty()) presets = read_json_file(a.presets);
  const Emotion e = emotion_arg(a.emotion);
  const auto gaits = synth_corpus(e, a.n, a.seed, presets ? &*presets : nullptr);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  std::map<std::string, std::optional<Emotion>> labels;
  const fs::path labels_path = dir / "labels.csv";
  if (fs::exists(labels_path))
    for (auto& [id, label] : parse_labels_csv(read_text_file(labels_path))) labels[id] = label;

  const std::string ext = a.format == "json" ? ".json" : ".csv";
  for (const Gait& g : gaits) {
    write_gait_file(dir / (g.id() + ext), g);
    labels[g.id()] = e;
  }
  write_text_file(labels_path, labels_to_csv({labels.begin(), labels.end()}));
}

// ---- select -----------------------------------------------------------------

struct SelectArgs {
  std::string bank;
  std::string emotion;
  std::string criterion = "first";
  std::uint64_t seed = 0;
  double speed = 0.0;
};

void run_select(const SelectArgs& a) {
  const Emotion e = emotion_arg(a.emotion);
  SelectCriterion criterion = SelectFirst{};
  if (a.criterion == "random") criterion = SelectRandom{a.seed};
  if (a.criterion == "closest_speed") criterion = SelectClosestSpeed{a.speed};
  const GaitBank bank = load_gait_bank(a.bank);
  std::cout << gait_bank_select(bank, e, criterion).path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gait-based perceived emotion toolkit"};
  app.require_subcommand(1);

  ExtractArgs extract;
  auto* cmd = app.add_subcommand("extract", "Write the 29 affective features of each gait as CSV");
  cmd->add_option("gaits", extract.inputs, "Gait files (.csv or .json)")->required();
  cmd->add_option("--out", extract.out, "Output CSV (default stdout)");
  cmd->callback([&] { run_extract(extract); });

  TrainArgs train;
  cmd = app.add_subcommand("train", "Train the LSTM and the random forest");
  cmd->add_option("--features-dir", train.gait_dir, "Directory of gait files named <gait_id>.csv|.json")
      ->required();
  cmd->add_option("--labels", train.labels, "gait_id,label CSV")->required();
  cmd->add_option("--config", train.config, "Training config JSON");
  cmd->add_option("--out", train.out, "Model directory")->required();
  cmd->callback([&] { run_train(train); });

  ClassifyArgs classify;
  cmd = app.add_subcommand("classify", "Predict emotion, class probabilities and valence/arousal");
  cmd->add_option("gaits", classify.inputs, "Gait files")->required();
  cmd->add_option("--model", classify.model, "Model directory")->required();
  cmd->add_option("--labels", classify.labels, "Ground-truth labels; prints accuracy to stderr");
  cmd->add_option("--out", classify.out, "Output CSV (default stdout)");
  cmd->callback([&] { run_classify(classify); });

  SaliencyArgs sal;
  cmd = app.add_subcommand("saliency", "Per-frame, per-joint saliency map");
  cmd->add_option("gait", sal.input, "Gait file")->required();
  cmd->add_option("--model", sal.model, "Model directory")->required();
  cmd->add_option("--out", sal.out, "Output CSV (default stdout)");
  cmd->callback([&] { run_saliency(sal); });

  AggregateArgs agg;
  cmd = app.add_subcommand("aggregate", "Labels, correlations and PCA from perception ratings");
  cmd->add_option("ratings", agg.ratings, "Ratings CSV")->required();
  cmd->add_option("--theta", agg.theta, "Label threshold on the mean rating")->capture_default_str();
  cmd->add_flag("--drop-constant-raters", agg.drop_constant, "Ignore participants with constant ratings");
  cmd->add_option("--out", agg.out, "Output directory")->capture_default_str();
  cmd->callback([&] { run_aggregate(agg); });

  SynthArgs synth;
  cmd = app.add_subcommand("synth", "Generate a synthetic corpus for one emotion");
  cmd->add_option("--emotion", synth.emotion, "Emotion")
      ->required()
      ->check(CLI::IsMember(kEmotionNames, CLI::ignore_case));
  cmd->add_option("--n", synth.n, "Number of gaits")->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", synth.out, "Output directory")->required();
  cmd->add_option("--format", synth.format, "Gait file format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--presets", synth.presets, "JSON overriding the emotion presets");
  cmd->callback([&] { run_synth(synth); });

  SelectArgs select;
  cmd = app.add_subcommand("select", "Pick a gait of the given emotion from a gait bank");
  cmd->add_option("--bank", select.bank, "Bank directory with labels.csv")->required();
  cmd->add_option("--emotion", select.emotion, "Emotion")
      ->required()
      ->check(CLI::IsMember(kEmotionNames, CLI::ignore_case));
  cmd->add_option("--criterion", select.criterion, "Selection rule")
      ->capture_default_str()
      ->check(CLI::IsMember({"first", "random", "closest_speed"}));
  cmd->add_option("--seed", select.seed, "Seed for --criterion random")->capture_default_str();
  cmd->add_option("--speed", select.speed, "Target mean foot speed (m/s) for closest_speed");
  cmd->callback([&] { run_select(select); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
