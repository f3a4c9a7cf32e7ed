#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gaitemo/classifier.hpp"
#include "gaitemo/error.hpp"
#include "gaitemo/features.hpp"
#include "gaitemo/gait_io.hpp"
#include "gaitemo/perception.hpp"
#include "gaitemo/synth.hpp"

namespace py = pybind11;
using namespace gaitemo;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Emotion to_emotion(const std::string& name) {
  if (auto e = parse_emotion(name)) return *e;
  throw py::value_error("unknown emotion: " + name);
}

JointId to_joint(const std::string& name) {
  if (auto j = parse_joint(name)) return *j;
  throw py::value_error("unknown joint: " + name);
}

Gait make_gait(std::string id, double fps, const RowMatrix& frames) {
  if (frames.cols() != static_cast<Eigen::Index>(kPoseDim))
    throw py::value_error("frames must have 48 columns, got " + std::to_string(frames.cols()));
  std::vector<Pose> poses;
  poses.reserve(static_cast<std::size_t>(frames.rows()));
  for (Eigen::Index t = 0; t < frames.rows(); ++t)
    poses.emplace_back(std::span<const double>(frames.row(t).data(), kPoseDim));
  return Gait(std::move(id), fps, std::move(poses));
}

RowMatrix gait_frames(const Gait& g) {
  RowMatrix out(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(kPoseDim));
  for (std::size_t t = 0; t < g.size(); ++t) {
    const auto c = g[t].coords();
    std::copy(c.begin(), c.end(), out.row(static_cast<Eigen::Index>(t)).data());
  }
  return out;
}

py::dict prediction_dict(const Prediction& p) {
  py::dict d;
  d["label"] = std::string(emotion_name(p.label));
  py::dict probs;
  for (Emotion e : kAllEmotions) probs[py::str(std::string(emotion_name(e)))] = p.probabilities[e];
  d["probabilities"] = probs;
  d["valence"] = p.affect.valence;
  d["arousal"] = p.affect.arousal;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gait-based perceived emotion recognition";

  auto base = py::register_exception<Error>(m, "GaitemoError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());

  m.attr("JOINTS") = [] {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < kNumJoints; ++j) names.emplace_back(joint_name(static_cast<JointId>(j)));
    return names;
  }();
  m.attr("EMOTIONS") = std::vector<std::string>{"happy", "angry", "sad", "neutral"};

  py::class_<Gait>(m, "Gait")
      .def(py::init(&make_gait), py::arg("id"), py::arg("fps"), py::arg("frames"))
      .def_property_readonly("id", &Gait::id)
      .def_property_readonly("fps", &Gait::fps)
      .def_property_readonly("frames", &gait_frames, "(frames, 48) array of joint coordinates")
      .def("joint", [](const Gait& g, std::size_t t, const std::string& j) -> Vec3 {
        if (t >= g.size()) throw py::index_error("frame out of range");
        return g.joint(t, to_joint(j));
      })
      .def("__len__", &Gait::size)
      .def("__eq__", [](const Gait& a, const Gait& b) { return a == b; })
      .def("__repr__", [](const Gait& g) {
        return "<Gait " + g.id() + ": " + std::to_string(g.size()) + " frames @ " + std::to_string(g.fps()) +
               " fps>";
      });

  py::class_<WalkCycle>(m, "WalkCycle")
      .def_readonly("start_frame", &WalkCycle::start_frame)
      .def_readonly("end_frame", &WalkCycle::end_frame)
      .def_readonly("duration_s", &WalkCycle::duration_s)
      .def_readonly("whole_gait", &WalkCycle::whole_gait);

  m.def("read_gait", &read_gait_file, py::arg("path"));
  m.def("write_gait", &write_gait_file, py::arg("path"), py::arg("gait"));
  m.def(
      "parse_gait",
      [](const std::string& text, const std::string& format, const std::string& id) {
        return parse_gait(text, format == "json" ? GaitFormat::Json : GaitFormat::Csv, id);
      },
      py::arg("text"), py::arg("format") = "csv", py::arg("id") = "");
  m.def(
      "serialize_gait",
      [](const Gait& g, const std::string& format) {
        return serialize_gait(g, format == "json" ? GaitFormat::Json : GaitFormat::Csv);
      },
      py::arg("gait"), py::arg("format") = "csv");

  m.def("normalize_root", &normalize_root);
  m.def(
      "detect_foot_strikes", [](const Gait& g, const std::string& foot) { return detect_foot_strikes(g, to_joint(foot)); },
      py::arg("gait"), py::arg("foot"));
  m.def("extract_walk_cycle", &extract_walk_cycle);
  m.def("feature_window", &feature_window);
  m.def("mean_foot_speed", &mean_foot_speed);

  m.def("affective_features", [](const Gait& g) {
    const auto f = affective_features(g);
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(f.values.data(), kAffectiveDim));
  });
  m.def("affective_feature_names", [] {
    const auto& names = affective_feature_names();
    return std::vector<std::string>(names.begin(), names.end());
  });

  m.def(
      "synth_gait",
      [](const std::string& emotion, std::uint64_t seed, double noise_sigma, const std::string& id) {
        SynthParams p = emotion_preset(to_emotion(emotion));
        p.seed = seed;
        p.noise_sigma = noise_sigma;
        return synth_gait(p, id);
      },
      py::arg("emotion"), py::arg("seed") = 0, py::arg("noise_sigma") = SynthParams{}.noise_sigma,
      py::arg("id") = "");
  m.def(
      "synth_corpus",
      [](const std::string& emotion, int n, std::uint64_t seed) { return synth_corpus(to_emotion(emotion), n, seed); },
      py::arg("emotion"), py::arg("n"), py::arg("seed") = 0);

  m.def(
      "valence_arousal",
      [](const std::vector<double>& probs) {
        const Affect a = valence_arousal(ClassProbabilities::from(probs));
        return std::make_pair(a.valence, a.arousal);
      },
      py::arg("probabilities"));

  py::class_<Pipeline>(m, "Pipeline")
      .def_static("load", &Pipeline::load, py::arg("path"))
      .def("save", &Pipeline::save, py::arg("path"))
      .def("classify", [](const Pipeline& p, const Gait& g) { return prediction_dict(p.classify(g)); })
      .def("fused_features", &Pipeline::fused_features)
      .def("deep_features", [](const Pipeline& p, const Gait& g) { return deep_features(p.lstm(), g); })
      .def("saliency", [](const Pipeline& p, const Gait& g) { return saliency(p.lstm(), g); });

  m.def(
      "train",
      [](const std::vector<Gait>& gaits, const std::vector<std::string>& labels, const py::dict& config) {
        std::vector<Emotion> y;
        for (const auto& l : labels) y.push_back(to_emotion(l));
        TrainConfig cfg;
        if (!config.empty()) {
          const auto json_mod = py::module_::import("json");
          cfg = nlohmann::json::parse(json_mod.attr("dumps")(config).cast<std::string>()).get<TrainConfig>();
        }
        cfg.validate();
        PipelineTraining result = [&] {
          py::gil_scoped_release release;
          return train_pipeline(gaits, y, cfg);
        }();
        return py::make_tuple(std::move(result.pipeline), result.loss_curve);
      },
      py::arg("gaits"), py::arg("labels"), py::arg("config") = py::dict(),
      "Train the LSTM and forest. Returns (pipeline, loss_curve).");

  m.def(
      "assign_label",
      [](const std::array<double, kNumEmotions>& mean, double theta) -> std::optional<std::string> {
        if (auto e = assign_label(mean, theta)) return std::string(emotion_name(*e));
        return std::nullopt;
      },
      py::arg("mean_ratings"), py::arg("theta") = 3.5);
  m.def(
      "aggregate",
      [](const std::string& ratings_csv, double theta, bool drop_constant) {
        ResponseMatrix r = parse_ratings_csv(ratings_csv);
        if (drop_constant) r = drop_constant_raters(r);
        const AggregateReport report = aggregate(r, theta);
        py::dict out;
        py::dict labels;
        for (std::size_t i = 0; i < report.ratings.size(); ++i) {
          const auto& l = report.labels[i];
          labels[py::str(report.ratings[i].gait_id)] =
              l ? py::object(py::str(std::string(emotion_name(*l)))) : py::object(py::none());
        }
        out["labels"] = labels;
        out["correlation"] = Eigen::MatrixXd(report.correlation.r);
        out["pca"] = py::module_::import("json").attr("loads")(pca_report_json(report).dump());
        return out;
      },
      py::arg("ratings_csv"), py::arg("theta") = 3.5, py::arg("drop_constant_raters") = false);
  m.def(
      "pca",
      [](const Eigen::MatrixXd& x) {
        const PcaResult r = pca(x);
        return py::make_tuple(r.components, r.explained_ratio, r.mean);
      },
      py::arg("x"), "Returns (components as rows, explained variance ratio, mean).");
  m.def(
      "welch_ttest",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const TTestResult r = welch_ttest(a, b);
        return py::make_tuple(r.t, r.df, r.p);
      },
      py::arg("a"), py::arg("b"));
}
