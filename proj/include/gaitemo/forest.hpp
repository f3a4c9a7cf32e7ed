#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace gaitemo {

/// Per-dimension training min/max; maps values onto [-1, 1].
struct NormalizationStats {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t dims() const noexcept { return min.size(); }

  /// 2 (v - min) / (max - min) - 1, clamped to [-1, 1]; constant dims map to 0.
  std::vector<double> apply(std::span<const double> v) const;

  bool operator==(const NormalizationStats&) const = default;
};

/// Rows of `features` are samples.
NormalizationStats fit_normalizer(const Eigen::MatrixXd& features);

/// Binary decision tree. Internal nodes send `v[feature] <= threshold` left.
/// Leaves keep per-class training counts.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> counts;  // leaves only

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const Node&) const = default;
  };

  DecisionTree() = default;
  explicit DecisionTree(std::vector<Node> nodes);

  /// Leaf class-frequency distribution for `v`.
  std::vector<double> predict_proba(std::span<const double> v) const;

  int depth() const;
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j, std::size_t n_classes);

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<Node> nodes_;
};

struct TreeOptions {
  int max_depth = 5;
  int min_samples_split = 2;
  /// Candidate features per node; nullopt means ceil(sqrt(d)).
  std::optional<int> max_features;
};

/// Greedy Gini tree on the rows listed in `sample` (duplicates allowed).
/// Ties between equally good splits go to the lowest feature index, then
/// the lowest threshold.
DecisionTree grow_tree(const Eigen::MatrixXd& x, std::span<const int> y, std::size_t n_classes,
                       std::span<const std::size_t> sample, const TreeOptions& opts, std::mt19937_64& rng);

struct ForestOptions {
  int n_trees = 10;
  TreeOptions tree;
};

/// Bootstrap forest over [-1, 1]-normalized features. Predictions average
/// the trees' leaf distributions.
class RandomForest {
 public:
  RandomForest() = default;

  /// Fits the normalizer on `x` (raw features, rows are samples), then the
  /// trees on the normalized rows. Deterministic given `seed`.
  static RandomForest fit(const Eigen::MatrixXd& x, std::span<const int> y, std::size_t n_classes,
                          std::uint64_t seed, const ForestOptions& opts = {});

  /// `v` is a raw (un-normalized) feature vector.
  std::vector<double> predict_proba(std::span<const double> v) const;
  /// `v` is already normalized.
  std::vector<double> predict_proba_normalized(std::span<const double> v) const;

  int predict(std::span<const double> v) const;

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  const NormalizationStats& stats() const noexcept { return stats_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t n_classes() const noexcept { return n_classes_; }

  nlohmann::json to_json() const;
  static RandomForest from_json(const nlohmann::json& j);

  /// Assemble a forest from parts (used by tests and deserialization).
  RandomForest(std::vector<DecisionTree> trees, NormalizationStats stats, std::size_t n_classes,
               std::uint64_t seed);

 private:
  std::vector<DecisionTree> trees_;
  NormalizationStats stats_;
  std::size_t n_classes_ = 0;
  std::uint64_t seed_ = 0;
};

/// Index of the largest probability; ties go to the lowest index.
int argmax(std::span<const double> p);

}  // namespace gaitemo
