#include "gaitemo/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "gaitemo/error.hpp"

namespace gaitemo {

// ---------------------------------------------------------------------------
// Normalization

NormalizationStats fit_normalizer(const Eigen::MatrixXd& features) {
  if (features.rows() == 0 || features.cols() == 0)
    throw DataError("cannot fit a normalizer on an empty matrix");
  NormalizationStats s;
  s.min.resize(static_cast<std::size_t>(features.cols()));
  s.max.resize(s.min.size());
  for (Eigen::Index d = 0; d < features.cols(); ++d) {
    s.min[static_cast<std::size_t>(d)] = features.col(d).minCoeff();
    s.max[static_cast<std::size_t>(d)] = features.col(d).maxCoeff();
  }
  return s;
}

std::vector<double> NormalizationStats::apply(std::span<const double> v) const {
  if (v.size() != min.size())
    throw DataError("feature vector has " + std::to_string(v.size()) + " dims, expected " +
                    std::to_string(min.size()));
  std::vector<double> out(v.size());
  for (std::size_t d = 0; d < v.size(); ++d) {
    const double range = max[d] - min[d];
    out[d] = range > 0.0 ? std::clamp(2.0 * (v[d] - min[d]) / range - 1.0, -1.0, 1.0) : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trees

DecisionTree::DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw DataError("a tree needs at least one node");
}

std::vector<double> DecisionTree::predict_proba(std::span<const double> v) const {
  std::size_t k = 0;
  while (!nodes_[k].is_leaf()) {
    const Node& n = nodes_[k];
    if (static_cast<std::size_t>(n.feature) >= v.size()) throw DataError("feature index out of range");
    k = static_cast<std::size_t>(v[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  std::vector<double> p = nodes_[k].counts;
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  return p;
}

int DecisionTree::depth() const {
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int deepest = 0;
  while (!stack.empty()) {
    const auto [k, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const Node& n = nodes_[static_cast<std::size_t>(k)];
    if (!n.is_leaf()) {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return deepest;
}

namespace {

nlohmann::json node_json(const std::vector<DecisionTree::Node>& nodes, int k) {
  const auto& n = nodes[static_cast<std::size_t>(k)];
  if (n.is_leaf()) return {{"counts", n.counts}};
  return {{"feature", n.feature},
          {"threshold", n.threshold},
          {"left", node_json(nodes, n.left)},
          {"right", node_json(nodes, n.right)}};
}

int read_node(const nlohmann::json& j, std::size_t n_classes, std::vector<DecisionTree::Node>& out) {
  const int k = static_cast<int>(out.size());
  out.emplace_back();
  if (j.contains("counts")) {
    auto counts = j.at("counts").get<std::vector<double>>();
    if (counts.size() != n_classes) throw DataError("forest: leaf has wrong class count");
    if (std::accumulate(counts.begin(), counts.end(), 0.0) <= 0.0)
      throw DataError("forest: empty leaf");
    out[static_cast<std::size_t>(k)].counts = std::move(counts);
    return k;
  }
  DecisionTree::Node n;
  n.feature = j.at("feature").get<int>();
  n.threshold = j.at("threshold").get<double>();
  if (n.feature < 0) throw DataError("forest: negative feature index");
  n.left = read_node(j.at("left"), n_classes, out);
  n.right = read_node(j.at("right"), n_classes, out);
  out[static_cast<std::size_t>(k)] = std::move(n);
  return k;
}

double gini(const std::vector<double>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

class TreeGrower {
 public:
  TreeGrower(const Eigen::MatrixXd& x, std::span<const int> y, std::size_t n_classes,
             const TreeOptions& opts, std::mt19937_64& rng)
      : x_(x), y_(y), n_classes_(n_classes), opts_(opts), rng_(rng) {
    const auto d = static_cast<int>(x.cols());
    mtry_ = opts.max_features ? std::clamp(*opts.max_features, 1, d)
                              : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
    features_.resize(static_cast<std::size_t>(d));
    std::iota(features_.begin(), features_.end(), 0);
  }

  int grow(const std::vector<std::size_t>& rows, int depth) {
    std::vector<double> counts(n_classes_, 0.0);
    for (std::size_t r : rows) counts[static_cast<std::size_t>(y_[r])] += 1.0;
    const auto total = static_cast<double>(rows.size());
    const double parent = gini(counts, total);

    const int k = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const bool can_split = depth < opts_.max_depth &&
                           static_cast<int>(rows.size()) >= opts_.min_samples_split && parent > 0.0;
    std::optional<Split> best;
    if (can_split) best = best_split(rows);
    if (!best || best->impurity >= parent - 1e-12) {
      nodes_[static_cast<std::size_t>(k)].counts = std::move(counts);
      return k;
    }

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows)
      (x_(static_cast<Eigen::Index>(r), best->feature) <= best->threshold ? left : right).push_back(r);
    const int l = grow(left, depth + 1);
    const int rr = grow(right, depth + 1);
    auto& n = nodes_[static_cast<std::size_t>(k)];
    n.feature = best->feature;
    n.threshold = best->threshold;
    n.left = l;
    n.right = rr;
    return k;
  }

  std::vector<DecisionTree::Node> take() { return std::move(nodes_); }

 private:
  std::vector<int> draw_candidates() {
    // Partial Fisher-Yates over the persistent feature list.
    for (int k = 0; k < mtry_; ++k) {
      std::uniform_int_distribution<int> pick(k, static_cast<int>(features_.size()) - 1);
      std::swap(features_[static_cast<std::size_t>(k)], features_[static_cast<std::size_t>(pick(rng_))]);
    }
    std::vector<int> out(features_.begin(), features_.begin() + mtry_);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::optional<Split> best_split(const std::vector<std::size_t>& rows) {
    std::optional<Split> best;
    const auto total = static_cast<double>(rows.size());
    std::vector<std::pair<double, int>> column(rows.size());
    for (int f : draw_candidates()) {
      for (std::size_t i = 0; i < rows.size(); ++i)
        column[i] = {x_(static_cast<Eigen::Index>(rows[i]), f), y_[rows[i]]};
      std::sort(column.begin(), column.end());
      std::vector<double> left(n_classes_, 0.0), right(n_classes_, 0.0);
      for (const auto& [v, label] : column) right[static_cast<std::size_t>(label)] += 1.0;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        const auto label = static_cast<std::size_t>(column[i].second);
        left[label] += 1.0;
        right[label] -= 1.0;
        const double a = column[i].first;
        const double b = column[i + 1].first;
        if (!(a < b)) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = total - nl;
        const double impurity = (nl * gini(left, nl) + nr * gini(right, nr)) / total;
        if (!best || impurity < best->impurity - 1e-12) {
          double threshold = a + (b - a) / 2.0;
          if (!(threshold < b)) threshold = a;
          best = Split{f, threshold, impurity};
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  std::span<const int> y_;
  std::size_t n_classes_;
  const TreeOptions& opts_;
  std::mt19937_64& rng_;
  int mtry_ = 1;
  std::vector<int> features_;
  std::vector<DecisionTree::Node> nodes_;
};

}  // namespace

nlohmann::json DecisionTree::to_json() const { return node_json(nodes_, 0); }

DecisionTree DecisionTree::from_json(const nlohmann::json& j, std::size_t n_classes) {
  std::vector<Node> nodes;
  read_node(j, n_classes, nodes);
  return DecisionTree(std::move(nodes));
}

DecisionTree grow_tree(const Eigen::MatrixXd& x, std::span<const int> y, std::size_t n_classes,
                       std::span<const std::size_t> sample, const TreeOptions& opts,
                       std::mt19937_64& rng) {
  if (sample.empty()) throw DataError("cannot grow a tree on an empty sample");
  if (x.cols() == 0) throw DataError("cannot grow a tree without features");
  for (std::size_t r : sample) {
    if (r >= static_cast<std::size_t>(x.rows())) throw DataError("sample row out of range");
    if (y[r] < 0 || static_cast<std::size_t>(y[r]) >= n_classes) throw DataError("label out of range");
  }
  TreeGrower grower(x, y, n_classes, opts, rng);
  grower.grow(std::vector<std::size_t>(sample.begin(), sample.end()), 0);
  return DecisionTree(grower.take());
}

// ---------------------------------------------------------------------------
// Forest

RandomForest::RandomForest(std::vector<DecisionTree> trees, NormalizationStats stats,
                           std::size_t n_classes, std::uint64_t seed)
    : trees_(std::move(trees)), stats_(std::move(stats)), n_classes_(n_classes), seed_(seed) {
  if (trees_.empty()) throw DataError("a forest needs at least one tree");
}

RandomForest RandomForest::fit(const Eigen::MatrixXd& x, std::span<const int> y, std::size_t n_classes,
                               std::uint64_t seed, const ForestOptions& opts) {
  if (x.rows() == 0) throw DataError("empty dataset");
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw DataError("feature/label count mismatch");
  if (opts.n_trees < 1) throw DataError("a forest needs at least one tree");

  NormalizationStats stats = fit_normalizer(x);
  Eigen::MatrixXd xn(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Eigen::VectorXd row = x.row(r).transpose();
    const auto v = stats.apply(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
    for (Eigen::Index c = 0; c < x.cols(); ++c) xn(r, c) = v[static_cast<std::size_t>(c)];
  }

  std::mt19937_64 rng(seed);
  const auto n = static_cast<std::size_t>(x.rows());
  std::uniform_int_distribution<std::size_t> draw(0, n - 1);
  std::vector<DecisionTree> trees;
  trees.reserve(static_cast<std::size_t>(opts.n_trees));
  std::vector<std::size_t> sample(n);
  for (int t = 0; t < opts.n_trees; ++t) {
    for (auto& s : sample) s = draw(rng);
    trees.push_back(grow_tree(xn, y, n_classes, sample, opts.tree, rng));
  }
  return RandomForest(std::move(trees), std::move(stats), n_classes, seed);
}

std::vector<double> RandomForest::predict_proba_normalized(std::span<const double> v) const {
  std::vector<double> p(n_classes_, 0.0);
  for (const DecisionTree& tree : trees_) {
    const auto q = tree.predict_proba(v);
    for (std::size_t c = 0; c < n_classes_; ++c) p[c] += q[c];
  }
  for (double& x : p) x /= static_cast<double>(trees_.size());
  return p;
}

std::vector<double> RandomForest::predict_proba(std::span<const double> v) const {
  const auto normalized = stats_.apply(v);
  return predict_proba_normalized(normalized);
}

int RandomForest::predict(std::span<const double> v) const { return argmax(predict_proba(v)); }

nlohmann::json RandomForest::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"seed", seed_},
          {"n_classes", n_classes_},
          {"stats", {{"min", stats_.min}, {"max", stats_.max}}},
          {"trees", std::move(trees)}};
}

RandomForest RandomForest::from_json(const nlohmann::json& j) {
  try {
    const auto n_classes = j.value("n_classes", std::size_t{4});
    NormalizationStats stats;
    stats.min = j.at("stats").at("min").get<std::vector<double>>();
    stats.max = j.at("stats").at("max").get<std::vector<double>>();
    if (stats.min.size() != stats.max.size()) throw DataError("forest: stats length mismatch");
    std::vector<DecisionTree> trees;
    for (const auto& jt : j.at("trees")) trees.push_back(DecisionTree::from_json(jt, n_classes));
    return RandomForest(std::move(trees), std::move(stats), n_classes, j.at("seed").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("forest: ") + e.what());
  }
}

int argmax(std::span<const double> p) {
  if (p.empty()) throw DataError("argmax of an empty vector");
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace gaitemo
