#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "gaitemo/emotion.hpp"

namespace gaitemo {

/// One participant's 1..5 Likert ratings of one gait, indexed by Emotion.
struct Response {
  std::string gait_id;
  std::string participant_id;
  std::string gender;
  std::array<int, kNumEmotions> ratings{};
};

/// All responses, in file order.
struct ResponseMatrix {
  std::vector<Response> responses;

  /// Gait ids in order of first appearance.
  std::vector<std::string> gait_ids() const;
};

/// Ratings CSV: `gait_id,participant_id,gender,happy,angry,sad,neutral`.
ResponseMatrix parse_ratings_csv(std::string_view text);

/// Drop participants whose ratings (over all gaits and emotions) have zero
/// variance.
ResponseMatrix drop_constant_raters(const ResponseMatrix& m);

struct GaitRatings {
  std::string gait_id;
  std::array<double, kNumEmotions> mean{};
  std::size_t n_responses = 0;
};

/// Per-gait mean rating for each emotion, gaits in first-appearance order.
std::vector<GaitRatings> mean_responses(const ResponseMatrix& m);

/// The unique emotion whose mean rating is strictly above `theta`, or
/// nullopt (unlabeled) when none or several are.
std::optional<Emotion> assign_label(const std::array<double, kNumEmotions>& mean,
                                    double theta = 3.5);

struct CorrelationResult {
  Eigen::Matrix4d r = Eigen::Matrix4d::Identity();
  std::array<bool, kNumEmotions> constant{};  // emotion columns with zero variance
};

/// Pearson correlation between emotions over per-gait mean ratings. A
/// constant column correlates 0 with everything else.
CorrelationResult response_correlation(const std::vector<GaitRatings>& ratings);

/// Pearson correlation of two equal-length samples.
double pearson(std::span<const double> x, std::span<const double> y);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// Welch's two-sample t-test, two-sided.
TTestResult welch_ttest(std::span<const double> a, std::span<const double> b);

struct PcaResult {
  Eigen::MatrixXd components;      // one component per row, descending variance
  Eigen::VectorXd explained_ratio;
  Eigen::VectorXd mean;

  /// Coordinates of the rows of `x` on the first `k` components.
  Eigen::MatrixXd project(const Eigen::MatrixXd& x, Eigen::Index k) const;
};

/// Covariance eigendecomposition of mean-centred rows. Each component is
/// signed so that its largest-magnitude entry is positive.
PcaResult pca(const Eigen::MatrixXd& x);

/// Full `aggregate` report: labels, correlation, PCA over the
/// happy/angry/sad means, and the gender t-test when both groups qualify.
struct AggregateReport {
  std::vector<GaitRatings> ratings;
  std::vector<std::optional<Emotion>> labels;
  CorrelationResult correlation;
  PcaResult affect_pca;
  std::optional<TTestResult> gender_ttest;
  std::array<std::string, 2> genders;
};

AggregateReport aggregate(const ResponseMatrix& m, double theta);

std::string labels_csv(const AggregateReport& r);
std::string correlation_csv(const CorrelationResult& c);
nlohmann::json pca_report_json(const AggregateReport& r);

}  // namespace gaitemo
