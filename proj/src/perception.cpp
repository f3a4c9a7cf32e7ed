#include "gaitemo/perception.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/students_t.hpp>

#include "gaitemo/error.hpp"
#include "gaitemo/text.hpp"

namespace gaitemo {

std::vector<std::string> ResponseMatrix::gait_ids() const {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& r : responses)
    if (seen.insert(r.gait_id).second) ids.push_back(r.gait_id);
  return ids;
}

ResponseMatrix parse_ratings_csv(std::string_view text) {
  ResponseMatrix m;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 7)
      throw ParseError(ParseErrorKind::ColumnCount, line_no, 0,
                       "expected gait_id,participant_id,gender,happy,angry,sad,neutral");
    if (trim(cells[0]) == "gait_id") continue;
    Response r{std::string(trim(cells[0])), std::string(trim(cells[1])), std::string(trim(cells[2])), {}};
    for (std::size_t e = 0; e < kNumEmotions; ++e) {
      const std::string_view cell = trim(cells[3 + e]);
      int v = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw ParseError(ParseErrorKind::NonNumeric, line_no, 4 + e,
                         "rating '" + std::string(cell) + "' is not an integer");
      if (v < 1 || v > 5)
        throw ParseError(ParseErrorKind::Schema, line_no, 4 + e, "rating must be in 1..5");
      r.ratings[e] = v;
    }
    m.responses.push_back(std::move(r));
  }
  return m;
}

ResponseMatrix drop_constant_raters(const ResponseMatrix& m) {
  std::map<std::string, std::pair<int, int>> range;  // participant -> (min, max)
  for (const auto& r : m.responses) {
    auto [it, inserted] = range.try_emplace(r.participant_id, 6, 0);
    for (int v : r.ratings) {
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
    }
  }
  ResponseMatrix out;
  for (const auto& r : m.responses) {
    const auto& [lo, hi] = range.at(r.participant_id);
    if (lo != hi) out.responses.push_back(r);
  }
  return out;
}

std::vector<GaitRatings> mean_responses(const ResponseMatrix& m) {
  std::map<std::string, std::size_t> slot;
  std::vector<GaitRatings> out;
  for (const auto& r : m.responses) {
    auto [it, inserted] = slot.try_emplace(r.gait_id, out.size());
    if (inserted) out.push_back({r.gait_id, {}, 0});
    GaitRatings& g = out[it->second];
    for (std::size_t e = 0; e < kNumEmotions; ++e) g.mean[e] += r.ratings[e];
    ++g.n_responses;
  }
  for (auto& g : out)
    for (double& v : g.mean) v /= static_cast<double>(g.n_responses);
  return out;
}

std::optional<Emotion> assign_label(const std::array<double, kNumEmotions>& mean, double theta) {
  std::optional<Emotion> label;
  for (Emotion e : kAllEmotions) {
    if (mean[static_cast<std::size_t>(index_of(e))] > theta) {
      if (label) return std::nullopt;
      label = e;
    }
  }
  return label;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DataError("pearson needs two equal samples of size >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationResult response_correlation(const std::vector<GaitRatings>& ratings) {
  if (ratings.size() < 2) throw DataError("correlation needs at least 2 gaits");
  std::array<std::vector<double>, kNumEmotions> cols;
  for (const auto& g : ratings)
    for (std::size_t e = 0; e < kNumEmotions; ++e) cols[e].push_back(g.mean[e]);

  CorrelationResult out;
  for (std::size_t e = 0; e < kNumEmotions; ++e) {
    const auto [lo, hi] = std::minmax_element(cols[e].begin(), cols[e].end());
    out.constant[e] = *lo == *hi;
  }
  for (std::size_t a = 0; a < kNumEmotions; ++a) {
    for (std::size_t b = a + 1; b < kNumEmotions; ++b) {
      const double r = pearson(cols[a], cols[b]);
      out.r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = r;
      out.r(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = r;
    }
  }
  return out;
}

TTestResult welch_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw DataError("t-test needs at least 2 values per group");
  auto moments = [](std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::make_pair(mean, ss / (n - 1.0));
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = va / na;
  const double sb = vb / nb;
  if (sa + sb == 0.0) throw DataError("t-test needs nonzero variance");

  TTestResult r;
  r.t = (ma - mb) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  const boost::math::students_t dist(r.df);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(dist, -std::abs(r.t)));
  return r;
}

Eigen::MatrixXd PcaResult::project(const Eigen::MatrixXd& x, Eigen::Index k) const {
  k = std::min(k, components.rows());
  return (x.rowwise() - mean.transpose()) * components.topRows(k).transpose();
}

PcaResult pca(const Eigen::MatrixXd& x) {
  if (x.rows() < 2 || x.cols() < 1) throw DataError("PCA needs at least 2 rows and 1 column");
  PcaResult out;
  out.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - out.mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw DataError("PCA eigendecomposition failed");
  const Eigen::Index d = x.cols();
  // Eigen returns ascending eigenvalues; flip to descending.
  Eigen::VectorXd values = solver.eigenvalues().reverse().cwiseMax(0.0);
  out.components = solver.eigenvectors().rowwise().reverse().transpose();
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::Index arg = 0;
    out.components.row(k).cwiseAbs().maxCoeff(&arg);
    if (out.components(k, arg) < 0.0) out.components.row(k) *= -1.0;
  }
  const double total = values.sum();
  out.explained_ratio = total > 0.0 ? Eigen::VectorXd(values / total)
                                    : Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d));
  return out;
}

AggregateReport aggregate(const ResponseMatrix& m, double theta) {
  AggregateReport r;
  r.ratings = mean_responses(m);
  if (r.ratings.empty()) throw DataError("no ratings");
  for (const auto& g : r.ratings) r.labels.push_back(assign_label(g.mean, theta));
  r.correlation = response_correlation(r.ratings);

  Eigen::MatrixXd hap(static_cast<Eigen::Index>(r.ratings.size()), 3);
  for (std::size_t i = 0; i < r.ratings.size(); ++i)
    for (Eigen::Index e = 0; e < 3; ++e)
      hap(static_cast<Eigen::Index>(i), e) = r.ratings[i].mean[static_cast<std::size_t>(e)];
  r.affect_pca = pca(hap);

  // Two most frequent gender tags, alphabetical among equals.
  std::map<std::string, std::vector<double>> by_gender;
  for (const auto& resp : m.responses) {
    if (resp.gender.empty()) continue;
    auto& v = by_gender[resp.gender];
    v.insert(v.end(), resp.ratings.begin(), resp.ratings.end());
  }
  std::vector<std::pair<std::string, std::size_t>> sizes;
  for (const auto& [g, v] : by_gender) sizes.emplace_back(g, v.size());
  std::stable_sort(sizes.begin(), sizes.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (sizes.size() >= 2) {
    r.genders = {sizes[0].first, sizes[1].first};
    std::sort(r.genders.begin(), r.genders.end());
    try {
      r.gender_ttest = welch_ttest(by_gender.at(r.genders[0]), by_gender.at(r.genders[1]));
    } catch (const DataError&) {
      r.gender_ttest.reset();
    }
  }
  return r;
}

std::string labels_csv(const AggregateReport& r) {
  std::vector<LabelRow> rows;
  for (std::size_t i = 0; i < r.ratings.size(); ++i) rows.emplace_back(r.ratings[i].gait_id, r.labels[i]);
  return labels_to_csv(rows);
}

std::string correlation_csv(const CorrelationResult& c) {
  std::string out = "emotion";
  for (Emotion e : kAllEmotions) out += "," + std::string(emotion_name(e));
  out += '\n';
  for (Emotion a : kAllEmotions) {
    out += emotion_name(a);
    for (Emotion b : kAllEmotions) out += "," + format_double(c.r(index_of(a), index_of(b)));
    out += '\n';
  }
  return out;
}

nlohmann::json pca_report_json(const AggregateReport& r) {
  const auto& p = r.affect_pca;
  nlohmann::json components = nlohmann::json::array();
  for (Eigen::Index k = 0; k < p.components.rows(); ++k) {
    std::vector<double> row(static_cast<std::size_t>(p.components.cols()));
    for (Eigen::Index c = 0; c < p.components.cols(); ++c) row[static_cast<std::size_t>(c)] = p.components(k, c);
    components.push_back(row);
  }
  nlohmann::json j = {
      {"columns", {"happy", "angry", "sad"}},
      {"components", components},
      {"explained_variance_ratio",
       std::vector<double>(p.explained_ratio.data(), p.explained_ratio.data() + p.explained_ratio.size())},
      {"mean", std::vector<double>(p.mean.data(), p.mean.data() + p.mean.size())}};
  nlohmann::json constant = nlohmann::json::array();
  for (Emotion e : kAllEmotions)
    if (r.correlation.constant[static_cast<std::size_t>(index_of(e))]) constant.push_back(emotion_name(e));
  j["constant_emotions"] = constant;
  if (r.gender_ttest) {
    j["gender_ttest"] = {{"groups", {r.genders[0], r.genders[1]}},
                         {"t", r.gender_ttest->t},
                         {"df", r.gender_ttest->df},
                         {"p", r.gender_ttest->p}};
  }
  return j;
}

}  // namespace gaitemo
