#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gaitemo/error.hpp"
#include "gaitemo/lstm.hpp"
#include "oracles.hpp"

using namespace gaitemo;

namespace {

LstmParams random_params(const LstmShape& shape, std::uint64_t seed, double range) {
  LstmParams p(shape);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-range, range);
  for (Eigen::Index k = 0; k < p.flat().size(); ++k) p.flat()[k] = u(rng);
  return p;
}

Sequence random_sequence(int steps, int dim, std::mt19937_64& rng, double range = 1.0) {
  std::uniform_real_distribution<double> u(-range, range);
  Sequence x(steps, dim);
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = u(rng);
  return x;
}

std::vector<std::vector<double>> rows_of(const Sequence& x) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) out[static_cast<std::size_t>(r)].push_back(x(r, c));
  return out;
}

double batch_loss(const LstmParams& p, const std::vector<Sequence>& xs, const std::vector<int>& ys) {
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) total += cross_entropy(forward(p, xs[i]).logits, ys[i]);
  return total / static_cast<double>(xs.size());
}

bool grad_close(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  return std::abs(analytic - numeric) <= std::max(1e-4 * scale, 1e-6);
}

int argmax_of(const VectorXd& v) {
  Eigen::Index k;
  v.maxCoeff(&k);
  return static_cast<int>(k);
}

// Joints placed inside [0.2, 0.8] on every axis, root fixed at the origin.
Gait bounded_gait(std::size_t frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  std::vector<Pose> poses(frames);
  for (Pose& p : poses)
    for (std::size_t j = 1; j < kNumJoints; ++j) p.set_joint(static_cast<JointId>(j), Vec3(u(rng), u(rng), u(rng)));
  return Gait("bounded", 30.0, std::move(poses));
}

}  // namespace

TEST_CASE("parameter layout matches the flat vector") {
  const LstmShape shape{5, 3, 2};
  LstmParams p(shape);
  CHECK(p.flat().size() == LstmParams::size_for(shape));
  CHECK(p.flat().size() == 4 * (3 * 5 + 3 * 3 + 3) + 2 * 3 + 2);
  p.flat().setLinSpaced(p.flat().size(), 0.0, static_cast<double>(p.flat().size() - 1));
  CHECK(p.W(Gate::Input)(0, 0) == 0.0);
  CHECK(p.W(Gate::Input)(1, 0) == 1.0);
  CHECK(p.U(Gate::Input)(0, 0) == 15.0);
  CHECK(p.b(Gate::Input)(0) == 24.0);
  CHECK(p.W(Gate::Output)(0, 0) == 27.0);
  CHECK(p.head_W()(1, 0) == 109.0);
  CHECK(p.head_b()(1) == 115.0);

  const auto mask = p.weight_mask();
  CHECK(mask[0]);
  CHECK_FALSE(mask[24]);
  CHECK_FALSE(mask[115]);
}

TEST_CASE("initialization bounds and forget bias") {
  const LstmParams p = init_params({48, 32, 4}, 3);
  const double bound = 1.0 / std::sqrt(32.0);
  for (Gate g : kAllGates) {
    CHECK(p.W(g).cwiseAbs().maxCoeff() <= bound);
    CHECK(p.U(g).cwiseAbs().maxCoeff() <= bound);
  }
  CHECK(p.b(Gate::Forget).isOnes());
  CHECK(p.b(Gate::Input).isZero());
  CHECK(p.b(Gate::Cell).isZero());
  CHECK(p.head_b().isZero());
  CHECK(init_params({48, 32, 4}, 3).flat() == p.flat());
  CHECK(init_params({48, 32, 4}, 4).flat() != p.flat());
}

TEST_CASE("forward agrees with the scalar oracle") {
  std::mt19937_64 rng(11);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const LstmShape shape{6, 5, 3};
    const LstmParams p = random_params(shape, s, 0.8);
    const Sequence x = random_sequence(7, 6, rng);
    const ForwardResult r = forward(p, x);
    const std::vector<double> flat(p.flat().data(), p.flat().data() + p.flat().size());
    const auto [logits, h] = oracle::lstm_forward(flat, 6, 5, 3, rows_of(x));
    for (int k = 0; k < 3; ++k) CHECK(r.logits(k) == doctest::Approx(logits[static_cast<std::size_t>(k)]).epsilon(1e-12));
    for (int k = 0; k < 5; ++k) CHECK(r.deep(k) == doctest::Approx(h[static_cast<std::size_t>(k)]).epsilon(1e-12));
  }
}

TEST_CASE("lstm_step reproduces forward state by state") {
  std::mt19937_64 rng(2);
  const LstmParams p = random_params({4, 3, 2}, 9, 1.0);
  const Sequence x = random_sequence(5, 4, rng);
  const ForwardResult r = forward(p, x);
  LstmState s = LstmState::zero(3);
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    s = lstm_step(p, x.row(t).transpose(), s);
    CHECK((s.h - r.cache.h.col(t)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((s.c - r.cache.c.col(t)).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("gates stay in (0,1) and hidden state is tanh-bounded under large inputs") {
  std::mt19937_64 rng(5);
  const LstmParams p = random_params({8, 6, 4}, 1, 3.0);
  const Sequence x = random_sequence(20, 8, rng, 50.0);
  const ForwardResult r = forward(p, x);
  for (const MatrixXd* gate : {&r.cache.i, &r.cache.o, &r.cache.f}) {
    CHECK(gate->minCoeff() >= 0.0);
    CHECK(gate->maxCoeff() <= 1.0);
  }
  CHECK(r.cache.h.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(r.cache.g.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(r.logits.allFinite());
}

TEST_CASE("softmax and cross entropy") {
  const VectorXd logits = (VectorXd(3) << 1000.0, 0.0, -1000.0).finished();
  const VectorXd p = softmax(logits);
  CHECK(p.sum() == doctest::Approx(1.0));
  CHECK(p(0) == doctest::Approx(1.0));
  CHECK(std::isfinite(cross_entropy(logits, 2)));
  CHECK(cross_entropy(logits, 2) == doctest::Approx(2000.0));
  CHECK(cross_entropy(VectorXd::Zero(4), 1) == doctest::Approx(std::log(4.0)));
}

TEST_CASE("parameter gradients match central differences") {
  std::mt19937_64 rng(17);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const LstmShape shape{6, 4, 3};
    LstmParams p = random_params(shape, 100 + s, 0.7);
    std::vector<Sequence> xs;
    std::vector<int> ys;
    for (int i = 0; i < 3; ++i) {
      xs.push_back(random_sequence(3, 6, rng));
      ys.push_back(i % 3);
    }
    const Gradient g = backprop(p, xs, ys);
    CHECK(g.loss == doctest::Approx(batch_loss(p, xs, ys)).epsilon(1e-12));
    int bad = 0;
    const double h = 1e-5;
    for (Eigen::Index k = 0; k < p.flat().size(); ++k) {
      const double keep = p.flat()[k];
      p.flat()[k] = keep + h;
      const double up = batch_loss(p, xs, ys);
      p.flat()[k] = keep - h;
      const double down = batch_loss(p, xs, ys);
      p.flat()[k] = keep;
      if (!grad_close(g.grad[k], (up - down) / (2 * h))) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("a duplicated example leaves the batch gradient unchanged") {
  std::mt19937_64 rng(29);
  const LstmParams p = random_params({5, 4, 3}, 12, 0.8);
  const Sequence x = random_sequence(4, 5, rng);
  const std::vector<Sequence> one = {x}, two = {x, x};
  const std::vector<int> y1 = {1}, y2 = {1, 1};
  const Gradient a = backprop(p, one, y1), b = backprop(p, two, y2);
  CHECK(b.loss == doctest::Approx(a.loss).epsilon(1e-14));
  CHECK((a.grad - b.grad).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("input gradients match central differences") {
  std::mt19937_64 rng(23);
  const LstmParams p = random_params({5, 4, 4}, 7, 0.9);
  Sequence x = random_sequence(4, 5, rng);
  const MatrixXd dx = input_gradient(p, x, 2);
  const double h = 1e-5;
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double keep = x(r, c);
      x(r, c) = keep + h;
      const double up = cross_entropy(forward(p, x).logits, 2);
      x(r, c) = keep - h;
      const double down = cross_entropy(forward(p, x).logits, 2);
      x(r, c) = keep;
      CHECK(grad_close(dx(r, c), (up - down) / (2 * h)));
    }
}

TEST_CASE("forward is deterministic") {
  std::mt19937_64 rng(1);
  const LstmParams p = random_params({48, 32, 4}, 2, 0.2);
  const Sequence x = random_sequence(48, 48, rng);
  const ForwardResult a = forward(p, x);
  const ForwardResult b = forward(p, x);
  CHECK(a.logits == b.logits);
  CHECK(a.deep == b.deep);
}

TEST_CASE("input width mismatch is rejected") {
  const LstmParams p = init_params({5, 3, 2}, 0);
  CHECK_THROWS_AS(forward(p, Sequence::Zero(3, 4)), DataError);
}

TEST_CASE("learning rate schedule lookup and validation") {
  TrainConfig cfg;
  cfg.lr_schedule = {{0, 0.1}, {10, 0.01}, {20, 0.001}};
  CHECK(cfg.lr_at(0) == 0.1);
  CHECK(cfg.lr_at(9) == 0.1);
  CHECK(cfg.lr_at(10) == 0.01);
  CHECK(cfg.lr_at(500) == 0.001);
  cfg.lr_schedule = {{5, 0.1}};
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), DataError);

  TrainConfig custom;
  custom.epochs = 12;
  custom.rng_seed = 99;
  custom.lr_schedule = {{0, 0.5}, {3, 0.25}};
  const TrainConfig back = nlohmann::json(custom).get<TrainConfig>();
  CHECK(back.epochs == 12);
  CHECK(back.rng_seed == 99);
  CHECK(back.lr_schedule == custom.lr_schedule);
}

namespace {

// Four classes whose sequences differ by a constant offset on one channel.
void separable_corpus(std::vector<Sequence>& xs, std::vector<int>& ys) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (int i = 0; i < 40; ++i) {
    const int label = i % 4;
    Sequence x(6, 4);
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = (c == label ? 1.0 : 0.0) + noise(rng);
    xs.push_back(x);
    ys.push_back(label);
  }
}

}  // namespace

TEST_CASE("epochs = 0 leaves the initialized model unchanged") {
  std::vector<Sequence> xs;
  std::vector<int> ys;
  separable_corpus(xs, ys);
  LstmParams p = init_params({4, 8, 4}, 5);
  const VectorXd before = p.flat();
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK(train_sequences(p, xs, ys, cfg).empty());
  CHECK(p.flat() == before);
}

TEST_CASE("training fits a separable corpus with a decreasing smoothed loss") {
  std::vector<Sequence> xs;
  std::vector<int> ys;
  separable_corpus(xs, ys);
  LstmParams p = init_params({4, 8, 4}, 5);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.rng_seed = 5;
  const auto curve = train_sequences(p, xs, ys, cfg);
  REQUIRE(curve.size() == 200);

  int correct = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) correct += argmax_of(forward(p, xs[i]).logits) == ys[i];
  CHECK(correct == 40);

  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t start = 0; start < curve.size(); start += 10) {
    double mean = 0.0;
    for (std::size_t k = start; k < start + 10; ++k) mean += curve[k] / 10.0;
    CHECK(mean <= prev);
    prev = mean;
  }

  LstmParams again = init_params({4, 8, 4}, 5);
  CHECK(train_sequences(again, xs, ys, cfg) == curve);
  CHECK(again.flat() == p.flat());
}

TEST_CASE("resample plan") {
  const auto same = resample_plan(5, 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(same[k].lo == k);
    CHECK(same[k].w_hi == 0.0);
  }
  const auto up = resample_plan(3, 5);
  CHECK(up[1].lo == 0);
  CHECK(up[1].w_hi == doctest::Approx(0.5));
  CHECK(up[4].lo == 2);
  const auto one = resample_plan(1, 4);
  for (const auto& s : one) CHECK((s.lo == 0 && s.hi == 0));
  CHECK_THROWS_AS(resample_plan(0, 4), DataError);
}

TEST_CASE("prepared sequences lie in [0,1]") {
  LstmModel m{init_params({48, 4, 4}, 0), {}, 10};
  m.scale.min = {0.3, 0.3, 0.3};
  m.scale.max = {0.6, 0.6, 0.6};
  const Sequence x = prepare_sequence(m, bounded_gait(17, 4));
  CHECK(x.rows() == 10);
  CHECK(x.cols() == 48);
  CHECK(x.minCoeff() >= 0.0);
  CHECK(x.maxCoeff() <= 1.0);
  CHECK(x.leftCols(3).isZero());  // root sits below min and is clamped
}

TEST_CASE("saliency of a zero-parameter model is zero") {
  LstmModel m{LstmParams({48, 4, 4}), {}, 8};
  const MatrixXd s = saliency(m, bounded_gait(12, 1));
  CHECK(s.rows() == 12);
  CHECK(s.cols() == 16);
  CHECK(s.isZero());
}

TEST_CASE("saliency matches finite-difference input gradients") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    LstmModel m{random_params({48, 4, 4}, 40 + seed, 0.6), {}, 6};
    Gait g = bounded_gait(9, seed);
    const MatrixXd s = saliency(m, g);
    REQUIRE(s.rows() == 9);
    CHECK(s.minCoeff() >= 0.0);
    CHECK(s.maxCoeff() <= 1.0);

    const int label = argmax_of(forward(m.params, prepare_sequence(m, g)).logits);
    auto loss = [&](const Gait& q) { return cross_entropy(forward(m.params, prepare_sequence(m, q)).logits, label); };

    // The root is subtracted from every joint, so only the others can be
    // perturbed in gait space.
    MatrixXd fd = MatrixXd::Zero(9, 16);
    const double h = 1e-6;
    std::vector<Pose> poses = g.frames();
    for (std::size_t t = 0; t < 9; ++t)
      for (std::size_t j = 1; j < kNumJoints; ++j) {
        double sq = 0.0;
        for (int a = 0; a < 3; ++a) {
          const Vec3 keep = poses[t].joint(static_cast<JointId>(j));
          Vec3 moved = keep;
          moved[a] += h;
          poses[t].set_joint(static_cast<JointId>(j), moved);
          const double up = loss(Gait("p", 30.0, poses));
          moved[a] -= 2 * h;
          poses[t].set_joint(static_cast<JointId>(j), moved);
          const double down = loss(Gait("p", 30.0, poses));
          poses[t].set_joint(static_cast<JointId>(j), keep);
          const double d = (up - down) / (2 * h);
          sq += d * d;
        }
        fd(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = std::sqrt(sq);
      }
    const MatrixXd& raw = s;
    if (s.maxCoeff() < 1.0 && fd.maxCoeff() <= 1.0) {
      for (Eigen::Index t = 0; t < 9; ++t)
        for (Eigen::Index j = 1; j < 16; ++j) CHECK(grad_close(raw(t, j), fd(t, j)));
    } else {
      // Shared divisor: ratios are preserved.
      const double ratio = raw(0, 1) / fd(0, 1);
      for (Eigen::Index t = 0; t < 9; ++t)
        for (Eigen::Index j = 1; j < 16; ++j) CHECK(grad_close(raw(t, j), ratio * fd(t, j)));
    }
  }
}

TEST_CASE("model JSON round trip is exact") {
  LstmModel m{random_params({48, 5, 4}, 8, 1.0), {}, 12};
  m.scale.min = {-0.123456789012345, 0.1, -1.0 / 3.0};
  m.scale.max = {0.9, 2.0 / 7.0, 1e-3};
  const nlohmann::json j = lstm_to_json(m);
  CHECK(j.at("h") == 5);
  CHECK(j.at("seq_len") == 12);
  CHECK(j.at("params").contains("f"));
  const LstmModel back = lstm_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.params.flat() == m.params.flat());
  CHECK(back.params.shape() == m.params.shape());
  CHECK(back.scale == m.scale);
  CHECK(back.seq_len == 12);

  nlohmann::json broken = j;
  broken["params"]["i"]["b"] = nlohmann::json::array({1.0});
  CHECK_THROWS_AS(lstm_from_json(broken), Error);
}
