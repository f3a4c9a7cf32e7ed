#include "gaitemo/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gaitemo/error.hpp"
#include "gaitemo/forest.hpp"

namespace gaitemo {

// ---------------------------------------------------------------------------
// Parameter layout

LstmParams::LstmParams(LstmShape shape) : shape_(shape) {
  if (shape.input < 1 || shape.hidden < 1 || shape.classes < 1)
    throw DataError("LSTM dimensions must be positive");
  flat_ = VectorXd::Zero(size_for(shape));
}

Eigen::Index LstmParams::size_for(const LstmShape& s) {
  const Eigen::Index gate = Eigen::Index{s.hidden} * (s.input + s.hidden + 1);
  return 4 * gate + Eigen::Index{s.classes} * (s.hidden + 1);
}

Eigen::Index LstmParams::gate_offset(Gate g) const {
  const Eigen::Index gate = Eigen::Index{shape_.hidden} * (shape_.input + shape_.hidden + 1);
  return static_cast<int>(g) * gate;
}

Eigen::Index LstmParams::head_offset() const {
  return 4 * Eigen::Index{shape_.hidden} * (shape_.input + shape_.hidden + 1);
}

Eigen::Map<MatrixXd> LstmParams::W(Gate g) {
  return {flat_.data() + gate_offset(g), shape_.hidden, shape_.input};
}
Eigen::Map<const MatrixXd> LstmParams::W(Gate g) const {
  return {flat_.data() + gate_offset(g), shape_.hidden, shape_.input};
}
Eigen::Map<MatrixXd> LstmParams::U(Gate g) {
  return {flat_.data() + gate_offset(g) + Eigen::Index{shape_.hidden} * shape_.input, shape_.hidden,
          shape_.hidden};
}
Eigen::Map<const MatrixXd> LstmParams::U(Gate g) const {
  return {flat_.data() + gate_offset(g) + Eigen::Index{shape_.hidden} * shape_.input, shape_.hidden,
          shape_.hidden};
}
Eigen::Map<VectorXd> LstmParams::b(Gate g) {
  return {flat_.data() + gate_offset(g) + Eigen::Index{shape_.hidden} * (shape_.input + shape_.hidden),
          shape_.hidden};
}
Eigen::Map<const VectorXd> LstmParams::b(Gate g) const {
  return {flat_.data() + gate_offset(g) + Eigen::Index{shape_.hidden} * (shape_.input + shape_.hidden),
          shape_.hidden};
}
Eigen::Map<MatrixXd> LstmParams::head_W() {
  return {flat_.data() + head_offset(), shape_.classes, shape_.hidden};
}
Eigen::Map<const MatrixXd> LstmParams::head_W() const {
  return {flat_.data() + head_offset(), shape_.classes, shape_.hidden};
}
Eigen::Map<VectorXd> LstmParams::head_b() {
  return {flat_.data() + head_offset() + Eigen::Index{shape_.classes} * shape_.hidden, shape_.classes};
}
Eigen::Map<const VectorXd> LstmParams::head_b() const {
  return {flat_.data() + head_offset() + Eigen::Index{shape_.classes} * shape_.hidden, shape_.classes};
}

std::vector<bool> LstmParams::weight_mask() const {
  std::vector<bool> mask(static_cast<std::size_t>(flat_.size()), true);
  auto clear = [&](const double* begin, Eigen::Index n) {
    const auto off = static_cast<std::size_t>(begin - flat_.data());
    std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(off), n, false);
  };
  for (Gate g : kAllGates) clear(b(g).data(), shape_.hidden);
  clear(head_b().data(), shape_.classes);
  return mask;
}

// ---------------------------------------------------------------------------
// Forward pass

double logistic(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

namespace {

VectorXd logistic(const VectorXd& v) { return v.unaryExpr([](double x) { return gaitemo::logistic(x); }); }
VectorXd tanh_of(const VectorXd& v) { return v.array().tanh().matrix(); }

VectorXd pre_activation(const LstmParams& p, Gate g, const Eigen::Ref<const VectorXd>& x,
                        const VectorXd& h) {
  return p.W(g) * x + p.U(g) * h + p.b(g);
}

void check_input(const LstmParams& p, Eigen::Index cols) {
  if (cols != p.shape().input)
    throw DataError("sequence has " + std::to_string(cols) + " columns, model expects " +
                    std::to_string(p.shape().input));
}

}  // namespace

LstmState lstm_step(const LstmParams& p, const Eigen::Ref<const VectorXd>& x, const LstmState& s) {
  const VectorXd i = logistic(pre_activation(p, Gate::Input, x, s.h));
  const VectorXd o = logistic(pre_activation(p, Gate::Output, x, s.h));
  const VectorXd f = logistic(pre_activation(p, Gate::Forget, x, s.h));
  const VectorXd g = tanh_of(pre_activation(p, Gate::Cell, x, s.h));
  LstmState next;
  next.c = f.cwiseProduct(s.c) + i.cwiseProduct(g);
  next.h = o.cwiseProduct(tanh_of(next.c));
  return next;
}

ForwardResult forward(const LstmParams& p, const Sequence& x) {
  check_input(p, x.cols());
  const int hidden = p.shape().hidden;
  const Eigen::Index steps = x.rows();
  ForwardResult out;
  auto& c = out.cache;
  for (MatrixXd* m : {&c.i, &c.o, &c.f, &c.g, &c.c, &c.tanh_c, &c.h}) m->resize(hidden, steps);

  VectorXd h = VectorXd::Zero(hidden);
  VectorXd cell = VectorXd::Zero(hidden);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const VectorXd xt = x.row(t).transpose();
    c.i.col(t) = logistic(pre_activation(p, Gate::Input, xt, h));
    c.o.col(t) = logistic(pre_activation(p, Gate::Output, xt, h));
    c.f.col(t) = logistic(pre_activation(p, Gate::Forget, xt, h));
    c.g.col(t) = tanh_of(pre_activation(p, Gate::Cell, xt, h));
    cell = c.f.col(t).cwiseProduct(cell) + c.i.col(t).cwiseProduct(c.g.col(t));
    c.c.col(t) = cell;
    c.tanh_c.col(t) = tanh_of(cell);
    h = c.o.col(t).cwiseProduct(c.tanh_c.col(t));
    c.h.col(t) = h;
  }
  out.deep = h;
  out.logits = p.head_W() * h + p.head_b();
  return out;
}

VectorXd softmax(const VectorXd& logits) {
  const VectorXd e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

double cross_entropy(const VectorXd& logits, int label) {
  if (label < 0 || label >= logits.size()) throw DataError("label out of range");
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return lse - logits[label];
}

// ---------------------------------------------------------------------------
// Backpropagation through time

namespace {

// Adds weight * d(loss)/d(params) into `grad` and, when `dx` is non-null,
// writes weight * d(loss)/d(x). Returns the unweighted loss.
double accumulate(const LstmParams& p, const Sequence& x, int label, double weight,
                  LstmParams& grad, MatrixXd* dx) {
  const ForwardResult fr = forward(p, x);
  const double loss = cross_entropy(fr.logits, label);
  const auto& c = fr.cache;
  const int hidden = p.shape().hidden;
  const Eigen::Index steps = x.rows();

  VectorXd dlogits = softmax(fr.logits);
  dlogits[label] -= 1.0;
  dlogits *= weight;
  if (steps == 0) {
    grad.head_b() += dlogits;
    if (dx) dx->resize(0, x.cols());
    return loss;
  }
  grad.head_W() += dlogits * c.h.col(steps - 1).transpose();
  grad.head_b() += dlogits;

  if (dx) dx->setZero(steps, x.cols());
  VectorXd dh = p.head_W().transpose() * dlogits;
  VectorXd dc = VectorXd::Zero(hidden);
  const VectorXd zero = VectorXd::Zero(hidden);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const VectorXd h_prev = t > 0 ? VectorXd(c.h.col(t - 1)) : zero;
    const VectorXd c_prev = t > 0 ? VectorXd(c.c.col(t - 1)) : zero;
    const auto i = c.i.col(t).array();
    const auto o = c.o.col(t).array();
    const auto f = c.f.col(t).array();
    const auto g = c.g.col(t).array();
    const auto tc = c.tanh_c.col(t).array();

    dc.array() += dh.array() * o * (1.0 - tc.square());
    const VectorXd da_o = (dh.array() * tc * o * (1.0 - o)).matrix();
    const VectorXd da_i = (dc.array() * g * i * (1.0 - i)).matrix();
    const VectorXd da_f = (dc.array() * c_prev.array() * f * (1.0 - f)).matrix();
    const VectorXd da_g = (dc.array() * i * (1.0 - g.square())).matrix();

    const std::array<std::pair<Gate, const VectorXd*>, 4> deltas = {
        {{Gate::Input, &da_i}, {Gate::Output, &da_o}, {Gate::Forget, &da_f}, {Gate::Cell, &da_g}}};
    VectorXd dh_prev = VectorXd::Zero(hidden);
    for (const auto& [gate, da] : deltas) {
      grad.W(gate).noalias() += *da * x.row(t);
      grad.U(gate).noalias() += *da * h_prev.transpose();
      grad.b(gate) += *da;
      dh_prev.noalias() += p.U(gate).transpose() * *da;
      if (dx) dx->row(t).noalias() += (p.W(gate).transpose() * *da).transpose();
    }
    dh = dh_prev;
    dc = (dc.array() * f).matrix();
  }
  return loss;
}

Gradient backprop_subset(const LstmParams& p, std::span<const Sequence> seqs,
                         std::span<const int> labels, std::span<const std::size_t> subset) {
  if (subset.empty()) throw DataError("backprop needs a nonempty batch");
  LstmParams grad(p.shape());
  const double weight = 1.0 / static_cast<double>(subset.size());
  double loss = 0.0;
  for (std::size_t k : subset) loss += accumulate(p, seqs[k], labels[k], weight, grad, nullptr);
  return {loss * weight, std::move(grad.flat())};
}

}  // namespace

Gradient backprop(const LstmParams& p, std::span<const Sequence> batch, std::span<const int> labels) {
  if (batch.size() != labels.size()) throw DataError("batch/label size mismatch");
  std::vector<std::size_t> all(batch.size());
  std::iota(all.begin(), all.end(), 0);
  return backprop_subset(p, batch, labels, all);
}

MatrixXd input_gradient(const LstmParams& p, const Sequence& x, int label) {
  LstmParams scratch(p.shape());
  MatrixXd dx;
  accumulate(p, x, label, 1.0, scratch, &dx);
  return dx;
}

// ---------------------------------------------------------------------------
// Training

double TrainConfig::lr_at(int epoch) const {
  auto it = lr_schedule.upper_bound(epoch);
  if (it == lr_schedule.begin()) throw DataError("learning-rate schedule has no entry for epoch 0");
  return std::prev(it)->second;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw DataError("batch_size must be >= 1");
  if (epochs < 0) throw DataError("epochs must be >= 0");
  if (hidden < 1) throw DataError("hidden must be >= 1");
  if (seq_len < 1) throw DataError("seq_len must be >= 1");
  if (lr_schedule.empty() || lr_schedule.begin()->first > 0)
    throw DataError("learning-rate schedule must start at epoch 0");
  for (const auto& [epoch, lr] : lr_schedule)
    if (!(lr > 0.0)) throw DataError("learning rates must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw DataError("Adam betas must lie in [0, 1)");
  if (weight_decay < 0.0) throw DataError("weight_decay must be >= 0");
}

void to_json(nlohmann::json& j, const TrainConfig& cfg) {
  nlohmann::json schedule = nlohmann::json::object();
  for (const auto& [epoch, lr] : cfg.lr_schedule) schedule[std::to_string(epoch)] = lr;
  j = {{"batch_size", cfg.batch_size},     {"epochs", cfg.epochs},
       {"lr_schedule", schedule},          {"beta1", cfg.beta1},
       {"beta2", cfg.beta2},               {"eps", cfg.eps},
       {"weight_decay", cfg.weight_decay}, {"rng_seed", cfg.rng_seed},
       {"hidden", cfg.hidden},             {"seq_len", cfg.seq_len}};
}

void from_json(const nlohmann::json& j, TrainConfig& cfg) {
  if (!j.is_object()) throw DataError("training config must be a JSON object");
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  read("batch_size", cfg.batch_size);
  read("epochs", cfg.epochs);
  read("beta1", cfg.beta1);
  read("beta2", cfg.beta2);
  read("eps", cfg.eps);
  read("weight_decay", cfg.weight_decay);
  read("rng_seed", cfg.rng_seed);
  read("hidden", cfg.hidden);
  read("seq_len", cfg.seq_len);
  if (j.contains("lr_schedule")) {
    cfg.lr_schedule.clear();
    for (const auto& [key, lr] : j.at("lr_schedule").items())
      cfg.lr_schedule[std::stoi(key)] = lr.get<double>();
  }
}

LstmParams init_params(const LstmShape& shape, std::uint64_t seed) {
  LstmParams p(shape);
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  const auto mask = p.weight_mask();
  for (Eigen::Index k = 0; k < p.flat().size(); ++k)
    p.flat()[k] = mask[static_cast<std::size_t>(k)] ? uniform(rng) : 0.0;
  p.b(Gate::Forget).setOnes();
  return p;
}

std::vector<double> train_sequences(LstmParams& params, std::span<const Sequence> seqs,
                                    std::span<const int> labels, const TrainConfig& cfg) {
  cfg.validate();
  if (seqs.empty()) throw DataError("empty training set");
  if (seqs.size() != labels.size()) throw DataError("sequence/label count mismatch");
  for (int label : labels)
    if (label < 0 || label >= params.shape().classes) throw DataError("label out of range");

  const Eigen::Index n_params = params.flat().size();
  const auto mask = params.weight_mask();
  VectorXd m = VectorXd::Zero(n_params);
  VectorXd v = VectorXd::Zero(n_params);
  std::mt19937_64 rng(cfg.rng_seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(seqs.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(cfg.epochs));
  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.lr_at(epoch);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      const std::span<const std::size_t> subset(order.data() + start, stop - start);
      const Gradient gr = backprop_subset(params, seqs, labels, subset);
      epoch_loss += gr.loss * static_cast<double>(subset.size());

      ++step;
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      VectorXd& theta = params.flat();
      for (Eigen::Index k = 0; k < n_params; ++k) {
        if (mask[static_cast<std::size_t>(k)]) theta[k] -= lr * cfg.weight_decay * theta[k];
        m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * gr.grad[k];
        v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * gr.grad[k] * gr.grad[k];
        theta[k] -= lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + cfg.eps);
      }
    }
    curve.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return curve;
}

InputScale fit_input_scale(std::span<const Gait> gaits) {
  if (gaits.empty()) throw DataError("cannot fit input scale on an empty set");
  InputScale s;
  s.min.fill(std::numeric_limits<double>::infinity());
  s.max.fill(-std::numeric_limits<double>::infinity());
  for (const Gait& g : gaits) {
    for (const Pose& p : g.frames()) {
      const Vec3 root = p.joint(JointId::Root);
      for (std::size_t j = 0; j < kNumJoints; ++j) {
        const Vec3 q = p.joint(static_cast<JointId>(j)) - root;
        for (int a = 0; a < 3; ++a) {
          s.min[a] = std::min(s.min[a], q[a]);
          s.max[a] = std::max(s.max[a], q[a]);
        }
      }
    }
  }
  for (int a = 0; a < 3; ++a)
    if (s.max[a] - s.min[a] < 1e-12) s.max[a] = s.min[a] + 1.0;
  return s;
}

std::vector<ResampleStep> resample_plan(std::size_t frames, std::size_t steps) {
  if (frames == 0 || steps == 0) throw DataError("cannot resample an empty sequence");
  std::vector<ResampleStep> plan(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double pos = steps == 1 ? 0.0
                                  : static_cast<double>(k) * static_cast<double>(frames - 1) /
                                        static_cast<double>(steps - 1);
    const auto lo = std::min(static_cast<std::size_t>(pos), frames - 1);
    const std::size_t hi = std::min(lo + 1, frames - 1);
    plan[k] = {lo, hi, hi == lo ? 0.0 : pos - static_cast<double>(lo)};
  }
  return plan;
}

Sequence prepare_sequence(const LstmModel& model, const Gait& g) {
  const Gait normalized = normalize_root(g);
  const auto plan = resample_plan(normalized.size(), static_cast<std::size_t>(model.seq_len));
  Sequence x(model.seq_len, static_cast<Eigen::Index>(kPoseDim));
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const auto lo = normalized[plan[k].lo].coords();
    const auto hi = normalized[plan[k].hi].coords();
    for (std::size_t c = 0; c < kPoseDim; ++c) {
      const double v = (1.0 - plan[k].w_hi) * lo[c] + plan[k].w_hi * hi[c];
      const std::size_t a = c % 3;
      const double scaled = (v - model.scale.min[a]) / (model.scale.max[a] - model.scale.min[a]);
      x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = std::clamp(scaled, 0.0, 1.0);
    }
  }
  return x;
}

TrainResult train_lstm(std::span<const Gait> gaits, std::span<const int> labels,
                       const TrainConfig& cfg) {
  cfg.validate();
  if (gaits.empty()) throw DataError("empty training set");
  if (gaits.size() != labels.size()) throw DataError("gait/label count mismatch");

  TrainResult out{LstmModel{init_params({static_cast<int>(kPoseDim), cfg.hidden,
                                         static_cast<int>(4)},
                                        cfg.rng_seed),
                            fit_input_scale(gaits), cfg.seq_len},
                  {}};
  std::vector<Sequence> seqs;
  seqs.reserve(gaits.size());
  for (const Gait& g : gaits) seqs.push_back(prepare_sequence(out.model, g));
  out.loss_curve = train_sequences(out.model.params, seqs, labels, cfg);
  return out;
}

VectorXd deep_features(const LstmModel& model, const Gait& g) {
  return forward(model.params, prepare_sequence(model, g)).deep;
}

MatrixXd saliency(const LstmModel& model, const Gait& g) {
  const Sequence x = prepare_sequence(model, g);
  const VectorXd logits = forward(model.params, x).logits;
  const std::vector<double> lv(logits.data(), logits.data() + logits.size());
  const MatrixXd dx = input_gradient(model.params, x, argmax(lv));

  const auto plan = resample_plan(g.size(), static_cast<std::size_t>(model.seq_len));
  MatrixXd per_frame = MatrixXd::Zero(static_cast<Eigen::Index>(g.size()), dx.cols());
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    per_frame.row(static_cast<Eigen::Index>(plan[k].lo)) += (1.0 - plan[k].w_hi) * dx.row(row);
    per_frame.row(static_cast<Eigen::Index>(plan[k].hi)) += plan[k].w_hi * dx.row(row);
  }

  MatrixXd map(per_frame.rows(), static_cast<Eigen::Index>(kNumJoints));
  for (Eigen::Index t = 0; t < per_frame.rows(); ++t)
    for (Eigen::Index j = 0; j < map.cols(); ++j) map(t, j) = per_frame.row(t).segment(3 * j, 3).norm();
  const double peak = map.size() ? map.maxCoeff() : 0.0;
  if (peak > 1.0) map /= peak;
  return map;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr std::array<const char*, 4> kGateKeys = {"i", "o", "f", "c"};

nlohmann::json matrix_json(const Eigen::Ref<const MatrixXd>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(std::move(row));
  }
  return rows;
}

void read_matrix(const nlohmann::json& j, Eigen::Map<MatrixXd> m, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != m.rows())
    throw DataError(std::string("model: bad row count for ") + what);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m.cols())
      throw DataError(std::string("model: bad column count for ") + what);
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
}

void read_vector(const nlohmann::json& j, Eigen::Map<VectorXd> v, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != v.size())
    throw DataError(std::string("model: bad length for ") + what);
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = j[static_cast<std::size_t>(k)].get<double>();
}

}  // namespace

nlohmann::json lstm_to_json(const LstmModel& model) {
  const LstmParams& p = model.params;
  nlohmann::json params = nlohmann::json::object();
  for (Gate g : kAllGates) {
    const VectorXd b = p.b(g);
    params[kGateKeys[static_cast<int>(g)]] = {
        {"W", matrix_json(p.W(g))},
        {"U", matrix_json(p.U(g))},
        {"b", std::vector<double>(b.data(), b.data() + b.size())}};
  }
  const VectorXd hb = p.head_b();
  return {{"h", p.shape().hidden},
          {"input_dim", p.shape().input},
          {"classes", p.shape().classes},
          {"params", params},
          {"head", {{"W", matrix_json(p.head_W())}, {"b", std::vector<double>(hb.data(), hb.data() + hb.size())}}},
          {"input_scale",
           {{"min", std::vector<double>(model.scale.min.begin(), model.scale.min.end())},
            {"max", std::vector<double>(model.scale.max.begin(), model.scale.max.end())}}},
          {"seq_len", model.seq_len}};
}

LstmModel lstm_from_json(const nlohmann::json& j) {
  try {
    LstmShape shape;
    shape.hidden = j.at("h").get<int>();
    shape.input = j.value("input_dim", static_cast<int>(kPoseDim));
    shape.classes = j.value("classes", 4);
    LstmModel model{LstmParams(shape), {}, j.at("seq_len").get<int>()};
    LstmParams& p = model.params;
    for (Gate g : kAllGates) {
      const auto& jg = j.at("params").at(kGateKeys[static_cast<int>(g)]);
      read_matrix(jg.at("W"), p.W(g), "W");
      read_matrix(jg.at("U"), p.U(g), "U");
      read_vector(jg.at("b"), p.b(g), "b");
    }
    read_matrix(j.at("head").at("W"), p.head_W(), "head W");
    read_vector(j.at("head").at("b"), p.head_b(), "head b");
    const auto mins = j.at("input_scale").at("min").get<std::vector<double>>();
    const auto maxs = j.at("input_scale").at("max").get<std::vector<double>>();
    if (mins.size() != 3 || maxs.size() != 3) throw DataError("model: input_scale needs 3 axes");
    std::copy(mins.begin(), mins.end(), model.scale.min.begin());
    std::copy(maxs.begin(), maxs.end(), model.scale.max.begin());
    if (model.seq_len < 1) throw DataError("model: seq_len must be positive");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model: ") + e.what());
  }
}

}  // namespace gaitemo
