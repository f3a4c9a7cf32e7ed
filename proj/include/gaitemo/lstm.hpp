#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "gaitemo/gait.hpp"

namespace gaitemo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Rows are time steps, columns are input coordinates.
using Sequence = Eigen::MatrixXd;

struct LstmShape {
  int input = static_cast<int>(kPoseDim);
  int hidden = 32;
  int classes = 4;

  bool operator==(const LstmShape&) const = default;
};

enum class Gate : int { Input = 0, Output = 1, Forget = 2, Cell = 3 };
inline constexpr std::array<Gate, 4> kAllGates = {Gate::Input, Gate::Output, Gate::Forget,
                                                  Gate::Cell};

/// All trainable parameters in one flat vector. For each gate (input,
/// output, forget, cell candidate): W (hidden x input), U (hidden x hidden),
/// b (hidden); then the classifier head W (classes x hidden), b (classes).
/// Matrices are stored column-major.
class LstmParams {
 public:
  explicit LstmParams(LstmShape shape = {});

  const LstmShape& shape() const noexcept { return shape_; }

  Eigen::Map<MatrixXd> W(Gate g);
  Eigen::Map<const MatrixXd> W(Gate g) const;
  Eigen::Map<MatrixXd> U(Gate g);
  Eigen::Map<const MatrixXd> U(Gate g) const;
  Eigen::Map<VectorXd> b(Gate g);
  Eigen::Map<const VectorXd> b(Gate g) const;
  Eigen::Map<MatrixXd> head_W();
  Eigen::Map<const MatrixXd> head_W() const;
  Eigen::Map<VectorXd> head_b();
  Eigen::Map<const VectorXd> head_b() const;

  VectorXd& flat() noexcept { return flat_; }
  const VectorXd& flat() const noexcept { return flat_; }

  /// True for entries belonging to a weight matrix (decayed during training),
  /// false for biases.
  std::vector<bool> weight_mask() const;

  static Eigen::Index size_for(const LstmShape& shape);

 private:
  Eigen::Index gate_offset(Gate g) const;
  Eigen::Index head_offset() const;

  LstmShape shape_;
  VectorXd flat_;
};

struct LstmState {
  VectorXd h;
  VectorXd c;

  static LstmState zero(int hidden) {
    return {VectorXd::Zero(hidden), VectorXd::Zero(hidden)};
  }
};

double logistic(double x) noexcept;

/// One LSTM cell update:
///   i, o, f = logistic(W x + U h + b);  g = tanh(W_c x + U_c h + b_c)
///   c' = f * c + i * g;                 h' = o * tanh(c')
LstmState lstm_step(const LstmParams& p, const Eigen::Ref<const VectorXd>& x, const LstmState& s);

/// Intermediates kept by forward() for backpropagation through time.
struct ForwardCache {
  MatrixXd i, o, f, g, c, tanh_c, h;  // hidden x T each
};

struct ForwardResult {
  VectorXd logits;
  VectorXd deep;  // hidden state after the last step
  ForwardCache cache;
};

ForwardResult forward(const LstmParams& p, const Sequence& x);

VectorXd softmax(const VectorXd& logits);
double cross_entropy(const VectorXd& logits, int label);

struct Gradient {
  double loss = 0.0;  // mean over the batch
  VectorXd grad;      // same layout as LstmParams::flat()
};

/// Exact gradient of the mean cross-entropy over a batch.
Gradient backprop(const LstmParams& p, std::span<const Sequence> batch, std::span<const int> labels);

/// Gradient of cross_entropy(forward(x), label) with respect to x.
MatrixXd input_gradient(const LstmParams& p, const Sequence& x, int label);

/// Per-axis min/max used to scale root-normalized coordinates into [0, 1].
struct InputScale {
  std::array<double, 3> min{0.0, 0.0, 0.0};
  std::array<double, 3> max{1.0, 1.0, 1.0};

  bool operator==(const InputScale&) const = default;
};

struct LstmModel {
  LstmParams params;
  InputScale scale;
  int seq_len = 48;
};

struct TrainConfig {
  int batch_size = 8;
  int epochs = 500;
  // Epoch -> learning rate. Starting at 0.1 with Adam leaves most seeds stuck
  // at chance on the synthetic corpus, so the default starts at 0.01.
  std::map<int, double> lr_schedule{{0, 0.01}, {250, 0.001}, {375, 0.0001}, {438, 0.00001}};
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 5e-4;
  std::uint64_t rng_seed = 0;
  int hidden = 32;
  int seq_len = 48;

  /// Learning rate in effect at `epoch` (last schedule entry <= epoch).
  double lr_at(int epoch) const;
  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& cfg);
void from_json(const nlohmann::json& j, TrainConfig& cfg);

/// Uniform(-1/sqrt(H), 1/sqrt(H)) weights, zero biases, forget bias 1.
LstmParams init_params(const LstmShape& shape, std::uint64_t seed);

InputScale fit_input_scale(std::span<const Gait> gaits);

/// Linear interpolation weights mapping `frames` input frames onto `steps`
/// output steps: row k holds (lower frame, upper frame, upper weight).
struct ResampleStep {
  std::size_t lo;
  std::size_t hi;
  double w_hi;
};
std::vector<ResampleStep> resample_plan(std::size_t frames, std::size_t steps);

/// Root-normalize, resample to model.seq_len steps and scale into [0, 1].
Sequence prepare_sequence(const LstmModel& model, const Gait& g);

struct TrainResult {
  LstmModel model;
  std::vector<double> loss_curve;  // mean training loss per epoch
};

/// Mini-batch Adam with decoupled weight decay and a step learning-rate
/// schedule. Deterministic for a given cfg.rng_seed.
TrainResult train_lstm(std::span<const Gait> gaits, std::span<const int> labels,
                       const TrainConfig& cfg);

/// Same optimizer over already-prepared sequences.
std::vector<double> train_sequences(LstmParams& params, std::span<const Sequence> seqs,
                                    std::span<const int> labels, const TrainConfig& cfg);

/// Hidden state after the last step for the prepared gait.
VectorXd deep_features(const LstmModel& model, const Gait& g);

/// Per-frame, per-joint saliency in [0, 1] (frames x 16): norm of the loss
/// gradient (w.r.t. the predicted class) over each joint's three scaled
/// coordinates, pulled back to the gait's own frames. Maps whose maximum
/// exceeds 1 are divided by that maximum.
MatrixXd saliency(const LstmModel& model, const Gait& g);

nlohmann::json lstm_to_json(const LstmModel& model);
LstmModel lstm_from_json(const nlohmann::json& j);

}  // namespace gaitemo
