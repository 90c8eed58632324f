// dsr/rnn.h

// Copyright 2026  dsrlab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DSR_RNN_H_
#define DSR_RNN_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dsr/layers.h"
#include "dsr/mlp.h"
#include "dsr/optim.h"
#include "dsr/synthetic.h"

namespace dsr {

// Time-major sequence: one batch x dim matrix per step.
using Seq = std::vector<Matrix>;

enum class CellKind {
  kVanillaRelu,
  kGru,
  kMGru,
  kLiGru,
};

enum class RunMode {
  kTrain,
  kInference,
};

struct ParamCounts {
  std::size_t weights = 0;  // W and U blocks
  std::size_t biases = 0;
  std::size_t bn = 0;  // gamma/beta pairs

  std::size_t total() const { return weights + biases + bn; }
};

// One recurrent layer processed over a whole sequence with full-length BPTT.
// h_0 is the zero vector. Backward consumes per-step output gradients,
// returns per-step input gradients, accumulates parameter gradients, and
// leaves the gradient w.r.t. the initial state in initial_state_grad().
class RecurrentCell {
 public:
  virtual ~RecurrentCell() = default;
  virtual Seq Forward(const Seq& x, RunMode mode) = 0;
  virtual Seq Backward(const Seq& dh) = 0;
  virtual void ZeroGrad() = 0;
  virtual void CollectParams(const std::string& prefix, ParamSet* out) = 0;
  virtual std::size_t in_dim() const = 0;
  virtual std::size_t out_dim() const = 0;
  virtual CellKind kind() const = 0;
  virtual ParamCounts CountParams() const = 0;
  virtual std::unique_ptr<RecurrentCell> Clone() const = 0;

  const Matrix& initial_state_grad() const { return dh0_; }

 protected:
  Matrix dh0_;
};

// h_t = ReLU(W x_t + U h_{t-1} + b)
class VanillaReluCell : public RecurrentCell {
 public:
  VanillaReluCell(std::size_t in_dim, std::size_t hidden, Rng* rng);

  Seq Forward(const Seq& x, RunMode mode) override;
  Seq Backward(const Seq& dh) override;
  void ZeroGrad() override;
  void CollectParams(const std::string& prefix, ParamSet* out) override;
  std::size_t in_dim() const override { return w_.cols(); }
  std::size_t out_dim() const override { return w_.rows(); }
  CellKind kind() const override { return CellKind::kVanillaRelu; }
  ParamCounts CountParams() const override;
  std::unique_ptr<RecurrentCell> Clone() const override;

  Matrix w_, u_;
  std::vector<double> b_;
  Matrix gw_, gu_;
  std::vector<double> gb_;

 private:
  Seq x_, h_;
};

// z = sigmoid(Wz x + Uz h + bz); r = sigmoid(Wr x + Ur h + br)
// hc = tanh(Wh x + Uh (h . r) + bh); h' = z . h + (1-z) . hc
class GruCell : public RecurrentCell {
 public:
  GruCell(std::size_t in_dim, std::size_t hidden, Rng* rng);

  Seq Forward(const Seq& x, RunMode mode) override;
  Seq Backward(const Seq& dh) override;
  void ZeroGrad() override;
  void CollectParams(const std::string& prefix, ParamSet* out) override;
  std::size_t in_dim() const override { return wz_.cols(); }
  std::size_t out_dim() const override { return wz_.rows(); }
  CellKind kind() const override { return CellKind::kGru; }
  ParamCounts CountParams() const override;
  std::unique_ptr<RecurrentCell> Clone() const override;

  // gates cached by the last Forward, one matrix per step
  const Seq& update_gates() const { return z_; }
  const Seq& reset_gates() const { return r_; }

  Matrix wz_, wr_, wh_, uz_, ur_, uh_;
  std::vector<double> bz_, br_, bh_;
  Matrix gwz_, gwr_, gwh_, guz_, gur_, guh_;
  std::vector<double> gbz_, gbr_, gbh_;

 private:
  Seq x_, h_, z_, r_, hc_, hr_;
};

// GRU without the reset gate: hc = tanh(Wh x + Uh h + bh).
class MGruCell : public RecurrentCell {
 public:
  MGruCell(std::size_t in_dim, std::size_t hidden, Rng* rng);

  Seq Forward(const Seq& x, RunMode mode) override;
  Seq Backward(const Seq& dh) override;
  void ZeroGrad() override;
  void CollectParams(const std::string& prefix, ParamSet* out) override;
  std::size_t in_dim() const override { return wz_.cols(); }
  std::size_t out_dim() const override { return wz_.rows(); }
  CellKind kind() const override { return CellKind::kMGru; }
  ParamCounts CountParams() const override;
  std::unique_ptr<RecurrentCell> Clone() const override;

  const Seq& update_gates() const { return z_; }

  Matrix wz_, wh_, uz_, uh_;
  std::vector<double> bz_, bh_;
  Matrix gwz_, gwh_, guz_, guh_;
  std::vector<double> gbz_, gbh_;

 private:
  Seq x_, h_, z_, hc_;
};

// z = sigmoid(BN(Wz x) + Uz h); hc = ReLU(BN(Wh x) + Uh h)
// h' = z . h + (1-z) . hc
// Batch normalization covers the feed-forward pre-activations only, with
// statistics pooled over batch x time so W x can be precomputed for the
// whole sequence. The beta shifts make separate biases redundant.
class LiGruCell : public RecurrentCell {
 public:
  LiGruCell(std::size_t in_dim, std::size_t hidden, Rng* rng);

  Seq Forward(const Seq& x, RunMode mode) override;
  Seq Backward(const Seq& dh) override;
  void ZeroGrad() override;
  void CollectParams(const std::string& prefix, ParamSet* out) override;
  std::size_t in_dim() const override { return wz_.cols(); }
  std::size_t out_dim() const override { return wz_.rows(); }
  CellKind kind() const override { return CellKind::kLiGru; }
  ParamCounts CountParams() const override;
  std::unique_ptr<RecurrentCell> Clone() const override;

  const Seq& update_gates() const { return z_; }
  // hidden-state clamps at |h| = 1e6; stays zero whenever BN is active
  std::size_t clamp_count() const { return clamp_count_; }

  Matrix wz_, wh_, uz_, uh_;
  BatchNorm bn_z_, bn_h_;
  Matrix gwz_, gwh_, guz_, guh_;

 private:
  Seq x_, h_, z_, hc_;
  std::vector<char> clamped_;  // per step flag, only set when a clamp fired
  Seq clamp_mask_;
  std::size_t clamp_count_ = 0;
};

// Wraps two cells over opposite time directions; outputs are the
// concatenation of the forward states with the time-reversed backward states.
class BidirectionalCell : public RecurrentCell {
 public:
  BidirectionalCell(std::unique_ptr<RecurrentCell> forward,
                    std::unique_ptr<RecurrentCell> backward);

  Seq Forward(const Seq& x, RunMode mode) override;
  Seq Backward(const Seq& dh) override;
  void ZeroGrad() override;
  void CollectParams(const std::string& prefix, ParamSet* out) override;
  std::size_t in_dim() const override { return fwd_->in_dim(); }
  std::size_t out_dim() const override {
    return fwd_->out_dim() + bwd_->out_dim();
  }
  CellKind kind() const override { return fwd_->kind(); }
  ParamCounts CountParams() const override;
  std::unique_ptr<RecurrentCell> Clone() const override;

  RecurrentCell& forward_cell() { return *fwd_; }
  RecurrentCell& backward_cell() { return *bwd_; }

 private:
  std::unique_ptr<RecurrentCell> fwd_, bwd_;
};

// Single-step functions: the recurrence math of each cell applied to one
// batch of inputs with an explicit previous state.
struct GruStepResult {
  Matrix h, z, r, candidate;
};
GruStepResult GruStep(const GruCell& cell, const Matrix& x_t,
                      const Matrix& h_prev);

struct MGruStepResult {
  Matrix h, z, candidate;
};
MGruStepResult MGruStep(const MGruCell& cell, const Matrix& x_t,
                        const Matrix& h_prev);

// Train-mode BN here uses the statistics of this single step's batch, so it
// needs batch >= 2; the sequence path instead pools over batch x time.
struct LiGruStepResult {
  Matrix h, z, candidate;
};
LiGruStepResult LiGruStep(LiGruCell* cell, const Matrix& x_t,
                          const Matrix& h_prev, bool bn_train);

struct RnnLayerSpec {
  CellKind kind = CellKind::kLiGru;
  std::size_t hidden = 32;
  bool bidirectional = false;
};

struct RnnStackConfig {
  std::size_t in_dim = 0;
  std::vector<RnnLayerSpec> layers;
  double dropout = 0.0;  // between layers, one mask shared across time
};

// Stacked recurrent layers with shared-time dropout masks between layers.
class RnnStack {
 public:
  RnnStack() = default;
  RnnStack(const RnnStackConfig& config, Rng* rng);
  RnnStack(const RnnStack& other);
  RnnStack& operator=(const RnnStack& other);

  Seq Forward(const Seq& x, RunMode mode, Rng* rng);
  Seq Backward(const Seq& dh);
  void ZeroGrad();
  void CollectParams(const std::string& prefix, ParamSet* out);
  ParamCounts CountParams() const;

  std::size_t out_dim() const;
  std::size_t n_layers() const { return cells_.size(); }
  RecurrentCell& layer(std::size_t i) { return *cells_[i]; }
  const RnnStackConfig& config() const { return config_; }

  // masks used by the last train-mode Forward, one per layer
  const std::vector<Matrix>& last_dropout_masks() const { return masks_; }

 private:
  RnnStackConfig config_;
  std::vector<std::unique_ptr<RecurrentCell>> cells_;
  std::vector<Dropout> drops_;
  std::vector<Matrix> masks_;
  std::vector<Seq> drop_in_;
};

// Evaluates the stack over one sequence. Throws on an empty sequence.
Seq RunSequence(RnnStack* stack, const Seq& inputs, RunMode mode,
                Rng* rng = nullptr);

// Recurrent frame classifier: stack plus a log-softmax head. Training uses
// Adam, minibatches of whole sentences with gradient accumulation, ascending
// length sorting and the dev-driven halving schedule.
class RnnClassifier {
 public:
  RnnClassifier() = default;
  RnnClassifier(const RnnStackConfig& stack_config, std::size_t n_classes,
                Rng* rng);

  // log-probabilities per step, batch 1 rows per utterance
  Seq Forward(const Seq& x, RunMode mode, Rng* rng);
  void Backward(const Seq& dlogp);
  void ZeroGrad();
  ParamSet Params();

  RnnStack& stack() { return stack_; }
  Dense& head() { return head_; }

 private:
  RnnStack stack_;
  Dense head_{1, 1};
  Seq head_in_;
};

struct RnnTrainConfig {
  OptimizerConfig optimizer;   // Adam lr 0.0013 by default
  LrSchedule schedule;
  int max_epochs = 22;
  std::size_t batch_sentences = 8;
  bool sort_ascending = true;
  double grad_clip = 0.0;  // global norm; 0 disables
  std::uint64_t seed = 0;
};

RnnTrainConfig DefaultRnnTrainConfig();

TrainResult TrainRnnClassifier(RnnClassifier* model,
                               const SequenceDataset& train,
                               const SequenceDataset& dev,
                               const RnnTrainConfig& config);

double EvaluateRnnClassifier(RnnClassifier* model, const SequenceDataset& data);

// Cross-correlation of the average update/reset gate activations, averaged
// over utterances, both series normalized by the maximum of C(z,z).
struct GateCorrelation {
  long max_lag = 0;
  std::vector<double> czr;  // index i -> lag i - max_lag
  std::vector<double> czz;
};

GateCorrelation GateCorrelationFromSeries(
    const std::vector<std::vector<double>>& z_series,
    const std::vector<std::vector<double>>& r_series, long max_lag);

// Runs the classifier's first GRU layer over the dataset and correlates its
// mean gate activations.
GateCorrelation ComputeGateCorrelation(RnnClassifier* model,
                                       const SequenceDataset& data,
                                       long max_lag);

// L2 norm of each parameter matrix gradient, accumulated per sentence and
// averaged over all sentences (and epochs, by passing the dataset multiple
// times upstream).
std::map<std::string, double> GradNormStats(RnnClassifier* model,
                                            const SequenceDataset& data);

}  // namespace dsr

#endif  // DSR_RNN_H_
