// dsr/jointnet.h

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

#ifndef DSR_JOINTNET_H_
#define DSR_JOINTNET_H_

#include <string>
#include <vector>

#include "dsr/mlp.h"
#include "dsr/synthetic.h"

namespace dsr {

enum class NodeTask {
  kSpeechEnhancement,
  kSpeechRecognition,
};

struct JointNetConfig {
  int feature_dim = 8;
  int context_frames = 21;  // noisy frames stacked at the SE input
  int target_frames = 11;   // enhanced frames predicted by each SE node
  int n_classes = 6;        // context-dependent targets
  int n_mono = 3;           // auxiliary monophone targets
  std::vector<std::size_t> se_hidden = {32, 32};
  std::vector<std::size_t> sr_hidden = {32, 32};
  double lambda = 0.1;      // weight of recognition gradients inside SE
  double mono_weight = 0.5; // auxiliary monophone loss weight
  bool batchnorm = true;
  double dropout = 0.0;
};

// One DNN of the unfolded network. SE nodes regress target_frames of clean
// features; SR nodes classify the frame and expose an auxiliary monophone
// softmax whose posteriors are the compact message passed to higher SE
// nodes.
struct JointNode {
  NodeTask task = NodeTask::kSpeechEnhancement;
  int level = 0;
  bool use_raw_input = true;
  std::vector<int> cross_inputs;  // producer node ids, other task, level-1

  MlpTrunk trunk;
  Dense head{1, 1};       // SE: linear regression; SR: log-softmax
  Dense mono_head{1, 1};  // SR only

  // forward caches
  Matrix output;     // SE: enhanced features; SR: class log-probs
  Matrix mono_logp;  // SR only
  Matrix mono_post;  // SR only: exp(mono_logp), the cross payload
  // backward accumulators
  Matrix d_output;
  Matrix d_mono_logp;
};

struct JointLosses {
  std::vector<double> per_node;  // C_{i,l}
  double total = 0.0;
  double se_total = 0.0;
  double sr_total = 0.0;
};

// The unfolded network of DNNs. Nodes live on levels 0..L-1; level-0 nodes
// consume the raw input only, level-l nodes consume the raw input plus the
// outputs of the other task's level-(l-1) nodes. The same machinery also
// hosts the two-node flat chain equivalent to the classic joint-training
// pipeline (speech enhancement feeding speech recognition directly).
class NetworkGraph {
 public:
  // Standard unfolding: one SE and one SR node per level, L >= 1.
  static NetworkGraph Unfold(const JointNetConfig& config, int levels,
                             Rng* rng);
  // SE at level 0 fed with the raw input; SR at level 1 fed with the
  // enhanced features only.
  static NetworkGraph FlatPipeline(const JointNetConfig& config, Rng* rng);

  const JointNetConfig& config() const { return config_; }
  int levels() const { return levels_; }
  std::size_t n_nodes() const { return nodes_.size(); }
  JointNode& node(std::size_t i) { return nodes_[i]; }
  const JointNode& node(std::size_t i) const { return nodes_[i]; }
  // directed edges (producer, consumer)
  std::vector<std::pair<int, int>> Edges() const;

  // Evaluates every node in topological (level) order.
  void Forward(const Matrix& x, RunMode mode, Rng* rng);

  JointLosses ComputeLosses(const Matrix& clean_targets,
                            const std::vector<int>& labels,
                            const std::vector<int>& mono_labels);

  // Back-propagation through network: the gradient of every node parameter
  // is its local cost term plus all higher-level contributions. Gradients
  // originating in SR losses are scaled by lambda wherever they land in SE
  // parameters; every other combination is unscaled. Forward() must have
  // run on the same batch.
  JointLosses BackpropThroughNetwork(const Matrix& clean_targets,
                                     const std::vector<int>& labels,
                                     const std::vector<int>& mono_labels,
                                     double lambda);

  void ZeroGrad();
  ParamSet Params();
  ParamSet NodeParams(std::size_t i);

  // Frame accuracy of each SR node, keyed by level.
  std::vector<std::pair<int, double>> EvaluateLevels(
      const Matrix& x, const std::vector<int>& labels);

 private:
  Matrix NodeInput(const JointNode& node, const Matrix& x) const;

  JointNetConfig config_;
  int levels_ = 0;
  std::vector<JointNode> nodes_;
  Matrix last_input_;
};

// The flat Alg.-1 pipeline, written directly (independent of NetworkGraph):
// theta_SE <- theta_SE - lr (g_SE + lambda g_SR); theta_SR <- theta_SR -
// lr g_SR, with g_SR back-propagated through the enhancement network.
struct FlatJointPipeline {
  Mlp se;
  Mlp sr;
};

FlatJointPipeline MakeFlatJointPipeline(const JointNetConfig& config, Rng* rng);

struct JointStepResult {
  double mse = 0.0;
  double nll = 0.0;
  Matrix enhanced;
  Matrix log_probs;
};

JointStepResult JointTrainStep(FlatJointPipeline* pipeline, const Matrix& x,
                               const Matrix& clean_targets,
                               const std::vector<int>& labels, double lambda,
                               double lr);

// Multi-task baseline: the first half of the hidden layers is shared, the
// second half is task-specific, and the two losses are summed.
class MultitaskBaseline {
 public:
  MultitaskBaseline(const JointNetConfig& config, Rng* rng);

  void Forward(const Matrix& x, RunMode mode, Rng* rng);
  // weights: (se_weight, sr_weight) let tests detach one head
  JointLosses Backward(const Matrix& clean_targets,
                       const std::vector<int>& labels, double se_weight,
                       double sr_weight);
  void ZeroGrad();
  ParamSet Params();
  ParamSet SharedParams();

  const Matrix& enhanced() const { return se_out_; }
  const Matrix& log_probs() const { return sr_out_; }

 private:
  MlpTrunk shared_, se_branch_, sr_branch_;
  Dense se_head_{1, 1}, sr_head_{1, 1};
  Matrix shared_out_, se_out_, sr_out_;
};

struct JointTrainerConfig {
  double lr = 0.08;
  std::size_t batch_size = 128;
  int max_epochs = 30;
  double improve_threshold = 0.005;  // halve below this dev-accuracy gain
  double stop_threshold = 0.001;     // patience counts epochs below this
  int patience = 4;
  std::uint64_t seed = 0;
};

struct JointTrainResult {
  std::vector<EpochLog> epochs;  // dev metric is the top-level SR accuracy
  std::vector<std::pair<int, double>> final_level_accuracy;
};

JointTrainResult TrainJointNetwork(NetworkGraph* graph,
                                   const JointDataset& train,
                                   const JointDataset& dev,
                                   const JointTrainerConfig& config);

}  // namespace dsr

#endif  // DSR_JOINTNET_H_
