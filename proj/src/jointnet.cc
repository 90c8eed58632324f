// src/jointnet.cc

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

#include "dsr/jointnet.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsr/init.h"

namespace dsr {

namespace {

void BuildNode(JointNode* node, const JointNetConfig& config,
               std::size_t input_dim, Rng* rng) {
  const bool is_se = node->task == NodeTask::kSpeechEnhancement;
  const auto& hidden = is_se ? config.se_hidden : config.sr_hidden;
  node->trunk = MlpTrunk(input_dim, hidden, Activation::kRelu,
                         config.batchnorm, config.dropout, rng);
  const std::size_t trunk_out = hidden.empty() ? input_dim : hidden.back();
  if (is_se) {
    node->head = Dense(trunk_out,
                       static_cast<std::size_t>(config.target_frames) *
                           static_cast<std::size_t>(config.feature_dim),
                       Activation::kLinear);
  } else {
    node->head = Dense(trunk_out, config.n_classes, Activation::kLogSoftmax);
    node->mono_head = Dense(trunk_out, config.n_mono, Activation::kLogSoftmax);
    InitGlorot(&node->mono_head.weights(), rng);
  }
  InitGlorot(&node->head.weights(), rng);
}

std::string NodeName(const JointNode& node, std::size_t index) {
  const char* task =
      node.task == NodeTask::kSpeechEnhancement ? "se" : "sr";
  return "node" + std::to_string(index) + "." + task +
         std::to_string(node.level);
}

}  // namespace

NetworkGraph NetworkGraph::Unfold(const JointNetConfig& config, int levels,
                                  Rng* rng) {
  if (levels < 1) throw ArgumentError("Unfold: need at least one level");
  NetworkGraph graph;
  graph.config_ = config;
  graph.levels_ = levels;
  const std::size_t raw_dim =
      static_cast<std::size_t>(config.context_frames) *
      static_cast<std::size_t>(config.feature_dim);
  const std::size_t enhanced_dim =
      static_cast<std::size_t>(config.target_frames) *
      static_cast<std::size_t>(config.feature_dim);

  for (int level = 0; level < levels; ++level) {
    // one SE and one SR node per level; edges come from the other task only
    JointNode se;
    se.task = NodeTask::kSpeechEnhancement;
    se.level = level;
    se.use_raw_input = true;
    std::size_t se_in = raw_dim;
    if (level > 0) {
      se.cross_inputs.push_back(2 * (level - 1) + 1);  // previous SR
      se_in += static_cast<std::size_t>(config.n_mono);
    }
    BuildNode(&se, config, se_in, rng);
    graph.nodes_.push_back(std::move(se));

    JointNode sr;
    sr.task = NodeTask::kSpeechRecognition;
    sr.level = level;
    sr.use_raw_input = true;
    std::size_t sr_in = raw_dim;
    if (level > 0) {
      sr.cross_inputs.push_back(2 * (level - 1));  // previous SE
      sr_in += enhanced_dim;
    }
    BuildNode(&sr, config, sr_in, rng);
    graph.nodes_.push_back(std::move(sr));
  }
  return graph;
}

NetworkGraph NetworkGraph::FlatPipeline(const JointNetConfig& config,
                                        Rng* rng) {
  NetworkGraph graph;
  graph.config_ = config;
  graph.levels_ = 2;
  const std::size_t raw_dim =
      static_cast<std::size_t>(config.context_frames) *
      static_cast<std::size_t>(config.feature_dim);
  const std::size_t enhanced_dim =
      static_cast<std::size_t>(config.target_frames) *
      static_cast<std::size_t>(config.feature_dim);

  JointNode se;
  se.task = NodeTask::kSpeechEnhancement;
  se.level = 0;
  se.use_raw_input = true;
  BuildNode(&se, config, raw_dim, rng);
  graph.nodes_.push_back(std::move(se));

  JointNode sr;
  sr.task = NodeTask::kSpeechRecognition;
  sr.level = 1;
  sr.use_raw_input = false;  // fed with the enhanced features only
  sr.cross_inputs.push_back(0);
  BuildNode(&sr, config, enhanced_dim, rng);
  graph.nodes_.push_back(std::move(sr));
  return graph;
}

std::vector<std::pair<int, int>> NetworkGraph::Edges() const {
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (int p : nodes_[i].cross_inputs) {
      edges.emplace_back(p, static_cast<int>(i));
    }
  }
  return edges;
}

Matrix NetworkGraph::NodeInput(const JointNode& node, const Matrix& x) const {
  Matrix in;
  if (node.use_raw_input) in = x;
  for (int p : node.cross_inputs) {
    const JointNode& producer = nodes_[p];
    if (producer.task == node.task) {
      throw ArgumentError("NetworkGraph: same-task edge");
    }
    const Matrix& payload =
        producer.task == NodeTask::kSpeechEnhancement ? producer.output
                                                      : producer.mono_post;
    in = ConcatCols(in, payload);
  }
  return in;
}

void NetworkGraph::Forward(const Matrix& x, RunMode mode, Rng* rng) {
  last_input_ = x;
  for (auto& node : nodes_) {
    const Matrix in = NodeInput(node, x);
    const Matrix trunk_out =
        node.trunk.Forward(in, mode == RunMode::kTrain, rng);
    node.output = node.head.Forward(trunk_out);
    if (node.task == NodeTask::kSpeechRecognition) {
      node.mono_logp = node.mono_head.Forward(trunk_out);
      node.mono_post = node.mono_logp;
      for (double& v : node.mono_post.values()) v = std::exp(v);
    }
  }
}

JointLosses NetworkGraph::ComputeLosses(const Matrix& clean_targets,
                                        const std::vector<int>& labels,
                                        const std::vector<int>& mono_labels) {
  JointLosses losses;
  losses.per_node.resize(nodes_.size(), 0.0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    JointNode& node = nodes_[i];
    if (node.task == NodeTask::kSpeechEnhancement) {
      const double mse = MseLoss(node.output, clean_targets).value;
      losses.per_node[i] = mse;
      losses.se_total += mse;
    } else {
      const double nll = NllLoss(node.output, labels).value;
      const double mono =
          config_.mono_weight * NllLoss(node.mono_logp, mono_labels).value;
      losses.per_node[i] = nll + mono;
      losses.sr_total += nll + mono;
    }
    losses.total += losses.per_node[i];
  }
  return losses;
}

JointLosses NetworkGraph::BackpropThroughNetwork(
    const Matrix& clean_targets, const std::vector<int>& labels,
    const std::vector<int>& mono_labels, double lambda) {
  if (lambda < 0.0) throw ArgumentError("BackpropThroughNetwork: lambda < 0");
  JointLosses losses = ComputeLosses(clean_targets, labels, mono_labels);

  // Two sweeps keyed on the loss origin task. Each sweep seeds only that
  // task's losses and descends the unfolded DAG in reverse level order; the
  // resulting per-parameter gradients are then combined as
  //   theta_SE: g_from_SE + lambda * g_from_SR
  //   theta_SR: g_from_SE + g_from_SR
  auto sweep = [&](NodeTask origin) {
    for (auto& node : nodes_) {
      node.d_output = Matrix(node.output.rows(), node.output.cols());
      if (node.task == NodeTask::kSpeechRecognition) {
        node.d_mono_logp = Matrix(node.mono_logp.rows(), node.mono_logp.cols());
      }
    }
    for (auto& node : nodes_) {
      if (node.task != origin) continue;
      if (node.task == NodeTask::kSpeechEnhancement) {
        node.d_output += MseLoss(node.output, clean_targets).grad;
      } else {
        node.d_output += NllLoss(node.output, labels).grad;
        Matrix mono_grad = NllLoss(node.mono_logp, mono_labels).grad;
        mono_grad *= config_.mono_weight;
        node.d_mono_logp += mono_grad;
      }
    }
    // reverse traversal of the DAG
    for (std::size_t i = nodes_.size(); i-- > 0;) {
      JointNode& node = nodes_[i];
      Matrix d_trunk = node.head.Backward(node.d_output);
      if (node.task == NodeTask::kSpeechRecognition) {
        d_trunk += node.mono_head.Backward(node.d_mono_logp);
      }
      const Matrix d_in = node.trunk.Backward(d_trunk);
      std::size_t offset = node.use_raw_input ? last_input_.cols() : 0;
      for (int p : node.cross_inputs) {
        JointNode& producer = nodes_[p];
        if (producer.task == NodeTask::kSpeechEnhancement) {
          const std::size_t width = producer.output.cols();
          producer.d_output += SliceCols(d_in, offset, width);
          offset += width;
        } else {
          const std::size_t width = producer.mono_post.cols();
          const Matrix d_post = SliceCols(d_in, offset, width);
          // payload = exp(mono log-probs)
          producer.d_mono_logp += Hadamard(d_post, producer.mono_post);
          offset += width;
        }
      }
    }
  };

  ZeroGrad();
  sweep(NodeTask::kSpeechEnhancement);
  std::vector<std::vector<double>> se_origin;
  {
    ParamSet params = Params();
    se_origin.resize(params.size());
    for (std::size_t p = 0; p < params.size(); ++p) {
      se_origin[p].assign(params[p].grad, params[p].grad + params[p].size);
    }
  }
  ZeroGrad();
  sweep(NodeTask::kSpeechRecognition);

  // combine: walk per node so the per-parameter scale is known
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    ParamSet node_params = NodeParams(i);
    const double scale =
        nodes_[i].task == NodeTask::kSpeechEnhancement ? lambda : 1.0;
    for (std::size_t p = 0; p < node_params.size(); ++p, ++cursor) {
      for (std::size_t k = 0; k < node_params[p].size; ++k) {
        node_params[p].grad[k] =
            se_origin[cursor][k] + scale * node_params[p].grad[k];
      }
    }
  }
  return losses;
}

void NetworkGraph::ZeroGrad() {
  for (auto& node : nodes_) {
    node.trunk.ZeroGrad();
    node.head.ZeroGrad();
    if (node.task == NodeTask::kSpeechRecognition) node.mono_head.ZeroGrad();
  }
}

ParamSet NetworkGraph::Params() {
  ParamSet out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    ParamSet node_params = NodeParams(i);
    out.insert(out.end(), node_params.begin(), node_params.end());
  }
  return out;
}

ParamSet NetworkGraph::NodeParams(std::size_t i) {
  ParamSet out;
  JointNode& node = nodes_[i];
  const std::string name = NodeName(node, i);
  node.trunk.CollectParams(name, &out);
  node.head.CollectParams(name + ".head", &out);
  if (node.task == NodeTask::kSpeechRecognition) {
    node.mono_head.CollectParams(name + ".mono", &out);
  }
  return out;
}

std::vector<std::pair<int, double>> NetworkGraph::EvaluateLevels(
    const Matrix& x, const std::vector<int>& labels) {
  Forward(x, RunMode::kInference, nullptr);
  std::vector<std::pair<int, double>> out;
  for (const auto& node : nodes_) {
    if (node.task == NodeTask::kSpeechRecognition) {
      out.emplace_back(node.level, FrameAccuracy(node.output, labels));
    }
  }
  return out;
}

FlatJointPipeline MakeFlatJointPipeline(const JointNetConfig& config,
                                        Rng* rng) {
  FlatJointPipeline p;
  MlpConfig se;
  se.in_dim = static_cast<std::size_t>(config.context_frames) *
              static_cast<std::size_t>(config.feature_dim);
  se.out_dim = static_cast<std::size_t>(config.target_frames) *
               static_cast<std::size_t>(config.feature_dim);
  se.hidden = config.se_hidden;
  se.hidden_act = Activation::kRelu;
  se.output_act = Activation::kLinear;
  se.batchnorm = config.batchnorm;
  se.dropout = config.dropout;
  p.se = Mlp(se, rng);

  MlpConfig sr;
  sr.in_dim = se.out_dim;
  sr.out_dim = config.n_classes;
  sr.hidden = config.sr_hidden;
  sr.hidden_act = Activation::kRelu;
  sr.output_act = Activation::kLogSoftmax;
  sr.batchnorm = config.batchnorm;
  sr.dropout = config.dropout;
  p.sr = Mlp(sr, rng);
  return p;
}

JointStepResult JointTrainStep(FlatJointPipeline* pipeline, const Matrix& x,
                               const Matrix& clean_targets,
                               const std::vector<int>& labels, double lambda,
                               double lr) {
  if (lambda < 0.0) throw ArgumentError("JointTrainStep: lambda < 0");
  JointStepResult result;
  result.enhanced = pipeline->se.Forward(x, /*train=*/true, nullptr);
  result.log_probs = pipeline->sr.Forward(result.enhanced, /*train=*/true,
                                          nullptr);

  // g_SE: enhancement loss into the enhancement parameters
  pipeline->se.ZeroGrad();
  LossGrad mse = MseLoss(result.enhanced, clean_targets);
  result.mse = mse.value;
  pipeline->se.Backward(mse.grad);
  ParamSet se_params = pipeline->se.Params();
  std::vector<std::vector<double>> g_se(se_params.size());
  for (std::size_t p = 0; p < se_params.size(); ++p) {
    g_se[p].assign(se_params[p].grad, se_params[p].grad + se_params[p].size);
  }

  // g_SR: recognition loss back-propagated through both networks
  pipeline->se.ZeroGrad();
  pipeline->sr.ZeroGrad();
  LossGrad nll = NllLoss(result.log_probs, labels);
  result.nll = nll.value;
  const Matrix d_enhanced = pipeline->sr.Backward(nll.grad);
  pipeline->se.Backward(d_enhanced);

  // theta_SR <- theta_SR - lr g_SR
  for (const auto& view : pipeline->sr.Params()) {
    for (std::size_t k = 0; k < view.size; ++k) {
      view.value[k] -= lr * view.grad[k];
    }
  }
  // theta_SE <- theta_SE - lr (g_SE + lambda g_SR)
  for (std::size_t p = 0; p < se_params.size(); ++p) {
    const auto& view = se_params[p];
    for (std::size_t k = 0; k < view.size; ++k) {
      view.value[k] -= lr * (g_se[p][k] + lambda * view.grad[k]);
    }
  }
  return result;
}

MultitaskBaseline::MultitaskBaseline(const JointNetConfig& config, Rng* rng) {
  const std::size_t raw_dim =
      static_cast<std::size_t>(config.context_frames) *
      static_cast<std::size_t>(config.feature_dim);
  const std::size_t enhanced_dim =
      static_cast<std::size_t>(config.target_frames) *
      static_cast<std::size_t>(config.feature_dim);
  // the first half of the hidden layers is shared across the tasks
  const auto& hidden = config.se_hidden;
  const std::size_t half = hidden.size() / 2;
  std::vector<std::size_t> shared(hidden.begin(), hidden.begin() + half);
  std::vector<std::size_t> priv(hidden.begin() + half, hidden.end());

  shared_ = MlpTrunk(raw_dim, shared, Activation::kRelu, config.batchnorm,
                     config.dropout, rng);
  const std::size_t shared_out = shared.empty() ? raw_dim : shared.back();
  se_branch_ = MlpTrunk(shared_out, priv, Activation::kRelu, config.batchnorm,
                        config.dropout, rng);
  sr_branch_ = MlpTrunk(shared_out, priv, Activation::kRelu, config.batchnorm,
                        config.dropout, rng);
  const std::size_t branch_out = priv.empty() ? shared_out : priv.back();
  se_head_ = Dense(branch_out, enhanced_dim, Activation::kLinear);
  sr_head_ = Dense(branch_out, config.n_classes, Activation::kLogSoftmax);
  InitGlorot(&se_head_.weights(), rng);
  InitGlorot(&sr_head_.weights(), rng);
}

void MultitaskBaseline::Forward(const Matrix& x, RunMode mode, Rng* rng) {
  const bool train = mode == RunMode::kTrain;
  shared_out_ = shared_.Forward(x, train, rng);
  se_out_ = se_head_.Forward(se_branch_.Forward(shared_out_, train, rng));
  sr_out_ = sr_head_.Forward(sr_branch_.Forward(shared_out_, train, rng));
}

JointLosses MultitaskBaseline::Backward(const Matrix& clean_targets,
                                        const std::vector<int>& labels,
                                        double se_weight, double sr_weight) {
  JointLosses losses;
  LossGrad mse = MseLoss(se_out_, clean_targets);
  LossGrad nll = NllLoss(sr_out_, labels);
  losses.se_total = mse.value;
  losses.sr_total = nll.value;
  losses.total = se_weight * mse.value + sr_weight * nll.value;
  losses.per_node = {mse.value, nll.value};

  Matrix d_shared(shared_out_.rows(), shared_out_.cols());
  if (se_weight != 0.0) {
    mse.grad *= se_weight;
    d_shared += se_branch_.Backward(se_head_.Backward(mse.grad));
  }
  if (sr_weight != 0.0) {
    nll.grad *= sr_weight;
    d_shared += sr_branch_.Backward(sr_head_.Backward(nll.grad));
  }
  shared_.Backward(d_shared);
  return losses;
}

void MultitaskBaseline::ZeroGrad() {
  shared_.ZeroGrad();
  se_branch_.ZeroGrad();
  sr_branch_.ZeroGrad();
  se_head_.ZeroGrad();
  sr_head_.ZeroGrad();
}

ParamSet MultitaskBaseline::Params() {
  ParamSet out;
  shared_.CollectParams("mt.shared", &out);
  se_branch_.CollectParams("mt.se", &out);
  sr_branch_.CollectParams("mt.sr", &out);
  se_head_.CollectParams("mt.se.head", &out);
  sr_head_.CollectParams("mt.sr.head", &out);
  return out;
}

ParamSet MultitaskBaseline::SharedParams() {
  ParamSet out;
  shared_.CollectParams("mt.shared", &out);
  return out;
}

JointTrainResult TrainJointNetwork(NetworkGraph* graph,
                                   const JointDataset& train,
                                   const JointDataset& dev,
                                   const JointTrainerConfig& config) {
  const std::size_t n = train.noisy_context.rows();
  if (n == 0) throw ArgumentError("TrainJointNetwork: empty dataset");
  Rng rng = MakeRng(config.seed);
  double lr = config.lr;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  auto dev_accuracy = [&]() {
    auto levels = graph->EvaluateLevels(dev.noisy_context, dev.labels);
    return levels.back().second;  // the top-level recognizer is decoded
  };

  JointTrainResult result;
  double prev_metric = 0.0;
  bool have_prev = false;
  bool halving = false;
  int stall = 0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double train_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t b = std::min(config.batch_size, n - start);
      Matrix bx(b, train.noisy_context.cols());
      Matrix bt(b, train.clean_targets.cols());
      std::vector<int> bl(b), bm(b);
      for (std::size_t i = 0; i < b; ++i) {
        const std::size_t src = order[start + i];
        for (std::size_t j = 0; j < bx.cols(); ++j) {
          bx(i, j) = train.noisy_context(src, j);
        }
        for (std::size_t j = 0; j < bt.cols(); ++j) {
          bt(i, j) = train.clean_targets(src, j);
        }
        bl[i] = train.labels[src];
        bm[i] = train.mono[src];
      }
      graph->Forward(bx, RunMode::kTrain, &rng);
      JointLosses losses = graph->BackpropThroughNetwork(
          bt, bl, bm, graph->config().lambda);
      for (const auto& view : graph->Params()) {
        for (std::size_t k = 0; k < view.size; ++k) {
          view.value[k] -= lr * view.grad[k];
        }
      }
      train_loss += losses.total;
      ++batches;
    }

    const double metric = dev_accuracy();
    EpochLog log;
    log.epoch = epoch;
    log.train_loss = train_loss / static_cast<double>(batches);
    log.dev_metric = metric;
    log.lr = lr;
    const double improvement = have_prev ? metric - prev_metric : 1.0;
    prev_metric = metric;
    have_prev = true;
    if (halving || improvement < config.improve_threshold) {
      halving = true;
      lr /= 2.0;
      log.halved = true;
    }
    stall = improvement < config.stop_threshold ? stall + 1 : 0;
    result.epochs.push_back(log);
    if (stall > config.patience) break;
  }
  result.final_level_accuracy =
      graph->EvaluateLevels(dev.noisy_context, dev.labels);
  return result;
}

}  // namespace dsr
