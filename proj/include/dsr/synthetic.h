// dsr/synthetic.h

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

#ifndef DSR_SYNTHETIC_H_
#define DSR_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "dsr/audio.h"
#include "dsr/matrix.h"

namespace dsr {

// Speech-like test audio: a chain of voiced segments (pulse train through
// two random resonators), unvoiced segments (filtered noise bursts) and
// short pauses. Spectrally varied, short autocorrelation, deterministic in
// the seed.
AudioSignal SynthSpeechLike(double seconds, double sample_rate,
                            std::uint64_t seed);

// Desk-scale stand-in for a contaminated speech corpus: clean "features" are
// class-conditioned Gaussian segment sequences, noisy inputs are the clean
// stream convolved across time with a random causal FIR plus noise. Labels
// are the generating class; the monophone label is a coarse grouping.
struct JointTaskConfig {
  int n_classes = 6;
  int n_mono = 3;
  int feature_dim = 8;
  int n_frames = 2000;
  int context_frames = 21;    // noisy input context per sample
  int target_frames = 11;     // clean frames predicted per sample
  int min_segment = 6;
  int max_segment = 16;
  double within_class_std = 0.3;
  double fir_decay = 0.55;
  int fir_length = 6;
  double noise_std = 0.4;
  std::uint64_t seed = 1;
};

struct JointDataset {
  Matrix noisy_context;      // N x (context_frames * dim)
  Matrix clean_targets;      // N x (target_frames * dim)
  Matrix noisy_center;       // N x dim (for baselines/analysis)
  std::vector<int> labels;   // class per frame
  std::vector<int> mono;     // coarse label per frame
  int n_classes = 0;
  int n_mono = 0;
  int feature_dim = 0;
  int context_frames = 0;
  int target_frames = 0;
};

JointDataset MakeJointDataset(const JointTaskConfig& config);

// Sequence classification stand-in for frame-labelled utterances: each
// utterance is a time-major feature sequence plus one label per frame.
struct SequenceDataset {
  std::vector<std::vector<Matrix>> inputs;  // [utt][t] -> 1 x dim
  std::vector<std::vector<int>> labels;     // [utt][t]
  int n_classes = 0;
  int feature_dim = 0;
};

SequenceDataset MakeSequenceDataset(int n_utterances, int min_len, int max_len,
                                    int feature_dim, int n_classes,
                                    std::uint64_t seed);

}  // namespace dsr

#endif  // DSR_SYNTHETIC_H_
