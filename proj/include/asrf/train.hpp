// Copyright 2026 The ASRF Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASRF_TRAIN_HPP_
#define ASRF_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asrf/io.hpp"
#include "asrf/losses.hpp"
#include "asrf/metrics.hpp"
#include "asrf/refine.hpp"
#include "asrf/tcn.hpp"

namespace asrf {

struct AdamConfig {
  double learning_rate = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

template <typename T>
struct AdamState {
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;
  std::uint64_t step = 0;
};

// One bias-corrected Adam update from the gradients stored in `params`.
// The state is sized on first use and must keep matching afterwards.
template <typename T>
void adam_step(std::vector<Parameter<T>>& params, AdamState<T>& state,
               const AdamConfig& config);

struct TrainConfig {
  AdamConfig adam;
  std::size_t batch_size = 1;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  double dropout = 0.5;
  LossConfig loss;
  // feature_dim / num_classes are taken from the data when left at 0.
  ModelShape shape;
  // Used for the per-epoch held-out evaluation.
  RefineConfig refine;
  MetricsConfig metrics;

  void validate() const;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  LossTerms train_loss;   // mean over training videos
  std::optional<MetricsReport> heldout;
};

// One JSON object per line.
std::string format_epoch_log(const EpochLog& log);

struct TrainResult {
  AsrfModel<float> model;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  ClassWeights class_weights;
  double positive_weight = 1.0;
};

// Batch training with Adam over a seeded per-epoch shuffle. With a held-out
// set the returned model is the epoch with the best refined edit score (ties
// keep the later epoch); otherwise it is the final epoch. Throws
// ErrorCode::kDiverged when a loss is not finite.
TrainResult train(const Dataset& train_set, const Dataset* heldout, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

// Final-head outputs of one video.
struct VideoOutput {
  Matrix<float> asb;       // T x C
  std::vector<float> brb;  // T
};

VideoOutput predict(const AsrfModel<float>& model, const Matrix<float>& features);
// Fans out over videos; results are in input order.
std::vector<VideoOutput> predict_dataset(const AsrfModel<float>& model,
                                         std::span<const VideoSample> videos);

enum class EvalMode {
  kRaw,               // argmax of the final ASB head
  kRefined,           // majority vote inside BRB-selected segments
  kOracleAsb,         // ground-truth labels voted inside BRB-selected segments
  kOracleBoundaries,  // ASB argmax voted inside ground-truth segments
  kRelabel,           // raw + short-segment relabeling
  kSmooth,            // Gaussian-smoothed probabilities
  kSimilarity,        // majority vote inside similarity-minimum segments
};

std::string to_string(EvalMode mode);
EvalMode parse_eval_mode(const std::string& s);

struct ModeOutput {
  Labels labels;
  // Cuts the mode used: BRB selections, ground truth, or similarity minima;
  // for raw / relabel / smooth the label transitions of the output.
  BoundaryMask boundaries;
};

ModeOutput apply_mode(EvalMode mode, const VideoOutput& output, const VideoSample& video,
                      std::size_t num_classes, const RefineConfig& refine);

MetricsReport evaluate_outputs(std::span<const VideoSample> videos,
                               std::span<const VideoOutput> outputs, std::size_t num_classes,
                               const RefineConfig& refine, const MetricsConfig& metrics,
                               EvalMode mode);

MetricsReport evaluate_dataset(const AsrfModel<float>& model,
                               std::span<const VideoSample> videos,
                               const RefineConfig& refine, const MetricsConfig& metrics,
                               EvalMode mode);

struct ThetaAblationRow {
  double theta_p = 0.0;
  MetricsReport refined;
};

std::vector<ThetaAblationRow> ablate_theta_p(std::span<const VideoSample> videos,
                                             std::span<const VideoOutput> outputs,
                                             std::size_t num_classes,
                                             std::span<const double> thetas,
                                             const RefineConfig& refine,
                                             const MetricsConfig& metrics);
std::string format_theta_table(std::span<const ThetaAblationRow> rows);

struct StageAblationRow {
  std::size_t brb_stages = 0;
  MetricsReport refined;
  MetricsReport oracle_asb;
};

// Trains one model per BRB stage count and evaluates it on `test_set`.
std::vector<StageAblationRow> ablate_brb_stages(const Dataset& train_set,
                                                const Dataset& test_set,
                                                const TrainConfig& base,
                                                std::span<const std::size_t> stage_counts);
std::string format_stage_table(std::span<const StageAblationRow> rows);

}  // namespace asrf

#endif  // ASRF_TRAIN_HPP_
