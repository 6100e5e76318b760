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


#include "asrf/train.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "asrf/error.hpp"
#include "asrf/synth.hpp"
#include "test_util.hpp"

namespace asrf {
namespace {

using testing::RandomMatrix;
using testing::RandomProbs;

Dataset SmallDataset(std::size_t videos, std::uint64_t seed, std::size_t max_frames = 160) {
  SynthConfig cfg;
  cfg.num_videos = videos;
  cfg.num_classes = 4;
  cfg.feature_dim = 8;
  cfg.noise_level = 0.1;
  cfg.min_frames = 80;
  cfg.max_frames = max_frames;
  cfg.min_segment = 15;
  cfg.max_segment = 40;
  cfg.seed = seed;
  auto data = generate_synthetic_dataset(cfg);
  return Dataset{data.classes, std::move(data.videos)};
}

TrainConfig TinyConfig(std::size_t epochs) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.seed = 11;
  cfg.shape.channels = 8;
  cfg.shape.layers = 3;
  cfg.shape.asb_stages = 1;
  cfg.shape.brb_stages = 1;
  cfg.adam.learning_rate = 0.005;
  return cfg;
}

std::vector<Parameter<float>> ScalarParam(float value, float grad) {
  return {Parameter<float>{"w", {1}, {value}, {grad}}};
}

bool SameParameters(const AsrfModel<float>& a, const AsrfModel<float>& b) {
  if (a.parameters().size() != b.parameters().size()) return false;
  for (std::size_t i = 0; i < a.parameters().size(); ++i) {
    if (a.parameters()[i].value != b.parameters()[i].value) return false;
  }
  return true;
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  auto params = ScalarParam(0.75f, 0.0f);
  AdamState<float> state;
  for (int i = 0; i < 3; ++i) adam_step(params, state, AdamConfig{});
  EXPECT_EQ(params[0].value[0], 0.75f);
  EXPECT_EQ(state.step, 3u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  AdamConfig cfg;
  cfg.learning_rate = 0.01;
  for (float g : {1.0f, -3.0f, 1e-3f}) {
    auto params = ScalarParam(0.0f, g);
    AdamState<float> state;
    adam_step(params, state, cfg);
    EXPECT_NEAR(params[0].value[0], g > 0 ? -0.01f : 0.01f, 1e-5) << g;
  }
}

TEST(Adam, MatchesReferenceRecurrence) {
  AdamConfig cfg;
  cfg.learning_rate = 0.1;
  auto params = ScalarParam(1.0f, 0.0f);
  AdamState<float> state;
  double x = 1.0, m = 0.0, v = 0.0;
  for (int t = 1; t <= 6; ++t) {
    const double g = 2.0 * x;  // d/dx x^2
    params[0].grad[0] = static_cast<float>(2.0 * params[0].value[0]);
    adam_step(params, state, cfg);
    m = cfg.beta1 * m + (1 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1 - cfg.beta2) * g * g;
    const double mh = m / (1 - std::pow(cfg.beta1, t));
    const double vh = v / (1 - std::pow(cfg.beta2, t));
    x -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.epsilon);
    EXPECT_NEAR(params[0].value[0], x, 1e-5) << t;
  }
}

TEST(Adam, ShapeChangeIsRejected) {
  auto params = ScalarParam(0.0f, 1.0f);
  AdamState<float> state;
  adam_step(params, state, AdamConfig{});
  params.push_back(Parameter<float>{"b", {1}, {0.0f}, {0.0f}});
  EXPECT_THROW(adam_step(params, state, AdamConfig{}), Error);
}

TEST(Adam, ConfigValidation) {
  AdamConfig cfg;
  cfg.beta1 = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.epsilon = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.learning_rate = -1e-3;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.learning_rate = 0.0;
  EXPECT_NO_THROW(cfg.validate());
}

TEST(TrainConfig, RejectsDegenerateValues) {
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.dropout = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Train, ZeroLearningRateKeepsInitialParameters) {
  const auto data = SmallDataset(3, 5, 100);
  auto cfg = TinyConfig(2);
  cfg.adam.learning_rate = 0.0;
  const auto result = train(data, nullptr, cfg);
  ModelShape shape = cfg.shape;
  shape.feature_dim = 8;
  shape.num_classes = 4;
  AsrfModel<float> init(shape);
  init.init_parameters(cfg.seed);
  EXPECT_TRUE(SameParameters(result.model, init));
  EXPECT_EQ(result.best_epoch, 2u);
}

TEST(Train, LossStrictlyDecreasesOverFirstEpochs) {
  const auto data = SmallDataset(8, 21);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 3;
  cfg.shape.channels = 32;
  cfg.shape.layers = 6;
  cfg.shape.asb_stages = 2;
  cfg.shape.brb_stages = 2;
  const auto result = train(data, nullptr, cfg);
  ASSERT_EQ(result.log.size(), 5u);
  for (std::size_t e = 1; e < result.log.size(); ++e) {
    EXPECT_LT(result.log[e].train_loss.total, result.log[e - 1].train_loss.total) << e;
  }
}

TEST(Train, SameSeedGivesIdenticalRuns) {
  const auto data = SmallDataset(4, 8, 100);
  const auto heldout = SmallDataset(2, 9, 100);
  auto cfg = TinyConfig(3);
  cfg.batch_size = 3;
  const auto a = train(data, &heldout, cfg);
  const auto b = train(data, &heldout, cfg);
  EXPECT_TRUE(SameParameters(a.model, b.model));
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t e = 0; e < a.log.size(); ++e) {
    EXPECT_EQ(format_epoch_log(a.log[e]), format_epoch_log(b.log[e]));
  }
  EXPECT_EQ(a.best_epoch, b.best_epoch);
  cfg.seed = 12;
  const auto c = train(data, &heldout, cfg);
  EXPECT_FALSE(SameParameters(a.model, c.model));
}

TEST(Train, BestEpochHasTheHighestHeldoutEdit) {
  const auto data = SmallDataset(4, 8, 100);
  const auto heldout = SmallDataset(2, 9, 100);
  const auto result = train(data, &heldout, TinyConfig(4));
  double best = -1.0;
  std::size_t epoch = 0;
  for (const auto& e : result.log) {
    ASSERT_TRUE(e.heldout.has_value());
    if (e.heldout->edit >= best) {
      best = e.heldout->edit;
      epoch = e.epoch;
    }
  }
  EXPECT_EQ(result.best_epoch, epoch);
  const auto again = evaluate_dataset(result.model, heldout.videos, RefineConfig{},
                                      MetricsConfig{}, EvalMode::kRefined);
  EXPECT_DOUBLE_EQ(again.edit, best);
}

TEST(Train, NonFiniteLossAborts) {
  auto data = SmallDataset(2, 4, 100);
  data.videos[1].features(3, 2) = std::numeric_limits<float>::quiet_NaN();
  try {
    train(data, nullptr, TinyConfig(1));
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDiverged);
    EXPECT_NE(std::string(e.what()).find(data.videos[1].id), std::string::npos);
  }
}

TEST(Train, RejectsMismatchedHeldout) {
  const auto data = SmallDataset(2, 4, 100);
  auto heldout = SmallDataset(1, 5, 100);
  heldout.videos[0].features = Matrix<float>(heldout.videos[0].num_frames(), 3);
  EXPECT_THROW(train(data, &heldout, TinyConfig(1)), Error);
  EXPECT_THROW(train(Dataset{}, nullptr, TinyConfig(1)), Error);
}

TEST(EpochLog, FormatsOneJsonObject) {
  EpochLog log;
  log.epoch = 7;
  log.train_loss.total = 1.5;
  log.train_loss.asb = 1.25;
  log.train_loss.brb = 2.5;
  const auto plain = nlohmann::json::parse(format_epoch_log(log));
  EXPECT_EQ(plain["epoch"], 7);
  EXPECT_DOUBLE_EQ(plain["loss"]["brb"].get<double>(), 2.5);
  EXPECT_FALSE(plain.contains("heldout"));

  MetricsReport r;
  r.accuracy = 90.0;
  r.edit = 80.0;
  r.f1 = {{10, 70.0}, {25, 60.0}, {50, 50.0}};
  r.boundary = {0.5, 0.25, 1.0 / 3.0};
  log.heldout = r;
  const std::string line = format_epoch_log(log);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const auto j = nlohmann::json::parse(line);
  EXPECT_DOUBLE_EQ(j["heldout"]["edit"].get<double>(), 80.0);
  EXPECT_DOUBLE_EQ(j["heldout"]["f1@25"].get<double>(), 60.0);
}

TEST(EvalMode, NamesRoundTrip) {
  for (EvalMode m : {EvalMode::kRaw, EvalMode::kRefined, EvalMode::kOracleAsb,
                     EvalMode::kOracleBoundaries, EvalMode::kRelabel, EvalMode::kSmooth,
                     EvalMode::kSimilarity}) {
    EXPECT_EQ(parse_eval_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_eval_mode("best"), Error);
}

// Outputs whose ASB is noisy and whose BRB fires exactly on true boundaries.
VideoOutput SyntheticOutput(std::mt19937_64& rng, const VideoSample& v, std::size_t C) {
  VideoOutput out;
  out.asb = RandomProbs<float>(rng, v.num_frames(), C);
  const auto mask = boundaries_from_labels(v.labels);
  out.brb.assign(v.num_frames(), 0.05f);
  for (std::size_t t = 0; t < mask.size(); ++t) {
    if (mask[t]) out.brb[t] = 0.95f;
  }
  return out;
}

TEST(EvalModes, OracleAsbWithExactBoundariesIsPerfect) {
  std::mt19937_64 rng(31);
  const auto data = SmallDataset(5, 13);
  std::vector<VideoOutput> outputs;
  for (const auto& v : data.videos) outputs.push_back(SyntheticOutput(rng, v, 4));
  const auto r = evaluate_outputs(data.videos, outputs, 4, RefineConfig{}, MetricsConfig{},
                                  EvalMode::kOracleAsb);
  EXPECT_DOUBLE_EQ(r.accuracy, 100.0);
  EXPECT_DOUBLE_EQ(r.edit, 100.0);
  for (const auto& [k, f] : r.f1) EXPECT_DOUBLE_EQ(f, 100.0) << k;
  EXPECT_DOUBLE_EQ(r.boundary.f1, 1.0);
}

TEST(EvalModes, OracleBoundariesUseGroundTruthCuts) {
  std::mt19937_64 rng(32);
  const auto data = SmallDataset(3, 14);
  for (const auto& v : data.videos) {
    VideoOutput out = SyntheticOutput(rng, v, 4);
    std::fill(out.brb.begin(), out.brb.end(), 0.0f);
    const auto m = apply_mode(EvalMode::kOracleBoundaries, out, v, 4, RefineConfig{});
    EXPECT_EQ(m.boundaries, boundaries_from_labels(v.labels));
    EXPECT_EQ(m.labels, refine_by_boundaries(out.asb, m.boundaries));
  }
}

TEST(EvalModes, RawMatchesDirectArgmaxMetrics) {
  std::mt19937_64 rng(33);
  const auto data = SmallDataset(4, 15);
  std::vector<VideoOutput> outputs;
  for (const auto& v : data.videos) outputs.push_back(SyntheticOutput(rng, v, 4));
  const auto r = evaluate_outputs(data.videos, outputs, 4, RefineConfig{}, MetricsConfig{},
                                  EvalMode::kRaw);
  std::size_t hits = 0, frames = 0;
  double edit = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto pred = argmax_labels(outputs[i].asb);
    for (std::size_t t = 0; t < pred.size(); ++t) hits += pred[t] == data.videos[i].labels[t];
    frames += pred.size();
    edit += segmental_edit_score(pred, data.videos[i].labels);
  }
  EXPECT_NEAR(r.accuracy, 100.0 * hits / frames, 1e-9);
  EXPECT_NEAR(r.edit, edit / outputs.size(), 1e-9);
  EXPECT_EQ(r.videos, 4u);
  EXPECT_EQ(r.frames, frames);
}

TEST(EvalModes, ModeLengthsMatchVideo) {
  std::mt19937_64 rng(34);
  const auto data = SmallDataset(2, 16);
  for (const auto& v : data.videos) {
    const auto out = SyntheticOutput(rng, v, 4);
    for (EvalMode m : {EvalMode::kRaw, EvalMode::kRefined, EvalMode::kOracleAsb,
                       EvalMode::kOracleBoundaries, EvalMode::kRelabel, EvalMode::kSmooth,
                       EvalMode::kSimilarity}) {
      const auto o = apply_mode(m, out, v, 4, RefineConfig{});
      EXPECT_EQ(o.labels.size(), v.num_frames()) << to_string(m);
      EXPECT_EQ(o.boundaries.size(), v.num_frames()) << to_string(m);
    }
  }
}

TEST(Predict, DatasetOrderMatchesSequentialPredict) {
  const auto data = SmallDataset(5, 17, 100);
  ModelShape shape = TinyConfig(1).shape;
  shape.feature_dim = 8;
  shape.num_classes = 4;
  AsrfModel<float> model(shape);
  model.init_parameters(2);
  const auto all = predict_dataset(model, data.videos);
  ASSERT_EQ(all.size(), data.videos.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto one = predict(model, data.videos[i].features);
    EXPECT_TRUE(std::ranges::equal(all[i].asb.values(), one.asb.values()));
    EXPECT_EQ(all[i].brb, one.brb);
  }
}

TEST(Ablation, ThetaRowsAreMonotoneAndTableIsStable) {
  std::mt19937_64 rng(35);
  const auto data = SmallDataset(4, 18);
  std::vector<VideoOutput> outputs;
  for (const auto& v : data.videos) {
    VideoOutput out;
    out.asb = RandomProbs<float>(rng, v.num_frames(), 4);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    out.brb.resize(v.num_frames());
    for (auto& p : out.brb) p = u(rng);
    outputs.push_back(std::move(out));
  }
  const std::vector<double> thetas = {0.1, 0.3, 0.5, 0.7, 0.9};
  const auto rows = ablate_theta_p(data.videos, outputs, 4, thetas, RefineConfig{},
                                   MetricsConfig{});
  ASSERT_EQ(rows.size(), thetas.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LE(rows[i].refined.predicted_boundaries, rows[i - 1].refined.predicted_boundaries);
  }
  const auto again = ablate_theta_p(data.videos, outputs, 4, thetas, RefineConfig{},
                                    MetricsConfig{});
  EXPECT_EQ(format_theta_table(rows), format_theta_table(again));
  EXPECT_NE(format_theta_table(rows).find("theta_p"), std::string::npos);
}

TEST(Ablation, StageCountsTrainOneModelEach) {
  const auto data = SmallDataset(3, 19, 100);
  const auto test = SmallDataset(2, 20, 100);
  const std::vector<std::size_t> counts = {0, 2};
  const auto rows = ablate_brb_stages(data, test, TinyConfig(1), counts);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].brb_stages, 0u);
  EXPECT_EQ(rows[1].brb_stages, 2u);
  EXPECT_EQ(rows[1].refined.videos, 2u);
  EXPECT_NE(format_stage_table(rows).find("stages"), std::string::npos);
}

}  // namespace
}  // namespace asrf
