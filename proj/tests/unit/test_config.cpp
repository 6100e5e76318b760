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


#include "asrf/config.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <functional>

#include "asrf/error.hpp"
#include "test_util.hpp"

namespace asrf {
namespace {

using testing::TempDir;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kState;
}

TEST(RunConfig, DefaultsRoundTripThroughJson) {
  RunConfig cfg;
  const std::string text = cfg.to_json();
  EXPECT_EQ(RunConfig::FromJson(text).to_json(), text);
  EXPECT_NE(text.find("\"lambda_brb\""), std::string::npos);
  EXPECT_NE(text.find("\"f1_averaging\": \"global\""), std::string::npos);
}

TEST(RunConfig, EditedValuesRoundTrip) {
  RunConfig cfg;
  cfg.paths.dataset_root = "/data/x";
  cfg.train.shape.channels = 17;
  cfg.train.adam.learning_rate = 0.0123;
  cfg.train.seed = 987654321987ULL;
  cfg.train.loss.classification = ClassificationLoss::kFocal;
  cfg.train.loss.smoothing = SmoothingLoss::kTmse;
  cfg.train.metrics.f1_averaging = F1Averaging::kPerClass;
  const auto back = RunConfig::FromJson(cfg.to_json());
  EXPECT_EQ(back.paths.dataset_root, cfg.paths.dataset_root);
  EXPECT_EQ(back.train.shape.channels, 17u);
  EXPECT_DOUBLE_EQ(back.train.adam.learning_rate, 0.0123);
  EXPECT_EQ(back.train.seed, 987654321987ULL);
  EXPECT_EQ(back.train.loss.classification, ClassificationLoss::kFocal);
  EXPECT_EQ(back.train.loss.smoothing, SmoothingLoss::kTmse);
  EXPECT_EQ(back.train.metrics.f1_averaging, F1Averaging::kPerClass);
}

TEST(RunConfig, PartialDocumentKeepsDefaults) {
  const auto cfg = RunConfig::FromJson(R"({"train": {"epochs": 3}, "refine": {"theta_p": "0.7"}})");
  EXPECT_EQ(cfg.train.epochs, 3u);
  EXPECT_DOUBLE_EQ(cfg.train.refine.theta_p, 0.7);
  EXPECT_EQ(cfg.train.batch_size, TrainConfig{}.batch_size);
}

TEST(RunConfig, RejectsUnknownAndMalformedInput) {
  EXPECT_EQ(CodeOf([] { RunConfig::FromJson(R"({"train": {"epoch": 3}})"); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { RunConfig::FromJson(R"({"optimizer": {}})"); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { RunConfig::FromJson("{not json"); }), ErrorCode::kFormat);
  EXPECT_EQ(CodeOf([] { RunConfig::FromJson("[1, 2]"); }), ErrorCode::kFormat);
  EXPECT_EQ(CodeOf([] { RunConfig::FromJson(R"({"train": 4})"); }), ErrorCode::kFormat);
  EXPECT_EQ(CodeOf([] { RunConfig::FromJson(R"({"train": {"epochs": -1}})"); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { RunConfig::FromJson(R"({"train": {"epochs": 0}})"); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { RunConfig::FromJson(R"({"loss": {"smoothing": "blur"}})"); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { RunConfig::FromJson(R"({"model": {"layers": 0}})"); }),
            ErrorCode::kInvalidArgument);
}

TEST(RunConfig, DottedOverrides) {
  RunConfig cfg;
  cfg.set("loss.lambda_brb", "0.25");
  cfg.set("model.brb_stages", "1");
  cfg.set("loss.classification", "ce");
  cfg.set("paths.output_dir", "elsewhere");
  EXPECT_DOUBLE_EQ(cfg.train.loss.lambda_brb, 0.25);
  EXPECT_EQ(cfg.train.shape.brb_stages, 1u);
  EXPECT_EQ(cfg.train.loss.classification, ClassificationLoss::kCrossEntropy);
  EXPECT_EQ(cfg.paths.output_dir, "elsewhere");
  EXPECT_THROW(cfg.set("lambda_brb", "1"), Error);
  EXPECT_THROW(cfg.set("loss.lambda", "1"), Error);
  EXPECT_THROW(cfg.set("train.epochs", "3x"), Error);
  EXPECT_THROW(cfg.set("train.learning_rate", ""), Error);
}

TEST(RunConfig, SplitPathsResolveAgainstRoot) {
  RunConfig cfg;
  cfg.paths.dataset_root = "/data/set";
  EXPECT_EQ(cfg.paths.resolved_train_split(), std::filesystem::path("/data/set/splits/train.txt"));
  cfg.paths.test_split = "/abs/test.txt";
  EXPECT_EQ(cfg.paths.resolved_test_split(), std::filesystem::path("/abs/test.txt"));
}

TEST(RunConfig, CheckPathsNamesMissingEntries) {
  TempDir dir("config");
  RunConfig cfg;
  cfg.paths.dataset_root = dir.path();
  cfg.paths.output_dir = dir.path() / "out";
  EXPECT_NO_THROW(cfg.check_paths(false, false));
  EXPECT_EQ(CodeOf([&] { cfg.check_paths(true, false); }), ErrorCode::kIo);
  std::filesystem::create_directories(dir.path() / "splits");
  std::ofstream(dir.path() / "splits" / "train.txt") << "a\n";
  EXPECT_NO_THROW(cfg.check_paths(true, false));
  try {
    cfg.check_paths(true, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("test split"), std::string::npos);
  }
  cfg.paths.output_dir = dir.path() / "missing" / "out";
  EXPECT_THROW(cfg.check_paths(false, false), Error);
  cfg.paths.dataset_root = dir.path() / "nope";
  EXPECT_THROW(cfg.check_paths(false, false), Error);
}

TEST(RunConfig, LoadReportsFile) {
  TempDir dir("config_load");
  const auto file = dir.path() / "cfg.json";
  std::ofstream(file) << R"({"train": {"dropout": 2}})";
  try {
    RunConfig::Load(file);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.json"), std::string::npos);
  }
  EXPECT_EQ(CodeOf([&] { RunConfig::Load(dir.path() / "absent.json"); }), ErrorCode::kIo);
}

}  // namespace
}  // namespace asrf
