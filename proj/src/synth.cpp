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

#include "asrf/synth.hpp"

#include <cstdio>
#include <random>

#include "asrf/error.hpp"

namespace asrf {

void SynthConfig::validate() const {
  Require(num_videos >= 1, ErrorCode::kInvalidArgument, "synth: num_videos must be >= 1");
  Require(num_classes >= 2, ErrorCode::kInvalidArgument, "synth: num_classes must be >= 2");
  Require(feature_dim >= 2, ErrorCode::kInvalidArgument, "synth: feature_dim must be >= 2");
  Require(min_frames >= 10, ErrorCode::kInvalidArgument, "synth: min_frames must be >= 10");
  Require(min_frames <= max_frames, ErrorCode::kInvalidArgument,
          "synth: min_frames must be <= max_frames");
  Require(min_segment >= 1 && min_segment <= max_segment, ErrorCode::kInvalidArgument,
          "synth: need 1 <= min_segment <= max_segment");
  Require(noise_level >= 0.0, ErrorCode::kInvalidArgument, "synth: noise_level must be >= 0");
}

SyntheticDataset generate_synthetic_dataset(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  SyntheticDataset out;
  out.classes = ClassMap::Numbered(config.num_classes);
  out.prototypes = Matrix<float>(config.num_classes, config.feature_dim);
  for (auto& v : out.prototypes.values()) v = static_cast<float>(unit(rng));

  std::uniform_int_distribution<std::size_t> frames_dist(config.min_frames, config.max_frames);
  std::uniform_int_distribution<std::size_t> seg_dist(config.min_segment, config.max_segment);
  std::uniform_int_distribution<ClassId> class_dist(
      0, static_cast<ClassId>(config.num_classes - 1));
  std::uniform_int_distribution<ClassId> other_dist(
      1, static_cast<ClassId>(config.num_classes - 1));

  for (std::size_t v = 0; v < config.num_videos; ++v) {
    VideoSample sample;
    char id[32];
    std::snprintf(id, sizeof(id), "video_%03zu", v);
    sample.id = id;
    const std::size_t frames = frames_dist(rng);
    ClassId current = class_dist(rng);
    while (sample.labels.size() < frames) {
      const std::size_t remaining = frames - sample.labels.size();
      std::size_t len = std::min(seg_dist(rng), remaining);
      // A tail shorter than min_segment is absorbed into this segment.
      if (remaining - len < config.min_segment) len = remaining;
      sample.labels.insert(sample.labels.end(), len, current);
      current = static_cast<ClassId>((current + other_dist(rng)) % config.num_classes);
    }
    sample.features = Matrix<float>(frames, config.feature_dim);
    for (std::size_t t = 0; t < frames; ++t) {
      auto row = sample.features.row(t);
      auto proto = out.prototypes.row(sample.labels[t]);
      for (std::size_t d = 0; d < row.size(); ++d) {
        row[d] = static_cast<float>(proto[d] + config.noise_level * unit(rng));
      }
    }
    out.videos.push_back(std::move(sample));
  }
  return out;
}

}  // namespace asrf
