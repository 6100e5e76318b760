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

#ifndef ASRF_SYNTH_HPP_
#define ASRF_SYNTH_HPP_

#include <cstdint>
#include <vector>

#include "asrf/core.hpp"

namespace asrf {

struct SynthConfig {
  std::size_t num_videos = 20;
  std::size_t min_frames = 200;
  std::size_t max_frames = 400;
  std::size_t num_classes = 5;
  std::size_t feature_dim = 8;
  std::size_t min_segment = 20;
  std::size_t max_segment = 80;
  double noise_level = 0.3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticDataset {
  ClassMap classes;
  Matrix<float> prototypes;  // C x D
  std::vector<VideoSample> videos;
};

// Piecewise-constant label sequences; each frame's feature is its class
// prototype plus N(0, noise_level^2) per dimension. Adjacent segments always
// differ in class. Deterministic in `seed`.
SyntheticDataset generate_synthetic_dataset(const SynthConfig& config);

}  // namespace asrf

#endif  // ASRF_SYNTH_HPP_
