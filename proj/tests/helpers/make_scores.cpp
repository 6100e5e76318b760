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


// Writes a class-score map and a boundary-score map for the refine command:
//   make_scores <probs.bin> <boundaries.bin> <frames> <classes>
// Segments of 10 frames cycle through the classes; the boundary score peaks
// on the first frame of each segment.

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "asrf/asrf.h"

int main(int argc, char** argv) {
  if (argc != 5) {
    std::fprintf(stderr, "usage: %s probs.bin boundaries.bin frames classes\n", argv[0]);
    return 2;
  }
  const std::size_t frames = std::strtoul(argv[3], nullptr, 10);
  const std::size_t classes = std::strtoul(argv[4], nullptr, 10);
  if (frames == 0 || classes < 2) return 2;
  std::vector<float> probs(frames * classes), brb(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t c = (t / 10) % classes;
    for (std::size_t k = 0; k < classes; ++k) {
      probs[t * classes + k] = k == c ? 0.7f : 0.3f / static_cast<float>(classes - 1);
    }
    brb[t] = t % 10 == 0 ? 0.9f : 0.1f;
  }
  if (asrf_feature_file_write(argv[1], probs.data(), frames, classes) != ASRF_OK ||
      asrf_feature_file_write(argv[2], brb.data(), frames, 1) != ASRF_OK) {
    std::fprintf(stderr, "%s\n", asrf_last_error());
    return 1;
  }
  return 0;
}
