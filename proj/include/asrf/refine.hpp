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

#ifndef ASRF_REFINE_HPP_
#define ASRF_REFINE_HPP_

#include <span>
#include <vector>

#include "asrf/core.hpp"
#include "asrf/matrix.hpp"

namespace asrf {

struct RefineConfig {
  double theta_p = 0.5;           // boundary probability threshold
  std::size_t theta_t = 5;        // Relabeling: minimum segment length
  std::size_t smooth_kernel = 5;  // Smoothing: odd Gaussian kernel size
  double sim_sigma = 1.0;         // Similarity: Gaussian width

  void validate() const;
};

// Per-frame argmax; ties go to the smaller class id.
Labels argmax_labels(const Matrix<float>& probs);

// Frames whose probability is >= theta_p and a local maximum: P[t] >= P[t-1]
// and P[t] > P[t+1], comparing only against neighbours that exist. Within a
// plateau only the last frame qualifies.
BoundaryMask select_boundaries(std::span<const float> probs, double theta_p);

// Splits the sequence at every flagged frame and assigns each piece the class
// that wins the most argmax votes inside it. Vote ties go to the larger summed
// probability, then to the smaller class id.
Labels refine_by_boundaries(const Matrix<float>& probs, std::span<const std::uint8_t> boundaries);

// Left-to-right: a segment shorter than theta_t takes the label of the segment
// before it (merging into it). A short leading segment takes the label of the
// first segment that is long enough.
Labels postprocess_relabel(std::span<const ClassId> labels, std::size_t theta_t);

// Normalised Gaussian taps with sigma = size / 6.
std::vector<double> gaussian_kernel(std::size_t size);

// Filters each class channel with gaussian_kernel(kernel_size) under
// reflect padding (d c b a | a b c d | d c b a), then takes the argmax.
Labels postprocess_smooth(const Matrix<float>& probs, std::size_t kernel_size);

// s[t] = exp(-|x_t - x_{t-1}|^2 / (2 sigma^2)) for t >= 1; flags frames where
// s has a strict local minimum (one-sided at the ends of s).
BoundaryMask boundaries_from_similarity(const Matrix<float>& features, double sigma);

}  // namespace asrf

#endif  // ASRF_REFINE_HPP_
