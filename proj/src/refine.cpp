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

#include "asrf/refine.hpp"

#include <algorithm>
#include <cmath>

#include "asrf/error.hpp"
#include "asrf/losses.hpp"

namespace asrf {

void RefineConfig::validate() const {
  Require(theta_p >= 0.0 && theta_p <= 1.0, ErrorCode::kInvalidArgument,
          "theta_p must be in [0, 1]");
  Require(theta_t >= 1, ErrorCode::kInvalidArgument, "theta_t must be >= 1");
  Require(smooth_kernel >= 1 && smooth_kernel % 2 == 1, ErrorCode::kInvalidArgument,
          "smooth_kernel must be odd and >= 1");
  Require(sim_sigma > 0.0, ErrorCode::kInvalidArgument, "sim_sigma must be > 0");
}

Labels argmax_labels(const Matrix<float>& probs) {
  Labels out(probs.rows());
  for (std::size_t t = 0; t < probs.rows(); ++t) {
    auto row = probs.row(t);
    out[t] = static_cast<ClassId>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

BoundaryMask select_boundaries(std::span<const float> probs, double theta_p) {
  const std::size_t n = probs.size();
  BoundaryMask mask(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    const float p = probs[t];
    if (static_cast<double>(p) < theta_p) continue;
    if (t > 0 && !(p >= probs[t - 1])) continue;
    if (t + 1 < n && !(p > probs[t + 1])) continue;
    mask[t] = 1;
  }
  return mask;
}

Labels refine_by_boundaries(const Matrix<float>& probs,
                            std::span<const std::uint8_t> boundaries) {
  const std::size_t frames = probs.rows();
  const std::size_t classes = probs.cols();
  Require(boundaries.size() == frames, ErrorCode::kShapeMismatch,
          "refine_by_boundaries: boundary mask length " + std::to_string(boundaries.size()) +
              " != frame count " + std::to_string(frames));
  const Labels votes_per_frame = argmax_labels(probs);
  Labels out(frames);
  std::vector<std::size_t> votes(classes);
  std::vector<double> mass(classes);
  std::size_t start = 0;
  for (std::size_t t = 1; t <= frames; ++t) {
    if (t < frames && boundaries[t] == 0) continue;
    std::fill(votes.begin(), votes.end(), 0);
    std::fill(mass.begin(), mass.end(), 0.0);
    for (std::size_t u = start; u < t; ++u) {
      ++votes[votes_per_frame[u]];
      auto row = probs.row(u);
      for (std::size_t c = 0; c < classes; ++c) mass[c] += row[c];
    }
    ClassId best = 0;
    for (ClassId c = 1; c < classes; ++c) {
      if (votes[c] > votes[best] || (votes[c] == votes[best] && mass[c] > mass[best])) {
        best = c;
      }
    }
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(start),
              out.begin() + static_cast<std::ptrdiff_t>(t), best);
    start = t;
  }
  return out;
}

Labels postprocess_relabel(std::span<const ClassId> labels, std::size_t theta_t) {
  Require(theta_t >= 1, ErrorCode::kInvalidArgument, "theta_t must be >= 1");
  const auto segments = segments_from_labels(labels);
  std::vector<Segment> kept;
  std::size_t pending = 0;  // frames of short leading segments awaiting a label
  for (const auto& seg : segments) {
    if (!kept.empty() && kept.back().class_id == seg.class_id) {
      kept.back().end = seg.end;
      continue;
    }
    if (seg.length() < theta_t) {
      if (!kept.empty()) {
        kept.back().end = seg.end;
      } else {
        pending += seg.length();
      }
      continue;
    }
    kept.push_back({seg.class_id, seg.start - pending, seg.end});
    pending = 0;
  }
  if (kept.empty()) {
    // Whole video shorter than theta_t in every run: keep the last label.
    return Labels(labels.size(), segments.back().class_id);
  }
  return labels_from_segments(kept);
}

std::vector<double> gaussian_kernel(std::size_t size) {
  Require(size >= 1 && size % 2 == 1, ErrorCode::kInvalidArgument,
          "kernel size must be odd and >= 1");
  const double sigma = static_cast<double>(size) / 6.0;
  const auto radius = static_cast<std::ptrdiff_t>(size / 2);
  std::vector<double> k(size);
  double sum = 0.0;
  for (std::ptrdiff_t j = -radius; j <= radius; ++j) {
    const double v = std::exp(-static_cast<double>(j * j) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(j + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

namespace {

std::size_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return static_cast<std::size_t>(i);
}

}  // namespace

Labels postprocess_smooth(const Matrix<float>& probs, std::size_t kernel_size) {
  const auto kernel = gaussian_kernel(kernel_size);
  const auto n = static_cast<std::ptrdiff_t>(probs.rows());
  const auto radius = static_cast<std::ptrdiff_t>(kernel_size / 2);
  Matrix<float> smoothed(probs.rows(), probs.cols());
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    for (std::size_t c = 0; c < probs.cols(); ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t j = -radius; j <= radius; ++j) {
        acc += kernel[static_cast<std::size_t>(j + radius)] *
               probs(reflect_index(t + j, n), c);
      }
      smoothed(static_cast<std::size_t>(t), c) = static_cast<float>(acc);
    }
  }
  return argmax_labels(smoothed);
}

BoundaryMask boundaries_from_similarity(const Matrix<float>& features, double sigma) {
  const std::size_t frames = features.rows();
  Require(frames >= 2, ErrorCode::kInvalidArgument,
          "boundaries_from_similarity: need at least 2 frames");
  const auto s = frame_similarity(features, sigma);
  BoundaryMask mask(frames, 0);
  for (std::size_t t = 1; t < frames; ++t) {
    const bool has_prev = t > 1;
    const bool has_next = t + 1 < frames;
    if (!has_prev && !has_next) continue;
    if (has_prev && !(s[t] < s[t - 1])) continue;
    if (has_next && !(s[t] < s[t + 1])) continue;
    mask[t] = 1;
  }
  return mask;
}

}  // namespace asrf
