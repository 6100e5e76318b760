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

#ifndef ASRF_CORE_HPP_
#define ASRF_CORE_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "asrf/matrix.hpp"

namespace asrf {

using ClassId = std::uint32_t;
using Labels = std::vector<ClassId>;

// One flag per frame; 1 marks the first frame of a new segment.
using BoundaryMask = std::vector<std::uint8_t>;

// A maximal run of one class. `end` is inclusive.
struct Segment {
  ClassId class_id = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - start + 1; }
  friend auto operator<=>(const Segment&, const Segment&) = default;
};

struct VideoSample {
  std::string id;
  Matrix<float> features;  // T x D
  Labels labels;           // length T

  std::size_t num_frames() const noexcept { return labels.size(); }
  std::size_t feature_dim() const noexcept { return features.cols(); }
};

// Dense id <-> name mapping; ids are 0..C-1 in mapping-file order.
class ClassMap {
 public:
  ClassMap() = default;
  explicit ClassMap(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(ClassId id) const;
  std::optional<ClassId> find(const std::string& name) const;
  const std::vector<std::string>& names() const noexcept { return names_; }

  // Synthetic datasets use "class_<id>".
  static ClassMap Numbered(std::size_t num_classes);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, ClassId> index_;
};

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
  ClassMap classes;
};

struct ClassWeights {
  std::vector<double> weights;
};

std::vector<Segment> segments_from_labels(std::span<const ClassId> labels);
Labels labels_from_segments(std::span<const Segment> segments);

BoundaryMask boundaries_from_labels(std::span<const ClassId> labels);
std::vector<std::size_t> boundary_positions(std::span<const std::uint8_t> mask);

// Per-class frame counts over a set of label sequences.
std::vector<std::uint64_t> class_frequencies(std::span<const Labels> sequences,
                                             std::size_t num_classes);

// weights[c] = median(freq) / freq[c]. A class that never occurs is treated as
// having frequency 1 and a message is appended to `warnings` when given.
ClassWeights median_frequency_weights(std::span<const std::uint64_t> freqs,
                                      std::vector<std::string>* warnings = nullptr);
ClassWeights median_frequency_weights(std::span<const Labels> sequences,
                                      std::size_t num_classes,
                                      std::vector<std::string>* warnings = nullptr);

// Reciprocal of the fraction of boundary frames.
double positive_boundary_weight(std::span<const BoundaryMask> masks);

// Checks VideoSample invariants against a class count.
void validate_sample(const VideoSample& sample, std::size_t num_classes);

}  // namespace asrf

#endif  // ASRF_CORE_HPP_
