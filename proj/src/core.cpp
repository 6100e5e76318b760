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

#include "asrf/core.hpp"

#include <algorithm>

#include "asrf/error.hpp"

namespace asrf {

ClassMap::ClassMap(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    Require(!names_[i].empty(), ErrorCode::kInvalidArgument, "empty class name");
    const bool inserted = index_.emplace(names_[i], static_cast<ClassId>(i)).second;
    Require(inserted, ErrorCode::kInvalidArgument, "duplicate class name '" + names_[i] + "'");
  }
}

const std::string& ClassMap::name(ClassId id) const {
  Require(id < names_.size(), ErrorCode::kInvalidArgument,
          "class id " + std::to_string(id) + " out of range");
  return names_[id];
}

std::optional<ClassId> ClassMap::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ClassMap ClassMap::Numbered(std::size_t num_classes) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < num_classes; ++c) names.push_back("class_" + std::to_string(c));
  return ClassMap(std::move(names));
}

std::vector<Segment> segments_from_labels(std::span<const ClassId> labels) {
  Require(!labels.empty(), ErrorCode::kInvalidArgument, "empty sequence");
  std::vector<Segment> segments;
  std::size_t start = 0;
  for (std::size_t t = 1; t <= labels.size(); ++t) {
    if (t == labels.size() || labels[t] != labels[start]) {
      segments.push_back({labels[start], start, t - 1});
      start = t;
    }
  }
  return segments;
}

Labels labels_from_segments(std::span<const Segment> segments) {
  Labels labels;
  for (const auto& s : segments) labels.insert(labels.end(), s.length(), s.class_id);
  return labels;
}

BoundaryMask boundaries_from_labels(std::span<const ClassId> labels) {
  Require(!labels.empty(), ErrorCode::kInvalidArgument, "empty sequence");
  BoundaryMask mask(labels.size(), 0);
  for (std::size_t t = 1; t < labels.size(); ++t) {
    mask[t] = labels[t] != labels[t - 1] ? 1 : 0;
  }
  return mask;
}

std::vector<std::size_t> boundary_positions(std::span<const std::uint8_t> mask) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < mask.size(); ++t) {
    if (mask[t] != 0) out.push_back(t);
  }
  return out;
}

std::vector<std::uint64_t> class_frequencies(std::span<const Labels> sequences,
                                             std::size_t num_classes) {
  std::vector<std::uint64_t> freqs(num_classes, 0);
  for (const auto& seq : sequences) {
    for (ClassId c : seq) {
      Require(c < num_classes, ErrorCode::kInvalidArgument,
              "label " + std::to_string(c) + " out of range for " +
                  std::to_string(num_classes) + " classes");
      ++freqs[c];
    }
  }
  return freqs;
}

ClassWeights median_frequency_weights(std::span<const std::uint64_t> freqs,
                                      std::vector<std::string>* warnings) {
  Require(!freqs.empty(), ErrorCode::kInvalidArgument, "no classes");
  std::vector<double> effective(freqs.size());
  for (std::size_t c = 0; c < freqs.size(); ++c) {
    if (freqs[c] == 0) {
      if (warnings != nullptr) {
        warnings->push_back("class " + std::to_string(c) +
                            " has no training frames; using frequency 1");
      }
      effective[c] = 1.0;
    } else {
      effective[c] = static_cast<double>(freqs[c]);
    }
  }
  std::vector<double> sorted = effective;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median =
      n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  ClassWeights out;
  out.weights.reserve(n);
  for (double f : effective) out.weights.push_back(median / f);
  return out;
}

ClassWeights median_frequency_weights(std::span<const Labels> sequences,
                                      std::size_t num_classes,
                                      std::vector<std::string>* warnings) {
  const auto freqs = class_frequencies(sequences, num_classes);
  return median_frequency_weights(freqs, warnings);
}

double positive_boundary_weight(std::span<const BoundaryMask> masks) {
  std::uint64_t total = 0;
  std::uint64_t positive = 0;
  for (const auto& m : masks) {
    total += m.size();
    for (auto f : m) positive += f != 0 ? 1 : 0;
  }
  Require(positive > 0, ErrorCode::kInvalidArgument, "no boundary frames");
  return static_cast<double>(total) / static_cast<double>(positive);
}

void validate_sample(const VideoSample& sample, std::size_t num_classes) {
  const std::string where = "video '" + sample.id + "': ";
  Require(sample.num_frames() >= 1, ErrorCode::kInvalidArgument, where + "no frames");
  Require(sample.features.cols() >= 1, ErrorCode::kInvalidArgument,
          where + "feature dimension is 0");
  Require(sample.features.rows() == sample.labels.size(), ErrorCode::kShapeMismatch,
          where + "feature rows (" + std::to_string(sample.features.rows()) +
              ") != label count (" + std::to_string(sample.labels.size()) + ")");
  for (ClassId c : sample.labels) {
    Require(c < num_classes, ErrorCode::kInvalidArgument,
            where + "label " + std::to_string(c) + " out of range");
  }
}

}  // namespace asrf
