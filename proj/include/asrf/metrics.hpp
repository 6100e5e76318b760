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

#ifndef ASRF_METRICS_HPP_
#define ASRF_METRICS_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "asrf/core.hpp"

namespace asrf {

inline constexpr std::array<int, 3> kF1Thresholds = {10, 25, 50};

// 100 * matching frames / T.
double frame_accuracy(std::span<const ClassId> pred, std::span<const ClassId> gt);

// Unit-cost insert/delete/substitute distance.
std::size_t levenshtein(std::span<const ClassId> a, std::span<const ClassId> b);

// (1 - d / max(M, N)) * 100 over the segment class sequences, floored at 0.
double segmental_edit_score(std::span<const ClassId> pred, std::span<const ClassId> gt);

struct DetectionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  double precision() const;
  double recall() const;
  double f1() const;  // 0 when precision + recall == 0
  DetectionCounts& operator+=(const DetectionCounts& o);
};

// Greedy temporal matching: each predicted segment, in order, is a true
// positive when its best same-class IoU is >= k/100 and that ground-truth
// segment is still unmatched.
DetectionCounts segmental_f1_counts(std::span<const Segment> pred,
                                    std::span<const Segment> gt, double k_percent);

// Same matching, counts split by class id (index = class).
std::vector<DetectionCounts> segmental_f1_counts_per_class(std::span<const Segment> pred,
                                                           std::span<const Segment> gt,
                                                           double k_percent,
                                                           std::size_t num_classes);

// F1 in percent.
double segmental_f1(std::span<const Segment> pred, std::span<const Segment> gt,
                    double k_percent);

struct BoundaryScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct BoundaryCounts {
  std::uint64_t pred_hits = 0;   // predicted boundaries within theta_b of ground truth
  std::uint64_t pred_total = 0;
  std::uint64_t gt_hits = 0;     // ground-truth boundaries within theta_b of a prediction
  std::uint64_t gt_total = 0;

  BoundaryScore score() const;
  BoundaryCounts& operator+=(const BoundaryCounts& o);
};

BoundaryCounts boundary_counts(std::span<const std::uint8_t> pred,
                               std::span<const std::uint8_t> gt, std::size_t theta_b);

// Precision/recall with strict distance < theta_b. Zero predictions give
// precision 0, zero ground truth gives recall 0; both empty gives (1, 1, 1).
BoundaryScore boundary_prf(std::span<const std::uint8_t> pred,
                           std::span<const std::uint8_t> gt, std::size_t theta_b);

enum class F1Averaging { kGlobal, kPerClass };

std::string to_string(F1Averaging v);
F1Averaging parse_f1_averaging(const std::string& s);

struct MetricsConfig {
  std::size_t theta_b = 5;
  F1Averaging f1_averaging = F1Averaging::kGlobal;
};

struct MetricsReport {
  double accuracy = 0.0;      // percent, over all frames
  double edit = 0.0;          // percent, mean over videos
  std::map<int, double> f1;   // percent, keyed by overlap threshold
  BoundaryScore boundary;     // fractions
  std::size_t videos = 0;
  std::size_t frames = 0;
  std::size_t predicted_boundaries = 0;
};

// Dataset-level reduction. Videos must be added in a deterministic order for
// bit-identical reports.
class MetricsAccumulator {
 public:
  MetricsAccumulator(std::size_t num_classes, MetricsConfig config = {});

  void add(std::span<const ClassId> pred, std::span<const ClassId> gt,
           std::span<const std::uint8_t> pred_boundaries,
           std::span<const std::uint8_t> gt_boundaries);

  MetricsReport report() const;

 private:
  std::size_t num_classes_;
  MetricsConfig config_;
  std::size_t videos_ = 0;
  std::uint64_t frames_ = 0;
  std::uint64_t correct_ = 0;
  double edit_sum_ = 0.0;
  std::map<int, std::vector<DetectionCounts>> f1_per_class_;
  BoundaryCounts boundary_;
};

// Plain-text table, one row per named report.
std::string format_report_table(
    const std::vector<std::pair<std::string, MetricsReport>>& rows);

// Key/value document:
//   # asrf-metrics v1
//   [<name>]
//   videos=<n>
//   frames=<n>
//   accuracy=<pct>
//   edit=<pct>
//   f1@10=<pct>  f1@25=<pct>  f1@50=<pct>   (one per line)
//   boundary.precision=<frac>  boundary.recall=<frac>  boundary.f1=<frac>
//   predicted_boundaries=<n>
// Values use fixed 4-decimal formatting; sections are separated by a blank line.
std::string format_report_kv(const std::vector<std::pair<std::string, MetricsReport>>& rows);

}  // namespace asrf

#endif  // ASRF_METRICS_HPP_
