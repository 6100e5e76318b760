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

#include "asrf/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "asrf/error.hpp"

namespace asrf {

double frame_accuracy(std::span<const ClassId> pred, std::span<const ClassId> gt) {
  Require(pred.size() == gt.size(), ErrorCode::kShapeMismatch,
          "frame_accuracy: length mismatch (" + std::to_string(pred.size()) + " vs " +
              std::to_string(gt.size()) + ")");
  Require(!gt.empty(), ErrorCode::kInvalidArgument, "frame_accuracy: empty sequence");
  std::size_t correct = 0;
  for (std::size_t t = 0; t < gt.size(); ++t) correct += pred[t] == gt[t] ? 1 : 0;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(gt.size());
}

std::size_t levenshtein(std::span<const ClassId> a, std::span<const ClassId> b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace {

Labels segment_classes(std::span<const ClassId> labels) {
  Labels out;
  for (const auto& s : segments_from_labels(labels)) out.push_back(s.class_id);
  return out;
}

double iou(const Segment& a, const Segment& b) {
  const std::size_t lo = std::max(a.start, b.start);
  const std::size_t hi = std::min(a.end, b.end);
  const double inter = hi >= lo ? static_cast<double>(hi - lo + 1) : 0.0;
  const double uni = static_cast<double>(a.length() + b.length()) - inter;
  return inter / uni;
}

template <typename Sink>
void match_segments(std::span<const Segment> pred, std::span<const Segment> gt,
                    double k_percent, Sink&& sink) {
  Require(k_percent > 0.0 && k_percent < 100.0, ErrorCode::kInvalidArgument,
          "overlap threshold must be in (0, 100)");
  const double threshold = k_percent / 100.0;
  std::vector<bool> matched(gt.size(), false);
  for (const auto& p : pred) {
    double best = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (gt[g].class_id != p.class_id) continue;
      const double v = iou(p, gt[g]);
      if (v > best) {
        best = v;
        best_idx = g;
      }
    }
    if (best >= threshold && !matched[best_idx]) {
      matched[best_idx] = true;
      sink(p.class_id).tp += 1;
    } else {
      sink(p.class_id).fp += 1;
    }
  }
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!matched[g]) sink(gt[g].class_id).fn += 1;
  }
}

}  // namespace

double segmental_edit_score(std::span<const ClassId> pred, std::span<const ClassId> gt) {
  Require(!pred.empty() && !gt.empty(), ErrorCode::kInvalidArgument,
          "segmental_edit_score: empty sequence");
  const Labels p = segment_classes(pred);
  const Labels g = segment_classes(gt);
  const double d = static_cast<double>(levenshtein(p, g));
  const double denom = static_cast<double>(std::max(p.size(), g.size()));
  return std::max(0.0, (1.0 - d / denom) * 100.0);
}

double DetectionCounts::precision() const {
  return tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
}

double DetectionCounts::recall() const {
  return tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
}

double DetectionCounts::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

DetectionCounts& DetectionCounts::operator+=(const DetectionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

DetectionCounts segmental_f1_counts(std::span<const Segment> pred,
                                    std::span<const Segment> gt, double k_percent) {
  DetectionCounts counts;
  match_segments(pred, gt, k_percent, [&](ClassId) -> DetectionCounts& { return counts; });
  return counts;
}

std::vector<DetectionCounts> segmental_f1_counts_per_class(std::span<const Segment> pred,
                                                           std::span<const Segment> gt,
                                                           double k_percent,
                                                           std::size_t num_classes) {
  std::vector<DetectionCounts> counts(num_classes);
  match_segments(pred, gt, k_percent, [&](ClassId c) -> DetectionCounts& {
    Require(c < num_classes, ErrorCode::kInvalidArgument,
            "segment class " + std::to_string(c) + " out of range");
    return counts[c];
  });
  return counts;
}

double segmental_f1(std::span<const Segment> pred, std::span<const Segment> gt,
                    double k_percent) {
  return 100.0 * segmental_f1_counts(pred, gt, k_percent).f1();
}

BoundaryScore BoundaryCounts::score() const {
  if (pred_total == 0 && gt_total == 0) return {1.0, 1.0, 1.0};
  BoundaryScore s;
  s.precision = pred_total > 0 ? static_cast<double>(pred_hits) / static_cast<double>(pred_total) : 0.0;
  s.recall = gt_total > 0 ? static_cast<double>(gt_hits) / static_cast<double>(gt_total) : 0.0;
  s.f1 = s.precision + s.recall > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

BoundaryCounts& BoundaryCounts::operator+=(const BoundaryCounts& o) {
  pred_hits += o.pred_hits;
  pred_total += o.pred_total;
  gt_hits += o.gt_hits;
  gt_total += o.gt_total;
  return *this;
}

BoundaryCounts boundary_counts(std::span<const std::uint8_t> pred,
                               std::span<const std::uint8_t> gt, std::size_t theta_b) {
  Require(pred.size() == gt.size(), ErrorCode::kShapeMismatch,
          "boundary_prf: mask length mismatch (" + std::to_string(pred.size()) + " vs " +
              std::to_string(gt.size()) + ")");
  const auto p = boundary_positions(pred);
  const auto g = boundary_positions(gt);
  // Both position lists are sorted, so the nearest element is found by bisection.
  auto within = [theta_b](std::size_t x, const std::vector<std::size_t>& set) {
    auto it = std::lower_bound(set.begin(), set.end(), x);
    std::size_t best = static_cast<std::size_t>(-1);
    if (it != set.end()) best = *it - x;
    if (it != set.begin()) best = std::min(best, x - *std::prev(it));
    return best < theta_b;
  };
  BoundaryCounts c;
  c.pred_total = p.size();
  c.gt_total = g.size();
  for (std::size_t x : p) c.pred_hits += within(x, g) ? 1 : 0;
  for (std::size_t x : g) c.gt_hits += within(x, p) ? 1 : 0;
  return c;
}

BoundaryScore boundary_prf(std::span<const std::uint8_t> pred,
                           std::span<const std::uint8_t> gt, std::size_t theta_b) {
  return boundary_counts(pred, gt, theta_b).score();
}

std::string to_string(F1Averaging v) {
  return v == F1Averaging::kGlobal ? "global" : "per_class";
}

F1Averaging parse_f1_averaging(const std::string& s) {
  if (s == "global") return F1Averaging::kGlobal;
  if (s == "per_class") return F1Averaging::kPerClass;
  Fail(ErrorCode::kInvalidArgument, "unknown f1 averaging '" + s + "' (global, per_class)");
}

MetricsAccumulator::MetricsAccumulator(std::size_t num_classes, MetricsConfig config)
    : num_classes_(num_classes), config_(config) {
  for (int k : kF1Thresholds) f1_per_class_[k].assign(num_classes_, {});
}

void MetricsAccumulator::add(std::span<const ClassId> pred, std::span<const ClassId> gt,
                             std::span<const std::uint8_t> pred_boundaries,
                             std::span<const std::uint8_t> gt_boundaries) {
  Require(pred.size() == gt.size(), ErrorCode::kShapeMismatch,
          "metrics: prediction and ground truth differ in length");
  ++videos_;
  frames_ += gt.size();
  for (std::size_t t = 0; t < gt.size(); ++t) correct_ += pred[t] == gt[t] ? 1 : 0;
  edit_sum_ += segmental_edit_score(pred, gt);
  const auto ps = segments_from_labels(pred);
  const auto gs = segments_from_labels(gt);
  for (int k : kF1Thresholds) {
    const auto counts = segmental_f1_counts_per_class(ps, gs, k, num_classes_);
    auto& acc = f1_per_class_[k];
    for (std::size_t c = 0; c < num_classes_; ++c) acc[c] += counts[c];
  }
  boundary_ += boundary_counts(pred_boundaries, gt_boundaries, config_.theta_b);
}

MetricsReport MetricsAccumulator::report() const {
  MetricsReport r;
  r.videos = videos_;
  r.frames = frames_;
  if (videos_ == 0) return r;
  r.accuracy = 100.0 * static_cast<double>(correct_) / static_cast<double>(frames_);
  r.edit = edit_sum_ / static_cast<double>(videos_);
  for (const auto& [k, per_class] : f1_per_class_) {
    if (config_.f1_averaging == F1Averaging::kGlobal) {
      DetectionCounts total;
      for (const auto& c : per_class) total += c;
      r.f1[k] = 100.0 * total.f1();
    } else {
      // Macro average over classes that occur in predictions or ground truth.
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& c : per_class) {
        if (c.tp + c.fp + c.fn == 0) continue;
        sum += c.f1();
        ++n;
      }
      r.f1[k] = n > 0 ? 100.0 * sum / static_cast<double>(n) : 0.0;
    }
  }
  r.boundary = boundary_.score();
  r.predicted_boundaries = boundary_.pred_total;
  return r;
}

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace

std::string format_report_table(
    const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::size_t width = 4;
  for (const auto& [name, _] : rows) width = std::max(width, name.size());
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s %7s %7s %7s %7s %7s %7s %7s %7s\n",
                static_cast<int>(width), "mode", "F1@10", "F1@25", "F1@50", "Edit", "Acc",
                "B.Prec", "B.Rec", "B.F1");
  os << line;
  for (const auto& [name, r] : rows) {
    std::snprintf(line, sizeof(line), "%-*s %7.2f %7.2f %7.2f %7.2f %7.2f %7.2f %7.2f %7.2f\n",
                  static_cast<int>(width), name.c_str(), r.f1.at(10), r.f1.at(25),
                  r.f1.at(50), r.edit, r.accuracy, 100.0 * r.boundary.precision,
                  100.0 * r.boundary.recall, 100.0 * r.boundary.f1);
    os << line;
  }
  return os.str();
}

std::string format_report_kv(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::ostringstream os;
  os << "# asrf-metrics v1\n";
  bool first = true;
  for (const auto& [name, r] : rows) {
    if (!first) os << '\n';
    first = false;
    os << '[' << name << "]\n";
    os << "videos=" << r.videos << '\n';
    os << "frames=" << r.frames << '\n';
    os << "accuracy=" << fixed(r.accuracy, 4) << '\n';
    os << "edit=" << fixed(r.edit, 4) << '\n';
    for (const auto& [k, v] : r.f1) os << "f1@" << k << '=' << fixed(v, 4) << '\n';
    os << "boundary.precision=" << fixed(r.boundary.precision, 4) << '\n';
    os << "boundary.recall=" << fixed(r.boundary.recall, 4) << '\n';
    os << "boundary.f1=" << fixed(r.boundary.f1, 4) << '\n';
    os << "predicted_boundaries=" << r.predicted_boundaries << '\n';
  }
  return os.str();
}

}  // namespace asrf
