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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "asrf/asrf.h"
#include "asrf/core.hpp"
#include "asrf/io.hpp"
#include "asrf/losses.hpp"
#include "asrf/metrics.hpp"
#include "asrf/refine.hpp"
#include "asrf/synth.hpp"
#include "asrf/tcn.hpp"
#include "asrf/train.hpp"

namespace fs = std::filesystem;
using namespace asrf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// ---- shared state between criteria 4, 5 and 7 ----

struct SyntheticRun {
  bool ready = false;
  fs::path root;
  Dataset train;
  Dataset test;
  TrainConfig config;
  std::optional<AsrfModel<float>> model;
  std::vector<VideoOutput> outputs;
  double train_seconds = 0.0;
};

SyntheticRun g_run;

// ---- criterion 1 ----

Outcome gradient_check() {
  const auto start = Clock::now();
  ModelShape shape;
  shape.feature_dim = 3;
  shape.num_classes = 3;
  shape.channels = 8;
  shape.layers = 2;
  shape.asb_stages = 1;
  shape.brb_stages = 1;
  AsrfModel<double> model(shape);
  model.init_parameters(11);

  const std::size_t frames = 12;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix<double> features(frames, shape.feature_dim);
  for (double& x : features.values()) x = 0.5 * normal(rng);
  const Labels labels = {0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 0, 0};
  const BoundaryMask targets = boundaries_from_labels(labels);
  LossConfig cfg;
  cfg.classification = ClassificationLoss::kCrossEntropy;
  cfg.smoothing = SmoothingLoss::kGsTmse;
  cfg.lambda_brb = 0.1;
  const std::vector<double> weights(shape.num_classes, 1.0);
  const std::vector<BoundaryMask> masks = {targets};
  const double w_p = positive_boundary_weight(masks);

  auto loss_at = [&]() {
    const auto pass = model.forward(features);
    return total_loss<double>(pass.predictions(), labels, targets, features, cfg, weights, w_p);
  };

  model.zero_grad();
  {
    const auto pass = model.forward(features);
    const auto loss =
        total_loss<double>(pass.predictions(), labels, targets, features, cfg, weights, w_p);
    model.backward(pass, loss.grads);
  }
  const double h = 1e-5;
  double worst = 0.0;
  std::string worst_name;
  std::size_t checked = 0;
  for (auto& p : model.parameters()) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + h;
      const double up = loss_at().terms.total;
      p.value[i] = saved - h;
      const double down = loss_at().terms.total;
      p.value[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = p.grad[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      const double rel = std::abs(analytic - numeric) / denom;
      if (rel > worst) {
        worst = rel;
        worst_name = p.name + "[" + std::to_string(i) + "]";
      }
      ++checked;
    }
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-4 && elapsed < 60.0,
          fmt("max rel err %.3g at %s over %zu parameters (%.2f s, limit 60 s)", worst,
              worst_name.c_str(), checked, elapsed)};
}

// ---- criterion 2 ----

std::size_t levenshtein_oracle(const std::vector<ClassId>& a, std::size_t i,
                               const std::vector<ClassId>& b, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  if (a[i] == b[j]) return levenshtein_oracle(a, i + 1, b, j + 1);
  return 1 + std::min({levenshtein_oracle(a, i + 1, b, j), levenshtein_oracle(a, i, b, j + 1),
                       levenshtein_oracle(a, i + 1, b, j + 1)});
}

std::vector<ClassId> random_segment_classes(std::mt19937_64& rng, std::size_t n,
                                            std::size_t classes) {
  std::vector<ClassId> out;
  std::uniform_int_distribution<ClassId> pick(0, static_cast<ClassId>(classes - 1));
  while (out.size() < n) {
    const ClassId c = pick(rng);
    if (out.empty() || out.back() != c) out.push_back(c);
  }
  return out;
}

Labels expand(const std::vector<ClassId>& segment_classes, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len(1, 4);
  Labels out;
  for (ClassId c : segment_classes) out.insert(out.end(), len(rng), c);
  return out;
}

BoundaryMask mask_of(std::size_t frames, std::initializer_list<std::size_t> at) {
  BoundaryMask m(frames, 0);
  for (auto t : at) m[t] = 1;
  return m;
}

Outcome metric_oracles() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> len(1, 8);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto pa = random_segment_classes(rng, len(rng), 4);
    const auto ga = random_segment_classes(rng, len(rng), 4);
    const Labels pred = expand(pa, rng);
    const Labels gt = expand(ga, rng);
    const double d = static_cast<double>(levenshtein_oracle(pa, 0, ga, 0));
    const double expected =
        std::max(0.0, (1.0 - d / static_cast<double>(std::max(pa.size(), ga.size()))) * 100.0);
    if (segmental_edit_score(pred, gt) != expected) ++mismatches;
  }

  std::vector<std::string> failed;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) failed.push_back(what);
  };
  auto prf_is = [](const BoundaryScore& s, double p, double r, double f) {
    return s.precision == p && s.recall == r && s.f1 == f;
  };
  expect(prf_is(boundary_prf(mask_of(10, {3}), mask_of(10, {5}), 5), 1, 1, 1),
         "boundary {3} vs {5}");
  expect(prf_is(boundary_prf(mask_of(30, {10}), mask_of(30, {20}), 5), 0, 0, 0),
         "boundary {10} vs {20}");
  expect(prf_is(boundary_prf(mask_of(12, {2, 7}), mask_of(12, {2, 7}), 5), 1, 1, 1),
         "boundary pred == gt");
  expect(prf_is(boundary_prf(mask_of(12, {}), mask_of(12, {}), 5), 1, 1, 1),
         "boundary both empty");
  expect(prf_is(boundary_prf(mask_of(12, {}), mask_of(12, {4}), 5), 0, 0, 0),
         "boundary empty prediction");

  const std::vector<Segment> whole = {{0, 0, 99}};
  for (double k : {10.0, 25.0, 50.0}) {
    expect(segmental_f1(whole, whole, k) == 100.0, "f1 pred == gt");
  }
  const std::vector<Segment> inner = {{0, 10, 89}};
  expect(segmental_f1(inner, whole, 50.0) == 100.0, "f1 iou 0.8 at k=50");
  const std::vector<Segment> halves = {{0, 0, 49}, {0, 50, 99}};
  const auto counts = segmental_f1_counts(halves, whole, 25.0);
  expect(counts.tp == 1 && counts.fp == 1 && counts.fn == 0, "f1 split counts");
  expect(counts.precision() == 0.5 && counts.recall() == 1.0, "f1 split precision/recall");
  expect(segmental_f1(halves, whole, 25.0) == 2.0 * 0.5 * 1.0 / 1.5 * 100.0,
         "f1 split value");

  const double elapsed = seconds_since(start);
  std::string detail = fmt("%zu/1000 edit mismatches, %zu hand examples failed (%.2f s, limit 10 s)",
                           mismatches, failed.size(), elapsed);
  for (const auto& f : failed) detail += "; " + f;
  return {mismatches == 0 && failed.empty() && elapsed < 10.0, detail};
}

// ---- criterion 3 ----

Outcome refinement_recovery() {
  std::mt19937_64 rng(77);
  std::size_t failures = 0;
  std::size_t corrupted_total = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t classes = 2 + rng() % 5;
    std::uniform_int_distribution<std::size_t> seg_len(1, 30);
    const auto seg_classes = random_segment_classes(rng, 1 + rng() % 12, classes);
    Labels truth;
    for (ClassId c : seg_classes) truth.insert(truth.end(), seg_len(rng), c);
    Labels noisy = truth;
    for (const auto& s : segments_from_labels(truth)) {
      const std::size_t n = s.length();
      const std::size_t max_flips = (n - 1) / 2;  // strictly fewer than half
      std::vector<std::size_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = s.start + i;
      std::shuffle(idx.begin(), idx.end(), rng);
      const std::size_t flips = max_flips == 0 ? 0 : rng() % (max_flips + 1);
      for (std::size_t i = 0; i < flips; ++i) {
        ClassId other = static_cast<ClassId>(rng() % (classes - 1));
        if (other >= s.class_id) ++other;
        noisy[idx[i]] = other;
      }
      corrupted_total += flips;
    }
    Matrix<float> probs(truth.size(), classes, 0.0f);
    std::uniform_real_distribution<float> jitter(0.0f, 0.2f);
    for (std::size_t t = 0; t < truth.size(); ++t) {
      float sum = 0.0f;
      for (std::size_t c = 0; c < classes; ++c) sum += probs(t, c) = jitter(rng);
      probs(t, noisy[t]) += 1.0f;
      sum += 1.0f;
      for (std::size_t c = 0; c < classes; ++c) probs(t, c) /= sum;
    }
    if (refine_by_boundaries(probs, boundaries_from_labels(truth)) != truth) ++failures;
  }
  return {failures == 0,
          fmt("%zu/200 sequences not recovered (%zu frames corrupted in total)", failures,
              corrupted_total)};
}

// ---- criterion 4 ----

Outcome end_to_end() {
  const auto start = Clock::now();
  SynthConfig sc;
  sc.num_videos = 40;
  sc.num_classes = 5;
  sc.feature_dim = 8;
  sc.min_frames = 200;
  sc.max_frames = 400;
  sc.noise_level = 0.3;
  sc.seed = 1234;
  const auto data = generate_synthetic_dataset(sc);
  g_run.root = fs::temp_directory_path() / ("asrf_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(g_run.root);
  std::vector<std::string> train_ids, test_ids;
  for (std::size_t i = 0; i < data.videos.size(); ++i) {
    (i < 32 ? train_ids : test_ids).push_back(data.videos[i].id);
  }
  const DatasetLayout layout{g_run.root};
  write_dataset(layout, data.classes, data.videos, train_ids, test_ids);
  g_run.train = load_dataset_split(layout, layout.split("train"));
  g_run.test = load_dataset_split(layout, layout.split("test"));

  TrainConfig& cfg = g_run.config;
  cfg.epochs = 30;
  cfg.seed = 3;
  cfg.shape.channels = 32;
  cfg.shape.layers = 6;
  cfg.shape.asb_stages = 2;
  cfg.shape.brb_stages = 2;
  auto result = train(g_run.train, &g_run.test, cfg);
  g_run.model = std::move(result.model);
  g_run.train_seconds = seconds_since(start);
  g_run.outputs = predict_dataset(*g_run.model, g_run.test.videos);
  g_run.ready = true;

  const std::size_t c = sc.num_classes;
  const auto raw =
      evaluate_outputs(g_run.test.videos, g_run.outputs, c, cfg.refine, cfg.metrics, EvalMode::kRaw);
  const auto refined = evaluate_outputs(g_run.test.videos, g_run.outputs, c, cfg.refine,
                                        cfg.metrics, EvalMode::kRefined);
  const double elapsed = seconds_since(start);
  const bool pass = refined.accuracy >= 90.0 && refined.edit >= raw.edit &&
                    refined.f1.at(50) >= raw.f1.at(50) && elapsed < 600.0;
  return {pass, fmt("acc raw %.2f refined %.2f (>= 90); edit raw %.2f refined %.2f; "
                    "F1@50 raw %.2f refined %.2f; best epoch %zu/%zu (%.1f s, limit 600 s)",
                    raw.accuracy, refined.accuracy, raw.edit, refined.edit, raw.f1.at(50),
                    refined.f1.at(50), result.best_epoch, cfg.epochs, elapsed)};
}

// ---- criterion 5 ----

Outcome postprocessor_ordering() {
  if (!g_run.ready) return {false, "criterion 4 run unavailable"};
  std::mt19937_64 rng(99);
  std::vector<VideoOutput> injected = g_run.outputs;
  const std::size_t classes = g_run.test.classes.size();
  std::size_t spikes = 0;
  for (std::size_t v = 0; v < injected.size(); ++v) {
    auto& asb = injected[v].asb;
    const Labels argmax = argmax_labels(asb);
    const std::size_t frames = asb.rows();
    for (int k = 0; k < 6; ++k) {
      const std::size_t width = 1 + rng() % 2;
      const std::size_t t0 = 3 + rng() % (frames - width - 6);
      const ClassId here = argmax[t0];
      ClassId fake = static_cast<ClassId>(rng() % (classes - 1));
      if (fake >= here) ++fake;
      for (std::size_t t = t0; t < t0 + width; ++t) {
        for (std::size_t c = 0; c < classes; ++c) asb(t, c) = 0.02f;
        asb(t, fake) = 1.0f - 0.02f * static_cast<float>(classes - 1);
      }
      ++spikes;
    }
  }
  const auto& cfg = g_run.config;
  auto score = [&](EvalMode m) {
    return evaluate_outputs(g_run.test.videos, injected, classes, cfg.refine, cfg.metrics, m)
        .edit;
  };
  RefineConfig relabel_cfg = cfg.refine;
  relabel_cfg.theta_t = 5;
  const double none = score(EvalMode::kRaw);
  const double relabel =
      evaluate_outputs(g_run.test.videos, injected, classes, relabel_cfg, cfg.metrics,
                       EvalMode::kRelabel)
          .edit;
  const double asrf = score(EvalMode::kRefined);
  const double similarity = score(EvalMode::kSimilarity);
  return {relabel > none && asrf > none,
          fmt("%zu spikes; edit none %.2f, relabel(5) %.2f, ASRF %.2f, similarity %.2f "
              "(reported only)",
              spikes, none, relabel, asrf, similarity)};
}

// ---- criterion 6 ----

Outcome loss_identities() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const std::size_t frames = 9, classes = 4;
  auto random_probs = [&]() {
    Matrix<double> p(frames, classes);
    for (std::size_t t = 0; t < frames; ++t) {
      double s = 0.0;
      for (std::size_t c = 0; c < classes; ++c) s += p(t, c) = u(rng);
      for (std::size_t c = 0; c < classes; ++c) p(t, c) /= s;
    }
    return p;
  };
  const Matrix<double> probs = random_probs();
  Matrix<double> flat(frames, 3, 0.7);
  const bool gs_equal = gs_tmse(probs, flat, 4.0, 1.0) == tmse(probs, 4.0);

  Labels labels(frames);
  for (std::size_t t = 0; t < frames; ++t) labels[t] = static_cast<ClassId>(t * classes / frames);
  const BoundaryMask targets = boundaries_from_labels(labels);
  Predictions<double> pred;
  for (int h = 0; h < 3; ++h) pred.asb.push_back(random_probs());
  for (int h = 0; h < 3; ++h) {
    std::vector<double> b(frames);
    for (double& x : b) x = u(rng) * 0.9;
    pred.brb.push_back(b);
  }
  Matrix<double> feats(frames, 3);
  for (double& x : feats.values()) x = u(rng);
  LossConfig cfg;
  cfg.lambda_brb = 0.0;
  const std::vector<double> weights = {1.5, 0.5, 2.0, 1.0};
  const auto total = total_loss<double>(pred, labels, targets, feats, cfg, weights, 3.0);
  const bool lambda_zero = total.terms.total == total.terms.asb;

  double worst = 0.0;
  for (double w : {0.25, 1.0, 3.7}) {
    const std::vector<double> uniform(classes, w);
    const double weighted = cross_entropy(probs, labels, uniform);
    const double plain = cross_entropy(probs, labels);
    worst = std::max(worst, std::abs(weighted - w * plain));
  }
  const bool ce_scaled = worst <= 1e-12;
  return {gs_equal && lambda_zero && ce_scaled,
          fmt("gs_tmse==tmse on flat features: %s; lambda=0 total==L_asb: %s; "
              "uniform-weight CE max |diff| %.3g (<= 1e-12)",
              gs_equal ? "yes" : "no", lambda_zero ? "yes" : "no", worst)};
}

// ---- criterion 7 ----

struct Handle {
  asrf_model* model = nullptr;
  asrf_dataset* data = nullptr;
  asrf_config* config = nullptr;
  ~Handle() {
    asrf_model_free(model);
    asrf_dataset_free(data);
    asrf_config_free(config);
  }
};

Outcome theta_ablation() {
  if (!g_run.ready) return {false, "criterion 4 run unavailable"};
  const fs::path ckpt = g_run.root / "model.bin";
  save_checkpoint(ckpt, *g_run.model);
  const std::vector<double> thetas = {0.1, 0.3, 0.5, 0.7, 0.9};
  auto run_once = [&](std::vector<std::size_t>& counts, std::string& table) -> std::string {
    Handle h;
    if (asrf_model_load(ckpt.c_str(), &h.model) != ASRF_OK ||
        asrf_dataset_load(g_run.root.c_str(), (g_run.root / "splits/test.txt").c_str(),
                          &h.data) != ASRF_OK ||
        asrf_config_new(&h.config) != ASRF_OK) {
      return asrf_last_error();
    }
    counts.assign(thetas.size(), 0);
    char* out = nullptr;
    if (asrf_ablate_theta_p(h.model, h.data, h.config, thetas.data(), thetas.size(),
                            counts.data(), &out) != ASRF_OK) {
      return asrf_last_error();
    }
    table = out;
    asrf_string_free(out);
    return {};
  };
  std::vector<std::size_t> c1, c2;
  std::string t1, t2;
  const std::string e1 = run_once(c1, t1);
  const std::string e2 = run_once(c2, t2);
  if (!e1.empty() || !e2.empty()) return {false, "ablation failed: " + e1 + e2};
  bool monotone = true;
  std::string seq;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    if (i > 0 && c1[i] > c1[i - 1]) monotone = false;
    seq += (i ? "," : "") + std::to_string(c1[i]);
  }
  const bool identical = t1 == t2 && c1 == c2;
  return {monotone && identical,
          fmt("boundary counts at theta_p 0.1..0.9: %s (non-increasing: %s); tables "
              "byte-identical: %s",
              seq.c_str(), monotone ? "yes" : "no", identical ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", gradient_check},
      {2, "metric oracles", metric_oracles},
      {3, "refinement recovery", refinement_recovery},
      {4, "end-to-end synthetic run", end_to_end},
      {5, "postprocessor ordering", postprocessor_ordering},
      {6, "loss identities", loss_identities},
      {7, "theta_p ablation", theta_ablation},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  if (!g_run.root.empty()) fs::remove_all(g_run.root);
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
