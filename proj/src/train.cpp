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

#include "asrf/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "asrf/error.hpp"
#include "json.hpp"

namespace asrf {

void AdamConfig::validate() const {
  Require(learning_rate >= 0.0 && std::isfinite(learning_rate), ErrorCode::kInvalidArgument,
          "learning_rate must be >= 0");
  Require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
          ErrorCode::kInvalidArgument, "adam betas must be in [0, 1)");
  Require(epsilon > 0.0, ErrorCode::kInvalidArgument, "adam epsilon must be > 0");
}

template <typename T>
void adam_step(std::vector<Parameter<T>>& params, AdamState<T>& state,
               const AdamConfig& config) {
  config.validate();
  if (state.first_moment.empty() && state.step == 0) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.value.size(), T(0));
      state.second_moment.emplace_back(p.value.size(), T(0));
    }
  }
  Require(state.first_moment.size() == params.size() &&
              state.second_moment.size() == params.size(),
          ErrorCode::kShapeMismatch, "adam_step: optimizer state does not match parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    Require(params[i].grad.size() == params[i].value.size() &&
                state.first_moment[i].size() == params[i].value.size() &&
                state.second_moment[i].size() == params[i].value.size(),
            ErrorCode::kShapeMismatch,
            "adam_step: shape mismatch for parameter '" + params[i].name + "'");
  }
  ++state.step;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = params[i].value;
    const auto& grad = params[i].grad;
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double g = static_cast<double>(grad[j]);
      const double mj = b1 * static_cast<double>(m[j]) + (1.0 - b1) * g;
      const double vj = b2 * static_cast<double>(v[j]) + (1.0 - b2) * g * g;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      const double step = config.learning_rate * (mj / correction1) /
                          (std::sqrt(vj / correction2) + config.epsilon);
      value[j] = static_cast<T>(static_cast<double>(value[j]) - step);
    }
  }
}

template void adam_step<float>(std::vector<Parameter<float>>&, AdamState<float>&,
                               const AdamConfig&);
template void adam_step<double>(std::vector<Parameter<double>>&, AdamState<double>&,
                                const AdamConfig&);

void TrainConfig::validate() const {
  adam.validate();
  loss.validate();
  refine.validate();
  Require(epochs >= 1, ErrorCode::kInvalidArgument, "epochs must be >= 1");
  Require(batch_size >= 1, ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  Require(dropout >= 0.0 && dropout < 1.0, ErrorCode::kInvalidArgument,
          "dropout must be in [0, 1)");
}

std::string format_epoch_log(const EpochLog& log) {
  nlohmann::ordered_json j;
  j["epoch"] = log.epoch;
  j["loss"] = {{"total", log.train_loss.total},
               {"asb", log.train_loss.asb},
               {"brb", log.train_loss.brb},
               {"classification", log.train_loss.classification},
               {"smoothing", log.train_loss.smoothing}};
  if (log.heldout) {
    const auto& r = *log.heldout;
    j["heldout"] = {{"accuracy", r.accuracy},
                    {"edit", r.edit},
                    {"f1@10", r.f1.at(10)},
                    {"f1@25", r.f1.at(25)},
                    {"f1@50", r.f1.at(50)},
                    {"boundary_f1", r.boundary.f1}};
  }
  return j.dump();
}

namespace {

std::vector<BoundaryMask> boundary_targets(const Dataset& ds) {
  std::vector<BoundaryMask> out;
  out.reserve(ds.videos.size());
  for (const auto& v : ds.videos) out.push_back(boundaries_from_labels(v.labels));
  return out;
}

ModelShape resolve_shape(const TrainConfig& config, const Dataset& ds) {
  ModelShape shape = config.shape;
  if (shape.feature_dim == 0) shape.feature_dim = ds.feature_dim();
  if (shape.num_classes == 0) shape.num_classes = ds.classes.size();
  Require(shape.feature_dim == ds.feature_dim(), ErrorCode::kShapeMismatch,
          "model feature_dim " + std::to_string(shape.feature_dim) +
              " does not match data dimension " + std::to_string(ds.feature_dim()));
  Require(shape.num_classes == ds.classes.size(), ErrorCode::kShapeMismatch,
          "model num_classes does not match the class map");
  return shape;
}

bool finite(const LossTerms& t) {
  return std::isfinite(t.total) && std::isfinite(t.asb) && std::isfinite(t.brb);
}

}  // namespace

TrainResult train(const Dataset& train_set, const Dataset* heldout, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  config.validate();
  Require(!train_set.videos.empty(), ErrorCode::kInvalidArgument, "training split is empty");
  const std::size_t num_classes = train_set.classes.size();
  for (const auto& v : train_set.videos) validate_sample(v, num_classes);
  for (const auto& v : train_set.videos) {
    Require(v.feature_dim() == train_set.feature_dim(), ErrorCode::kShapeMismatch,
            "inconsistent feature dimension in video '" + v.id + "'");
  }
  if (heldout != nullptr) {
    for (const auto& v : heldout->videos) {
      validate_sample(v, num_classes);
      Require(v.feature_dim() == train_set.feature_dim(), ErrorCode::kShapeMismatch,
              "held-out video '" + v.id + "' has a different feature dimension");
    }
  }

  const ModelShape shape = resolve_shape(config, train_set);
  std::vector<Labels> label_seqs;
  for (const auto& v : train_set.videos) label_seqs.push_back(v.labels);
  const auto targets = boundary_targets(train_set);

  TrainResult result{AsrfModel<float>(shape), {}, 0, {}, 1.0};
  result.class_weights = median_frequency_weights(label_seqs, num_classes);
  result.positive_weight = positive_boundary_weight(targets);

  AsrfModel<float>& model = result.model;
  model.init_parameters(config.seed);
  model.zero_grad();
  AdamState<float> adam;
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<std::size_t> order(train_set.videos.size());
  std::iota(order.begin(), order.end(), 0);
  std::optional<AsrfModel<float>> best;
  double best_edit = -1.0;
  const double grad_scale = 1.0 / static_cast<double>(config.batch_size);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    LossTerms sum;
    std::size_t in_batch = 0;
    for (std::size_t idx : order) {
      const VideoSample& video = train_set.videos[idx];
      const auto pass = model.forward(video.features, config.dropout, rng);
      auto loss = total_loss<float>(pass.predictions(), video.labels, targets[idx],
                                    video.features, config.loss,
                                    result.class_weights.weights, result.positive_weight);
      if (!finite(loss.terms)) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "training diverged at epoch %zu on video '%s': total=%g asb=%g brb=%g",
                      epoch, video.id.c_str(), loss.terms.total, loss.terms.asb,
                      loss.terms.brb);
        Fail(ErrorCode::kDiverged, buf);
      }
      sum += loss.terms;
      if (grad_scale != 1.0) {
        for (auto& g : loss.grads.asb) {
          for (auto& x : g.values()) x = static_cast<float>(x * grad_scale);
        }
        for (auto& g : loss.grads.brb) {
          for (auto& x : g) x = static_cast<float>(x * grad_scale);
        }
      }
      model.backward(pass, loss.grads);
      if (++in_batch == config.batch_size) {
        adam_step(model.parameters(), adam, config.adam);
        model.zero_grad();
        in_batch = 0;
      }
    }
    if (in_batch > 0) {
      adam_step(model.parameters(), adam, config.adam);
      model.zero_grad();
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = sum.scaled(1.0 / static_cast<double>(order.size()));
    if (heldout != nullptr && !heldout->videos.empty()) {
      entry.heldout = evaluate_dataset(model, heldout->videos, config.refine, config.metrics,
                                       EvalMode::kRefined);
      if (entry.heldout->edit >= best_edit) {
        best_edit = entry.heldout->edit;
        best = model;
        result.best_epoch = epoch;
      }
    }
    if (on_epoch) on_epoch(entry);
    result.log.push_back(std::move(entry));
  }
  if (best) {
    result.model = std::move(*best);
  } else {
    result.best_epoch = config.epochs;
  }
  result.model.zero_grad();
  return result;
}

VideoOutput predict(const AsrfModel<float>& model, const Matrix<float>& features) {
  const auto pass = model.forward(features);
  VideoOutput out;
  out.asb = pass.predictions().asb.back();
  out.brb = pass.predictions().brb.back();
  return out;
}

std::vector<VideoOutput> predict_dataset(const AsrfModel<float>& model,
                                         std::span<const VideoSample> videos) {
  std::vector<VideoOutput> outputs(videos.size());
  const std::size_t workers = std::clamp<std::size_t>(
      std::thread::hardware_concurrency(), 1, std::max<std::size_t>(videos.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < videos.size(); ++i) {
      outputs[i] = predict(model, videos[i].features);
    }
    return outputs;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < videos.size(); i += workers) {
          outputs[i] = predict(model, videos[i].features);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outputs;
}

std::string to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::kRaw: return "raw";
    case EvalMode::kRefined: return "refined";
    case EvalMode::kOracleAsb: return "oracle_asb";
    case EvalMode::kOracleBoundaries: return "oracle_boundaries";
    case EvalMode::kRelabel: return "relabel";
    case EvalMode::kSmooth: return "smooth";
    case EvalMode::kSimilarity: return "similarity";
  }
  return "?";
}

EvalMode parse_eval_mode(const std::string& s) {
  for (EvalMode m : {EvalMode::kRaw, EvalMode::kRefined, EvalMode::kOracleAsb,
                     EvalMode::kOracleBoundaries, EvalMode::kRelabel, EvalMode::kSmooth,
                     EvalMode::kSimilarity}) {
    if (to_string(m) == s) return m;
  }
  Fail(ErrorCode::kInvalidArgument,
       "unknown eval mode '" + s +
           "' (raw, refined, oracle_asb, oracle_boundaries, relabel, smooth, similarity)");
}

ModeOutput apply_mode(EvalMode mode, const VideoOutput& output, const VideoSample& video,
                      std::size_t num_classes, const RefineConfig& refine) {
  const std::size_t frames = video.num_frames();
  Require(output.asb.rows() == frames && output.brb.size() == frames,
          ErrorCode::kShapeMismatch, "video '" + video.id + "': output length mismatch");
  Require(output.asb.cols() == num_classes, ErrorCode::kShapeMismatch,
          "video '" + video.id + "': class count mismatch");
  ModeOutput out;
  switch (mode) {
    case EvalMode::kRaw:
      out.labels = argmax_labels(output.asb);
      out.boundaries = boundaries_from_labels(out.labels);
      break;
    case EvalMode::kRefined:
      out.boundaries = select_boundaries(output.brb, refine.theta_p);
      out.labels = refine_by_boundaries(output.asb, out.boundaries);
      break;
    case EvalMode::kOracleAsb: {
      Matrix<float> one_hot(frames, num_classes);
      for (std::size_t t = 0; t < frames; ++t) one_hot(t, video.labels[t]) = 1.0f;
      out.boundaries = select_boundaries(output.brb, refine.theta_p);
      out.labels = refine_by_boundaries(one_hot, out.boundaries);
      break;
    }
    case EvalMode::kOracleBoundaries:
      out.boundaries = boundaries_from_labels(video.labels);
      out.labels = refine_by_boundaries(output.asb, out.boundaries);
      break;
    case EvalMode::kRelabel:
      out.labels = postprocess_relabel(argmax_labels(output.asb), refine.theta_t);
      out.boundaries = boundaries_from_labels(out.labels);
      break;
    case EvalMode::kSmooth:
      out.labels = postprocess_smooth(output.asb, refine.smooth_kernel);
      out.boundaries = boundaries_from_labels(out.labels);
      break;
    case EvalMode::kSimilarity:
      out.boundaries = frames >= 2 ? boundaries_from_similarity(video.features, refine.sim_sigma)
                                   : BoundaryMask(frames, 0);
      out.labels = refine_by_boundaries(output.asb, out.boundaries);
      break;
  }
  return out;
}

MetricsReport evaluate_outputs(std::span<const VideoSample> videos,
                               std::span<const VideoOutput> outputs, std::size_t num_classes,
                               const RefineConfig& refine, const MetricsConfig& metrics,
                               EvalMode mode) {
  refine.validate();
  Require(videos.size() == outputs.size(), ErrorCode::kShapeMismatch,
          "evaluate: video/output count mismatch");
  MetricsAccumulator acc(num_classes, metrics);
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const auto out = apply_mode(mode, outputs[i], videos[i], num_classes, refine);
    acc.add(out.labels, videos[i].labels, out.boundaries,
            boundaries_from_labels(videos[i].labels));
  }
  return acc.report();
}

MetricsReport evaluate_dataset(const AsrfModel<float>& model,
                               std::span<const VideoSample> videos,
                               const RefineConfig& refine, const MetricsConfig& metrics,
                               EvalMode mode) {
  for (const auto& v : videos) {
    Require(v.feature_dim() == model.shape().feature_dim, ErrorCode::kShapeMismatch,
            "video '" + v.id + "' has feature dimension " + std::to_string(v.feature_dim()) +
                ", model expects " + std::to_string(model.shape().feature_dim));
    validate_sample(v, model.shape().num_classes);
  }
  const auto outputs = predict_dataset(model, videos);
  return evaluate_outputs(videos, outputs, model.shape().num_classes, refine, metrics, mode);
}

std::vector<ThetaAblationRow> ablate_theta_p(std::span<const VideoSample> videos,
                                             std::span<const VideoOutput> outputs,
                                             std::size_t num_classes,
                                             std::span<const double> thetas,
                                             const RefineConfig& refine,
                                             const MetricsConfig& metrics) {
  std::vector<ThetaAblationRow> rows;
  for (double theta : thetas) {
    RefineConfig cfg = refine;
    cfg.theta_p = theta;
    rows.push_back({theta, evaluate_outputs(videos, outputs, num_classes, cfg, metrics,
                                            EvalMode::kRefined)});
  }
  return rows;
}

std::string format_theta_table(std::span<const ThetaAblationRow> rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%7s %10s %7s %7s %7s | %7s %7s %7s %7s %7s\n",
                "theta_p", "boundaries", "B.Prec", "B.Rec", "B.F1", "F1@10", "F1@25",
                "F1@50", "Edit", "Acc");
  os << line;
  for (const auto& r : rows) {
    const auto& m = r.refined;
    std::snprintf(line, sizeof(line),
                  "%7.2f %10zu %7.2f %7.2f %7.2f | %7.2f %7.2f %7.2f %7.2f %7.2f\n", r.theta_p,
                  m.predicted_boundaries, 100.0 * m.boundary.precision,
                  100.0 * m.boundary.recall, 100.0 * m.boundary.f1, m.f1.at(10), m.f1.at(25),
                  m.f1.at(50), m.edit, m.accuracy);
    os << line;
  }
  return os.str();
}

std::vector<StageAblationRow> ablate_brb_stages(const Dataset& train_set,
                                                const Dataset& test_set,
                                                const TrainConfig& base,
                                                std::span<const std::size_t> stage_counts) {
  std::vector<StageAblationRow> rows;
  for (std::size_t stages : stage_counts) {
    TrainConfig cfg = base;
    cfg.shape.brb_stages = stages;
    auto trained = train(train_set, &test_set, cfg);
    const auto outputs = predict_dataset(trained.model, test_set.videos);
    const std::size_t c = trained.model.shape().num_classes;
    rows.push_back({stages,
                    evaluate_outputs(test_set.videos, outputs, c, cfg.refine, cfg.metrics,
                                     EvalMode::kRefined),
                    evaluate_outputs(test_set.videos, outputs, c, cfg.refine, cfg.metrics,
                                     EvalMode::kOracleAsb)});
  }
  return rows;
}

std::string format_stage_table(std::span<const StageAblationRow> rows) {
  std::ostringstream os;
  char line[320];
  std::snprintf(line, sizeof(line),
                "%6s %7s %7s %7s | %7s %7s %7s %7s %7s | %7s %7s %7s %7s %7s\n", "stages",
                "B.Prec", "B.Rec", "B.F1", "F1@10", "F1@25", "F1@50", "Edit", "Acc",
                "O.F1@10", "O.F1@25", "O.F1@50", "O.Edit", "O.Acc");
  os << line;
  for (const auto& r : rows) {
    const auto& m = r.refined;
    const auto& o = r.oracle_asb;
    std::snprintf(line, sizeof(line),
                  "%6zu %7.2f %7.2f %7.2f | %7.2f %7.2f %7.2f %7.2f %7.2f | %7.2f %7.2f %7.2f "
                  "%7.2f %7.2f\n",
                  r.brb_stages, 100.0 * m.boundary.precision, 100.0 * m.boundary.recall,
                  100.0 * m.boundary.f1, m.f1.at(10), m.f1.at(25), m.f1.at(50), m.edit,
                  m.accuracy, o.f1.at(10), o.f1.at(25), o.f1.at(50), o.edit, o.accuracy);
    os << line;
  }
  return os.str();
}

}  // namespace asrf
