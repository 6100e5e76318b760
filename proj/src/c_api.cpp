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

#include "asrf/asrf.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <optional>
#include <string>

#include "asrf/config.hpp"
#include "asrf/error.hpp"
#include "asrf/io.hpp"
#include "asrf/metrics.hpp"
#include "asrf/refine.hpp"
#include "asrf/synth.hpp"
#include "asrf/train.hpp"

struct asrf_config {
  asrf::RunConfig value;
  std::string dataset_root;
  std::string output_dir;
};

struct asrf_dataset {
  asrf::Dataset value;
};

struct asrf_model {
  asrf::AsrfModel<float> value;
  std::size_t best_epoch = 0;
};

struct asrf_mapping {
  asrf::ClassMap value;
};

namespace {

thread_local std::string g_last_error;

asrf_status to_status(asrf::ErrorCode code) {
  switch (code) {
    case asrf::ErrorCode::kInvalidArgument: return ASRF_ERR_INVALID_ARGUMENT;
    case asrf::ErrorCode::kShapeMismatch: return ASRF_ERR_SHAPE_MISMATCH;
    case asrf::ErrorCode::kIo: return ASRF_ERR_IO;
    case asrf::ErrorCode::kFormat: return ASRF_ERR_FORMAT;
    case asrf::ErrorCode::kDiverged: return ASRF_ERR_DIVERGED;
    case asrf::ErrorCode::kState: return ASRF_ERR_STATE;
  }
  return ASRF_ERR_INTERNAL;
}

template <typename F>
asrf_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return ASRF_OK;
  } catch (const asrf::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ASRF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ASRF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return ASRF_ERR_INTERNAL;
  }
}

void require_arg(const void* p, const char* name) {
  asrf::Require(p != nullptr, asrf::ErrorCode::kInvalidArgument,
                std::string(name) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void refresh_paths(asrf_config* c) {
  c->dataset_root = c->value.paths.dataset_root.string();
  c->output_dir = c->value.paths.output_dir.string();
}

asrf_metrics to_c(const asrf::MetricsReport& r) {
  asrf_metrics m{};
  m.accuracy = r.accuracy;
  m.edit = r.edit;
  m.f1_10 = r.f1.at(10);
  m.f1_25 = r.f1.at(25);
  m.f1_50 = r.f1.at(50);
  m.boundary_precision = r.boundary.precision;
  m.boundary_recall = r.boundary.recall;
  m.boundary_f1 = r.boundary.f1;
  m.videos = r.videos;
  m.frames = r.frames;
  m.predicted_boundaries = r.predicted_boundaries;
  return m;
}

asrf::MetricsReport from_c(const asrf_metrics& m) {
  asrf::MetricsReport r;
  r.accuracy = m.accuracy;
  r.edit = m.edit;
  r.f1 = {{10, m.f1_10}, {25, m.f1_25}, {50, m.f1_50}};
  r.boundary = {m.boundary_precision, m.boundary_recall, m.boundary_f1};
  r.videos = m.videos;
  r.frames = m.frames;
  r.predicted_boundaries = m.predicted_boundaries;
  return r;
}

asrf::Matrix<float> matrix_from(const float* data, std::size_t rows, std::size_t cols) {
  asrf::Matrix<float> m(rows, cols);
  if (rows * cols > 0) std::memcpy(m.data(), data, rows * cols * sizeof(float));
  return m;
}

void require_model_matches(const asrf_model* model, const asrf_dataset* dataset) {
  const auto& shape = model->value.shape();
  asrf::Require(dataset->value.classes.size() == shape.num_classes,
                asrf::ErrorCode::kShapeMismatch,
                "dataset has " + std::to_string(dataset->value.classes.size()) +
                    " classes, model expects " + std::to_string(shape.num_classes));
}

}  // namespace

extern "C" {

const char* asrf_version(void) { return "1.0.0"; }

const char* asrf_status_string(asrf_status status) {
  switch (status) {
    case ASRF_OK: return "ok";
    case ASRF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ASRF_ERR_SHAPE_MISMATCH: return "shape mismatch";
    case ASRF_ERR_IO: return "i/o error";
    case ASRF_ERR_FORMAT: return "format error";
    case ASRF_ERR_DIVERGED: return "training diverged";
    case ASRF_ERR_STATE: return "invalid state";
    case ASRF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* asrf_last_error(void) { return g_last_error.c_str(); }

void asrf_string_free(char* s) { std::free(s); }

// ---- config ----

asrf_status asrf_config_new(asrf_config** out) {
  return guarded([&] {
    require_arg(out, "out");
    *out = new asrf_config{};
    refresh_paths(*out);
  });
}

asrf_status asrf_config_load(const char* path, asrf_config** out) {
  return guarded([&] {
    require_arg(path, "path");
    require_arg(out, "out");
    *out = new asrf_config{asrf::RunConfig::Load(path), {}, {}};
    refresh_paths(*out);
  });
}

asrf_status asrf_config_from_json(const char* json, asrf_config** out) {
  return guarded([&] {
    require_arg(json, "json");
    require_arg(out, "out");
    *out = new asrf_config{asrf::RunConfig::FromJson(json), {}, {}};
    refresh_paths(*out);
  });
}

asrf_status asrf_config_set(asrf_config* config, const char* key, const char* value) {
  return guarded([&] {
    require_arg(config, "config");
    require_arg(key, "key");
    require_arg(value, "value");
    asrf::RunConfig next = config->value;
    next.set(key, value);
    next.validate();
    config->value = std::move(next);
    refresh_paths(config);
  });
}

asrf_status asrf_config_to_json(const asrf_config* config, char** out) {
  return guarded([&] {
    require_arg(config, "config");
    require_arg(out, "out");
    *out = dup_string(config->value.to_json());
  });
}

asrf_status asrf_config_check_paths(const asrf_config* config, int need_train, int need_test) {
  return guarded([&] {
    require_arg(config, "config");
    config->value.check_paths(need_train != 0, need_test != 0);
  });
}

const char* asrf_config_dataset_root(const asrf_config* config) {
  return config ? config->dataset_root.c_str() : "";
}

const char* asrf_config_output_dir(const asrf_config* config) {
  return config ? config->output_dir.c_str() : "";
}

asrf_status asrf_config_split_path(const asrf_config* config, int test, char** out) {
  return guarded([&] {
    require_arg(config, "config");
    require_arg(out, "out");
    const auto p = test ? config->value.paths.resolved_test_split()
                        : config->value.paths.resolved_train_split();
    *out = dup_string(p.string());
  });
}

void asrf_config_free(asrf_config* config) { delete config; }

// ---- synth ----

void asrf_synth_options_default(asrf_synth_options* options) {
  if (options == nullptr) return;
  const asrf::SynthConfig d;
  options->num_videos = d.num_videos;
  options->num_test = d.num_videos / 5;
  options->min_frames = d.min_frames;
  options->max_frames = d.max_frames;
  options->num_classes = d.num_classes;
  options->feature_dim = d.feature_dim;
  options->min_segment = d.min_segment;
  options->max_segment = d.max_segment;
  options->noise_level = d.noise_level;
  options->seed = d.seed;
}

asrf_status asrf_synthesize(const asrf_synth_options* options, const char* root) {
  return guarded([&] {
    require_arg(options, "options");
    require_arg(root, "root");
    asrf::SynthConfig cfg;
    cfg.num_videos = options->num_videos;
    cfg.min_frames = options->min_frames;
    cfg.max_frames = options->max_frames;
    cfg.num_classes = options->num_classes;
    cfg.feature_dim = options->feature_dim;
    cfg.min_segment = options->min_segment;
    cfg.max_segment = options->max_segment;
    cfg.noise_level = options->noise_level;
    cfg.seed = options->seed;
    cfg.validate();
    asrf::Require(options->num_test < options->num_videos, asrf::ErrorCode::kInvalidArgument,
                  "num_test must leave at least one training video");
    const auto data = asrf::generate_synthetic_dataset(cfg);
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    const std::size_t n_train = data.videos.size() - options->num_test;
    for (std::size_t i = 0; i < data.videos.size(); ++i) {
      (i < n_train ? train_ids : test_ids).push_back(data.videos[i].id);
    }
    asrf::write_dataset(asrf::DatasetLayout{root}, data.classes, data.videos, train_ids,
                        test_ids);
  });
}

// ---- dataset ----

asrf_status asrf_dataset_load(const char* root, const char* split_file, asrf_dataset** out) {
  return guarded([&] {
    require_arg(root, "root");
    require_arg(split_file, "split_file");
    require_arg(out, "out");
    *out = new asrf_dataset{asrf::load_dataset_split(asrf::DatasetLayout{root}, split_file)};
  });
}

size_t asrf_dataset_size(const asrf_dataset* d) { return d ? d->value.videos.size() : 0; }
size_t asrf_dataset_num_classes(const asrf_dataset* d) { return d ? d->value.classes.size() : 0; }
size_t asrf_dataset_feature_dim(const asrf_dataset* d) { return d ? d->value.feature_dim() : 0; }

size_t asrf_dataset_num_frames(const asrf_dataset* d, size_t index) {
  return d && index < d->value.videos.size() ? d->value.videos[index].num_frames() : 0;
}

const char* asrf_dataset_video_id(const asrf_dataset* d, size_t index) {
  return d && index < d->value.videos.size() ? d->value.videos[index].id.c_str() : nullptr;
}

void asrf_dataset_free(asrf_dataset* dataset) { delete dataset; }

// ---- model ----

asrf_status asrf_train(const asrf_config* config, const asrf_dataset* train,
                       const asrf_dataset* heldout, const char* log_path,
                       asrf_epoch_callback callback, void* user_data, asrf_model** out) {
  return guarded([&] {
    require_arg(config, "config");
    require_arg(train, "train");
    require_arg(out, "out");
    std::optional<std::ofstream> log;
    if (log_path != nullptr) {
      log.emplace(log_path, std::ios::trunc);
      asrf::Require(log->good(), asrf::ErrorCode::kIo,
                    std::string("cannot open log file ") + log_path);
    }
    auto on_epoch = [&](const asrf::EpochLog& entry) {
      const std::string line = asrf::format_epoch_log(entry);
      if (log) {
        *log << line << '\n';
        log->flush();
      }
      if (callback != nullptr) callback(line.c_str(), user_data);
    };
    auto result = asrf::train(train->value, heldout ? &heldout->value : nullptr,
                              config->value.train, on_epoch);
    if (log) {
      log->close();
      asrf::Require(!log->fail(), asrf::ErrorCode::kIo,
                    std::string("failed writing log file ") + log_path);
    }
    *out = new asrf_model{std::move(result.model), result.best_epoch};
  });
}

asrf_status asrf_model_save(const asrf_model* model, const char* path) {
  return guarded([&] {
    require_arg(model, "model");
    require_arg(path, "path");
    asrf::save_checkpoint(path, model->value);
  });
}

asrf_status asrf_model_load(const char* path, asrf_model** out) {
  return guarded([&] {
    require_arg(path, "path");
    require_arg(out, "out");
    *out = new asrf_model{asrf::load_checkpoint(path), 0};
  });
}

asrf_status asrf_model_shape_get(const asrf_model* model, asrf_model_shape* out) {
  return guarded([&] {
    require_arg(model, "model");
    require_arg(out, "out");
    const auto& s = model->value.shape();
    *out = {s.feature_dim, s.num_classes, s.channels, s.layers, s.asb_stages, s.brb_stages};
  });
}

size_t asrf_model_parameter_count(const asrf_model* model) {
  return model ? model->value.parameter_count() : 0;
}

size_t asrf_model_best_epoch(const asrf_model* model) { return model ? model->best_epoch : 0; }

asrf_status asrf_model_predict(const asrf_model* model, const float* features, size_t frames,
                               size_t feature_dim, float* asb_out, float* brb_out) {
  return guarded([&] {
    require_arg(model, "model");
    require_arg(features, "features");
    require_arg(asb_out, "asb_out");
    require_arg(brb_out, "brb_out");
    const auto& shape = model->value.shape();
    asrf::Require(feature_dim == shape.feature_dim, asrf::ErrorCode::kShapeMismatch,
                  "features have dimension " + std::to_string(feature_dim) +
                      ", model expects " + std::to_string(shape.feature_dim));
    asrf::Require(frames > 0, asrf::ErrorCode::kInvalidArgument, "frames must be > 0");
    const auto out = asrf::predict(model->value, matrix_from(features, frames, feature_dim));
    std::memcpy(asb_out, out.asb.data(), out.asb.size() * sizeof(float));
    std::memcpy(brb_out, out.brb.data(), out.brb.size() * sizeof(float));
  });
}

void asrf_model_free(asrf_model* model) { delete model; }

// ---- evaluation ----

asrf_status asrf_evaluate(const asrf_model* model, const asrf_dataset* dataset,
                          const asrf_config* config, const char* const* modes,
                          size_t num_modes, asrf_metrics* out) {
  return guarded([&] {
    require_arg(model, "model");
    require_arg(dataset, "dataset");
    require_arg(config, "config");
    require_arg(modes, "modes");
    require_arg(out, "out");
    require_model_matches(model, dataset);
    std::vector<asrf::EvalMode> parsed;
    for (std::size_t i = 0; i < num_modes; ++i) {
      require_arg(modes[i], "mode");
      parsed.push_back(asrf::parse_eval_mode(modes[i]));
    }
    const auto& videos = dataset->value.videos;
    for (const auto& v : videos) {
      asrf::Require(v.feature_dim() == model->value.shape().feature_dim,
                    asrf::ErrorCode::kShapeMismatch,
                    "video '" + v.id + "' feature dimension does not match the model");
    }
    const auto outputs = asrf::predict_dataset(model->value, videos);
    const auto& tc = config->value.train;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      out[i] = to_c(asrf::evaluate_outputs(videos, outputs, model->value.shape().num_classes,
                                           tc.refine, tc.metrics, parsed[i]));
    }
  });
}

asrf_status asrf_metrics_format(const char* const* names, const asrf_metrics* rows,
                                size_t count, const char* format, char** out) {
  return guarded([&] {
    require_arg(names, "names");
    require_arg(rows, "rows");
    require_arg(format, "format");
    require_arg(out, "out");
    std::vector<std::pair<std::string, asrf::MetricsReport>> reports;
    for (std::size_t i = 0; i < count; ++i) {
      require_arg(names[i], "name");
      reports.emplace_back(names[i], from_c(rows[i]));
    }
    const std::string f = format;
    if (f == "table") {
      *out = dup_string(asrf::format_report_table(reports));
    } else if (f == "kv") {
      *out = dup_string(asrf::format_report_kv(reports));
    } else {
      asrf::Fail(asrf::ErrorCode::kInvalidArgument,
                 "unknown report format '" + f + "' (table, kv)");
    }
  });
}

// ---- sweeps ----

asrf_status asrf_ablate_theta_p(const asrf_model* model, const asrf_dataset* dataset,
                                const asrf_config* config, const double* thetas, size_t count,
                                size_t* boundary_counts, char** table_out) {
  return guarded([&] {
    require_arg(model, "model");
    require_arg(dataset, "dataset");
    require_arg(config, "config");
    require_arg(thetas, "thetas");
    require_arg(table_out, "table_out");
    require_model_matches(model, dataset);
    const auto& videos = dataset->value.videos;
    const auto outputs = asrf::predict_dataset(model->value, videos);
    const auto& tc = config->value.train;
    const auto rows = asrf::ablate_theta_p(videos, outputs, model->value.shape().num_classes,
                                           std::span<const double>(thetas, count), tc.refine,
                                           tc.metrics);
    if (boundary_counts != nullptr) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        boundary_counts[i] = rows[i].refined.predicted_boundaries;
      }
    }
    *table_out = dup_string(asrf::format_theta_table(rows));
  });
}

asrf_status asrf_ablate_brb_stages(const asrf_config* config, const asrf_dataset* train,
                                   const asrf_dataset* test, const size_t* stage_counts,
                                   size_t count, char** table_out) {
  return guarded([&] {
    require_arg(config, "config");
    require_arg(train, "train");
    require_arg(test, "test");
    require_arg(stage_counts, "stage_counts");
    require_arg(table_out, "table_out");
    std::vector<std::size_t> counts(stage_counts, stage_counts + count);
    const auto rows =
        asrf::ablate_brb_stages(train->value, test->value, config->value.train, counts);
    *table_out = dup_string(asrf::format_stage_table(rows));
  });
}

// ---- arrays ----

asrf_status asrf_select_boundaries(const float* brb, size_t frames, double theta_p,
                                   uint8_t* mask_out) {
  return guarded([&] {
    require_arg(brb, "brb");
    require_arg(mask_out, "mask_out");
    const auto mask = asrf::select_boundaries(std::span<const float>(brb, frames), theta_p);
    std::copy(mask.begin(), mask.end(), mask_out);
  });
}

asrf_status asrf_refine_by_boundaries(const float* asb, size_t frames, size_t num_classes,
                                      const uint8_t* boundaries, uint32_t* labels_out) {
  return guarded([&] {
    require_arg(asb, "asb");
    require_arg(labels_out, "labels_out");
    asrf::BoundaryMask mask(frames, 0);
    if (boundaries != nullptr) mask.assign(boundaries, boundaries + frames);
    const auto labels =
        asrf::refine_by_boundaries(matrix_from(asb, frames, num_classes), mask);
    std::copy(labels.begin(), labels.end(), labels_out);
  });
}

asrf_status asrf_argmax(const float* asb, size_t frames, size_t num_classes,
                        uint32_t* labels_out) {
  return guarded([&] {
    require_arg(asb, "asb");
    require_arg(labels_out, "labels_out");
    const auto labels = asrf::argmax_labels(matrix_from(asb, frames, num_classes));
    std::copy(labels.begin(), labels.end(), labels_out);
  });
}

asrf_status asrf_relabel(const uint32_t* labels, size_t frames, size_t theta_t,
                         uint32_t* labels_out) {
  return guarded([&] {
    require_arg(labels, "labels");
    require_arg(labels_out, "labels_out");
    const auto out = asrf::postprocess_relabel(std::span<const uint32_t>(labels, frames), theta_t);
    std::copy(out.begin(), out.end(), labels_out);
  });
}

asrf_status asrf_edit_score(const uint32_t* pred, size_t pred_frames, const uint32_t* gt,
                            size_t gt_frames, double* out) {
  return guarded([&] {
    require_arg(pred, "pred");
    require_arg(gt, "gt");
    require_arg(out, "out");
    *out = asrf::segmental_edit_score(std::span<const uint32_t>(pred, pred_frames),
                                      std::span<const uint32_t>(gt, gt_frames));
  });
}

asrf_status asrf_segmental_f1(const uint32_t* pred, const uint32_t* gt, size_t frames,
                              double k_percent, double* out) {
  return guarded([&] {
    require_arg(pred, "pred");
    require_arg(gt, "gt");
    require_arg(out, "out");
    const auto p = asrf::segments_from_labels(std::span<const uint32_t>(pred, frames));
    const auto g = asrf::segments_from_labels(std::span<const uint32_t>(gt, frames));
    *out = asrf::segmental_f1(p, g, k_percent);
  });
}

asrf_status asrf_boundary_prf(const uint8_t* pred, const uint8_t* gt, size_t frames,
                              size_t theta_b, double* precision, double* recall, double* f1) {
  return guarded([&] {
    require_arg(pred, "pred");
    require_arg(gt, "gt");
    const auto s = asrf::boundary_prf(std::span<const uint8_t>(pred, frames),
                                      std::span<const uint8_t>(gt, frames), theta_b);
    if (precision) *precision = s.precision;
    if (recall) *recall = s.recall;
    if (f1) *f1 = s.f1;
  });
}

// ---- files ----

asrf_status asrf_feature_file_info(const char* path, size_t* frames, size_t* dim) {
  return guarded([&] {
    require_arg(path, "path");
    const auto m = asrf::read_feature_file(path);
    if (frames) *frames = m.rows();
    if (dim) *dim = m.cols();
  });
}

asrf_status asrf_feature_file_read(const char* path, float* out, size_t capacity) {
  return guarded([&] {
    require_arg(path, "path");
    require_arg(out, "out");
    const auto m = asrf::read_feature_file(path);
    asrf::Require(capacity >= m.size(), asrf::ErrorCode::kInvalidArgument,
                  "buffer holds " + std::to_string(capacity) + " floats, file has " +
                      std::to_string(m.size()));
    std::memcpy(out, m.data(), m.size() * sizeof(float));
  });
}

asrf_status asrf_feature_file_write(const char* path, const float* data, size_t frames,
                                    size_t dim) {
  return guarded([&] {
    require_arg(path, "path");
    require_arg(data, "data");
    asrf::write_feature_file(path, matrix_from(data, frames, dim));
  });
}

asrf_status asrf_mapping_load(const char* path, asrf_mapping** out) {
  return guarded([&] {
    require_arg(path, "path");
    require_arg(out, "out");
    *out = new asrf_mapping{asrf::read_mapping_file(path)};
  });
}

asrf_status asrf_mapping_numbered(size_t num_classes, asrf_mapping** out) {
  return guarded([&] {
    require_arg(out, "out");
    *out = new asrf_mapping{asrf::ClassMap::Numbered(num_classes)};
  });
}

size_t asrf_mapping_size(const asrf_mapping* mapping) {
  return mapping ? mapping->value.size() : 0;
}

const char* asrf_mapping_name(const asrf_mapping* mapping, uint32_t id) {
  if (mapping == nullptr || id >= mapping->value.size()) return nullptr;
  return mapping->value.name(id).c_str();
}

asrf_status asrf_label_file_write(const char* path, const uint32_t* labels, size_t frames,
                                  const asrf_mapping* mapping) {
  return guarded([&] {
    require_arg(path, "path");
    require_arg(labels, "labels");
    require_arg(mapping, "mapping");
    asrf::write_label_file(path, std::span<const uint32_t>(labels, frames), mapping->value);
  });
}

void asrf_mapping_free(asrf_mapping* mapping) { delete mapping; }

}  // extern "C"
