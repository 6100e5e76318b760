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


// C interface to the ASRF library. All objects are opaque handles released by
// their matching *_free function. Every call that can fail returns an
// asrf_status; the message of the most recent failure on the calling thread
// is available from asrf_last_error(). Strings returned through char** out
// parameters are heap-allocated and must be released with asrf_string_free().

#ifndef ASRF_ASRF_H_
#define ASRF_ASRF_H_

#include <stddef.h>
#include <stdint.h>

#if defined(ASRF_BUILDING_LIBRARY)
#define ASRF_API __attribute__((visibility("default")))
#else
#define ASRF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum asrf_status {
  ASRF_OK = 0,
  ASRF_ERR_INVALID_ARGUMENT = 1,
  ASRF_ERR_SHAPE_MISMATCH = 2,
  ASRF_ERR_IO = 3,
  ASRF_ERR_FORMAT = 4,
  ASRF_ERR_DIVERGED = 5,
  ASRF_ERR_STATE = 6,
  ASRF_ERR_INTERNAL = 7,
} asrf_status;

typedef struct asrf_config asrf_config;
typedef struct asrf_dataset asrf_dataset;
typedef struct asrf_model asrf_model;
typedef struct asrf_mapping asrf_mapping;

ASRF_API const char* asrf_version(void);
ASRF_API const char* asrf_status_string(asrf_status status);
// Empty string when the last call on this thread succeeded.
ASRF_API const char* asrf_last_error(void);
ASRF_API void asrf_string_free(char* s);

// ---- run configuration ----------------------------------------------------

ASRF_API asrf_status asrf_config_new(asrf_config** out);
ASRF_API asrf_status asrf_config_load(const char* path, asrf_config** out);
ASRF_API asrf_status asrf_config_from_json(const char* json, asrf_config** out);
// Dotted key such as "train.epochs" or "paths.dataset_root".
ASRF_API asrf_status asrf_config_set(asrf_config* config, const char* key, const char* value);
ASRF_API asrf_status asrf_config_to_json(const asrf_config* config, char** out);
ASRF_API asrf_status asrf_config_check_paths(const asrf_config* config, int need_train,
                                             int need_test);
// Resolved paths; the returned pointers live as long as the config is unchanged.
ASRF_API const char* asrf_config_dataset_root(const asrf_config* config);
ASRF_API const char* asrf_config_output_dir(const asrf_config* config);
ASRF_API asrf_status asrf_config_split_path(const asrf_config* config, int test, char** out);
ASRF_API void asrf_config_free(asrf_config* config);

// ---- synthetic data ---------------------------------------------------------

typedef struct asrf_synth_options {
  size_t num_videos;
  size_t num_test;  // videos placed in the test split (the last ones)
  size_t min_frames;
  size_t max_frames;
  size_t num_classes;
  size_t feature_dim;
  size_t min_segment;
  size_t max_segment;
  double noise_level;
  uint64_t seed;
} asrf_synth_options;

ASRF_API void asrf_synth_options_default(asrf_synth_options* options);
// Writes mapping.txt, features/, groundTruth/ and splits/{train,test}.txt.
ASRF_API asrf_status asrf_synthesize(const asrf_synth_options* options, const char* root);

// ---- datasets -----------------------------------------------------------------

ASRF_API asrf_status asrf_dataset_load(const char* root, const char* split_file,
                                       asrf_dataset** out);
ASRF_API size_t asrf_dataset_size(const asrf_dataset* dataset);
ASRF_API size_t asrf_dataset_num_classes(const asrf_dataset* dataset);
ASRF_API size_t asrf_dataset_feature_dim(const asrf_dataset* dataset);
ASRF_API size_t asrf_dataset_num_frames(const asrf_dataset* dataset, size_t index);
ASRF_API const char* asrf_dataset_video_id(const asrf_dataset* dataset, size_t index);
ASRF_API void asrf_dataset_free(asrf_dataset* dataset);

// ---- models ---------------------------------------------------------------------

typedef struct asrf_model_shape {
  size_t feature_dim;
  size_t num_classes;
  size_t channels;
  size_t layers;
  size_t asb_stages;
  size_t brb_stages;
} asrf_model_shape;

// Receives one JSON line per finished epoch.
typedef void (*asrf_epoch_callback)(const char* json_line, void* user_data);

// heldout, log_path and callback may be NULL. The log file is truncated and
// then receives one JSON line per epoch.
ASRF_API asrf_status asrf_train(const asrf_config* config, const asrf_dataset* train,
                                const asrf_dataset* heldout, const char* log_path,
                                asrf_epoch_callback callback, void* user_data,
                                asrf_model** out);
ASRF_API asrf_status asrf_model_save(const asrf_model* model, const char* path);
ASRF_API asrf_status asrf_model_load(const char* path, asrf_model** out);
ASRF_API asrf_status asrf_model_shape_get(const asrf_model* model, asrf_model_shape* out);
ASRF_API size_t asrf_model_parameter_count(const asrf_model* model);
// Epoch whose parameters the model holds (0 for loaded checkpoints).
ASRF_API size_t asrf_model_best_epoch(const asrf_model* model);
// features: frames x feature_dim row-major. asb_out: frames x num_classes,
// brb_out: frames. Both are final-stage probabilities.
ASRF_API asrf_status asrf_model_predict(const asrf_model* model, const float* features,
                                        size_t frames, size_t feature_dim, float* asb_out,
                                        float* brb_out);
ASRF_API void asrf_model_free(asrf_model* model);

// ---- evaluation -------------------------------------------------------------------

typedef struct asrf_metrics {
  double accuracy;  // percent
  double edit;      // percent
  double f1_10;     // percent
  double f1_25;
  double f1_50;
  double boundary_precision;  // fraction
  double boundary_recall;
  double boundary_f1;
  size_t videos;
  size_t frames;
  size_t predicted_boundaries;
} asrf_metrics;

// Modes: raw, refined, oracle_asb, oracle_boundaries, relabel, smooth,
// similarity. Predictions are computed once and scored under every mode;
// out receives num_modes entries. Refine and metric settings come from config.
ASRF_API asrf_status asrf_evaluate(const asrf_model* model, const asrf_dataset* dataset,
                                   const asrf_config* config, const char* const* modes,
                                   size_t num_modes, asrf_metrics* out);
// format: "table" or "kv".
ASRF_API asrf_status asrf_metrics_format(const char* const* names, const asrf_metrics* rows,
                                         size_t count, const char* format, char** out);

// ---- sweeps -----------------------------------------------------------------------

// One row per threshold; boundary_counts (may be NULL) receives the number
// of selected boundaries per row.
ASRF_API asrf_status asrf_ablate_theta_p(const asrf_model* model, const asrf_dataset* dataset,
                                         const asrf_config* config, const double* thetas,
                                         size_t count, size_t* boundary_counts,
                                         char** table_out);
// Trains one model per BRB stage count with the config's settings.
ASRF_API asrf_status asrf_ablate_brb_stages(const asrf_config* config,
                                            const asrf_dataset* train,
                                            const asrf_dataset* test,
                                            const size_t* stage_counts, size_t count,
                                            char** table_out);

// ---- array-level refinement and metrics ---------------------------------------------

ASRF_API asrf_status asrf_select_boundaries(const float* brb, size_t frames, double theta_p,
                                            uint8_t* mask_out);
// asb: frames x num_classes. boundaries: frames (NULL means a single segment).
ASRF_API asrf_status asrf_refine_by_boundaries(const float* asb, size_t frames,
                                               size_t num_classes, const uint8_t* boundaries,
                                               uint32_t* labels_out);
ASRF_API asrf_status asrf_argmax(const float* asb, size_t frames, size_t num_classes,
                                 uint32_t* labels_out);
ASRF_API asrf_status asrf_relabel(const uint32_t* labels, size_t frames, size_t theta_t,
                                  uint32_t* labels_out);
ASRF_API asrf_status asrf_edit_score(const uint32_t* pred, size_t pred_frames,
                                     const uint32_t* gt, size_t gt_frames, double* out);
ASRF_API asrf_status asrf_segmental_f1(const uint32_t* pred, const uint32_t* gt,
                                       size_t frames, double k_percent, double* out);
ASRF_API asrf_status asrf_boundary_prf(const uint8_t* pred, const uint8_t* gt, size_t frames,
                                       size_t theta_b, double* precision, double* recall,
                                       double* f1);

// ---- files --------------------------------------------------------------------------

ASRF_API asrf_status asrf_feature_file_info(const char* path, size_t* frames, size_t* dim);
// capacity is the number of floats available in out.
ASRF_API asrf_status asrf_feature_file_read(const char* path, float* out, size_t capacity);
ASRF_API asrf_status asrf_feature_file_write(const char* path, const float* data,
                                             size_t frames, size_t dim);

ASRF_API asrf_status asrf_mapping_load(const char* path, asrf_mapping** out);
// Names class_0 .. class_{n-1}.
ASRF_API asrf_status asrf_mapping_numbered(size_t num_classes, asrf_mapping** out);
ASRF_API size_t asrf_mapping_size(const asrf_mapping* mapping);
ASRF_API const char* asrf_mapping_name(const asrf_mapping* mapping, uint32_t id);
// One class name per line.
ASRF_API asrf_status asrf_label_file_write(const char* path, const uint32_t* labels,
                                           size_t frames, const asrf_mapping* mapping);
ASRF_API void asrf_mapping_free(asrf_mapping* mapping);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // ASRF_ASRF_H_
