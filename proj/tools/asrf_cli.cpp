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

// asrf: command-line driver for synthesis, training, evaluation, refinement
// and ablation sweeps. Talks to the library only through asrf.h.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asrf/asrf.h"

namespace fs = std::filesystem;

namespace {

// Library failure carrying the status for the exit message.
struct ApiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(asrf_status status, const std::string& context) {
  if (status == ASRF_OK) return;
  throw ApiError(context + ": " + asrf_status_string(status) + ": " + asrf_last_error());
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ConfigPtr = std::unique_ptr<asrf_config, Deleter<asrf_config, asrf_config_free>>;
using DatasetPtr = std::unique_ptr<asrf_dataset, Deleter<asrf_dataset, asrf_dataset_free>>;
using ModelPtr = std::unique_ptr<asrf_model, Deleter<asrf_model, asrf_model_free>>;
using MappingPtr = std::unique_ptr<asrf_mapping, Deleter<asrf_mapping, asrf_mapping_free>>;

std::string take(char* s) {
  std::string out = s ? s : "";
  asrf_string_free(s);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// Options shared by every subcommand that needs a run configuration.
struct RunOptions {
  std::string config_file;
  std::string dataset;
  std::string output_dir;
  std::vector<std::string> overrides;
  std::vector<std::pair<std::string, std::string>> shortcuts;

  void attach(CLI::App* cmd, bool stage_flag = true) {
    cmd->add_option("-c,--config", config_file, "JSON run configuration")
        ->check(CLI::ExistingFile);
    cmd->add_option("-d,--dataset", dataset, "dataset root (paths.dataset_root)");
    cmd->add_option("-o,--out", output_dir, "output directory (paths.output_dir)");
    cmd->add_option("--set", overrides, "override a config key: section.name=value")
        ->take_all();
    add_shortcut(cmd, "--epochs", "train.epochs", "training epochs");
    add_shortcut(cmd, "--seed", "train.seed", "run seed");
    add_shortcut(cmd, "--lr", "train.learning_rate", "Adam learning rate");
    add_shortcut(cmd, "--batch-size", "train.batch_size", "videos per optimizer step");
    add_shortcut(cmd, "--dropout", "train.dropout", "dropout rate");
    add_shortcut(cmd, "--channels", "model.channels", "TCN channels");
    add_shortcut(cmd, "--layers", "model.layers", "dilated layers per stage");
    add_shortcut(cmd, "--asb-stages", "model.asb_stages", "ASB refinement stages");
    if (stage_flag) add_shortcut(cmd, "--brb-stages", "model.brb_stages", "BRB refinement stages");
    add_shortcut(cmd, "--lambda", "loss.lambda_brb", "weight of the boundary loss");
    add_shortcut(cmd, "--classification-loss", "loss.classification",
                 "ce, ce_class_weighted or focal");
    add_shortcut(cmd, "--smoothing-loss", "loss.smoothing", "none, tmse or gs_tmse");
    add_shortcut(cmd, "--theta-b", "metrics.theta_b", "boundary tolerance in frames");
    add_shortcut(cmd, "--f1-averaging", "metrics.f1_averaging", "global or per_class");
  }

  void add_shortcut(CLI::App* cmd, const std::string& flag, const std::string& key,
                    const std::string& help) {
    cmd->add_option_function<std::string>(
        flag,
        [this, key](const std::string& v) { shortcuts.emplace_back(key, v); },
        help + " (" + key + ")");
  }

  ConfigPtr build() const {
    asrf_config* raw = nullptr;
    if (config_file.empty()) {
      check(asrf_config_new(&raw), "config");
    } else {
      check(asrf_config_load(config_file.c_str(), &raw), "config");
    }
    ConfigPtr cfg(raw);
    if (!dataset.empty()) check(asrf_config_set(cfg.get(), "paths.dataset_root", dataset.c_str()), "--dataset");
    if (!output_dir.empty()) check(asrf_config_set(cfg.get(), "paths.output_dir", output_dir.c_str()), "--out");
    for (const auto& [key, value] : shortcuts) {
      check(asrf_config_set(cfg.get(), key.c_str(), value.c_str()), key);
    }
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw CLI::ValidationError("--set", "expected section.name=value, got '" + kv + "'");
      }
      const std::string key = kv.substr(0, eq);
      const std::string value = kv.substr(eq + 1);
      check(asrf_config_set(cfg.get(), key.c_str(), value.c_str()), "--set " + key);
    }
    return cfg;
  }
};

DatasetPtr load_split(const asrf_config* cfg, bool test) {
  char* split = nullptr;
  check(asrf_config_split_path(cfg, test, &split), "config");
  const std::string path = take(split);
  asrf_dataset* raw = nullptr;
  check(asrf_dataset_load(asrf_config_dataset_root(cfg), path.c_str(), &raw), path);
  return DatasetPtr(raw);
}

fs::path output_dir(const asrf_config* cfg) {
  fs::path dir = asrf_config_output_dir(cfg);
  fs::create_directories(dir);
  return dir;
}

ModelPtr load_model(const std::string& path) {
  asrf_model* raw = nullptr;
  check(asrf_model_load(path.c_str(), &raw), path);
  return ModelPtr(raw);
}

std::vector<double> parse_doubles(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw CLI::ValidationError("--theta-p", "not a number: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("--theta-p", "empty list");
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& list) {
  std::vector<std::size_t> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw CLI::ValidationError("--brb-stages", "not a count: '" + item + "'");
    }
    out.push_back(std::stoul(item));
  }
  if (out.empty()) throw CLI::ValidationError("--brb-stages", "empty list");
  return out;
}

// ---- synth ----

struct SynthCommand {
  asrf_synth_options options{};
  std::string root;

  explicit SynthCommand(CLI::App& app) {
    asrf_synth_options_default(&options);
    auto* cmd = app.add_subcommand("synth", "write a synthetic dataset");
    cmd->add_option("-o,--out", root, "dataset root to create")->required();
    cmd->add_option("--videos", options.num_videos, "number of videos")->capture_default_str();
    cmd->add_option("--test-videos", options.num_test,
                    "videos in the test split (default: a fifth)");
    cmd->add_option("--classes", options.num_classes, "number of classes")->capture_default_str();
    cmd->add_option("--dim", options.feature_dim, "feature dimension")->capture_default_str();
    cmd->add_option("--min-frames", options.min_frames)->capture_default_str();
    cmd->add_option("--max-frames", options.max_frames)->capture_default_str();
    cmd->add_option("--min-segment", options.min_segment)->capture_default_str();
    cmd->add_option("--max-segment", options.max_segment)->capture_default_str();
    cmd->add_option("--noise", options.noise_level, "feature noise level")->capture_default_str();
    cmd->add_option("--seed", options.seed)->capture_default_str();
    cmd->callback([this, cmd] {
      if (cmd->count("--test-videos") == 0) options.num_test = options.num_videos / 5;
      check(asrf_synthesize(&options, root.c_str()), "synth");
      std::printf("wrote %zu videos (%zu test) to %s\n", options.num_videos, options.num_test,
                  root.c_str());
    });
  }
};

// ---- train ----

struct TrainCommand {
  RunOptions run;
  bool quiet = false;

  explicit TrainCommand(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "train a model; writes model.bin and train_log.jsonl");
    run.attach(cmd);
    cmd->add_flag("-q,--quiet", quiet, "do not echo per-epoch log lines");
    cmd->callback([this] { execute(); });
  }

  static void echo(const char* line, void*) { std::printf("%s\n", line); std::fflush(stdout); }

  void execute() {
    auto cfg = run.build();
    check(asrf_config_check_paths(cfg.get(), 1, 0), "paths");
    auto train = load_split(cfg.get(), false);
    DatasetPtr heldout;
    char* test_split = nullptr;
    check(asrf_config_split_path(cfg.get(), 1, &test_split), "config");
    if (fs::exists(take(test_split))) heldout = load_split(cfg.get(), true);

    const fs::path dir = output_dir(cfg.get());
    char* json = nullptr;
    check(asrf_config_to_json(cfg.get(), &json), "config");
    write_text(dir / "config.json", take(json));

    const std::string log_path = (dir / "train_log.jsonl").string();
    asrf_model* raw = nullptr;
    check(asrf_train(cfg.get(), train.get(), heldout.get(), log_path.c_str(),
                     quiet ? nullptr : &TrainCommand::echo, nullptr, &raw),
          "train");
    ModelPtr model(raw);
    const std::string ckpt = (dir / "model.bin").string();
    check(asrf_model_save(model.get(), ckpt.c_str()), "save");
    std::printf("checkpoint %s (epoch %zu)\n", ckpt.c_str(), asrf_model_best_epoch(model.get()));
  }
};

// ---- eval ----

struct EvalCommand {
  RunOptions run;
  std::string checkpoint;
  std::vector<std::string> modes;
  std::string split = "test";
  std::string report;

  explicit EvalCommand(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "score a checkpoint under one or more modes");
    run.attach(cmd);
    cmd->add_option("--checkpoint", checkpoint, "model file (default: <out>/model.bin)");
    cmd->add_option("-m,--mode", modes,
                    "raw, refined, oracle_asb, oracle_boundaries, relabel, smooth, similarity")
        ->take_all();
    cmd->add_option("--split", split, "train or test")
        ->check(CLI::IsMember({"train", "test"}))
        ->capture_default_str();
    cmd->add_option("--report", report, "key/value report path (default: <out>/eval_report.txt)");
    add_shortcut_refine(cmd);
    cmd->callback([this] { execute(); });
  }

  void add_shortcut_refine(CLI::App* cmd) {
    run.add_shortcut(cmd, "--theta-p", "refine.theta_p", "boundary probability threshold");
    run.add_shortcut(cmd, "--theta-t", "refine.theta_t", "relabel minimum segment length");
  }

  void execute() {
    if (modes.empty()) modes = {"refined"};
    auto cfg = run.build();
    const bool test = split == "test";
    check(asrf_config_check_paths(cfg.get(), !test, test), "paths");
    const fs::path dir = output_dir(cfg.get());
    auto model = load_model(checkpoint.empty() ? (dir / "model.bin").string() : checkpoint);
    auto data = load_split(cfg.get(), test);

    std::vector<const char*> names;
    for (const auto& m : modes) names.push_back(m.c_str());
    std::vector<asrf_metrics> rows(modes.size());
    check(asrf_evaluate(model.get(), data.get(), cfg.get(), names.data(), names.size(),
                        rows.data()),
          "eval");
    char* table = nullptr;
    check(asrf_metrics_format(names.data(), rows.data(), rows.size(), "table", &table), "eval");
    std::fputs(take(table).c_str(), stdout);
    char* kv = nullptr;
    check(asrf_metrics_format(names.data(), rows.data(), rows.size(), "kv", &kv), "eval");
    write_text(report.empty() ? dir / "eval_report.txt" : fs::path(report), take(kv));
  }
};

// ---- refine ----

struct RefineCommand {
  std::vector<std::string> probs;
  std::vector<std::string> boundaries;
  std::vector<std::string> outputs;
  std::string mapping_file;
  double theta_p = 0.5;

  explicit RefineCommand(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "refine", "refine external ASB/BRB probability files into label files");
    cmd->add_option("--probs", probs, "frame-wise class probabilities (feature format, D=C)")
        ->required()
        ->take_all();
    cmd->add_option("--boundaries", boundaries, "boundary probabilities (feature format, D=1)")
        ->required()
        ->take_all();
    cmd->add_option("-o,--out", outputs, "label file to write, one per input pair")
        ->required()
        ->take_all();
    cmd->add_option("--mapping", mapping_file, "mapping.txt with class names")
        ->check(CLI::ExistingFile);
    cmd->add_option("--theta-p", theta_p, "boundary probability threshold")
        ->capture_default_str();
    cmd->callback([this] { execute(); });
  }

  void execute() {
    if (probs.size() != boundaries.size() || probs.size() != outputs.size()) {
      throw CLI::ValidationError("refine", "--probs, --boundaries and --out need equal counts");
    }
    MappingPtr mapping;
    if (!mapping_file.empty()) {
      asrf_mapping* raw = nullptr;
      check(asrf_mapping_load(mapping_file.c_str(), &raw), mapping_file);
      mapping.reset(raw);
    }
    for (std::size_t i = 0; i < probs.size(); ++i) {
      std::size_t frames = 0, classes = 0, bt = 0, bd = 0;
      check(asrf_feature_file_info(probs[i].c_str(), &frames, &classes), probs[i]);
      check(asrf_feature_file_info(boundaries[i].c_str(), &bt, &bd), boundaries[i]);
      if (bd != 1 || bt != frames) {
        throw ApiError(boundaries[i] + ": expected " + std::to_string(frames) +
                       " x 1 boundary probabilities, got " + std::to_string(bt) + " x " +
                       std::to_string(bd));
      }
      std::vector<float> asb(frames * classes), brb(frames);
      check(asrf_feature_file_read(probs[i].c_str(), asb.data(), asb.size()), probs[i]);
      check(asrf_feature_file_read(boundaries[i].c_str(), brb.data(), brb.size()),
            boundaries[i]);
      std::vector<uint8_t> mask(frames);
      std::vector<uint32_t> labels(frames);
      check(asrf_select_boundaries(brb.data(), frames, theta_p, mask.data()), boundaries[i]);
      check(asrf_refine_by_boundaries(asb.data(), frames, classes, mask.data(), labels.data()),
            probs[i]);
      MappingPtr numbered;
      const asrf_mapping* names = mapping.get();
      if (names == nullptr) {
        asrf_mapping* raw = nullptr;
        check(asrf_mapping_numbered(classes, &raw), "mapping");
        numbered.reset(raw);
        names = raw;
      } else if (asrf_mapping_size(names) != classes) {
        throw ApiError(probs[i] + ": " + std::to_string(classes) +
                       " classes but the mapping has " +
                       std::to_string(asrf_mapping_size(names)));
      }
      check(asrf_label_file_write(outputs[i].c_str(), labels.data(), frames, names),
            outputs[i]);
      std::size_t cuts = 0;
      for (auto b : mask) cuts += b;
      std::printf("%s: %zu frames, %zu boundaries\n", outputs[i].c_str(), frames, cuts);
    }
  }
};

// ---- ablate ----

struct AblateCommand {
  RunOptions run;
  std::string checkpoint;
  std::string theta_list;
  std::string stage_list;
  std::string table_path;

  explicit AblateCommand(CLI::App& app) {
    auto* cmd = app.add_subcommand("ablate", "sweep theta_p or the number of BRB stages");
    run.attach(cmd, false);
    auto* theta = cmd->add_option("--theta-p", theta_list, "comma-separated thresholds");
    auto* stages = cmd->add_option("--brb-stages", stage_list,
                                   "comma-separated BRB stage counts (trains one model each)");
    theta->excludes(stages);
    cmd->add_option("--checkpoint", checkpoint, "model for --theta-p (default: <out>/model.bin)");
    cmd->add_option("--table", table_path, "where to write the table (default: <out>/ablation_*.txt)");
    cmd->callback([this] { execute(); });
  }

  void execute() {
    if (theta_list.empty() == stage_list.empty()) {
      throw CLI::RequiredError("ablate needs exactly one of --theta-p or --brb-stages");
    }
    auto cfg = run.build();
    std::string table;
    fs::path default_table;
    if (!theta_list.empty()) {
      const auto thetas = parse_doubles(theta_list);
      check(asrf_config_check_paths(cfg.get(), 0, 1), "paths");
      const fs::path dir = output_dir(cfg.get());
      auto model = load_model(checkpoint.empty() ? (dir / "model.bin").string() : checkpoint);
      auto test = load_split(cfg.get(), true);
      char* out = nullptr;
      check(asrf_ablate_theta_p(model.get(), test.get(), cfg.get(), thetas.data(), thetas.size(),
                                nullptr, &out),
            "ablate");
      table = take(out);
      default_table = dir / "ablation_theta_p.txt";
    } else {
      const auto counts = parse_sizes(stage_list);
      check(asrf_config_check_paths(cfg.get(), 1, 1), "paths");
      const fs::path dir = output_dir(cfg.get());
      auto train = load_split(cfg.get(), false);
      auto test = load_split(cfg.get(), true);
      char* out = nullptr;
      check(asrf_ablate_brb_stages(cfg.get(), train.get(), test.get(), counts.data(),
                                   counts.size(), &out),
            "ablate");
      table = take(out);
      default_table = dir / "ablation_brb_stages.txt";
    }
    std::fputs(table.c_str(), stdout);
    write_text(table_path.empty() ? default_table : fs::path(table_path), table);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ASRF action segmentation: synth, train, eval, refine, ablate"};
  app.set_version_flag("--version", std::string(asrf_version()));
  app.require_subcommand(1);
  SynthCommand synth(app);
  TrainCommand train(app);
  EvalCommand eval(app);
  RefineCommand refine(app);
  AblateCommand ablate(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0 && dynamic_cast<const CLI::CallForHelp*>(&e) == nullptr) {
      std::cerr << "\n" << app.help();
      return 2;
    }
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
