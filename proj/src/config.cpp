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

#include "asrf/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "asrf/error.hpp"
#include "json.hpp"

namespace asrf {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  Fail(ErrorCode::kInvalidArgument, "config key '" + key + "': expected a number, got '" + s + "'");
}

std::uint64_t to_unsigned(const std::string& key, const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  Require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(),
          ErrorCode::kInvalidArgument,
          "config key '" + key + "': expected a non-negative integer, got '" + s + "'");
  return v;
}

// One settable field, addressed as "section.name".
struct Field {
  const char* section;
  const char* name;
  json (*get)(const RunConfig&);
  void (*put)(RunConfig&, const std::string& key, const json&);
};

double json_double(const std::string& key, const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return to_double(key, v.get<std::string>());
  Fail(ErrorCode::kInvalidArgument, "config key '" + key + "': expected a number");
}

std::uint64_t json_unsigned(const std::string& key, const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  if (v.is_string()) return to_unsigned(key, v.get<std::string>());
  Fail(ErrorCode::kInvalidArgument, "config key '" + key + "': expected a non-negative integer");
}

std::string json_string(const std::string& key, const json& v) {
  Require(v.is_string(), ErrorCode::kInvalidArgument,
          "config key '" + key + "': expected a string");
  return v.get<std::string>();
}

#define ASRF_DOUBLE(sec, nm, expr)                                                   \
  Field {                                                                            \
    sec, nm, [](const RunConfig& c) -> json { return c.expr; },                      \
        [](RunConfig& c, const std::string& k, const json& v) { c.expr = json_double(k, v); } \
  }
#define ASRF_SIZE(sec, nm, expr)                                                     \
  Field {                                                                            \
    sec, nm, [](const RunConfig& c) -> json { return c.expr; },                      \
        [](RunConfig& c, const std::string& k, const json& v) {                      \
          c.expr = static_cast<decltype(c.expr)>(json_unsigned(k, v));               \
        }                                                                            \
  }
#define ASRF_PATH(nm, expr)                                                          \
  Field {                                                                            \
    "paths", nm, [](const RunConfig& c) -> json { return c.expr.string(); },         \
        [](RunConfig& c, const std::string& k, const json& v) { c.expr = json_string(k, v); } \
  }
#define ASRF_ENUM(sec, nm, expr, parse)                                              \
  Field {                                                                            \
    sec, nm, [](const RunConfig& c) -> json { return to_string(c.expr); },           \
        [](RunConfig& c, const std::string& k, const json& v) { c.expr = parse(json_string(k, v)); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      ASRF_PATH("dataset_root", paths.dataset_root),
      ASRF_PATH("train_split", paths.train_split),
      ASRF_PATH("test_split", paths.test_split),
      ASRF_PATH("output_dir", paths.output_dir),
      ASRF_SIZE("model", "channels", train.shape.channels),
      ASRF_SIZE("model", "layers", train.shape.layers),
      ASRF_SIZE("model", "asb_stages", train.shape.asb_stages),
      ASRF_SIZE("model", "brb_stages", train.shape.brb_stages),
      ASRF_DOUBLE("train", "learning_rate", train.adam.learning_rate),
      ASRF_DOUBLE("train", "beta1", train.adam.beta1),
      ASRF_DOUBLE("train", "beta2", train.adam.beta2),
      ASRF_DOUBLE("train", "epsilon", train.adam.epsilon),
      ASRF_SIZE("train", "batch_size", train.batch_size),
      ASRF_SIZE("train", "epochs", train.epochs),
      ASRF_SIZE("train", "seed", train.seed),
      ASRF_DOUBLE("train", "dropout", train.dropout),
      ASRF_DOUBLE("loss", "lambda_brb", train.loss.lambda_brb),
      ASRF_DOUBLE("loss", "tau", train.loss.tau),
      ASRF_DOUBLE("loss", "sigma", train.loss.sigma),
      ASRF_DOUBLE("loss", "tmse_weight", train.loss.tmse_weight),
      ASRF_ENUM("loss", "classification", train.loss.classification, parse_classification_loss),
      ASRF_ENUM("loss", "smoothing", train.loss.smoothing, parse_smoothing_loss),
      ASRF_DOUBLE("loss", "focal_gamma", train.loss.focal_gamma),
      ASRF_DOUBLE("refine", "theta_p", train.refine.theta_p),
      ASRF_SIZE("refine", "theta_t", train.refine.theta_t),
      ASRF_SIZE("refine", "smooth_kernel", train.refine.smooth_kernel),
      ASRF_DOUBLE("refine", "sim_sigma", train.refine.sim_sigma),
      ASRF_SIZE("metrics", "theta_b", train.metrics.theta_b),
      ASRF_ENUM("metrics", "f1_averaging", train.metrics.f1_averaging, parse_f1_averaging),
  };
  return kFields;
}

#undef ASRF_DOUBLE
#undef ASRF_SIZE
#undef ASRF_PATH
#undef ASRF_ENUM

const Field* find_field(const std::string& section, const std::string& name) {
  for (const auto& f : fields()) {
    if (section == f.section && name == f.name) return &f;
  }
  return nullptr;
}

bool has_section(const std::string& section) {
  for (const auto& f : fields()) {
    if (section == f.section) return true;
  }
  return false;
}

fs::path under_root(const fs::path& root, const fs::path& p) {
  return p.is_absolute() || root.empty() ? p : root / p;
}

}  // namespace

fs::path RunPaths::resolved_train_split() const { return under_root(dataset_root, train_split); }
fs::path RunPaths::resolved_test_split() const { return under_root(dataset_root, test_split); }

RunConfig RunConfig::FromJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kFormat, std::string("config: ") + e.what());
  }
  Require(doc.is_object(), ErrorCode::kFormat, "config: top level must be an object");
  RunConfig cfg;
  for (const auto& [section, body] : doc.items()) {
    Require(body.is_object(), ErrorCode::kFormat,
            "config: section '" + section + "' must be an object");
    Require(has_section(section), ErrorCode::kInvalidArgument,
            "config: unknown section '" + section + "'");
    for (const auto& [name, value] : body.items()) {
      const Field* f = find_field(section, name);
      Require(f != nullptr, ErrorCode::kInvalidArgument,
              "config: unknown key '" + section + "." + name + "'");
      f->put(cfg, section + "." + name, value);
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::Load(const fs::path& file) {
  std::ifstream in(file);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return FromJson(ss.str());
  } catch (const Error& e) {
    Fail(e.code(), file.string() + ": " + e.what());
  }
}

std::string RunConfig::to_json() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& f : fields()) doc[f.section][f.name] = f.get(*this);
  return doc.dump(2) + "\n";
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  Require(dot != std::string::npos, ErrorCode::kInvalidArgument,
          "config key '" + key + "' must look like section.name");
  const Field* f = find_field(key.substr(0, dot), key.substr(dot + 1));
  Require(f != nullptr, ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
  f->put(*this, key, json(value));
}

void RunConfig::validate() const {
  train.validate();
  ModelShape probe = train.shape;
  probe.feature_dim = 1;
  probe.num_classes = 2;
  probe.validate();
}

void RunConfig::check_paths(bool need_train, bool need_test) const {
  auto must_exist = [](const fs::path& p, const char* what) {
    Require(fs::exists(p), ErrorCode::kIo,
            std::string(what) + " does not exist: " + p.string());
  };
  must_exist(paths.dataset_root, "dataset root");
  if (need_train) must_exist(paths.resolved_train_split(), "train split");
  if (need_test) must_exist(paths.resolved_test_split(), "test split");
  const fs::path parent = fs::absolute(paths.output_dir).parent_path();
  must_exist(parent, "parent of output directory");
}

}  // namespace asrf
