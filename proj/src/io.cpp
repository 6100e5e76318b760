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

#include "asrf/io.hpp"

#include <fstream>
#include <sstream>

#include "asrf/error.hpp"
#include "binary_io.hpp"

namespace asrf {

namespace {

constexpr std::string_view kFeatureMagic = "ASRF";

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorCode::kIo,
          "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream create_text(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  Require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  Require(!out.fail(), ErrorCode::kIo, "failed writing '" + path.string() + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Matrix<float> read_feature_file(const std::filesystem::path& path) {
  detail::BinaryReader in(path);
  in.expect_magic(kFeatureMagic);
  const std::uint64_t version_at = in.offset();
  const std::uint32_t version = in.u32("version");
  if (version != kFeatureFileVersion) {
    in.fail("unsupported version " + std::to_string(version), version_at);
  }
  const std::uint32_t frames = in.u32("frame count");
  const std::uint32_t dim = in.u32("dimension");
  if (frames == 0 || dim == 0) in.fail("frame count and dimension must be >= 1", 8);
  Matrix<float> m(frames, dim);
  for (auto& v : m.values()) v = in.f32("feature data");
  if (!in.at_end()) in.fail("trailing bytes after T*D values", in.offset());
  return m;
}

void write_feature_file(const std::filesystem::path& path, const Matrix<float>& m) {
  Require(m.rows() >= 1 && m.cols() >= 1, ErrorCode::kInvalidArgument,
          "feature matrix must be non-empty");
  detail::BinaryWriter out(path);
  out.bytes(kFeatureMagic);
  out.u32(kFeatureFileVersion);
  out.u32(static_cast<std::uint32_t>(m.rows()));
  out.u32(static_cast<std::uint32_t>(m.cols()));
  for (float v : m.values()) out.f32(v);
  out.close();
}

ClassMap read_mapping_file(const std::filesystem::path& path) {
  auto in = open_text(path);
  std::vector<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ss(line);
    long long id = -1;
    std::string name;
    if (!(ss >> id >> name)) {
      Fail(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) +
                                   ": expected '<id> <class_name>'");
    }
    if (id != static_cast<long long>(names.size())) {
      Fail(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) +
                                   ": ids must be contiguous from 0 (got " +
                                   std::to_string(id) + ")");
    }
    names.push_back(name);
  }
  Require(!names.empty(), ErrorCode::kFormat, path.string() + ": no classes");
  return ClassMap(std::move(names));
}

void write_mapping_file(const std::filesystem::path& path, const ClassMap& classes) {
  auto out = create_text(path);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    out << c << ' ' << classes.names()[c] << '\n';
  }
  finish(out, path);
}

Labels read_label_file(const std::filesystem::path& path, const ClassMap& classes) {
  auto in = open_text(path);
  Labels labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto id = classes.find(line);
    if (!id) {
      Fail(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) +
                                   ": unknown class '" + line + "'");
    }
    labels.push_back(*id);
  }
  return labels;
}

void write_label_file(const std::filesystem::path& path, std::span<const ClassId> labels,
                      const ClassMap& classes) {
  auto out = create_text(path);
  for (ClassId c : labels) out << classes.name(c) << '\n';
  finish(out, path);
}

std::vector<std::string> read_split_file(const std::filesystem::path& path) {
  auto in = open_text(path);
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

void write_split_file(const std::filesystem::path& path, const std::vector<std::string>& ids) {
  auto out = create_text(path);
  for (const auto& id : ids) out << id << '\n';
  finish(out, path);
}

VideoSample load_video_sample(const std::filesystem::path& feature_path,
                              const std::filesystem::path& label_path,
                              const ClassMap& classes) {
  VideoSample sample;
  sample.id = feature_path.stem().string();
  sample.features = read_feature_file(feature_path);
  sample.labels = read_label_file(label_path, classes);
  if (sample.labels.size() != sample.features.rows()) {
    Fail(ErrorCode::kFormat, "length mismatch: " + feature_path.string() + " has T=" +
                                 std::to_string(sample.features.rows()) + " frames but " +
                                 label_path.string() + " has " +
                                 std::to_string(sample.labels.size()) + " labels");
  }
  return sample;
}

std::size_t Dataset::feature_dim() const {
  return videos.empty() ? 0 : videos.front().feature_dim();
}

Dataset load_dataset(const DatasetLayout& layout, const std::vector<std::string>& ids) {
  Dataset ds;
  ds.classes = read_mapping_file(layout.mapping());
  for (const auto& id : ids) {
    VideoSample v = load_video_sample(layout.features(id), layout.labels(id), ds.classes);
    v.id = id;
    if (!ds.videos.empty()) {
      Require(v.feature_dim() == ds.feature_dim(), ErrorCode::kShapeMismatch,
              "video '" + id + "' has feature dimension " +
                  std::to_string(v.feature_dim()) + ", expected " +
                  std::to_string(ds.feature_dim()));
    }
    ds.videos.push_back(std::move(v));
  }
  return ds;
}

Dataset load_dataset_split(const DatasetLayout& layout,
                           const std::filesystem::path& split_file) {
  return load_dataset(layout, read_split_file(split_file));
}

void write_dataset(const DatasetLayout& layout, const ClassMap& classes,
                   std::span<const VideoSample> videos,
                   const std::vector<std::string>& train_ids,
                   const std::vector<std::string>& test_ids) {
  namespace fs = std::filesystem;
  std::error_code ec;
  for (const char* sub : {"features", "groundTruth", "splits"}) {
    fs::create_directories(layout.root / sub, ec);
    Require(!ec, ErrorCode::kIo,
            "cannot create '" + (layout.root / sub).string() + "': " + ec.message());
  }
  write_mapping_file(layout.mapping(), classes);
  for (const auto& v : videos) {
    write_feature_file(layout.features(v.id), v.features);
    write_label_file(layout.labels(v.id), v.labels, classes);
  }
  write_split_file(layout.split("train"), train_ids);
  write_split_file(layout.split("test"), test_ids);
}

}  // namespace asrf
