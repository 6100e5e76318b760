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

#ifndef ASRF_IO_HPP_
#define ASRF_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "asrf/core.hpp"
#include "asrf/matrix.hpp"

namespace asrf {

// Feature / probability file: "ASRF", u32 version (1), u32 T, u32 D, then
// T*D little-endian float32 values, frame-major.
inline constexpr std::uint32_t kFeatureFileVersion = 1;

Matrix<float> read_feature_file(const std::filesystem::path& path);
void write_feature_file(const std::filesystem::path& path, const Matrix<float>& m);

// "<id> <name>" per line, ids contiguous from 0.
ClassMap read_mapping_file(const std::filesystem::path& path);
void write_mapping_file(const std::filesystem::path& path, const ClassMap& classes);

// One class name per line.
Labels read_label_file(const std::filesystem::path& path, const ClassMap& classes);
void write_label_file(const std::filesystem::path& path, std::span<const ClassId> labels,
                      const ClassMap& classes);

// One video id per line; blank lines ignored.
std::vector<std::string> read_split_file(const std::filesystem::path& path);
void write_split_file(const std::filesystem::path& path,
                      const std::vector<std::string>& ids);

VideoSample load_video_sample(const std::filesystem::path& feature_path,
                              const std::filesystem::path& label_path,
                              const ClassMap& classes);

// On-disk dataset layout:
//   <root>/mapping.txt
//   <root>/features/<id>.bin
//   <root>/groundTruth/<id>.txt
//   <root>/splits/{train,test}.txt
struct DatasetLayout {
  std::filesystem::path root;

  std::filesystem::path mapping() const { return root / "mapping.txt"; }
  std::filesystem::path features(const std::string& id) const {
    return root / "features" / (id + ".bin");
  }
  std::filesystem::path labels(const std::string& id) const {
    return root / "groundTruth" / (id + ".txt");
  }
  std::filesystem::path split(const std::string& name) const {
    return root / "splits" / (name + ".txt");
  }
};

struct Dataset {
  ClassMap classes;
  std::vector<VideoSample> videos;

  std::size_t feature_dim() const;
};

Dataset load_dataset(const DatasetLayout& layout, const std::vector<std::string>& ids);
Dataset load_dataset_split(const DatasetLayout& layout, const std::filesystem::path& split_file);

void write_dataset(const DatasetLayout& layout, const ClassMap& classes,
                   std::span<const VideoSample> videos,
                   const std::vector<std::string>& train_ids,
                   const std::vector<std::string>& test_ids);

}  // namespace asrf

#endif  // ASRF_IO_HPP_
