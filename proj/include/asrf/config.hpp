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


#ifndef ASRF_CONFIG_HPP_
#define ASRF_CONFIG_HPP_

#include <filesystem>
#include <string>

#include "asrf/train.hpp"

namespace asrf {

struct RunPaths {
  std::filesystem::path dataset_root;
  // Relative split paths resolve against dataset_root.
  std::filesystem::path train_split = "splits/train.txt";
  std::filesystem::path test_split = "splits/test.txt";
  std::filesystem::path output_dir = "run";

  std::filesystem::path resolved_train_split() const;
  std::filesystem::path resolved_test_split() const;
};

// Serialized run description. JSON sections: paths, model, train, loss,
// refine, metrics. Unknown keys are rejected.
struct RunConfig {
  RunPaths paths;
  TrainConfig train;

  static RunConfig FromJson(const std::string& text);
  static RunConfig Load(const std::filesystem::path& file);
  std::string to_json() const;

  // Dotted-key override, e.g. set("loss.lambda_brb", "0.2").
  void set(const std::string& key, const std::string& value);

  void validate() const;
  // Throws kIo naming the first missing path. The output directory only
  // needs an existing parent.
  void check_paths(bool need_train, bool need_test) const;
};

}  // namespace asrf

#endif  // ASRF_CONFIG_HPP_
