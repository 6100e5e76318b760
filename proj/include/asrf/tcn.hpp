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

#ifndef ASRF_TCN_HPP_
#define ASRF_TCN_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "asrf/matrix.hpp"

namespace asrf {

// Same-length temporal convolution. Zero padding of dilation*(K-1)/2 frames on
// each side keeps the output at full temporal resolution.
struct ConvSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_size = 1;
  std::size_t dilation = 1;

  std::size_t padding() const noexcept { return dilation * (kernel_size - 1) / 2; }
  std::size_t weight_count() const noexcept {
    return kernel_size * in_channels * out_channels;
  }
  void validate() const;
};

// Weights are laid out [tap][in][out]; tap k reads frame t + (k - K/2) * dilation.
template <typename T>
void conv1d_forward(const Matrix<T>& input, const ConvSpec& spec,
                    std::span<const T> weights, std::span<const T> bias,
                    Matrix<T>& output);

// Adds dL/dweights and dL/dbias into the gradient spans, and dL/dinput into
// *grad_input when it is non-null. Nothing is overwritten.
template <typename T>
void conv1d_backward(const Matrix<T>& input, const ConvSpec& spec,
                     std::span<const T> weights, const Matrix<T>& grad_output,
                     Matrix<T>* grad_input, std::span<T> grad_weights,
                     std::span<T> grad_bias);

template <typename T>
void softmax_rows(const Matrix<T>& logits, Matrix<T>& probs);

struct ModelShape {
  std::size_t feature_dim = 0;
  std::size_t num_classes = 0;
  std::size_t channels = 64;
  std::size_t layers = 10;      // dilated residual layers per block
  std::size_t asb_stages = 3;   // refinement stages after the initial ASB head
  std::size_t brb_stages = 3;   // refinement stages after the initial BRB head

  std::size_t asb_heads() const noexcept { return asb_stages + 1; }
  std::size_t brb_heads() const noexcept { return brb_stages + 1; }
  // Frames seen by one block: 1 + 2 * (2^layers - 1).
  std::size_t receptive_field() const noexcept {
    return 1 + 2 * ((std::size_t{1} << layers) - 1);
  }
  void validate() const;
  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

template <typename T>
struct Parameter {
  std::string name;
  std::vector<std::size_t> dims;
  std::vector<T> value;
  std::vector<T> grad;
};

// Output probabilities of every head, initial head first.
template <typename T>
struct Predictions {
  std::vector<Matrix<T>> asb;        // softmax maps, T x C
  std::vector<std::vector<T>> brb;   // sigmoid vectors, length T
};

// dL/d(probabilities) for every head, shaped like Predictions.
template <typename T>
struct HeadGradients {
  std::vector<Matrix<T>> asb;
  std::vector<std::vector<T>> brb;

  static HeadGradients Zeros(const Predictions<T>& like);
};

template <typename T>
class AsrfModel;

// Activations recorded by a forward pass, consumed by AsrfModel::backward.
template <typename T>
class ForwardPass {
 public:
  bool valid() const noexcept { return valid_; }
  const Predictions<T>& predictions() const noexcept { return predictions_; }
  // Output of the shared extractor, T x channels.
  const Matrix<T>& shared_features() const noexcept { return extractor_.features; }

 private:
  friend class AsrfModel<T>;

  struct LayerCache {
    Matrix<T> input;
    Matrix<T> pre_activation;
    Matrix<T> activation;
    Matrix<T> dropout_mask;  // empty when dropout is off
  };
  struct BlockCache {
    Matrix<T> input;
    std::vector<LayerCache> layers;
    Matrix<T> features;
  };

  bool valid_ = false;
  ModelShape shape_;
  BlockCache extractor_;
  std::vector<BlockCache> asb_stages_;
  std::vector<BlockCache> brb_stages_;
  Predictions<T> predictions_;
};

// Shared dilated-residual extractor feeding a multi-stage action segmentation
// branch (softmax heads) and a multi-stage boundary regression branch (sigmoid
// heads). Refinement stages take the previous stage's probabilities as input.
template <typename T>
class AsrfModel {
 public:
  explicit AsrfModel(const ModelShape& shape);

  const ModelShape& shape() const noexcept { return shape_; }
  std::vector<Parameter<T>>& parameters() noexcept { return params_; }
  const std::vector<Parameter<T>>& parameters() const noexcept { return params_; }
  std::size_t parameter_count() const noexcept;

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  void init_parameters(std::uint64_t seed);
  void zero_grad();

  // Inference: no dropout, pure function of parameters and features.
  ForwardPass<T> forward(const Matrix<T>& features) const;
  // Training: inverted dropout after every residual branch.
  ForwardPass<T> forward(const Matrix<T>& features, double dropout_rate,
                         std::mt19937_64& rng) const;

  // Accumulates parameter gradients of the loss whose head gradients are given.
  void backward(const ForwardPass<T>& pass, const HeadGradients<T>& head_grads);

  template <typename U>
  AsrfModel<U> cast() const {
    AsrfModel<U> out(shape_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      for (std::size_t j = 0; j < params_[i].value.size(); ++j) {
        out.params_[i].value[j] = static_cast<U>(params_[i].value[j]);
      }
    }
    return out;
  }

 private:
  template <typename U>
  friend class AsrfModel;

  struct ConvRef {
    ConvSpec spec;
    std::size_t weight = 0;
    std::size_t bias = 0;
  };
  struct LayerRef {
    ConvRef dilated;
    ConvRef pointwise;
  };
  struct BlockRef {
    ConvRef entry;
    std::vector<LayerRef> layers;
    std::optional<ConvRef> exit;
  };

  ConvRef add_conv(const std::string& prefix, const ConvSpec& spec);
  BlockRef add_block(const std::string& prefix, std::size_t in, std::size_t out,
                     bool with_exit);

  ForwardPass<T> run(const Matrix<T>& features, double dropout_rate,
                     std::mt19937_64* rng) const;
  void conv(const ConvRef& ref, const Matrix<T>& in, Matrix<T>& out) const;
  void conv_backward(const ConvRef& ref, const Matrix<T>& in,
                     const Matrix<T>& grad_out, Matrix<T>* grad_in);
  void run_block(const BlockRef& block, const Matrix<T>& input, double dropout_rate,
                 std::mt19937_64* rng,
                 typename ForwardPass<T>::BlockCache& cache) const;
  void backward_block(const BlockRef& block,
                      const typename ForwardPass<T>::BlockCache& cache,
                      Matrix<T> grad_features, Matrix<T>* grad_input);

  ModelShape shape_;
  std::vector<Parameter<T>> params_;
  BlockRef extractor_;
  ConvRef asb_head_;
  std::vector<BlockRef> asb_stages_;
  ConvRef brb_head_;
  std::vector<BlockRef> brb_stages_;
};

// Checkpoint: "ASRFM", u32 version, u32 D, C, channels, layers, asb_stages,
// brb_stages, then until EOF per tensor: u32 name length, name bytes, u32 rank,
// u32 dims..., float32 data. All little-endian.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const AsrfModel<float>& model);
AsrfModel<float> load_checkpoint(const std::filesystem::path& path);

extern template class AsrfModel<float>;
extern template class AsrfModel<double>;

}  // namespace asrf

#endif  // ASRF_TCN_HPP_
