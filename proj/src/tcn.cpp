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

#include "asrf/tcn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "asrf/error.hpp"
#include "binary_io.hpp"

namespace asrf {

void ConvSpec::validate() const {
  Require(in_channels >= 1 && out_channels >= 1, ErrorCode::kInvalidArgument,
          "conv channels must be >= 1");
  Require(kernel_size % 2 == 1, ErrorCode::kInvalidArgument,
          "conv kernel size must be odd");
  Require(dilation >= 1, ErrorCode::kInvalidArgument, "conv dilation must be >= 1");
}

template <typename T>
void conv1d_forward(const Matrix<T>& input, const ConvSpec& spec,
                    std::span<const T> weights, std::span<const T> bias,
                    Matrix<T>& output) {
  spec.validate();
  const std::size_t frames = input.rows();
  const std::size_t cin = spec.in_channels;
  const std::size_t cout = spec.out_channels;
  Require(frames >= 1, ErrorCode::kShapeMismatch, "conv1d: empty input");
  Require(input.cols() == cin, ErrorCode::kShapeMismatch,
          "conv1d: input has " + std::to_string(input.cols()) + " channels, expected " +
              std::to_string(cin));
  Require(weights.size() == spec.weight_count() && bias.size() == cout,
          ErrorCode::kShapeMismatch, "conv1d: weight/bias size mismatch");

  output.reset(frames, cout);
  for (std::size_t t = 0; t < frames; ++t) {
    std::copy(bias.begin(), bias.end(), output.row(t).begin());
  }
  const auto half = static_cast<std::ptrdiff_t>(spec.kernel_size / 2);
  const auto n = static_cast<std::ptrdiff_t>(frames);
  for (std::size_t k = 0; k < spec.kernel_size; ++k) {
    const std::ptrdiff_t offset =
        (static_cast<std::ptrdiff_t>(k) - half) * static_cast<std::ptrdiff_t>(spec.dilation);
    const std::ptrdiff_t t_begin = std::max<std::ptrdiff_t>(0, -offset);
    const std::ptrdiff_t t_end = std::min<std::ptrdiff_t>(n, n - offset);
    const T* w_tap = weights.data() + k * cin * cout;
    for (std::ptrdiff_t t = t_begin; t < t_end; ++t) {
      const T* x = input.data() + (t + offset) * cin;
      T* y = output.data() + t * cout;
      for (std::size_t i = 0; i < cin; ++i) {
        const T xi = x[i];
        const T* w = w_tap + i * cout;
        for (std::size_t o = 0; o < cout; ++o) y[o] += xi * w[o];
      }
    }
  }
}

template <typename T>
void conv1d_backward(const Matrix<T>& input, const ConvSpec& spec,
                     std::span<const T> weights, const Matrix<T>& grad_output,
                     Matrix<T>* grad_input, std::span<T> grad_weights,
                     std::span<T> grad_bias) {
  const std::size_t frames = input.rows();
  const std::size_t cin = spec.in_channels;
  const std::size_t cout = spec.out_channels;
  Require(grad_output.rows() == frames && grad_output.cols() == cout,
          ErrorCode::kShapeMismatch, "conv1d_backward: grad_output shape mismatch");
  Require(grad_weights.size() == spec.weight_count() && grad_bias.size() == cout,
          ErrorCode::kShapeMismatch, "conv1d_backward: gradient buffer mismatch");
  if (grad_input != nullptr) {
    Require(grad_input->rows() == frames && grad_input->cols() == cin,
            ErrorCode::kShapeMismatch, "conv1d_backward: grad_input shape mismatch");
  }

  for (std::size_t t = 0; t < frames; ++t) {
    const T* dy = grad_output.data() + t * cout;
    for (std::size_t o = 0; o < cout; ++o) grad_bias[o] += dy[o];
  }
  const auto half = static_cast<std::ptrdiff_t>(spec.kernel_size / 2);
  const auto n = static_cast<std::ptrdiff_t>(frames);
  for (std::size_t k = 0; k < spec.kernel_size; ++k) {
    const std::ptrdiff_t offset =
        (static_cast<std::ptrdiff_t>(k) - half) * static_cast<std::ptrdiff_t>(spec.dilation);
    const std::ptrdiff_t t_begin = std::max<std::ptrdiff_t>(0, -offset);
    const std::ptrdiff_t t_end = std::min<std::ptrdiff_t>(n, n - offset);
    const T* w_tap = weights.data() + k * cin * cout;
    T* gw_tap = grad_weights.data() + k * cin * cout;
    for (std::ptrdiff_t t = t_begin; t < t_end; ++t) {
      const T* x = input.data() + (t + offset) * cin;
      const T* dy = grad_output.data() + t * cout;
      T* dx = grad_input != nullptr ? grad_input->data() + (t + offset) * cin : nullptr;
      for (std::size_t i = 0; i < cin; ++i) {
        const T xi = x[i];
        const T* w = w_tap + i * cout;
        T* gw = gw_tap + i * cout;
        T acc = 0;
        for (std::size_t o = 0; o < cout; ++o) {
          gw[o] += xi * dy[o];
          acc += w[o] * dy[o];
        }
        if (dx != nullptr) dx[i] += acc;
      }
    }
  }
}

template <typename T>
void softmax_rows(const Matrix<T>& logits, Matrix<T>& probs) {
  probs.reset(logits.rows(), logits.cols());
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    auto in = logits.row(t);
    auto out = probs.row(t);
    const T peak = *std::max_element(in.begin(), in.end());
    T sum = 0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      out[c] = std::exp(in[c] - peak);
      sum += out[c];
    }
    for (auto& v : out) v /= sum;
  }
}

namespace {

template <typename T>
T sigmoid(T x) {
  if (x >= 0) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

// dL/dlogits from dL/dprobs for a row-wise softmax.
template <typename T>
Matrix<T> softmax_backward(const Matrix<T>& probs, const Matrix<T>& grad_probs) {
  Matrix<T> out(probs.rows(), probs.cols());
  for (std::size_t t = 0; t < probs.rows(); ++t) {
    auto p = probs.row(t);
    auto g = grad_probs.row(t);
    T dot = 0;
    for (std::size_t c = 0; c < p.size(); ++c) dot += g[c] * p[c];
    auto o = out.row(t);
    for (std::size_t c = 0; c < p.size(); ++c) o[c] = p[c] * (g[c] - dot);
  }
  return out;
}

template <typename T>
Matrix<T> as_column(std::span<const T> v) {
  Matrix<T> m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.values().begin());
  return m;
}

template <typename T>
void add_into(Matrix<T>& dst, const Matrix<T>& src) {
  auto d = dst.values();
  auto s = src.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

}  // namespace

void ModelShape::validate() const {
  Require(feature_dim >= 1, ErrorCode::kInvalidArgument, "model feature_dim must be >= 1");
  Require(num_classes >= 2, ErrorCode::kInvalidArgument, "model num_classes must be >= 2");
  Require(channels >= 1, ErrorCode::kInvalidArgument, "model channels must be >= 1");
  Require(layers >= 1 && layers <= 20, ErrorCode::kInvalidArgument,
          "model layers must be in [1, 20]");
}

template <typename T>
HeadGradients<T> HeadGradients<T>::Zeros(const Predictions<T>& like) {
  HeadGradients<T> g;
  for (const auto& m : like.asb) g.asb.emplace_back(m.rows(), m.cols());
  for (const auto& v : like.brb) g.brb.emplace_back(v.size(), T(0));
  return g;
}

template <typename T>
AsrfModel<T>::AsrfModel(const ModelShape& shape) : shape_(shape) {
  shape_.validate();
  const std::size_t f = shape_.channels;
  extractor_ = add_block("extractor", shape_.feature_dim, 0, false);
  asb_head_ = add_conv("asb.head", {f, shape_.num_classes, 1, 1});
  for (std::size_t s = 0; s < shape_.asb_stages; ++s) {
    asb_stages_.push_back(add_block("asb.stages." + std::to_string(s),
                                    shape_.num_classes, shape_.num_classes, true));
  }
  brb_head_ = add_conv("brb.head", {f, 1, 1, 1});
  for (std::size_t s = 0; s < shape_.brb_stages; ++s) {
    brb_stages_.push_back(add_block("brb.stages." + std::to_string(s), 1, 1, true));
  }
}

template <typename T>
typename AsrfModel<T>::ConvRef AsrfModel<T>::add_conv(const std::string& prefix,
                                                      const ConvSpec& spec) {
  ConvRef ref{spec, params_.size(), params_.size() + 1};
  params_.push_back({prefix + ".weight",
                     {spec.kernel_size, spec.in_channels, spec.out_channels},
                     std::vector<T>(spec.weight_count(), T(0)),
                     std::vector<T>(spec.weight_count(), T(0))});
  params_.push_back({prefix + ".bias",
                     {spec.out_channels},
                     std::vector<T>(spec.out_channels, T(0)),
                     std::vector<T>(spec.out_channels, T(0))});
  return ref;
}

template <typename T>
typename AsrfModel<T>::BlockRef AsrfModel<T>::add_block(const std::string& prefix,
                                                        std::size_t in, std::size_t out,
                                                        bool with_exit) {
  const std::size_t f = shape_.channels;
  BlockRef block;
  block.entry = add_conv(prefix + ".entry", {in, f, 1, 1});
  for (std::size_t l = 0; l < shape_.layers; ++l) {
    const std::string name = prefix + ".layers." + std::to_string(l);
    LayerRef layer;
    layer.dilated = add_conv(name + ".dilated", {f, f, 3, std::size_t{1} << l});
    layer.pointwise = add_conv(name + ".pointwise", {f, f, 1, 1});
    block.layers.push_back(layer);
  }
  if (with_exit) block.exit = add_conv(prefix + ".exit", {f, out, 1, 1});
  return block;
}

template <typename T>
std::size_t AsrfModel<T>::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

template <typename T>
void AsrfModel<T>::init_parameters(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& p : params_) {
    if (p.dims.size() == 1) {
      std::fill(p.value.begin(), p.value.end(), T(0));
      continue;
    }
    const double fan_in = static_cast<double>(p.dims[0] * p.dims[1]);
    const double bound = 1.0 / std::sqrt(fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : p.value) v = static_cast<T>(dist(rng));
  }
}

template <typename T>
void AsrfModel<T>::zero_grad() {
  for (auto& p : params_) std::fill(p.grad.begin(), p.grad.end(), T(0));
}

template <typename T>
void AsrfModel<T>::conv(const ConvRef& ref, const Matrix<T>& in, Matrix<T>& out) const {
  conv1d_forward<T>(in, ref.spec, params_[ref.weight].value, params_[ref.bias].value, out);
}

template <typename T>
void AsrfModel<T>::conv_backward(const ConvRef& ref, const Matrix<T>& in,
                                 const Matrix<T>& grad_out, Matrix<T>* grad_in) {
  conv1d_backward<T>(in, ref.spec, params_[ref.weight].value, grad_out, grad_in,
                     params_[ref.weight].grad, params_[ref.bias].grad);
}

template <typename T>
void AsrfModel<T>::run_block(const BlockRef& block, const Matrix<T>& input,
                             double dropout_rate, std::mt19937_64* rng,
                             typename ForwardPass<T>::BlockCache& cache) const {
  cache.input = input;
  Matrix<T> h;
  conv(block.entry, input, h);
  cache.layers.resize(block.layers.size());
  const bool dropout = rng != nullptr && dropout_rate > 0.0;
  const T keep_scale = dropout ? static_cast<T>(1.0 / (1.0 - dropout_rate)) : T(1);
  std::bernoulli_distribution drop(dropout ? dropout_rate : 0.0);
  for (std::size_t l = 0; l < block.layers.size(); ++l) {
    auto& lc = cache.layers[l];
    lc.input = h;
    conv(block.layers[l].dilated, h, lc.pre_activation);
    lc.activation = lc.pre_activation;
    for (auto& v : lc.activation.values()) v = std::max(v, T(0));
    Matrix<T> branch;
    conv(block.layers[l].pointwise, lc.activation, branch);
    if (dropout) {
      lc.dropout_mask.reset(branch.rows(), branch.cols());
      auto mask = lc.dropout_mask.values();
      for (auto& m : mask) m = drop(*rng) ? T(0) : keep_scale;
      auto b = branch.values();
      for (std::size_t i = 0; i < b.size(); ++i) b[i] *= mask[i];
    } else {
      lc.dropout_mask = Matrix<T>();
    }
    add_into(h, branch);
  }
  cache.features = std::move(h);
}

template <typename T>
void AsrfModel<T>::backward_block(const BlockRef& block,
                                  const typename ForwardPass<T>::BlockCache& cache,
                                  Matrix<T> grad_h, Matrix<T>* grad_input) {
  for (std::size_t l = block.layers.size(); l-- > 0;) {
    const auto& lc = cache.layers[l];
    Matrix<T> grad_branch = grad_h;
    if (!lc.dropout_mask.empty()) {
      auto g = grad_branch.values();
      auto m = lc.dropout_mask.values();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= m[i];
    }
    Matrix<T> grad_act(lc.activation.rows(), lc.activation.cols());
    conv_backward(block.layers[l].pointwise, lc.activation, grad_branch, &grad_act);
    auto ga = grad_act.values();
    auto pre = lc.pre_activation.values();
    for (std::size_t i = 0; i < ga.size(); ++i) {
      if (!(pre[i] > T(0))) ga[i] = T(0);
    }
    // Residual path keeps grad_h; the dilated conv adds its share on top.
    conv_backward(block.layers[l].dilated, lc.input, grad_act, &grad_h);
  }
  conv_backward(block.entry, cache.input, grad_h, grad_input);
}

template <typename T>
ForwardPass<T> AsrfModel<T>::forward(const Matrix<T>& features) const {
  return run(features, 0.0, nullptr);
}

template <typename T>
ForwardPass<T> AsrfModel<T>::forward(const Matrix<T>& features, double dropout_rate,
                                     std::mt19937_64& rng) const {
  Require(dropout_rate >= 0.0 && dropout_rate < 1.0, ErrorCode::kInvalidArgument,
          "dropout rate must be in [0, 1)");
  return run(features, dropout_rate, &rng);
}

template <typename T>
ForwardPass<T> AsrfModel<T>::run(const Matrix<T>& features, double dropout_rate,
                                 std::mt19937_64* rng) const {
  Require(features.rows() >= 1, ErrorCode::kShapeMismatch, "forward: empty sequence");
  Require(features.cols() == shape_.feature_dim, ErrorCode::kShapeMismatch,
          "forward: feature dimension " + std::to_string(features.cols()) +
              " does not match model dimension " + std::to_string(shape_.feature_dim));
  ForwardPass<T> pass;
  pass.shape_ = shape_;
  run_block(extractor_, features, dropout_rate, rng, pass.extractor_);
  const Matrix<T>& shared = pass.extractor_.features;

  Matrix<T> logits;
  conv(asb_head_, shared, logits);
  Matrix<T> probs;
  softmax_rows(logits, probs);
  pass.predictions_.asb.push_back(std::move(probs));
  pass.asb_stages_.resize(asb_stages_.size());
  for (std::size_t s = 0; s < asb_stages_.size(); ++s) {
    auto& cache = pass.asb_stages_[s];
    run_block(asb_stages_[s], pass.predictions_.asb.back(), dropout_rate, rng, cache);
    conv(*asb_stages_[s].exit, cache.features, logits);
    softmax_rows(logits, probs);
    pass.predictions_.asb.push_back(std::move(probs));
  }

  conv(brb_head_, shared, logits);
  auto to_probs = [](const Matrix<T>& l) {
    std::vector<T> p(l.rows());
    for (std::size_t t = 0; t < p.size(); ++t) p[t] = sigmoid(l(t, 0));
    return p;
  };
  pass.predictions_.brb.push_back(to_probs(logits));
  pass.brb_stages_.resize(brb_stages_.size());
  for (std::size_t s = 0; s < brb_stages_.size(); ++s) {
    auto& cache = pass.brb_stages_[s];
    run_block(brb_stages_[s], as_column<T>(pass.predictions_.brb.back()), dropout_rate,
              rng, cache);
    conv(*brb_stages_[s].exit, cache.features, logits);
    pass.predictions_.brb.push_back(to_probs(logits));
  }
  pass.valid_ = true;
  return pass;
}

template <typename T>
void AsrfModel<T>::backward(const ForwardPass<T>& pass, const HeadGradients<T>& head_grads) {
  Require(pass.valid(), ErrorCode::kState, "backward called without a forward pass");
  Require(pass.shape_ == shape_, ErrorCode::kState,
          "backward: forward pass belongs to a model of different shape");
  const auto& pred = pass.predictions_;
  Require(head_grads.asb.size() == pred.asb.size() &&
              head_grads.brb.size() == pred.brb.size(),
          ErrorCode::kShapeMismatch, "backward: head gradient count mismatch");
  const std::size_t frames = pass.extractor_.features.rows();
  for (std::size_t h = 0; h < pred.asb.size(); ++h) {
    Require(head_grads.asb[h].rows() == frames &&
                head_grads.asb[h].cols() == shape_.num_classes,
            ErrorCode::kShapeMismatch, "backward: ASB head gradient shape mismatch");
  }
  for (std::size_t h = 0; h < pred.brb.size(); ++h) {
    Require(head_grads.brb[h].size() == frames, ErrorCode::kShapeMismatch,
            "backward: BRB head gradient shape mismatch");
  }

  const Matrix<T>& shared = pass.extractor_.features;
  Matrix<T> grad_shared(shared.rows(), shared.cols());

  // Action segmentation branch, last stage first. `carry` is the gradient
  // flowing into a stage's probability output from the stage after it.
  Matrix<T> carry(frames, shape_.num_classes);
  for (std::size_t s = asb_stages_.size(); s > 0; --s) {
    Matrix<T> grad_probs = head_grads.asb[s];
    add_into(grad_probs, carry);
    const Matrix<T> grad_logits = softmax_backward(pred.asb[s], grad_probs);
    const auto& cache = pass.asb_stages_[s - 1];
    Matrix<T> grad_features(cache.features.rows(), cache.features.cols());
    conv_backward(*asb_stages_[s - 1].exit, cache.features, grad_logits, &grad_features);
    carry.reset(frames, shape_.num_classes);
    backward_block(asb_stages_[s - 1], cache, std::move(grad_features), &carry);
  }
  {
    Matrix<T> grad_probs = head_grads.asb[0];
    add_into(grad_probs, carry);
    conv_backward(asb_head_, shared, softmax_backward(pred.asb[0], grad_probs), &grad_shared);
  }

  // Boundary regression branch.
  Matrix<T> brb_carry(frames, 1);
  auto sigmoid_backward = [&](std::size_t head, const Matrix<T>& extra) {
    Matrix<T> g(frames, 1);
    for (std::size_t t = 0; t < frames; ++t) {
      const T p = pred.brb[head][t];
      g(t, 0) = (head_grads.brb[head][t] + extra(t, 0)) * p * (T(1) - p);
    }
    return g;
  };
  for (std::size_t s = brb_stages_.size(); s > 0; --s) {
    const Matrix<T> grad_logits = sigmoid_backward(s, brb_carry);
    const auto& cache = pass.brb_stages_[s - 1];
    Matrix<T> grad_features(cache.features.rows(), cache.features.cols());
    conv_backward(*brb_stages_[s - 1].exit, cache.features, grad_logits, &grad_features);
    brb_carry.reset(frames, 1);
    backward_block(brb_stages_[s - 1], cache, std::move(grad_features), &brb_carry);
  }
  conv_backward(brb_head_, shared, sigmoid_backward(0, brb_carry), &grad_shared);

  backward_block(extractor_, pass.extractor_, std::move(grad_shared), nullptr);
}

template void conv1d_forward<float>(const Matrix<float>&, const ConvSpec&,
                                    std::span<const float>, std::span<const float>,
                                    Matrix<float>&);
template void conv1d_forward<double>(const Matrix<double>&, const ConvSpec&,
                                     std::span<const double>, std::span<const double>,
                                     Matrix<double>&);
template void conv1d_backward<float>(const Matrix<float>&, const ConvSpec&,
                                     std::span<const float>, const Matrix<float>&,
                                     Matrix<float>*, std::span<float>, std::span<float>);
template void conv1d_backward<double>(const Matrix<double>&, const ConvSpec&,
                                      std::span<const double>, const Matrix<double>&,
                                      Matrix<double>*, std::span<double>, std::span<double>);
template void softmax_rows<float>(const Matrix<float>&, Matrix<float>&);
template void softmax_rows<double>(const Matrix<double>&, Matrix<double>&);
template struct HeadGradients<float>;
template struct HeadGradients<double>;
template class AsrfModel<float>;
template class AsrfModel<double>;

// ---------------------------------------------------------------------------
// Checkpoints

namespace {
constexpr std::string_view kCheckpointMagic = "ASRFM";
}

void save_checkpoint(const std::filesystem::path& path, const AsrfModel<float>& model) {
  detail::BinaryWriter out(path);
  const ModelShape& s = model.shape();
  out.bytes(kCheckpointMagic);
  out.u32(kCheckpointVersion);
  for (std::size_t v : {s.feature_dim, s.num_classes, s.channels, s.layers, s.asb_stages,
                        s.brb_stages}) {
    out.u32(static_cast<std::uint32_t>(v));
  }
  for (const auto& p : model.parameters()) {
    out.u32(static_cast<std::uint32_t>(p.name.size()));
    out.bytes(p.name);
    out.u32(static_cast<std::uint32_t>(p.dims.size()));
    for (std::size_t d : p.dims) out.u32(static_cast<std::uint32_t>(d));
    for (float v : p.value) out.f32(v);
  }
  out.close();
}

AsrfModel<float> load_checkpoint(const std::filesystem::path& path) {
  detail::BinaryReader in(path);
  in.expect_magic(kCheckpointMagic);
  const std::uint64_t version_at = in.offset();
  const std::uint32_t version = in.u32("version");
  if (version != kCheckpointVersion) {
    in.fail("unsupported checkpoint version " + std::to_string(version), version_at);
  }
  ModelShape shape;
  shape.feature_dim = in.u32("feature_dim");
  shape.num_classes = in.u32("num_classes");
  shape.channels = in.u32("channels");
  shape.layers = in.u32("layers");
  shape.asb_stages = in.u32("asb_stages");
  shape.brb_stages = in.u32("brb_stages");
  try {
    shape.validate();
  } catch (const Error& e) {
    in.fail(std::string("invalid config block: ") + e.what(), 5 + 4);
  }
  AsrfModel<float> model(shape);
  std::vector<bool> seen(model.parameters().size(), false);
  while (!in.at_end()) {
    const std::uint64_t start = in.offset();
    const std::uint32_t name_len = in.u32("tensor name length");
    if (name_len == 0 || name_len > 4096) in.fail("implausible tensor name length", start);
    const std::string name = in.string(name_len, "tensor name");
    auto it = std::find_if(model.parameters().begin(), model.parameters().end(),
                           [&](const Parameter<float>& p) { return p.name == name; });
    if (it == model.parameters().end()) in.fail("unknown tensor '" + name + "'", start);
    const auto index = static_cast<std::size_t>(it - model.parameters().begin());
    if (seen[index]) in.fail("duplicate tensor '" + name + "'", start);
    seen[index] = true;
    const std::uint64_t dims_at = in.offset();
    const std::uint32_t rank = in.u32("tensor rank");
    std::vector<std::size_t> dims;
    for (std::uint32_t r = 0; r < rank && r < 8; ++r) dims.push_back(in.u32("tensor dim"));
    if (dims != it->dims) in.fail("tensor '" + name + "' has unexpected shape", dims_at);
    for (auto& v : it->value) v = in.f32("tensor data");
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      in.fail("missing tensor '" + model.parameters()[i].name + "'", in.offset());
    }
  }
  return model;
}

}  // namespace asrf
