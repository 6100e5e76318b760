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

#include "asrf/losses.hpp"

#include <algorithm>
#include <cmath>

#include "asrf/error.hpp"

namespace asrf {

void LossConfig::validate() const {
  Require(lambda_brb >= 0.0, ErrorCode::kInvalidArgument, "lambda_brb must be >= 0");
  Require(tau > 0.0, ErrorCode::kInvalidArgument, "tau must be > 0");
  Require(sigma > 0.0, ErrorCode::kInvalidArgument, "sigma must be > 0");
  Require(tmse_weight >= 0.0, ErrorCode::kInvalidArgument, "tmse_weight must be >= 0");
  Require(focal_gamma >= 0.0, ErrorCode::kInvalidArgument, "focal_gamma must be >= 0");
}

std::string to_string(ClassificationLoss v) {
  switch (v) {
    case ClassificationLoss::kCrossEntropy: return "ce";
    case ClassificationLoss::kClassWeightedCrossEntropy: return "ce_class_weighted";
    case ClassificationLoss::kFocal: return "focal";
  }
  return "?";
}

std::string to_string(SmoothingLoss v) {
  switch (v) {
    case SmoothingLoss::kNone: return "none";
    case SmoothingLoss::kTmse: return "tmse";
    case SmoothingLoss::kGsTmse: return "gs_tmse";
  }
  return "?";
}

ClassificationLoss parse_classification_loss(const std::string& s) {
  if (s == "ce") return ClassificationLoss::kCrossEntropy;
  if (s == "ce_class_weighted") return ClassificationLoss::kClassWeightedCrossEntropy;
  if (s == "focal") return ClassificationLoss::kFocal;
  Fail(ErrorCode::kInvalidArgument,
       "unknown classification loss '" + s + "' (ce, ce_class_weighted, focal)");
}

SmoothingLoss parse_smoothing_loss(const std::string& s) {
  if (s == "none") return SmoothingLoss::kNone;
  if (s == "tmse") return SmoothingLoss::kTmse;
  if (s == "gs_tmse") return SmoothingLoss::kGsTmse;
  Fail(ErrorCode::kInvalidArgument,
       "unknown smoothing loss '" + s + "' (none, tmse, gs_tmse)");
}

LossTerms& LossTerms::operator+=(const LossTerms& o) {
  total += o.total;
  asb += o.asb;
  brb += o.brb;
  classification += o.classification;
  smoothing += o.smoothing;
  return *this;
}

LossTerms LossTerms::scaled(double s) const {
  return {total * s, asb * s, brb * s, classification * s, smoothing * s};
}

namespace {

template <typename T>
void check_labels(const Matrix<T>& probs, std::span<const ClassId> labels) {
  Require(probs.rows() == labels.size(), ErrorCode::kShapeMismatch,
          "loss: probability rows (" + std::to_string(probs.rows()) +
              ") != label count (" + std::to_string(labels.size()) + ")");
  Require(!labels.empty(), ErrorCode::kShapeMismatch, "loss: empty sequence");
  for (ClassId c : labels) {
    Require(c < probs.cols(), ErrorCode::kInvalidArgument,
            "loss: label " + std::to_string(c) + " out of range");
  }
}

template <typename T>
void check_grad(const Matrix<T>& probs, const Matrix<T>* grad) {
  if (grad == nullptr) return;
  Require(grad->rows() == probs.rows() && grad->cols() == probs.cols(),
          ErrorCode::kShapeMismatch, "loss: gradient buffer shape mismatch");
}

// Shared body of TMSE and GS-TMSE; `weights` is empty for plain TMSE.
template <typename T>
double truncated_mse(const Matrix<T>& probs, double tau, std::span<const double> weights,
                     Matrix<T>* grad, double grad_scale) {
  check_grad(probs, grad);
  const std::size_t frames = probs.rows();
  const std::size_t classes = probs.cols();
  if (frames < 2) return 0.0;
  const double norm = 1.0 / (static_cast<double>(frames) * static_cast<double>(classes));
  double sum = 0.0;
  for (std::size_t t = 1; t < frames; ++t) {
    const double w = weights.empty() ? 1.0 : weights[t];
    for (std::size_t c = 0; c < classes; ++c) {
      const double p_now = static_cast<double>(probs(t, c));
      const double p_prev = static_cast<double>(probs(t - 1, c));
      const double diff = std::log(std::max(p_now, kProbabilityFloor)) -
                          std::log(std::max(p_prev, kProbabilityFloor));
      const double delta = std::abs(diff);
      if (delta <= tau) {
        sum += w * delta * delta;
        if (grad != nullptr) {
          const double g = grad_scale * norm * w * 2.0 * diff;
          if (p_now >= kProbabilityFloor) (*grad)(t, c) += static_cast<T>(g / p_now);
          if (p_prev >= kProbabilityFloor) (*grad)(t - 1, c) -= static_cast<T>(g / p_prev);
        }
      } else {
        sum += w * tau * tau;
      }
    }
  }
  return sum * norm;
}

}  // namespace

template <typename T>
double cross_entropy(const Matrix<T>& probs, std::span<const ClassId> labels,
                     std::span<const double> class_weights, Matrix<T>* grad,
                     double grad_scale) {
  check_labels(probs, labels);
  check_grad(probs, grad);
  Require(class_weights.empty() || class_weights.size() == probs.cols(),
          ErrorCode::kShapeMismatch, "cross_entropy: class weight count mismatch");
  const double inv_t = 1.0 / static_cast<double>(labels.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const ClassId c = labels[t];
    const double w = class_weights.empty() ? 1.0 : class_weights[c];
    const double p = static_cast<double>(probs(t, c));
    sum += -w * std::log(std::max(p, kProbabilityFloor));
    if (grad != nullptr && p >= kProbabilityFloor) {
      (*grad)(t, c) += static_cast<T>(-grad_scale * w * inv_t / p);
    }
  }
  return sum * inv_t;
}

template <typename T>
double focal_loss(const Matrix<T>& probs, std::span<const ClassId> labels, double gamma,
                  Matrix<T>* grad, double grad_scale) {
  check_labels(probs, labels);
  check_grad(probs, grad);
  const double inv_t = 1.0 / static_cast<double>(labels.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const ClassId c = labels[t];
    const double raw = static_cast<double>(probs(t, c));
    const double p = std::max(raw, kProbabilityFloor);
    const double q = 1.0 - p;
    const double log_p = std::log(p);
    const double modulator = std::pow(q, gamma);
    sum += -modulator * log_p;
    if (grad != nullptr && raw >= kProbabilityFloor) {
      // d/dp [-(1-p)^g log p] = g (1-p)^(g-1) log p - (1-p)^g / p
      const double d_mod = gamma == 0.0 ? 0.0 : gamma * std::pow(q, gamma - 1.0) * log_p;
      (*grad)(t, c) += static_cast<T>(grad_scale * inv_t * (d_mod - modulator / p));
    }
  }
  return sum * inv_t;
}

template <typename T>
double tmse(const Matrix<T>& probs, double tau, Matrix<T>* grad, double grad_scale) {
  return truncated_mse(probs, tau, {}, grad, grad_scale);
}

template <typename T>
std::vector<double> frame_similarity(const Matrix<T>& features, double sigma) {
  Require(sigma > 0.0, ErrorCode::kInvalidArgument, "similarity sigma must be > 0");
  std::vector<double> w(features.rows(), 0.0);
  const double denom = 2.0 * sigma * sigma;
  for (std::size_t t = 1; t < features.rows(); ++t) {
    double dist2 = 0.0;
    auto a = features.row(t);
    auto b = features.row(t - 1);
    for (std::size_t d = 0; d < a.size(); ++d) {
      const double diff = static_cast<double>(a[d]) - static_cast<double>(b[d]);
      dist2 += diff * diff;
    }
    w[t] = std::exp(-dist2 / denom);
  }
  return w;
}

template <typename T>
double gs_tmse(const Matrix<T>& probs, const Matrix<T>& features, double tau, double sigma,
               Matrix<T>* grad, double grad_scale) {
  Require(features.rows() == probs.rows(), ErrorCode::kShapeMismatch,
          "gs_tmse: features and probabilities differ in length");
  const auto weights = frame_similarity(features, sigma);
  return truncated_mse<T>(probs, tau, weights, grad, grad_scale);
}

template <typename T>
double weighted_binary_logistic(std::span<const T> probs,
                                std::span<const std::uint8_t> targets, double w_p,
                                std::span<T> grad, double grad_scale) {
  Require(probs.size() == targets.size() && !probs.empty(), ErrorCode::kShapeMismatch,
          "weighted_binary_logistic: probability/target length mismatch");
  Require(w_p > 0.0, ErrorCode::kInvalidArgument, "positive weight must be > 0");
  Require(grad.empty() || grad.size() == probs.size(), ErrorCode::kShapeMismatch,
          "weighted_binary_logistic: gradient buffer mismatch");
  const double inv_t = 1.0 / static_cast<double>(probs.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    const double p = static_cast<double>(probs[t]);
    const double q = 1.0 - p;
    double g = 0.0;
    if (targets[t] != 0) {
      sum += -w_p * std::log(std::max(p, kProbabilityFloor));
      if (p >= kProbabilityFloor) g = -w_p / p;
    } else {
      sum += -std::log(std::max(q, kProbabilityFloor));
      if (q >= kProbabilityFloor) g = 1.0 / q;
    }
    if (!grad.empty()) grad[t] += static_cast<T>(grad_scale * inv_t * g);
  }
  return sum * inv_t;
}

template <typename T>
LossResult<T> total_loss(const Predictions<T>& predictions, std::span<const ClassId> labels,
                         std::span<const std::uint8_t> boundary_targets,
                         const Matrix<T>& features, const LossConfig& config,
                         std::span<const double> class_weights, double w_p) {
  config.validate();
  Require(!predictions.asb.empty() && !predictions.brb.empty(), ErrorCode::kShapeMismatch,
          "total_loss: need at least one ASB head and one BRB head");
  Require(boundary_targets.size() == labels.size(), ErrorCode::kShapeMismatch,
          "total_loss: boundary targets and labels differ in length");
  if (config.classification == ClassificationLoss::kClassWeightedCrossEntropy) {
    Require(class_weights.size() == predictions.asb.front().cols(),
            ErrorCode::kShapeMismatch,
            "total_loss: class-weighted cross entropy needs one weight per class");
  }
  LossResult<T> out;
  out.grads = HeadGradients<T>::Zeros(predictions);

  std::vector<double> similarity;
  if (config.smoothing == SmoothingLoss::kGsTmse) {
    Require(features.rows() == labels.size(), ErrorCode::kShapeMismatch,
            "total_loss: features and labels differ in length");
    similarity = frame_similarity(features, config.sigma);
  }

  const double asb_scale = 1.0 / static_cast<double>(predictions.asb.size());
  for (std::size_t h = 0; h < predictions.asb.size(); ++h) {
    const Matrix<T>& probs = predictions.asb[h];
    Matrix<T>* grad = &out.grads.asb[h];
    double cls = 0.0;
    switch (config.classification) {
      case ClassificationLoss::kCrossEntropy:
        cls = cross_entropy(probs, labels, {}, grad, asb_scale);
        break;
      case ClassificationLoss::kClassWeightedCrossEntropy:
        cls = cross_entropy(probs, labels, class_weights, grad, asb_scale);
        break;
      case ClassificationLoss::kFocal:
        cls = focal_loss(probs, labels, config.focal_gamma, grad, asb_scale);
        break;
    }
    double smooth = 0.0;
    switch (config.smoothing) {
      case SmoothingLoss::kNone:
        break;
      case SmoothingLoss::kTmse:
        smooth = config.tmse_weight *
                 tmse(probs, config.tau, grad, asb_scale * config.tmse_weight);
        break;
      case SmoothingLoss::kGsTmse:
        smooth = truncated_mse<T>(probs, config.tau, similarity, grad, asb_scale);
        break;
    }
    out.terms.classification += cls * asb_scale;
    out.terms.smoothing += smooth * asb_scale;
  }
  out.terms.asb = out.terms.classification + out.terms.smoothing;

  const double brb_scale = 1.0 / static_cast<double>(predictions.brb.size());
  for (std::size_t h = 0; h < predictions.brb.size(); ++h) {
    out.terms.brb += brb_scale * weighted_binary_logistic<T>(
                                     predictions.brb[h], boundary_targets, w_p,
                                     out.grads.brb[h], brb_scale * config.lambda_brb);
  }
  out.terms.total = out.terms.asb + config.lambda_brb * out.terms.brb;
  return out;
}

#define ASRF_INSTANTIATE_LOSSES(T)                                                      \
  template double cross_entropy<T>(const Matrix<T>&, std::span<const ClassId>,          \
                                   std::span<const double>, Matrix<T>*, double);        \
  template double focal_loss<T>(const Matrix<T>&, std::span<const ClassId>, double,     \
                                Matrix<T>*, double);                                    \
  template double tmse<T>(const Matrix<T>&, double, Matrix<T>*, double);                \
  template std::vector<double> frame_similarity<T>(const Matrix<T>&, double);           \
  template double gs_tmse<T>(const Matrix<T>&, const Matrix<T>&, double, double,        \
                             Matrix<T>*, double);                                       \
  template double weighted_binary_logistic<T>(std::span<const T>,                       \
                                              std::span<const std::uint8_t>, double,    \
                                              std::span<T>, double);                    \
  template LossResult<T> total_loss<T>(const Predictions<T>&, std::span<const ClassId>, \
                                       std::span<const std::uint8_t>, const Matrix<T>&, \
                                       const LossConfig&, std::span<const double>,      \
                                       double);

ASRF_INSTANTIATE_LOSSES(float)
ASRF_INSTANTIATE_LOSSES(double)

#undef ASRF_INSTANTIATE_LOSSES

}  // namespace asrf
