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

#ifndef ASRF_LOSSES_HPP_
#define ASRF_LOSSES_HPP_

#include <span>
#include <string>
#include <vector>

#include "asrf/core.hpp"
#include "asrf/matrix.hpp"
#include "asrf/tcn.hpp"

namespace asrf {

// Floor applied to every probability before it enters a log.
inline constexpr double kProbabilityFloor = 1e-8;

enum class ClassificationLoss { kCrossEntropy, kClassWeightedCrossEntropy, kFocal };
enum class SmoothingLoss { kNone, kTmse, kGsTmse };

struct LossConfig {
  double lambda_brb = 0.1;
  double tau = 4.0;
  double sigma = 1.0;
  double tmse_weight = 0.15;  // only applied to plain TMSE
  ClassificationLoss classification = ClassificationLoss::kClassWeightedCrossEntropy;
  SmoothingLoss smoothing = SmoothingLoss::kGsTmse;
  double focal_gamma = 2.0;

  void validate() const;
};

std::string to_string(ClassificationLoss v);
std::string to_string(SmoothingLoss v);
ClassificationLoss parse_classification_loss(const std::string& s);
SmoothingLoss parse_smoothing_loss(const std::string& s);

// Every loss below optionally accumulates grad_scale * dL/dprobs into `grad`.

// Mean over frames of -w[c_t] * log p_t(c_t); w = 1 when `class_weights` is empty.
template <typename T>
double cross_entropy(const Matrix<T>& probs, std::span<const ClassId> labels,
                     std::span<const double> class_weights = {},
                     Matrix<T>* grad = nullptr, double grad_scale = 1.0);

// Mean over frames of -(1 - p_t)^gamma * log p_t.
template <typename T>
double focal_loss(const Matrix<T>& probs, std::span<const ClassId> labels, double gamma,
                  Matrix<T>* grad = nullptr, double grad_scale = 1.0);

// (1 / (T*C)) * sum_{t>=1, c} min(|log p_{t,c} - log p_{t-1,c}|, tau)^2.
template <typename T>
double tmse(const Matrix<T>& probs, double tau, Matrix<T>* grad = nullptr,
            double grad_scale = 1.0);

// exp(-|x_t - x_{t-1}|^2 / (2 sigma^2)) for t >= 1; entry 0 is unused (0).
template <typename T>
std::vector<double> frame_similarity(const Matrix<T>& features, double sigma);

// TMSE with each transition t weighted by frame_similarity(features)[t].
template <typename T>
double gs_tmse(const Matrix<T>& probs, const Matrix<T>& features, double tau,
               double sigma, Matrix<T>* grad = nullptr, double grad_scale = 1.0);

// (1/T) * sum_t -[w_p y_t log p_t + (1 - y_t) log(1 - p_t)].
template <typename T>
double weighted_binary_logistic(std::span<const T> probs,
                                std::span<const std::uint8_t> targets, double w_p,
                                std::span<T> grad = {}, double grad_scale = 1.0);

struct LossTerms {
  double total = 0.0;
  double asb = 0.0;             // mean over ASB heads of classification + smoothing
  double brb = 0.0;             // mean over BRB heads
  double classification = 0.0;  // mean over ASB heads
  double smoothing = 0.0;       // mean over ASB heads, after tmse_weight

  LossTerms& operator+=(const LossTerms& o);
  LossTerms scaled(double s) const;
};

template <typename T>
struct LossResult {
  LossTerms terms;
  HeadGradients<T> grads;
};

// total = L_asb + lambda * L_brb with per-head gradients.
template <typename T>
LossResult<T> total_loss(const Predictions<T>& predictions, std::span<const ClassId> labels,
                         std::span<const std::uint8_t> boundary_targets,
                         const Matrix<T>& features, const LossConfig& config,
                         std::span<const double> class_weights, double w_p);

}  // namespace asrf

#endif  // ASRF_LOSSES_HPP_
