// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "cfraud/seed.hpp"

namespace cfraud {

/// Training recipe. Defaults are the fixed recipe used by every experiment;
/// `hidden == 0` means "same width as the input".
struct MlpParams {
  std::size_t hidden = 0;
  int epochs = 50;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::size_t batch_size = 1;
  double noise_std = std::sqrt(0.1);  // additive Gaussian input noise, training only
};

/// input -> Linear -> ReLU -> Linear(2) -> softmax. Trained on the negative
/// log-likelihood of the true class.
///
/// Parameters live in one flat buffer laid out as
///   w1[hidden][inputs] | b1[hidden] | w2[2][hidden] | b2[2]
/// so optimizers and finite-difference checks can treat them uniformly.
class MlpNetwork {
 public:
  MlpNetwork() = default;
  MlpNetwork(std::size_t inputs, std::size_t hidden);

  std::size_t inputs() const noexcept { return inputs_; }
  std::size_t hidden() const noexcept { return hidden_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  /// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every weight and bias.
  void initialize(Rng& rng);

  std::array<double, 2> logits(std::span<const double> x) const;
  std::array<double, 2> probabilities(std::span<const double> x) const;
  double loss(std::span<const double> x, int label) const;
  /// Writes d(loss)/d(params) into `grad` (size parameter_count()) and
  /// returns the loss.
  double loss_and_gradient(std::span<const double> x, int label, std::span<double> grad) const;

 private:
  std::size_t inputs_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> params_;
};

struct MlpTrainingResult {
  std::vector<double> epoch_loss;  // mean training NLL per epoch
};

/// Mini-batch SGD with momentum and L2 weight decay (decay added to the
/// gradient before the momentum update). Examples are reshuffled each epoch.
/// `features` is row-major n x inputs.
MlpTrainingResult train_mlp(MlpNetwork& net, std::span<const double> features,
                            std::span<const int> labels, const MlpParams& params, Rng& rng);

}  // namespace cfraud
