// SPDX-License-Identifier: Apache-2.0
#include "cfraud/mlp.hpp"

#include <algorithm>
#include <numeric>

#include "cfraud/error.hpp"

namespace cfraud {

MlpNetwork::MlpNetwork(std::size_t inputs, std::size_t hidden)
    : inputs_(inputs), hidden_(hidden), params_(hidden * inputs + hidden + 2 * hidden + 2, 0.0) {
  if (inputs == 0 || hidden == 0) throw InvalidArgument("mlp needs at least one input and one hidden unit");
}

void MlpNetwork::initialize(Rng& rng) {
  const double b1 = 1.0 / std::sqrt(static_cast<double>(inputs_));
  const double b2 = 1.0 / std::sqrt(static_cast<double>(hidden_));
  const std::size_t layer1 = hidden_ * inputs_ + hidden_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const double bound = i < layer1 ? b1 : b2;
    params_[i] = (2.0 * uniform01(rng) - 1.0) * bound;
  }
}

namespace {

struct Forward {
  std::vector<double> pre;  // hidden pre-activations
  std::array<double, 2> z{};
};

Forward forward(const MlpNetwork& net, std::span<const double> x) {
  const auto p = net.parameters();
  const std::size_t n = net.inputs(), h = net.hidden();
  const double* w1 = p.data();
  const double* b1 = w1 + h * n;
  const double* w2 = b1 + h;
  const double* b2 = w2 + 2 * h;
  Forward f;
  f.pre.resize(h);
  for (std::size_t j = 0; j < h; ++j) {
    double s = b1[j];
    const double* wr = w1 + j * n;
    for (std::size_t i = 0; i < n; ++i) s += wr[i] * x[i];
    f.pre[j] = s;
  }
  for (std::size_t c = 0; c < 2; ++c) {
    double s = b2[c];
    for (std::size_t j = 0; j < h; ++j) s += w2[c * h + j] * std::max(0.0, f.pre[j]);
    f.z[c] = s;
  }
  return f;
}

std::array<double, 2> softmax(const std::array<double, 2>& z) {
  const double m = std::max(z[0], z[1]);
  const double e0 = std::exp(z[0] - m), e1 = std::exp(z[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

double nll(const std::array<double, 2>& z, int label) {
  const double m = std::max(z[0], z[1]);
  const double lse = m + std::log(std::exp(z[0] - m) + std::exp(z[1] - m));
  return lse - z[static_cast<std::size_t>(label)];
}

void check_input(const MlpNetwork& net, std::span<const double> x) {
  if (x.size() != net.inputs())
    throw DimensionError("mlp input has " + std::to_string(x.size()) + " values, expected " +
                         std::to_string(net.inputs()));
}

}  // namespace

std::array<double, 2> MlpNetwork::logits(std::span<const double> x) const {
  check_input(*this, x);
  return forward(*this, x).z;
}

std::array<double, 2> MlpNetwork::probabilities(std::span<const double> x) const { return softmax(logits(x)); }

double MlpNetwork::loss(std::span<const double> x, int label) const { return nll(logits(x), label); }

double MlpNetwork::loss_and_gradient(std::span<const double> x, int label, std::span<double> grad) const {
  check_input(*this, x);
  if (grad.size() != params_.size()) throw DimensionError("gradient buffer size mismatch");
  const std::size_t n = inputs_, h = hidden_;
  const Forward f = forward(*this, x);
  const auto prob = softmax(f.z);
  const std::array<double, 2> dz = {prob[0] - (label == 0 ? 1.0 : 0.0), prob[1] - (label == 1 ? 1.0 : 0.0)};

  const double* w2 = params_.data() + h * n + h;
  double* gw1 = grad.data();
  double* gb1 = gw1 + h * n;
  double* gw2 = gb1 + h;
  double* gb2 = gw2 + 2 * h;
  for (std::size_t c = 0; c < 2; ++c) {
    gb2[c] = dz[c];
    for (std::size_t j = 0; j < h; ++j) gw2[c * h + j] = dz[c] * std::max(0.0, f.pre[j]);
  }
  for (std::size_t j = 0; j < h; ++j) {
    const double dh = f.pre[j] > 0 ? dz[0] * w2[j] + dz[1] * w2[h + j] : 0.0;
    gb1[j] = dh;
    double* row = gw1 + j * n;
    for (std::size_t i = 0; i < n; ++i) row[i] = dh * x[i];
  }
  return nll(f.z, label);
}

MlpTrainingResult train_mlp(MlpNetwork& net, std::span<const double> features, std::span<const int> labels,
                            const MlpParams& params, Rng& rng) {
  const std::size_t n_in = net.inputs();
  const std::size_t rows = labels.size();
  if (rows == 0 || features.size() != rows * n_in) throw DimensionError("train_mlp: feature/label size mismatch");
  if (params.batch_size == 0) throw InvalidArgument("train_mlp: batch size must be positive");

  const std::size_t np = net.parameter_count();
  std::vector<double> velocity(np, 0.0), grad(np), batch_grad(np), noisy(n_in);
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  MlpTrainingResult result;
  auto theta = net.parameters();

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle(order, rng);
    double epoch_loss = 0;
    for (std::size_t start = 0; start < rows; start += params.batch_size) {
      const std::size_t end = std::min(rows, start + params.batch_size);
      std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t r = order[k];
        const auto x = features.subspan(r * n_in, n_in);
        for (std::size_t i = 0; i < n_in; ++i)
          noisy[i] = params.noise_std > 0 ? x[i] + params.noise_std * standard_normal(rng) : x[i];
        epoch_loss += net.loss_and_gradient(noisy, labels[r], grad);
        for (std::size_t q = 0; q < np; ++q) batch_grad[q] += grad[q];
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t q = 0; q < np; ++q) {
        const double g = batch_grad[q] * scale + params.weight_decay * theta[q];
        velocity[q] = params.momentum * velocity[q] + g;
        theta[q] -= params.learning_rate * velocity[q];
      }
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(rows));
  }
  return result;
}

}  // namespace cfraud
