#pragma once

#include <cstdint>
#include <iosfwd>
#include <filesystem>
#include <utility>
#include <vector>

#include "ddcur/core.hpp"

namespace ddcur {

/// Fully connected network: rectified-linear hidden layers, identity
/// output (loss heads apply their own transforms). All arithmetic is
/// 64-bit.
struct Mlp {
  std::vector<int> sizes;            // layer widths, input first
  std::vector<Mat> weights;          // weights[l]: sizes[l+1] x sizes[l]
  std::vector<Vec> biases;           // biases[l]: sizes[l+1]

  /// He-style uniform fan-in init for weights, zero biases.
  static Mlp random_init(const std::vector<int>& sizes, Rng& rng);
  static Mlp zeros(const std::vector<int>& sizes);

  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
  std::size_t layer_count() const { return weights.size(); }
  std::size_t parameter_count() const;
  bool finite() const;

  Vec forward(const Vec& input) const;
  /// Batched forward; samples are columns.
  Mat forward_batch(const Mat& inputs) const;
};

/// Per-parameter gradients, same shapes as the network.
struct Gradients {
  std::vector<Mat> weights;
  std::vector<Vec> biases;

  static Gradients zeros_like(const Mlp& net);
};

/// First-order adaptive optimizer state (per-parameter moment
/// accumulators, bias-corrected).
struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t timestep = 0;
  std::vector<Mat> m_weights, v_weights;
  std::vector<Vec> m_biases, v_biases;

  static AdamState for_net(const Mlp& net, double learning_rate = 1e-3);
};

/// Numerically stable softmax.
Vec softmax(const Vec& logits);

/// Mean softmax cross-entropy over the batch (columns of inputs);
/// labels are 0-based class indices.
std::pair<double, Gradients> backward_cross_entropy(
    const Mlp& net, const Mat& inputs, const std::vector<int>& labels);

/// Mean squared error over batch and output dimensions.
std::pair<double, Gradients> backward_mse(const Mlp& net, const Mat& inputs,
                                          const Mat& targets);

/// Generic reverse pass from a given dLoss/dOutput (columns match the
/// input batch). When d_inputs is non-null it receives dLoss/dInput.
/// The building block behind the loss heads and the policy updates.
Gradients backward_from_output(const Mlp& net, const Mat& inputs,
                               const Mat& d_output, Mat* d_inputs = nullptr);

/// One optimizer step; increments the timestep and applies
/// bias-corrected moment updates in place.
void adam_step(Mlp& net, const Gradients& grads, AdamState& state);

/// target <- rate * online + (1 - rate) * target.
void soft_update(Mlp& target, const Mlp& online, double rate);

/// Checkpoint format: header (magic, layer sizes, activation tag)
/// followed by a row-major little-endian 64-bit parameter blob.
void save_mlp(std::ostream& out, const Mlp& net);
Mlp load_mlp(std::istream& in);
void save_mlp_file(const std::filesystem::path& path, const Mlp& net);
Mlp load_mlp_file(const std::filesystem::path& path);

}  // namespace ddcur
