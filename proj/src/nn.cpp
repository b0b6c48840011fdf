#include "ddcur/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace ddcur {

namespace {

constexpr char kMagic[4] = {'D', 'D', 'C', 'N'};
constexpr std::uint8_t kActivationReluIdentity = 0;

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw DimensionError("Mlp: need input and output layers");
  for (int s : sizes) {
    if (s < 1) throw DimensionError("Mlp: layer sizes must be positive");
  }
}

/// Hidden activations for every layer boundary, pre-activation form.
/// acts[0] is the input batch; acts[l+1] = layer l output (post-ReLU
/// for hidden layers, raw for the last).
std::vector<Mat> forward_cached(const Mlp& net, const Mat& inputs) {
  std::vector<Mat> acts;
  acts.reserve(net.layer_count() + 1);
  acts.push_back(inputs);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Mat z = (net.weights[l] * acts.back()).colwise() + net.biases[l];
    if (l + 1 < net.layer_count()) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }
  return acts;
}

void check_forward_input(const Mlp& net, const Mat& inputs) {
  if (inputs.rows() != net.input_dim()) {
    throw DimensionError("forward: input dim mismatch");
  }
  if (!inputs.allFinite()) throw NumericError("forward: non-finite input");
}

}  // namespace

Mlp Mlp::random_init(const std::vector<int>& sizes, Rng& rng) {
  check_sizes(sizes);
  Mlp net;
  net.sizes = sizes;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l];
    const double limit = std::sqrt(6.0 / fan_in);
    Mat w(sizes[l + 1], sizes[l]);
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Vec::Zero(sizes[l + 1]));
  }
  return net;
}

Mlp Mlp::zeros(const std::vector<int>& sizes) {
  check_sizes(sizes);
  Mlp net;
  net.sizes = sizes;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    net.weights.push_back(Mat::Zero(sizes[l + 1], sizes[l]));
    net.biases.push_back(Vec::Zero(sizes[l + 1]));
  }
  return net;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += static_cast<std::size_t>(weights[l].size()) + biases[l].size();
  }
  return n;
}

bool Mlp::finite() const {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  }
  return true;
}

Vec Mlp::forward(const Vec& input) const {
  check_forward_input(*this, input);
  Vec a = input;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    a = weights[l] * a + biases[l];
    if (l + 1 < layer_count()) a = a.cwiseMax(0.0);
  }
  return a;
}

Mat Mlp::forward_batch(const Mat& inputs) const {
  check_forward_input(*this, inputs);
  return forward_cached(*this, inputs).back();
}

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients g;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    g.weights.push_back(Mat::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.biases.push_back(Vec::Zero(net.biases[l].size()));
  }
  return g;
}

AdamState AdamState::for_net(const Mlp& net, double learning_rate) {
  AdamState s;
  s.learning_rate = learning_rate;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    s.m_weights.push_back(Mat::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.v_weights.push_back(Mat::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.m_biases.push_back(Vec::Zero(net.biases[l].size()));
    s.v_biases.push_back(Vec::Zero(net.biases[l].size()));
  }
  return s;
}

Vec softmax(const Vec& logits) {
  const Vec shifted = logits.array() - logits.maxCoeff();
  const Vec e = shifted.array().exp();
  return e / e.sum();
}

Gradients backward_from_output(const Mlp& net, const Mat& inputs,
                               const Mat& d_output, Mat* d_inputs) {
  check_forward_input(net, inputs);
  if (d_output.rows() != net.output_dim() || d_output.cols() != inputs.cols()) {
    throw DimensionError("backward_from_output: d_output shape mismatch");
  }
  const std::vector<Mat> acts = forward_cached(net, inputs);
  Gradients grads;
  grads.weights.resize(net.layer_count());
  grads.biases.resize(net.layer_count());
  Mat delta = d_output;
  for (std::size_t l = net.layer_count(); l-- > 0;) {
    grads.weights[l] = delta * acts[l].transpose();
    grads.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      // acts[l] is post-ReLU: the derivative mask is activation > 0.
      delta = (net.weights[l].transpose() * delta).array() *
              (acts[l].array() > 0.0).cast<double>();
    } else if (d_inputs) {
      *d_inputs = net.weights[0].transpose() * delta;
    }
  }
  return grads;
}

std::pair<double, Gradients> backward_cross_entropy(
    const Mlp& net, const Mat& inputs, const std::vector<int>& labels) {
  if (inputs.cols() == 0) throw EmptyDatasetError("backward_cross_entropy: empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != inputs.cols()) {
    throw DimensionError("backward_cross_entropy: one label per sample");
  }
  const int classes = net.output_dim();
  for (int label : labels) {
    if (label < 0 || label >= classes) {
      throw LabelError("backward_cross_entropy: label out of range");
    }
  }
  const Mat logits = net.forward_batch(inputs);
  const Eigen::Index n = inputs.cols();
  Mat d_logits(classes, n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec p = softmax(logits.col(i));
    loss -= std::log(std::max(p[labels[i]], 1e-300));
    d_logits.col(i) = p;
    d_logits(labels[i], i) -= 1.0;
  }
  loss /= static_cast<double>(n);
  d_logits /= static_cast<double>(n);
  return {loss, backward_from_output(net, inputs, d_logits)};
}

std::pair<double, Gradients> backward_mse(const Mlp& net, const Mat& inputs,
                                          const Mat& targets) {
  if (inputs.cols() == 0) throw EmptyDatasetError("backward_mse: empty batch");
  if (targets.rows() != net.output_dim() || targets.cols() != inputs.cols()) {
    throw DimensionError("backward_mse: target shape mismatch");
  }
  const Mat out = net.forward_batch(inputs);
  const Mat diff = out - targets;
  const double denom = static_cast<double>(diff.size());
  const double loss = diff.squaredNorm() / denom;
  const Mat d_out = diff * (2.0 / denom);
  return {loss, backward_from_output(net, inputs, d_out)};
}

void adam_step(Mlp& net, const Gradients& grads, AdamState& state) {
  if (grads.weights.size() != net.layer_count() ||
      state.m_weights.size() != net.layer_count()) {
    throw DimensionError("adam_step: layer count mismatch");
  }
  state.timestep += 1;
  const double t = static_cast<double>(state.timestep);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    if (grads.weights[l].rows() != net.weights[l].rows() ||
        grads.weights[l].cols() != net.weights[l].cols() ||
        grads.biases[l].size() != net.biases[l].size()) {
      throw DimensionError("adam_step: gradient shape mismatch");
    }
    auto& mw = state.m_weights[l];
    auto& vw = state.v_weights[l];
    mw = state.beta1 * mw + (1.0 - state.beta1) * grads.weights[l];
    vw = state.beta2 * vw.array() +
         (1.0 - state.beta2) * grads.weights[l].array().square();
    net.weights[l].array() -=
        state.learning_rate * (mw.array() / bc1) /
        ((vw.array() / bc2).sqrt() + state.epsilon);

    auto& mb = state.m_biases[l];
    auto& vb = state.v_biases[l];
    mb = state.beta1 * mb + (1.0 - state.beta1) * grads.biases[l];
    vb = state.beta2 * vb.array() +
         (1.0 - state.beta2) * grads.biases[l].array().square();
    net.biases[l].array() -=
        state.learning_rate * (mb.array() / bc1) /
        ((vb.array() / bc2).sqrt() + state.epsilon);
  }
}

void soft_update(Mlp& target, const Mlp& online, double rate) {
  if (target.sizes != online.sizes) {
    throw DimensionError("soft_update: architecture mismatch");
  }
  for (std::size_t l = 0; l < target.layer_count(); ++l) {
    target.weights[l] = rate * online.weights[l] + (1.0 - rate) * target.weights[l];
    target.biases[l] = rate * online.biases[l] + (1.0 - rate) * target.biases[l];
  }
}

namespace {

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("checkpoint: truncated stream");
  return value;
}

}  // namespace

void save_mlp(std::ostream& out, const Mlp& net) {
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, 1);  // format version
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(net.sizes.size()));
  for (int s : net.sizes) write_pod<std::int64_t>(out, s);
  write_pod<std::uint8_t>(out, kActivationReluIdentity);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        row_major = net.weights[l];
    out.write(reinterpret_cast<const char*>(row_major.data()),
              static_cast<std::streamsize>(sizeof(double) * row_major.size()));
    out.write(reinterpret_cast<const char*>(net.biases[l].data()),
              static_cast<std::streamsize>(sizeof(double) * net.biases[l].size()));
  }
  if (!out) throw IoError("checkpoint: write failed");
}

Mlp load_mlp(std::istream& in) {
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("checkpoint: bad magic");
  }
  if (read_pod<std::uint32_t>(in) != 1) throw IoError("checkpoint: unknown version");
  const auto n_sizes = read_pod<std::uint32_t>(in);
  if (n_sizes < 2 || n_sizes > 64) throw IoError("checkpoint: bad layer count");
  std::vector<int> sizes(n_sizes);
  for (auto& s : sizes) {
    const auto v = read_pod<std::int64_t>(in);
    if (v < 1 || v > (1 << 20)) throw IoError("checkpoint: bad layer size");
    s = static_cast<int>(v);
  }
  if (read_pod<std::uint8_t>(in) != kActivationReluIdentity) {
    throw IoError("checkpoint: unknown activation tag");
  }
  Mlp net = Mlp::zeros(sizes);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        row_major(net.weights[l].rows(), net.weights[l].cols());
    in.read(reinterpret_cast<char*>(row_major.data()),
            static_cast<std::streamsize>(sizeof(double) * row_major.size()));
    in.read(reinterpret_cast<char*>(net.biases[l].data()),
            static_cast<std::streamsize>(sizeof(double) * net.biases[l].size()));
    if (!in) throw IoError("checkpoint: truncated parameter blob");
    net.weights[l] = row_major;
  }
  return net;
}

void save_mlp_file(const std::filesystem::path& path, const Mlp& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  save_mlp(out, net);
}

Mlp load_mlp_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return load_mlp(in);
}

}  // namespace ddcur
