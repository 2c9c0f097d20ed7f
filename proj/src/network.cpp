#include "wavemap/network.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "wavemap/io.hpp"

namespace wavemap {

double activation_apply(Activation tag, double x, double elu_alpha) {
  switch (tag) {
    case Activation::Relu: return x > 0.0 ? x : 0.0;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::Elu: return x > 0.0 ? x : elu_alpha * (std::exp(x) - 1.0);
  }
  return x;
}

double activation_derivative(Activation tag, double x, double elu_alpha) {
  switch (tag) {
    case Activation::Relu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
    case Activation::Elu: return x > 0.0 ? 1.0 : elu_alpha * std::exp(x);
  }
  return 1.0;
}

namespace {

// In-place activation of a pre-activation matrix.
void apply_activation(RowMatrix& z, Activation tag, double alpha) {
  switch (tag) {
    case Activation::Relu: z = z.cwiseMax(0.0); break;
    case Activation::Tanh: z = z.array().tanh().matrix(); break;
    case Activation::Sigmoid: z = ((-z.array()).exp() + 1.0).inverse().matrix(); break;
    case Activation::Elu:
      z = (z.array().max(0.0) + alpha * (z.array().min(0.0).exp() - 1.0)).matrix();
      break;
  }
}

// phi'(z) recovered from a = phi(z); valid for all four activations
// (relu'(0) = 0 and elu'(0) = alpha by the conventions above).
RowMatrix derivative_from_output(const RowMatrix& a, Activation tag, double alpha) {
  switch (tag) {
    case Activation::Relu: return (a.array() > 0.0).cast<double>().matrix();
    case Activation::Tanh: return (1.0 - a.array().square()).matrix();
    case Activation::Sigmoid: return (a.array() * (1.0 - a.array())).matrix();
    case Activation::Elu: {
      const auto pos = (a.array() > 0.0).cast<double>();
      return (pos + (1.0 - pos) * (a.array() + alpha)).matrix();
    }
  }
  return RowMatrix::Ones(a.rows(), a.cols());
}

// Affine stage C = A W + b with a fixed per-row accumulation order over the
// fan-in, so a row's result never depends on the batch it arrived in
// (forward on a batch is bitwise identical to row-wise forward).
void affine_forward(const RowMatrix& A, const LayerParams& L, RowMatrix& C) {
  const std::int64_t n = A.rows();
  const std::int64_t in = L.W.rows();
  const std::int64_t out = L.W.cols();
  C.resize(n, out);
  for (std::int64_t i = 0; i < n; ++i) {
    C.row(i) = L.b;
    const double* a = A.data() + i * in;
    std::int64_t k = 0;
    for (; k + 4 <= in; k += 4)
      C.row(i) += a[k] * L.W.row(k) + a[k + 1] * L.W.row(k + 1) + a[k + 2] * L.W.row(k + 2) +
                  a[k + 3] * L.W.row(k + 3);
    for (; k < in; ++k) C.row(i) += a[k] * L.W.row(k);
  }
}

struct NormalSampler {
  explicit NormalSampler(std::uint64_t seed) : rng(seed) {}
  double uniform01() {  // (0, 1]
    return 1.0 - (rng() >> 11) * 0x1.0p-53;
  }
  double next() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare = r * std::sin(theta);
    has_spare = true;
    return r * std::cos(theta);
  }
  std::mt19937_64 rng;
  bool has_spare = false;
  double spare = 0.0;
};

}  // namespace

void NetworkConfig::validate() const {
  if (input_dim < 1 || output_dim < 1)
    throw std::invalid_argument("network: input/output dims must be positive");
  if (width < 1) throw std::invalid_argument("network: width must be positive");
  if (arch == Architecture::Fcnn) {
    if (depth < 2) throw std::invalid_argument("network: FCNN depth must be >= 2");
  } else {
    if (blocks < 1) throw std::invalid_argument("network: ResNet needs >= 1 block");
    if (block_depth < 2) throw std::invalid_argument("network: block depth must be >= 2");
  }
}

std::vector<std::pair<int, int>> NetworkConfig::layer_shapes() const {
  validate();
  std::vector<std::pair<int, int>> shapes;
  if (arch == Architecture::Fcnn) {
    const int n_mats = depth - 1;
    int in = input_dim;
    for (int j = 0; j < n_mats; ++j) {
      const int out = j == n_mats - 1 ? output_dim : width;
      shapes.emplace_back(in, out);
      in = out;
    }
  } else {
    shapes.emplace_back(input_dim, width);  // entry
    for (int s = 0; s < blocks; ++s)
      for (int j = 0; j < block_depth - 1; ++j) shapes.emplace_back(width, width);
    shapes.emplace_back(width, output_dim);  // exit
  }
  return shapes;
}

std::int64_t NetworkParams::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& l : layers) n += l.W.size() + l.b.size();
  return n;
}

void NetworkParams::validate_shapes() const {
  const auto shapes = config.layer_shapes();
  if (shapes.size() != layers.size())
    throw std::invalid_argument("network: layer count does not match architecture");
  for (std::size_t j = 0; j < shapes.size(); ++j) {
    if (layers[j].W.rows() != shapes[j].first || layers[j].W.cols() != shapes[j].second ||
        layers[j].b.size() != shapes[j].second)
      throw std::invalid_argument("network: layer shape mismatch");
  }
}

NetworkParams he_init(const NetworkConfig& config, std::uint64_t seed) {
  NetworkParams params;
  params.config = config;
  NormalSampler normal(seed);
  for (const auto& [rows, cols] : config.layer_shapes()) {
    LayerParams layer;
    layer.W.resize(rows, cols);
    const double stddev = std::sqrt(2.0 / rows);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) layer.W(r, c) = stddev * normal.next();
    layer.b = Eigen::RowVectorXd::Zero(cols);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

void BatchEvaluator::ensure_sizes(const NetworkParams& params, const RowMatrix& X) {
  params.validate_shapes();
  if (X.cols() != params.config.input_dim)
    throw std::invalid_argument("network: input width mismatch");
  const std::size_t n_layers = params.layers.size();
  acts_.resize(n_layers);
  block_in_.resize(params.config.arch == Architecture::Resnet ? params.config.blocks : 0);
  if (grads_.layers.size() != n_layers) {
    grads_.layers.resize(n_layers);
    for (std::size_t j = 0; j < n_layers; ++j) {
      grads_.layers[j].W.resize(params.layers[j].W.rows(), params.layers[j].W.cols());
      grads_.layers[j].b.resize(params.layers[j].b.size());
    }
  }
}

const RowMatrix& BatchEvaluator::forward(const NetworkParams& params, const RowMatrix& X) {
  ensure_sizes(params, X);
  const auto& cfg = params.config;
  const auto& L = params.layers;

  if (cfg.arch == Architecture::Fcnn) {
    const std::size_t n_mats = L.size();
    const RowMatrix* prev = &X;
    for (std::size_t j = 0; j + 1 < n_mats; ++j) {
      affine_forward(*prev, L[j], acts_[j]);
      apply_activation(acts_[j], cfg.activation, cfg.elu_alpha);
      prev = &acts_[j];
    }
    affine_forward(*prev, L.back(), out_);
    return out_;
  }

  // ResNet: bare entry, skip-connected activated chains, bare exit.
  std::size_t li = 0;
  affine_forward(X, L[0], acts_[li]);
  RowMatrix* y = &acts_[li];
  ++li;
  for (int s = 0; s < cfg.blocks; ++s) {
    block_in_[s] = *y;
    const RowMatrix* h = &block_in_[s];
    for (int j = 0; j < cfg.block_depth - 1; ++j, ++li) {
      affine_forward(*h, L[li], acts_[li]);
      apply_activation(acts_[li], cfg.activation, cfg.elu_alpha);
      h = &acts_[li];
    }
    acts_[li - 1] += block_in_[s];  // skip connection, no activation after the add
    y = &acts_[li - 1];
  }
  affine_forward(*y, L.back(), out_);
  return out_;
}

double BatchEvaluator::loss(const NetworkParams& params, const RowMatrix& X, const RowMatrix& Y) {
  if (Y.cols() != params.config.output_dim || Y.rows() != X.rows())
    throw std::invalid_argument("network: target shape mismatch");
  const RowMatrix& pred = forward(params, X);
  return (pred - Y).squaredNorm() / static_cast<double>(X.rows());
}

const Gradients& BatchEvaluator::backward(const NetworkParams& params, const RowMatrix& X,
                                          const RowMatrix& Y) {
  if (Y.cols() != params.config.output_dim || Y.rows() != X.rows())
    throw std::invalid_argument("network: target shape mismatch");
  const auto& cfg = params.config;
  const auto& L = params.layers;
  forward(params, X);

  const double inv_n = 1.0 / static_cast<double>(X.rows());
  delta_ = 2.0 * inv_n * (out_ - Y);
  grads_.loss = (out_ - Y).squaredNorm() * inv_n;

  if (cfg.arch == Architecture::Fcnn) {
    const std::size_t n_mats = L.size();
    for (std::size_t j = n_mats; j-- > 0;) {
      const RowMatrix& input = j == 0 ? X : acts_[j - 1];
      grads_.layers[j].W.noalias() = input.transpose() * delta_;
      grads_.layers[j].b = delta_.colwise().sum();
      if (j > 0) {
        delta_tmp_.noalias() = delta_ * L[j].W.transpose();
        delta_ = delta_tmp_.cwiseProduct(
            derivative_from_output(acts_[j - 1], cfg.activation, cfg.elu_alpha));
      }
    }
    return grads_;
  }

  // ResNet reverse pass.  delta_ starts as dL/d(exit input).
  const std::size_t exit_idx = L.size() - 1;
  const std::size_t chain = cfg.block_depth - 1;
  const RowMatrix& exit_in = acts_[exit_idx - 1];  // output of the last block
  grads_.layers[exit_idx].W.noalias() = exit_in.transpose() * delta_;
  grads_.layers[exit_idx].b = delta_.colwise().sum();
  delta_tmp_.noalias() = delta_ * L[exit_idx].W.transpose();
  delta_ = delta_tmp_;

  for (int s = cfg.blocks - 1; s >= 0; --s) {
    // dY_out of this block is delta_; the skip contributes it to dY_in, and
    // the chain back-propagates it through D_i - 1 activated layers.
    RowMatrix d_chain = delta_;
    for (int j = static_cast<int>(chain) - 1; j >= 0; --j) {
      const std::size_t li = 1 + s * chain + j;
      RowMatrix act = acts_[li];
      if (j == static_cast<int>(chain) - 1) act -= block_in_[s];  // undo the skip add
      d_chain = d_chain.cwiseProduct(derivative_from_output(act, cfg.activation, cfg.elu_alpha));
      const RowMatrix& input = j == 0 ? block_in_[s] : acts_[li - 1];
      grads_.layers[li].W.noalias() = input.transpose() * d_chain;
      grads_.layers[li].b = d_chain.colwise().sum();
      delta_tmp_.noalias() = d_chain * L[li].W.transpose();
      d_chain = delta_tmp_;
    }
    delta_ += d_chain;
  }
  grads_.layers[0].W.noalias() = X.transpose() * delta_;
  grads_.layers[0].b = delta_.colwise().sum();
  return grads_;
}

RowMatrix forward(const NetworkParams& params, const RowMatrix& X) {
  BatchEvaluator eval;
  return eval.forward(params, X);
}

double mse_loss(const NetworkParams& params, const RowMatrix& X, const RowMatrix& Y) {
  BatchEvaluator eval;
  return eval.loss(params, X, Y);
}

Gradients backward(const NetworkParams& params, const RowMatrix& X, const RowMatrix& Y) {
  BatchEvaluator eval;
  return eval.backward(params, X, Y);
}

void save_model(const NetworkParams& params, std::uint64_t seed,
                const nlohmann::json& training_info, const std::string& path) {
  params.validate_shapes();
  const auto& c = params.config;
  nlohmann::json meta{{"arch", to_string(c.arch)},
                      {"depth", c.depth},
                      {"width", c.width},
                      {"blocks", c.blocks},
                      {"block_depth", c.block_depth},
                      {"activation", to_string(c.activation)},
                      {"elu_alpha", c.elu_alpha},
                      {"m1", c.input_dim},
                      {"m2", c.output_dim},
                      {"seed", seed},
                      {"param_count", params.parameter_count()},
                      {"training", training_info}};
  ContainerWriter writer("WPKM", meta);
  writer.write_u64(params.layers.size());
  std::vector<double> buf;
  for (const auto& layer : params.layers) {
    buf.resize(layer.W.size());
    // Row-major serialization regardless of in-memory layout.
    for (int r = 0; r < layer.W.rows(); ++r)
      for (int col = 0; col < layer.W.cols(); ++col) buf[r * layer.W.cols() + col] = layer.W(r, col);
    writer.write_matrix(buf, layer.W.rows(), layer.W.cols());
    writer.write_u64(layer.b.size());
    writer.write_f64_array(std::span<const double>(layer.b.data(), layer.b.size()));
  }
  writer.finish_to_file(path);
}

LoadedModel load_model(const std::string& path) {
  ContainerReader reader(path, "WPKM");
  const nlohmann::json& meta = reader.metadata();
  LoadedModel model;
  try {
    auto& c = model.params.config;
    c.arch = architecture_from_string(meta.at("arch").get<std::string>());
    c.depth = meta.at("depth").get<int>();
    c.width = meta.at("width").get<int>();
    c.blocks = meta.at("blocks").get<int>();
    c.block_depth = meta.at("block_depth").get<int>();
    c.activation = activation_from_string(meta.at("activation").get<std::string>());
    c.elu_alpha = meta.at("elu_alpha").get<double>();
    c.input_dim = meta.at("m1").get<int>();
    c.output_dim = meta.at("m2").get<int>();
    model.seed = meta.at("seed").get<std::uint64_t>();
    model.training_info = meta.value("training", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw IoError(io_errc::bad_metadata, std::string("model: bad metadata: ") + e.what());
  }
  const std::uint64_t n_layers = reader.read_u64();
  model.params.layers.resize(n_layers);
  for (std::uint64_t j = 0; j < n_layers; ++j) {
    std::uint64_t rows, cols;
    const std::vector<double> w = reader.read_matrix(rows, cols);
    auto& layer = model.params.layers[j];
    layer.W.resize(rows, cols);
    for (std::uint64_t r = 0; r < rows; ++r)
      for (std::uint64_t col = 0; col < cols; ++col) layer.W(r, col) = w[r * cols + col];
    const std::uint64_t blen = reader.read_u64();
    const std::vector<double> b = reader.read_f64_array(blen);
    layer.b = Eigen::Map<const Eigen::RowVectorXd>(b.data(), blen);
  }
  reader.expect_consumed();
  model.params.validate_shapes();
  return model;
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Elu: return "elu";
  }
  return "tanh";
}

std::string to_string(Architecture a) {
  return a == Architecture::Fcnn ? "fcnn" : "resnet";
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  if (s == "sigmoid") return Activation::Sigmoid;
  if (s == "elu") return Activation::Elu;
  throw std::invalid_argument("unknown activation: " + s);
}

Architecture architecture_from_string(const std::string& s) {
  if (s == "fcnn") return Architecture::Fcnn;
  if (s == "resnet") return Architecture::Resnet;
  throw std::invalid_argument("unknown architecture: " + s);
}

}  // namespace wavemap
