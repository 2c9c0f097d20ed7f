#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "wavemap/dataset.hpp"

namespace wavemap {

enum class Activation { Relu, Tanh, Sigmoid, Elu };
enum class Architecture { Fcnn, Resnet };

double activation_apply(Activation tag, double x, double elu_alpha = 1.0);
double activation_derivative(Activation tag, double x, double elu_alpha = 1.0);

/// `depth` counts node layers, so an FCNN of depth D has D-1 weight matrices
/// with activations after the first D-2 and a bare affine readout (depth 2 is
/// a single affine map).  A ResNet block of depth D_i contributes D_i-1
/// activated matrices inside the skip; entry and exit maps are bare affine.
/// This is the counting under which the depth-5 FCNN and the two-block
/// depth-2 ResNet have identical parameter counts.
struct NetworkConfig {
  Architecture arch = Architecture::Fcnn;
  int depth = 5;
  int width = 100;
  int blocks = 2;
  int block_depth = 2;
  Activation activation = Activation::Tanh;
  double elu_alpha = 1.0;
  int input_dim = 0;   // m1
  int output_dim = 0;  // m2

  void validate() const;
  /// (rows, cols) of every weight matrix in layer order.
  std::vector<std::pair<int, int>> layer_shapes() const;
};

struct LayerParams {
  // Row-major so the forward kernel can stream whole weight rows.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> W;  // fan_in x fan_out
  Eigen::RowVectorXd b;
};

struct NetworkParams {
  NetworkConfig config;
  std::vector<LayerParams> layers;

  std::int64_t parameter_count() const;
  void validate_shapes() const;
};

/// Weights ~ N(0, 2/fan_in) via a seeded Mersenne Twister and Box-Muller
/// (portable across standard libraries); biases zero.
NetworkParams he_init(const NetworkConfig& config, std::uint64_t seed);

struct Gradients {
  std::vector<LayerParams> layers;
  double loss = 0.0;
};

/// Reusable buffers for repeated forward/backward passes of one network
/// shape; all heavy allocations happen once.
class BatchEvaluator {
 public:
  const RowMatrix& forward(const NetworkParams& params, const RowMatrix& X);
  double loss(const NetworkParams& params, const RowMatrix& X, const RowMatrix& Y);
  /// Mean-squared loss over the batch, (1/N) sum of squared entries of the
  /// residual; exact reverse-mode gradients, accumulated in layer order.
  const Gradients& backward(const NetworkParams& params, const RowMatrix& X, const RowMatrix& Y);

 private:
  void ensure_sizes(const NetworkParams& params, const RowMatrix& X);
  std::vector<RowMatrix> acts_;    // stage outputs (activations applied)
  std::vector<RowMatrix> block_in_;
  RowMatrix out_;
  RowMatrix delta_, delta_tmp_;
  Gradients grads_;
};

RowMatrix forward(const NetworkParams& params, const RowMatrix& X);
double mse_loss(const NetworkParams& params, const RowMatrix& X, const RowMatrix& Y);
Gradients backward(const NetworkParams& params, const RowMatrix& X, const RowMatrix& Y);

/// "WPKM" container.  `training_info` is free-form provenance.
void save_model(const NetworkParams& params, std::uint64_t seed,
                const nlohmann::json& training_info, const std::string& path);
struct LoadedModel {
  NetworkParams params;
  std::uint64_t seed = 0;
  nlohmann::json training_info;
};
LoadedModel load_model(const std::string& path);

std::string to_string(Activation a);
std::string to_string(Architecture a);
Activation activation_from_string(const std::string& s);
Architecture architecture_from_string(const std::string& s);

}  // namespace wavemap
