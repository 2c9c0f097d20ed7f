#include <doctest.h>

#include <stdexcept>

#include <cstdio>
#include <filesystem>
#include <random>

#include "wavemap/network.hpp"

using namespace wavemap;

namespace {

RowMatrix random_matrix(std::int64_t rows, std::int64_t cols, std::uint64_t seed,
                        double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-scale, scale);
  RowMatrix m(rows, cols);
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c) m(r, c) = uni(rng);
  return m;
}

// Central finite differences of the loss over every parameter; the oracle
// path uses forward evaluations only.
double max_gradient_discrepancy(NetworkParams params, const RowMatrix& X, const RowMatrix& Y) {
  const Gradients grads = backward(params, X, Y);
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto check_entry = [&](double& w, double analytic) {
      const double saved = w;
      w = saved + h;
      const double fp = mse_loss(params, X, Y);
      w = saved - h;
      const double fm = mse_loss(params, X, Y);
      w = saved;
      const double fd = (fp - fm) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - analytic) / std::max(1.0, std::abs(analytic)));
    };
    for (int r = 0; r < params.layers[l].W.rows(); ++r)
      for (int c = 0; c < params.layers[l].W.cols(); ++c)
        check_entry(params.layers[l].W(r, c), grads.layers[l].W(r, c));
    for (int c = 0; c < params.layers[l].b.size(); ++c)
      check_entry(params.layers[l].b[c], grads.layers[l].b[c]);
  }
  return worst;
}

// Pre-activations too close to the relu kink make finite differences lie;
// resample the batch until the margin is safe.
bool near_relu_kink(const NetworkParams& params, const RowMatrix& X) {
  RowMatrix a = X;
  for (std::size_t l = 0; l + 1 < params.layers.size(); ++l) {
    a = a * params.layers[l].W;
    a.rowwise() += params.layers[l].b;
    if ((a.cwiseAbs().array() < 1e-4).any()) return true;
    a = a.cwiseMax(0.0);
  }
  return false;
}

}  // namespace

TEST_CASE("activation closed forms and derivatives") {
  CHECK(activation_apply(Activation::Relu, -3.0) == 0.0);
  CHECK(activation_apply(Activation::Relu, 2.0) == 2.0);
  CHECK(activation_derivative(Activation::Relu, 0.0) == 0.0);

  CHECK(activation_apply(Activation::Sigmoid, 0.0) == doctest::Approx(0.5));
  CHECK(activation_derivative(Activation::Sigmoid, 0.0) == doctest::Approx(0.25));

  CHECK(activation_apply(Activation::Tanh, 0.7) == doctest::Approx(std::tanh(0.7)));
  CHECK(activation_derivative(Activation::Tanh, 0.7) ==
        doctest::Approx(1.0 - std::tanh(0.7) * std::tanh(0.7)));

  // elu is continuous at zero with matching one-sided derivatives
  CHECK(activation_apply(Activation::Elu, 0.0) == 0.0);
  CHECK(activation_apply(Activation::Elu, -1e-12) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(activation_derivative(Activation::Elu, 0.0) == doctest::Approx(1.0));
  CHECK(activation_derivative(Activation::Elu, 1e-9) == 1.0);
  CHECK(activation_apply(Activation::Elu, -2.0, 1.5) ==
        doctest::Approx(1.5 * (std::exp(-2.0) - 1.0)));
}

TEST_CASE("he initialization is deterministic with zero biases and the right variance") {
  NetworkConfig cfg;
  cfg.depth = 3;
  cfg.width = 1000;
  cfg.input_dim = 100;
  cfg.output_dim = 7;

  const NetworkParams a = he_init(cfg, 99);
  const NetworkParams b = he_init(cfg, 99);
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    CHECK((a.layers[l].W - b.layers[l].W).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.layers[l].b.cwiseAbs().maxCoeff() == 0.0);
  }
  const NetworkParams c = he_init(cfg, 100);
  CHECK((a.layers[0].W - c.layers[0].W).cwiseAbs().maxCoeff() > 0.0);

  // fan_in = 100 with 1e5 entries: sample variance within 5% of 2/100
  const auto& W = a.layers[0].W;
  const double mean = W.mean();
  const double var = (W.array() - mean).square().sum() / (W.size() - 1);
  CHECK(var == doctest::Approx(0.02).epsilon(0.05));
}

TEST_CASE("fcnn forward degenerate cases") {
  NetworkConfig cfg;
  cfg.depth = 3;
  cfg.width = 4;
  cfg.input_dim = 3;
  cfg.output_dim = 2;
  NetworkParams params = he_init(cfg, 1);

  SUBCASE("zero weights with an output bias give a constant map") {
    for (auto& l : params.layers) l.W.setZero();
    params.layers.back().b << 0.5, -0.25;
    const RowMatrix X = random_matrix(5, 3, 2);
    const RowMatrix out = forward(params, X);
    for (int r = 0; r < 5; ++r) {
      CHECK(out(r, 0) == 0.5);
      CHECK(out(r, 1) == -0.25);
    }
  }
  SUBCASE("depth 2 is a single affine map") {
    NetworkConfig lin = cfg;
    lin.depth = 2;
    NetworkParams p = he_init(lin, 3);
    REQUIRE(p.layers.size() == 1);
    const RowMatrix X = random_matrix(4, 3, 4);
    const RowMatrix out = forward(p, X);
    const RowMatrix want = (X * p.layers[0].W).rowwise() + p.layers[0].b;
    CHECK((out - want).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("resnet with zero blocks reduces to the entry/exit affine pair") {
  NetworkConfig cfg;
  cfg.arch = Architecture::Resnet;
  cfg.blocks = 2;
  cfg.block_depth = 2;
  cfg.width = 5;
  cfg.input_dim = 3;
  cfg.output_dim = 2;
  NetworkParams params = he_init(cfg, 7);
  // zero the block weights: each block becomes the identity through the skip
  for (std::size_t l = 1; l + 1 < params.layers.size(); ++l) params.layers[l].W.setZero();
  const RowMatrix X = random_matrix(6, 3, 8);
  const RowMatrix out = forward(params, X);
  // phi(0) = 0 for tanh, so H(y) identically vanishes
  const RowMatrix y = (X * params.layers[0].W).rowwise() + params.layers[0].b;
  const RowMatrix want = (y * params.layers.back().W).rowwise() + params.layers.back().b;
  CHECK((out - want).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("the comparison fcnn and resnet have equal parameter counts") {
  NetworkConfig fcnn;
  fcnn.depth = 5;
  fcnn.width = 100;
  fcnn.input_dim = 402;
  fcnn.output_dim = 201;
  NetworkConfig resnet = fcnn;
  resnet.arch = Architecture::Resnet;
  resnet.blocks = 2;
  resnet.block_depth = 2;
  CHECK(he_init(fcnn, 1).parameter_count() == he_init(resnet, 1).parameter_count());
  CHECK(he_init(fcnn, 1).parameter_count() == 80801);
}

TEST_CASE("zero residual means zero gradients") {
  NetworkConfig cfg;
  cfg.depth = 3;
  cfg.width = 6;
  cfg.input_dim = 4;
  cfg.output_dim = 3;
  const NetworkParams params = he_init(cfg, 11);
  const RowMatrix X = random_matrix(5, 4, 12);
  const RowMatrix Y = forward(params, X);  // targets equal predictions
  const Gradients grads = backward(params, X, Y);
  CHECK(grads.loss == 0.0);
  for (const auto& l : grads.layers) {
    CHECK(l.W.cwiseAbs().maxCoeff() == 0.0);
    CHECK(l.b.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("gradients match central finite differences across architectures") {
  // every architecture x activation combination on small random instances
  int combo = 0;
  for (const auto arch : {Architecture::Fcnn, Architecture::Resnet}) {
    for (const auto act :
         {Activation::Relu, Activation::Tanh, Activation::Sigmoid, Activation::Elu}) {
      NetworkConfig cfg;
      cfg.arch = arch;
      cfg.activation = act;
      cfg.width = 7;
      cfg.input_dim = 5;
      cfg.output_dim = 4;
      if (arch == Architecture::Fcnn) cfg.depth = 4;
      else {
        cfg.blocks = 2;
        cfg.block_depth = 2;
      }
      std::uint64_t seed = 100 + combo;
      NetworkParams params = he_init(cfg, seed);
      RowMatrix X = random_matrix(6, 5, seed + 1);
      const RowMatrix Y = random_matrix(6, 4, seed + 2);
      if (act == Activation::Relu) {
        while (near_relu_kink(params, X)) X = random_matrix(6, 5, ++seed + 1000);
      }
      const double worst = max_gradient_discrepancy(params, X, Y);
      INFO("arch=", static_cast<int>(arch), " act=", static_cast<int>(act));
      CHECK(worst < 1e-6);
      ++combo;
    }
  }
}

TEST_CASE("gradient is linear in a target shift") {
  NetworkConfig cfg;
  cfg.depth = 3;
  cfg.width = 5;
  cfg.input_dim = 4;
  cfg.output_dim = 3;
  const NetworkParams params = he_init(cfg, 21);
  const RowMatrix X = random_matrix(5, 4, 22);
  const RowMatrix Y = random_matrix(5, 3, 23);
  const RowMatrix D = random_matrix(5, 3, 24, 0.1);

  const Gradients g0 = backward(params, X, Y);
  const Gradients g1 = backward(params, X, Y - D);
  const Gradients g2 = backward(params, X, Y - 2.0 * D);
  // g(Y - 2D) - g(Y) = 2 [g(Y - D) - g(Y)] by linearity of the MSE gradient
  for (std::size_t l = 0; l < g0.layers.size(); ++l) {
    const Eigen::MatrixXd lhs = g2.layers[l].W - g0.layers[l].W;
    const Eigen::MatrixXd rhs = 2.0 * (g1.layers[l].W - g0.layers[l].W);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("forward on a batch equals row-wise forward") {
  NetworkConfig cfg;
  cfg.depth = 4;
  cfg.width = 9;
  cfg.input_dim = 6;
  cfg.output_dim = 5;
  const NetworkParams params = he_init(cfg, 31);
  const RowMatrix X = random_matrix(7, 6, 32);
  const RowMatrix batch = forward(params, X);
  for (int r = 0; r < 7; ++r) {
    const RowMatrix row = forward(params, RowMatrix(X.row(r)));
    for (int c = 0; c < 5; ++c) CHECK(row(0, c) == batch(r, c));
  }
}

TEST_CASE("width mismatches are rejected") {
  NetworkConfig cfg;
  cfg.depth = 3;
  cfg.width = 4;
  cfg.input_dim = 3;
  cfg.output_dim = 2;
  const NetworkParams params = he_init(cfg, 41);
  CHECK_THROWS_AS(forward(params, random_matrix(2, 5, 42)), std::invalid_argument);
  CHECK_THROWS_AS(backward(params, random_matrix(2, 3, 43), random_matrix(2, 4, 44)),
                  std::invalid_argument);
}

TEST_CASE("model container round trip") {
  NetworkConfig cfg;
  cfg.arch = Architecture::Resnet;
  cfg.blocks = 2;
  cfg.block_depth = 3;
  cfg.width = 6;
  cfg.activation = Activation::Elu;
  cfg.input_dim = 4;
  cfg.output_dim = 5;
  const NetworkParams params = he_init(cfg, 51);
  const std::string path =
      (std::filesystem::temp_directory_path() / "wavemap-model.wpkm").string();
  save_model(params, 51, {{"note", "unit-test"}}, path);
  const LoadedModel loaded = load_model(path);
  CHECK(loaded.seed == 51);
  CHECK(loaded.params.config.arch == Architecture::Resnet);
  CHECK(loaded.params.config.activation == Activation::Elu);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    CHECK((loaded.params.layers[l].W - params.layers[l].W).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.params.layers[l].b - params.layers[l].b).cwiseAbs().maxCoeff() == 0.0);
  }
  // outputs agree exactly after the round trip
  const RowMatrix X = random_matrix(3, 4, 52);
  CHECK((forward(params, X) - forward(loaded.params, X)).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}
