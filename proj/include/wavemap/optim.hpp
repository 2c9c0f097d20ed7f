#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wavemap/network.hpp"

namespace wavemap {

enum class BatchMode { FullBatch, Minibatch, PerSample };

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<LayerParams> m;  // first moments, shapes mirror the parameters
  std::vector<LayerParams> v;  // second moments
  std::int64_t t = 0;
};

AdamState make_adam_state(const NetworkParams& params);

/// Standard bias-corrected Adam update, in place.
void adam_step(NetworkParams& params, AdamState& state, const Gradients& grads, double lr,
               const AdamParams& hp = {});

/// One stochastic step on sample `i`: W <- W - lr * grad of the single-row
/// squared loss.
void sgd_step(NetworkParams& params, const RowMatrix& X, const RowMatrix& Y, std::int64_t i,
              double lr);

struct LbfgsOptions {
  int max_iters = 100;
  int history = 10;
  double c1 = 1e-4;              // sufficient decrease
  double c2 = 0.9;               // strong Wolfe curvature
  double grad_tol = 1e-8;        // max-norm stop
  double loss_rel_tol = 1e-12;   // relative decrease stop
  int max_line_search = 30;
};

struct LbfgsOutcome {
  int iterations = 0;
  double final_loss = 0.0;
  double grad_max_norm = 0.0;
  bool line_search_failed = false;  // stopped early, best-so-far returned
};

/// Limited-memory BFGS refinement with two-loop recursion and a strong-Wolfe
/// bracketing line search.  The loss never increases across accepted steps.
LbfgsOutcome lbfgs_refine(NetworkParams& params, const RowMatrix& X, const RowMatrix& Y,
                          const LbfgsOptions& options = {});

struct TrainConfig {
  int epochs = 20000;
  double lr = 1e-3;
  double lr_decay = 0.5;     // multiplicative step decay
  int lr_decay_every = 5000; // 0 disables decay
  BatchMode batch = BatchMode::FullBatch;
  int batch_size = 0;        // Minibatch only
  int lbfgs_iters = 0;       // 0 disables the refinement phase
  int lbfgs_history = 10;
  std::uint64_t seed = 1;    // minibatch shuffling
  int checkpoint_every = 0;  // epochs; 0 disables
  std::string checkpoint_prefix;
  AdamParams adam;
};

struct TrainError : std::runtime_error {
  TrainError(const std::string& what, int epoch) : std::runtime_error(what), epoch(epoch) {}
  int epoch;
};

struct TrainResult {
  NetworkParams params;
  std::vector<double> loss_history;  // one full-batch loss per epoch
  LbfgsOutcome lbfgs;
  bool ran_lbfgs = false;
};

/// Epoch-driven training: with FullBatch one epoch is one Adam step on the
/// full-batch gradient.  Deterministic for a fixed (config, dataset, seed).
/// Non-finite loss aborts with TrainError after writing the last finite
/// checkpoint (when checkpointing is enabled).
TrainResult train(const TrainConfig& config, const RowMatrix& X, const RowMatrix& Y,
                  NetworkParams initial);

/// Convenience: (1/N) sum of squared residual entries.
double dataset_loss(const NetworkParams& params, const RowMatrix& X, const RowMatrix& Y);

/// Loss-curve CSV: header "epoch,loss", one row per epoch.
void write_loss_csv(const std::vector<double>& losses, const std::string& path);

}  // namespace wavemap
