#include "wavemap/optim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace wavemap {

AdamState make_adam_state(const NetworkParams& params) {
  AdamState state;
  state.m.resize(params.layers.size());
  state.v.resize(params.layers.size());
  for (std::size_t j = 0; j < params.layers.size(); ++j) {
    state.m[j].W = Eigen::MatrixXd::Zero(params.layers[j].W.rows(), params.layers[j].W.cols());
    state.m[j].b = Eigen::RowVectorXd::Zero(params.layers[j].b.size());
    state.v[j].W = state.m[j].W;
    state.v[j].b = state.m[j].b;
  }
  return state;
}

void adam_step(NetworkParams& params, AdamState& state, const Gradients& grads, double lr,
               const AdamParams& hp) {
  state.t += 1;
  const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.t));
  for (std::size_t j = 0; j < params.layers.size(); ++j) {
    auto& m = state.m[j];
    auto& v = state.v[j];
    const auto& g = grads.layers[j];
    m.W = hp.beta1 * m.W + (1.0 - hp.beta1) * g.W;
    m.b = hp.beta1 * m.b + (1.0 - hp.beta1) * g.b;
    v.W = (hp.beta2 * v.W.array() + (1.0 - hp.beta2) * g.W.array().square()).matrix();
    v.b = (hp.beta2 * v.b.array() + (1.0 - hp.beta2) * g.b.array().square()).matrix();
    params.layers[j].W.array() -=
        lr * (m.W.array() / bc1) / ((v.W.array() / bc2).sqrt() + hp.eps);
    params.layers[j].b.array() -=
        lr * (m.b.array() / bc1) / ((v.b.array() / bc2).sqrt() + hp.eps);
  }
}

void sgd_step(NetworkParams& params, const RowMatrix& X, const RowMatrix& Y, std::int64_t i,
              double lr) {
  if (i < 0 || i >= X.rows()) throw std::invalid_argument("sgd: sample index out of range");
  const RowMatrix xi = X.row(i);
  const RowMatrix yi = Y.row(i);
  const Gradients grads = backward(params, xi, yi);
  for (std::size_t j = 0; j < params.layers.size(); ++j) {
    params.layers[j].W -= lr * grads.layers[j].W;
    params.layers[j].b -= lr * grads.layers[j].b;
  }
}

namespace {

// Flat-vector view of the parameters for the L-BFGS core.
Eigen::VectorXd pack(const NetworkParams& params) {
  Eigen::VectorXd x(params.parameter_count());
  std::int64_t at = 0;
  for (const auto& l : params.layers) {
    for (int r = 0; r < l.W.rows(); ++r)
      for (int c = 0; c < l.W.cols(); ++c) x[at++] = l.W(r, c);
    for (int c = 0; c < l.b.size(); ++c) x[at++] = l.b[c];
  }
  return x;
}

void unpack(const Eigen::VectorXd& x, NetworkParams& params) {
  std::int64_t at = 0;
  for (auto& l : params.layers) {
    for (int r = 0; r < l.W.rows(); ++r)
      for (int c = 0; c < l.W.cols(); ++c) l.W(r, c) = x[at++];
    for (int c = 0; c < l.b.size(); ++c) l.b[c] = x[at++];
  }
}

Eigen::VectorXd pack_grads(const Gradients& grads, std::int64_t n) {
  Eigen::VectorXd g(n);
  std::int64_t at = 0;
  for (const auto& l : grads.layers) {
    for (int r = 0; r < l.W.rows(); ++r)
      for (int c = 0; c < l.W.cols(); ++c) g[at++] = l.W(r, c);
    for (int c = 0; c < l.b.size(); ++c) g[at++] = l.b[c];
  }
  return g;
}

struct Objective {
  NetworkParams* params;
  const RowMatrix* X;
  const RowMatrix* Y;
  BatchEvaluator eval;

  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    unpack(x, *params);
    const Gradients& g = eval.backward(*params, *X, *Y);
    grad = pack_grads(g, x.size());
    return g.loss;
  }
  double value(const Eigen::VectorXd& x) {
    unpack(x, *params);
    return eval.loss(*params, *X, *Y);
  }
};

// Cubic interpolation of a step inside [a, b] from values/derivatives at the
// ends; falls back to bisection when the interpolant is degenerate.
double cubic_step(double a, double fa, double ga, double b, double fb, double gb) {
  const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  const double sq = d1 * d1 - ga * gb;
  if (sq < 0.0) return 0.5 * (a + b);
  const double d2 = std::sqrt(sq) * (b > a ? 1.0 : -1.0);
  const double denom = gb - ga + 2.0 * d2;
  if (denom == 0.0) return 0.5 * (a + b);
  double t = b - (b - a) * (gb + d2 - d1) / denom;
  const double lo = std::min(a, b), hi = std::max(a, b);
  if (!(t > lo && t < hi)) t = 0.5 * (a + b);
  return t;
}

struct LineSearchResult {
  double alpha = 0.0;
  double f = 0.0;
  bool ok = false;
};

// Strong-Wolfe line search (bracket + zoom).
LineSearchResult wolfe_search(Objective& obj, const Eigen::VectorXd& x0, double f0,
                              const Eigen::VectorXd& g0, const Eigen::VectorXd& dir,
                              const LbfgsOptions& opt) {
  const double dphi0 = g0.dot(dir);
  if (dphi0 >= 0.0) return {};  // not a descent direction

  Eigen::VectorXd g(x0.size());
  auto phi = [&](double a, double& dphi) {
    const double f = obj(x0 + a * dir, g);
    dphi = g.dot(dir);
    return f;
  };

  double a_prev = 0.0, f_prev = f0, d_prev = dphi0;
  double a = 1.0;
  double a_lo = 0.0, f_lo = f0, d_lo = dphi0;
  double a_hi = 0.0, f_hi = 0.0, d_hi = 0.0;
  bool bracketed = false;

  for (int it = 0; it < opt.max_line_search && !bracketed; ++it) {
    double d;
    const double f = phi(a, d);
    if (f > f0 + opt.c1 * a * dphi0 || (it > 0 && f >= f_prev)) {
      a_lo = a_prev; f_lo = f_prev; d_lo = d_prev;
      a_hi = a; f_hi = f; d_hi = d;
      bracketed = true;
      break;
    }
    if (std::abs(d) <= -opt.c2 * dphi0) return {a, f, true};
    if (d >= 0.0) {
      a_lo = a; f_lo = f; d_lo = d;
      a_hi = a_prev; f_hi = f_prev; d_hi = d_prev;
      bracketed = true;
      break;
    }
    a_prev = a; f_prev = f; d_prev = d;
    a *= 2.0;
  }
  if (!bracketed) return {};

  for (int it = 0; it < opt.max_line_search; ++it) {
    const double aj = cubic_step(a_lo, f_lo, d_lo, a_hi, f_hi, d_hi);
    double d;
    const double f = phi(aj, d);
    if (f > f0 + opt.c1 * aj * dphi0 || f >= f_lo) {
      a_hi = aj; f_hi = f; d_hi = d;
    } else {
      if (std::abs(d) <= -opt.c2 * dphi0) return {aj, f, true};
      if (d * (a_hi - a_lo) >= 0.0) {
        a_hi = a_lo; f_hi = f_lo; d_hi = d_lo;
      }
      a_lo = aj; f_lo = f; d_lo = d;
    }
    if (std::abs(a_hi - a_lo) < 1e-16) break;
  }
  // No strong-Wolfe point found; accept the best sufficient-decrease point.
  if (f_lo < f0 && a_lo > 0.0) return {a_lo, f_lo, true};
  return {};
}

}  // namespace

LbfgsOutcome lbfgs_refine(NetworkParams& params, const RowMatrix& X, const RowMatrix& Y,
                          const LbfgsOptions& options) {
  Objective obj{&params, &X, &Y, {}};
  const std::int64_t n = params.parameter_count();
  Eigen::VectorXd x = pack(params);
  Eigen::VectorXd g(n);
  double f = obj(x, g);

  LbfgsOutcome outcome;
  outcome.final_loss = f;
  outcome.grad_max_norm = g.lpNorm<Eigen::Infinity>();
  if (outcome.grad_max_norm < options.grad_tol) {
    unpack(x, params);
    return outcome;
  }

  std::vector<Eigen::VectorXd> s_hist, y_hist;
  std::vector<double> rho_hist;
  Eigen::VectorXd q(n), dir(n);

  for (int iter = 0; iter < options.max_iters; ++iter) {
    // Two-loop recursion.
    q = g;
    const int m = static_cast<int>(s_hist.size());
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (m > 0) {
      const double gamma = s_hist[m - 1].dot(y_hist[m - 1]) / y_hist[m - 1].squaredNorm();
      q *= gamma;
    }
    for (int i = 0; i < m; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    dir = -q;

    const LineSearchResult ls = wolfe_search(obj, x, f, g, dir, options);
    if (!ls.ok) {
      outcome.line_search_failed = true;
      break;
    }
    Eigen::VectorXd x_new = x + ls.alpha * dir;
    Eigen::VectorXd g_new(n);
    const double f_new = obj(x_new, g_new);

    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-14 * yv.squaredNorm()) {  // keep the inverse Hessian positive
      if (static_cast<int>(s_hist.size()) == options.history) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
    }

    const double prev_f = f;
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;
    outcome.iterations = iter + 1;
    outcome.grad_max_norm = g.lpNorm<Eigen::Infinity>();
    if (outcome.grad_max_norm < options.grad_tol) break;
    if (prev_f - f < options.loss_rel_tol * std::abs(prev_f)) break;
  }
  unpack(x, params);
  outcome.final_loss = f;
  return outcome;
}

double dataset_loss(const NetworkParams& params, const RowMatrix& X, const RowMatrix& Y) {
  return mse_loss(params, X, Y);
}

TrainResult train(const TrainConfig& config, const RowMatrix& X, const RowMatrix& Y,
                  NetworkParams initial) {
  if (config.epochs < 0) throw std::invalid_argument("train: negative epoch count");
  initial.validate_shapes();
  if (X.cols() != initial.config.input_dim || Y.cols() != initial.config.output_dim ||
      X.rows() != Y.rows())
    throw std::invalid_argument("train: dataset/network dimension mismatch");

  TrainResult result;
  result.params = std::move(initial);
  result.loss_history.reserve(config.epochs);

  AdamState adam = make_adam_state(result.params);
  BatchEvaluator eval;
  std::mt19937_64 shuffle_rng(config.seed);
  std::vector<std::int64_t> order(X.rows());
  for (std::int64_t i = 0; i < X.rows(); ++i) order[i] = i;

  NetworkParams last_finite = result.params;
  double lr = config.lr;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.lr_decay_every > 0 && epoch > 0 && epoch % config.lr_decay_every == 0)
      lr *= config.lr_decay;

    double epoch_loss;
    if (config.batch == BatchMode::FullBatch) {
      const Gradients& grads = eval.backward(result.params, X, Y);
      epoch_loss = grads.loss;
      adam_step(result.params, adam, grads, lr, config.adam);
    } else {
      const std::int64_t bs = config.batch == BatchMode::PerSample
                                  ? 1
                                  : std::max(1, config.batch_size);
      std::shuffle(order.begin(), order.end(), shuffle_rng);
      for (std::int64_t start = 0; start < X.rows(); start += bs) {
        const std::int64_t count = std::min<std::int64_t>(bs, X.rows() - start);
        RowMatrix xb(count, X.cols()), yb(count, Y.cols());
        for (std::int64_t r = 0; r < count; ++r) {
          xb.row(r) = X.row(order[start + r]);
          yb.row(r) = Y.row(order[start + r]);
        }
        const Gradients& grads = eval.backward(result.params, xb, yb);
        adam_step(result.params, adam, grads, lr, config.adam);
      }
      epoch_loss = eval.loss(result.params, X, Y);
    }

    result.loss_history.push_back(epoch_loss);
    if (!std::isfinite(epoch_loss)) {
      if (config.checkpoint_every > 0 && !config.checkpoint_prefix.empty())
        save_model(last_finite, config.seed, {{"aborted_at_epoch", epoch}},
                   config.checkpoint_prefix + "-last-finite.wpkm");
      throw TrainError("train: loss turned non-finite", epoch);
    }
    last_finite = result.params;

    if (config.checkpoint_every > 0 && !config.checkpoint_prefix.empty() &&
        (epoch + 1) % config.checkpoint_every == 0)
      save_model(result.params, config.seed, {{"epoch", epoch + 1}},
                 config.checkpoint_prefix + "-epoch" + std::to_string(epoch + 1) + ".wpkm");
  }

  if (config.lbfgs_iters > 0) {
    LbfgsOptions opt;
    opt.max_iters = config.lbfgs_iters;
    opt.history = config.lbfgs_history;
    result.lbfgs = lbfgs_refine(result.params, X, Y, opt);
    result.ran_lbfgs = true;
    result.loss_history.push_back(result.lbfgs.final_loss);
  }
  return result;
}

void write_loss_csv(const std::vector<double>& losses, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "epoch,loss\n";
  out.precision(17);
  for (std::size_t i = 0; i < losses.size(); ++i) out << i + 1 << ',' << losses[i] << '\n';
}

}  // namespace wavemap
