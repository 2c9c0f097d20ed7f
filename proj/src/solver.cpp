#include "wavemap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavemap {

namespace {

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

bool all_finite(const ComplexField& u) {
  for (const auto& v : u)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

// Maps each snapshot time to its whole-step index, validating alignment.
std::vector<std::int64_t> snapshot_steps(const TimeGrid& time,
                                         const std::vector<double>& snapshot_times) {
  const double dt = time.dt();
  std::vector<std::int64_t> steps;
  steps.reserve(snapshot_times.size());
  double prev = time.t0 - 1.0;
  for (double ts : snapshot_times) {
    if (ts < prev) throw std::invalid_argument("solver: snapshot times must be ascending");
    prev = ts;
    if (ts < time.t0 - 1e-12 || ts > time.T + 1e-9 * std::max(1.0, std::abs(time.T)))
      throw std::invalid_argument("solver: snapshot time outside [t0, T]");
    const double raw = (ts - time.t0) / dt;
    const auto n = static_cast<std::int64_t>(std::llround(raw));
    if (std::abs(raw - static_cast<double>(n)) > 1e-6)
      throw std::invalid_argument("solver: snapshot time does not align with a whole step");
    steps.push_back(n);
  }
  return steps;
}

}  // namespace

double Potential::modulation(double t) const {
  if (kind == Kind::SpatialOnly) return 1.0;
  return e0 * std::exp(-gamma * (t - t0) * (t - t0)) * std::cos(omega * t);
}

double Potential::spatial(std::span<const double> x) const {
  const double x0 = x[0];
  if (x0 < 0.0 || x0 > 1.0) return 0.0;
  return u_amp * x0 * (1.0 - x0);
}

std::vector<double> Potential::spatial_grid(const GridSpec& grid) const {
  std::vector<double> out(grid.total_points());
  for (std::int64_t i = 0; i < grid.total_points(); ++i) {
    const std::vector<double> x = point_at(grid, i);
    out[i] = spatial(x);
  }
  return out;
}

void NlsModel::validate() const {
  if (mu < 1) throw std::invalid_argument("model: mu must be >= 1");
  if (!std::isfinite(beta)) throw std::invalid_argument("model: beta must be finite");
  if (!(kinetic_coeff > 0)) throw std::invalid_argument("model: kinetic coefficient must be positive");
}

void SolverRun::validate() const {
  grid.validate();
  time.validate();
  model.validate();
  if (static_cast<std::int64_t>(initial.first.size()) != grid.total_points() ||
      static_cast<std::int64_t>(initial.second.size()) != grid.total_points())
    throw std::invalid_argument("solver: initial field length mismatch");
  snapshot_steps(time, snapshot_times);
}

ComplexField to_complex(const FieldPair& f) {
  ComplexField u(f.first.size());
  for (std::size_t i = 0; i < f.first.size(); ++i)
    u[i] = {f.first[i], f.second.empty() ? 0.0 : f.second[i]};
  return u;
}

FieldPair to_pair(const ComplexField& u) {
  FieldPair f;
  f.first.resize(u.size());
  f.second.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    f.first[i] = u[i].real();
    f.second[i] = u[i].imag();
  }
  return f;
}

double l2_norm(const ComplexField& u, const GridSpec& grid) {
  double s = 0.0;
  for (const auto& v : u) s += std::norm(v);
  return std::sqrt(s * grid.cell_volume());
}

double l2_norm(std::span<const double> u, const GridSpec& grid) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return std::sqrt(s * grid.cell_volume());
}

void spectral_laplacian_halfstep(const Fft& fft, ComplexField& u, double tau, double coeff) {
  fft.forward(u);
  const auto& xi2 = fft.xi_squared();
  for (std::size_t m = 0; m < u.size(); ++m) {
    const double phase = -coeff * xi2[m] * tau;
    u[m] *= std::complex<double>(std::cos(phase), std::sin(phase));
  }
  fft.inverse(u);
}

void nonlinear_phase_step(ComplexField& u, const NlsModel& model, double t, double dt,
                          std::span<const double> potential_grid) {
  model.validate();
  double vbar_mod = 0.0;
  if (model.potential && !potential_grid.empty())
    vbar_mod = model.potential->modulation(t + 0.5 * dt);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double rho = std::norm(u[i]);
    double phase = -model.beta * ipow(rho, model.mu) * dt;
    if (vbar_mod != 0.0) phase += vbar_mod * potential_grid[i] * dt;
    u[i] *= std::complex<double>(std::cos(phase), std::sin(phase));
  }
}

void strang_step(const Fft& fft, ComplexField& u, const NlsModel& model, double t, double dt,
                 std::span<const double> potential_grid) {
  spectral_laplacian_halfstep(fft, u, 0.5 * dt, model.kinetic_coeff);
  nonlinear_phase_step(u, model, t, dt, potential_grid);
  spectral_laplacian_halfstep(fft, u, 0.5 * dt, model.kinetic_coeff);
}

std::vector<FieldPair> solve_nls(const SolverRun& run) {
  run.validate();
  const Fft fft(run.grid);
  const double dt = run.time.dt();
  const std::vector<std::int64_t> snaps = snapshot_steps(run.time, run.snapshot_times);

  std::vector<double> pot_grid;
  if (run.model.potential) pot_grid = run.model.potential->spatial_grid(run.grid);

  ComplexField u = to_complex(run.initial);
  std::vector<FieldPair> out;
  out.reserve(snaps.size());
  std::size_t next = 0;
  while (next < snaps.size() && snaps[next] == 0) {
    out.push_back(to_pair(u));
    ++next;
  }
  const std::int64_t last_step = snaps.empty() ? 0 : snaps.back();
  for (std::int64_t n = 0; n < last_step; ++n) {
    strang_step(fft, u, run.model, run.time.t0 + n * dt, dt, pot_grid);
    if (!all_finite(u)) throw SolverError("solver: field turned non-finite", n + 1);
    while (next < snaps.size() && snaps[next] == n + 1) {
      out.push_back(to_pair(u));
      ++next;
    }
  }
  return out;
}

GridSpec expanded_grid(const GridSpec& grid, int factor) {
  if (factor < 2) throw std::invalid_argument("expansion factor must be >= 2");
  GridSpec big = grid;
  for (int a = 0; a < big.dim; ++a) {
    big.lower[a] *= factor;
    big.upper[a] *= factor;
    big.points_per_axis[a] *= factor;
  }
  return big;
}

std::vector<FieldPair> reference_on_larger_domain(const SolverRun& run, int expansion_factor) {
  run.validate();
  const GridSpec big = expanded_grid(run.grid, expansion_factor);
  const std::vector<std::int64_t> embed = embedding_indices(run.grid, big);

  // Embed the compactly supported initial condition, zero outside.
  SolverRun big_run = run;
  big_run.grid = big;
  big_run.initial.first.assign(big.total_points(), 0.0);
  big_run.initial.second.assign(big.total_points(), 0.0);
  const std::int64_t n_small = run.grid.total_points();
  for (std::int64_t i = 0; i < n_small; ++i) {
    big_run.initial.first[embed[i]] = run.initial.first[i];
    big_run.initial.second[embed[i]] = run.initial.second[i];
  }

  std::vector<FieldPair> big_snaps = solve_nls(big_run);
  std::vector<FieldPair> out(big_snaps.size());
  for (std::size_t s = 0; s < big_snaps.size(); ++s) {
    out[s].first.resize(n_small);
    out[s].second.resize(n_small);
    for (std::int64_t i = 0; i < n_small; ++i) {
      out[s].first[i] = big_snaps[s].first[embed[i]];
      out[s].second[i] = big_snaps[s].second[embed[i]];
    }
  }
  return out;
}

double boundary_shell_mass_fraction(const ComplexField& u, const GridSpec& grid,
                                    double shell_frac) {
  double total = 0.0, shell = 0.0;
  const std::int64_t n = grid.total_points();
  for (std::int64_t i = 0; i < n; ++i) {
    const double m = std::norm(u[i]);
    total += m;
    const std::vector<double> x = point_at(grid, i);
    for (int a = 0; a < grid.dim; ++a) {
      const double w = (grid.upper[a] - grid.lower[a]) * shell_frac;
      if (x[a] < grid.lower[a] + w || x[a] > grid.upper[a] - w) {
        shell += m;
        break;
      }
    }
  }
  return total > 0.0 ? shell / total : 0.0;
}

namespace {

// Second-order central-difference Laplacian with homogeneous Dirichlet
// (ghost-zero) closure on the 1D point set.
template <typename T>
std::vector<T> dirichlet_laplacian(const std::vector<T>& f, double h) {
  const std::size_t n = f.size();
  std::vector<T> out(n);
  const double inv_h2 = 1.0 / (h * h);
  for (std::size_t j = 0; j < n; ++j) {
    const T left = j > 0 ? f[j - 1] : T(0);
    const T right = j + 1 < n ? f[j + 1] : T(0);
    out[j] = (left - 2.0 * f[j] + right) * inv_h2;
  }
  return out;
}

// Thomas solve of a complex tridiagonal system with constant off-diagonal.
ComplexField tridiag_solve(const ComplexField& diag, std::complex<double> off,
                           const ComplexField& rhs) {
  const std::size_t n = diag.size();
  ComplexField c(n), d(n);
  std::complex<double> denom = diag[0];
  if (std::abs(denom) == 0.0) throw SolverError("cnfd: singular tridiagonal system");
  c[0] = off / denom;
  d[0] = rhs[0] / denom;
  for (std::size_t j = 1; j < n; ++j) {
    denom = diag[j] - off * c[j - 1];
    if (std::abs(denom) == 0.0) throw SolverError("cnfd: singular tridiagonal system");
    c[j] = off / denom;
    d[j] = (rhs[j] - off * d[j - 1]) / denom;
  }
  ComplexField x(n);
  x[n - 1] = d[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) x[j] = d[j] - c[j] * x[j + 1];
  return x;
}

void check_cnfd_preconditions(const ComplexField& un, const GridSpec& grid,
                              const NlsModel& model) {
  grid.validate();
  model.validate();
  if (grid.dim != 1) throw std::invalid_argument("cnfd: only 1D grids are supported");
  if (model.beta != -1.0)
    throw std::invalid_argument("cnfd: the scheme hard-codes beta = -1");
  if (model.potential) throw std::invalid_argument("cnfd: no potential support");
  if (static_cast<std::int64_t>(un.size()) != grid.total_points())
    throw std::invalid_argument("cnfd: field length mismatch");
}

}  // namespace

ComplexField cnfd_step(const ComplexField& un, const GridSpec& grid, const NlsModel& model,
                       double dt, const CnfdOptions& options) {
  check_cnfd_preconditions(un, grid, model);
  const std::size_t n = un.size();
  const double h = grid.spacing(0);
  const double inv_h2 = 1.0 / (h * h);
  const std::complex<double> i_over_dt(0.0, 1.0 / dt);
  const std::complex<double> off(0.5 * inv_h2, 0.0);

  std::vector<double> rho_n(n);
  for (std::size_t j = 0; j < n; ++j) rho_n[j] = ipow(std::norm(un[j]), model.mu);
  const std::vector<std::complex<double>> lap_un =
      dirichlet_laplacian(std::vector<std::complex<double>>(un.begin(), un.end()), h);

  ComplexField uk = un;  // current iterate of u^{n+1}
  ComplexField diag(n), rhs(n);
  double diff = 0.0;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    for (std::size_t j = 0; j < n; ++j) {
      const double rho_k = ipow(std::norm(uk[j]), model.mu);
      if (options.quarter_literal) {
        const double a = 0.25 * (rho_k + rho_n[j]);
        diag[j] = i_over_dt - inv_h2 + a;
        rhs[j] = i_over_dt * un[j] - 0.5 * lap_un[j] - a * un[j];
      } else {
        diag[j] = i_over_dt - inv_h2 + 0.5 * rho_k;
        rhs[j] = i_over_dt * un[j] - 0.5 * lap_un[j] - 0.5 * rho_n[j] * un[j];
      }
    }
    ComplexField next = tridiag_solve(diag, off, rhs);
    diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(next[j] - uk[j]));
    uk = std::move(next);
    if (diff < options.tolerance) return uk;
  }
  throw SolverError("cnfd: fixed-point iteration did not converge", -1, diff);
}

std::pair<std::vector<double>, std::vector<double>> residual_cnfd(const ComplexField& un,
                                                                  const ComplexField& unp1,
                                                                  const GridSpec& grid,
                                                                  const NlsModel& model,
                                                                  double dt) {
  check_cnfd_preconditions(un, grid, model);
  if (un.size() != unp1.size()) throw std::invalid_argument("cnfd: field length mismatch");
  const std::size_t n = un.size();
  const double h = grid.spacing(0);

  std::vector<double> pn(n), qn(n), pm(n), qm(n), rn(n), rm(n);
  for (std::size_t j = 0; j < n; ++j) {
    pn[j] = un[j].real();
    qn[j] = un[j].imag();
    pm[j] = unp1[j].real();
    qm[j] = unp1[j].imag();
    rn[j] = ipow(pn[j] * pn[j] + qn[j] * qn[j], model.mu);
    rm[j] = ipow(pm[j] * pm[j] + qm[j] * qm[j], model.mu);
  }
  const std::vector<double> lap_qm = dirichlet_laplacian(qm, h);
  const std::vector<double> lap_qn = dirichlet_laplacian(qn, h);
  const std::vector<double> lap_pm = dirichlet_laplacian(pm, h);
  const std::vector<double> lap_pn = dirichlet_laplacian(pn, h);

  std::vector<double> i1(n), i2(n);
  for (std::size_t j = 0; j < n; ++j) {
    i1[j] = pm[j] + 0.5 * dt * lap_qm[j] +
            0.25 * dt * (rm[j] * qm[j] + rm[j] * qn[j] + rn[j] * qm[j]) - pn[j] +
            0.5 * dt * lap_qn[j] + 0.25 * dt * rn[j] * qn[j];
    i2[j] = qm[j] - 0.5 * dt * lap_pm[j] -
            0.25 * dt * (rm[j] * pm[j] + rm[j] * pn[j] + rn[j] * pm[j]) - qn[j] -
            0.5 * dt * lap_pn[j] - 0.25 * dt * rn[j] * pn[j];
  }
  return {std::move(i1), std::move(i2)};
}

std::vector<FieldPair> solve_cnfd(const SolverRun& run, const CnfdOptions& options) {
  run.grid.validate();
  run.time.validate();
  const double dt = run.time.dt();
  const std::vector<std::int64_t> snaps = snapshot_steps(run.time, run.snapshot_times);

  ComplexField u = to_complex(run.initial);
  check_cnfd_preconditions(u, run.grid, run.model);
  std::vector<FieldPair> out;
  out.reserve(snaps.size());
  std::size_t next = 0;
  while (next < snaps.size() && snaps[next] == 0) {
    out.push_back(to_pair(u));
    ++next;
  }
  const std::int64_t last_step = snaps.empty() ? 0 : snaps.back();
  for (std::int64_t n = 0; n < last_step; ++n) {
    u = cnfd_step(u, run.grid, run.model, dt, options);
    if (!all_finite(u)) throw SolverError("cnfd: field turned non-finite", n + 1);
    while (next < snaps.size() && snaps[next] == n + 1) {
      out.push_back(to_pair(u));
      ++next;
    }
  }
  return out;
}

}  // namespace wavemap
