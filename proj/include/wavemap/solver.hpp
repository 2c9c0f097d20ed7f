#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wavemap/analytic.hpp"
#include "wavemap/fft.hpp"
#include "wavemap/grid.hpp"

namespace wavemap {

/// External scalar potential V(x,t) = E(t) U(x) with the bump profile
/// U(x) = u_amp * x0 (1 - x0) on x0 in [0,1], zero elsewhere.
/// SpatialOnly means E(t) == 1.
struct Potential {
  enum class Kind { SpatialOnly, Separable };
  Kind kind = Kind::SpatialOnly;
  double e0 = 1.0;
  double gamma = 1.0;
  double t0 = 0.0;
  double omega = 1.0;
  double u_amp = 1.0;

  double modulation(double t) const;
  double spatial(std::span<const double> x) const;
  std::vector<double> spatial_grid(const GridSpec& grid) const;
};

/// i u_t = -c Laplacian u + beta |u|^(2 mu) u + (potential term), with c the
/// kinetic coefficient (1 by default; 1/2 is the alternative convention the
/// cross-validation step rules out).
struct NlsModel {
  double beta = -1.0;
  int mu = 1;
  std::optional<Potential> potential;
  double kinetic_coeff = 1.0;

  void validate() const;
};

struct SolverRun {
  GridSpec grid;                       // periodic
  TimeGrid time;
  NlsModel model;
  FieldPair initial;                   // (p, q)
  std::vector<double> snapshot_times;  // each must align with a whole step

  void validate() const;
};

/// Raised when a field turns non-finite or an implicit solve fails.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what, std::int64_t step = -1, double residual = 0.0)
      : std::runtime_error(what), step_index(step), last_residual(residual) {}
  std::int64_t step_index;
  double last_residual;
};

ComplexField to_complex(const FieldPair& f);
FieldPair to_pair(const ComplexField& u);

/// Discrete L2 norm sqrt(sum |u_i|^2 * cell_volume).
double l2_norm(const ComplexField& u, const GridSpec& grid);
double l2_norm(std::span<const double> u, const GridSpec& grid);

/// Exact solution of i u_t + Laplacian u = 0 over `tau` via the Fourier
/// multiplier exp(-i |xi|^2 tau); `coeff` scales the Laplacian.
void spectral_laplacian_halfstep(const Fft& fft, ComplexField& u, double tau,
                                 double coeff = 1.0);

/// Pointwise phase rotation u <- u exp(i (-beta |u|^(2mu) + Vbar) dt); Vbar is
/// the midpoint-in-time sample of the potential over the step.
void nonlinear_phase_step(ComplexField& u, const NlsModel& model, double t, double dt,
                          std::span<const double> potential_grid = {});

/// One Strang step: half kinetic, full phase, half kinetic.
void strang_step(const Fft& fft, ComplexField& u, const NlsModel& model, double t, double dt,
                 std::span<const double> potential_grid = {});

std::vector<FieldPair> solve_nls(const SolverRun& run);

/// The box scaled by `factor` about the origin with proportionally more
/// points per axis; keeps the spacing, so the original grid embeds exactly.
GridSpec expanded_grid(const GridSpec& grid, int factor);

/// Solves on the box scaled by `expansion_factor` about the origin with
/// proportionally more points, then restricts snapshots to the original
/// grid's points.  The original grid must embed exactly.
std::vector<FieldPair> reference_on_larger_domain(const SolverRun& run, int expansion_factor);

/// Fraction of |u|^2 mass inside the boundary shell of relative width
/// `shell_frac` per side; wrap-around monitor for expanded-domain runs.
double boundary_shell_mass_fraction(const ComplexField& u, const GridSpec& grid,
                                    double shell_frac = 0.1);

struct CnfdOptions {
  double tolerance = 1e-12;
  int max_iters = 100;
  /// Literal printed scheme: the nonlinear term is
  ///   -1/4 [ |u^{n+1}|^{2mu} + |u^n|^{2mu} ] (u^{n+1} + u^n).
  /// The alternate averages the products instead:
  ///   -1/2 [ |u^{n+1}|^{2mu} u^{n+1} + |u^n|^{2mu} u^n ].
  bool quarter_literal = true;
};

/// One Crank-Nicolson finite-difference step on a 1D grid with homogeneous
/// Dirichlet closure, solved by lagged fixed-point iteration.  Requires
/// beta = -1 (the sign the scheme hard-codes).
ComplexField cnfd_step(const ComplexField& un, const GridSpec& grid, const NlsModel& model,
                       double dt, const CnfdOptions& options = {});

/// The two real residual fields I1(p,q), I2(p,q) of the scheme, evaluated
/// with the same discrete Laplacian as cnfd_step.
std::pair<std::vector<double>, std::vector<double>> residual_cnfd(const ComplexField& un,
                                                                  const ComplexField& unp1,
                                                                  const GridSpec& grid,
                                                                  const NlsModel& model,
                                                                  double dt);

/// Time-stepping driver around cnfd_step with the same snapshot contract as
/// solve_nls.
std::vector<FieldPair> solve_cnfd(const SolverRun& run, const CnfdOptions& options = {});

}  // namespace wavemap
