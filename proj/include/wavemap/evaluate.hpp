#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavemap/dataset.hpp"
#include "wavemap/network.hpp"

namespace wavemap {

/// ||pred - ref||_2 / ||ref||_2 over the given samples.  Throws when the
/// reference has zero norm.
double relative_error(std::span<const double> pred, std::span<const double> ref);

/// Component errors of one snapshot.  For the wave equation only `u_or_p`
/// is set; for Schroedinger fields `rho` is computed pointwise from the
/// predicted (p, q) before norming, never predicted directly.
struct ComponentErrors {
  double u_or_p = std::numeric_limits<double>::quiet_NaN();
  double q = std::numeric_limits<double>::quiet_NaN();
  double rho = std::numeric_limits<double>::quiet_NaN();
};

ComponentErrors wave_errors(std::span<const double> pred_u, std::span<const double> ref_u);
ComponentErrors schrodinger_errors(std::span<const double> pred_p, std::span<const double> pred_q,
                                   std::span<const double> ref_p, std::span<const double> ref_q);

/// One CSV row of the report schema:
/// experiment_id, equation, activation, sigma_set, k_set, lambda, seed,
/// test_condition, snapshot_time, err_u_or_p, err_q, err_rho, wall_seconds.
struct ErrorRow {
  std::string experiment_id;
  std::string equation;
  std::string activation;
  std::string sigma_set;
  std::string k_set;
  double lambda = 1.0;
  std::int64_t seed = 0;  // -1 marks the median-over-seeds row
  std::string test_condition;
  double snapshot_time = 0.0;
  ComponentErrors errors;
  double wall_seconds = 0.0;
};

void write_report_csv(const std::vector<ErrorRow>& rows, const std::string& path);

/// Runs the model on a masked test input and splits the prediction into
/// per-snapshot full-grid fields (zero outside the mask).
struct Prediction {
  std::vector<FieldPair> snapshots;  // wave: second empty
};
Prediction predict(const NetworkParams& model, const Dataset& shape, const FieldPair& initial,
                   std::optional<double> time_feature = std::nullopt);

/// Evaluates one test condition against per-snapshot references.
std::vector<ComponentErrors> evaluate_prediction(const Prediction& pred,
                                                 const std::vector<FieldPair>& reference,
                                                 Equation equation, const DomainMask& mask);

/// Decides the Laplacian convention of the analytic Schroedinger kernels by
/// comparing them with spectral solutions of i u_t = -c Lap u for c = 1 and
/// c = 1/2.  Exactly one must match within `tolerance`, else a hard error.
struct ConventionVerdict {
  double err_full = 0.0;   // c = 1
  double err_half = 0.0;   // c = 1/2
  double chosen_coeff = 1.0;
};
ConventionVerdict cross_validate_analytic(double k, double sigma2, const GridSpec& grid, double T,
                                          double tolerance);

/// Per-snapshot in-domain mass tracking plus a boundary-shell reflection
/// indicator (relative error restricted to the shell).
struct AbsorbingRow {
  double time = 0.0;
  double pred_mass = 0.0;  // squared L2 norm over the masked domain
  double ref_mass = 0.0;
  double mass_gap = 0.0;   // |pred - ref| / ref, 0 when both vanish
  double reflection = 0.0; // relative error over the boundary shell
};
std::vector<AbsorbingRow> absorbing_diagnostic(const std::vector<FieldPair>& pred,
                                               const std::vector<FieldPair>& reference,
                                               const std::vector<double>& times,
                                               const GridSpec& grid, const DomainMask& mask,
                                               double shell_frac = 0.1);

double median(std::vector<double> values);

}  // namespace wavemap
