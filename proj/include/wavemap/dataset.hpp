#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "wavemap/analytic.hpp"
#include "wavemap/grid.hpp"
#include "wavemap/solver.hpp"

namespace wavemap {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class DatasetKind { Siso, Simo, Ximo };
enum class DataSource { Analytic, Spectral, Cnfd };
enum class RescaleMode { Normalized, Literal, None };

/// Granularity of the min-max statistics: PerSample normalizes each row by
/// its own extrema; Global applies one affine map fitted on the whole input
/// matrix (the map that preserves the linear structure of the underlying
/// solution operator).
enum class RescaleGranularity { PerSample, Global };

/// Input transform record.  `row_min`/`row_max` hold the extrema of the
/// pre-scaled rows (lambda * row for Normalized, the raw row for Literal and
/// None); `global_min`/`global_max` the whole-matrix extrema used by Global
/// mode.  Test-time inputs are transformed with the stored record.
struct RescaleRecord {
  RescaleMode mode = RescaleMode::Normalized;
  RescaleGranularity granularity = RescaleGranularity::Global;
  double lambda = 1.0;
  double global_min = 0.0;
  double global_max = 0.0;
  std::vector<double> row_min;
  std::vector<double> row_max;
};

/// Applies the transform to one row.  Normalized maps affinely onto [-1, 1];
/// Literal applies the min-max formula verbatim (which does not generally
/// land in [-1, 1]); None is the identity.  Returns the scaled row and the
/// recorded (min, max).  Throws on constant rows for the min-max modes.
std::pair<std::vector<double>, std::pair<double, double>> rescale_input(
    std::span<const double> row, RescaleMode mode, double lambda);

/// The wave-packet family a dataset is built from, plus its data source.
struct FamilySpec {
  Equation equation = Equation::Wave;
  std::vector<std::vector<double>> wave_numbers;  // K, outer loop (k-major)
  std::vector<double> sigma2s;                    // Sigma, inner loop, ascending
  DataSource source = DataSource::Analytic;
  NlsModel model;           // dynamics for Spectral/Cnfd sources
  int expand_factor = 1;    // >1: solve on the expanded box, restrict
  int solver_steps = 1000;  // steps over [0, max snapshot time]
  CnfdOptions cnfd;

  void validate() const;
};

/// Exogenous-input family: one potential per sample, a shared initial state.
struct XimoFamily {
  std::vector<Potential> potentials;
  NlsModel base_model;
  int solver_steps = 1000;
  int expand_factor = 1;
};

struct AssembleOptions {
  RescaleMode rescale = RescaleMode::Normalized;
  RescaleGranularity granularity = RescaleGranularity::Global;
  double lambda = 1.0;
  std::uint64_t seed = 0;     // provenance only; assembly is deterministic
  bool time_feature = false;  // append the snapshot time to each input row
};

struct Dataset {
  DatasetKind kind = DatasetKind::Siso;
  Equation equation = Equation::Wave;
  RowMatrix inputs;   // N x m1
  RowMatrix outputs;  // N x m2
  GridSpec grid;
  MaskSpec mask_spec;
  DomainMask mask;
  std::vector<double> times;  // snapshot times, ascending (SISO: one entry)
  RescaleRecord rescale;
  bool time_feature = false;
  nlohmann::json provenance;

  std::int64_t samples() const { return inputs.rows(); }
  /// Output width of one snapshot: N_masked for wave, 2 N_masked otherwise.
  std::int64_t per_snapshot_width() const;
  std::int64_t masked_points() const { return mask.included_count(); }
};

/// Row layout: input [u0 || v0] (wave) or [p0 || q0] (Schroedinger), output
/// the masked solution at T.  Samples are enumerated k-major then sigma.
Dataset assemble_siso(const FamilySpec& family, const GridSpec& grid, const MaskSpec& mask,
                      double T, const AssembleOptions& options);

/// Output row: the p snapshots concatenated in time order.
Dataset assemble_simo(const FamilySpec& family, const GridSpec& grid, const MaskSpec& mask,
                      const std::vector<double>& times, const AssembleOptions& options);

/// One SISO row per (sample, snapshot time) with the time appended to the
/// input: [U0 || t_i] -> u(t_i).  The protocol behind the time-extrapolation
/// sweep: the time input interpolates inside the training window and
/// extrapolates a short distance beyond it.
Dataset assemble_time_conditioned(const FamilySpec& family, const GridSpec& grid,
                                  const MaskSpec& mask, const std::vector<double>& times,
                                  const AssembleOptions& options);

/// Input row: V(x, t_i) samples concatenated over times; output row: the
/// solution snapshots driven by that potential from the shared initial state.
Dataset assemble_ximo(const XimoFamily& family, const FieldPair& initial, const GridSpec& grid,
                      const MaskSpec& mask, const std::vector<double>& times,
                      const AssembleOptions& options);

/// "WPKD" container.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

/// "WPKF" single-field container for solver snapshots and plot dumps.
void save_fields(const std::vector<FieldPair>& snapshots, const GridSpec& grid,
                 const std::vector<double>& times, const nlohmann::json& extra_metadata,
                 const std::string& path);
struct FieldDump {
  std::vector<FieldPair> snapshots;
  GridSpec grid;
  std::vector<double> times;
  nlohmann::json metadata;
};
FieldDump load_fields(const std::string& path);

/// Full-grid fields of one family sample: the packet initial state and its
/// snapshots from the configured source (shared by dataset assembly and the
/// reference generators).
struct SampleFields {
  FieldPair initial;
  std::vector<FieldPair> snapshots;  // wave: second part empty
};
SampleFields generate_sample(const FamilySpec& family, const WavePacketSpec& packet,
                             const GridSpec& grid, const std::vector<double>& times);

/// Snapshots of an arbitrary initial state under the family's source/model
/// (used for named test conditions that are not packets).
std::vector<FieldPair> generate_from_initial(const FamilySpec& family, const FieldPair& initial,
                                             const GridSpec& grid,
                                             const std::vector<double>& times);

/// Transforms one test-time row with a dataset's stored record.
std::vector<double> rescale_with_record(std::span<const double> row, const RescaleRecord& record);

std::string to_string(DatasetKind k);
std::string to_string(DataSource s);
std::string to_string(RescaleMode m);
std::string to_string(RescaleGranularity g);
RescaleGranularity rescale_granularity_from_string(const std::string& s);
std::string to_string(Equation e);
DatasetKind dataset_kind_from_string(const std::string& s);
DataSource data_source_from_string(const std::string& s);
RescaleMode rescale_mode_from_string(const std::string& s);
Equation equation_from_string(const std::string& s);

nlohmann::json grid_to_json(const GridSpec& grid);
GridSpec grid_from_json(const nlohmann::json& j);
nlohmann::json mask_spec_to_json(const MaskSpec& m);
MaskSpec mask_spec_from_json(const nlohmann::json& j);

}  // namespace wavemap
