#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wavemap {

/// Uniform tensor grid over a box.  Non-periodic grids include both box
/// endpoints; periodic grids drop the right endpoint of every axis so that
/// the point set tiles the torus (the convention spectral solvers need).
struct GridSpec {
  int dim = 1;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> points_per_axis;
  bool periodic = false;

  std::int64_t total_points() const;
  double spacing(int axis) const;
  double cell_volume() const;
  /// Throws std::invalid_argument on non-finite bounds, upper<=lower,
  /// points_per_axis < 2, or inconsistent array lengths.
  void validate() const;
};

/// Coordinates along each axis, strictly increasing and uniformly spaced.
std::vector<std::vector<double>> build_grid(const GridSpec& spec);

/// Row-major flattening with the first axis slowest.
std::int64_t flat_index(const GridSpec& spec, std::span<const int> idx);
void unflatten_index(const GridSpec& spec, std::int64_t flat, std::span<int> idx);
std::vector<double> point_at(const GridSpec& spec, std::int64_t flat);

/// Uniform time grid on [t0, T] with `steps` intervals.
struct TimeGrid {
  double t0 = 0.0;
  double T = 1.0;
  int steps = 1;

  double dt() const { return (T - t0) / steps; }
  void validate() const;
};

enum class MaskKind { Full, Disk, LShape };

/// Geometric description of an inclusion mask.  For Disk, an empty center
/// means the box center.  For LShape, `corner` is the lower corner of the
/// removed closed quadrant [corner, upper]; empty means the box center.
struct MaskSpec {
  MaskKind kind = MaskKind::Full;
  std::vector<double> center;
  double radius = 0.0;
  std::vector<double> corner;
};

struct DomainMask {
  MaskKind kind = MaskKind::Full;
  std::vector<std::uint8_t> flags;       // one per grid point, row-major
  std::vector<std::int64_t> included;    // ascending indices of included points

  std::int64_t included_count() const { return static_cast<std::int64_t>(included.size()); }
};

/// Builds the mask.  Disk points at exactly `radius` distance are included.
/// Throws std::invalid_argument if the disk does not fit inside the box or
/// the L-shape quadrant is degenerate.
DomainMask build_mask(const GridSpec& spec, const MaskSpec& mask);

/// Dense vector of the field values at included points, grid order.
std::vector<double> flatten_masked(std::span<const double> field, const DomainMask& mask);

/// Inverse of flatten_masked: included points get `values`, the rest zero.
std::vector<double> scatter_masked(std::span<const double> values, const DomainMask& mask);

/// Index of every `inner` grid point inside `outer`.  Requires equal spacing
/// and exact point alignment on every axis; throws otherwise.
std::vector<std::int64_t> embedding_indices(const GridSpec& inner, const GridSpec& outer);

std::string to_string(MaskKind kind);
MaskKind mask_kind_from_string(const std::string& s);

}  // namespace wavemap
