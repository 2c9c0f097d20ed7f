#include "wavemap/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace wavemap {

std::int64_t GridSpec::total_points() const {
  std::int64_t n = 1;
  for (int p : points_per_axis) n *= p;
  return n;
}

double GridSpec::spacing(int axis) const {
  const double len = upper[axis] - lower[axis];
  const int n = points_per_axis[axis];
  return periodic ? len / n : len / (n - 1);
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= spacing(a);
  return v;
}

void GridSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("grid: dim must be positive");
  if (static_cast<int>(lower.size()) != dim || static_cast<int>(upper.size()) != dim ||
      static_cast<int>(points_per_axis.size()) != dim)
    throw std::invalid_argument("grid: array lengths must equal dim");
  for (int a = 0; a < dim; ++a) {
    if (!std::isfinite(lower[a]) || !std::isfinite(upper[a]))
      throw std::invalid_argument("grid: non-finite bounds");
    if (!(upper[a] > lower[a]))
      throw std::invalid_argument("grid: upper must exceed lower");
    if (points_per_axis[a] < 2)
      throw std::invalid_argument("grid: need at least 2 points per axis");
  }
}

std::vector<std::vector<double>> build_grid(const GridSpec& spec) {
  spec.validate();
  std::vector<std::vector<double>> axes(spec.dim);
  for (int a = 0; a < spec.dim; ++a) {
    const int n = spec.points_per_axis[a];
    const double h = spec.spacing(a);
    axes[a].resize(n);
    for (int i = 0; i < n; ++i) axes[a][i] = spec.lower[a] + i * h;
    if (!spec.periodic) axes[a][n - 1] = spec.upper[a];  // exact endpoint
  }
  return axes;
}

std::int64_t flat_index(const GridSpec& spec, std::span<const int> idx) {
  std::int64_t f = 0;
  for (int a = 0; a < spec.dim; ++a) f = f * spec.points_per_axis[a] + idx[a];
  return f;
}

void unflatten_index(const GridSpec& spec, std::int64_t flat, std::span<int> idx) {
  for (int a = spec.dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % spec.points_per_axis[a]);
    flat /= spec.points_per_axis[a];
  }
}

std::vector<double> point_at(const GridSpec& spec, std::int64_t flat) {
  std::vector<int> idx(spec.dim);
  unflatten_index(spec, flat, idx);
  std::vector<double> x(spec.dim);
  for (int a = 0; a < spec.dim; ++a) {
    x[a] = spec.lower[a] + idx[a] * spec.spacing(a);
    if (!spec.periodic && idx[a] == spec.points_per_axis[a] - 1) x[a] = spec.upper[a];
  }
  return x;
}

void TimeGrid::validate() const {
  if (!(T > t0)) throw std::invalid_argument("time grid: T must exceed t0");
  if (steps < 1) throw std::invalid_argument("time grid: steps must be positive");
}

namespace {

std::vector<double> box_center(const GridSpec& spec) {
  std::vector<double> c(spec.dim);
  for (int a = 0; a < spec.dim; ++a) c[a] = 0.5 * (spec.lower[a] + spec.upper[a]);
  return c;
}

}  // namespace

DomainMask build_mask(const GridSpec& spec, const MaskSpec& mask) {
  spec.validate();
  const std::int64_t n = spec.total_points();
  DomainMask out;
  out.kind = mask.kind;
  out.flags.assign(n, 1);

  if (mask.kind == MaskKind::Disk) {
    std::vector<double> c = mask.center.empty() ? box_center(spec) : mask.center;
    if (static_cast<int>(c.size()) != spec.dim)
      throw std::invalid_argument("mask: disk center dimension mismatch");
    if (!(mask.radius > 0)) throw std::invalid_argument("mask: disk radius must be positive");
    for (int a = 0; a < spec.dim; ++a) {
      if (c[a] - mask.radius < spec.lower[a] - 1e-12 || c[a] + mask.radius > spec.upper[a] + 1e-12)
        throw std::invalid_argument("mask: disk not contained in box");
    }
    for (std::int64_t i = 0; i < n; ++i) {
      const std::vector<double> x = point_at(spec, i);
      double d2 = 0.0;
      for (int a = 0; a < spec.dim; ++a) d2 += (x[a] - c[a]) * (x[a] - c[a]);
      out.flags[i] = d2 <= mask.radius * mask.radius ? 1 : 0;
    }
  } else if (mask.kind == MaskKind::LShape) {
    if (spec.dim < 2) throw std::invalid_argument("mask: L-shape needs dim >= 2");
    std::vector<double> c = mask.corner.empty() ? box_center(spec) : mask.corner;
    if (static_cast<int>(c.size()) != spec.dim)
      throw std::invalid_argument("mask: L-shape corner dimension mismatch");
    for (int a = 0; a < spec.dim; ++a) {
      if (!(c[a] < spec.upper[a]))
        throw std::invalid_argument("mask: L-shape quadrant has zero area");
    }
    // Remove the closed quadrant [corner, upper] in the first two axes.
    for (std::int64_t i = 0; i < n; ++i) {
      const std::vector<double> x = point_at(spec, i);
      out.flags[i] = (x[0] >= c[0] && x[1] >= c[1]) ? 0 : 1;
    }
  }

  out.included.reserve(n);
  for (std::int64_t i = 0; i < n; ++i)
    if (out.flags[i]) out.included.push_back(i);
  return out;
}

std::vector<double> flatten_masked(std::span<const double> field, const DomainMask& mask) {
  if (field.size() != mask.flags.size())
    throw std::invalid_argument("flatten_masked: field length does not match grid point count");
  std::vector<double> out(mask.included.size());
  for (std::size_t j = 0; j < mask.included.size(); ++j) out[j] = field[mask.included[j]];
  return out;
}

std::vector<double> scatter_masked(std::span<const double> values, const DomainMask& mask) {
  if (values.size() != mask.included.size())
    throw std::invalid_argument("scatter_masked: value count does not match mask");
  std::vector<double> out(mask.flags.size(), 0.0);
  for (std::size_t j = 0; j < mask.included.size(); ++j) out[mask.included[j]] = values[j];
  return out;
}

std::vector<std::int64_t> embedding_indices(const GridSpec& inner, const GridSpec& outer) {
  inner.validate();
  outer.validate();
  if (inner.dim != outer.dim)
    throw std::invalid_argument("embedding: dimension mismatch");
  std::vector<std::int64_t> offsets(inner.dim);
  for (int a = 0; a < inner.dim; ++a) {
    const double hi = inner.spacing(a);
    const double ho = outer.spacing(a);
    if (std::abs(hi - ho) > 1e-12 * std::max(std::abs(hi), std::abs(ho)))
      throw std::invalid_argument("embedding: grid spacings differ");
    const double raw = (inner.lower[a] - outer.lower[a]) / ho;
    offsets[a] = static_cast<std::int64_t>(std::llround(raw));
    if (std::abs(raw - static_cast<double>(offsets[a])) > 1e-9 || offsets[a] < 0 ||
        offsets[a] + inner.points_per_axis[a] > outer.points_per_axis[a])
      throw std::invalid_argument("embedding: inner grid does not align with outer grid");
  }
  const std::int64_t n = inner.total_points();
  std::vector<std::int64_t> map(n);
  std::vector<int> idx(inner.dim);
  std::vector<int> oidx(inner.dim);
  for (std::int64_t i = 0; i < n; ++i) {
    unflatten_index(inner, i, idx);
    for (int a = 0; a < inner.dim; ++a) oidx[a] = idx[a] + static_cast<int>(offsets[a]);
    map[i] = flat_index(outer, oidx);
  }
  return map;
}

std::string to_string(MaskKind kind) {
  switch (kind) {
    case MaskKind::Full: return "full";
    case MaskKind::Disk: return "disk";
    case MaskKind::LShape: return "lshape";
  }
  return "full";
}

MaskKind mask_kind_from_string(const std::string& s) {
  if (s == "full") return MaskKind::Full;
  if (s == "disk") return MaskKind::Disk;
  if (s == "lshape") return MaskKind::LShape;
  throw std::invalid_argument("unknown mask kind: " + s);
}

}  // namespace wavemap
