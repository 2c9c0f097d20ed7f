#include "wavemap/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <numbers>
#include <stdexcept>

namespace wavemap {

namespace {
// The FFTW planner is not thread-safe; execution of existing plans is.
std::mutex planner_mutex;
}  // namespace

struct Fft::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  // Plans are created for this buffer and re-applied to caller arrays via
  // the new-array execute interface, which requires identical alignment.
  std::vector<std::complex<double>> buffer;
};

Fft::Fft(const GridSpec& grid) {
  grid.validate();
  if (!grid.periodic) throw std::invalid_argument("fft: grid must be periodic");
  n_ = grid.total_points();

  // |xi|^2, flattened row-major to match field storage.
  xi_squared_.assign(n_, 0.0);
  std::vector<std::vector<double>> xi2_axis(grid.dim);
  for (int a = 0; a < grid.dim; ++a) {
    const int n = grid.points_per_axis[a];
    const double len = grid.upper[a] - grid.lower[a];
    xi2_axis[a].resize(n);
    for (int m = 0; m < n; ++m) {
      const int j = m <= (n - 1) / 2 ? m : m - n;
      const double xi = 2.0 * std::numbers::pi * j / len;
      xi2_axis[a][m] = xi * xi;
    }
  }
  std::vector<int> idx(grid.dim, 0);
  for (std::int64_t f = 0; f < n_; ++f) {
    double s = 0.0;
    for (int a = 0; a < grid.dim; ++a) s += xi2_axis[a][idx[a]];
    xi_squared_[f] = s;
    for (int a = grid.dim - 1; a >= 0; --a) {
      if (++idx[a] < grid.points_per_axis[a]) break;
      idx[a] = 0;
    }
  }

  plans_ = std::make_unique<Plans>();
  plans_->buffer.resize(n_);
  std::vector<int> dims(grid.points_per_axis.begin(), grid.points_per_axis.end());
  auto* raw = reinterpret_cast<fftw_complex*>(plans_->buffer.data());
  std::lock_guard lock(planner_mutex);
  // FFTW_ESTIMATE keeps planning deterministic run to run; FFTW_UNALIGNED is
  // required for the new-array execute interface on caller-owned buffers.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->fwd = fftw_plan_dft(grid.dim, dims.data(), raw, raw, FFTW_FORWARD, flags);
  plans_->inv = fftw_plan_dft(grid.dim, dims.data(), raw, raw, FFTW_BACKWARD, flags);
  if (!plans_->fwd || !plans_->inv) throw std::runtime_error("fft: planning failed");
}

Fft::~Fft() {
  if (plans_) {
    std::lock_guard lock(planner_mutex);
    if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
    if (plans_->inv) fftw_destroy_plan(plans_->inv);
  }
}

void Fft::forward(ComplexField& field) const {
  if (static_cast<std::int64_t>(field.size()) != n_)
    throw std::invalid_argument("fft: field length mismatch");
  auto* raw = reinterpret_cast<fftw_complex*>(field.data());
  fftw_execute_dft(plans_->fwd, raw, raw);
}

void Fft::inverse(ComplexField& field) const {
  if (static_cast<std::int64_t>(field.size()) != n_)
    throw std::invalid_argument("fft: field length mismatch");
  auto* raw = reinterpret_cast<fftw_complex*>(field.data());
  fftw_execute_dft(plans_->inv, raw, raw);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : field) v *= scale;
}

}  // namespace wavemap
