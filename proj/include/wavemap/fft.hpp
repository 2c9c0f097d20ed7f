#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "wavemap/grid.hpp"

namespace wavemap {

using ComplexField = std::vector<std::complex<double>>;

/// In-place n-dimensional complex FFT on a periodic grid, plus the squared
/// wave numbers |xi|^2 per flattened grid point.  Wave numbers follow the
/// periodic-box convention xi_j = 2*pi*j/L with j in {-N/2, ..., N/2 - 1}.
class Fft {
 public:
  explicit Fft(const GridSpec& grid);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  void forward(ComplexField& field) const;   // unnormalized
  void inverse(ComplexField& field) const;   // divides by the point count

  const std::vector<double>& xi_squared() const { return xi_squared_; }
  std::int64_t size() const { return n_; }

 private:
  struct Plans;
  std::unique_ptr<Plans> plans_;
  std::vector<double> xi_squared_;
  std::int64_t n_ = 0;
};

}  // namespace wavemap
