#include "wavemap/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace wavemap {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double sech(double x) { return 2.0 / (std::exp(x) + std::exp(-x)); }

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Walks all grid points in row-major order, handing (flat, x) to f.
template <typename F>
void for_each_point(const GridSpec& grid, F&& f) {
  const auto axes = build_grid(grid);
  const std::int64_t n = grid.total_points();
  std::vector<int> idx(grid.dim, 0);
  std::vector<double> x(grid.dim);
  for (std::int64_t flat = 0; flat < n; ++flat) {
    for (int a = 0; a < grid.dim; ++a) x[a] = axes[a][idx[a]];
    f(flat, std::span<const double>(x));
    for (int a = grid.dim - 1; a >= 0; --a) {
      if (++idx[a] < grid.points_per_axis[a]) break;
      idx[a] = 0;
    }
  }
}

}  // namespace

void WavePacketSpec::validate() const {
  if (!(sigma2 > 0)) throw std::invalid_argument("packet: sigma2 must be positive");
  for (double v : k)
    if (!std::isfinite(v)) throw std::invalid_argument("packet: wave number must be finite");
  if (k.empty()) throw std::invalid_argument("packet: empty wave number");
}

std::vector<double> SigmaSet::linear() { return {0.8, 0.9, 1.0, 1.1, 1.2, 1.3}; }

std::vector<double> SigmaSet::exponential(double h) {
  if (!(h > 0)) throw std::invalid_argument("sigma set: h must be positive");
  return {h, 2 * h, 4 * h, 8 * h, 16 * h, 32 * h};
}

// Wave packets admit k vectors longer than the grid's dimension: the extra
// coordinates are sampled at zero (the cross-section protocol for the
// high-dimensional runs, where the tail wave numbers are fixed).
FieldPair wave_packet_initial(const WavePacketSpec& spec, const GridSpec& grid) {
  spec.validate();
  if (static_cast<int>(spec.k.size()) < grid.dim)
    throw std::invalid_argument("packet: wave number dimension too small for the grid");
  const double kn = std::sqrt(norm2(spec.k));
  FieldPair out;
  out.first.resize(grid.total_points());
  out.second.resize(grid.total_points());
  for_each_point(grid, [&](std::int64_t i, std::span<const double> x) {
    double kx = 0.0, xs = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      kx += spec.k[a] * x[a];
      xs += x[a];
    }
    const double env = std::exp(-norm2(x) / (2.0 * spec.sigma2));
    out.first[i] = env * std::cos(kx);
    out.second[i] = env * (xs / spec.sigma2 * std::cos(kx) + kn * std::sin(kx));
  });
  return out;
}

std::vector<double> wave_packet_evolved(const WavePacketSpec& spec, const GridSpec& grid,
                                        double t) {
  spec.validate();
  if (static_cast<int>(spec.k.size()) < grid.dim)
    throw std::invalid_argument("packet: wave number dimension too small for the grid");
  const double kn = std::sqrt(norm2(spec.k));
  const int tail = static_cast<int>(spec.k.size()) - grid.dim;
  std::vector<double> u(grid.total_points());
  for_each_point(grid, [&](std::int64_t i, std::span<const double> x) {
    double kx = 0.0, shifted = tail * t * t;  // tail coordinates sit at zero
    for (int a = 0; a < grid.dim; ++a) {
      kx += spec.k[a] * x[a];
      shifted += (x[a] - t) * (x[a] - t);
    }
    u[i] = std::exp(-shifted / (2.0 * spec.sigma2)) * std::cos(kx - kn * t);
  });
  return u;
}

FieldPair schrodinger_packet_initial(const WavePacketSpec& spec, const GridSpec& grid) {
  spec.validate();
  if (static_cast<int>(spec.k.size()) != grid.dim)
    throw std::invalid_argument("packet: wave number dimension mismatch");
  FieldPair out;
  out.first.resize(grid.total_points());
  out.second.resize(grid.total_points());
  for_each_point(grid, [&](std::int64_t i, std::span<const double> x) {
    double kx = 0.0;
    for (int a = 0; a < grid.dim; ++a) kx += spec.k[a] * x[a] / kSqrt2;
    const double env = std::exp(-norm2(x) / (2.0 * spec.sigma2));
    out.first[i] = env * std::cos(kx);
    out.second[i] = env * std::sin(kx);
  });
  return out;
}

std::complex<double> schrodinger_linear_evolved_at(const WavePacketSpec& spec,
                                                   std::span<const double> x, double t) {
  using cplx = std::complex<double>;
  const cplx I(0.0, 1.0);
  const int d = static_cast<int>(spec.k.size());
  if (d == 1) {
    const double y = x[0] / kSqrt2;
    const double k = spec.k[0];
    const double denom = 1.0 + 4.0 * t * t;
    const cplx pref = 1.0 / std::sqrt(cplx(1.0, 2.0 * t));
    const double envelope = std::exp(-(y - k * t) * (y - k * t) / (denom * spec.sigma2));
    const double phase = ((k + 2.0 * t * y) * y - 0.5 * k * k * t) / denom;
    return pref * envelope * std::exp(I * phase);
  }
  // Printed d-dimensional kernel (d = 2 is its own display but identical).
  double kx = 0.0, k2 = 0.0, x2 = 0.0;
  for (int a = 0; a < d; ++a) {
    kx += spec.k[a] * x[a];
    k2 += spec.k[a] * spec.k[a];
    x2 += x[a] * x[a];
  }
  const cplx denom(0.0 - 2.0 * t, 1.0);  // i - 2t
  const cplx pref = std::pow(I / denom, 0.5 * d);
  const cplx num = -I * (x2 / (2.0 * spec.sigma2)) - kx / kSqrt2 + 0.5 * k2 * t;
  return pref * std::exp(num / denom);
}

FieldPair schrodinger_linear_evolved(const WavePacketSpec& spec, const GridSpec& grid, double t) {
  spec.validate();
  if (static_cast<int>(spec.k.size()) != grid.dim)
    throw std::invalid_argument("packet: wave number dimension mismatch");
  FieldPair out;
  out.first.resize(grid.total_points());
  out.second.resize(grid.total_points());
  for_each_point(grid, [&](std::int64_t i, std::span<const double> x) {
    const std::complex<double> u = schrodinger_linear_evolved_at(spec, x, t);
    out.first[i] = u.real();
    out.second[i] = u.imag();
  });
  return out;
}

namespace {

// Scalar evaluators of the 1D wave test conditions; all four satisfy
// v0 = -u0' and therefore evolve as pure right-movers u0(x - t).
double wave_u0(NamedCondition id, double x, double ktilde) {
  switch (id) {
    case NamedCondition::WaveI: return std::exp(-x * x) * std::cos(6.0 * x);
    case NamedCondition::WaveII: return std::exp(-x * x / 1.5) * std::cos(6.5 * x);
    case NamedCondition::WaveIII: return sech(x) * std::cos(2.0 * x);
    case NamedCondition::WaveIV: return std::exp(-x * x) * std::cos(ktilde * x);
    default: throw std::invalid_argument("not a wave condition");
  }
}

double wave_v0(NamedCondition id, double x, double ktilde) {
  switch (id) {
    case NamedCondition::WaveI:
      return std::exp(-x * x) * (2.0 * x * std::cos(6.0 * x) + 6.0 * std::sin(6.0 * x));
    case NamedCondition::WaveII:
      return std::exp(-x * x / 1.5) *
             (x / 0.75 * std::cos(6.5 * x) + 6.5 * std::sin(6.5 * x));
    case NamedCondition::WaveIII:
      return sech(x) * (std::tanh(x) * std::cos(2.0 * x) + 2.0 * std::sin(2.0 * x));
    case NamedCondition::WaveIV:
      return std::exp(-x * x) * (2.0 * x * std::cos(ktilde * x) + ktilde * std::sin(ktilde * x));
    default: throw std::invalid_argument("not a wave condition");
  }
}

std::complex<double> nls_u0(NamedCondition id, std::span<const double> x) {
  using cplx = std::complex<double>;
  const cplx I(0.0, 1.0);
  const double x0 = x[0];
  switch (id) {
    case NamedCondition::NlsHat: {
      double p = 0.0;
      if (x0 >= 0.0 && x0 <= 2.0) p = -0.5 * x0 + 1.0;
      else if (x0 >= -2.0 && x0 < 0.0) p = 0.5 * x0 + 1.0;
      return cplx(p, 0.0);
    }
    case NamedCondition::NlsSech:
      return sech(x0) * std::exp(I * 5.0 * x0);
    case NamedCondition::NlsTruncGauss:
      if (x0 >= -2.0 && x0 <= 2.0) return std::exp(-x0 * x0) * std::exp(I * 5.0 * x0);
      return cplx(0.0, 0.0);
    case NamedCondition::NlsSquare:
      return (x0 >= -2.0 && x0 <= 2.0) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
    case NamedCondition::Nls2D: {
      const double x1 = x[0], x2 = x[1];
      return std::exp(-(x1 * x1 + x2 * x2)) * std::exp(I * (3.0 * x1 + 3.0 * x2));
    }
    default: throw std::invalid_argument("not an NLS condition");
  }
}

bool is_wave(NamedCondition id) {
  return id == NamedCondition::WaveI || id == NamedCondition::WaveII ||
         id == NamedCondition::WaveIII || id == NamedCondition::WaveIV;
}

bool is_schr_packet(NamedCondition id) {
  return id == NamedCondition::SchrI || id == NamedCondition::SchrII ||
         id == NamedCondition::SchrIII;
}

}  // namespace

WavePacketSpec packet_of(NamedCondition id, double ktilde) {
  WavePacketSpec spec;
  spec.equation = Equation::SchrodingerLinear;
  switch (id) {
    case NamedCondition::SchrI: spec.k = {6.0}; spec.sigma2 = 1.0; break;
    case NamedCondition::SchrII: spec.k = {6.5}; spec.sigma2 = 1.2; break;
    case NamedCondition::SchrIII: spec.k = {ktilde}; spec.sigma2 = 1.0; break;
    default: throw std::invalid_argument("condition is not a Schroedinger packet");
  }
  return spec;
}

FieldPair named_initial(NamedCondition id, const GridSpec& grid, double ktilde) {
  if (is_wave(id)) {
    if (grid.dim != 1) throw std::invalid_argument("wave test conditions are 1D");
    FieldPair out;
    out.first.resize(grid.total_points());
    out.second.resize(grid.total_points());
    for_each_point(grid, [&](std::int64_t i, std::span<const double> x) {
      out.first[i] = wave_u0(id, x[0], ktilde);
      out.second[i] = wave_v0(id, x[0], ktilde);
    });
    return out;
  }
  if (is_schr_packet(id)) return schrodinger_packet_initial(packet_of(id, ktilde), grid);
  const int want_dim = id == NamedCondition::Nls2D ? 2 : 1;
  if (grid.dim != want_dim) throw std::invalid_argument("condition dimension mismatch");
  FieldPair out;
  out.first.resize(grid.total_points());
  out.second.resize(grid.total_points());
  for_each_point(grid, [&](std::int64_t i, std::span<const double> x) {
    const std::complex<double> u = nls_u0(id, x);
    out.first[i] = u.real();
    out.second[i] = u.imag();
  });
  return out;
}

std::vector<double> named_wave_reference(NamedCondition id, const GridSpec& grid, double t,
                                         double ktilde) {
  if (!is_wave(id)) throw std::invalid_argument("not a wave condition");
  if (grid.dim != 1) throw std::invalid_argument("wave test conditions are 1D");
  std::vector<double> u(grid.total_points());
  for_each_point(grid, [&](std::int64_t i, std::span<const double> x) {
    u[i] = wave_u0(id, x[0] - t, ktilde);
  });
  return u;
}

double dispersion(Equation eq, std::span<const double> k) {
  const double n2 = norm2(k);
  return eq == Equation::Wave ? std::sqrt(n2) : 0.5 * n2;
}

std::string to_string(NamedCondition id) {
  switch (id) {
    case NamedCondition::WaveI: return "wave-i";
    case NamedCondition::WaveII: return "wave-ii";
    case NamedCondition::WaveIII: return "wave-iii";
    case NamedCondition::WaveIV: return "wave-iv";
    case NamedCondition::SchrI: return "schr-i";
    case NamedCondition::SchrII: return "schr-ii";
    case NamedCondition::SchrIII: return "schr-iii";
    case NamedCondition::NlsHat: return "nls-hat";
    case NamedCondition::NlsSech: return "nls-sech";
    case NamedCondition::NlsTruncGauss: return "nls-trunc-gauss";
    case NamedCondition::NlsSquare: return "nls-square";
    case NamedCondition::Nls2D: return "nls-2d";
  }
  return "unknown";
}

NamedCondition named_condition_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(NamedCondition::Nls2D); ++i) {
    const auto id = static_cast<NamedCondition>(i);
    if (to_string(id) == s) return id;
  }
  throw std::invalid_argument("unknown test condition: " + s);
}

}  // namespace wavemap
