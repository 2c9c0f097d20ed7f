#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "wavemap/grid.hpp"

namespace wavemap {

enum class Equation { Wave, SchrodingerLinear };

/// Gaussian wave packet, the sample unit of every training family.
/// For the wave equation the envelope is exp(-|x|^2/(2 sigma^2)) with phase
/// cos(k.x).  For the Schroedinger family the same k parameterizes the phase
/// k.(x/sqrt(2)), so the effective plane-wave number in x is k/sqrt(2).
struct WavePacketSpec {
  std::vector<double> k;
  double sigma2 = 1.0;
  Equation equation = Equation::Wave;

  void validate() const;
};

/// The two width-set families used to build training data, plus explicit lists.
struct SigmaSet {
  static std::vector<double> linear();              // {0.8, 0.9, 1.0, 1.1, 1.2, 1.3}
  static std::vector<double> exponential(double h); // {h, 2h, 4h, 8h, 16h, 32h}
};

/// Two real grid arrays: (u, u_t) for the wave equation, (p, q) = (Re, Im)
/// for the Schroedinger equation.  `second` may be empty for scalar fields.
struct FieldPair {
  std::vector<double> first;
  std::vector<double> second;
};

enum class NamedCondition {
  WaveI, WaveII, WaveIII, WaveIV,
  SchrI, SchrII, SchrIII,
  NlsHat, NlsSech, NlsTruncGauss, NlsSquare, Nls2D,
};

/// (u0, v0) for the wave equation.
FieldPair wave_packet_initial(const WavePacketSpec& spec, const GridSpec& grid);

/// u(x,t) = exp(-sum_i (x_i - t)^2 / (2 sigma^2)) cos(k.x - |k| t).
/// Exact for d = 1; for d > 1 it is the generating formula of the training
/// family and only approximately solves the PDE.
std::vector<double> wave_packet_evolved(const WavePacketSpec& spec, const GridSpec& grid, double t);

/// (p0, q0) of exp(-|x|^2/(2 sigma^2) + i k.(x/sqrt(2))).
FieldPair schrodinger_packet_initial(const WavePacketSpec& spec, const GridSpec& grid);

/// Closed-form free evolution of the packet, split into (p, q).  Uses the
/// dimension-specific printed kernels (d = 1, d = 2, general d) with
/// principal-branch complex prefactors.
FieldPair schrodinger_linear_evolved(const WavePacketSpec& spec, const GridSpec& grid, double t);
std::complex<double> schrodinger_linear_evolved_at(const WavePacketSpec& spec,
                                                   std::span<const double> x, double t);

/// Test initial conditions.  `ktilde` feeds WaveIV and SchrIII.
FieldPair named_initial(NamedCondition id, const GridSpec& grid, double ktilde = 0.0);

/// Exact 1D wave solution for the named wave conditions (all are pure
/// right-movers with v0 = -u0', so u(x,t) = u0(x - t)).
std::vector<double> named_wave_reference(NamedCondition id, const GridSpec& grid, double t,
                                         double ktilde = 0.0);

/// Packet parameters of the named packet-shaped Schroedinger conditions
/// (SchrI, SchrII, SchrIII); throws for the others.
WavePacketSpec packet_of(NamedCondition id, double ktilde = 0.0);

/// omega(k): |k| for the wave equation, |k|^2/2 for the Schroedinger one.
double dispersion(Equation eq, std::span<const double> k);

std::string to_string(NamedCondition id);
NamedCondition named_condition_from_string(const std::string& s);

}  // namespace wavemap
