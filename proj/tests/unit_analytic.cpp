#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <complex>
#include <numbers>

#include "wavemap/analytic.hpp"

using namespace wavemap;

namespace {

// Independent high-precision evaluation of the closed forms (long double).
long double wave_u0_ref(long double x, long double k, long double s2) {
  return std::exp(-x * x / (2.0L * s2)) * std::cos(k * x);
}
long double wave_ut_ref(long double x, long double k, long double s2) {
  return std::exp(-x * x / (2.0L * s2)) *
         (x / s2 * std::cos(k * x) + std::fabs(k) * std::sin(k * x));
}
long double wave_u_ref(long double x, long double t, long double k, long double s2) {
  return std::exp(-(x - t) * (x - t) / (2.0L * s2)) * std::cos(k * x - std::fabs(k) * t);
}

GridSpec single_point_grid(double x) {
  return GridSpec{1, {x - 1.0}, {x}, {2}, false};  // last point sits exactly at x
}

}  // namespace

TEST_CASE("wave packet initial values against the high-precision oracle") {
  WavePacketSpec spec{{2.0}, 0.5, Equation::Wave};
  const GridSpec g = single_point_grid(1.0);
  const FieldPair f = wave_packet_initial(spec, g);
  CHECK(f.first[1] == doctest::Approx((double)wave_u0_ref(1.0L, 2.0L, 0.5L)).epsilon(1e-14));
  CHECK(f.first[1] == doctest::Approx(-0.15310).epsilon(1e-4));
  CHECK(f.second[1] == doctest::Approx((double)wave_ut_ref(1.0L, 2.0L, 0.5L)).epsilon(1e-14));

  // x = 0: envelope peak, cos 0 = 1; velocity vanishes
  const GridSpec g0 = single_point_grid(0.0);
  const FieldPair f0 = wave_packet_initial(spec, g0);
  CHECK(f0.first[1] == 1.0);
  CHECK(f0.second[1] == 0.0);
}

TEST_CASE("wave packet evolved values and traveling peak") {
  WavePacketSpec spec{{2.0}, 0.5, Equation::Wave};
  const GridSpec g = single_point_grid(1.0);
  const std::vector<double> u = wave_packet_evolved(spec, g, 2.0);
  CHECK(u[1] == doctest::Approx((double)wave_u_ref(1.0L, 2.0L, 2.0L, 0.5L)).epsilon(1e-14));
  CHECK(u[1] == doctest::Approx(-0.15310).epsilon(1e-4));

  // x = t rides the peak of the envelope with unit value
  const GridSpec gt = single_point_grid(2.0);
  const std::vector<double> up = wave_packet_evolved(spec, gt, 2.0);
  CHECK(up[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("wave packet evolved at t=0 matches the initial condition bitwise") {
  WavePacketSpec spec{{3.0}, 1.2, Equation::Wave};
  GridSpec g{1, {-8.0}, {8.0}, {201}, false};
  const FieldPair init = wave_packet_initial(spec, g);
  const std::vector<double> u0 = wave_packet_evolved(spec, g, 0.0);
  for (std::size_t i = 0; i < u0.size(); ++i) CHECK(u0[i] == init.first[i]);
}

TEST_CASE("wave evolved satisfies the 1D PDE to discretization order") {
  WavePacketSpec spec{{2.0}, 1.0, Equation::Wave};
  // fourth-order central stencils in x and t; the residual u_tt - u_xx of the
  // exact solution must fall at least second order under h -> h/2
  auto residual = [&](double x0, double t0, double h) {
    auto u = [&](double x, double t) {
      const GridSpec g = single_point_grid(x);
      return wave_packet_evolved(spec, g, t)[1];
    };
    auto d2 = [&](auto f) {
      return (-f(-2.0) + 16.0 * f(-1.0) - 30.0 * f(0.0) + 16.0 * f(1.0) - f(2.0)) /
             (12.0 * h * h);
    };
    const double utt = d2([&](double m) { return u(x0, t0 + m * h); });
    const double uxx = d2([&](double m) { return u(x0 + m * h, t0); });
    return std::abs(utt - uxx);
  };
  for (double x0 : {0.3, 1.1}) {
    const double r1 = residual(x0, 0.7, 0.1);
    const double r2 = residual(x0, 0.7, 0.05);
    CHECK(r2 * 3.9 < r1);  // at least second order (fourth expected)
  }
}

TEST_CASE("schrodinger packet initial values") {
  WavePacketSpec spec{{6.0}, 1.0, Equation::SchrodingerLinear};
  const double sqrt2 = std::sqrt(2.0);
  const GridSpec g = single_point_grid(sqrt2);
  const FieldPair f = schrodinger_packet_initial(spec, g);
  // u0(sqrt 2) = exp(-1) * exp(6 i)
  CHECK(f.first[1] == doctest::Approx(std::exp(-1.0) * std::cos(6.0)).epsilon(1e-12));
  CHECK(f.second[1] == doctest::Approx(std::exp(-1.0) * std::sin(6.0)).epsilon(1e-12));

  const GridSpec g0 = single_point_grid(0.0);
  const FieldPair f0 = schrodinger_packet_initial(spec, g0);
  CHECK(f0.first[1] == 1.0);
  CHECK(f0.second[1] == 0.0);

  // |u0| equals the Gaussian envelope everywhere
  GridSpec wide{1, {-6.0}, {6.0}, {101}, false};
  const FieldPair fp = schrodinger_packet_initial(spec, wide);
  const auto axes = build_grid(wide);
  for (int i = 0; i < 101; ++i) {
    const double mod = std::hypot(fp.first[i], fp.second[i]);
    CHECK(mod == doctest::Approx(std::exp(-axes[0][i] * axes[0][i] / 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("linear evolution reduces to the initial packet at t=0") {
  WavePacketSpec spec{{4.0}, 1.1, Equation::SchrodingerLinear};
  GridSpec g{1, {-8.0}, {8.0}, {201}, false};
  const FieldPair init = schrodinger_packet_initial(spec, g);
  const FieldPair ev = schrodinger_linear_evolved(spec, g, 0.0);
  for (int i = 0; i < 201; ++i) {
    CHECK(ev.first[i] == doctest::Approx(init.first[i]).epsilon(1e-14));
    CHECK(ev.second[i] == doctest::Approx(init.second[i]).epsilon(1e-14));
  }
}

TEST_CASE("1D kernel prefactor modulus and branch continuity") {
  WavePacketSpec spec{{0.0}, 1.0, Equation::SchrodingerLinear};
  const GridSpec g0 = single_point_grid(0.0);
  // at x = 0, k = 0 the field value is exactly the prefactor
  double prev_re = 1.0, prev_im = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.02 * i;
    const FieldPair f = schrodinger_linear_evolved(spec, g0, t);
    const double mod = std::hypot(f.first[1], f.second[1]);
    CHECK(mod == doctest::Approx(std::pow(1.0 + 4.0 * t * t, -0.25)).epsilon(1e-12));
    // no branch jumps: the value moves continuously
    CHECK(std::hypot(f.first[1] - prev_re, f.second[1] - prev_im) < 0.1);
    prev_re = f.first[1];
    prev_im = f.second[1];
  }
}

TEST_CASE("modulus depends on x only through the moving center") {
  WavePacketSpec spec{{5.0}, 0.9, Equation::SchrodingerLinear};
  const double t = 0.4;
  const double sqrt2 = std::sqrt(2.0);
  // pick x pairs symmetric about the packet center sqrt(2) k t
  const double center = sqrt2 * spec.k[0] * t;
  for (double d : {0.3, 1.0, 2.2}) {
    const GridSpec ga = single_point_grid(center + d);
    const GridSpec gb = single_point_grid(center - d);
    const FieldPair fa = schrodinger_linear_evolved(spec, ga, t);
    const FieldPair fb = schrodinger_linear_evolved(spec, gb, t);
    CHECK(std::hypot(fa.first[1], fa.second[1]) ==
          doctest::Approx(std::hypot(fb.first[1], fb.second[1])).epsilon(1e-12));
  }
}

TEST_CASE("linear evolution conserves the L2 norm") {
  GridSpec g{1, {-40.0}, {40.0}, {2001}, false};
  for (double s2 : {0.8, 1.0, 1.3}) {
    WavePacketSpec spec{{3.0}, s2, Equation::SchrodingerLinear};
    double norm0 = 0.0;
    for (double t : {0.0, 0.5, 1.0}) {
      const FieldPair f = schrodinger_linear_evolved(spec, g, t);
      double s = 0.0;
      for (int i = 0; i < 2001; ++i) s += f.first[i] * f.first[i] + f.second[i] * f.second[i];
      const double norm = std::sqrt(s * g.spacing(0));
      if (t == 0.0) norm0 = norm;
      else CHECK(norm == doctest::Approx(norm0).epsilon(1e-8));
    }
  }
}

TEST_CASE("2D kernel with unit width factorizes into 1D kernels") {
  WavePacketSpec spec2{{3.0, 2.0}, 1.0, Equation::SchrodingerLinear};
  WavePacketSpec spec_a{{3.0}, 1.0, Equation::SchrodingerLinear};
  WavePacketSpec spec_b{{2.0}, 1.0, Equation::SchrodingerLinear};
  const double t = 0.3;
  for (double x1 : {-0.7, 0.4}) {
    for (double x2 : {0.2, 1.3}) {
      const std::complex<double> u2 =
          schrodinger_linear_evolved_at(spec2, std::vector<double>{x1, x2}, t);
      const std::complex<double> ua =
          schrodinger_linear_evolved_at(spec_a, std::vector<double>{x1}, t);
      const std::complex<double> ub =
          schrodinger_linear_evolved_at(spec_b, std::vector<double>{x2}, t);
      CHECK(std::abs(u2 - ua * ub) < 1e-12);
    }
  }
}

TEST_CASE("named conditions match their printed forms") {
  GridSpec g{1, {-8.0}, {8.0}, {201}, false};
  const auto axes = build_grid(g);

  const FieldPair sq = named_initial(NamedCondition::NlsSquare, g);
  const FieldPair hat = named_initial(NamedCondition::NlsHat, g);
  const FieldPair w3 = named_initial(NamedCondition::WaveIII, g);
  for (int i = 0; i < 201; ++i) {
    const double x = axes[0][i];
    CHECK(sq.first[i] == (x >= -2.0 && x <= 2.0 ? 1.0 : 0.0));
    CHECK(sq.second[i] == 0.0);
    if (x == 0.0) CHECK(hat.first[i] == 1.0);
    if (x == 1.0) CHECK(hat.first[i] == doctest::Approx(0.5).epsilon(1e-14));
    if (std::abs(x) > 2.0) CHECK(hat.first[i] == 0.0);
  }
  CHECK(w3.first[100] == 1.0);   // sech(0) cos(0)
  CHECK(w3.second[100] == 0.0);  // tanh(0) = sin(0) = 0

  // compactly supported conditions vanish exactly at and outside the cut
  const FieldPair tg = named_initial(NamedCondition::NlsTruncGauss, g);
  for (int i = 0; i < 201; ++i)
    if (std::abs(axes[0][i]) > 2.0) CHECK(tg.first[i] == 0.0);
}

TEST_CASE("named schrodinger conditions are packets") {
  GridSpec g{1, {-8.0}, {8.0}, {201}, false};
  const FieldPair a = named_initial(NamedCondition::SchrI, g);
  const FieldPair b = schrodinger_packet_initial(packet_of(NamedCondition::SchrI), g);
  for (int i = 0; i < 201; ++i) {
    CHECK(a.first[i] == b.first[i]);
    CHECK(a.second[i] == b.second[i]);
  }
  CHECK(packet_of(NamedCondition::SchrII).sigma2 == doctest::Approx(1.2));
  CHECK(packet_of(NamedCondition::SchrII).k[0] == doctest::Approx(6.5));
  CHECK(packet_of(NamedCondition::SchrIII, 6.05).k[0] == doctest::Approx(6.05));
  CHECK_THROWS_AS(packet_of(NamedCondition::NlsHat), std::invalid_argument);
}

TEST_CASE("named wave references are pure right-movers") {
  GridSpec g{1, {-8.0}, {8.0}, {201}, false};
  const FieldPair init = named_initial(NamedCondition::WaveII, g);
  const std::vector<double> at0 = named_wave_reference(NamedCondition::WaveII, g, 0.0);
  for (int i = 0; i < 201; ++i) CHECK(at0[i] == init.first[i]);

  // shifting the grid by t reproduces the translated profile
  const double t = 0.64;  // 8 grid spacings
  const std::vector<double> ref = named_wave_reference(NamedCondition::WaveII, g, t);
  for (int i = 8; i < 201; ++i) CHECK(ref[i] == doctest::Approx(init.first[i - 8]).epsilon(1e-9));
}

TEST_CASE("dispersion relations") {
  CHECK(dispersion(Equation::Wave, std::vector<double>{3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(dispersion(Equation::SchrodingerLinear, std::vector<double>{2.0}) == doctest::Approx(2.0));
  CHECK(dispersion(Equation::Wave, std::vector<double>{0.0}) == 0.0);
  CHECK(dispersion(Equation::SchrodingerLinear, std::vector<double>{0.0, 0.0}) == 0.0);
}

TEST_CASE("sigma sets") {
  const auto L = SigmaSet::linear();
  CHECK(L == std::vector<double>{0.8, 0.9, 1.0, 1.1, 1.2, 1.3});
  const auto E = SigmaSet::exponential(0.5);
  CHECK(E == std::vector<double>{0.5, 1.0, 2.0, 4.0, 8.0, 16.0});
  CHECK_THROWS_AS(SigmaSet::exponential(0.0), std::invalid_argument);
}

TEST_CASE("packet validation") {
  WavePacketSpec bad{{1.0}, -1.0, Equation::Wave};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  WavePacketSpec nan_k{{std::nan("")}, 1.0, Equation::Wave};
  CHECK_THROWS_AS(nan_k.validate(), std::invalid_argument);
}
