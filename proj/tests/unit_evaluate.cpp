#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "wavemap/evaluate.hpp"

using namespace wavemap;

TEST_CASE("relative error definition and edge cases") {
  const std::vector<double> ref{3.0, 4.0};
  CHECK(relative_error(ref, ref) == 0.0);

  const std::vector<double> scaled{3.3, 4.4};
  CHECK(relative_error(scaled, ref) == doctest::Approx(0.1).epsilon(1e-12));

  // one entry perturbed by the reference norm gives exactly 1
  const std::vector<double> bumped{3.0 + 5.0, 4.0};
  CHECK(relative_error(bumped, ref) == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(relative_error(ref, zero), std::invalid_argument);
  CHECK_THROWS_AS(relative_error(std::vector<double>{1.0}, ref), std::invalid_argument);
}

TEST_CASE("relative error is absolutely homogeneous in the perturbation") {
  std::vector<double> ref(50), delta(50);
  for (int i = 0; i < 50; ++i) {
    ref[i] = std::sin(0.3 * i) + 1.5;
    delta[i] = std::cos(1.7 * i);
  }
  auto perturbed = [&](double c) {
    std::vector<double> p(50);
    for (int i = 0; i < 50; ++i) p[i] = ref[i] + c * delta[i];
    return p;
  };
  const double base = relative_error(perturbed(1.0), ref);
  for (double c : {0.5, 2.0, -3.0})
    CHECK(relative_error(perturbed(c), ref) == doctest::Approx(std::abs(c) * base).epsilon(1e-12));
}

TEST_CASE("density error comes from the predicted parts") {
  const std::vector<double> rp{1.0, 0.5, 0.2};
  const std::vector<double> rq{0.0, 0.5, -0.4};
  // swap p and q in the prediction: rho is pointwise identical, parts differ
  const ComponentErrors e = schrodinger_errors(rq, rp, rp, rq);
  CHECK(e.rho == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(e.u_or_p > 0.1);
  CHECK(e.q > 0.1);
}

TEST_CASE("cross validation picks exactly one Laplacian convention") {
  const GridSpec grid{1, {-16.0 * std::numbers::pi}, {16.0 * std::numbers::pi}, {1024}, true};
  const ConventionVerdict verdict = cross_validate_analytic(6.0, 1.0, grid, 0.2, 1e-6);
  CHECK(verdict.chosen_coeff == 1.0);
  CHECK(verdict.err_full < 1e-6);
  CHECK(verdict.err_half > 1e-2);

  // at t=0 both conventions agree with the shared initial condition
  const ConventionVerdict trivial = cross_validate_analytic(6.0, 1.0, grid, 1e-9, 1e-6);
  CHECK(trivial.err_full < 1e-9);
  CHECK(trivial.err_half < 1e-9);

  // an impossible tolerance blocks data generation
  CHECK_THROWS_AS(cross_validate_analytic(6.0, 1.0, grid, 0.2, 1e-18), SolverError);
}

TEST_CASE("analytic center of mass matches the spectral one") {
  const GridSpec grid{1, {-16.0 * std::numbers::pi}, {16.0 * std::numbers::pi}, {1024}, true};
  const double T = 0.2;
  WavePacketSpec packet{{6.0}, 1.0, Equation::SchrodingerLinear};
  const FieldPair analytic = schrodinger_linear_evolved(packet, grid, T);

  SolverRun run;
  run.grid = grid;
  run.time = {0.0, T, 100};
  run.model.beta = 0.0;
  run.initial = schrodinger_packet_initial(packet, grid);
  run.snapshot_times = {T};
  const FieldPair spectral = solve_nls(run).at(0);

  const auto axes = build_grid(grid);
  auto center = [&](const FieldPair& f) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 1024; ++i) {
      const double rho = f.first[i] * f.first[i] + f.second[i] * f.second[i];
      num += axes[0][i] * rho;
      den += rho;
    }
    return num / den;
  };
  CHECK(std::abs(center(analytic) - center(spectral)) < grid.spacing(0));
}

TEST_CASE("absorbing diagnostic on a perfect prediction") {
  const GridSpec grid{1, {-8.0}, {8.0}, {201}, false};
  const DomainMask mask = build_mask(grid, {});
  WavePacketSpec packet{{6.0}, 1.0, Equation::SchrodingerLinear};
  std::vector<FieldPair> ref;
  const std::vector<double> times{0.0, 1.5, 3.0};
  for (double t : times) ref.push_back(schrodinger_linear_evolved(packet, grid, t));

  const auto rows = absorbing_diagnostic(ref, ref, times, grid, mask);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.mass_gap == 0.0);
    CHECK(r.reflection == 0.0);
    CHECK(r.pred_mass == r.ref_mass);
  }
  // the packet leaves the window: in-domain reference mass decays hard
  CHECK(rows[2].ref_mass < 0.2 * rows[0].ref_mass);

  // zero fields: all masses and gaps are zero
  std::vector<FieldPair> zero(3);
  for (auto& f : zero) {
    f.first.assign(201, 0.0);
    f.second.assign(201, 0.0);
  }
  const auto zrows = absorbing_diagnostic(zero, zero, times, grid, mask);
  for (const auto& r : zrows) {
    CHECK(r.pred_mass == 0.0);
    CHECK(r.mass_gap == 0.0);
    CHECK(r.reflection == 0.0);
  }
}

TEST_CASE("predict matches the dataset assembly layout") {
  FamilySpec family;
  family.equation = Equation::SchrodingerLinear;
  family.wave_numbers = {{2.0}, {3.0}};
  family.sigma2s = {1.0};
  family.source = DataSource::Analytic;
  family.model.beta = 0.0;
  const GridSpec grid{1, {-8.0}, {8.0}, {101}, false};
  const Dataset ds = assemble_simo(family, grid, {}, {0.1, 0.2}, {});

  NetworkConfig cfg;
  cfg.depth = 3;
  cfg.width = 8;
  cfg.input_dim = static_cast<int>(ds.inputs.cols());
  cfg.output_dim = static_cast<int>(ds.outputs.cols());
  const NetworkParams model = he_init(cfg, 3);

  // the prediction for a sample's initial state equals forward on its row
  const WavePacketSpec packet{{3.0}, 1.0, Equation::SchrodingerLinear};
  const FieldPair init = schrodinger_packet_initial(packet, grid);
  const Prediction pred = predict(model, ds, init);
  REQUIRE(pred.snapshots.size() == 2);
  const RowMatrix out = forward(model, RowMatrix(ds.inputs.row(1)));
  for (int i = 0; i < 101; ++i) {
    CHECK(pred.snapshots[0].first[i] == doctest::Approx(out(0, i)).epsilon(1e-12));
    CHECK(pred.snapshots[0].second[i] == doctest::Approx(out(0, 101 + i)).epsilon(1e-12));
    CHECK(pred.snapshots[1].first[i] == doctest::Approx(out(0, 202 + i)).epsilon(1e-12));
  }

  // evaluating the assembled outputs as a perfect prediction gives zero error
  Prediction perfect;
  perfect.snapshots.resize(2);
  for (int s = 0; s < 2; ++s) {
    perfect.snapshots[s].first.resize(101);
    perfect.snapshots[s].second.resize(101);
    for (int i = 0; i < 101; ++i) {
      perfect.snapshots[s].first[i] = ds.outputs(1, s * 202 + i);
      perfect.snapshots[s].second[i] = ds.outputs(1, s * 202 + 101 + i);
    }
  }
  std::vector<FieldPair> reference;
  for (double t : ds.times) reference.push_back(schrodinger_linear_evolved(packet, grid, t));
  const auto errs = evaluate_prediction(perfect, reference, ds.equation, ds.mask);
  for (const auto& e : errs) {
    CHECK(e.u_or_p < 1e-12);
    CHECK(e.q < 1e-12);
    CHECK(e.rho < 1e-12);
  }
}

TEST_CASE("median over seeds") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(median({7.0}) == 7.0);
  CHECK_THROWS_AS(median({}), std::invalid_argument);
}

TEST_CASE("report csv schema and byte determinism") {
  ErrorRow row;
  row.experiment_id = "unit";
  row.equation = "wave";
  row.activation = "tanh";
  row.sigma_set = "L";
  row.k_set = "1:10";
  row.lambda = 0.0625;
  row.seed = 3;
  row.test_condition = "wave-i";
  row.snapshot_time = 2.0;
  row.errors.u_or_p = 0.001234;

  const auto path1 = (std::filesystem::temp_directory_path() / "wavemap-report1.csv").string();
  const auto path2 = (std::filesystem::temp_directory_path() / "wavemap-report2.csv").string();
  write_report_csv({row}, path1);
  write_report_csv({row}, path2);

  std::ifstream in(path1);
  std::string header, line;
  std::getline(in, header);
  CHECK(header ==
        "experiment_id,equation,activation,sigma_set,k_set,lambda,seed,test_condition,"
        "snapshot_time,err_u_or_p,err_q,err_rho,wall_seconds");
  std::getline(in, line);
  CHECK(line.find("unit,wave,tanh,L,1:10,") == 0);
  // wave rows leave the schrodinger-only columns empty
  CHECK(line.find(",,") != std::string::npos);

  std::ifstream a(path1), b(path2);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  std::remove(path1.c_str());
  std::remove(path2.c_str());
}
