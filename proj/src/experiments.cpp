#include "wavemap/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "wavemap/optim.hpp"

namespace wavemap {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void say(const RunOptions& opt, const std::string& msg) {
  if (!opt.quiet) {
    std::fputs((msg + "\n").c_str(), stdout);
    std::fflush(stdout);
  }
}

GridSpec grid_1d(double lo, double hi, int n, bool periodic) {
  GridSpec g;
  g.dim = 1;
  g.lower = {lo};
  g.upper = {hi};
  g.points_per_axis = {n};
  g.periodic = periodic;
  return g;
}

GridSpec grid_2d(double lo, double hi, int n, bool periodic) {
  GridSpec g;
  g.dim = 2;
  g.lower = {lo, lo};
  g.upper = {hi, hi};
  g.points_per_axis = {n, n};
  g.periodic = periodic;
  return g;
}

std::vector<std::vector<double>> scalar_ks(int lo, int hi) {
  std::vector<std::vector<double>> ks;
  for (int k = lo; k <= hi; ++k) ks.push_back({static_cast<double>(k)});
  return ks;
}

// (k1, k2) on a grid, optionally padded with unit tail wave numbers.
std::vector<std::vector<double>> pair_ks(int lo, int hi, int full_dim) {
  std::vector<std::vector<double>> ks;
  for (int k1 = lo; k1 <= hi; ++k1)
    for (int k2 = lo; k2 <= hi; ++k2) {
      std::vector<double> k{static_cast<double>(k1), static_cast<double>(k2)};
      k.resize(full_dim, 1.0);
      ks.push_back(std::move(k));
    }
  return ks;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  v.back() = hi;
  return v;
}

std::vector<double> arithmetic_sigmas(double h, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = h * (i + 1);
  return v;
}

// The Laplacian convention the analytic kernels follow, resolved once by
// cross-validation against the spectral solver and reused by every
// Schroedinger recipe.
double resolved_kinetic_coeff() {
  static const double coeff = [] {
    const GridSpec grid = grid_1d(-16.0 * std::numbers::pi, 16.0 * std::numbers::pi, 1024, true);
    return cross_validate_analytic(6.0, 1.0, grid, 0.2, 1e-6).chosen_coeff;
  }();
  return coeff;
}

struct SeedModel {
  std::uint64_t seed = 0;
  NetworkParams params;
  double train_seconds = 0.0;
};

std::vector<SeedModel> train_seeds(const Dataset& ds, const NetworkConfig& netcfg,
                                   const TrainConfig& base, const RunOptions& opt,
                                   const std::string& dir, const std::string& label,
                                   ExperimentResult& result) {
  std::vector<SeedModel> models;
  for (int s = 0; s < opt.seeds; ++s) {
    const std::uint64_t seed = opt.base_seed + static_cast<std::uint64_t>(s);
    TrainConfig tc = base;
    tc.seed = seed;
    if (opt.epochs_override) tc.epochs = *opt.epochs_override;
    say(opt, "  [" + label + "] training seed " + std::to_string(seed) + " (" +
                 std::to_string(tc.epochs) + " epochs, N=" + std::to_string(ds.samples()) +
                 ", m1=" + std::to_string(ds.inputs.cols()) +
                 ", m2=" + std::to_string(ds.outputs.cols()) + ")");
    const auto t0 = Clock::now();
    TrainResult tr = train(tc, ds.inputs, ds.outputs, he_init(netcfg, seed));
    SeedModel sm;
    sm.seed = seed;
    sm.params = std::move(tr.params);
    sm.train_seconds = seconds_since(t0);
    say(opt, "    final loss " + std::to_string(tr.loss_history.empty() ? 0.0
                                                                        : tr.loss_history.back()) +
                 " in " + std::to_string(sm.train_seconds) + " s");

    const std::string model_path = dir + "/model-" + label + "-seed" + std::to_string(seed) + ".wpkm";
    nlohmann::json info{{"label", label},
                        {"epochs", tc.epochs},
                        {"lr", tc.lr},
                        {"lr_decay", tc.lr_decay},
                        {"lr_decay_every", tc.lr_decay_every},
                        {"final_loss", tr.loss_history.empty() ? 0.0 : tr.loss_history.back()}};
    save_model(sm.params, seed, info, model_path);
    write_loss_csv(tr.loss_history, dir + "/loss-" + label + "-seed" + std::to_string(seed) + ".csv");
    result.artifacts.push_back(model_path);
    models.push_back(std::move(sm));
  }
  return models;
}

struct TestCase {
  std::string name;
  FieldPair initial;                  // on the data grid
  std::vector<FieldPair> reference;   // one per dataset snapshot time
  std::optional<double> time_feature; // time-conditioned evaluation point
};

// Evaluates all seeds on all cases and appends per-seed and median rows.
// Returns median errors indexed [case][snapshot].
std::vector<std::vector<ComponentErrors>> evaluate_cases(
    const std::vector<SeedModel>& models, const Dataset& ds, const std::vector<TestCase>& cases,
    const std::string& experiment_id, const std::string& activation, const std::string& sigma_label,
    const std::string& k_label, std::vector<ErrorRow>& rows) {
  std::vector<std::vector<ComponentErrors>> medians(cases.size());
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const TestCase& tc = cases[c];
    const std::size_t p = tc.reference.size();
    std::vector<std::vector<ComponentErrors>> per_seed(models.size());
    for (std::size_t s = 0; s < models.size(); ++s) {
      const Prediction pred = predict(models[s].params, ds, tc.initial, tc.time_feature);
      per_seed[s] = evaluate_prediction(pred, tc.reference, ds.equation, ds.mask);
      for (std::size_t i = 0; i < p; ++i) {
        ErrorRow row;
        row.experiment_id = experiment_id;
        row.equation = to_string(ds.equation);
        row.activation = activation;
        row.sigma_set = sigma_label;
        row.k_set = k_label;
        row.lambda = ds.rescale.lambda;
        row.seed = static_cast<std::int64_t>(models[s].seed);
        row.test_condition = tc.name;
        row.snapshot_time = tc.time_feature ? *tc.time_feature : ds.times[i];
        row.errors = per_seed[s][i];
        rows.push_back(row);
      }
    }
    medians[c].resize(p);
    for (std::size_t i = 0; i < p; ++i) {
      auto collect = [&](auto pick) {
        std::vector<double> vals;
        for (const auto& seed_errors : per_seed) {
          const double v = pick(seed_errors[i]);
          if (!std::isnan(v)) vals.push_back(v);
        }
        return vals.empty() ? std::numeric_limits<double>::quiet_NaN() : median(vals);
      };
      medians[c][i].u_or_p = collect([](const ComponentErrors& e) { return e.u_or_p; });
      medians[c][i].q = collect([](const ComponentErrors& e) { return e.q; });
      medians[c][i].rho = collect([](const ComponentErrors& e) { return e.rho; });

      ErrorRow row;
      row.experiment_id = experiment_id;
      row.equation = to_string(ds.equation);
      row.activation = activation;
      row.sigma_set = sigma_label;
      row.k_set = k_label;
      row.lambda = ds.rescale.lambda;
      row.seed = -1;  // median over seeds
      row.test_condition = tc.name;
      row.snapshot_time = tc.time_feature ? *tc.time_feature : ds.times[i];
      row.errors = medians[c][i];
      rows.push_back(row);
    }
  }
  return medians;
}

GateResult make_gate(const std::string& gate, const std::string& desc, double value,
                     double threshold, bool greater_is_pass = false) {
  GateResult g;
  g.gate = gate;
  g.description = desc;
  g.value = value;
  g.threshold = threshold;
  g.pass = greater_is_pass ? value >= threshold : value <= threshold;
  return g;
}

std::string outdir_for(const RunOptions& opt, const std::string& id) {
  const std::string dir = opt.outdir + "/" + id;
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// ex1-wave-1d: 1D wave equation, tanh FCNN, K = 1..10, Sigma = L, T = 2.
// Gates A4 (interpolation-family condition) and A5 (wave-number sweep).
// ---------------------------------------------------------------------------
ExperimentResult run_ex1(const RunOptions& opt) {
  ExperimentResult result;
  result.id = "ex1-wave-1d";
  const std::string dir = outdir_for(opt, result.id);
  const GridSpec grid = grid_1d(-8.0, 8.0, 201, false);
  const double T = 2.0;

  FamilySpec family;
  family.equation = Equation::Wave;
  family.wave_numbers = scalar_ks(1, 10);
  family.sigma2s = SigmaSet::linear();
  family.source = DataSource::Analytic;

  AssembleOptions aopt;
  aopt.lambda = 1.0 / 16.0;
  aopt.seed = opt.base_seed;
  const Dataset ds = assemble_siso(family, grid, {}, T, aopt);
  const std::string ds_path = dir + "/dataset.wpkd";
  save_dataset(ds, ds_path);
  result.artifacts.push_back(ds_path);

  NetworkConfig net;
  net.arch = Architecture::Fcnn;
  net.depth = 5;
  net.width = 100;
  net.activation = Activation::Tanh;
  net.input_dim = static_cast<int>(ds.inputs.cols());
  net.output_dim = static_cast<int>(ds.outputs.cols());

  TrainConfig tc;
  tc.epochs = 20000;
  tc.lr = 1e-3;
  tc.lr_decay = 0.5;
  tc.lr_decay_every = 5000;
  const std::vector<SeedModel> models = train_seeds(ds, net, tc, opt, dir, "tanh-L", result);

  // The ResNet configured per the comparison has the same parameter count.
  NetworkConfig resnet = net;
  resnet.arch = Architecture::Resnet;
  resnet.blocks = 2;
  resnet.block_depth = 2;
  result.notes.push_back(
      "parameter counts: fcnn=" + std::to_string(he_init(net, 1).parameter_count()) +
      " resnet(2 blocks, depth 2)=" + std::to_string(he_init(resnet, 1).parameter_count()));

  std::vector<TestCase> cases;
  const std::vector<std::pair<std::string, NamedCondition>> named = {
      {"wave-i", NamedCondition::WaveI},
      {"wave-ii", NamedCondition::WaveII},
      {"wave-iii", NamedCondition::WaveIII}};
  for (const auto& [name, id] : named) {
    TestCase c;
    c.name = name;
    c.initial = named_initial(id, grid);
    c.reference.push_back({named_wave_reference(id, grid, T), {}});
    cases.push_back(std::move(c));
  }
  for (double kt : {10.025, 10.05}) {
    TestCase c;
    c.name = "wave-iv(k=" + std::to_string(kt).substr(0, 6) + ")";
    c.initial = named_initial(NamedCondition::WaveIV, grid, kt);
    c.reference.push_back({named_wave_reference(NamedCondition::WaveIV, grid, T, kt), {}});
    cases.push_back(std::move(c));
  }

  const auto medians =
      evaluate_cases(models, ds, cases, result.id, "tanh", "L", "1:10", result.rows);

  result.gates.push_back(make_gate(
      "A4", "1D wave tanh FCNN, condition wave-i at T=2, median relative error",
      medians[0][0].u_or_p, 1e-2));
  result.gates.push_back(make_gate("A5a", "wave-number sweep, k=10.025 median error",
                                   medians[3][0].u_or_p, 5e-2));
  result.gates.push_back(make_gate("A5b", "wave-number sweep, k=10.05 median error",
                                   medians[4][0].u_or_p, 5e-2));
  result.gates.push_back(make_gate("A5c",
                                   "wave-number sweep growth (err(10.05) - err(10.025) >= 0)",
                                   medians[4][0].u_or_p - medians[3][0].u_or_p, 0.0, true));
  return result;
}

// ---------------------------------------------------------------------------
// ex2-wave-highd: wave equation in d >= 3 sampled on the xy cross-section.
// Smoke gate at d=3.
// ---------------------------------------------------------------------------
ExperimentResult run_ex2(const RunOptions& opt) {
  ExperimentResult result;
  result.id = "ex2-wave-highd";
  const std::string dir = outdir_for(opt, result.id);
  const bool paper = opt.scale == "paper";
  const int n = paper ? 64 : 32;
  const int d = paper ? 8 : 3;
  const GridSpec grid = grid_2d(-4.0, 4.0, n, false);
  const double T = 0.5;

  FamilySpec family;
  family.equation = Equation::Wave;
  family.wave_numbers = pair_ks(1, 5, d);
  family.sigma2s = SigmaSet::linear();
  family.source = DataSource::Analytic;

  AssembleOptions aopt;
  aopt.lambda = 1.0 / 16.0;
  aopt.seed = opt.base_seed;
  const Dataset ds = assemble_siso(family, grid, {}, T, aopt);
  const std::string ds_path = dir + "/dataset.wpkd";
  save_dataset(ds, ds_path);
  result.artifacts.push_back(ds_path);

  NetworkConfig net;
  net.depth = 5;
  net.width = 100;
  net.activation = Activation::Tanh;
  net.input_dim = static_cast<int>(ds.inputs.cols());
  net.output_dim = static_cast<int>(ds.outputs.cols());

  TrainConfig tc;
  tc.epochs = paper ? 40000 : 5000;
  tc.lr = 1e-3;
  tc.lr_decay = 0.5;
  tc.lr_decay_every = 5000;
  const std::vector<SeedModel> models = train_seeds(ds, net, tc, opt, dir, "tanh-L", result);

  WavePacketSpec test_packet;
  test_packet.k = std::vector<double>{2.0, 2.0};
  test_packet.k.resize(d, 1.0);
  test_packet.sigma2 = 0.5;
  test_packet.equation = Equation::Wave;

  TestCase c;
  c.name = "packet(k=(2,2,1..),2s2=1)";
  c.initial = wave_packet_initial(test_packet, grid);
  c.reference.push_back({wave_packet_evolved(test_packet, grid, T), {}});
  const auto medians = evaluate_cases(models, ds, {c}, result.id, "tanh", "L",
                                      "{1..5}^2 tail 1, d=" + std::to_string(d), result.rows);

  result.gates.push_back(make_gate("EX2", "high-d wave smoke run (d=3 cross-section), median error",
                                   medians[0][0].u_or_p, 1e-1));
  return result;
}

// ---------------------------------------------------------------------------
// ex3-schr-linear: 1D linear Schroedinger, T = 0.2, activation/width cells.
// Gate A6 passes when at least one {tanh, elu} x {E:0.5, L} cell reaches the
// density threshold; cells run in order and stop at the first pass.
// ---------------------------------------------------------------------------
ExperimentResult run_ex3_linear(const RunOptions& opt) {
  ExperimentResult result;
  result.id = "ex3-schr-linear";
  const std::string dir = outdir_for(opt, result.id);
  const GridSpec grid = grid_1d(-8.0, 8.0, 201, false);
  const double T = 0.2;
  const double coeff = resolved_kinetic_coeff();
  result.notes.push_back("analytic kernels matched the spectral solver with kinetic coefficient " +
                         std::to_string(coeff));

  struct Cell {
    Activation act;
    std::string act_name;
    std::vector<double> sigmas;
    std::string sigma_name;
  };
  const std::vector<Cell> cells = {
      {Activation::Tanh, "tanh", SigmaSet::linear(), "L"},
      {Activation::Elu, "elu", SigmaSet::exponential(0.5), "E:0.5"},
      {Activation::Tanh, "tanh", SigmaSet::exponential(0.5), "E:0.5"},
      {Activation::Elu, "elu", SigmaSet::linear(), "L"},
  };

  double best = std::numeric_limits<double>::infinity();
  std::string best_cell = "none";
  for (const auto& cell : cells) {
    FamilySpec family;
    family.equation = Equation::SchrodingerLinear;
    family.wave_numbers = scalar_ks(1, 10);
    family.sigma2s = cell.sigmas;
    family.source = DataSource::Analytic;
    family.model.beta = 0.0;
    family.model.kinetic_coeff = coeff;

    AssembleOptions aopt;
    aopt.lambda = 0.25;
    aopt.seed = opt.base_seed;
    const Dataset ds = assemble_siso(family, grid, {}, T, aopt);
    const std::string label = cell.act_name + "-" + (cell.sigma_name == "E:0.5" ? "E0.5" : "L");
    const std::string ds_path = dir + "/dataset-" + label + ".wpkd";
    save_dataset(ds, ds_path);
    result.artifacts.push_back(ds_path);

    NetworkConfig net;
    net.depth = 5;
    net.width = 100;
    net.activation = cell.act;
    net.input_dim = static_cast<int>(ds.inputs.cols());
    net.output_dim = static_cast<int>(ds.outputs.cols());

    TrainConfig tc;
    tc.epochs = 20000;
    tc.lr = 1e-3;
    tc.lr_decay = 0.5;
    tc.lr_decay_every = 5000;
    const std::vector<SeedModel> models = train_seeds(ds, net, tc, opt, dir, label, result);

    std::vector<TestCase> cases;
    for (const auto id : {NamedCondition::SchrI, NamedCondition::SchrII}) {
      TestCase c;
      c.name = to_string(id);
      c.initial = named_initial(id, grid);
      c.reference.push_back(schrodinger_linear_evolved(packet_of(id), grid, T));
      cases.push_back(std::move(c));
    }
    const auto medians = evaluate_cases(models, ds, cases, result.id, cell.act_name,
                                        cell.sigma_name, "1:10", result.rows);
    const double rho = medians[0][0].rho;
    say(opt, "  [" + label + "] median density error " + std::to_string(rho));
    if (rho < best) {
      best = rho;
      best_cell = label;
    }
    if (best <= 2e-2) break;  // the gate asks for at least one passing cell
  }

  result.notes.push_back("best cell: " + best_cell);
  result.gates.push_back(make_gate(
      "A6", "1D linear Schroedinger, schr-i at T=0.2, best-cell median density error", best, 2e-2));
  return result;
}

// ---------------------------------------------------------------------------
// ex3-schr-simo: SIMO network over [0, 3]; absorbing-property diagnostics.
// ---------------------------------------------------------------------------
ExperimentResult run_ex3_simo(const RunOptions& opt) {
  ExperimentResult result;
  result.id = "ex3-schr-simo";
  const std::string dir = outdir_for(opt, result.id);
  const GridSpec grid = grid_1d(-8.0, 8.0, 201, false);
  const bool paper = opt.scale == "paper";
  const int nt = paper ? 51 : 26;
  const std::vector<double> times = linspace(0.0, 3.0, nt);
  const double coeff = resolved_kinetic_coeff();

  FamilySpec family;
  family.equation = Equation::SchrodingerLinear;
  family.wave_numbers = scalar_ks(1, 10);
  family.sigma2s = SigmaSet::linear();
  family.source = DataSource::Analytic;
  family.model.beta = 0.0;
  family.model.kinetic_coeff = coeff;

  AssembleOptions aopt;
  aopt.lambda = 0.25;
  aopt.seed = opt.base_seed;
  const Dataset ds = assemble_simo(family, grid, {}, times, aopt);
  const std::string ds_path = dir + "/dataset.wpkd";
  save_dataset(ds, ds_path);
  result.artifacts.push_back(ds_path);

  NetworkConfig net;
  net.depth = 5;
  net.width = 100;
  net.activation = Activation::Tanh;
  net.input_dim = static_cast<int>(ds.inputs.cols());
  net.output_dim = static_cast<int>(ds.outputs.cols());

  TrainConfig tc;
  tc.epochs = paper ? 20000 : 5000;
  tc.lr = 1e-3;
  tc.lr_decay = 0.5;
  tc.lr_decay_every = 5000;
  RunOptions one_seed = opt;
  one_seed.seeds = std::min(opt.seeds, paper ? opt.seeds : 1);
  const std::vector<SeedModel> models = train_seeds(ds, net, tc, one_seed, dir, "tanh-L", result);

  TestCase c;
  c.name = "schr-i";
  c.initial = named_initial(NamedCondition::SchrI, grid);
  for (double t : times)
    c.reference.push_back(schrodinger_linear_evolved(packet_of(NamedCondition::SchrI), grid, t));
  evaluate_cases(models, ds, {c}, result.id, "tanh", "L", "1:10", result.rows);

  // Absorbing diagnostic of the first seed's prediction.
  const Prediction pred = predict(models[0].params, ds, c.initial);
  const std::vector<AbsorbingRow> diag =
      absorbing_diagnostic(pred.snapshots, c.reference, times, grid, ds.mask);
  std::ofstream abs_out(dir + "/absorbing.csv", std::ios::trunc);
  abs_out << "time,pred_mass,ref_mass,mass_gap,reflection\n";
  abs_out.precision(12);
  for (const auto& row : diag)
    abs_out << row.time << ',' << row.pred_mass << ',' << row.ref_mass << ',' << row.mass_gap
            << ',' << row.reflection << '\n';
  result.artifacts.push_back(dir + "/absorbing.csv");
  result.notes.push_back("in-domain reference mass at T=3 is " +
                         std::to_string(diag.back().ref_mass / diag.front().ref_mass) +
                         " of its initial value (packet leaves the window)");
  return result;
}

// ---------------------------------------------------------------------------
// ex3-extrap-k: wave-number extrapolation for the linear Schroedinger map.
// ---------------------------------------------------------------------------
ExperimentResult run_ex3_extrap_k(const RunOptions& opt) {
  ExperimentResult result;
  result.id = "ex3-extrap-k";
  const std::string dir = outdir_for(opt, result.id);
  const GridSpec grid = grid_1d(-8.0, 8.0, 201, false);
  const double T = 0.2;
  const double coeff = resolved_kinetic_coeff();

  FamilySpec family;
  family.equation = Equation::SchrodingerLinear;
  family.wave_numbers = scalar_ks(1, 6);
  family.sigma2s = SigmaSet::linear();
  family.source = DataSource::Analytic;
  family.model.beta = 0.0;
  family.model.kinetic_coeff = coeff;

  AssembleOptions aopt;
  aopt.lambda = 0.5;
  aopt.seed = opt.base_seed;
  const Dataset ds = assemble_siso(family, grid, {}, T, aopt);
  save_dataset(ds, dir + "/dataset.wpkd");
  result.artifacts.push_back(dir + "/dataset.wpkd");

  NetworkConfig net;
  net.depth = 5;
  net.width = 100;
  net.activation = Activation::Elu;
  net.input_dim = static_cast<int>(ds.inputs.cols());
  net.output_dim = static_cast<int>(ds.outputs.cols());

  TrainConfig tc;
  tc.epochs = 20000;
  tc.lr = 1e-3;
  tc.lr_decay = 0.5;
  tc.lr_decay_every = 5000;
  const std::vector<SeedModel> models = train_seeds(ds, net, tc, opt, dir, "elu-L", result);

  std::vector<TestCase> cases;
  for (double kt : {6.0, 6.025, 6.05}) {
    TestCase c;
    c.name = "schr-iii(k=" + std::to_string(kt).substr(0, 5) + ")";
    WavePacketSpec packet = packet_of(NamedCondition::SchrIII, kt);
    c.initial = schrodinger_packet_initial(packet, grid);
    c.reference.push_back(schrodinger_linear_evolved(packet, grid, T));
    cases.push_back(std::move(c));
  }
  const auto medians =
      evaluate_cases(models, ds, cases, result.id, "elu", "L", "1:6", result.rows);

  const bool monotone = medians[1][0].rho <= medians[2][0].rho;
  result.notes.push_back(std::string("median density error is ") +
                         (monotone ? "non-decreasing" : "NOT non-decreasing") +
                         " along the wave-number sweep");
  return result;
}

// ---------------------------------------------------------------------------
// ex3-extrap-t: extrapolation in time via the time-conditioned map.
// Gates A7.
// ---------------------------------------------------------------------------
ExperimentResult run_ex3_extrap_t(const RunOptions& opt) {
  ExperimentResult result;
  result.id = "ex3-extrap-t";
  const std::string dir = outdir_for(opt, result.id);
  const GridSpec grid = grid_1d(-8.0, 8.0, 201, false);
  const std::vector<double> window = linspace(0.0, 0.6, 11);
  const double coeff = resolved_kinetic_coeff();

  FamilySpec family;
  family.equation = Equation::SchrodingerLinear;
  family.wave_numbers = scalar_ks(1, 6);
  family.sigma2s = SigmaSet::linear();
  family.source = DataSource::Analytic;
  family.model.beta = 0.0;
  family.model.kinetic_coeff = coeff;

  AssembleOptions aopt;
  aopt.lambda = 0.5;
  aopt.seed = opt.base_seed;
  const Dataset ds = assemble_time_conditioned(family, grid, {}, window, aopt);
  save_dataset(ds, dir + "/dataset.wpkd");
  result.artifacts.push_back(dir + "/dataset.wpkd");

  NetworkConfig net;
  net.depth = 5;
  net.width = 100;
  net.activation = Activation::Tanh;
  net.input_dim = static_cast<int>(ds.inputs.cols());
  net.output_dim = static_cast<int>(ds.outputs.cols());

  TrainConfig tc;
  tc.epochs = opt.scale == "paper" ? 20000 : 8000;
  tc.lr = 1e-3;
  tc.lr_decay = 0.5;
  tc.lr_decay_every = 5000;
  const std::vector<SeedModel> models = train_seeds(ds, net, tc, opt, dir, "tanh-L", result);

  const WavePacketSpec packet = packet_of(NamedCondition::SchrI);
  std::vector<TestCase> cases;
  for (double t : {0.6, 0.625, 0.65}) {
    TestCase c;
    c.name = "schr-i(T=" + std::to_string(t).substr(0, 5) + ")";
    c.initial = schrodinger_packet_initial(packet, grid);
    c.reference.push_back(schrodinger_linear_evolved(packet, grid, t));
    c.time_feature = t;
    cases.push_back(std::move(c));
  }
  const auto medians =
      evaluate_cases(models, ds, cases, result.id, "tanh", "L", "1:6", result.rows);

  result.gates.push_back(make_gate("A7a", "time extrapolation, T=0.625 median density error",
                                   medians[1][0].rho, 5e-2));
  result.gates.push_back(make_gate("A7b", "time extrapolation, T=0.65 median density error",
                                   medians[2][0].rho, 1e-1));
  result.gates.push_back(make_gate("A7c", "time extrapolation growth (err(0.65) - err(0.625) >= 0)",
                                   medians[2][0].rho - medians[1][0].rho, 0.0, true));
  return result;
}

// ---------------------------------------------------------------------------
// ex4-nls-1d: 1D cubic Schroedinger with spectral training data.
// ---------------------------------------------------------------------------
ExperimentResult run_ex4(const RunOptions& opt) {
  ExperimentResult result;
  result.id = "ex4-nls-1d";
  const std::string dir = outdir_for(opt, result.id);
  const bool paper = opt.scale == "paper";
  const double half = 16.0 * std::numbers::pi;
  const GridSpec grid = grid_1d(-half, half, paper ? 8192 : 1024, true);
  const double T = 1.0;

  FamilySpec family;
  family.equation = Equation::SchrodingerLinear;
  family.wave_numbers = scalar_ks(1, 10);
  family.sigma2s = SigmaSet::exponential(0.5);
  family.source = DataSource::Spectral;
  family.model.beta = -1.0;
  family.model.mu = 1;
  family.model.kinetic_coeff = resolved_kinetic_coeff();
  family.solver_steps = 1000;

  AssembleOptions aopt;
  aopt.lambda = 1.0;
  aopt.seed = opt.base_seed;
  say(opt, "  [ex4] generating spectral training data (60 solves)");
  const Dataset ds = assemble_siso(family, grid, {}, T, aopt);
  save_dataset(ds, dir + "/dataset.wpkd");
  result.artifacts.push_back(dir + "/dataset.wpkd");

  NetworkConfig net;
  net.depth = 5;
  net.width = 100;
  net.activation = Activation::Tanh;
  net.input_dim = static_cast<int>(ds.inputs.cols());
  net.output_dim = static_cast<int>(ds.outputs.cols());

  TrainConfig tc;
  tc.epochs = paper ? 20000 : 5000;
  tc.lr = 1e-3;
  tc.lr_decay = 0.5;
  tc.lr_decay_every = 5000;
  RunOptions one_seed = opt;
  one_seed.seeds = paper ? opt.seeds : std::min(opt.seeds, 1);
  const std::vector<SeedModel> models = train_seeds(ds, net, tc, one_seed, dir, "tanh-E0.5", result);

  std::vector<TestCase> cases;
  for (const auto id : {NamedCondition::NlsHat, NamedCondition::NlsSech,
                        NamedCondition::NlsTruncGauss, NamedCondition::NlsSquare}) {
    TestCase c;
    c.name = to_string(id);
    c.initial = named_initial(id, grid);
    c.reference = generate_from_initial(family, c.initial, grid, {T});
    cases.push_back(std::move(c));
  }
  evaluate_cases(models, ds, cases, result.id, "tanh", "E:0.5", "1:10", result.rows);
  return result;
}

// ---------------------------------------------------------------------------
// ex5-mu-sweep-cnfd: nonlinearity-power sweep with CNFD training data.
// ---------------------------------------------------------------------------
ExperimentResult run_ex5(const RunOptions& opt) {
  ExperimentResult result;
  result.id = "ex5-mu-sweep-cnfd";
  const std::string dir = outdir_for(opt, result.id);
  const GridSpec grid = grid_1d(-std::numbers::pi, std::numbers::pi, 50, false);
  const double T = 5e-4;

  for (int mu : {1, 2, 3}) {
    FamilySpec family;
    family.equation = Equation::SchrodingerLinear;
    family.wave_numbers = scalar_ks(1, 5);
    family.sigma2s = SigmaSet::linear();
    family.source = DataSource::Cnfd;
    family.model.beta = -1.0;
    family.model.mu = mu;
    family.solver_steps = 10;

    AssembleOptions aopt;
    aopt.lambda = 0.25;
    aopt.seed = opt.base_seed;
    const Dataset ds = assemble_siso(family, grid, {}, T, aopt);
    const std::string label = "mu" + std::to_string(mu);
    save_dataset(ds, dir + "/dataset-" + label + ".wpkd");
    result.artifacts.push_back(dir + "/dataset-" + label + ".wpkd");

    NetworkConfig net;
    net.depth = 5;
    net.width = 100;
    net.activation = Activation::Tanh;
    net.input_dim = static_cast<int>(ds.inputs.cols());
    net.output_dim = static_cast<int>(ds.outputs.cols());

    TrainConfig tc;
    tc.epochs = 20000;
    tc.lr = 1e-3;
    tc.lr_decay = 0.5;
    tc.lr_decay_every = 5000;
    RunOptions one_seed = opt;
    one_seed.seeds = std::min(opt.seeds, 1);
    const std::vector<SeedModel> models = train_seeds(ds, net, tc, one_seed, dir, label, result);

    TestCase c;
    c.name = "schr-i";
    c.initial = named_initial(NamedCondition::SchrI, grid);
    c.reference = generate_from_initial(family, c.initial, grid, {T});
    evaluate_cases(models, ds, {c}, result.id, "tanh", "L", "1:5 mu=" + std::to_string(mu),
                   result.rows);
  }
  return result;
}

// ---------------------------------------------------------------------------
// ex6-nls-potential: cubic NLS driven by a separable time-dependent
// potential; SIMO outputs at T = 1, 2, 3.
// ---------------------------------------------------------------------------
ExperimentResult run_ex6(const RunOptions& opt) {
  ExperimentResult result;
  result.id = "ex6-nls-potential";
  const std::string dir = outdir_for(opt, result.id);
  const bool paper = opt.scale == "paper";
  const double half = 16.0 * std::numbers::pi;
  const GridSpec grid = grid_1d(-half, half, paper ? 8192 : 1024, true);
  const std::vector<double> times = {1.0, 2.0, 3.0};

  Potential pot;
  pot.kind = Potential::Kind::Separable;
  pot.e0 = 1.0;
  pot.gamma = 1.0;
  pot.t0 = 0.0;
  pot.omega = 1.0;

  FamilySpec family;
  family.equation = Equation::SchrodingerLinear;
  family.wave_numbers = scalar_ks(1, 10);
  family.sigma2s = SigmaSet::exponential(0.5);
  family.source = DataSource::Spectral;
  family.model.beta = -1.0;
  family.model.mu = 1;
  family.model.potential = pot;
  family.model.kinetic_coeff = resolved_kinetic_coeff();
  family.solver_steps = 3000;

  AssembleOptions aopt;
  aopt.lambda = 1.0;
  aopt.seed = opt.base_seed;
  say(opt, "  [ex6] generating spectral training data with the external potential");
  const Dataset ds = assemble_simo(family, grid, {}, times, aopt);
  save_dataset(ds, dir + "/dataset.wpkd");
  result.artifacts.push_back(dir + "/dataset.wpkd");

  NetworkConfig net;
  net.depth = 5;
  net.width = 100;
  net.activation = Activation::Tanh;
  net.input_dim = static_cast<int>(ds.inputs.cols());
  net.output_dim = static_cast<int>(ds.outputs.cols());

  TrainConfig tc;
  tc.epochs = paper ? 20000 : 5000;
  tc.lr = 1e-3;
  tc.lr_decay = 0.5;
  tc.lr_decay_every = 5000;
  RunOptions one_seed = opt;
  one_seed.seeds = paper ? opt.seeds : std::min(opt.seeds, 1);
  const std::vector<SeedModel> models = train_seeds(ds, net, tc, one_seed, dir, "tanh-E0.5", result);

  TestCase c;
  c.name = "nls-sech";
  c.initial = named_initial(NamedCondition::NlsSech, grid);
  c.reference = generate_from_initial(family, c.initial, grid, times);
  evaluate_cases(models, ds, {c}, result.id, "tanh", "E:0.5", "1:10", result.rows);
  return result;
}

// ---------------------------------------------------------------------------
// ex7 / ex8: 2D cubic Schroedinger on the square, disk, and L-shape domains.
// Gates A10 (square) and A11 (masked domains).
// ---------------------------------------------------------------------------
ExperimentResult run_2d_nls(const RunOptions& opt, const std::string& id, MaskKind mask_kind) {
  ExperimentResult result;
  result.id = id;
  const std::string dir = outdir_for(opt, result.id);
  const bool paper = opt.scale == "paper";
  const double half = 2.0 * std::numbers::pi;
  const GridSpec grid = grid_2d(-half, half, paper ? 64 : 48, true);
  const double T = 1.0;

  MaskSpec mask_spec;
  mask_spec.kind = mask_kind;
  if (mask_kind == MaskKind::Disk) mask_spec.radius = half;

  FamilySpec family;
  family.equation = Equation::SchrodingerLinear;
  family.wave_numbers = pair_ks(1, 5, 2);
  family.sigma2s = arithmetic_sigmas(0.25, 6);
  family.source = DataSource::Spectral;
  family.model.beta = -1.0;
  family.model.mu = 1;
  family.model.kinetic_coeff = resolved_kinetic_coeff();
  family.solver_steps = 100;
  family.expand_factor = 2;

  AssembleOptions aopt;
  aopt.lambda = 1.0;
  aopt.seed = opt.base_seed;
  say(opt, "  [" + id + "] generating spectral training data on the expanded box (150 solves)");
  const Dataset ds = assemble_siso(family, grid, mask_spec, T, aopt);
  save_dataset(ds, dir + "/dataset.wpkd");
  result.artifacts.push_back(dir + "/dataset.wpkd");

  NetworkConfig net;
  net.depth = 4;
  net.width = 100;
  net.activation = Activation::Tanh;
  net.input_dim = static_cast<int>(ds.inputs.cols());
  net.output_dim = static_cast<int>(ds.outputs.cols());

  TrainConfig tc;
  tc.epochs = paper ? 40000 : 5000;
  tc.lr = 1e-3;
  tc.lr_decay = 0.5;
  tc.lr_decay_every = 5000;
  const std::vector<SeedModel> models = train_seeds(ds, net, tc, opt, dir, "tanh", result);

  TestCase c;
  c.name = "nls-2d";
  c.initial = named_initial(NamedCondition::Nls2D, grid);
  say(opt, "  [" + id + "] computing the expanded-domain reference");
  c.reference = generate_from_initial(family, c.initial, grid, {T});
  const auto medians = evaluate_cases(models, ds, {c}, result.id, "tanh", "0.25:1.5", "{1..5}^2",
                                      result.rows);

  const Prediction pred = predict(models[0].params, ds, c.initial);
  const std::vector<AbsorbingRow> diag =
      absorbing_diagnostic(pred.snapshots, c.reference, {T}, grid, ds.mask);
  result.notes.push_back("reflection indicator at T=1 (boundary shell): " +
                         std::to_string(diag[0].reflection));

  const std::string tag = id == "ex7-nls-2d" ? "A10" : "A11";
  const std::string where = mask_kind == MaskKind::Full
                                ? "square"
                                : (mask_kind == MaskKind::Disk ? "disk" : "L-shape");
  result.gates.push_back(
      make_gate(tag + "-rho", "2D cubic NLS (" + where + "), median density error at T=1",
                medians[0][0].rho, 5e-2));
  result.gates.push_back(make_gate(tag + "-p",
                                   "2D cubic NLS (" + where + "), median real-part error",
                                   medians[0][0].u_or_p, 5e-2));
  result.gates.push_back(make_gate(tag + "-q",
                                   "2D cubic NLS (" + where + "), median imag-part error",
                                   medians[0][0].q, 5e-2));

  if (mask_kind != MaskKind::Full) {
    // Masked pipeline round-trip: flatten then scatter reproduces the field
    // on included points exactly.
    const std::vector<double>& f = c.initial.first;
    const std::vector<double> rt = scatter_masked(flatten_masked(f, ds.mask), ds.mask);
    double max_diff = 0.0;
    for (std::int64_t i : ds.mask.included)
      max_diff = std::max(max_diff, std::abs(rt[i] - f[i]));
    result.gates.push_back(
        make_gate(tag + "-roundtrip", "masked flatten/scatter round-trip, max abs diff", max_diff,
                  0.0));
  }
  return result;
}

}  // namespace

std::string GateResult::line() const {
  char buf[512];
  std::snprintf(buf, sizeof buf, "[%s] %s %s: value=%.6g threshold=%.6g", pass ? "PASS" : "FAIL",
                gate.c_str(), description.c_str(), value, threshold);
  return buf;
}

bool ExperimentResult::all_passed() const {
  for (const auto& g : gates)
    if (!g.pass) return false;
  return true;
}

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {
      "ex1-wave-1d",     "ex2-wave-highd",  "ex3-schr-linear", "ex3-schr-simo",
      "ex3-extrap-k",    "ex3-extrap-t",    "ex4-nls-1d",      "ex5-mu-sweep-cnfd",
      "ex6-nls-potential", "ex7-nls-2d",    "ex8-disk",        "ex8-lshape",
  };
  return ids;
}

ExperimentResult run_experiment(const std::string& id, const RunOptions& options) {
  say(options, "[" + id + "] scale=" + options.scale + " seeds=" + std::to_string(options.seeds) +
                   " base-seed=" + std::to_string(options.base_seed));
  ExperimentResult result;
  if (id == "ex1-wave-1d") result = run_ex1(options);
  else if (id == "ex2-wave-highd") result = run_ex2(options);
  else if (id == "ex3-schr-linear") result = run_ex3_linear(options);
  else if (id == "ex3-schr-simo") result = run_ex3_simo(options);
  else if (id == "ex3-extrap-k") result = run_ex3_extrap_k(options);
  else if (id == "ex3-extrap-t") result = run_ex3_extrap_t(options);
  else if (id == "ex4-nls-1d") result = run_ex4(options);
  else if (id == "ex5-mu-sweep-cnfd") result = run_ex5(options);
  else if (id == "ex6-nls-potential") result = run_ex6(options);
  else if (id == "ex7-nls-2d") result = run_2d_nls(options, "ex7-nls-2d", MaskKind::Full);
  else if (id == "ex8-disk") result = run_2d_nls(options, "ex8-disk", MaskKind::Disk);
  else if (id == "ex8-lshape") result = run_2d_nls(options, "ex8-lshape", MaskKind::LShape);
  else {
    std::string valid;
    for (const auto& v : experiment_ids()) valid += v + " ";
    throw std::invalid_argument("unknown experiment id '" + id + "'; valid ids: " + valid);
  }

  const std::string report = options.outdir + "/" + id + "/report.csv";
  write_report_csv(result.rows, report);
  result.artifacts.push_back(report);

  for (const auto& note : result.notes) say(options, "  note: " + note);
  for (const auto& gate : result.gates) say(options, gate.line());
  return result;
}

}  // namespace wavemap
