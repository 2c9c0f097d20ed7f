// wavemap: data generation, reference solvers, training, evaluation, and
// one-command reproduction of the benchmark experiments.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wavemap/experiments.hpp"
#include "wavemap/io.hpp"
#include "wavemap/optim.hpp"

namespace {

using namespace wavemap;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Small single-token value parsers.  Every flag value is one token so that
// manifests stay flat `key = value` files that can be replayed via --config.
// ---------------------------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_real(const std::string& s) {
  // Accepts plain reals plus the "<r>pi" shorthand, e.g. "-16pi".
  if (s.size() > 2 && s.substr(s.size() - 2) == "pi")
    return std::stod(s.substr(0, s.size() - 2)) * std::numbers::pi;
  return std::stod(s);
}

// "a:b" (integer range), "a:b:s" (stride), or "v1,v2,..." -> list of reals.
std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() < 2 || parts.size() > 3)
      throw CLI::ValidationError("list", "expected lo:hi or lo:hi:step, got " + s);
    const double lo = parse_real(parts[0]);
    const double hi = parse_real(parts[1]);
    const double step = parts.size() == 3 ? parse_real(parts[2]) : 1.0;
    if (!(step > 0)) throw CLI::ValidationError("list", "step must be positive");
    for (double v = lo; v <= hi + 1e-12 * std::max(1.0, std::abs(hi)); v += step)
      out.push_back(v);
    return out;
  }
  for (const auto& tok : split(s, ',')) out.push_back(parse_real(tok));
  return out;
}

std::vector<double> parse_sigma_set(const std::string& s) {
  if (s == "L") return SigmaSet::linear();
  if (s.rfind("E:", 0) == 0) return SigmaSet::exponential(parse_real(s.substr(2)));
  return parse_list(s);
}

MaskSpec parse_mask(const std::string& s) {
  MaskSpec m;
  if (s == "full") return m;
  if (s.rfind("disk:", 0) == 0) {
    m.kind = MaskKind::Disk;
    m.radius = parse_real(s.substr(5));
    return m;
  }
  if (s == "lshape") {
    m.kind = MaskKind::LShape;
    return m;
  }
  throw CLI::ValidationError("--mask", "expected full, disk:R, or lshape, got " + s);
}

// ---------------------------------------------------------------------------
// Flat `key = value` config files; command-line flags override file values.
// ---------------------------------------------------------------------------
std::vector<std::string> load_config_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  std::vector<std::string> args;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string t) {
      const auto b = t.find_first_not_of(" \t\r");
      const auto e = t.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) continue;
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

void write_manifest(const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& config,
                    const std::vector<std::string>& artifacts, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "# wavemap manifest: " << command << "\n";
  out << "# replay with: wavemap " << command << " --config " << path << "\n";
  for (const auto& artifact : artifacts) {
    char crc[16];
    std::snprintf(crc, sizeof crc, "%08x", crc32_file(artifact));
    out << "# artifact " << artifact << " crc32 " << crc << " bytes "
        << fs::file_size(artifact) << "\n";
  }
  for (const auto& [k, v] : config) out << k << " = " << v << "\n";
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Thread cap honored by the training/evaluation loops (kept for the CLI
// contract; the pipelines are single-threaded per run).
int thread_cap() {
  if (const char* env = std::getenv("WAVEMAP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// ---------------------------------------------------------------------------
// gen-data
// ---------------------------------------------------------------------------
struct GenDataArgs {
  std::string equation = "wave";
  int dim = 1;
  std::string domain = "-8,8";
  int nx = 201;
  std::string mask = "full";
  std::string k_set = "1:10";
  std::string k_tail;  // high-d wave: pad (k1,k2) pairs to this many dims with 1s
  std::string sigma_set = "L";
  std::string kind = "siso";
  std::string times = "2";
  double lambda = 1.0;
  std::string rescale = "normalized";
  std::string granularity = "global";
  std::string source = "analytic";
  int mu = 1;
  int nt = 1000;
  int expand = 1;
  bool periodic = false;
  bool time_feature = false;
  std::string potential = "none";  // none | spatial | separable
  double e0 = 1.0, gamma = 1.0, t0c = 0.0, omega = 1.0;
  std::uint64_t seed = 1;
  std::string out;
};

void add_gen_data(CLI::App& app, GenDataArgs& a) {
  CLI::App* cmd = app.add_subcommand("gen-data", "Assemble a training/test dataset (WPKD)");
  cmd->add_option("--equation", a.equation, "wave | schr-linear | schr-cubic | schr-mu");
  cmd->add_option("--dim", a.dim, "spatial dimension of the sampling grid (1 or 2)");
  cmd->add_option("--domain", a.domain, "box per axis, lo,hi (accepts the Npi shorthand)");
  cmd->add_option("--nx", a.nx, "grid points per axis");
  cmd->add_option("--mask", a.mask, "full | disk:R | lshape");
  cmd->add_option("--k-set", a.k_set, "wave numbers, lo:hi or comma list");
  cmd->add_option("--k-tail", a.k_tail, "wave: total dimension, tail wave numbers fixed at 1");
  cmd->add_option("--sigma-set", a.sigma_set, "L | E:h | comma list of sigma^2");
  cmd->add_option("--kind", a.kind, "siso | simo | ximo");
  cmd->add_option("--times", a.times, "snapshot time(s): T, comma list, or lo:hi:step");
  cmd->add_option("--lambda", a.lambda, "rescaling parameter");
  cmd->add_option("--rescale", a.rescale, "normalized | literal | none");
  cmd->add_option("--rescale-granularity", a.granularity, "global | per-sample");
  cmd->add_option("--source", a.source, "analytic | spectral | cnfd");
  cmd->add_option("--mu", a.mu, "nonlinearity power for schr-mu");
  cmd->add_option("--nt", a.nt, "solver steps over [0, max time]");
  cmd->add_option("--expand", a.expand, "expanded-domain factor for spectral sources");
  cmd->add_flag("--periodic", a.periodic, "periodic sampling grid");
  cmd->add_flag("--time-feature", a.time_feature, "one SISO row per (sample, time), time appended");
  cmd->add_option("--potential", a.potential, "none | spatial | separable");
  cmd->add_option("--e0", a.e0, "potential modulation amplitude");
  cmd->add_option("--gamma", a.gamma, "potential Gaussian width");
  cmd->add_option("--t0c", a.t0c, "potential Gaussian center");
  cmd->add_option("--omega", a.omega, "potential carrier frequency");
  cmd->add_option("--seed", a.seed, "provenance seed");
  cmd->add_option("--out", a.out, "output WPKD path")->required();
}

int run_gen_data(const GenDataArgs& a) {
  GridSpec grid;
  grid.dim = a.dim;
  const auto dom = parse_list(a.domain);
  if (dom.size() != 2) throw CLI::ValidationError("--domain", "expected lo,hi");
  for (int i = 0; i < a.dim; ++i) {
    grid.lower.push_back(dom[0]);
    grid.upper.push_back(dom[1]);
    grid.points_per_axis.push_back(a.nx);
  }
  grid.periodic = a.periodic || a.source == "spectral";

  FamilySpec family;
  family.source = data_source_from_string(a.source);
  family.solver_steps = a.nt;
  family.expand_factor = a.expand;
  if (a.equation == "wave") {
    family.equation = Equation::Wave;
  } else {
    family.equation = Equation::SchrodingerLinear;
    if (a.equation == "schr-linear") {
      family.model.beta = 0.0;
    } else if (a.equation == "schr-cubic") {
      family.model.beta = -1.0;
      family.model.mu = 1;
    } else if (a.equation == "schr-mu") {
      family.model.beta = -1.0;
      family.model.mu = a.mu;
    } else {
      throw CLI::ValidationError("--equation", "unknown equation " + a.equation);
    }
  }
  if (a.equation == "schr-cubic" && a.source == "analytic")
    throw CLI::ValidationError("--source", "no analytic source for schr-cubic");

  if (a.potential != "none") {
    Potential pot;
    pot.kind = a.potential == "separable" ? Potential::Kind::Separable
                                          : Potential::Kind::SpatialOnly;
    pot.e0 = a.e0;
    pot.gamma = a.gamma;
    pot.t0 = a.t0c;
    pot.omega = a.omega;
    family.model.potential = pot;
  }

  const std::vector<double> kvals = parse_list(a.k_set);
  if (grid.dim == 1) {
    for (double k : kvals) family.wave_numbers.push_back({k});
  } else {
    const int full_dim = a.k_tail.empty() ? grid.dim : std::stoi(a.k_tail);
    for (double k1 : kvals)
      for (double k2 : kvals) {
        std::vector<double> k{k1, k2};
        k.resize(full_dim, 1.0);
        family.wave_numbers.push_back(std::move(k));
      }
  }
  family.sigma2s = parse_sigma_set(a.sigma_set);

  AssembleOptions aopt;
  aopt.rescale = rescale_mode_from_string(a.rescale);
  aopt.granularity = rescale_granularity_from_string(a.granularity);
  aopt.lambda = a.lambda;
  aopt.seed = a.seed;

  const std::vector<double> times = parse_list(a.times);
  const MaskSpec mask = parse_mask(a.mask);

  Dataset ds;
  const std::string kind = a.kind;
  if (kind == "siso" && !a.time_feature) {
    if (times.size() != 1) throw CLI::ValidationError("--times", "siso takes a single time");
    ds = assemble_siso(family, grid, mask, times[0], aopt);
  } else if (kind == "simo" && !a.time_feature) {
    ds = assemble_simo(family, grid, mask, times, aopt);
  } else if (a.time_feature) {
    ds = assemble_time_conditioned(family, grid, mask, times, aopt);
  } else if (kind == "ximo") {
    XimoFamily xf;
    xf.base_model = family.model;
    xf.base_model.potential.reset();
    xf.solver_steps = a.nt;
    xf.expand_factor = a.expand;
    // One sample per E0; the remaining modulation parameters are shared.
    for (double e0 : parse_list(std::to_string(a.e0))) {
      Potential pot;
      pot.kind = Potential::Kind::Separable;
      pot.e0 = e0;
      pot.gamma = a.gamma;
      pot.t0 = a.t0c;
      pot.omega = a.omega;
      xf.potentials.push_back(pot);
    }
    WavePacketSpec ground;
    ground.k = std::vector<double>(grid.dim, 0.0);
    ground.sigma2 = 1.0;
    ground.equation = Equation::SchrodingerLinear;
    ds = assemble_ximo(xf, schrodinger_packet_initial(ground, grid), grid, mask, times, aopt);
  } else {
    throw CLI::ValidationError("--kind", "unknown dataset kind " + kind);
  }

  save_dataset(ds, a.out);
  write_manifest("gen-data",
                 {{"equation", a.equation},
                  {"dim", std::to_string(a.dim)},
                  {"domain", a.domain},
                  {"nx", std::to_string(a.nx)},
                  {"mask", a.mask},
                  {"k-set", a.k_set},
                  {"sigma-set", a.sigma_set},
                  {"kind", a.kind},
                  {"times", a.times},
                  {"lambda", format_real(a.lambda)},
                  {"rescale", a.rescale},
                  {"rescale-granularity", a.granularity},
                  {"source", a.source},
                  {"mu", std::to_string(a.mu)},
                  {"nt", std::to_string(a.nt)},
                  {"expand", std::to_string(a.expand)},
                  {"seed", std::to_string(a.seed)},
                  {"out", a.out}},
                 {a.out}, a.out + ".manifest");
  std::printf("wrote %s (%lld rows, m1=%lld, m2=%lld)\n", a.out.c_str(),
              static_cast<long long>(ds.samples()), static_cast<long long>(ds.inputs.cols()),
              static_cast<long long>(ds.outputs.cols()));
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------
struct TrainArgs {
  std::string dataset;
  std::string net = "fcnn";
  int depth = 5;
  int width = 100;
  int blocks = 2;
  int block_depth = 2;
  std::string activation = "tanh";
  int epochs = 20000;
  double lr = 1e-3;
  double lr_decay = 0.5;
  int lr_decay_every = 5000;
  int lbfgs_iters = 0;
  int checkpoint_every = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  std::uint64_t seed = 1;
  std::string out;
};

void add_train(CLI::App& app, TrainArgs& a) {
  CLI::App* cmd = app.add_subcommand("train", "Train a network on a dataset (WPKM + loss CSV)");
  cmd->add_option("--dataset", a.dataset, "input WPKD path")->required();
  cmd->add_option("--net", a.net, "fcnn | resnet");
  cmd->add_option("--depth", a.depth, "node layers (fcnn) or block depth D_i (resnet)");
  cmd->add_option("--width", a.width, "hidden width M");
  cmd->add_option("--blocks", a.blocks, "residual blocks (resnet)");
  cmd->add_option("--activation", a.activation, "relu | tanh | sigmoid | elu");
  cmd->add_option("--epochs", a.epochs, "training epochs (full-batch steps)");
  cmd->add_option("--lr", a.lr, "Adam learning rate");
  cmd->add_option("--lr-decay", a.lr_decay, "stepwise decay factor");
  cmd->add_option("--lr-decay-every", a.lr_decay_every, "epochs between decays (0 = off)");
  cmd->add_option("--lbfgs-iters", a.lbfgs_iters, "L-BFGS refinement iterations (0 = off)");
  cmd->add_option("--checkpoint-every", a.checkpoint_every, "checkpoint cadence in epochs");
  cmd->add_option("--adam-beta1", a.adam_beta1, "Adam first-moment decay");
  cmd->add_option("--adam-beta2", a.adam_beta2, "Adam second-moment decay");
  cmd->add_option("--seed", a.seed, "initialization seed");
  cmd->add_option("--out", a.out, "output WPKM path")->required();
}

int run_train(const TrainArgs& a) {
  const Dataset ds = load_dataset(a.dataset);
  NetworkConfig net;
  net.arch = architecture_from_string(a.net);
  net.width = a.width;
  net.activation = activation_from_string(a.activation);
  net.input_dim = static_cast<int>(ds.inputs.cols());
  net.output_dim = static_cast<int>(ds.outputs.cols());
  if (net.arch == Architecture::Fcnn) {
    net.depth = a.depth;
  } else {
    net.blocks = a.blocks;
    net.block_depth = a.depth;
  }

  TrainConfig tc;
  tc.epochs = a.epochs;
  tc.lr = a.lr;
  tc.lr_decay = a.lr_decay;
  tc.lr_decay_every = a.lr_decay_every;
  tc.lbfgs_iters = a.lbfgs_iters;
  tc.seed = a.seed;
  tc.checkpoint_every = a.checkpoint_every;
  tc.checkpoint_prefix = a.out;
  tc.adam.beta1 = a.adam_beta1;
  tc.adam.beta2 = a.adam_beta2;

  const TrainResult tr = train(tc, ds.inputs, ds.outputs, he_init(net, a.seed));
  nlohmann::json info{{"dataset", a.dataset},
                      {"dataset_crc32", crc32_file(a.dataset)},
                      {"epochs", a.epochs},
                      {"lr", a.lr},
                      {"lr_decay", a.lr_decay},
                      {"lr_decay_every", a.lr_decay_every},
                      {"lbfgs_iters", a.lbfgs_iters},
                      {"param_count", tr.params.parameter_count()},
                      {"final_loss", tr.loss_history.empty() ? 0.0 : tr.loss_history.back()}};
  save_model(tr.params, a.seed, info, a.out);
  write_loss_csv(tr.loss_history, a.out + ".loss.csv");
  write_manifest("train",
                 {{"dataset", a.dataset},
                  {"net", a.net},
                  {"depth", std::to_string(a.depth)},
                  {"width", std::to_string(a.width)},
                  {"blocks", std::to_string(a.blocks)},
                  {"activation", a.activation},
                  {"epochs", std::to_string(a.epochs)},
                  {"lr", format_real(a.lr)},
                  {"lr-decay", format_real(a.lr_decay)},
                  {"lr-decay-every", std::to_string(a.lr_decay_every)},
                  {"lbfgs-iters", std::to_string(a.lbfgs_iters)},
                  {"seed", std::to_string(a.seed)},
                  {"out", a.out}},
                 {a.out, a.out + ".loss.csv"}, a.out + ".manifest");
  std::printf("wrote %s (parameters: %lld, final loss %.6e)\n", a.out.c_str(),
              static_cast<long long>(tr.params.parameter_count()),
              tr.loss_history.empty() ? 0.0 : tr.loss_history.back());
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------
struct EvalArgs {
  std::string model;
  std::string dataset;
  std::string condition;  // named test condition; empty = dataset rows
  double ktilde = 0.0;
  std::string reference = "analytic";  // analytic | spectral-large | cnfd
  int expand = 2;
  int nt = 1000;
  std::string out;
  std::string dump_fields;  // optional WPKF prefix
};

void add_eval(CLI::App& app, EvalArgs& a) {
  CLI::App* cmd = app.add_subcommand("eval", "Evaluate a model (CSV report)");
  cmd->add_option("--model", a.model, "WPKM path")->required();
  cmd->add_option("--dataset", a.dataset, "WPKD path (layout + rescale record)")->required();
  cmd->add_option("--condition", a.condition, "named test condition (default: dataset rows)");
  cmd->add_option("--ktilde", a.ktilde, "wave number for wave-iv / schr-iii");
  cmd->add_option("--reference", a.reference, "analytic | spectral-large | cnfd");
  cmd->add_option("--expand", a.expand, "expansion factor for spectral-large");
  cmd->add_option("--nt", a.nt, "solver steps for numeric references");
  cmd->add_option("--out", a.out, "output CSV path")->required();
  cmd->add_option("--dump-fields", a.dump_fields, "WPKF dump prefix for predictions");
}

int run_eval(const EvalArgs& a) {
  const LoadedModel model = load_model(a.model);
  const Dataset ds = load_dataset(a.dataset);
  std::vector<ErrorRow> rows;

  auto make_row = [&](const std::string& condition, double t, const ComponentErrors& e) {
    ErrorRow row;
    row.experiment_id = "eval";
    row.equation = to_string(ds.equation);
    row.activation = to_string(model.params.config.activation);
    row.sigma_set = "-";
    row.k_set = "-";
    row.lambda = ds.rescale.lambda;
    row.seed = static_cast<std::int64_t>(model.seed);
    row.test_condition = condition;
    row.snapshot_time = t;
    row.errors = e;
    return row;
  };

  if (a.condition.empty()) {
    // Per-row errors of the model against the dataset's own outputs.
    BatchEvaluator eval;
    const RowMatrix& pred = eval.forward(model.params, ds.inputs);
    const std::int64_t snap_w = ds.per_snapshot_width();
    for (std::int64_t r = 0; r < ds.samples(); ++r) {
      for (std::size_t s = 0; s < ds.times.size() && (!ds.time_feature || s == 0); ++s) {
        const std::int64_t off = s * snap_w;
        ComponentErrors e;
        if (ds.equation == Equation::Wave) {
          std::vector<double> pu(snap_w), ru(snap_w);
          for (std::int64_t i = 0; i < snap_w; ++i) {
            pu[i] = pred(r, off + i);
            ru[i] = ds.outputs(r, off + i);
          }
          e = wave_errors(pu, ru);
        } else {
          const std::int64_t nm = ds.masked_points();
          std::vector<double> pp(nm), pq(nm), rp(nm), rq(nm);
          for (std::int64_t i = 0; i < nm; ++i) {
            pp[i] = pred(r, off + i);
            pq[i] = pred(r, off + nm + i);
            rp[i] = ds.outputs(r, off + i);
            rq[i] = ds.outputs(r, off + nm + i);
          }
          e = schrodinger_errors(pp, pq, rp, rq);
        }
        rows.push_back(make_row("dataset-row-" + std::to_string(r),
                                ds.time_feature ? 0.0 : ds.times[s], e));
      }
    }
  } else {
    const NamedCondition id = named_condition_from_string(a.condition);
    const FieldPair initial = named_initial(id, ds.grid, a.ktilde);

    std::vector<FieldPair> reference;
    if (a.reference == "analytic") {
      for (double t : ds.times) {
        if (ds.equation == Equation::Wave)
          reference.push_back({named_wave_reference(id, ds.grid, t, a.ktilde), {}});
        else
          reference.push_back(schrodinger_linear_evolved(packet_of(id, a.ktilde), ds.grid, t));
      }
    } else {
      FamilySpec family;
      family.equation = Equation::SchrodingerLinear;
      family.wave_numbers = {{1.0}};
      family.sigma2s = {1.0};
      family.source = a.reference == "cnfd" ? DataSource::Cnfd : DataSource::Spectral;
      family.model.beta = -1.0;
      family.model.mu = 1;
      family.expand_factor = a.reference == "spectral-large" ? a.expand : 1;
      family.solver_steps = a.nt;
      reference = generate_from_initial(family, initial, ds.grid, ds.times);
    }

    const Prediction pred = predict(model.params, ds, initial);
    const std::vector<ComponentErrors> errors =
        evaluate_prediction(pred, reference, ds.equation, ds.mask);
    for (std::size_t s = 0; s < errors.size(); ++s)
      rows.push_back(make_row(a.condition, ds.times[s], errors[s]));

    if (!a.dump_fields.empty()) {
      save_fields(pred.snapshots, ds.grid, ds.times, {{"kind", "prediction"}},
                  a.dump_fields + "-pred.wpkf");
      save_fields(reference, ds.grid, ds.times, {{"kind", "reference"}},
                  a.dump_fields + "-ref.wpkf");
    }
  }

  write_report_csv(rows, a.out);
  write_manifest("eval",
                 {{"model", a.model},
                  {"dataset", a.dataset},
                  {"condition", a.condition.empty() ? std::string("-") : a.condition},
                  {"reference", a.reference},
                  {"out", a.out}},
                 {a.out}, a.out + ".manifest");
  std::printf("wrote %s (%zu rows)\n", a.out.c_str(), rows.size());
  return 0;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------
struct SolveArgs {
  std::string equation = "schr-cubic";
  std::string solver = "spectral";
  std::string domain = "-16pi,16pi";
  int dim = 1;
  int nx = 1024;
  double T = 1.0;
  int nt = 1000;
  int mu = 1;
  double kinetic = 1.0;
  std::string init = "packet:6:1";  // packet:k:sigma2 or a named condition
  std::string snapshots;            // defaults to T
  int expand = 1;
  std::string potential = "none";
  double e0 = 1.0, gamma = 1.0, t0c = 0.0, omega = 1.0;
  std::string out;
};

void add_solve(CLI::App& app, SolveArgs& a) {
  CLI::App* cmd = app.add_subcommand("solve", "Run a reference solver (WPKF snapshots)");
  cmd->add_option("--equation", a.equation, "schr-linear | schr-cubic | schr-mu");
  cmd->add_option("--solver", a.solver, "spectral | cnfd");
  cmd->add_option("--domain", a.domain, "box per axis, lo,hi");
  cmd->add_option("--dim", a.dim, "1 or 2 (spectral only)");
  cmd->add_option("--nx", a.nx, "grid points per axis");
  cmd->add_option("--T", a.T, "final time");
  cmd->add_option("--nt", a.nt, "time steps");
  cmd->add_option("--mu", a.mu, "nonlinearity power");
  cmd->add_option("--kinetic", a.kinetic, "kinetic coefficient c in i u_t = -c Lap u + ...");
  cmd->add_option("--init", a.init, "packet:k:sigma2 or a named condition id");
  cmd->add_option("--snapshots", a.snapshots, "comma list of snapshot times (default: T)");
  cmd->add_option("--expand", a.expand, "solve on the expanded box, restrict to the domain");
  cmd->add_option("--potential", a.potential, "none | spatial | separable");
  cmd->add_option("--e0", a.e0, "potential amplitude");
  cmd->add_option("--gamma", a.gamma, "potential Gaussian width");
  cmd->add_option("--t0c", a.t0c, "potential Gaussian center");
  cmd->add_option("--omega", a.omega, "potential carrier frequency");
  cmd->add_option("--out", a.out, "output WPKF path")->required();
}

int run_solve(const SolveArgs& a) {
  GridSpec grid;
  grid.dim = a.dim;
  const auto dom = parse_list(a.domain);
  if (dom.size() != 2) throw CLI::ValidationError("--domain", "expected lo,hi");
  for (int i = 0; i < a.dim; ++i) {
    grid.lower.push_back(dom[0]);
    grid.upper.push_back(dom[1]);
    grid.points_per_axis.push_back(a.nx);
  }
  grid.periodic = a.solver == "spectral";

  SolverRun run;
  run.grid = grid;
  run.time = {0.0, a.T, a.nt};
  run.model.beta = a.equation == "schr-linear" ? 0.0 : -1.0;
  run.model.mu = a.mu;
  run.model.kinetic_coeff = a.kinetic;
  if (a.potential != "none") {
    Potential pot;
    pot.kind = a.potential == "separable" ? Potential::Kind::Separable
                                          : Potential::Kind::SpatialOnly;
    pot.e0 = a.e0;
    pot.gamma = a.gamma;
    pot.t0 = a.t0c;
    pot.omega = a.omega;
    run.model.potential = pot;
  }

  if (a.init.rfind("packet:", 0) == 0) {
    const auto parts = split(a.init, ':');
    if (parts.size() != 3) throw CLI::ValidationError("--init", "expected packet:k:sigma2");
    WavePacketSpec packet;
    packet.k = std::vector<double>(grid.dim, parse_real(parts[1]));
    packet.sigma2 = parse_real(parts[2]);
    packet.equation = Equation::SchrodingerLinear;
    run.initial = schrodinger_packet_initial(packet, grid);
  } else {
    run.initial = named_initial(named_condition_from_string(a.init), grid);
  }

  run.snapshot_times = a.snapshots.empty() ? std::vector<double>{a.T} : parse_list(a.snapshots);

  std::vector<FieldPair> snaps;
  if (a.solver == "spectral") {
    snaps = a.expand > 1 ? reference_on_larger_domain(run, a.expand) : solve_nls(run);
  } else if (a.solver == "cnfd") {
    snaps = solve_cnfd(run);
  } else {
    throw CLI::ValidationError("--solver", "unknown solver " + a.solver);
  }

  save_fields(snaps, grid, run.snapshot_times,
              {{"equation", a.equation},
               {"solver", a.solver},
               {"mu", a.mu},
               {"kinetic", a.kinetic},
               {"expand", a.expand}},
              a.out);
  write_manifest("solve",
                 {{"equation", a.equation},
                  {"solver", a.solver},
                  {"domain", a.domain},
                  {"dim", std::to_string(a.dim)},
                  {"nx", std::to_string(a.nx)},
                  {"T", format_real(a.T)},
                  {"nt", std::to_string(a.nt)},
                  {"mu", std::to_string(a.mu)},
                  {"kinetic", format_real(a.kinetic)},
                  {"init", a.init},
                  {"expand", std::to_string(a.expand)},
                  {"out", a.out}},
                 {a.out}, a.out + ".manifest");
  std::printf("wrote %s (%zu snapshots)\n", a.out.c_str(), snaps.size());
  return 0;
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------
struct ReproduceArgs {
  std::string id;
  std::string scale = "desk";
  int seeds = 3;
  std::uint64_t seed = 1;
  int epochs_override = 0;
  std::string outdir = "out";
};

void add_reproduce(CLI::App& app, ReproduceArgs& a) {
  CLI::App* cmd = app.add_subcommand("reproduce", "Run one benchmark experiment end to end");
  std::string ids;
  for (const auto& id : experiment_ids()) ids += id + " ";
  cmd->add_option("--id", a.id, "experiment id; one of: " + ids)->required();
  cmd->add_option("--scale", a.scale, "desk | paper");
  cmd->add_option("--seeds", a.seeds, "seeds for median reporting");
  cmd->add_option("--seed", a.seed, "base seed");
  cmd->add_option("--epochs", a.epochs_override, "override every training phase's epochs");
  cmd->add_option("--outdir", a.outdir, "output directory");
}

int run_reproduce(const ReproduceArgs& a) {
  RunOptions opt;
  opt.scale = a.scale;
  opt.seeds = a.seeds;
  opt.base_seed = a.seed;
  opt.outdir = a.outdir;
  if (a.epochs_override > 0) opt.epochs_override = a.epochs_override;

  const ExperimentResult result = run_experiment(a.id, opt);

  std::vector<std::pair<std::string, std::string>> config{
      {"id", a.id},
      {"scale", a.scale},
      {"seeds", std::to_string(a.seeds)},
      {"seed", std::to_string(a.seed)},
      {"outdir", a.outdir}};
  if (a.epochs_override > 0) config.emplace_back("epochs", std::to_string(a.epochs_override));
  write_manifest("reproduce", config, result.artifacts, a.outdir + "/" + a.id + "/manifest");

  std::ofstream gates(a.outdir + "/" + a.id + "/gates.txt", std::ios::trunc);
  for (const auto& g : result.gates) gates << g.line() << "\n";
  return result.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavemap: learned initial-condition-to-solution maps for wave equations"};
  app.require_subcommand(1);
  (void)thread_cap();

  GenDataArgs gen_args;
  TrainArgs train_args;
  EvalArgs eval_args;
  SolveArgs solve_args;
  ReproduceArgs repro_args;
  add_gen_data(app, gen_args);
  add_train(app, train_args);
  add_eval(app, eval_args);
  add_solve(app, solve_args);
  add_reproduce(app, repro_args);

  // Flat key = value config files; explicit flags win.
  std::string config_path;
  for (auto* sub : app.get_subcommands({}))
    sub->add_option("--config", config_path, "flat key = value config file");

  std::vector<std::string> args(argv + 1, argv + argc);
  // Pre-scan for --config so its values can be injected before parsing.
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      try {
        const auto injected = load_config_args(args[i + 1]);
        args.erase(args.begin() + i, args.begin() + i + 2);
        args.insert(args.begin() + 1, injected.begin(), injected.end());
      } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
      }
      break;
    }
  }

  std::vector<const char*> cargs;
  cargs.push_back("wavemap");
  for (const auto& s : args) cargs.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit 2
  }

  try {
    if (app.got_subcommand("gen-data")) return run_gen_data(gen_args);
    if (app.got_subcommand("train")) return run_train(train_args);
    if (app.got_subcommand("eval")) return run_eval(eval_args);
    if (app.got_subcommand("solve")) return run_solve(solve_args);
    if (app.got_subcommand("reproduce")) return run_reproduce(repro_args);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
