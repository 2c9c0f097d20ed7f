#include "wavemap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wavemap/io.hpp"

namespace wavemap {

void FamilySpec::validate() const {
  if (wave_numbers.empty()) throw std::invalid_argument("family: empty wave-number set");
  if (sigma2s.empty()) throw std::invalid_argument("family: empty sigma set");
  for (const auto& k : wave_numbers)
    if (k.empty()) throw std::invalid_argument("family: empty wave number");
  for (double s : sigma2s)
    if (!(s > 0)) throw std::invalid_argument("family: sigma2 must be positive");
  if (equation == Equation::Wave && source != DataSource::Analytic)
    throw std::invalid_argument("family: wave-equation data is analytic only");
  if (equation == Equation::SchrodingerLinear && source == DataSource::Analytic &&
      model.beta != 0.0)
    throw std::invalid_argument("family: analytic source requires the linear model (beta = 0)");
  if (expand_factor < 1) throw std::invalid_argument("family: expand factor must be >= 1");
  if (solver_steps < 1) throw std::invalid_argument("family: solver steps must be positive");
}

std::pair<std::vector<double>, std::pair<double, double>> rescale_input(
    std::span<const double> row, RescaleMode mode, double lambda) {
  if (row.empty()) throw std::invalid_argument("rescale: empty row");
  if (!(lambda > 0)) throw std::invalid_argument("rescale: lambda must be positive");
  std::vector<double> out(row.begin(), row.end());
  if (mode == RescaleMode::None) {
    const auto [mn, mx] = std::minmax_element(row.begin(), row.end());
    return {std::move(out), {*mn, *mx}};
  }
  if (mode == RescaleMode::Normalized) {
    for (double& v : out) v *= lambda;
    const auto [mn, mx] = std::minmax_element(out.begin(), out.end());
    const double m = *mn, M = *mx;
    if (M == m)
      throw std::invalid_argument("rescale: constant input row cannot be min-max rescaled");
    const double scale = 2.0 / (M - m);
    for (double& v : out) v = scale * (v - m) - 1.0;
    return {std::move(out), {m, M}};
  }
  // Literal: the printed formula, min/max taken on the unscaled row.
  const auto [mn, mx] = std::minmax_element(row.begin(), row.end());
  const double m = *mn, M = *mx;
  if (M == m)
    throw std::invalid_argument("rescale: constant input row cannot be min-max rescaled");
  for (double& v : out) v = 2.0 * (lambda * v - m) / (M - m) - m;
  return {std::move(out), {m, M}};
}

std::int64_t Dataset::per_snapshot_width() const {
  return equation == Equation::Wave ? masked_points() : 2 * masked_points();
}

namespace {

// Snapshots that are all at t = 0 need no solver run.
bool all_zero_times(const std::vector<double>& times) {
  return std::all_of(times.begin(), times.end(), [](double t) { return t == 0.0; });
}

std::vector<FieldPair> replicate_initial(const FieldPair& initial, std::size_t count,
                                         bool wave) {
  std::vector<FieldPair> out(count, initial);
  if (wave)
    for (auto& f : out) f.second.clear();
  return out;
}

std::vector<FieldPair> restrict_snapshots(const std::vector<FieldPair>& big,
                                          const std::vector<std::int64_t>& embed) {
  std::vector<FieldPair> out(big.size());
  for (std::size_t s = 0; s < big.size(); ++s) {
    out[s].first.resize(embed.size());
    out[s].second.resize(embed.size());
    for (std::size_t i = 0; i < embed.size(); ++i) {
      out[s].first[i] = big[s].first[embed[i]];
      out[s].second[i] = big[s].second[embed[i]];
    }
  }
  return out;
}

TimeGrid solver_time_grid(const std::vector<double>& times, int steps) {
  TimeGrid tg;
  tg.t0 = 0.0;
  tg.T = *std::max_element(times.begin(), times.end());
  tg.steps = steps;
  return tg;
}

}  // namespace

SampleFields generate_sample(const FamilySpec& family, const WavePacketSpec& packet,
                             const GridSpec& grid, const std::vector<double>& times) {
  family.validate();
  if (times.empty()) throw std::invalid_argument("sample: no snapshot times");

  SampleFields out;
  if (family.equation == Equation::Wave) {
    out.initial = wave_packet_initial(packet, grid);
    out.snapshots.reserve(times.size());
    for (double t : times) out.snapshots.push_back({wave_packet_evolved(packet, grid, t), {}});
    return out;
  }

  out.initial = schrodinger_packet_initial(packet, grid);
  if (family.source == DataSource::Analytic) {
    out.snapshots.reserve(times.size());
    for (double t : times) out.snapshots.push_back(schrodinger_linear_evolved(packet, grid, t));
    return out;
  }
  if (all_zero_times(times)) {
    out.snapshots = replicate_initial(out.initial, times.size(), false);
    return out;
  }

  if (family.source == DataSource::Spectral) {
    SolverRun run;
    run.model = family.model;
    run.time = solver_time_grid(times, family.solver_steps);
    run.snapshot_times = times;
    if (family.expand_factor > 1) {
      // Evaluate the packet directly on the expanded box so Gaussian tails
      // beyond the data window are kept.
      run.grid = expanded_grid(grid, family.expand_factor);
      run.initial = schrodinger_packet_initial(packet, run.grid);
      const std::vector<std::int64_t> embed = embedding_indices(grid, run.grid);
      out.snapshots = restrict_snapshots(solve_nls(run), embed);
    } else {
      run.grid = grid;
      run.initial = out.initial;
      out.snapshots = solve_nls(run);
    }
    return out;
  }

  SolverRun run;
  run.grid = grid;
  run.model = family.model;
  run.time = solver_time_grid(times, family.solver_steps);
  run.snapshot_times = times;
  run.initial = out.initial;
  out.snapshots = solve_cnfd(run, family.cnfd);
  return out;
}

std::vector<FieldPair> generate_from_initial(const FamilySpec& family, const FieldPair& initial,
                                             const GridSpec& grid,
                                             const std::vector<double>& times) {
  family.validate();
  if (family.source == DataSource::Analytic)
    throw std::invalid_argument("generate_from_initial: analytic source needs a packet");
  if (all_zero_times(times)) return replicate_initial(initial, times.size(), false);

  SolverRun run;
  run.grid = grid;
  run.model = family.model;
  run.time = solver_time_grid(times, family.solver_steps);
  run.snapshot_times = times;
  run.initial = initial;
  if (family.source == DataSource::Spectral) {
    if (family.expand_factor > 1)
      return reference_on_larger_domain(run, family.expand_factor);
    return solve_nls(run);
  }
  return solve_cnfd(run, family.cnfd);
}

namespace {

void append_masked(std::vector<double>& row, std::span<const double> field,
                   const DomainMask& mask) {
  const std::vector<double> flat = flatten_masked(field, mask);
  row.insert(row.end(), flat.begin(), flat.end());
}

std::vector<double> input_row_of(const FieldPair& initial, const DomainMask& mask) {
  std::vector<double> row;
  row.reserve(2 * mask.included.size());
  append_masked(row, initial.first, mask);
  append_masked(row, initial.second, mask);
  return row;
}

std::vector<double> output_row_of(const std::vector<FieldPair>& snapshots, Equation eq,
                                  const DomainMask& mask) {
  std::vector<double> row;
  for (const auto& snap : snapshots) {
    append_masked(row, snap.first, mask);
    if (eq != Equation::Wave) append_masked(row, snap.second, mask);
  }
  return row;
}

nlohmann::json model_to_json(const NlsModel& m) {
  nlohmann::json j{{"beta", m.beta}, {"mu", m.mu}, {"kinetic_coeff", m.kinetic_coeff}};
  if (m.potential) {
    const Potential& p = *m.potential;
    j["potential"] = {{"kind", p.kind == Potential::Kind::SpatialOnly ? "spatial" : "separable"},
                      {"e0", p.e0},
                      {"gamma", p.gamma},
                      {"t0", p.t0},
                      {"omega", p.omega},
                      {"u_amp", p.u_amp}};
  }
  return j;
}

nlohmann::json family_provenance(const FamilySpec& family, const AssembleOptions& options) {
  return nlohmann::json{{"source", to_string(family.source)},
                        {"k_set", family.wave_numbers},
                        {"sigma2_set", family.sigma2s},
                        {"model", model_to_json(family.model)},
                        {"expand_factor", family.expand_factor},
                        {"solver_steps", family.solver_steps},
                        {"seed", options.seed}};
}

// Fills inputs/outputs from raw rows and applies the configured transform;
// Global granularity fits one affine map on the whole input matrix.
void apply_rescaling(Dataset& ds, std::vector<std::vector<double>>& raw_inputs,
                     const AssembleOptions& options) {
  const std::int64_t rows = static_cast<std::int64_t>(raw_inputs.size());
  ds.rescale.mode = options.rescale;
  ds.rescale.granularity = options.granularity;
  ds.rescale.lambda = options.lambda;
  ds.rescale.row_min.resize(rows);
  ds.rescale.row_max.resize(rows);

  if (options.rescale != RescaleMode::None &&
      options.granularity == RescaleGranularity::Global) {
    const double pre = options.rescale == RescaleMode::Normalized ? options.lambda : 1.0;
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = -std::numeric_limits<double>::infinity();
    for (const auto& row : raw_inputs)
      for (double v : row) {
        g_min = std::min(g_min, pre * v);
        g_max = std::max(g_max, pre * v);
      }
    if (g_max == g_min)
      throw std::invalid_argument("rescale: constant input matrix cannot be min-max rescaled");
    ds.rescale.global_min = g_min;
    ds.rescale.global_max = g_max;
  }

  for (std::int64_t r = 0; r < rows; ++r) {
    const auto& raw = raw_inputs[r];
    {
      const double pre = options.rescale == RescaleMode::Normalized ? options.lambda : 1.0;
      double m = std::numeric_limits<double>::infinity();
      double M = -std::numeric_limits<double>::infinity();
      for (double v : raw) {
        m = std::min(m, pre * v);
        M = std::max(M, pre * v);
      }
      ds.rescale.row_min[r] = m;
      ds.rescale.row_max[r] = M;
    }
    const std::vector<double> scaled = rescale_with_record(raw, ds.rescale);
    ds.inputs.row(r) =
        Eigen::Map<const Eigen::RowVectorXd>(scaled.data(), static_cast<std::int64_t>(scaled.size()));
  }
}

Dataset assemble_family(const FamilySpec& family, const GridSpec& grid, const MaskSpec& mask_spec,
                        const std::vector<double>& times, const AssembleOptions& options,
                        DatasetKind kind) {
  family.validate();
  if (times.empty()) throw std::invalid_argument("assemble: no snapshot times");
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("assemble: times must be ascending");

  Dataset ds;
  // A single-snapshot dataset is SISO by definition.
  ds.kind = (kind == DatasetKind::Simo && times.size() == 1) ? DatasetKind::Siso : kind;
  ds.equation = family.equation;
  ds.grid = grid;
  ds.mask_spec = mask_spec;
  ds.mask = build_mask(grid, mask_spec);
  ds.times = times;
  ds.time_feature = options.time_feature;
  ds.provenance = family_provenance(family, options);
  if (ds.masked_points() == 0) throw std::invalid_argument("assemble: mask includes no points");

  const std::int64_t n_samples =
      static_cast<std::int64_t>(family.wave_numbers.size() * family.sigma2s.size());
  const std::int64_t p = static_cast<std::int64_t>(times.size());
  const std::int64_t snap_w = ds.per_snapshot_width();
  const bool timed = options.time_feature;
  const std::int64_t rows = timed ? n_samples * p : n_samples;
  const std::int64_t m1 = 2 * ds.masked_points() + (timed ? 1 : 0);
  const std::int64_t m2 = timed ? snap_w : p * snap_w;

  ds.inputs.resize(rows, m1);
  ds.outputs.resize(rows, m2);

  std::vector<std::vector<double>> raw_inputs;
  raw_inputs.reserve(rows);
  std::int64_t row = 0;
  for (const auto& k : family.wave_numbers) {
    for (double sigma2 : family.sigma2s) {
      WavePacketSpec packet;
      packet.k = k;
      packet.sigma2 = sigma2;
      packet.equation = family.equation;
      const SampleFields sample = generate_sample(family, packet, grid, times);
      const std::vector<double> in = input_row_of(sample.initial, ds.mask);
      if (timed) {
        for (std::int64_t i = 0; i < p; ++i, ++row) {
          std::vector<double> in_t = in;
          in_t.push_back(times[i]);
          raw_inputs.push_back(std::move(in_t));
          const std::vector<double> out =
              output_row_of({sample.snapshots[i]}, family.equation, ds.mask);
          ds.outputs.row(row) = Eigen::Map<const Eigen::RowVectorXd>(out.data(), m2);
        }
      } else {
        raw_inputs.push_back(in);
        const std::vector<double> out = output_row_of(sample.snapshots, family.equation, ds.mask);
        ds.outputs.row(row) = Eigen::Map<const Eigen::RowVectorXd>(out.data(), m2);
        ++row;
      }
    }
  }
  apply_rescaling(ds, raw_inputs, options);
  return ds;
}

}  // namespace

Dataset assemble_siso(const FamilySpec& family, const GridSpec& grid, const MaskSpec& mask,
                      double T, const AssembleOptions& options) {
  if (T < 0) throw std::invalid_argument("assemble: T must be nonnegative");
  return assemble_family(family, grid, mask, {T}, options, DatasetKind::Siso);
}

Dataset assemble_simo(const FamilySpec& family, const GridSpec& grid, const MaskSpec& mask,
                      const std::vector<double>& times, const AssembleOptions& options) {
  return assemble_family(family, grid, mask, times, options, DatasetKind::Simo);
}

Dataset assemble_time_conditioned(const FamilySpec& family, const GridSpec& grid,
                                  const MaskSpec& mask, const std::vector<double>& times,
                                  const AssembleOptions& options) {
  AssembleOptions opt = options;
  opt.time_feature = true;
  return assemble_family(family, grid, mask, times, opt, DatasetKind::Siso);
}

Dataset assemble_ximo(const XimoFamily& family, const FieldPair& initial, const GridSpec& grid,
                      const MaskSpec& mask_spec, const std::vector<double>& times,
                      const AssembleOptions& options) {
  if (family.potentials.empty()) throw std::invalid_argument("ximo: no potential samples");
  if (times.empty()) throw std::invalid_argument("ximo: no snapshot times");

  Dataset ds;
  ds.kind = DatasetKind::Ximo;
  ds.equation = Equation::SchrodingerLinear;
  ds.grid = grid;
  ds.mask_spec = mask_spec;
  ds.mask = build_mask(grid, mask_spec);
  ds.times = times;

  const std::int64_t n = static_cast<std::int64_t>(family.potentials.size());
  const std::int64_t p = static_cast<std::int64_t>(times.size());
  const std::int64_t nm = ds.masked_points();
  ds.inputs.resize(n, p * nm);
  ds.outputs.resize(n, p * 2 * nm);

  std::vector<std::vector<double>> raw_inputs;
  raw_inputs.reserve(n);
  nlohmann::json pots = nlohmann::json::array();
  for (std::int64_t s = 0; s < n; ++s) {
    NlsModel model = family.base_model;
    model.potential = family.potentials[s];
    pots.push_back(model_to_json(model)["potential"]);

    // Input: the exogenous signal V(x, t_i) sampled on the masked grid.
    const std::vector<double> u_grid = family.potentials[s].spatial_grid(grid);
    std::vector<double> in;
    in.reserve(p * nm);
    for (double t : times) {
      const double e = family.potentials[s].modulation(t);
      std::vector<double> v(u_grid.size());
      for (std::size_t i = 0; i < u_grid.size(); ++i) v[i] = e * u_grid[i];
      append_masked(in, v, ds.mask);
    }
    raw_inputs.push_back(std::move(in));

    FamilySpec solver_family;
    solver_family.equation = Equation::SchrodingerLinear;
    solver_family.wave_numbers = {{0.0}};
    solver_family.sigma2s = {1.0};
    solver_family.source = DataSource::Spectral;
    solver_family.model = model;
    solver_family.expand_factor = family.expand_factor;
    solver_family.solver_steps = family.solver_steps;
    const std::vector<FieldPair> snaps = generate_from_initial(solver_family, initial, grid, times);
    const std::vector<double> out = output_row_of(snaps, Equation::SchrodingerLinear, ds.mask);
    ds.outputs.row(s) = Eigen::Map<const Eigen::RowVectorXd>(out.data(), p * 2 * nm);
  }
  apply_rescaling(ds, raw_inputs, options);
  ds.provenance = nlohmann::json{{"source", "spectral"},
                                 {"ximo_potentials", pots},
                                 {"model", model_to_json(family.base_model)},
                                 {"expand_factor", family.expand_factor},
                                 {"solver_steps", family.solver_steps},
                                 {"seed", options.seed}};
  return ds;
}

std::vector<double> rescale_with_record(std::span<const double> row, const RescaleRecord& record) {
  if (record.mode == RescaleMode::None ||
      record.granularity == RescaleGranularity::PerSample) {
    return rescale_input(row, record.mode, record.lambda).first;
  }
  std::vector<double> out(row.begin(), row.end());
  const double m = record.global_min, M = record.global_max;
  if (M == m) throw std::invalid_argument("rescale: degenerate stored global extrema");
  if (record.mode == RescaleMode::Normalized) {
    const double scale = 2.0 / (M - m);
    for (double& v : out) v = scale * (record.lambda * v - m) - 1.0;
  } else {
    for (double& v : out) v = 2.0 * (record.lambda * v - m) / (M - m) - m;
  }
  return out;
}

nlohmann::json grid_to_json(const GridSpec& grid) {
  return nlohmann::json{{"dim", grid.dim},
                        {"lower", grid.lower},
                        {"upper", grid.upper},
                        {"points_per_axis", grid.points_per_axis},
                        {"periodic", grid.periodic}};
}

GridSpec grid_from_json(const nlohmann::json& j) {
  GridSpec g;
  g.dim = j.at("dim").get<int>();
  g.lower = j.at("lower").get<std::vector<double>>();
  g.upper = j.at("upper").get<std::vector<double>>();
  g.points_per_axis = j.at("points_per_axis").get<std::vector<int>>();
  g.periodic = j.at("periodic").get<bool>();
  g.validate();
  return g;
}

nlohmann::json mask_spec_to_json(const MaskSpec& m) {
  return nlohmann::json{{"kind", to_string(m.kind)},
                        {"center", m.center},
                        {"radius", m.radius},
                        {"corner", m.corner}};
}

MaskSpec mask_spec_from_json(const nlohmann::json& j) {
  MaskSpec m;
  m.kind = mask_kind_from_string(j.at("kind").get<std::string>());
  m.center = j.at("center").get<std::vector<double>>();
  m.radius = j.at("radius").get<double>();
  m.corner = j.at("corner").get<std::vector<double>>();
  return m;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  nlohmann::json meta{
      {"kind", to_string(ds.kind)},
      {"equation", to_string(ds.equation)},
      {"grid", grid_to_json(ds.grid)},
      {"mask", mask_spec_to_json(ds.mask_spec)},
      {"masked_points", ds.masked_points()},
      {"times", ds.times},
      {"layout",
       {{"m1", ds.inputs.cols()},
        {"m2", ds.outputs.cols()},
        {"per_snapshot", ds.per_snapshot_width()},
        {"time_feature", ds.time_feature}}},
      {"rescale",
       {{"mode", to_string(ds.rescale.mode)},
        {"granularity", to_string(ds.rescale.granularity)},
        {"lambda", ds.rescale.lambda},
        {"global_min", ds.rescale.global_min},
        {"global_max", ds.rescale.global_max},
        {"row_min", ds.rescale.row_min},
        {"row_max", ds.rescale.row_max}}},
      {"provenance", ds.provenance}};
  ContainerWriter writer("WPKD", meta);
  writer.write_matrix(std::span<const double>(ds.inputs.data(), ds.inputs.size()),
                      ds.inputs.rows(), ds.inputs.cols());
  writer.write_matrix(std::span<const double>(ds.outputs.data(), ds.outputs.size()),
                      ds.outputs.rows(), ds.outputs.cols());
  writer.finish_to_file(path);
}

Dataset load_dataset(const std::string& path) {
  ContainerReader reader(path, "WPKD");
  const nlohmann::json& meta = reader.metadata();
  Dataset ds;
  try {
    ds.kind = dataset_kind_from_string(meta.at("kind").get<std::string>());
    ds.equation = equation_from_string(meta.at("equation").get<std::string>());
    ds.grid = grid_from_json(meta.at("grid"));
    ds.mask_spec = mask_spec_from_json(meta.at("mask"));
    ds.times = meta.at("times").get<std::vector<double>>();
    ds.time_feature = meta.at("layout").at("time_feature").get<bool>();
    ds.rescale.mode = rescale_mode_from_string(meta.at("rescale").at("mode").get<std::string>());
    ds.rescale.granularity =
        rescale_granularity_from_string(meta.at("rescale").at("granularity").get<std::string>());
    ds.rescale.lambda = meta.at("rescale").at("lambda").get<double>();
    ds.rescale.global_min = meta.at("rescale").at("global_min").get<double>();
    ds.rescale.global_max = meta.at("rescale").at("global_max").get<double>();
    ds.rescale.row_min = meta.at("rescale").at("row_min").get<std::vector<double>>();
    ds.rescale.row_max = meta.at("rescale").at("row_max").get<std::vector<double>>();
    ds.provenance = meta.value("provenance", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw IoError(io_errc::bad_metadata, std::string("dataset: bad metadata: ") + e.what());
  }
  ds.mask = build_mask(ds.grid, ds.mask_spec);
  if (ds.masked_points() != meta.at("masked_points").get<std::int64_t>())
    throw IoError(io_errc::bad_metadata, "dataset: mask does not reproduce stored point count");

  std::uint64_t rows, cols;
  std::vector<double> in = reader.read_matrix(rows, cols);
  const std::int64_t want_m1 = meta.at("layout").at("m1").get<std::int64_t>();
  if (static_cast<std::int64_t>(cols) != want_m1)
    throw IoError(io_errc::dim_mismatch, "dataset: input width disagrees with layout");
  ds.inputs = Eigen::Map<const RowMatrix>(in.data(), rows, cols);

  std::vector<double> out = reader.read_matrix(rows, cols);
  const std::int64_t want_m2 = meta.at("layout").at("m2").get<std::int64_t>();
  if (static_cast<std::int64_t>(cols) != want_m2)
    throw IoError(io_errc::dim_mismatch, "dataset: output width disagrees with layout");
  ds.outputs = Eigen::Map<const RowMatrix>(out.data(), rows, cols);
  if (ds.inputs.rows() != ds.outputs.rows())
    throw IoError(io_errc::dim_mismatch, "dataset: input/output row counts differ");
  reader.expect_consumed();
  return ds;
}

void save_fields(const std::vector<FieldPair>& snapshots, const GridSpec& grid,
                 const std::vector<double>& times, const nlohmann::json& extra_metadata,
                 const std::string& path) {
  if (snapshots.size() != times.size())
    throw std::invalid_argument("fields: one time per snapshot required");
  nlohmann::json meta{{"grid", grid_to_json(grid)}, {"times", times}, {"extra", extra_metadata}};
  ContainerWriter writer("WPKF", meta);
  writer.write_u64(snapshots.size());
  for (const auto& f : snapshots) {
    writer.write_u64(f.first.size());
    writer.write_f64_array(f.first);
    writer.write_u64(f.second.size());
    writer.write_f64_array(f.second);
  }
  writer.finish_to_file(path);
}

FieldDump load_fields(const std::string& path) {
  ContainerReader reader(path, "WPKF");
  FieldDump dump;
  try {
    dump.grid = grid_from_json(reader.metadata().at("grid"));
    dump.times = reader.metadata().at("times").get<std::vector<double>>();
    dump.metadata = reader.metadata().value("extra", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw IoError(io_errc::bad_metadata, std::string("fields: bad metadata: ") + e.what());
  }
  const std::uint64_t count = reader.read_u64();
  if (count != dump.times.size())
    throw IoError(io_errc::dim_mismatch, "fields: snapshot count disagrees with times");
  dump.snapshots.resize(count);
  for (std::uint64_t s = 0; s < count; ++s) {
    dump.snapshots[s].first = reader.read_f64_array(reader.read_u64());
    dump.snapshots[s].second = reader.read_f64_array(reader.read_u64());
  }
  reader.expect_consumed();
  return dump;
}

std::string to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::Siso: return "siso";
    case DatasetKind::Simo: return "simo";
    case DatasetKind::Ximo: return "ximo";
  }
  return "siso";
}

std::string to_string(DataSource s) {
  switch (s) {
    case DataSource::Analytic: return "analytic";
    case DataSource::Spectral: return "spectral";
    case DataSource::Cnfd: return "cnfd";
  }
  return "analytic";
}

std::string to_string(RescaleMode m) {
  switch (m) {
    case RescaleMode::Normalized: return "normalized";
    case RescaleMode::Literal: return "literal";
    case RescaleMode::None: return "none";
  }
  return "normalized";
}

std::string to_string(Equation e) {
  return e == Equation::Wave ? "wave" : "schrodinger";
}

std::string to_string(RescaleGranularity g) {
  return g == RescaleGranularity::PerSample ? "per-sample" : "global";
}

RescaleGranularity rescale_granularity_from_string(const std::string& s) {
  if (s == "per-sample") return RescaleGranularity::PerSample;
  if (s == "global") return RescaleGranularity::Global;
  throw std::invalid_argument("unknown rescale granularity: " + s);
}

DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "siso") return DatasetKind::Siso;
  if (s == "simo") return DatasetKind::Simo;
  if (s == "ximo") return DatasetKind::Ximo;
  throw std::invalid_argument("unknown dataset kind: " + s);
}

DataSource data_source_from_string(const std::string& s) {
  if (s == "analytic") return DataSource::Analytic;
  if (s == "spectral") return DataSource::Spectral;
  if (s == "cnfd") return DataSource::Cnfd;
  throw std::invalid_argument("unknown data source: " + s);
}

RescaleMode rescale_mode_from_string(const std::string& s) {
  if (s == "normalized") return RescaleMode::Normalized;
  if (s == "literal") return RescaleMode::Literal;
  if (s == "none") return RescaleMode::None;
  throw std::invalid_argument("unknown rescale mode: " + s);
}

Equation equation_from_string(const std::string& s) {
  if (s == "wave") return Equation::Wave;
  if (s == "schrodinger") return Equation::SchrodingerLinear;
  throw std::invalid_argument("unknown equation tag: " + s);
}

}  // namespace wavemap
