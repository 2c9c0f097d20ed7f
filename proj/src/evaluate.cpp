#include "wavemap/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace wavemap {

double relative_error(std::span<const double> pred, std::span<const double> ref) {
  if (pred.size() != ref.size()) throw std::invalid_argument("relative_error: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  if (den == 0.0) throw std::invalid_argument("relative_error: reference has zero norm");
  return std::sqrt(num / den);
}

ComponentErrors wave_errors(std::span<const double> pred_u, std::span<const double> ref_u) {
  ComponentErrors e;
  e.u_or_p = relative_error(pred_u, ref_u);
  return e;
}

ComponentErrors schrodinger_errors(std::span<const double> pred_p, std::span<const double> pred_q,
                                   std::span<const double> ref_p, std::span<const double> ref_q) {
  ComponentErrors e;
  e.u_or_p = relative_error(pred_p, ref_p);
  e.q = relative_error(pred_q, ref_q);
  std::vector<double> rho_pred(pred_p.size()), rho_ref(ref_p.size());
  for (std::size_t i = 0; i < pred_p.size(); ++i) {
    rho_pred[i] = pred_p[i] * pred_p[i] + pred_q[i] * pred_q[i];
    rho_ref[i] = ref_p[i] * ref_p[i] + ref_q[i] * ref_q[i];
  }
  e.rho = relative_error(rho_pred, rho_ref);
  return e;
}

namespace {

void csv_field(std::ostream& out, double v) {
  if (std::isnan(v)) return;  // not-applicable columns stay empty
  out.precision(12);
  out << v;
}

}  // namespace

void write_report_csv(const std::vector<ErrorRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "experiment_id,equation,activation,sigma_set,k_set,lambda,seed,test_condition,"
         "snapshot_time,err_u_or_p,err_q,err_rho,wall_seconds\n";
  for (const auto& r : rows) {
    out << r.experiment_id << ',' << r.equation << ',' << r.activation << ',' << r.sigma_set
        << ',' << r.k_set << ',';
    out.precision(12);
    out << r.lambda << ',' << r.seed << ',' << r.test_condition << ',' << r.snapshot_time << ',';
    csv_field(out, r.errors.u_or_p);
    out << ',';
    csv_field(out, r.errors.q);
    out << ',';
    csv_field(out, r.errors.rho);
    out << ',';
    out.precision(6);
    out << r.wall_seconds << '\n';
  }
}

Prediction predict(const NetworkParams& model, const Dataset& shape, const FieldPair& initial,
                   std::optional<double> time_feature) {
  if (shape.time_feature != time_feature.has_value())
    throw std::invalid_argument("predict: time feature presence must match the dataset");

  std::vector<double> row = flatten_masked(initial.first, shape.mask);
  {
    const std::vector<double> second = flatten_masked(initial.second, shape.mask);
    row.insert(row.end(), second.begin(), second.end());
  }
  if (time_feature) row.push_back(*time_feature);
  const std::vector<double> scaled = rescale_with_record(row, shape.rescale);

  RowMatrix x(1, static_cast<std::int64_t>(scaled.size()));
  for (std::size_t i = 0; i < scaled.size(); ++i) x(0, i) = scaled[i];
  const RowMatrix y = forward(model, x);

  const std::int64_t nm = shape.masked_points();
  const std::int64_t snap_w = shape.per_snapshot_width();
  const std::int64_t p = time_feature ? 1 : static_cast<std::int64_t>(shape.times.size());
  if (y.cols() != p * snap_w)
    throw std::invalid_argument("predict: model output does not match the dataset layout");

  Prediction pred;
  pred.snapshots.resize(p);
  for (std::int64_t s = 0; s < p; ++s) {
    const double* base = y.data() + s * snap_w;
    const std::vector<double> part1(base, base + nm);
    pred.snapshots[s].first = scatter_masked(part1, shape.mask);
    if (shape.equation != Equation::Wave) {
      const std::vector<double> part2(base + nm, base + 2 * nm);
      pred.snapshots[s].second = scatter_masked(part2, shape.mask);
    }
  }
  return pred;
}

std::vector<ComponentErrors> evaluate_prediction(const Prediction& pred,
                                                 const std::vector<FieldPair>& reference,
                                                 Equation equation, const DomainMask& mask) {
  if (pred.snapshots.size() != reference.size())
    throw std::invalid_argument("evaluate: snapshot count mismatch");
  std::vector<ComponentErrors> out(pred.snapshots.size());
  for (std::size_t s = 0; s < pred.snapshots.size(); ++s) {
    const std::vector<double> pu = flatten_masked(pred.snapshots[s].first, mask);
    const std::vector<double> ru = flatten_masked(reference[s].first, mask);
    if (equation == Equation::Wave) {
      out[s] = wave_errors(pu, ru);
    } else {
      const std::vector<double> pq = flatten_masked(pred.snapshots[s].second, mask);
      const std::vector<double> rq = flatten_masked(reference[s].second, mask);
      out[s] = schrodinger_errors(pu, pq, ru, rq);
    }
  }
  return out;
}

ConventionVerdict cross_validate_analytic(double k, double sigma2, const GridSpec& grid, double T,
                                          double tolerance) {
  WavePacketSpec packet;
  packet.k = {k};
  packet.sigma2 = sigma2;
  packet.equation = Equation::SchrodingerLinear;

  const FieldPair analytic = schrodinger_linear_evolved(packet, grid, T);
  ComplexField ref(analytic.first.size());
  for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = {analytic.first[i], analytic.second[i]};

  SolverRun run;
  run.grid = grid;
  run.time = {0.0, T, 200};
  run.model.beta = 0.0;
  run.initial = schrodinger_packet_initial(packet, grid);
  run.snapshot_times = {T};

  auto solve_with = [&](double coeff) {
    SolverRun r = run;
    r.model.kinetic_coeff = coeff;
    const FieldPair got = solve_nls(r).at(0);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const std::complex<double> d(got.first[i] - ref[i].real(), got.second[i] - ref[i].imag());
      num += std::norm(d);
      den += std::norm(ref[i]);
    }
    return std::sqrt(num / den);
  };

  ConventionVerdict verdict;
  verdict.err_full = solve_with(1.0);
  verdict.err_half = solve_with(0.5);
  if (verdict.err_full >= tolerance && verdict.err_half >= tolerance)
    throw SolverError("cross-validation: neither Laplacian convention matches the kernels");
  verdict.chosen_coeff = verdict.err_full <= verdict.err_half ? 1.0 : 0.5;
  return verdict;
}

std::vector<AbsorbingRow> absorbing_diagnostic(const std::vector<FieldPair>& pred,
                                               const std::vector<FieldPair>& reference,
                                               const std::vector<double>& times,
                                               const GridSpec& grid, const DomainMask& mask,
                                               double shell_frac) {
  if (pred.size() != reference.size() || pred.size() != times.size())
    throw std::invalid_argument("absorbing: snapshot count mismatch");

  // Masked points inside the boundary shell.
  std::vector<std::int64_t> shell;
  for (std::int64_t i : mask.included) {
    const std::vector<double> x = point_at(grid, i);
    for (int a = 0; a < grid.dim; ++a) {
      const double w = (grid.upper[a] - grid.lower[a]) * shell_frac;
      if (x[a] < grid.lower[a] + w || x[a] > grid.upper[a] - w) {
        shell.push_back(i);
        break;
      }
    }
  }

  const double vol = grid.cell_volume();
  std::vector<AbsorbingRow> out(pred.size());
  for (std::size_t s = 0; s < pred.size(); ++s) {
    AbsorbingRow& row = out[s];
    row.time = times[s];
    double ref_total = 0.0;
    for (std::int64_t i : mask.included) {
      const double pp = pred[s].first[i], pq = pred[s].second.empty() ? 0.0 : pred[s].second[i];
      const double rp = reference[s].first[i],
                   rq = reference[s].second.empty() ? 0.0 : reference[s].second[i];
      row.pred_mass += (pp * pp + pq * pq) * vol;
      row.ref_mass += (rp * rp + rq * rq) * vol;
      ref_total += rp * rp + rq * rq;
    }
    row.mass_gap = row.ref_mass > 0.0 ? std::abs(row.pred_mass - row.ref_mass) / row.ref_mass : 0.0;

    double num = 0.0, den = 0.0;
    for (std::int64_t i : shell) {
      const double pp = pred[s].first[i], pq = pred[s].second.empty() ? 0.0 : pred[s].second[i];
      const double rp = reference[s].first[i],
                   rq = reference[s].second.empty() ? 0.0 : reference[s].second[i];
      num += (pp - rp) * (pp - rp) + (pq - rq) * (pq - rq);
      den += rp * rp + rq * rq;
    }
    if (den > 0.0)
      row.reflection = std::sqrt(num / den);
    else if (ref_total > 0.0)  // empty-shell reference: normalize by the domain
      row.reflection = std::sqrt(num / ref_total);
    else
      row.reflection = 0.0;
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace wavemap
