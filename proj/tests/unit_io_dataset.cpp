#include <doctest.h>

#include <stdexcept>

#include <cstdio>
#include <filesystem>
#include <numbers>

#include "wavemap/dataset.hpp"
#include "wavemap/io.hpp"

using namespace wavemap;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

FamilySpec wave_family() {
  FamilySpec f;
  f.equation = Equation::Wave;
  for (int k = 1; k <= 10; ++k) f.wave_numbers.push_back({double(k)});
  f.sigma2s = SigmaSet::linear();
  f.source = DataSource::Analytic;
  return f;
}

GridSpec grid_201() { return GridSpec{1, {-8.0}, {8.0}, {201}, false}; }

}  // namespace

TEST_CASE("crc32 of the standard reference string") {
  const char* s = "123456789";
  CHECK(crc32(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(s), 9)) ==
        0xCBF43926u);
}

TEST_CASE("container round trip is bit exact and detects corruption") {
  const std::string path = temp_path("wavemap-io-test.bin");
  {
    ContainerWriter w("WPKF", {{"hello", 1}});
    w.write_matrix(std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, 2, 3);
    w.finish_to_file(path);
  }
  const std::vector<unsigned char> bytes = read_file_bytes(path);
  {
    ContainerReader r(path, "WPKF");
    std::uint64_t rows, cols;
    const auto data = r.read_matrix(rows, cols);
    CHECK(rows == 2);
    CHECK(cols == 3);
    CHECK(data[5] == 6.0);
    r.expect_consumed();
    CHECK(r.metadata().at("hello").get<int>() == 1);
  }
  // serialize -> deserialize -> serialize reproduces identical bytes
  {
    ContainerReader r(path, "WPKF");
    std::uint64_t rows, cols;
    const auto data = r.read_matrix(rows, cols);
    ContainerWriter w("WPKF", r.metadata());
    w.write_matrix(data, rows, cols);
    CHECK(w.finish() == bytes);
  }

  // wrong magic
  CHECK_THROWS_AS(ContainerReader(path, "WPKD"), IoError);
  try {
    ContainerReader r(path, "WPKD");
  } catch (const IoError& e) {
    CHECK(e.code == io_errc::bad_magic);
  }

  // flip one payload byte: the CRC trailer catches it
  std::vector<unsigned char> corrupt = bytes;
  corrupt[corrupt.size() / 2] ^= 0x40;
  try {
    ContainerReader r(corrupt, "WPKF");
    CHECK(false);
  } catch (const IoError& e) {
    CHECK(e.code == io_errc::crc_mismatch);
  }

  // truncation
  std::vector<unsigned char> shorter(bytes.begin(), bytes.begin() + 10);
  try {
    ContainerReader r(shorter, "WPKF");
    CHECK(false);
  } catch (const IoError& e) {
    CHECK(e.code == io_errc::truncated);
  }
  std::remove(path.c_str());
}

TEST_CASE("rescale_input per-sample examples") {
  SUBCASE("normalized maps endpoints onto [-1, 1]") {
    const auto [out, mm] = rescale_input(std::vector<double>{0.0, 1.0, 2.0},
                                         RescaleMode::Normalized, 1.0);
    CHECK(out == std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(mm.first == 0.0);
    CHECK(mm.second == 2.0);
  }
  SUBCASE("lambda cancels in per-sample normalized mode") {
    const auto [a, mm1] = rescale_input(std::vector<double>{0.3, -1.2, 2.4},
                                        RescaleMode::Normalized, 1.0);
    const auto [b, mm2] = rescale_input(std::vector<double>{0.3, -1.2, 2.4},
                                        RescaleMode::Normalized, 7.5);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
  }
  SUBCASE("literal applies the printed formula verbatim") {
    const auto [out, mm] = rescale_input(std::vector<double>{0.0, 1.0, 2.0},
                                         RescaleMode::Literal, 1.0);
    // 2 (v - 0) / 2 - 0 = v: this formula does not land in [-1, 1]
    CHECK(out == std::vector<double>{0.0, 1.0, 2.0});
  }
  SUBCASE("constant rows cannot be min-max rescaled") {
    CHECK_THROWS_AS(rescale_input(std::vector<double>{1.0, 1.0}, RescaleMode::Normalized, 1.0),
                    std::invalid_argument);
    const auto [out, mm] =
        rescale_input(std::vector<double>{1.0, 1.0}, RescaleMode::None, 1.0);
    CHECK(out == std::vector<double>{1.0, 1.0});
  }
}

TEST_CASE("siso assembly counts and layout") {
  const Dataset ds = assemble_siso(wave_family(), grid_201(), {}, 2.0, {});
  CHECK(ds.samples() == 60);     // |K| * |Sigma|
  CHECK(ds.inputs.cols() == 402);  // m1 = 2 N_x
  CHECK(ds.outputs.cols() == 201); // m2 = N_x
  CHECK(ds.kind == DatasetKind::Siso);

  // normalized inputs live in [-1, 1] with the global extrema attained
  CHECK(ds.inputs.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ds.inputs.minCoeff() == doctest::Approx(-1.0).epsilon(1e-12));

  // per-sample normalization attains both endpoints on every row
  AssembleOptions per_row;
  per_row.granularity = RescaleGranularity::PerSample;
  const Dataset ds2 = assemble_siso(wave_family(), grid_201(), {}, 2.0, per_row);
  for (std::int64_t r = 0; r < ds2.samples(); ++r) {
    CHECK(ds2.inputs.row(r).maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ds2.inputs.row(r).minCoeff() == doctest::Approx(-1.0).epsilon(1e-12));
    // strictly increasing affine maps preserve argmin/argmax
    std::int64_t arg_new, arg_old;
    ds2.inputs.row(r).maxCoeff(&arg_new);
    Eigen::RowVectorXd raw(402);
    // reconstruct the raw row from the stored record
    const double m = ds2.rescale.row_min[r], M = ds2.rescale.row_max[r];
    raw = ((ds2.inputs.row(r).array() + 1.0) * (M - m) / 2.0 + m).matrix();
    raw.maxCoeff(&arg_old);
    CHECK(arg_new == arg_old);
  }
}

TEST_CASE("schrodinger siso at T=0 with identity rescale reproduces inputs") {
  FamilySpec f;
  f.equation = Equation::SchrodingerLinear;
  f.wave_numbers = {{1.0}, {2.0}};
  f.sigma2s = {1.0};
  f.source = DataSource::Analytic;
  f.model.beta = 0.0;
  AssembleOptions opt;
  opt.rescale = RescaleMode::None;
  const Dataset ds = assemble_siso(f, grid_201(), {}, 0.0, opt);
  CHECK(ds.inputs.cols() == 402);
  CHECK(ds.outputs.cols() == 402);
  for (std::int64_t r = 0; r < ds.samples(); ++r)
    for (std::int64_t c = 0; c < 402; ++c)
      CHECK(ds.inputs(r, c) == doctest::Approx(ds.outputs(r, c)).epsilon(1e-12));
}

TEST_CASE("simo with one time is byte-identical to siso") {
  const std::string p1 = temp_path("wavemap-simo1.wpkd");
  const std::string p2 = temp_path("wavemap-siso.wpkd");
  save_dataset(assemble_simo(wave_family(), grid_201(), {}, {2.0}, {}), p1);
  save_dataset(assemble_siso(wave_family(), grid_201(), {}, 2.0, {}), p2);
  CHECK(read_file_bytes(p1) == read_file_bytes(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("simo concatenates snapshots in time order") {
  const std::vector<double> times{0.0, 1.0, 2.0};
  const Dataset simo = assemble_simo(wave_family(), grid_201(), {}, times, {});
  CHECK(simo.kind == DatasetKind::Simo);
  CHECK(simo.outputs.cols() == 3 * 201);
  const Dataset at1 = assemble_siso(wave_family(), grid_201(), {}, 1.0, {});
  for (std::int64_t r = 0; r < simo.samples(); ++r)
    for (int c = 0; c < 201; ++c)
      CHECK(simo.outputs(r, 201 + c) == at1.outputs(r, c));
}

TEST_CASE("assembly is deterministic byte for byte") {
  const std::string p1 = temp_path("wavemap-det1.wpkd");
  const std::string p2 = temp_path("wavemap-det2.wpkd");
  AssembleOptions opt;
  opt.seed = 42;
  save_dataset(assemble_siso(wave_family(), grid_201(), {}, 2.0, opt), p1);
  save_dataset(assemble_siso(wave_family(), grid_201(), {}, 2.0, opt), p2);
  CHECK(read_file_bytes(p1) == read_file_bytes(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("dataset save/load round trip") {
  const std::string path = temp_path("wavemap-roundtrip.wpkd");
  MaskSpec mask;
  const Dataset ds = assemble_siso(wave_family(), grid_201(), mask, 2.0, {});
  save_dataset(ds, path);
  const Dataset back = load_dataset(path);
  CHECK(back.kind == ds.kind);
  CHECK(back.equation == ds.equation);
  CHECK(back.samples() == ds.samples());
  CHECK(back.times == ds.times);
  CHECK(back.rescale.lambda == ds.rescale.lambda);
  CHECK(back.rescale.global_min == ds.rescale.global_min);
  CHECK((back.inputs - ds.inputs).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.outputs - ds.outputs).cwiseAbs().maxCoeff() == 0.0);

  // a second save emits identical bytes
  const std::string path2 = temp_path("wavemap-roundtrip2.wpkd");
  save_dataset(back, path2);
  CHECK(read_file_bytes(path) == read_file_bytes(path2));
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("empty family is rejected") {
  FamilySpec f = wave_family();
  f.wave_numbers.clear();
  CHECK_THROWS_AS(assemble_siso(f, grid_201(), {}, 2.0, {}), std::invalid_argument);
  FamilySpec f2 = wave_family();
  f2.sigma2s.clear();
  CHECK_THROWS_AS(assemble_siso(f2, grid_201(), {}, 2.0, {}), std::invalid_argument);
}

TEST_CASE("wave data must be analytic and cubic data must be numeric") {
  FamilySpec f = wave_family();
  f.source = DataSource::Spectral;
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);

  FamilySpec g;
  g.equation = Equation::SchrodingerLinear;
  g.wave_numbers = {{1.0}};
  g.sigma2s = {1.0};
  g.source = DataSource::Analytic;
  g.model.beta = -1.0;  // cubic has no closed form
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("time-conditioned assembly appends the snapshot time") {
  FamilySpec f;
  f.equation = Equation::SchrodingerLinear;
  f.wave_numbers = {{1.0}, {2.0}};
  f.sigma2s = {1.0, 1.1};
  f.source = DataSource::Analytic;
  f.model.beta = 0.0;
  const std::vector<double> times{0.0, 0.3, 0.6};
  AssembleOptions opt;
  opt.rescale = RescaleMode::None;
  const Dataset ds = assemble_time_conditioned(f, grid_201(), {}, times, opt);
  CHECK(ds.samples() == 4 * 3);
  CHECK(ds.inputs.cols() == 403);
  CHECK(ds.outputs.cols() == 402);
  CHECK(ds.time_feature);
  // time column cycles through the snapshot times
  for (int r = 0; r < 12; ++r) CHECK(ds.inputs(r, 402) == times[r % 3]);
}

TEST_CASE("ximo datasets pair potential signals with solutions") {
  const GridSpec g{1, {-4.0 * std::numbers::pi}, {4.0 * std::numbers::pi}, {128}, true};
  WavePacketSpec ground{{0.0}, 1.0, Equation::SchrodingerLinear};
  const FieldPair init = schrodinger_packet_initial(ground, g);
  const std::vector<double> times{0.5, 1.0};

  XimoFamily family;
  family.base_model.beta = -1.0;
  family.solver_steps = 200;
  SUBCASE("degenerate family: zero potential makes all rows identical") {
    for (int i = 0; i < 3; ++i) {
      Potential pot;
      pot.u_amp = 0.0;  // V == 0
      family.potentials.push_back(pot);
    }
    AssembleOptions opt;
    opt.rescale = RescaleMode::None;
    const Dataset ds = assemble_ximo(family, init, g, {}, times, opt);
    CHECK(ds.kind == DatasetKind::Ximo);
    CHECK(ds.inputs.cols() == 2 * 128);       // m1 = p * N
    CHECK(ds.outputs.cols() == 2 * 2 * 128);  // m2 = p * 2N
    for (std::int64_t r = 1; r < ds.samples(); ++r) {
      CHECK((ds.outputs.row(r) - ds.outputs.row(0)).cwiseAbs().maxCoeff() == 0.0);
      CHECK(ds.inputs.row(r).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("opposite-sign drive produces different solutions") {
    Potential plus;
    plus.kind = Potential::Kind::Separable;
    plus.e0 = 1.5;
    Potential minus = plus;
    minus.e0 = -1.5;
    family.potentials = {plus, minus};
    AssembleOptions opt;
    opt.rescale = RescaleMode::None;
    const Dataset ds = assemble_ximo(family, init, g, {}, times, opt);
    CHECK((ds.outputs.row(0) - ds.outputs.row(1)).cwiseAbs().maxCoeff() > 1e-6);
    CHECK((ds.inputs.row(0) + ds.inputs.row(1)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("field container round trip") {
  const std::string path = temp_path("wavemap-fields.wpkf");
  GridSpec g{1, {-1.0}, {1.0}, {9}, false};
  std::vector<FieldPair> snaps(2);
  snaps[0].first = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  snaps[0].second = {9, 8, 7, 6, 5, 4, 3, 2, 1};
  snaps[1].first = std::vector<double>(9, 0.5);
  snaps[1].second = {};
  save_fields(snaps, g, {0.0, 1.0}, {{"solver", "test"}}, path);
  const FieldDump dump = load_fields(path);
  CHECK(dump.times == std::vector<double>{0.0, 1.0});
  CHECK(dump.snapshots[0].first == snaps[0].first);
  CHECK(dump.snapshots[0].second == snaps[0].second);
  CHECK(dump.snapshots[1].second.empty());
  CHECK(dump.metadata.at("solver").get<std::string>() == "test");
  std::remove(path.c_str());
}

TEST_CASE("masked dataset rows scatter back inside the mask only") {
  GridSpec g{2, {-4.0, -4.0}, {4.0, 4.0}, {17, 17}, false};
  MaskSpec mask;
  mask.kind = MaskKind::Disk;
  mask.radius = 4.0;
  FamilySpec f;
  f.equation = Equation::Wave;
  f.wave_numbers = {{1.0, 1.0}};
  f.sigma2s = {1.0};
  const Dataset ds = assemble_siso(f, g, mask, 0.5, {});
  const std::int64_t nm = ds.masked_points();
  CHECK(ds.inputs.cols() == 2 * nm);
  std::vector<double> row(nm);
  for (std::int64_t i = 0; i < nm; ++i) row[i] = ds.outputs(0, i);
  const std::vector<double> field = scatter_masked(row, ds.mask);
  for (std::size_t i = 0; i < field.size(); ++i)
    if (!ds.mask.flags[i]) CHECK(field[i] == 0.0);
}
