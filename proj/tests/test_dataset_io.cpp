#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "lpcascade/covariance_pca.hpp"
#include "lpcascade/dataset_io.hpp"
#include "lpcascade/error.hpp"
#include "lpcascade/report.hpp"
#include "lpcascade/rng.hpp"

using namespace lpcascade;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("lpcascade_io_" + name);
}

void write_bytes(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_text(const fs::path& path, const std::string& text) { write_bytes(path, text); }

std::string fvecs_record(const std::vector<float>& v) {
  std::string out(4 + 4 * v.size(), '\0');
  const std::int32_t d = static_cast<std::int32_t>(v.size());
  // Little-endian by construction.
  for (int b = 0; b < 4; ++b) out[b] = static_cast<char>((static_cast<std::uint32_t>(d) >> (8 * b)) & 0xff);
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, &v[i], 4);
    for (int b = 0; b < 4; ++b) out[4 + 4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  return out;
}

BenchRow sample_row(ProjectionMode mode, NormOrder p) {
  BenchRow r;
  r.mode = mode;
  r.norm = p;
  r.epsilon = 0.1 + 1.0 / 3.0;
  r.mean_cost_s = 12345.678;
  r.mean_ratio = 21.38;
  r.mean_sigma = {1.5, 7.25, 100.0 / 7.0};
  r.fitted_const = 1.0 / 480.0;
  r.estimated_cost = 500015.0;
  r.queries = 400;
  r.cost_l = 96000000;
  return r;
}

}  // namespace

TEST_CASE("DataSet construction") {
  const DataSet d(2, {1, 2, 3, 4});
  CHECK(d.size() == 2);
  CHECK(d.id(1) == 1);
  CHECK(d.row(1)[0] == 3);
  CHECK_THROWS_AS(DataSet(2, {1, 2, 3}), InputError);
  CHECK_THROWS_AS(DataSet(0, {}), InputError);
  CHECK_THROWS_AS(DataSet(2, {1, NAN}), InputError);
  CHECK_THROWS_AS(DataSet(2, {1, 2}, {1, 2}), InputError);
  const DataSet tagged(1, {5, 6, 7}, {10, 20, 30});
  const std::vector<std::size_t> rows{2, 0};
  const auto sel = tagged.select(rows);
  CHECK(sel.id(0) == 30);
  CHECK(sel.row(1)[0] == 5);
  CHECK(tagged.slice(1, 2).id(0) == 20);
  CHECK_THROWS_AS(tagged.slice(2, 2), InputError);
}

TEST_CASE("fvecs loading") {
  const auto path = temp_file("two.fvecs");
  write_bytes(path, fvecs_record({1, 2}) + fvecs_record({3, 4}));
  const auto d = load_fvecs(path);
  CHECK(d.size() == 2);
  CHECK(d.dim() == 2);
  CHECK(d.values()[3] == 4.0);
  CHECK(d.id(1) == 1);

  write_bytes(path, "");
  CHECK_THROWS_AS(load_fvecs(path), InputError);

  write_bytes(path, fvecs_record({1, 2}) + fvecs_record({3, 4, 5}));
  try {
    load_fvecs(path);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("record 1") != std::string::npos);
  }

  const auto full = fvecs_record({1, 2, 3});
  write_bytes(path, full + full.substr(0, full.size() - 2));
  CHECK_THROWS_AS(load_fvecs(path), InputError);

  write_bytes(path, fvecs_record({1, std::numeric_limits<float>::infinity()}));
  CHECK_THROWS_AS(load_fvecs(path), InputError);
  CHECK_THROWS_AS(load_fvecs(temp_file("missing.fvecs")), InputError);
  fs::remove(path);
}

TEST_CASE("fvecs 100 x 960 fixture") {
  SyntheticSpec spec;
  spec.s = 100;
  spec.n = 960;
  spec.model = SyntheticModel::piecewise_smooth;
  const auto d = generate(spec);
  const auto path = temp_file("gist.fvecs");
  save_fvecs(d, path);
  CHECK(fs::file_size(path) == 100u * (4 + 960 * 4));
  const auto back = load_fvecs(path);
  CHECK(back.size() == 100);
  CHECK(back.dim() == 960);
  // Values of this generator are float-representable only after rounding.
  for (std::size_t i = 0; i < d.values().size(); ++i) {
    CHECK(back.values()[i] == static_cast<double>(static_cast<float>(d.values()[i])));
  }
  save_fvecs(back, path);
  CHECK(load_fvecs(path) == back);
  fs::remove(path);
}

TEST_CASE("csv loading") {
  const auto path = temp_file("tiny.csv");
  write_text(path, "1,2,3\n4.5,\"5\",-6e1\n");
  const auto d = load_csv(path, false);
  CHECK(d.size() == 2);
  CHECK(d.values()[5] == -60.0);
  CHECK(d.values()[4] == 5.0);

  write_text(path, "a,b\n1,2\n");
  CHECK(load_csv(path, true).size() == 1);
  CHECK(load_vectors(path).size() == 1);

  write_text(path, "");
  CHECK_THROWS_AS(load_csv(path, false), InputError);

  write_text(path, "1,2\n3,4\n5,6,7\n");
  try {
    load_csv(path, false);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }

  write_text(path, "1,nan\n");
  CHECK_THROWS_AS(load_csv(path, false), InputError);
  write_text(path, "1,x\n");
  CHECK_THROWS_AS(load_csv(path, false), InputError);

  const DataSet src(3, {0.1, 1e-300, -7, 1.0 / 3.0, 2, 3});
  save_csv(src, path, true);
  CHECK(load_csv(path, true) == src);
  save_csv(src, path, false);
  CHECK(load_vectors(path) == src);
  CHECK_THROWS_AS(load_vectors(temp_file("x.bin")), InputError);
  fs::remove(path);
}

TEST_CASE("generate is seed deterministic") {
  SyntheticSpec spec;
  spec.s = 10;
  spec.n = 4;
  spec.seed = 7;
  for (const auto model : {SyntheticModel::iid_uniform, SyntheticModel::block_correlated,
                           SyntheticModel::piecewise_smooth}) {
    spec.model = model;
    CHECK(generate(spec) == generate(spec));
    auto other = spec;
    other.seed = 8;
    CHECK_FALSE(generate(spec) == generate(other));
  }
  spec.model = SyntheticModel::iid_uniform;
  const auto uniform = generate(spec);
  for (double v : uniform.values()) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("generate models") {
  SyntheticSpec spec;
  spec.s = 200;
  spec.n = 16;
  spec.model = SyntheticModel::block_correlated;
  spec.rho = 1.0;
  const auto d = generate(spec);
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (std::size_t b = 0; b < 4; ++b) {
      for (std::size_t j = 1; j < 4; ++j) CHECK(d.row(r)[b * 4 + j] == d.row(r)[b * 4]);
    }
  }
  spec.rho = 0.5;
  const auto shifted = generate(spec);
  for (double v : shifted.values()) CHECK(v >= 0.0);

  spec.model = SyntheticModel::piecewise_smooth;
  spec.window = 8;
  const auto smooth = generate(spec);
  for (double v : smooth.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 255.0);
  }

  spec.model = SyntheticModel::block_correlated;
  spec.rho = 1.5;
  CHECK_THROWS_AS(generate(spec), InputError);
  spec.rho = 0.5;
  spec.block_size = 5;
  CHECK_THROWS_AS(generate(spec), InputError);
  spec.model = SyntheticModel::piecewise_smooth;
  spec.window = 0;
  CHECK_THROWS_AS(generate(spec), InputError);
  spec.s = 0;
  CHECK_THROWS_AS(generate(spec), InputError);
  CHECK(parse_synthetic_model("block") == SyntheticModel::block_correlated);
  CHECK_THROWS_AS(parse_synthetic_model("gaussian"), InputError);
}

TEST_CASE("block-correlated rho=0.9 principal component is near the bisecting line") {
  SyntheticSpec spec;
  spec.s = 10000;
  spec.n = 2;
  spec.block_size = 2;
  spec.rho = 0.9;
  spec.model = SyntheticModel::block_correlated;
  const auto d = generate(spec);
  for (const auto kind : {MomentKind::centered, MomentKind::raw}) {
    CovarianceAccumulator acc(2);
    for (std::size_t r = 0; r < d.size(); ++r) acc.add(d.row(r));
    const auto pc = first_principal_component(acc.finalize(kind));
    const double cosine = (pc.direction[0] + pc.direction[1]) / std::sqrt(2.0);
    const double degrees = std::acos(std::min(1.0, cosine)) * 180.0 / M_PI;
    CHECK(degrees < 2.0);
  }
}

TEST_CASE("rng stream") {
  CounterRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CounterRng c(1);
  double sum = 0, sq = 0;
  for (int i = 0; i < 100000; ++i) {
    const double z = c.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / 1e5) < 0.02);
  CHECK(std::abs(sq / 1e5 - 1) < 0.02);
  const auto pick = c.sample_without_replacement(50, 50);
  std::vector<bool> seen(50, false);
  for (auto v : pick) {
    CHECK_FALSE(seen[v]);
    seen[v] = true;
  }
  for (int i = 0; i < 1000; ++i) CHECK(c.below(7) < 7);
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}

TEST_CASE("reports round trip in both formats") {
  const std::vector<BenchRow> rows{sample_row(ProjectionMode::orthogonal, NormOrder::finite(1)),
                                   sample_row(ProjectionMode::adaptive, NormOrder::infinity())};
  for (const auto fmt : {ReportFormat::csv, ReportFormat::json}) {
    const auto back = parse_report(format_report(rows, fmt), fmt);
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(same_row(rows[i], back[i]));
  }
  // Single row.
  const std::vector<BenchRow> one{sample_row(ProjectionMode::adaptive, NormOrder::finite(2))};
  const auto path = temp_file("r.csv");
  write_report(one, path, ReportFormat::csv);
  const auto back = read_report(path, ReportFormat::csv);
  REQUIRE(back.size() == 1);
  CHECK(same_row(back[0], one[0]));
  fs::remove(path);
}

TEST_CASE("empty report is header only") {
  const auto text = format_report({}, ReportFormat::csv);
  CHECK(text.find("mode,p,epsilon") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(parse_report(text, ReportFormat::csv).empty());
  CHECK(parse_report(format_report({}, ReportFormat::json), ReportFormat::json).empty());
}

TEST_CASE("json and csv carry the same fields") {
  auto row = sample_row(ProjectionMode::orthogonal, NormOrder::finite(4));
  row.fitted_const = std::numeric_limits<double>::quiet_NaN();
  row.estimated_cost = std::numeric_limits<double>::quiet_NaN();
  const std::vector<BenchRow> rows{row};
  const auto from_csv = parse_report(format_report(rows, ReportFormat::csv), ReportFormat::csv);
  const auto from_json = parse_report(format_report(rows, ReportFormat::json), ReportFormat::json);
  CHECK(same_row(from_csv[0], from_json[0]));
  CHECK(std::isnan(from_json[0].fitted_const));
  CHECK(format_report(rows, ReportFormat::json).find("null") != std::string::npos);

  CHECK(report_format_for("a.json") == ReportFormat::json);
  CHECK(report_format_for("a.csv") == ReportFormat::csv);
  CHECK_THROWS_AS(parse_report_format("xml"), InputError);
  CHECK_THROWS_AS(parse_report("{", ReportFormat::json), InputError);
  CHECK_THROWS_AS(parse_report("x,y\n", ReportFormat::csv), InputError);
  CHECK_THROWS_AS(write_report(rows, "/nonexistent-dir/r.csv", ReportFormat::csv), InputError);
}
