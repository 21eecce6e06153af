#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lpcascade/covariance_pca.hpp"
#include "lpcascade/dataset.hpp"
#include "lpcascade/dataset_io.hpp"
#include "lpcascade/report.hpp"
#include "lpcascade/subspace_tree.hpp"

namespace lpcascade {

using ConfigMap = std::map<std::string, std::string>;

/// Flat `key = value` file; '#' starts a comment. Throws InputError with the
/// line number on malformed lines or repeated keys.
ConfigMap read_config_file(const std::filesystem::path& path);
ConfigMap parse_config_text(std::string_view text);

struct EpsilonPolicy {
  std::optional<double> fixed;  // empty: calibrate per norm
  std::size_t target_nn = 52;
  std::size_t sample_size = 400;
};

struct BenchConfig {
  std::optional<std::filesystem::path> data_path;  // otherwise `synthetic`
  SyntheticSpec synthetic;
  std::optional<DimensionSchedule> schedule;
  std::vector<ProjectionMode> modes = {ProjectionMode::orthogonal, ProjectionMode::adaptive};
  std::vector<NormOrder> norms = {NormOrder::finite(2.0)};
  EpsilonPolicy epsilon;
  std::size_t queries = 100;
  std::size_t verify_queries = 20;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  MomentKind moment = MomentKind::raw;
  std::optional<std::filesystem::path> output;
  std::optional<ReportFormat> format;

  /// Recognized keys: data, synthetic, s, n, block, rho, window, data_seed,
  /// schedule, modes, norms, epsilon (number or "calibrate"), target_nn,
  /// calib_sample, queries, verify, seed, threads, moment, output, format.
  static BenchConfig from_map(const ConfigMap& values);

  /// Throws InputError unless the config can run.
  void validate() const;
};

/// Database rows and a disjoint query set.
struct PreparedData {
  std::shared_ptr<const DataSet> database;
  DataSet queries;
};

/// Synthetic sources generate s + queries rows and split off the tail; file
/// sources hold out `queries` randomly chosen rows.
PreparedData prepare_data(const BenchConfig& config);

struct BenchCell {
  ProjectionMode mode;
  NormOrder norm;
  double epsilon = 0.0;
  std::vector<QueryReport> reports;
  std::vector<LevelDiagnostics> diagnostics;
  BenchRow row;
};

struct BenchResult {
  std::vector<BenchCell> cells;  // sorted by (mode, p)
  std::vector<BenchRow> rows() const;
};

using LogSink = std::function<void(std::string_view)>;

/// Runs every (mode, norm) cell. Matches of the first `verify_queries` queries
/// per cell are compared with the brute-force oracle, and every report's
/// survivor chain and cost identity are checked; violations throw InvariantError.
BenchResult run_bench(const BenchConfig& config, const LogSink& log = {});

/// Same, over already-prepared data.
BenchResult run_bench(const BenchConfig& config, const PreparedData& data, const LogSink& log = {});

/// Per-level diversion and convergence summary, one line per level.
std::string summarize_build(const SubspaceIndex& index);

/// Fixed-width console table of bench rows.
std::string format_bench_table(std::span<const BenchRow> rows);

}  // namespace lpcascade
