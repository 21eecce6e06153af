#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lpcascade/block_projection.hpp"
#include "lpcascade/lp_norms.hpp"

namespace lpcascade {

/// One (mode, norm) cell of a benchmark run.
struct BenchRow {
  ProjectionMode mode = ProjectionMode::orthogonal;
  NormOrder norm = NormOrder::finite(2.0);
  double epsilon = 0.0;
  double mean_cost_s = 0.0;
  double mean_ratio = 0.0;
  std::vector<double> mean_sigma;  // sigma_0 .. sigma_t
  double fitted_const = 0.0;       // NaN when no level had survivors
  double estimated_cost = 0.0;
  std::size_t queries = 0;
  double cost_l = 0.0;
};

enum class ReportFormat { json, csv };

ReportFormat parse_report_format(std::string_view text);
/// json for ".json", csv otherwise.
ReportFormat report_format_for(const std::filesystem::path& path);

std::string format_report(std::span<const BenchRow> rows, ReportFormat format);
std::vector<BenchRow> parse_report(std::string_view text, ReportFormat format);

void write_report(std::span<const BenchRow> rows, const std::filesystem::path& path,
                  ReportFormat format);
std::vector<BenchRow> read_report(const std::filesystem::path& path, ReportFormat format);

/// Field-wise equality that treats NaN == NaN.
bool same_row(const BenchRow& a, const BenchRow& b);

}  // namespace lpcascade
