#include "lpcascade/reference_tables.hpp"

#include <cstdio>

namespace lpcascade {

std::string format_reference_rows(std::string_view dataset) {
  std::string out = "reference (published, not reproduced at desk scale)\n";
  char line[160];
  std::snprintf(line, sizeof line, "  %-10s %-11s %-5s %12s %12s %8s\n", "dataset", "mode", "p",
                "epsilon", "mean_cost", "ratio");
  out += line;
  for (const auto& r : kReferenceRows) {
    if (!dataset.empty() && r.dataset != dataset) continue;
    std::snprintf(line, sizeof line, "  %-10.*s %-11.*s %-5.*s %12.0f %12.0f %8.2f\n",
                  static_cast<int>(r.dataset.size()), r.dataset.data(),
                  static_cast<int>(r.mode.size()), r.mode.data(), static_cast<int>(r.norm.size()),
                  r.norm.data(), r.epsilon, r.mean_cost, r.mean_ratio);
    out += line;
  }
  return out;
}

std::string_view reference_dataset_for_dim(std::size_t dim) noexcept {
  if (dim == 960) return "gist-960";
  if (dim == 12288) return "rgb-12288";
  return {};
}

}  // namespace lpcascade
