#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace lpcascade {

/// Published reference measurements for the two full-scale datasets. They
/// document what the benchmark reproduces on the original data; the desk-scale
/// synthetic runs are not expected to match their magnitudes.
struct ReferenceRow {
  std::string_view dataset;   // "gist-960" or "rgb-12288"
  std::string_view mode;      // "orthogonal" or "adaptive"
  std::string_view norm;      // "1", "2", "4", "inf"
  double epsilon;             // calibrated for about 52 nearest neighbours
  double mean_cost;           // mean cascade cost per query
  double mean_ratio;          // mean list-matching / cascade cost ratio
};

struct ReferenceDataset {
  std::string_view name;
  std::size_t size;           // s
  std::string_view schedule;  // per band for the RGB set
  std::size_t query_sample;   // disjoint query sample size
};

inline constexpr std::array<ReferenceDataset, 2> kReferenceDatasets{{
    {"gist-960", 100000, "960,480,240,120,60,30,10,5", 400},
    {"rgb-12288", 9876, "12288,768,48,12", 400},
}};

inline constexpr std::array<ReferenceRow, 7> kReferenceRows{{
    {"gist-960", "orthogonal", "2", 6300, 4584277, 21.38},
    {"gist-960", "adaptive", "2", 6300, 4393127, 22.31},
    {"rgb-12288", "orthogonal", "1", 1240000, 8571752, 42.47},
    {"rgb-12288", "adaptive", "2", 8500, 10343766, 35.20},
    {"rgb-12288", "orthogonal", "2", 8500, 10386043, 35.05},
    {"rgb-12288", "orthogonal", "4", 825, 12464281, 29.32},
    {"rgb-12288", "orthogonal", "inf", 161, 39639239, 9.19},
}};

/// Plain-text table of the reference rows (optionally one dataset only).
std::string format_reference_rows(std::string_view dataset = {});

/// "gist-960" for dimension 960, "rgb-12288" for 12288, empty otherwise.
std::string_view reference_dataset_for_dim(std::size_t dim) noexcept;

}  // namespace lpcascade
