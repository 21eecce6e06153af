#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "lpcascade/dataset.hpp"

namespace lpcascade {

/// Records of [int32 dim][dim x float32], all little-endian, all dims equal.
/// Ids are the 0-based record ordinals.
DataSet load_fvecs(const std::filesystem::path& path);

/// Writes values rounded to float32.
void save_fvecs(const DataSet& data, const std::filesystem::path& path);

/// One vector per line, comma-separated decimal values; RFC 4180 quoting is
/// accepted. Errors name the offending line (1-based).
DataSet load_csv(const std::filesystem::path& path, bool has_header);

void save_csv(const DataSet& data, const std::filesystem::path& path, bool header = false);

/// Dispatches on the extension: .fvecs, or .csv/.txt (header detected from a
/// non-numeric first line).
DataSet load_vectors(const std::filesystem::path& path);

enum class SyntheticModel { iid_uniform, block_correlated, piecewise_smooth };

std::string_view to_string(SyntheticModel model) noexcept;
SyntheticModel parse_synthetic_model(std::string_view text);

struct SyntheticSpec {
  std::size_t s = 1000;
  std::size_t n = 64;
  SyntheticModel model = SyntheticModel::iid_uniform;
  std::size_t block_size = 4;  // block_correlated: rows split into blocks of this size
  double rho = 0.8;            // block_correlated: loading of the shared factor, in [0, 1]
  std::size_t window = 4;      // piecewise_smooth: nearest-neighbour upsampling factor
  std::uint64_t seed = 7;
};

/// iid_uniform:      x_j ~ U[0, 1).
/// block_correlated: x_j = rho * g + sqrt(1 - rho^2) * e_j within each block
///                   (g, e_j standard normal), then the whole matrix is shifted
///                   by its minimum so every value is >= 0.
/// piecewise_smooth: coarse U[0, 255) samples held for `window` positions,
///                   plus U[-5, 5) noise, clamped to [0, 255].
DataSet generate(const SyntheticSpec& spec);

}  // namespace lpcascade
