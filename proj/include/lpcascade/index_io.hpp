#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>

#include "lpcascade/dataset.hpp"
#include "lpcascade/subspace_tree.hpp"

namespace lpcascade {

inline constexpr std::uint32_t kIndexFormatVersion = 1;

/// Writes the index container (layout in docs/index_format.md). The base
/// vectors are not stored; they are re-attached on load.
void save_index(const SubspaceIndex& index, const std::filesystem::path& path);

/// Reads a container and attaches it to `data`, which must be the dataset the
/// index was built from (same size, dimension and ids; the coarsest level is
/// spot-checked against re-projected rows). Features come back at float32
/// precision and the query filter widens its pruning bound accordingly.
SubspaceIndex load_index(const std::filesystem::path& path, std::shared_ptr<const DataSet> data);

}  // namespace lpcascade
