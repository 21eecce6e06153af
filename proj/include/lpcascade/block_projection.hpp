#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lpcascade/lp_norms.hpp"

namespace lpcascade {

enum class ProjectionMode { orthogonal, adaptive };

std::string_view to_string(ProjectionMode mode) noexcept;
ProjectionMode parse_projection_mode(std::string_view text);

/// Split of R^n into f contiguous blocks of m coordinates each (n = f * m).
struct BlockPartition {
  std::size_t dim_in = 0;
  std::size_t block_count = 0;
  std::size_t block_size = 0;

  /// Throws InputError unless dim_out divides dim_in.
  static BlockPartition split(std::size_t dim_in, std::size_t dim_out);

  friend bool operator==(const BlockPartition&, const BlockPartition&) = default;
};

/// Rank-1 map of one block onto a scalar.
///
/// Orthogonal projectors carry no state: the feature is m^(1/p) * mean(block).
/// Adaptive projectors hold an l2-unit direction z; the feature is <z, b>
/// divided by max(1, ||z||_{p*}), which keeps the map 1-Lipschitz in l_p.
class BlockProjector {
 public:
  static BlockProjector orthogonal() noexcept { return BlockProjector(); }

  /// Normalizes `direction` to unit l2 length and orients it so <z, o> >= 0.
  static BlockProjector adaptive(std::vector<double> direction, NormOrder norm);

  ProjectionMode mode() const noexcept { return mode_; }
  std::span<const double> direction() const noexcept { return direction_; }
  double lipschitz_scale() const noexcept { return scale_; }
  NormOrder norm() const noexcept { return norm_; }

 private:
  BlockProjector() = default;

  ProjectionMode mode_ = ProjectionMode::orthogonal;
  std::vector<double> direction_;
  double scale_ = 1.0;
  NormOrder norm_ = NormOrder::finite(2.0);
};

/// max(1, ||z||_{p*}).
double lipschitz_scale(std::span<const double> direction, NormOrder p);

double orthogonal_feature(std::span<const double> block, NormOrder p);
double adaptive_feature(std::span<const double> block, const BlockProjector& proj, NormOrder p);

/// sqrt(m) - ||Z o||_2 with Z = z z^T and o the all-ones vector.
double diversion(const BlockProjector& proj, std::size_t m);

/// Induced l_p operator norm of the l_p-normalized m-secting map, m^((p-2)/p).
double q_mapping_norm(std::size_t m, NormOrder p);

/// A : R^{dim_in} -> R^{block_count}; one scalar feature per block.
class ProjectionLevel {
 public:
  ProjectionLevel(BlockPartition partition, std::vector<BlockProjector> projectors, NormOrder norm);

  /// All-orthogonal level.
  static ProjectionLevel orthogonal(BlockPartition partition, NormOrder norm);

  const BlockPartition& partition() const noexcept { return partition_; }
  ProjectionMode mode() const noexcept { return mode_; }
  NormOrder norm() const noexcept { return norm_; }
  std::span<const BlockProjector> projectors() const noexcept { return projectors_; }
  std::size_t dim_in() const noexcept { return partition_.dim_in; }
  std::size_t dim_out() const noexcept { return partition_.block_count; }

  std::vector<double> project(std::span<const double> x) const;

  /// Unchecked variant: x has dim_in() entries, out has dim_out().
  void project_into(const double* x, double* out) const noexcept;

 private:
  BlockPartition partition_;
  std::vector<BlockProjector> projectors_;
  NormOrder norm_;
  ProjectionMode mode_;
  double orthogonal_scale_;            // m^(1/p) / m
  std::vector<double> scaled_weights_;  // adaptive: z_j / scale_j, block after block
};

struct DiversionReport {
  std::vector<double> per_block;
  std::size_t block_size = 0;

  double max() const noexcept;
  double mean() const noexcept;
};

/// Per-block diversion of a level; all zeros for orthogonal levels.
DiversionReport diversion_report(const ProjectionLevel& level);

}  // namespace lpcascade
