#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace lpcascade {

/// Dense symmetric m x m matrix, stored in full row-major order.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t dim) : dim_(dim), values_(dim * dim, 0.0) {}

  /// Throws InputError unless `values` is dim*dim and symmetric to 1e-9 (relative).
  static SymmetricMatrix from_values(std::size_t dim, std::vector<double> values);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * dim_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * dim_ + j]; }
  std::span<const double> values() const noexcept { return values_; }
  double trace() const noexcept;

  /// u^T A u.
  double quadratic_form(std::span<const double> u) const;
  std::vector<double> multiply(std::span<const double> u) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

/// Which moment matrix a fit uses.
///  centered: sample covariance, comoment / max(1, count - 1).
///  raw:      second moment about the origin, E[b b^T].
enum class MomentKind { centered, raw };

std::string_view to_string(MomentKind kind) noexcept;
MomentKind parse_moment_kind(std::string_view text);

/// Single-pass (Welford) accumulator of mean and comoment for m-dimensional blocks.
class CovarianceAccumulator {
 public:
  explicit CovarianceAccumulator(std::size_t dim);

  void add(std::span<const double> block);
  void add_unchecked(const double* block) noexcept;

  /// Chan et al. pairwise combination; order-insensitive up to rounding.
  void merge(const CovarianceAccumulator& other);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t count() const noexcept { return count_; }
  std::span<const double> mean() const noexcept { return mean_; }
  const SymmetricMatrix& comoment() const noexcept { return comoment_; }

  /// comoment / max(1, count - 1). Throws InputError when empty.
  SymmetricMatrix covariance() const;

  /// (comoment + count * mean mean^T) / count. Throws InputError when empty.
  SymmetricMatrix second_moment() const;

  SymmetricMatrix finalize(MomentKind kind) const {
    return kind == MomentKind::centered ? covariance() : second_moment();
  }

 private:
  std::size_t dim_;
  std::size_t count_ = 0;
  std::vector<double> mean_;
  SymmetricMatrix comoment_;
  std::vector<double> delta_;
};

struct PrincipalComponent {
  std::vector<double> direction;  // unit l2, <direction, o> >= 0
  double eigenvalue = 0.0;
  bool converged = true;
  std::size_t iterations = 0;
};

/// Flips `z` in place so that <z, o> >= 0; when <z, o> is ~0 the first
/// nonzero component is made positive.
void orient_along_ones(std::span<double> z) noexcept;

/// Dominant eigenpair of a symmetric PSD matrix by power iteration.
///
/// Starts from o / sqrt(m) and squares the iteration matrix between steps, so
/// step k applies C^(2^k); stops once successive directions differ by less
/// than 1e-10 (l2) or after 10,000 steps. A second deterministic start guards
/// against o being orthogonal to the dominant eigenspace. The zero matrix
/// yields o / sqrt(m) with eigenvalue 0.
PrincipalComponent first_principal_component(const SymmetricMatrix& c);

/// Closed-form eigenpair of a 2 x 2 symmetric matrix, same sign convention.
PrincipalComponent principal_component_2x2(const SymmetricMatrix& c);

}  // namespace lpcascade
