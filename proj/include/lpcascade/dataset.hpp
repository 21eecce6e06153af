#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lpcascade {

/// Row-major s x n matrix of finite doubles with one identifier per row.
class DataSet {
 public:
  DataSet() = default;

  /// Throws InputError if values.size() is not a positive multiple of dim, if
  /// any value is non-finite, or if ids are given with the wrong length.
  /// Empty `ids` means 0, 1, ..., s-1.
  DataSet(std::size_t dim, std::vector<double> values, std::vector<std::uint64_t> ids = {});

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return ids_.empty(); }

  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * dim_, dim_};
  }
  const double* row_ptr(std::size_t i) const noexcept { return values_.data() + i * dim_; }
  std::uint64_t id(std::size_t i) const noexcept { return ids_[i]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const std::uint64_t> ids() const noexcept { return ids_; }

  /// Rows [first, first + count), keeping their ids.
  DataSet slice(std::size_t first, std::size_t count) const;

  /// The listed rows, in order, keeping their ids.
  DataSet select(std::span<const std::size_t> rows) const;

  friend bool operator==(const DataSet&, const DataSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::vector<std::uint64_t> ids_;
};

}  // namespace lpcascade
