#include "lpcascade/dataset.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "lpcascade/error.hpp"

namespace lpcascade {

DataSet::DataSet(std::size_t dim, std::vector<double> values, std::vector<std::uint64_t> ids)
    : dim_(dim), values_(std::move(values)), ids_(std::move(ids)) {
  if (dim_ == 0) throw InputError("DataSet: dimension must be positive");
  if (values_.empty() || values_.size() % dim_ != 0) {
    std::ostringstream msg;
    msg << "DataSet: " << values_.size() << " values do not form rows of dimension " << dim_;
    throw InputError(msg.str());
  }
  const std::size_t rows = values_.size() / dim_;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      std::ostringstream msg;
      msg << "DataSet: non-finite value in row " << k / dim_ << ", column " << k % dim_;
      throw InputError(msg.str());
    }
  }
  if (ids_.empty()) {
    ids_.resize(rows);
    std::iota(ids_.begin(), ids_.end(), std::uint64_t{0});
  } else if (ids_.size() != rows) {
    throw InputError("DataSet: id count does not match row count");
  }
}

DataSet DataSet::slice(std::size_t first, std::size_t count) const {
  if (count == 0 || first + count > size()) throw InputError("DataSet::slice: out of range");
  std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(first * dim_),
                        values_.begin() + static_cast<std::ptrdiff_t>((first + count) * dim_));
  std::vector<std::uint64_t> ids(ids_.begin() + static_cast<std::ptrdiff_t>(first),
                                 ids_.begin() + static_cast<std::ptrdiff_t>(first + count));
  return DataSet(dim_, std::move(v), std::move(ids));
}

DataSet DataSet::select(std::span<const std::size_t> rows) const {
  if (rows.empty()) throw InputError("DataSet::select: no rows");
  std::vector<double> v;
  v.reserve(rows.size() * dim_);
  std::vector<std::uint64_t> ids;
  ids.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= size()) throw InputError("DataSet::select: row out of range");
    const auto src = row(r);
    v.insert(v.end(), src.begin(), src.end());
    ids.push_back(ids_[r]);
  }
  return DataSet(dim_, std::move(v), std::move(ids));
}

}  // namespace lpcascade
