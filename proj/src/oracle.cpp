#include "lpcascade/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lpcascade/error.hpp"
#include "lpcascade/rng.hpp"

namespace lpcascade {

RangeResult brute_force_range(const DataSet& data, std::span<const double> y, double epsilon,
                              NormOrder p) {
  if (y.size() != data.dim()) {
    std::ostringstream msg;
    msg << "brute_force_range: query has dimension " << y.size() << ", data has " << data.dim();
    throw InputError(msg.str());
  }
  require_finite(y, "brute_force_range query");
  if (!(epsilon > 0.0)) throw InputError("brute_force_range: epsilon must be positive");
  RangeResult result;
  const std::size_t n = data.dim();
  for (std::size_t r = 0; r < data.size(); ++r) {
    const double d = kernel::distance(data.row_ptr(r), y.data(), n, p);
    if (d < epsilon) result.matches.push_back(Match{data.id(r), d});
  }
  result.cost_l = static_cast<std::uint64_t>(data.size()) * n;
  return result;
}

std::vector<double> calibrate_epsilons(const DataSet& data, const CalibrationSpec& spec,
                                       std::span<const std::size_t> targets, NormOrder p) {
  const std::size_t s = data.size();
  if (spec.sample_size == 0 || spec.sample_size > s) {
    std::ostringstream msg;
    msg << "calibrate_epsilon: sample size " << spec.sample_size << " must lie in [1, " << s << "]";
    throw InputError(msg.str());
  }
  for (std::size_t k : targets) {
    if (k == 0 || k >= s) {
      std::ostringstream msg;
      msg << "calibrate_epsilon: target_nn " << k << " needs 1 <= target_nn < s = " << s;
      throw InputError(msg.str());
    }
  }
  CounterRng rng(spec.seed);
  const auto sample = rng.sample_without_replacement(s, spec.sample_size);
  std::vector<std::vector<double>> per_target(targets.size());
  std::vector<double> dist;
  dist.reserve(s - 1);
  const std::size_t n = data.dim();
  for (std::size_t q : sample) {
    dist.clear();
    for (std::size_t r = 0; r < s; ++r) {
      if (r == q) continue;
      dist.push_back(kernel::distance(data.row_ptr(r), data.row_ptr(q), n, p));
    }
    for (std::size_t t = 0; t < targets.size(); ++t) {
      auto kth = dist.begin() + static_cast<std::ptrdiff_t>(targets[t] - 1);
      std::nth_element(dist.begin(), kth, dist.end());
      per_target[t].push_back(*kth);
    }
  }
  std::vector<double> out;
  for (auto& values : per_target) {
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double median = values[mid];
    if (values.size() % 2 == 0) {
      const double below = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
      median = 0.5 * (median + below);
    }
    out.push_back(median);
  }
  return out;
}

double calibrate_epsilon(const DataSet& data, const CalibrationSpec& spec, NormOrder p) {
  const std::size_t target = spec.target_nn;
  if (target >= data.size()) {
    std::ostringstream msg;
    msg << "calibrate_epsilon: target_nn " << target << " needs s > target_nn (s = " << data.size()
        << ")";
    throw InputError(msg.str());
  }
  return calibrate_epsilons(data, spec, std::span<const std::size_t>(&target, 1), p).front();
}

std::vector<std::uint64_t> match_ids(std::span<const Match> matches) {
  std::vector<std::uint64_t> ids;
  ids.reserve(matches.size());
  for (const auto& m : matches) ids.push_back(m.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace lpcascade
