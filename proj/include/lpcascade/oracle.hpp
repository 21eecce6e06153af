#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lpcascade/dataset.hpp"
#include "lpcascade/lp_norms.hpp"
#include "lpcascade/subspace_tree.hpp"

namespace lpcascade {

struct RangeResult {
  std::vector<Match> matches;  // row order
  std::uint64_t cost_l = 0;    // s * n
};

/// Linear scan: every row with lp_distance(x, y) < epsilon.
RangeResult brute_force_range(const DataSet& data, std::span<const double> y, double epsilon,
                              NormOrder p);

struct CalibrationSpec {
  std::size_t sample_size = 400;
  std::size_t target_nn = 52;
  std::uint64_t seed = 1;
};

/// Median, over `sample_size` rows drawn without replacement, of the distance
/// from the row to its `target_nn`-th nearest other row (the row itself is
/// excluded from its own scan).
double calibrate_epsilon(const DataSet& data, const CalibrationSpec& spec, NormOrder p);

/// Same value, for several targets at once (one scan per sampled row).
std::vector<double> calibrate_epsilons(const DataSet& data, const CalibrationSpec& spec,
                                       std::span<const std::size_t> targets, NormOrder p);

/// Ids of `matches`, sorted.
std::vector<std::uint64_t> match_ids(std::span<const Match> matches);

}  // namespace lpcascade
