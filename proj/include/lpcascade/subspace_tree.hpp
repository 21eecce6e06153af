#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lpcascade/block_projection.hpp"
#include "lpcascade/covariance_pca.hpp"
#include "lpcascade/dataset.hpp"
#include "lpcascade/lp_norms.hpp"

namespace lpcascade {

/// Strictly decreasing dimensions dim(U_0) > dim(U_1) > ... > dim(U_t), each
/// dividing its predecessor.
class DimensionSchedule {
 public:
  /// Throws InputError on fewer than two entries, non-decreasing steps, or
  /// indivisible steps. Ratios outside [2, 16] are recorded as warnings.
  explicit DimensionSchedule(std::vector<std::size_t> dims);

  /// Parses "960,480,240".
  static DimensionSchedule parse(std::string_view text);

  std::span<const std::size_t> dims() const noexcept { return dims_; }
  std::size_t dim(std::size_t level) const noexcept { return dims_[level]; }
  /// t, the number of projection levels.
  std::size_t depth() const noexcept { return dims_.size() - 1; }
  /// dim(U_{level-1}) / dim(U_level), level in 1..t.
  std::size_t ratio(std::size_t level) const noexcept { return dims_[level - 1] / dims_[level]; }
  std::span<const std::string> warnings() const noexcept { return warnings_; }
  std::string to_string() const;

  friend bool operator==(const DimensionSchedule& a, const DimensionSchedule& b) {
    return a.dims_ == b.dims_;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::string> warnings_;
};

struct Match {
  std::uint64_t id = 0;
  double distance = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

struct QueryReport {
  std::vector<Match> matches;           // sorted by row order
  std::vector<std::size_t> survivors;   // sigma_0 .. sigma_t
  std::uint64_t cost_s = 0;             // instrumented operation count
  std::uint64_t cost_l = 0;             // s * dim(U_0)
  double ratio = 0.0;                   // cost_l / cost_s
  double epsilon = 0.0;
};

/// cost_s = sum_{i=1..t} sigma_i * dim(U_{i-1}) + s * dim(U_t).
std::uint64_t cascade_cost(const DimensionSchedule& schedule, std::span<const std::size_t> survivors,
                           std::size_t s);

/// (1/c) * sum_i dim(U_{i-1}) / dim(U_i) + dim(U_t) * s.
double estimate_cost(const DimensionSchedule& schedule, std::size_t s, double c);

/// Least-squares c in c * sigma_i = 1 / dim(U_{i+1}) over every (i, report)
/// with i < t and sigma_i > 0. Throws InputError when no such pair exists.
double fit_const(std::span<const QueryReport> reports, const DimensionSchedule& schedule);

struct BuildOptions {
  ProjectionMode mode = ProjectionMode::orthogonal;
  NormOrder norm = NormOrder::finite(2.0);
  /// Moment matrix the adaptive fit diagonalizes.
  MomentKind moment = MomentKind::raw;
};

struct LevelDiagnostics {
  DiversionReport diversion;
  std::size_t unconverged = 0;  // blocks whose power iteration hit the cap
};

struct QueryOptions {
  /// Workers sharing the outer loop over items; 0 picks hardware concurrency.
  unsigned threads = 1;
};

/// Chain of projection levels U_0 -> U_1 -> ... -> U_t with a projected copy
/// of the database at every level. Immutable after construction; queries are
/// safe to run concurrently.
class SubspaceIndex {
 public:
  /// Level i is fitted (adaptive) and evaluated on the level i-1 copy.
  static SubspaceIndex build(std::shared_ptr<const DataSet> data, DimensionSchedule schedule,
                             const BuildOptions& options);

  /// Reassembles an index from stored parts (see index_io.hpp). `features`
  /// holds one s x dim(U_i) row-major matrix per level i = 1..t. `tolerance`
  /// is the relative storage error of the features (0 when exact).
  static SubspaceIndex assemble(std::shared_ptr<const DataSet> data, DimensionSchedule schedule,
                                NormOrder norm, ProjectionMode mode,
                                std::vector<ProjectionLevel> levels,
                                std::vector<std::vector<double>> features, double tolerance);

  /// All items x with lp_distance(x, y) < epsilon, with survivor counts and cost.
  QueryReport range_query(std::span<const double> y, double epsilon,
                          const QueryOptions& options = {}) const;

  /// Projections of y at levels 1..t (element i-1 is level i).
  std::vector<std::vector<double>> project_query(std::span<const double> y) const;

  const DataSet& data() const noexcept { return *data_; }
  std::shared_ptr<const DataSet> data_handle() const noexcept { return data_; }
  const DimensionSchedule& schedule() const noexcept { return schedule_; }
  NormOrder norm() const noexcept { return norm_; }
  ProjectionMode mode() const noexcept { return mode_; }
  std::size_t size() const noexcept { return data_->size(); }
  std::size_t depth() const noexcept { return levels_.size(); }

  /// Level i in 1..t.
  const ProjectionLevel& level(std::size_t i) const noexcept { return levels_[i - 1]; }
  std::span<const double> features(std::size_t level, std::size_t row) const noexcept;
  std::span<const double> feature_matrix(std::size_t level) const noexcept {
    return features_[level - 1];
  }
  const std::vector<LevelDiagnostics>& diagnostics() const noexcept { return diagnostics_; }
  double storage_tolerance() const noexcept { return storage_tolerance_; }

 private:
  SubspaceIndex() = default;
  void finish();

  std::shared_ptr<const DataSet> data_;
  DimensionSchedule schedule_{{2, 1}};
  NormOrder norm_ = NormOrder::finite(2.0);
  ProjectionMode mode_ = ProjectionMode::orthogonal;
  std::vector<ProjectionLevel> levels_;
  std::vector<std::vector<double>> features_;
  std::vector<LevelDiagnostics> diagnostics_;
  std::vector<double> row_norms_;  // ||x_i||_p, bounds the rounding slack
  double storage_tolerance_ = 0.0;
};

}  // namespace lpcascade
