#include "lpcascade/subspace_tree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "lpcascade/error.hpp"

namespace lpcascade {

namespace {

// Relative rounding allowance on projected-level pruning. Projected features
// and distances carry floating-point error proportional to the magnitudes
// involved; pruning only beyond epsilon + slack * (||x|| + ||y||) keeps the
// filter free of false dismissals.
constexpr double kRoundingSlack = 1e-10;

struct WorkerResult {
  std::vector<Match> matches;
  std::vector<std::size_t> survivors;
  std::uint64_t charged = 0;
};

}  // namespace

DimensionSchedule::DimensionSchedule(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw InputError("dimension schedule needs at least two entries");
  if (dims_.back() == 0) throw InputError("dimension schedule entries must be positive");
  for (std::size_t i = 1; i < dims_.size(); ++i) {
    std::ostringstream msg;
    if (!(dims_[i] < dims_[i - 1])) {
      msg << "dimension schedule must be strictly decreasing (" << dims_[i - 1] << " -> "
          << dims_[i] << ")";
      throw InputError(msg.str());
    }
    if (dims_[i - 1] % dims_[i] != 0) {
      msg << "dimension schedule step " << dims_[i - 1] << " -> " << dims_[i]
          << " is not divisible";
      throw InputError(msg.str());
    }
    const std::size_t r = dims_[i - 1] / dims_[i];
    if (r > 16) {
      msg << "ratio " << r << " at step " << dims_[i - 1] << " -> " << dims_[i]
          << " exceeds 16; the projected filter will prune little";
      warnings_.push_back(msg.str());
    }
  }
}

DimensionSchedule DimensionSchedule::parse(std::string_view text) {
  std::vector<std::size_t> dims;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw InputError("empty entry in dimension schedule");
    item = item.substr(first, last - first + 1);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.front() == '-') {
      throw InputError("bad dimension '" + item + "' in schedule");
    }
    dims.push_back(static_cast<std::size_t>(v));
  }
  return DimensionSchedule(std::move(dims));
}

std::string DimensionSchedule::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < dims_.size(); ++i) out << (i ? "," : "") << dims_[i];
  return out.str();
}

std::uint64_t cascade_cost(const DimensionSchedule& schedule, std::span<const std::size_t> survivors,
                           std::size_t s) {
  const std::size_t t = schedule.depth();
  if (survivors.size() != t + 1) throw InputError("cascade_cost: need sigma_0 .. sigma_t");
  std::uint64_t cost = static_cast<std::uint64_t>(s) * schedule.dim(t);
  for (std::size_t i = 1; i <= t; ++i) {
    cost += static_cast<std::uint64_t>(survivors[i]) * schedule.dim(i - 1);
  }
  return cost;
}

double estimate_cost(const DimensionSchedule& schedule, std::size_t s, double c) {
  if (s == 0) throw InputError("estimate_cost: s must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw InputError("estimate_cost: const must be positive");
  double ratios = 0.0;
  for (std::size_t i = 1; i <= schedule.depth(); ++i) ratios += static_cast<double>(schedule.ratio(i));
  return ratios / c + static_cast<double>(schedule.dim(schedule.depth())) * static_cast<double>(s);
}

double fit_const(std::span<const QueryReport> reports, const DimensionSchedule& schedule) {
  if (reports.empty()) throw InputError("fit_const: no reports");
  const std::size_t t = schedule.depth();
  double num = 0.0;
  double den = 0.0;
  for (const auto& r : reports) {
    if (r.survivors.size() != t + 1) throw InputError("fit_const: report does not match schedule");
    for (std::size_t i = 0; i < t; ++i) {
      const double sigma = static_cast<double>(r.survivors[i]);
      if (sigma <= 0.0) continue;
      num += sigma / static_cast<double>(schedule.dim(i + 1));
      den += sigma * sigma;
    }
  }
  if (den == 0.0) throw InputError("fit_const: every sigma_i is zero");
  return num / den;
}

SubspaceIndex SubspaceIndex::build(std::shared_ptr<const DataSet> data, DimensionSchedule schedule,
                                   const BuildOptions& options) {
  if (!data || data->empty()) throw InputError("build_index: empty dataset");
  if (data->dim() != schedule.dim(0)) {
    std::ostringstream msg;
    msg << "build_index: data dimension " << data->dim() << " does not match dim(U_0) = "
        << schedule.dim(0);
    throw InputError(msg.str());
  }
  SubspaceIndex index;
  index.data_ = std::move(data);
  index.schedule_ = std::move(schedule);
  index.norm_ = options.norm;
  index.mode_ = options.mode;

  const std::size_t s = index.data_->size();
  const std::size_t t = index.schedule_.depth();
  std::span<const double> previous = index.data_->values();
  for (std::size_t i = 1; i <= t; ++i) {
    const std::size_t dim_in = index.schedule_.dim(i - 1);
    const std::size_t dim_out = index.schedule_.dim(i);
    const auto partition = BlockPartition::split(dim_in, dim_out);
    LevelDiagnostics diag;

    std::vector<BlockProjector> projectors;
    if (options.mode == ProjectionMode::orthogonal) {
      projectors.assign(dim_out, BlockProjector::orthogonal());
    } else {
      const std::size_t m = partition.block_size;
      std::vector<CovarianceAccumulator> acc(dim_out, CovarianceAccumulator(m));
      for (std::size_t r = 0; r < s; ++r) {
        const double* row = previous.data() + r * dim_in;
        for (std::size_t j = 0; j < dim_out; ++j) acc[j].add_unchecked(row + j * m);
      }
      projectors.reserve(dim_out);
      for (const auto& a : acc) {
        PrincipalComponent pc = first_principal_component(a.finalize(options.moment));
        if (!pc.converged) ++diag.unconverged;
        projectors.push_back(BlockProjector::adaptive(std::move(pc.direction), options.norm));
      }
    }
    ProjectionLevel level(partition, std::move(projectors), options.norm);

    std::vector<double> features(s * dim_out);
    for (std::size_t r = 0; r < s; ++r) {
      level.project_into(previous.data() + r * dim_in, features.data() + r * dim_out);
    }
    diag.diversion = diversion_report(level);
    index.levels_.push_back(std::move(level));
    index.features_.push_back(std::move(features));
    index.diagnostics_.push_back(std::move(diag));
    previous = index.features_.back();
  }
  index.finish();
  return index;
}

SubspaceIndex SubspaceIndex::assemble(std::shared_ptr<const DataSet> data, DimensionSchedule schedule,
                                      NormOrder norm, ProjectionMode mode,
                                      std::vector<ProjectionLevel> levels,
                                      std::vector<std::vector<double>> features, double tolerance) {
  if (!data || data->empty()) throw InputError("index: empty dataset");
  if (data->dim() != schedule.dim(0)) throw InputError("index: data dimension does not match schedule");
  const std::size_t t = schedule.depth();
  if (levels.size() != t || features.size() != t) throw InputError("index: level count mismatch");
  if (!(tolerance >= 0.0)) throw InputError("index: negative storage tolerance");
  const std::size_t s = data->size();
  for (std::size_t i = 1; i <= t; ++i) {
    const auto& level = levels[i - 1];
    if (level.dim_in() != schedule.dim(i - 1) || level.dim_out() != schedule.dim(i)) {
      throw InputError("index: level " + std::to_string(i) + " does not match the schedule");
    }
    if (level.mode() != mode || !(level.norm() == norm)) {
      throw InputError("index: level " + std::to_string(i) + " has inconsistent mode or norm");
    }
    if (features[i - 1].size() != s * schedule.dim(i)) {
      throw InputError("index: feature matrix " + std::to_string(i) + " has the wrong size");
    }
  }
  SubspaceIndex index;
  index.data_ = std::move(data);
  index.schedule_ = std::move(schedule);
  index.norm_ = norm;
  index.mode_ = mode;
  index.levels_ = std::move(levels);
  index.features_ = std::move(features);
  index.storage_tolerance_ = tolerance;
  for (const auto& level : index.levels_) {
    index.diagnostics_.push_back(LevelDiagnostics{diversion_report(level), 0});
  }
  index.finish();
  return index;
}

void SubspaceIndex::finish() {
  const std::size_t s = data_->size();
  row_norms_.resize(s);
  for (std::size_t r = 0; r < s; ++r) row_norms_[r] = lp_norm(data_->row(r), norm_);
}

std::span<const double> SubspaceIndex::features(std::size_t level, std::size_t row) const noexcept {
  const std::size_t d = schedule_.dim(level);
  return {features_[level - 1].data() + row * d, d};
}

std::vector<std::vector<double>> SubspaceIndex::project_query(std::span<const double> y) const {
  if (y.size() != schedule_.dim(0)) {
    std::ostringstream msg;
    msg << "query has dimension " << y.size() << ", index expects " << schedule_.dim(0);
    throw InputError(msg.str());
  }
  require_finite(y, "query");
  std::vector<std::vector<double>> out;
  out.reserve(levels_.size());
  std::span<const double> previous = y;
  for (const auto& level : levels_) {
    std::vector<double> next(level.dim_out());
    level.project_into(previous.data(), next.data());
    out.push_back(std::move(next));
    previous = out.back();
  }
  return out;
}

QueryReport SubspaceIndex::range_query(std::span<const double> y, double epsilon,
                                       const QueryOptions& options) const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InputError("range_query: epsilon must be a positive finite value");
  }
  const auto projected = project_query(y);
  const std::size_t s = data_->size();
  const std::size_t n = schedule_.dim(0);
  const std::size_t t = levels_.size();
  const double y_norm = lp_norm(y, norm_);
  const double slack = kRoundingSlack + storage_tolerance_;

  auto scan = [&](std::size_t begin, std::size_t end, WorkerResult& out) {
    out.survivors.assign(t + 1, 0);
    for (std::size_t r = begin; r < end; ++r) {
      const double bound = epsilon + slack * (row_norms_[r] + y_norm);
      const double bound_pow = kernel::raise(bound, norm_);
      const bool use_root = !std::isfinite(bound_pow);
      bool alive = true;
      for (std::size_t k = t; k >= 1; --k) {
        const std::size_t d = schedule_.dim(k);
        const double* fx = features_[k - 1].data() + r * d;
        const double* fy = projected[k - 1].data();
        out.charged += d;
        const bool prune = use_root ? kernel::distance(fx, fy, d, norm_) >= bound
                                    : kernel::power_sum(fx, fy, d, norm_, bound_pow) >= bound_pow;
        if (prune) {
          alive = false;
          break;
        }
        ++out.survivors[k];
      }
      if (!alive) continue;
      out.charged += n;
      const double dist = kernel::distance(data_->row_ptr(r), y.data(), n, norm_);
      if (dist < epsilon) out.matches.push_back(Match{data_->id(r), dist});
    }
  };

  unsigned workers = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                          : options.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, s));
  std::vector<WorkerResult> parts(workers);
  if (workers <= 1) {
    scan(0, s, parts[0]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (s + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(s, w * chunk);
      const std::size_t end = std::min(s, begin + chunk);
      pool.emplace_back(scan, begin, end, std::ref(parts[w]));
    }
    for (auto& th : pool) th.join();
  }

  QueryReport report;
  report.epsilon = epsilon;
  report.survivors.assign(t + 1, 0);
  for (auto& part : parts) {
    report.matches.insert(report.matches.end(), part.matches.begin(), part.matches.end());
    for (std::size_t k = 1; k <= t; ++k) report.survivors[k] += part.survivors[k];
    report.cost_s += part.charged;
  }
  report.survivors[0] = report.matches.size();
  report.cost_l = static_cast<std::uint64_t>(s) * n;
  report.ratio = static_cast<double>(report.cost_l) / static_cast<double>(report.cost_s);
  return report;
}

}  // namespace lpcascade
