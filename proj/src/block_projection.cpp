#include "lpcascade/block_projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lpcascade/covariance_pca.hpp"
#include "lpcascade/error.hpp"

namespace lpcascade {

namespace {

// m^(1/p), with 1/inf := 0.
double secting_constant(std::size_t m, NormOrder p) {
  return std::pow(static_cast<double>(m), p.inverse());
}

}  // namespace

std::string_view to_string(ProjectionMode mode) noexcept {
  return mode == ProjectionMode::orthogonal ? "orthogonal" : "adaptive";
}

ProjectionMode parse_projection_mode(std::string_view text) {
  if (text == "orthogonal" || text == "ortho") return ProjectionMode::orthogonal;
  if (text == "adaptive" || text == "pca") return ProjectionMode::adaptive;
  throw InputError("unknown projection mode '" + std::string(text) + "'");
}

BlockPartition BlockPartition::split(std::size_t dim_in, std::size_t dim_out) {
  if (dim_in == 0 || dim_out == 0 || dim_out > dim_in || dim_in % dim_out != 0) {
    std::ostringstream msg;
    msg << "cannot split dimension " << dim_in << " into " << dim_out << " equal blocks";
    throw InputError(msg.str());
  }
  return BlockPartition{dim_in, dim_out, dim_in / dim_out};
}

double lipschitz_scale(std::span<const double> direction, NormOrder p) {
  return std::max(1.0, lp_norm(direction, p.dual()));
}

BlockProjector BlockProjector::adaptive(std::vector<double> direction, NormOrder norm) {
  require_finite(direction, "adaptive projector direction");
  const double len = lp_norm(direction, NormOrder::finite(2.0));
  if (len == 0.0) throw InputError("adaptive projector direction must be nonzero");
  // Already-unit directions (e.g. read back from an index file) stay bit-exact.
  if (std::abs(len - 1.0) > 1e-12) {
    for (double& v : direction) v /= len;
  }
  orient_along_ones(direction);

  BlockProjector proj;
  proj.mode_ = ProjectionMode::adaptive;
  proj.scale_ = lpcascade::lipschitz_scale(direction, norm);
  proj.direction_ = std::move(direction);
  proj.norm_ = norm;
  return proj;
}

double orthogonal_feature(std::span<const double> block, NormOrder p) {
  if (block.empty()) throw InputError("orthogonal_feature: empty block");
  require_finite(block, "orthogonal_feature");
  const double m = static_cast<double>(block.size());
  const double mean = std::accumulate(block.begin(), block.end(), 0.0) / m;
  return secting_constant(block.size(), p) * mean;
}

double adaptive_feature(std::span<const double> block, const BlockProjector& proj, NormOrder p) {
  if (proj.mode() != ProjectionMode::adaptive) {
    throw InputError("adaptive_feature: projector is not adaptive");
  }
  const auto z = proj.direction();
  if (block.size() != z.size()) {
    std::ostringstream msg;
    msg << "adaptive_feature: block has " << block.size() << " entries, direction has " << z.size();
    throw InputError(msg.str());
  }
  require_finite(block, "adaptive_feature");
  const double scale = p == proj.norm() ? proj.lipschitz_scale() : lipschitz_scale(z, p);
  return std::inner_product(z.begin(), z.end(), block.begin(), 0.0) / scale;
}

double diversion(const BlockProjector& proj, std::size_t m) {
  if (proj.mode() != ProjectionMode::adaptive) {
    throw InputError("diversion is only defined for adaptive projectors");
  }
  if (proj.direction().size() != m) throw InputError("diversion: block size mismatch");
  const auto z = proj.direction();
  const double along = std::abs(std::accumulate(z.begin(), z.end(), 0.0));
  // |<z,o>| <= sqrt(m) by Cauchy-Schwarz; clamp the rounding excess.
  return std::max(0.0, std::sqrt(static_cast<double>(m)) - along);
}

double q_mapping_norm(std::size_t m, NormOrder p) {
  if (m == 0) throw InputError("q_mapping_norm: m must be positive");
  if (p.is_infinite()) throw InputError("q_mapping_norm: undefined for p = inf");
  if (p.p() == 2.0) return 1.0;
  return std::pow(static_cast<double>(m), (p.p() - 2.0) / p.p());
}

ProjectionLevel::ProjectionLevel(BlockPartition partition, std::vector<BlockProjector> projectors,
                                 NormOrder norm)
    : partition_(partition), projectors_(std::move(projectors)), norm_(norm) {
  if (partition_.block_count * partition_.block_size != partition_.dim_in ||
      partition_.block_count == 0) {
    throw InputError("ProjectionLevel: inconsistent partition");
  }
  if (projectors_.size() != partition_.block_count) {
    std::ostringstream msg;
    msg << "ProjectionLevel: " << projectors_.size() << " projectors for "
        << partition_.block_count << " blocks";
    throw InputError(msg.str());
  }
  mode_ = projectors_.front().mode();
  for (const auto& proj : projectors_) {
    if (proj.mode() != mode_) throw InputError("ProjectionLevel: mixed projector modes");
    if (mode_ == ProjectionMode::adaptive && proj.direction().size() != partition_.block_size) {
      throw InputError("ProjectionLevel: projector direction does not match block size");
    }
  }
  const std::size_t m = partition_.block_size;
  orthogonal_scale_ = secting_constant(m, norm_) / static_cast<double>(m);
  if (mode_ == ProjectionMode::adaptive) {
    scaled_weights_.reserve(partition_.dim_in);
    for (const auto& proj : projectors_) {
      const double scale = proj.norm() == norm_ ? proj.lipschitz_scale()
                                                : lipschitz_scale(proj.direction(), norm_);
      for (double z : proj.direction()) scaled_weights_.push_back(z / scale);
    }
  }
}

ProjectionLevel ProjectionLevel::orthogonal(BlockPartition partition, NormOrder norm) {
  return ProjectionLevel(partition,
                         std::vector<BlockProjector>(partition.block_count, BlockProjector::orthogonal()),
                         norm);
}

std::vector<double> ProjectionLevel::project(std::span<const double> x) const {
  if (x.size() != partition_.dim_in) {
    std::ostringstream msg;
    msg << "project_level: input has dimension " << x.size() << ", level expects "
        << partition_.dim_in;
    throw InputError(msg.str());
  }
  require_finite(x, "project_level");
  std::vector<double> out(partition_.block_count);
  project_into(x.data(), out.data());
  return out;
}

void ProjectionLevel::project_into(const double* x, double* out) const noexcept {
  const std::size_t m = partition_.block_size;
  const std::size_t f = partition_.block_count;
  if (mode_ == ProjectionMode::orthogonal) {
    for (std::size_t j = 0; j < f; ++j) {
      const double* b = x + j * m;
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += b[i];
      out[j] = orthogonal_scale_ * s;
    }
    return;
  }
  const double* w = scaled_weights_.data();
  for (std::size_t j = 0; j < f; ++j) {
    const double* b = x + j * m;
    const double* wj = w + j * m;
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += wj[i] * b[i];
    out[j] = s;
  }
}

double DiversionReport::max() const noexcept {
  return per_block.empty() ? 0.0 : *std::max_element(per_block.begin(), per_block.end());
}

double DiversionReport::mean() const noexcept {
  if (per_block.empty()) return 0.0;
  return std::accumulate(per_block.begin(), per_block.end(), 0.0) /
         static_cast<double>(per_block.size());
}

DiversionReport diversion_report(const ProjectionLevel& level) {
  DiversionReport report;
  report.block_size = level.partition().block_size;
  report.per_block.assign(level.partition().block_count, 0.0);
  if (level.mode() == ProjectionMode::adaptive) {
    for (std::size_t j = 0; j < report.per_block.size(); ++j) {
      report.per_block[j] = diversion(level.projectors()[j], report.block_size);
    }
  }
  return report;
}

}  // namespace lpcascade
