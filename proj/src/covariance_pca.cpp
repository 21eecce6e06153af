#include "lpcascade/covariance_pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lpcascade/error.hpp"

namespace lpcascade {

namespace {

constexpr double kSymmetryTolerance = 1e-9;
constexpr double kDirectionTolerance = 1e-10;
constexpr std::size_t kMaxIterations = 10000;

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_symmetric(const SymmetricMatrix& c) {
  const double scale = std::max(1.0, max_abs(c.values()));
  for (std::size_t i = 0; i < c.dim(); ++i) {
    for (std::size_t j = i + 1; j < c.dim(); ++j) {
      if (std::abs(c(i, j) - c(j, i)) > kSymmetryTolerance * scale) {
        std::ostringstream msg;
        msg << "matrix is not symmetric at (" << i << "," << j << ")";
        throw InputError(msg.str());
      }
    }
  }
}

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> ones_direction(std::size_t m) {
  return std::vector<double>(m, 1.0 / std::sqrt(static_cast<double>(m)));
}

struct PowerRun {
  std::vector<double> v;
  std::size_t iterations = 0;
  bool converged = false;
};

// Power iteration with repeated squaring of the (rescaled) iteration matrix.
PowerRun power_iterate(const SymmetricMatrix& c, std::vector<double> v) {
  const std::size_t m = c.dim();
  std::vector<double> a(c.values().begin(), c.values().end());
  std::vector<double> sq(m * m);
  std::vector<double> w(m);
  PowerRun run;
  for (std::size_t it = 1; it <= kMaxIterations; ++it) {
    run.iterations = it;
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += a[i * m + k] * v[k];
      w[i] = s;
    }
    const double len = l2(w);
    if (len == 0.0) {
      // v lies in the null space of the current power; nothing to improve.
      run.converged = true;
      break;
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      w[i] /= len;
      diff += (w[i] - v[i]) * (w[i] - v[i]);
    }
    v.swap(w);
    if (std::sqrt(diff) < kDirectionTolerance) {
      run.converged = true;
      break;
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += a[i * m + k] * a[k * m + j];
        sq[i * m + j] = s;
      }
    }
    const double scale = max_abs(sq);
    if (scale == 0.0) {
      run.converged = true;
      break;
    }
    for (std::size_t i = 0; i < m * m; ++i) a[i] = sq[i] / scale;
  }
  run.v = std::move(v);
  return run;
}

}  // namespace

SymmetricMatrix SymmetricMatrix::from_values(std::size_t dim, std::vector<double> values) {
  if (values.size() != dim * dim) throw InputError("SymmetricMatrix: wrong number of entries");
  SymmetricMatrix c(dim);
  c.values_ = std::move(values);
  check_symmetric(c);
  return c;
}

double SymmetricMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double SymmetricMatrix::quadratic_form(std::span<const double> u) const {
  if (u.size() != dim_) throw InputError("quadratic_form: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) s += u[i] * (*this)(i, j) * u[j];
  }
  return s;
}

std::vector<double> SymmetricMatrix::multiply(std::span<const double> u) const {
  if (u.size() != dim_) throw InputError("multiply: dimension mismatch");
  std::vector<double> out(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) out[i] += (*this)(i, j) * u[j];
  }
  return out;
}

std::string_view to_string(MomentKind kind) noexcept {
  return kind == MomentKind::centered ? "centered" : "raw";
}

MomentKind parse_moment_kind(std::string_view text) {
  if (text == "centered" || text == "covariance") return MomentKind::centered;
  if (text == "raw" || text == "second-moment") return MomentKind::raw;
  throw InputError("unknown moment kind '" + std::string(text) + "'");
}

CovarianceAccumulator::CovarianceAccumulator(std::size_t dim)
    : dim_(dim), mean_(dim, 0.0), comoment_(dim), delta_(dim, 0.0) {
  if (dim == 0) throw InputError("CovarianceAccumulator: dimension must be positive");
}

void CovarianceAccumulator::add(std::span<const double> block) {
  if (block.size() != dim_) {
    std::ostringstream msg;
    msg << "accumulate: block has " << block.size() << " entries, expected " << dim_;
    throw InputError(msg.str());
  }
  for (double x : block) {
    if (!std::isfinite(x)) throw InputError("accumulate: non-finite component");
  }
  add_unchecked(block.data());
}

void CovarianceAccumulator::add_unchecked(const double* block) noexcept {
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < dim_; ++i) {
    delta_[i] = block[i] - mean_[i];
    mean_[i] += delta_[i] / n;
  }
  // comoment += (n-1)/n * delta delta^T, written symmetrically.
  const double w = (n - 1.0) / n;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double di = w * delta_[i];
    for (std::size_t j = i; j < dim_; ++j) {
      const double v = di * delta_[j];
      comoment_(i, j) += v;
      if (j != i) comoment_(j, i) += v;
    }
  }
}

void CovarianceAccumulator::merge(const CovarianceAccumulator& other) {
  if (other.dim_ != dim_) throw InputError("merge: dimension mismatch");
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  for (std::size_t i = 0; i < dim_; ++i) delta_[i] = other.mean_[i] - mean_[i];
  const double w = na * nb / n;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      comoment_(i, j) += other.comoment_(i, j) + w * delta_[i] * delta_[j];
    }
  }
  for (std::size_t i = 0; i < dim_; ++i) mean_[i] += delta_[i] * nb / n;
  count_ += other.count_;
}

SymmetricMatrix CovarianceAccumulator::covariance() const {
  if (count_ == 0) throw InputError("finalize: no samples accumulated");
  const double divisor = static_cast<double>(std::max<std::size_t>(1, count_ - 1));
  SymmetricMatrix c(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) c(i, j) = comoment_(i, j) / divisor;
  }
  return c;
}

SymmetricMatrix CovarianceAccumulator::second_moment() const {
  if (count_ == 0) throw InputError("finalize: no samples accumulated");
  const double n = static_cast<double>(count_);
  SymmetricMatrix c(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      c(i, j) = comoment_(i, j) / n + mean_[i] * mean_[j];
    }
  }
  return c;
}

void orient_along_ones(std::span<double> z) noexcept {
  const double along = std::accumulate(z.begin(), z.end(), 0.0);
  bool flip = along < 0.0;
  if (std::abs(along) <= 1e-12) {
    auto first = std::find_if(z.begin(), z.end(), [](double v) { return std::abs(v) > 1e-12; });
    flip = first != z.end() && *first < 0.0;
  }
  if (flip) {
    for (double& v : z) v = -v;
  }
}

PrincipalComponent first_principal_component(const SymmetricMatrix& c) {
  const std::size_t m = c.dim();
  if (m == 0) throw InputError("first_principal_component: empty matrix");
  for (double v : c.values()) {
    if (!std::isfinite(v)) throw InputError("first_principal_component: non-finite entry");
  }
  check_symmetric(c);

  PrincipalComponent pc;
  if (max_abs(c.values()) == 0.0) {
    pc.direction = ones_direction(m);
    return pc;
  }

  PowerRun best = power_iterate(c, ones_direction(m));
  double best_value = c.quadratic_form(best.v);
  if (m > 1) {
    // Alternate start: generic enough not to be orthogonal to the dominant
    // eigenspace whenever o is.
    std::vector<double> alt(m);
    for (std::size_t i = 0; i < m; ++i) {
      alt[i] = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + 0.6180339887498949 * static_cast<double>(i));
    }
    const double len = l2(alt);
    for (double& v : alt) v /= len;
    PowerRun other = power_iterate(c, std::move(alt));
    const double other_value = c.quadratic_form(other.v);
    if (other_value > best_value + 1e-12 * std::max(1.0, std::abs(best_value))) {
      other.iterations += best.iterations;
      best = std::move(other);
      best_value = other_value;
    }
  }
  orient_along_ones(best.v);
  pc.direction = std::move(best.v);
  pc.eigenvalue = std::max(0.0, best_value);
  pc.converged = best.converged;
  pc.iterations = best.iterations;

  if (m == 2) {
    const PrincipalComponent closed = principal_component_2x2(c);
    const double gap = 2.0 * std::sqrt(0.25 * (c(0, 0) - c(1, 1)) * (c(0, 0) - c(1, 1)) +
                                       c(0, 1) * c(0, 1));
    const double agree = std::abs(closed.direction[0] * pc.direction[0] +
                                  closed.direction[1] * pc.direction[1]);
    if (gap > 1e-6 * std::abs(c.trace()) && agree < 1.0 - 1e-8) pc.converged = false;
  }
  return pc;
}

PrincipalComponent principal_component_2x2(const SymmetricMatrix& c) {
  if (c.dim() != 2) throw InputError("principal_component_2x2: matrix must be 2 x 2");
  const double a = c(0, 0);
  const double b = 0.5 * (c(0, 1) + c(1, 0));
  const double d = c(1, 1);
  const double half_gap = std::hypot(0.5 * (a - d), b);
  PrincipalComponent pc;
  pc.eigenvalue = 0.5 * (a + d) + half_gap;
  pc.iterations = 0;
  std::vector<double> z(2);
  if (half_gap == 0.0) {
    z = ones_direction(2);
  } else if (a >= d) {
    // (lambda - d, b) is the better-conditioned eigenvector form here.
    z = {pc.eigenvalue - d, b};
  } else {
    z = {b, pc.eigenvalue - a};
  }
  const double len = std::hypot(z[0], z[1]);
  z[0] /= len;
  z[1] /= len;
  orient_along_ones(z);
  pc.direction = std::move(z);
  pc.eigenvalue = std::max(0.0, pc.eigenvalue);
  return pc;
}

}  // namespace lpcascade
