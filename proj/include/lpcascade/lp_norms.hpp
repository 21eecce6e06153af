#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace lpcascade {

/// Exponent of an l_p norm: a finite p >= 1, or the Chebyshev (max) norm.
class NormOrder {
 public:
  static NormOrder finite(double p);
  static NormOrder infinity() noexcept { return NormOrder(true, 0.0); }

  /// Accepts "1", "2", "4", "1.5", "inf", "linf", "l2", ...
  static NormOrder parse(std::string_view text);

  bool is_infinite() const noexcept { return infinite_; }

  /// The exponent; +inf for the max norm.
  double p() const noexcept;

  /// 1/p, with 1/inf := 0.
  double inverse() const noexcept { return infinite_ ? 0.0 : 1.0 / p_; }

  /// Hölder conjugate: p/(p-1), with 1* = inf and inf* = 1.
  NormOrder dual() const noexcept;

  /// "l1", "l2", "l4", "linf", "l1.5".
  std::string label() const;

  /// Plain numeric text as accepted by parse(): "1", "2", "inf".
  std::string to_string() const;

  friend bool operator==(const NormOrder&, const NormOrder&) = default;

 private:
  NormOrder(bool infinite, double p) noexcept : infinite_(infinite), p_(p) {}

  bool infinite_;
  double p_;
};

/// Throws InputError on NaN/inf components or an empty vector.
void require_finite(std::span<const double> v, std::string_view what);

double lp_norm(std::span<const double> v, NormOrder p);
double lp_distance(std::span<const double> x, std::span<const double> y, NormOrder p);

/// True iff ||v||_p <= ||v||_q <= m^(1/q - 1/p) ||v||_p and
/// m^(1/p - 1/q) ||v||_q <= ||v||_p <= ||v||_q, at relative tolerance 1e-9.
/// Requires q < p with q finite.
bool check_norm_equivalence(std::span<const double> v, NormOrder q, NormOrder p);

namespace kernel {

// Unchecked hot-path kernels. Inputs must be finite and of equal length.

/// Same value as lp_distance (bit for bit).
double distance(const double* x, const double* y, std::size_t n, NormOrder p) noexcept;

/// Sum of |x_i - y_i|^p (max |x_i - y_i| for inf). Stops accumulating and
/// returns early once the partial value exceeds `limit`.
double power_sum(const double* x, const double* y, std::size_t n, NormOrder p,
                 double limit) noexcept;

/// t^p (t for inf).
double raise(double t, NormOrder p) noexcept;

}  // namespace kernel

}  // namespace lpcascade
