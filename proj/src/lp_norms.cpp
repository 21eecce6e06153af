#include "lpcascade/lp_norms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "lpcascade/error.hpp"

namespace lpcascade {

namespace {

enum class Exponent { one, two, four, general };

Exponent classify(double p) noexcept {
  if (p == 1.0) return Exponent::one;
  if (p == 2.0) return Exponent::two;
  if (p == 4.0) return Exponent::four;
  return Exponent::general;
}

inline double pow_abs(double a, Exponent e, double p) noexcept {
  switch (e) {
    case Exponent::one:
      return a;
    case Exponent::two:
      return a * a;
    case Exponent::four: {
      const double sq = a * a;
      return sq * sq;
    }
    case Exponent::general:
      break;
  }
  return std::pow(a, p);
}

inline double root(double s, Exponent e, double p) noexcept {
  switch (e) {
    case Exponent::one:
      return s;
    case Exponent::two:
      return std::sqrt(s);
    case Exponent::four:
      return std::sqrt(std::sqrt(s));
    case Exponent::general:
      break;
  }
  return std::pow(s, 1.0 / p);
}

// Max-factored evaluation: M * (sum (|e_i|/M)^p)^(1/p), M = max |e_i|.
template <typename Elem>
double norm_impl(std::size_t n, Elem elem, NormOrder order) noexcept {
  if (order.is_infinite()) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(elem(i)));
    return m;
  }
  const double p = order.p();
  const Exponent e = classify(p);
  if (e == Exponent::one) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(elem(i));
    return s;
  }
  double big = 0.0;
  for (std::size_t i = 0; i < n; ++i) big = std::max(big, std::abs(elem(i)));
  if (big == 0.0) return 0.0;
  const double inv = 1.0 / big;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += pow_abs(std::abs(elem(i)) * inv, e, p);
  return big * root(s, e, p);
}

}  // namespace

NormOrder NormOrder::finite(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    std::ostringstream msg;
    msg << "norm order p must be a finite value >= 1 (got " << p << ")";
    throw InputError(msg.str());
  }
  return NormOrder(false, p);
}

NormOrder NormOrder::parse(std::string_view text) {
  std::string_view t = text;
  if (!t.empty() && (t.front() == 'l' || t.front() == 'L')) t.remove_prefix(1);
  if (t == "inf" || t == "infinity" || t == "INF" || t == "Inf" || t == "max") return infinity();
  double p = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, p);
  if (ec != std::errc() || ptr != last) {
    throw InputError("cannot parse norm order '" + std::string(text) + "'");
  }
  if (std::isinf(p)) return infinity();
  return finite(p);
}

double NormOrder::p() const noexcept {
  return infinite_ ? std::numeric_limits<double>::infinity() : p_;
}

NormOrder NormOrder::dual() const noexcept {
  if (infinite_) return NormOrder(false, 1.0);
  if (p_ == 1.0) return infinity();
  return NormOrder(false, p_ / (p_ - 1.0));
}

std::string NormOrder::label() const { return "l" + to_string(); }

std::string NormOrder::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream out;
  out << p_;
  return out.str();
}

void require_finite(std::span<const double> v, std::string_view what) {
  if (v.empty()) throw InputError(std::string(what) + ": empty vector");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      std::ostringstream msg;
      msg << what << ": non-finite component at index " << i;
      throw InputError(msg.str());
    }
  }
}

double lp_norm(std::span<const double> v, NormOrder p) {
  require_finite(v, "lp_norm");
  return norm_impl(v.size(), [&](std::size_t i) { return v[i]; }, p);
}

double lp_distance(std::span<const double> x, std::span<const double> y, NormOrder p) {
  if (x.size() != y.size()) {
    std::ostringstream msg;
    msg << "lp_distance: dimension mismatch (" << x.size() << " vs " << y.size() << ")";
    throw InputError(msg.str());
  }
  require_finite(x, "lp_distance");
  require_finite(y, "lp_distance");
  return kernel::distance(x.data(), y.data(), x.size(), p);
}

bool check_norm_equivalence(std::span<const double> v, NormOrder q, NormOrder p) {
  if (q.is_infinite() || !(q.p() < p.p())) {
    throw InputError("check_norm_equivalence requires finite q < p");
  }
  const double nq = lp_norm(v, q);
  const double np = lp_norm(v, p);
  const double m = static_cast<double>(v.size());
  const double gap = q.inverse() - p.inverse();
  const double up = std::pow(m, gap);
  const double down = std::pow(m, -gap);
  constexpr double tol = 1e-9;
  auto le = [](double a, double b) { return a <= b + tol * std::max(std::abs(a), std::abs(b)); };
  const bool first = le(np, nq) && le(nq, up * np);
  const bool second = le(down * nq, np) && le(np, nq);
  return first && second;
}

namespace kernel {

double distance(const double* x, const double* y, std::size_t n, NormOrder p) noexcept {
  return norm_impl(n, [&](std::size_t i) { return x[i] - y[i]; }, p);
}

double power_sum(const double* x, const double* y, std::size_t n, NormOrder order,
                 double limit) noexcept {
  if (order.is_infinite()) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      m = std::max(m, std::abs(x[i] - y[i]));
      if (m > limit) return m;
    }
    return m;
  }
  const double p = order.p();
  const Exponent e = classify(p);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += pow_abs(std::abs(x[i] - y[i]), e, p);
    if (s > limit) return s;
  }
  return s;
}

double raise(double t, NormOrder order) noexcept {
  if (order.is_infinite()) return t;
  const double p = order.p();
  return pow_abs(t, classify(p), p);
}

}  // namespace kernel

}  // namespace lpcascade
