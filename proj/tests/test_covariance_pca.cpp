#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lpcascade/covariance_pca.hpp"
#include "lpcascade/error.hpp"
#include "oracles/oracles.hpp"

using namespace lpcascade;

namespace {

void check_matrix(const SymmetricMatrix& got, const oracle::Matrix& want, double rel) {
  double scale = 0.0;
  for (const auto& row : want) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  for (std::size_t i = 0; i < want.size(); ++i) {
    for (std::size_t j = 0; j < want.size(); ++j) {
      CHECK(std::abs(got(i, j) - want[i][j]) <= rel * std::max(1e-300, scale));
    }
  }
}

SymmetricMatrix sym2(double a, double b, double c) {
  return SymmetricMatrix::from_values(2, {a, b, b, c});
}

}  // namespace

TEST_CASE("accumulate examples") {
  CovarianceAccumulator acc(2);
  acc.add(std::vector<double>{1, 1});
  acc.add(std::vector<double>{3, 3});
  check_matrix(acc.covariance(), oracle::two_pass_covariance({{1, 1}, {3, 3}}), 1e-12);
  // Deviations are +-1 and the divisor is count - 1 = 1.
  CHECK(acc.covariance()(0, 1) == doctest::Approx(2.0));
  CHECK(acc.second_moment()(0, 1) == doctest::Approx(5.0));

  CovarianceAccumulator one(3);
  one.add(std::vector<double>{4, 5, 6});
  const auto single = one.covariance();
  for (double v : single.values()) CHECK(v == 0.0);

  CovarianceAccumulator cross(2);
  for (auto b : std::vector<std::vector<double>>{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}) cross.add(b);
  const auto c = cross.covariance();
  CHECK(c(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(c(1, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(c(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("accumulator errors") {
  CovarianceAccumulator acc(2);
  CHECK_THROWS_AS(acc.covariance(), InputError);
  CHECK_THROWS_AS(acc.second_moment(), InputError);
  CHECK_THROWS_AS(acc.add(std::vector<double>{1, 2, 3}), InputError);
  CHECK_THROWS_AS(acc.add(std::vector<double>{1, NAN}), InputError);
  CHECK_THROWS_AS(CovarianceAccumulator(0), InputError);
  CovarianceAccumulator other(3);
  CHECK_THROWS_AS(acc.merge(other), InputError);
  CHECK(acc.count() == 0);
}

TEST_CASE("streaming equals two-pass on 1e4 samples, both moments") {
  std::mt19937_64 gen(19);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> rows;
  CovarianceAccumulator acc(5);
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> r(5);
    const double g = nd(gen);
    for (std::size_t j = 0; j < 5; ++j) r[j] = 100.0 + 0.7 * g + nd(gen) * (j + 1);
    rows.push_back(r);
    acc.add(r);
  }
  CHECK(acc.count() == 10000);
  check_matrix(acc.covariance(), oracle::two_pass_covariance(rows), 1e-9);
  check_matrix(acc.second_moment(), oracle::raw_moment(rows), 1e-9);
}

TEST_CASE("order and sharding do not matter") {
  std::mt19937_64 gen(23);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 3000; ++i) rows.push_back(oracle::random_vector(gen, 4, -2, 9));
  CovarianceAccumulator forward(4);
  for (const auto& r : rows) forward.add(r);
  auto shuffled = rows;
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  CovarianceAccumulator permuted(4);
  for (const auto& r : shuffled) permuted.add(r);

  std::vector<CovarianceAccumulator> shards(7, CovarianceAccumulator(4));
  for (std::size_t i = 0; i < rows.size(); ++i) shards[i % 7].add(rows[i]);
  CovarianceAccumulator merged_a(4);
  for (const auto& s : shards) merged_a.merge(s);
  CovarianceAccumulator merged_b(4);
  for (auto it = shards.rbegin(); it != shards.rend(); ++it) merged_b.merge(*it);

  const auto want = forward.covariance();
  oracle::Matrix w(4, std::vector<double>(4));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) w[i][j] = want(i, j);
  }
  check_matrix(permuted.covariance(), w, 1e-9);
  check_matrix(merged_a.covariance(), w, 1e-9);
  check_matrix(merged_b.covariance(), w, 1e-9);
  CHECK(merged_a.count() == rows.size());
}

TEST_CASE("finalize is PSD") {
  std::mt19937_64 gen(29);
  CovarianceAccumulator acc(6);
  for (int i = 0; i < 500; ++i) acc.add(oracle::random_vector(gen, 6));
  const auto c = acc.covariance();
  for (int i = 0; i < 100; ++i) CHECK(c.quadratic_form(oracle::random_vector(gen, 6)) >= 0.0);
}

TEST_CASE("first_principal_component examples") {
  const double r = 1 / std::sqrt(2.0);
  auto pc = first_principal_component(sym2(1, 1, 1));
  CHECK(pc.direction[0] == doctest::Approx(r));
  CHECK(pc.direction[1] == doctest::Approx(r));
  CHECK(pc.eigenvalue == doctest::Approx(2.0));

  pc = first_principal_component(sym2(3, 0, 1));
  CHECK(pc.direction[0] == doctest::Approx(1.0));
  CHECK(pc.direction[1] == doctest::Approx(0.0));
  CHECK(pc.eigenvalue == doctest::Approx(3.0));

  pc = first_principal_component(sym2(2, 1, 2));
  const auto e = oracle::dominant_2x2(2, 1, 2);
  CHECK(pc.eigenvalue == doctest::Approx(e.value));
  CHECK(pc.eigenvalue == doctest::Approx(3.0));
  CHECK(std::abs(pc.direction[0] * e.x + pc.direction[1] * e.y) == doctest::Approx(1.0));
  CHECK(pc.direction[0] == doctest::Approx(r));
}

TEST_CASE("degenerate inputs") {
  const auto zero = first_principal_component(SymmetricMatrix(3));
  CHECK(zero.eigenvalue == 0.0);
  for (double v : zero.direction) CHECK(v == doctest::Approx(1 / std::sqrt(3.0)));

  // o is orthogonal to the dominant eigenvector (1, -1).
  const auto anti = first_principal_component(sym2(2, -1.5, 2));
  CHECK(anti.eigenvalue == doctest::Approx(3.5));
  CHECK(std::abs(anti.direction[0]) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(anti.direction[0] > 0);  // tie on <z, o>: first component positive

  const auto iso = first_principal_component(sym2(1, 0, 1));
  CHECK(iso.eigenvalue == doctest::Approx(1.0));

  CHECK_THROWS_AS(SymmetricMatrix::from_values(2, {1, 0.5, 0.4, 1}), InputError);
  CHECK_THROWS_AS(SymmetricMatrix::from_values(2, {1, 0.5, 0.5}), InputError);
  CHECK_THROWS_AS(first_principal_component(SymmetricMatrix()), InputError);
}

TEST_CASE("Rayleigh maximality and eigen residual on random PSD matrices") {
  std::mt19937_64 gen(37);
  for (std::size_t m : {2u, 3u, 4u, 8u, 16u}) {
    for (int trial = 0; trial < 30; ++trial) {
      // Gram matrix of random vectors.
      SymmetricMatrix c(m);
      for (int k = 0; k < 3; ++k) {
        const auto v = oracle::random_vector(gen, m);
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < m; ++j) c(i, j) += v[i] * v[j];
        }
      }
      const auto pc = first_principal_component(c);
      CHECK(pc.converged);
      double len = 0.0, along = 0.0;
      for (double v : pc.direction) {
        len += v * v;
        along += v;
      }
      CHECK(std::abs(std::sqrt(len) - 1) <= 1e-9);
      CHECK(along >= -1e-12);
      const auto cz = c.multiply(pc.direction);
      double res = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        res += (cz[i] - pc.eigenvalue * pc.direction[i]) * (cz[i] - pc.eigenvalue * pc.direction[i]);
      }
      CHECK(std::sqrt(res) <= 1e-6 * (pc.eigenvalue + c.trace() / double(m)));
      for (int probe = 0; probe < 100; ++probe) {
        auto u = oracle::random_vector(gen, m);
        const double n = oracle::norm(u, 2);
        for (double& v : u) v /= n;
        CHECK(c.quadratic_form(u) <= pc.eigenvalue * (1 + 1e-6));
      }
    }
  }
}

TEST_CASE("power iteration agrees with the 2x2 closed form") {
  std::mt19937_64 gen(43);
  std::uniform_real_distribution<double> u(-1, 1);
  int compared = 0;
  for (int i = 0; i < 2000; ++i) {
    const double a = u(gen), b = u(gen), c = u(gen), d = u(gen);
    // [[a, b], [c, d]]^T [[a, b], [c, d]] is PSD.
    const double m00 = a * a + c * c, m01 = a * b + c * d, m11 = b * b + d * d;
    const auto want = oracle::dominant_2x2(m00, m01, m11);
    const auto pc = first_principal_component(sym2(m00, m01, m11));
    CHECK(pc.eigenvalue == doctest::Approx(want.value).epsilon(1e-8));
    const double gap = std::sqrt((m00 - m11) * (m00 - m11) + 4 * m01 * m01);
    if (gap > 1e-6 * (m00 + m11)) {
      ++compared;
      CHECK(std::abs(pc.direction[0] * want.x + pc.direction[1] * want.y) >= 1 - 1e-8);
      const auto closed = principal_component_2x2(sym2(m00, m01, m11));
      CHECK(std::abs(closed.direction[0] * want.x + closed.direction[1] * want.y) >= 1 - 1e-8);
    }
  }
  CHECK(compared > 1900);
}

TEST_CASE("moment kind parsing") {
  CHECK(parse_moment_kind("raw") == MomentKind::raw);
  CHECK(parse_moment_kind("centered") == MomentKind::centered);
  CHECK(to_string(MomentKind::raw) == "raw");
  CHECK_THROWS_AS(parse_moment_kind("median"), InputError);
}
