#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lpcascade/block_projection.hpp"
#include "lpcascade/covariance_pca.hpp"
#include "lpcascade/error.hpp"
#include "oracles/oracles.hpp"

using namespace lpcascade;

namespace {

const NormOrder l1 = NormOrder::finite(1.0);
const NormOrder l2 = NormOrder::finite(2.0);
const NormOrder l4 = NormOrder::finite(4.0);
const NormOrder linf = NormOrder::infinity();
const double r2 = std::sqrt(2.0);

std::vector<double> random_unit(std::mt19937_64& gen, std::size_t m) {
  std::normal_distribution<double> nd;
  std::vector<double> z(m);
  double len = 0.0;
  for (double& v : z) {
    v = nd(gen);
    len += v * v;
  }
  for (double& v : z) v /= std::sqrt(len);
  return z;
}

ProjectionLevel random_adaptive_level(std::mt19937_64& gen, std::size_t n, std::size_t f,
                                      NormOrder p) {
  const auto part = BlockPartition::split(n, f);
  std::vector<BlockProjector> projs;
  for (std::size_t j = 0; j < f; ++j) {
    projs.push_back(BlockProjector::adaptive(random_unit(gen, part.block_size), p));
  }
  return ProjectionLevel(part, std::move(projs), p);
}

}  // namespace

TEST_CASE("block partition") {
  const auto p = BlockPartition::split(12, 3);
  CHECK(p.block_count == 3);
  CHECK(p.block_size == 4);
  CHECK_THROWS_AS(BlockPartition::split(10, 3), InputError);
  CHECK_THROWS_AS(BlockPartition::split(4, 8), InputError);
  CHECK_THROWS_AS(BlockPartition::split(4, 0), InputError);
}

TEST_CASE("orthogonal_feature examples") {
  const std::vector<double> b{1, 3};
  CHECK(orthogonal_feature(b, l2) == doctest::Approx(2.82842712));
  CHECK(orthogonal_feature(b, l1) == doctest::Approx(4.0));
  CHECK(orthogonal_feature(b, linf) == doctest::Approx(2.0));
  CHECK(orthogonal_feature(std::vector<double>{5, 5, 5, 5}, l2) == doctest::Approx(10.0));
  CHECK_THROWS_AS(orthogonal_feature(std::vector<double>{}, l2), InputError);
}

TEST_CASE("adaptive_feature examples") {
  const std::vector<double> b{1, 3};
  const auto diag = BlockProjector::adaptive({1 / r2, 1 / r2}, l2);
  CHECK(adaptive_feature(b, diag, l2) == doctest::Approx(4 / r2));
  CHECK(diag.lipschitz_scale() == 1.0);
  const auto axis = BlockProjector::adaptive({1, 0}, l2);
  CHECK(adaptive_feature(b, axis, l2) == doctest::Approx(1.0));

  const auto diag_inf = BlockProjector::adaptive({1 / r2, 1 / r2}, linf);
  CHECK(diag_inf.lipschitz_scale() == doctest::Approx(r2));
  CHECK(adaptive_feature(b, diag_inf, linf) == doctest::Approx(2.0));

  CHECK_THROWS_AS(adaptive_feature(b, BlockProjector::orthogonal(), l2), InputError);
  CHECK_THROWS_AS(adaptive_feature(std::vector<double>{1, 2, 3}, diag, l2), InputError);
  CHECK_THROWS_AS(BlockProjector::adaptive({0, 0}, l2), InputError);
}

TEST_CASE("adaptive feature is 1-Lipschitz under l_inf over 1e5 random pairs") {
  std::mt19937_64 gen(41);
  const auto proj = BlockProjector::adaptive({1 / r2, 1 / r2}, linf);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const auto x = oracle::random_vector(gen, 2, -50, 50);
    const auto y = oracle::random_vector(gen, 2, -50, 50);
    const double lhs = std::abs(adaptive_feature(x, proj, linf) - adaptive_feature(y, proj, linf));
    const double rhs = oracle::distance(x, y, oracle::kInf);
    worst = std::max(worst, lhs / rhs);
  }
  CHECK(worst <= 1.0 + 1e-12);
}

TEST_CASE("adaptive directions are unit length and oriented along ones") {
  const auto p = BlockProjector::adaptive({-3, -4}, l2);
  CHECK(p.direction()[0] == doctest::Approx(0.6));
  CHECK(p.direction()[1] == doctest::Approx(0.8));
  // <z, o> = 0: first nonzero component becomes positive.
  const auto q = BlockProjector::adaptive({-1, 1}, l2);
  CHECK(q.direction()[0] > 0);
  std::mt19937_64 gen(2);
  for (int i = 0; i < 100; ++i) {
    const auto z = BlockProjector::adaptive(oracle::random_vector(gen, 5), l4);
    double len = 0.0, along = 0.0;
    for (double v : z.direction()) {
      len += v * v;
      along += v;
    }
    CHECK(std::abs(std::sqrt(len) - 1.0) <= 1e-9);
    CHECK(along >= 0.0);
    CHECK(z.lipschitz_scale() >= 1.0);
  }
}

TEST_CASE("project_level examples") {
  const auto level = ProjectionLevel::orthogonal(BlockPartition::split(4, 2), l2);
  const auto out = level.project(std::vector<double>{1, 3, 2, 2});
  REQUIRE(out.size() == 2);
  CHECK(out[0] == doctest::Approx(2 * r2));
  CHECK(out[1] == doctest::Approx(2 * r2));
  const auto zero = level.project(std::vector<double>(4, 0.0));
  CHECK(zero == std::vector<double>{0, 0});
  CHECK_THROWS_AS(level.project(std::vector<double>{1, 2, 3}), InputError);

  std::mt19937_64 gen(9);
  const auto ad = random_adaptive_level(gen, 8, 4, l2);
  CHECK(ad.project(std::vector<double>(8, 0.0)) == std::vector<double>(4, 0.0));
}

TEST_CASE("level construction is validated") {
  const auto part = BlockPartition::split(4, 2);
  CHECK_THROWS_AS(ProjectionLevel(part, {BlockProjector::orthogonal()}, l2), InputError);
  CHECK_THROWS_AS(
      ProjectionLevel(part, {BlockProjector::orthogonal(), BlockProjector::adaptive({1, 1}, l2)}, l2),
      InputError);
  CHECK_THROWS_AS(ProjectionLevel(part,
                                  {BlockProjector::adaptive({1, 1, 1}, l2),
                                   BlockProjector::adaptive({1, 1, 1}, l2)},
                                  l2),
                  InputError);
}

TEST_CASE("project_level is 1-Lipschitz for both modes and p in {1,2,4,inf}") {
  std::mt19937_64 gen(123);
  for (const NormOrder p : {l1, l2, l4, linf}) {
    for (std::size_t f : {32u, 16u, 4u}) {
      const auto ortho = ProjectionLevel::orthogonal(BlockPartition::split(64, f), p);
      const auto adapt = random_adaptive_level(gen, 64, f, p);
      for (int i = 0; i < 10000 / 3; ++i) {
        const auto x = oracle::random_vector(gen, 64, -5, 5);
        const auto y = oracle::random_vector(gen, 64, -5, 5);
        const double full = lp_distance(x, y, p);
        for (const auto* level : {&ortho, &adapt}) {
          const double proj = lp_distance(level->project(x), level->project(y), p);
          REQUIRE(proj <= full * (1 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("orthogonal feature is the explicit projector, matrix free") {
  std::mt19937_64 gen(77);
  for (std::size_t m : {2u, 4u, 16u}) {
    const auto pm = oracle::secting_projector(m);
    for (const NormOrder p : {l1, l2, l4, linf}) {
      for (int i = 0; i < 200; ++i) {
        const auto b = oracle::random_vector(gen, m, -3, 7);
        const double explicit_norm = oracle::norm(oracle::apply(pm, b), p.p());
        const double feature = orthogonal_feature(b, p);
        CHECK(std::abs(feature) == doctest::Approx(explicit_norm).epsilon(1e-12));
        CHECK(std::abs(feature) <= lp_norm(b, p) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("diversion examples and bounds") {
  CHECK(diversion(BlockProjector::adaptive({1 / r2, 1 / r2}, l2), 2) == doctest::Approx(0.0));
  CHECK(diversion(BlockProjector::adaptive({1, 0}, l2), 2) == doctest::Approx(r2 - 1));
  const auto z = BlockProjector::adaptive({0.6, 0.8}, l2);
  // Explicit Z o.
  const auto zo = oracle::apply(oracle::rank_one({0.6, 0.8}), {1, 1});
  const double expect = r2 - oracle::norm(zo, 2);
  CHECK(diversion(z, 2) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(diversion(z, 2) == doctest::Approx(r2 - 1.4));
  CHECK_THROWS_AS(diversion(BlockProjector::orthogonal(), 2), InputError);

  // The upper bound needs |<z, o>| >= 1, which holds for nonnegative unit z
  // (such as the principal component of a nonnegative second moment).
  std::mt19937_64 gen(8);
  for (std::size_t m : {2u, 4u, 9u}) {
    for (int i = 0; i < 1000; ++i) {
      auto z = random_unit(gen, m);
      for (double& v : z) v = std::abs(v);
      const double d = diversion(BlockProjector::adaptive(z, l2), m);
      CHECK(d >= 0.0);
      CHECK(d <= std::sqrt(double(m)) - 1 + 1e-9);
      const double any = diversion(BlockProjector::adaptive(random_unit(gen, m), l2), m);
      CHECK(any >= 0.0);
      CHECK(any <= std::sqrt(double(m)) + 1e-9);
    }
  }
}

TEST_CASE("diversion report") {
  const auto part = BlockPartition::split(4, 2);
  const auto o = diversion_report(ProjectionLevel::orthogonal(part, l2));
  CHECK(o.max() == 0.0);
  CHECK(o.per_block.size() == 2);
  const ProjectionLevel a(part, {BlockProjector::adaptive({1, 1}, l2), BlockProjector::adaptive({1, 0}, l2)}, l2);
  const auto r = diversion_report(a);
  CHECK(r.max() == doctest::Approx(r2 - 1));
  CHECK(r.mean() == doctest::Approx((r2 - 1) / 2));
}

TEST_CASE("q_mapping_norm examples") {
  CHECK(q_mapping_norm(4, l2) == 1.0);
  CHECK(q_mapping_norm(4, l4) == doctest::Approx(2.0));
  CHECK(q_mapping_norm(16, l1) == doctest::Approx(0.0625));
  CHECK_THROWS_AS(q_mapping_norm(4, linf), InputError);
  for (std::size_t m = 2; m < 20; ++m) {
    CHECK(q_mapping_norm(m, l2) == 1.0);
    CHECK(q_mapping_norm(m, NormOrder::finite(2.5)) > 1.0);
    CHECK(q_mapping_norm(m, l4) > 1.0);
  }
}

TEST_CASE("q_mapping_norm(16, 1) matches a numerical maximization") {
  std::mt19937_64 gen(6);
  const auto q = oracle::q_mapping(16, 1.0);
  double best = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const auto x = oracle::random_vector(gen, 16, -0.1, 1.0);
    best = std::max(best, oracle::norm(oracle::apply(q, x), 1) / oracle::norm(x, 1));
  }
  CHECK(best <= q_mapping_norm(16, l1) * (1 + 1e-12));
  CHECK(best >= q_mapping_norm(16, l1) * 0.99);
}

TEST_CASE("adaptive beats orthogonal on average over its fitting distribution") {
  // Correlated blocks whose principal axis is tilted away from the ones line.
  std::mt19937_64 gen(31);
  std::normal_distribution<double> nd;
  const std::size_t m = 4;
  std::vector<std::vector<double>> blocks;
  const std::vector<double> axis{1.0, 0.6, 0.3, 0.1};
  for (int i = 0; i < 20000; ++i) {
    const double g = nd(gen);
    std::vector<double> b(m);
    for (std::size_t j = 0; j < m; ++j) b[j] = 2.0 + 3.0 * g * axis[j] + 0.3 * nd(gen);
    blocks.push_back(b);
  }
  CovarianceAccumulator acc(m);
  for (const auto& b : blocks) acc.add(b);
  {
    const auto pc = first_principal_component(acc.finalize(MomentKind::raw));
    const auto proj = BlockProjector::adaptive(pc.direction, l2);
    double adaptive_residual = 0.0;
    double orthogonal_residual = 0.0;
    for (const auto& b : blocks) {
      const double n = lp_norm(b, l2);
      adaptive_residual += n - std::abs(adaptive_feature(b, proj, l2));
      orthogonal_residual += n - std::abs(orthogonal_feature(b, l2));
    }
    CHECK(adaptive_residual <= orthogonal_residual);
  }
}

TEST_CASE("adaptive equals orthogonal for blocks on the secting line") {
  const auto proj = BlockProjector::adaptive({1, 1, 1, 1}, l2);
  const std::vector<double> b{2, 2, 2, 2};
  CHECK(adaptive_feature(b, proj, l2) == doctest::Approx(orthogonal_feature(b, l2)));
}
