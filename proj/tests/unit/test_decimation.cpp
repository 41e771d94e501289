#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "intdim/decimation.hpp"
#include "intdim/errors.hpp"
#include "intdim/manifolds.hpp"
#include "support/oracles.hpp"

using namespace intdim;

namespace {

DecimationCurve curve_of(std::vector<double> means) {
  DecimationCurve c;
  const std::size_t k_max = means.size();
  for (std::size_t i = 0; i < means.size(); ++i) {
    const std::size_t k = k_max - i;
    c.points.push_back({k, 1000 / k, means[i], k == 1 ? 0.0 : 0.1});
  }
  c.n_total = 1000;
  return c;
}

double max_rel_dev(const DecimationCurve& c) {
  const double ref = c.points.back().id_mean;
  double worst = 0.0;
  for (const auto& p : c.points) worst = std::max(worst, std::abs(p.id_mean - ref) / ref);
  return worst;
}

}  // namespace

TEST_CASE("k_max = 1 is the direct estimate") {
  const auto m = oracle::gaussian(200, 3, 5);
  const auto c = decimation_curve(m, 1, {}, 9);
  REQUIRE(c.points.size() == 1);
  CHECK(c.points[0].k == 1);
  CHECK(c.points[0].n_sub == 200);
  CHECK(c.points[0].id_mean == estimate(m, {}, 9).d_hat);
  CHECK(c.points[0].id_std == 0.0);
}

TEST_CASE("k = 1 entry equals a single full subsample") {
  const auto m = oracle::gaussian(600, 4, 6);
  for (Method method : {Method::mle, Method::triplets}) {
    const EstimatorConfig cfg{method, 0.1, {}};
    const auto c = decimation_curve(m, 5, cfg, 1234);
    CHECK(c.points.back().id_mean == subsample_estimate(m, {1.0, 1}, cfg, 1234).d_hat);
  }
}

TEST_CASE("5-D hypercube curve is flat and well defined") {
  const auto m = gen_manifold({ManifoldKind::hypercube, 5, 5, 10000, 0.0, 3}).matrix;
  const auto c = decimation_curve(m, 20, {}, 3);
  REQUIRE(c.points.size() == 20);
  CHECK(max_rel_dev(c) < 0.1);
  CHECK(stability_verdict(c) == Stability::well_defined);
}

TEST_CASE("full-rank Gaussian in D = 512 grows with sample size") {
  const auto m = oracle::gaussian(2000, 512, 7);
  const auto c = decimation_curve(m, 20, {}, 7);
  std::vector<double> n, id;
  for (const auto& p : c.points) {
    n.push_back(static_cast<double>(p.n_sub));
    id.push_back(p.id_mean);
  }
  CHECK(spearman(n, id) > 0.9);
  CHECK(stability_verdict(c) == Stability::ill_defined);
}

TEST_CASE("curve invariants") {
  const auto m = oracle::uniform_cube(1003, 3, 8);
  const auto c = decimation_curve(m, 20, {}, 8);
  CHECK(c.n_total == 1003);
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto& p = c.points[i];
    CHECK(p.k == 20 - i);
    CHECK(p.n_sub * p.k <= 1003);
    CHECK(p.id_std >= 0.0);
    if (p.k > 1) CHECK(p.id_std > 0.0);
  }
}

TEST_CASE("per-k means agree across seeds") {
  const auto m = oracle::uniform_cube(4000, 4, 9);
  const auto a = decimation_curve(m, 20, {}, 1);
  const auto b = decimation_curve(m, 20, {}, 2);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const auto& p = a.points[i];
    const auto& q = b.points[i];
    CAPTURE(p.k);
    CHECK(std::abs(p.id_mean - q.id_mean) <= 3.0 * (p.id_std + q.id_std) / std::sqrt(static_cast<double>(p.k)));
  }
}

TEST_CASE("fold sizes") {
  for (std::size_t n : {10u, 97u, 1000u, 10007u}) {
    for (std::size_t k = 1; k <= 20 && n / k >= 1; ++k) {
      const auto sizes = fold_sizes(n, k);
      CHECK(sizes.size() == k);
      CHECK(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) == n);
      const double target = static_cast<double>(n) / static_cast<double>(k);
      for (std::size_t s : sizes) CHECK(std::abs(static_cast<double>(s) - target) <= 1.0);
    }
  }
}

TEST_CASE("too many folds is a configuration error") {
  const auto m = oracle::gaussian(150, 2, 1);
  try {
    decimation_curve(m, 20, {}, 0);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("k_max") != std::string::npos);
  }
  CHECK_NOTHROW(decimation_curve(m, 15, {}, 0));
  CHECK_THROWS_AS(decimation_curve(m, 0, {}, 0), ConfigError);
}

TEST_CASE("verdict examples") {
  CHECK(stability_verdict(curve_of({5, 5, 5, 5, 5})) == Stability::well_defined);
  CHECK(stability_verdict(curve_of({5, 6, 7, 8, 10})) == Stability::ill_defined);
  CHECK(stability_verdict(curve_of({5, 9, 4, 8, 6})) == Stability::inconclusive);
  CHECK(stability_verdict(curve_of({5, 5})) == Stability::inconclusive);
  // Falling with sample size is neither flat nor growing.
  CHECK(stability_verdict(curve_of({10, 8, 7, 6, 5})) == Stability::inconclusive);
  CHECK(to_string(Stability::ill_defined) == "ill_defined");
}

TEST_CASE("spearman") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  CHECK(spearman(x, std::vector<double>{2, 4, 8, 16, 32}) == doctest::Approx(1.0));
  CHECK(spearman(x, std::vector<double>{5, 4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman(x, std::vector<double>{1, 1, 1, 1, 1}) == 0.0);
  // Average ranks: y ranks (1.5, 1.5, 3, 4, 5); Pearson of ranks = 0.9746794...
  CHECK(spearman(x, std::vector<double>{7, 7, 8, 9, 10}) == doctest::Approx(0.974679434480896));
}
