#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfdm/core_numerics.hpp"
#include "mfdm/rng.hpp"

using namespace mfdm;

namespace {
std::vector<double> vec(std::initializer_list<double> v) { return v; }
}

TEST_CASE("distance basics") {
  CHECK(distance(vec({1, 0}), vec({1, 0}), DistanceKind::Cosine) == doctest::Approx(0.0));
  CHECK(distance(vec({1, 0}), vec({-1, 0}), DistanceKind::Cosine) == doctest::Approx(2.0));
  CHECK(distance(vec({1, 2}), vec({4, 6}), DistanceKind::SqEuclidean) == doctest::Approx(25.0));
  CHECK_THROWS_AS(distance(vec({1, 0}), vec({1, 0, 0}), DistanceKind::SqEuclidean),
                  std::invalid_argument);
  CHECK_THROWS_AS(distance(vec({0, 0}), vec({1, 0}), DistanceKind::Cosine),
                  std::invalid_argument);
}

TEST_CASE("distance symmetry and cosine range/scale invariance") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(5), b(5);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    for (auto kind : {DistanceKind::Cosine, DistanceKind::SqEuclidean}) {
      CHECK(distance(a, b, kind) == distance(b, a, kind));
    }
    const double d = distance(a, b, DistanceKind::Cosine);
    CHECK(d >= 0.0);
    CHECK(d <= 2.0);
    const double lambda = rng.uniform(0.1, 10.0), mu = rng.uniform(0.1, 10.0);
    std::vector<double> as(5), bs(5);
    for (int k = 0; k < 5; ++k) {
      as[k] = lambda * a[k];
      bs[k] = mu * b[k];
    }
    CHECK(std::abs(distance(as, bs, DistanceKind::Cosine) - d) <= 1e-12);
  }
}

TEST_CASE("distance_grad closed forms") {
  auto [ga, gb] = distance_grad(vec({1, 2}), vec({4, 6}), DistanceKind::SqEuclidean);
  CHECK(ga[0] == doctest::Approx(-6.0));
  CHECK(ga[1] == doctest::Approx(-8.0));
  CHECK(gb[0] == doctest::Approx(6.0));
  CHECK(gb[1] == doctest::Approx(8.0));

  auto [gs, gt] = distance_grad(vec({1, 2}), vec({1, 2}), DistanceKind::SqEuclidean);
  CHECK(gs[0] == 0.0);
  CHECK(gs[1] == 0.0);
  CHECK(gt[0] == 0.0);
  CHECK(gt[1] == 0.0);
}

TEST_CASE("distance_grad matches central finite differences") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(4), b(4);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    // keep away from the cosine singularity
    if (std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]) < 0.3) a[0] += 1.0;
    if (std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2] + b[3] * b[3]) < 0.3) b[0] += 1.0;
    for (auto kind : {DistanceKind::Cosine, DistanceKind::SqEuclidean}) {
      auto [ga, gb] = distance_grad(a, b, kind);
      const double h = 1e-5;
      for (int k = 0; k < 4; ++k) {
        const double saved = a[k];
        a[k] = saved + h;
        const double up = distance(a, b, kind);
        a[k] = saved - h;
        const double down = distance(a, b, kind);
        a[k] = saved;
        const double fd = (up - down) / (2 * h);
        CHECK(std::abs(ga[k] - fd) <=
              1e-6 * std::max({std::abs(ga[k]), std::abs(fd), 1.0}));
      }
    }
  }
}

TEST_CASE("hinge") {
  CHECK(hinge(-1.0) == 0.0);
  CHECK(hinge(0.0) == 0.0);
  CHECK(hinge(2.5) == 2.5);
}

TEST_CASE("log1p_sum_exp_scaled") {
  CHECK(log1p_sum_exp_scaled({}, 123.0) == 0.0);
  std::vector<double> one{0.0};
  CHECK(log1p_sum_exp_scaled(one, std::log(1.0)) == doctest::Approx(std::log(2.0)));
  std::vector<double> big{1000.0, 1000.0};
  CHECK(std::abs(log1p_sum_exp_scaled(big, std::log(2.0)) - 1000.0) <= 1e-9);

  // agrees with the naive formula for moderate magnitudes
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(6));
    std::vector<double> terms(n);
    for (auto& t : terms) t = rng.uniform(-20.0, 20.0);
    const double log_denom = rng.uniform(-3.0, 3.0);
    double naive = 0.0;
    for (double t : terms) naive += std::exp(t);
    naive = std::log(1.0 + naive / std::exp(log_denom));
    const double stable = log1p_sum_exp_scaled(terms, log_denom);
    CHECK(std::abs(stable - naive) <= 1e-10 * std::max(1.0, std::abs(naive)));
  }
}

TEST_CASE("log1p_exp_sum_with_weights matches value and derivative structure") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(5));
    std::vector<double> u(n);
    for (auto& x : u) x = rng.uniform(-30.0, 30.0);
    const auto sum = log1p_exp_sum_with_weights(u);
    CHECK(sum.value == doctest::Approx(log1p_sum_exp_scaled(u, 0.0)));
    double total = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      // weight_j = d value / d u_j
      const double h = 1e-6;
      std::vector<double> up = u, down = u;
      up[j] += h;
      down[j] -= h;
      const double fd =
          (log1p_sum_exp_scaled(up, 0.0) - log1p_sum_exp_scaled(down, 0.0)) / (2 * h);
      CHECK(sum.weights[j] == doctest::Approx(fd).epsilon(1e-4));
      total += sum.weights[j];
    }
    CHECK(total <= 1.0 + 1e-12);
  }
}
