#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfdm/magnet.hpp"
#include "mfdm/rng.hpp"

using namespace mfdm;

namespace {

SpinSystem ising_pair(double s0, double s1, double j = 1.0, double t = 1.0) {
  SpinSystem sys;
  sys.n = 2;
  sys.j = j;
  sys.t = t;
  sys.mode = SpinMode::Ising;
  sys.spins = Matrix::from_rows({{s0}, {s1}});
  return sys;
}

// root of g(M) = M - tanh(c M) on [lo, hi] by bisection
double bisect_fixed_point(double c, double lo, double hi) {
  auto g = [c](double m) { return m - std::tanh(c * m); };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(lo) * g(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("hamiltonian on two-spin systems") {
  CHECK(hamiltonian(ising_pair(1, 1)) == doctest::Approx(-2.0));
  CHECK(hamiltonian(ising_pair(1, -1)) == doctest::Approx(0.0));
}

TEST_CASE("hamiltonian equals the squared-total-spin form") {
  for (int trial = 0; trial < 30; ++trial) {
    const auto sys = random_spin_system(20, 1.3, 1.0, SpinMode::Vector3, 100 + trial);
    double total[3] = {0, 0, 0};
    for (int i = 0; i < sys.n; ++i)
      for (int k = 0; k < 3; ++k) total[k] += sys.spins(i, k);
    const double expected =
        -0.5 * sys.j * (total[0] * total[0] + total[1] * total[1] + total[2] * total[2]);
    CHECK(hamiltonian(sys) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("mft hamiltonian closed forms") {
  auto sys = random_spin_system(8, 2.0, 1.0, SpinMode::Vector3, 5);
  std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK(mft_hamiltonian(sys, zero) == 0.0);

  // all spins equal to a unit mean field
  SpinSystem aligned = sys;
  for (int i = 0; i < aligned.n; ++i) {
    aligned.spins(i, 0) = 1.0;
    aligned.spins(i, 1) = 0.0;
    aligned.spins(i, 2) = 0.0;
  }
  std::vector<double> m{1.0, 0.0, 0.0};
  const double n = aligned.n;
  CHECK(mft_hamiltonian(aligned, m) == doctest::Approx(-0.5 * aligned.j * n * n));

  // independent evaluation of the formula on a random instance
  Rng rng(9);
  std::vector<double> mf{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  double total[3] = {0, 0, 0};
  for (int i = 0; i < sys.n; ++i)
    for (int k = 0; k < 3; ++k) total[k] += sys.spins(i, k);
  const double mm = mf[0] * mf[0] + mf[1] * mf[1] + mf[2] * mf[2];
  const double ms = mf[0] * total[0] + mf[1] * total[1] + mf[2] * total[2];
  const double expected = 0.5 * sys.j * n * n * mm - sys.j * n * ms;
  CHECK(mft_hamiltonian(sys, mf) == doctest::Approx(expected).epsilon(1e-12));

  std::vector<double> wrong_dim{1.0};
  CHECK_THROWS_AS(mft_hamiltonian(sys, wrong_dim), std::invalid_argument);
}

TEST_CASE("expansion gap identity") {
  // spins equal to the mean field: no fluctuations at all
  auto aligned = random_spin_system(6, 1.0, 1.0, SpinMode::Vector3, 3);
  for (int i = 0; i < aligned.n; ++i) {
    aligned.spins(i, 0) = 0.0;
    aligned.spins(i, 1) = 1.0;
    aligned.spins(i, 2) = 0.0;
  }
  std::vector<double> m{0.0, 1.0, 0.0};
  CHECK(std::abs(expansion_gap(aligned, m)) <= 1e-9);

  // mean field at the sample mean: first-order residual cancels
  auto sys = random_spin_system(12, 0.7, 1.0, SpinMode::Vector3, 4);
  std::vector<double> mean(3, 0.0);
  for (int i = 0; i < sys.n; ++i)
    for (int k = 0; k < 3; ++k) mean[k] += sys.spins(i, k) / sys.n;
  CHECK(std::abs(expansion_gap(sys, mean)) <= 1e-9);

  // arbitrary mean fields: expansion_gap itself asserts the identity
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(63));
    const double j = rng.uniform(0.2, 2.0);
    const auto mode = (trial % 2) ? SpinMode::Ising : SpinMode::Vector3;
    const auto rsys = random_spin_system(n, j, 1.0, mode, 1000 + trial);
    std::vector<double> mf(mode == SpinMode::Ising ? 1 : 3);
    for (auto& v : mf) v = rng.uniform(-1.0, 1.0);
    CHECK_NOTHROW(expansion_gap(rsys, mf));
  }
}

TEST_CASE("self-consistency solver") {
  // deep in the ordered phase: tanh saturates
  auto cold = solve_self_consistency(1.0, 10, 1e-3 * 10.0, 0.5, 1e-12, 10000);
  CHECK(std::abs(cold.m - 1.0) <= 1e-6);
  CHECK(cold.residual <= 1e-12);

  // above the transition the only root is zero, from any init
  for (double init : {0.9, 0.5, -0.7, 0.01}) {
    auto hot = solve_self_consistency(1.0, 10, 2.0 * 10.0, init, 1e-12, 100000);
    CHECK(std::abs(hot.m) <= 1e-6);
  }

  // T = 0.5 J N: positive root of M = tanh(2M), against a bisection oracle
  auto mid = solve_self_consistency(1.0, 10, 0.5 * 10.0, 0.5, 1e-12, 100000);
  const double oracle = bisect_fixed_point(2.0, 0.5, 1.0);
  CHECK(std::abs(mid.m - oracle) <= 1e-9);

  CHECK_THROWS_AS(solve_self_consistency(1.0, 10, 5.0, 0.5, 1e-12, 1), std::runtime_error);
}

TEST_CASE("exact gibbs enumeration") {
  // N = 1: only the self pair, Z = 2 e^{J/(2T)}
  for (double t : {0.5, 1.0, 3.0}) {
    const auto res = exact_gibbs(1, 1.0, t);
    CHECK(res.z == doctest::Approx(2.0 * std::exp(0.5 / t)).epsilon(1e-12));
  }

  // spin-flip symmetry kills the signed mean
  for (int n : {2, 5, 12}) {
    const auto res = exact_gibbs(n, 1.0, 0.7 * n);
    CHECK(std::abs(res.mean_spin) <= 1e-12);
  }

  // the order parameter magnitude grows on cooling
  const auto cold = exact_gibbs(12, 1.0, 0.5 * 12.0);
  const auto hot = exact_gibbs(12, 1.0, 2.0 * 12.0);
  CHECK(cold.mean_abs_spin > hot.mean_abs_spin);

  CHECK_THROWS_AS(exact_gibbs(17, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("gibbs sum is stable under reversed enumeration") {
  // H depends only on the total spin, so flipping every state globally must
  // reproduce Z up to summation rounding
  const int n = 10;
  const double j = 1.0, t = 4.0;
  const double shift = 0.5 * j * n * n / t;
  double fwd = 0.0, flipped = 0.0;
  for (std::uint32_t state = 0; state < (1u << n); ++state) {
    const auto weight = [&](std::uint32_t s) {
      const int ups = std::popcount(s);
      const double total = 2.0 * ups - n;
      return std::exp(0.5 * j * total * total / t - shift);
    };
    fwd += weight(state);
    flipped += weight(~state & ((1u << n) - 1));
  }
  CHECK(std::abs(fwd - flipped) <= 1e-12 * fwd);
}
