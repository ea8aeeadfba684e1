#include "mfdm/magnet.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfdm/rng.hpp"

namespace mfdm {

namespace {

void check_system(const SpinSystem& sys) {
  if (sys.n <= 0 || !(sys.j > 0.0) || !(sys.t > 0.0))
    throw std::invalid_argument("spin system: need n >= 1, J > 0, T > 0");
  const std::size_t dim = sys.mode == SpinMode::Ising ? 1 : 3;
  if (sys.spins.rows() != static_cast<std::size_t>(sys.n) || sys.spins.cols() != dim)
    throw std::invalid_argument("spin system: spin matrix shape mismatch");
}

std::size_t spin_dim(const SpinSystem& sys) { return sys.mode == SpinMode::Ising ? 1 : 3; }

std::vector<double> total_spin(const SpinSystem& sys) {
  std::vector<double> total(spin_dim(sys), 0.0);
  for (int i = 0; i < sys.n; ++i) {
    auto row = sys.spins.row(i);
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += row[k];
  }
  return total;
}

}  // namespace

SpinSystem random_spin_system(int n, double j, double t, SpinMode mode, std::uint64_t seed) {
  SpinSystem sys;
  sys.n = n;
  sys.j = j;
  sys.t = t;
  sys.mode = mode;
  Rng rng(seed);
  if (mode == SpinMode::Ising) {
    sys.spins = Matrix(n, 1);
    for (int i = 0; i < n; ++i) sys.spins(i, 0) = rng.below(2) ? 1.0 : -1.0;
  } else {
    sys.spins = Matrix(n, 3);
    for (int i = 0; i < n; ++i) {
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (int k = 0; k < 3; ++k) {
          sys.spins(i, k) = rng.normal();
          norm2 += sys.spins(i, k) * sys.spins(i, k);
        }
      } while (norm2 == 0.0);
      const double inv = 1.0 / std::sqrt(norm2);
      for (int k = 0; k < 3; ++k) sys.spins(i, k) *= inv;
    }
  }
  check_system(sys);
  return sys;
}

double hamiltonian(const SpinSystem& sys) {
  check_system(sys);
  const std::size_t dim = spin_dim(sys);
  double h = 0.0;
  for (int i = 0; i < sys.n; ++i) {
    for (int jdx = 0; jdx < sys.n; ++jdx) {
      double dot = 0.0;
      for (std::size_t k = 0; k < dim; ++k) dot += sys.spins(i, k) * sys.spins(jdx, k);
      h += dot;
    }
  }
  return -0.5 * sys.j * h;
}

double mft_hamiltonian(const SpinSystem& sys, std::span<const double> mean_field) {
  check_system(sys);
  if (mean_field.size() != spin_dim(sys))
    throw std::invalid_argument("mft_hamiltonian: mean-field dimension mismatch");
  const auto total = total_spin(sys);
  double mm = 0.0, ms = 0.0;
  for (std::size_t k = 0; k < mean_field.size(); ++k) {
    mm += mean_field[k] * mean_field[k];
    ms += mean_field[k] * total[k];
  }
  const double n = static_cast<double>(sys.n);
  return 0.5 * sys.j * n * n * mm - sys.j * n * ms;
}

double expansion_gap(const SpinSystem& sys, std::span<const double> mean_field) {
  const double gap = hamiltonian(sys) - mft_hamiltonian(sys, mean_field);
  // the discarded term is the squared total fluctuation
  const auto total = total_spin(sys);
  double fluct2 = 0.0;
  for (std::size_t k = 0; k < mean_field.size(); ++k) {
    const double f = total[k] - static_cast<double>(sys.n) * mean_field[k];
    fluct2 += f * f;
  }
  const double expected = -0.5 * sys.j * fluct2;
  if (std::abs(gap - expected) > 1e-9)
    throw std::runtime_error("expansion_gap: identity violated by " +
                             std::to_string(std::abs(gap - expected)));
  return gap;
}

MFTSolution solve_self_consistency(double j, int n, double t, double init, double tol,
                                   int max_iter) {
  if (!(t > 0.0)) throw std::invalid_argument("solve_self_consistency: T must be > 0");
  const double coupling = j * static_cast<double>(n) / t;
  const double gamma = 0.5;
  MFTSolution sol;
  sol.m = init;
  for (int it = 1; it <= max_iter; ++it) {
    const double target = std::tanh(coupling * sol.m);
    sol.residual = std::abs(sol.m - target);
    sol.iterations = it;
    if (sol.residual <= tol) return sol;
    sol.m = (1.0 - gamma) * sol.m + gamma * target;
  }
  // one final residual check after the last update
  sol.residual = std::abs(sol.m - std::tanh(coupling * sol.m));
  if (sol.residual <= tol) return sol;
  throw std::runtime_error("solve_self_consistency: no convergence after " +
                           std::to_string(max_iter) + " iterations (residual " +
                           std::to_string(sol.residual) + ")");
}

GibbsResult exact_gibbs(int n, double j, double t) {
  if (n < 1 || n > 16) throw std::invalid_argument("exact_gibbs: N must be in [1, 16]");
  if (!(t > 0.0) || !(j > 0.0)) throw std::invalid_argument("exact_gibbs: need J > 0, T > 0");

  // H depends only on the total spin: H = -(J/2) (sum_i s_i)^2, self pairs
  // included. Accumulate with the largest exponent factored out so the sums
  // stay finite even when Z itself overflows.
  const double n_d = static_cast<double>(n);
  const double shift = 0.5 * j * n_d * n_d / t;  // exponent of the all-aligned states
  double sum_w = 0.0, sum_m = 0.0, sum_abs_m = 0.0;
  const std::uint32_t states = 1u << n;
  for (std::uint32_t state = 0; state < states; ++state) {
    const int ups = std::popcount(state);
    const double total = static_cast<double>(2 * ups - n);
    const double w = std::exp(0.5 * j * total * total / t - shift);
    const double m = total / n_d;
    sum_w += w;
    sum_m += m * w;
    sum_abs_m += std::abs(m) * w;
  }
  GibbsResult out;
  out.z = std::exp(shift + std::log(sum_w));
  out.mean_spin = sum_m / sum_w;
  out.mean_abs_spin = sum_abs_m / sum_w;
  return out;
}

}  // namespace mfdm
