#pragma once

#include <cstdint>
#include <span>

#include "mfdm/matrix.hpp"

namespace mfdm {

// Infinite-range ferromagnet: every spin couples to every other (self pairs
// included), so the energy depends only on the total spin.
enum class SpinMode { Ising, Vector3 };

struct SpinSystem {
  int n = 0;
  double j = 1.0;  // exchange interaction, > 0
  double t = 1.0;  // temperature, > 0
  SpinMode mode = SpinMode::Ising;
  Matrix spins;  // Ising: n x 1 entries in {-1,+1}; Vector3: n x 3 unit rows
};

SpinSystem random_spin_system(int n, double j, double t, SpinMode mode, std::uint64_t seed);

// -(J/2) sum_{i,j} S_i . S_j over all ordered pairs including i == j.
double hamiltonian(const SpinSystem& sys);

// (J N^2 / 2) M.M - J N M . sum_i S_i
double mft_hamiltonian(const SpinSystem& sys, std::span<const double> mean_field);

// H - H_MFT. Verifies the exact identity
//   H - H_MFT = -(J/2) | sum_i (S_i - M) |^2
// and throws if the two sides disagree beyond 1e-9.
double expansion_gap(const SpinSystem& sys, std::span<const double> mean_field);

struct MFTSolution {
  double m = 0.0;
  double residual = 0.0;  // |M - tanh(J N M / T)|
  int iterations = 0;
};

// Damped fixed-point iteration M <- (1-gamma) M + gamma tanh(J N M / T),
// gamma = 0.5. Throws on non-convergence within max_iter.
MFTSolution solve_self_consistency(double j, int n, double t, double init, double tol,
                                   int max_iter);

struct GibbsResult {
  double z = 0.0;          // partition function (may overflow to inf at extreme T)
  double mean_spin = 0.0;  // E[(1/N) sum S_i], zero by spin-flip symmetry
  double mean_abs_spin = 0.0;  // E[|(1/N) sum S_i|], the order-parameter magnitude
};

// Exact enumeration of all 2^N Ising states, N <= 16.
GibbsResult exact_gibbs(int n, double j, double t);

}  // namespace mfdm
