#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfdm {

enum class DistanceKind { Cosine, SqEuclidean };

inline const char* to_string(DistanceKind kind) {
  return kind == DistanceKind::Cosine ? "cosine" : "sqeuclidean";
}

inline DistanceKind distance_kind_from_string(const std::string& s) {
  if (s == "cosine") return DistanceKind::Cosine;
  if (s == "sqeuclidean") return DistanceKind::SqEuclidean;
  throw std::invalid_argument("unknown distance kind '" + s + "'");
}

// Cosine: 1 - a.b / (|a||b|), clamped to [0, 2].  SqEuclidean: |a-b|^2.
inline double distance(std::span<const double> a, std::span<const double> b, DistanceKind kind) {
  if (a.size() != b.size()) throw std::invalid_argument("distance: dimension mismatch");
  if (kind == DistanceKind::SqEuclidean) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double diff = a[i] - b[i];
      s += diff * diff;
    }
    return s;
  }
  double dot = 0.0, na2 = 0.0, nb2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na2 += a[i] * a[i];
    nb2 += b[i] * b[i];
  }
  if (na2 == 0.0 || nb2 == 0.0)
    throw std::invalid_argument("distance: cosine undefined for zero-norm input");
  return std::clamp(1.0 - dot / std::sqrt(na2 * nb2), 0.0, 2.0);
}

// Accumulates d(distance)/da into grad_a and d/db into grad_b (+= semantics,
// pre-scaled by coeff), which is what the loss inner loops want.
inline void accumulate_distance_grad(std::span<const double> a, std::span<const double> b,
                                     DistanceKind kind, double coeff, std::span<double> grad_a,
                                     std::span<double> grad_b) {
  if (a.size() != b.size() || grad_a.size() != a.size() || grad_b.size() != a.size())
    throw std::invalid_argument("distance_grad: dimension mismatch");
  if (kind == DistanceKind::SqEuclidean) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double g = 2.0 * (a[i] - b[i]) * coeff;
      grad_a[i] += g;
      grad_b[i] -= g;
    }
    return;
  }
  double dot = 0.0, na2 = 0.0, nb2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na2 += a[i] * a[i];
    nb2 += b[i] * b[i];
  }
  if (na2 == 0.0 || nb2 == 0.0)
    throw std::invalid_argument("distance_grad: cosine undefined for zero-norm input");
  const double na = std::sqrt(na2), nb = std::sqrt(nb2);
  const double inv = 1.0 / (na * nb);
  // d = 1 - dot/(|a||b|): quotient rule per side
  for (std::size_t i = 0; i < a.size(); ++i) {
    grad_a[i] += coeff * inv * (dot / na2 * a[i] - b[i]);
    grad_b[i] += coeff * inv * (dot / nb2 * b[i] - a[i]);
  }
}

inline std::pair<std::vector<double>, std::vector<double>> distance_grad(
    std::span<const double> a, std::span<const double> b, DistanceKind kind) {
  std::vector<double> ga(a.size(), 0.0), gb(b.size(), 0.0);
  accumulate_distance_grad(a, b, kind, 1.0, ga, gb);
  return {std::move(ga), std::move(gb)};
}

// [x]_+ with subgradient 0 at the kink.
inline double hinge(double x) { return x > 0.0 ? x : 0.0; }

// log(1 + e^x) without overflow
inline double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double log_sum_exp(std::span<const double> terms) {
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

// log(1 + sum_i e^{t_i} / e^{log_denominator}), the shared shape of the
// log-sum losses; safe for term magnitudes far beyond the overflow threshold.
// Empty term lists contribute nothing and return 0.
inline double log1p_sum_exp_scaled(std::span<const double> terms, double log_denominator) {
  if (terms.empty()) return 0.0;
  return softplus(log_sum_exp(terms) - log_denominator);
}

// log(1 + sum_j e^{u_j}) together with the weights e^{u_j} / (1 + sum_k e^{u_k})
// needed by the gradient of that expression.
struct Log1pExpSum {
  double value = 0.0;
  std::vector<double> weights;
};

inline Log1pExpSum log1p_exp_sum_with_weights(std::span<const double> u) {
  Log1pExpSum out;
  if (u.empty()) return out;
  double m = 0.0;  // the implicit "1 +" term has exponent 0
  for (double v : u) m = std::max(m, v);
  double denom = std::exp(-m);
  out.weights.resize(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    out.weights[j] = std::exp(u[j] - m);
    denom += out.weights[j];
  }
  for (double& w : out.weights) w /= denom;
  out.value = m + std::log(denom);
  return out;
}

}  // namespace mfdm
