#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qdist/common.hpp"
#include "qdist/distribution.hpp"
#include "qdist/sampling.hpp"

namespace qdist {

/// The three comparison figures reported for every optimized circuit.
struct MetricsReport {
  double relative_entropy = 0.0;  // nats
  double l2_squared = 0.0;
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
  bool exact_probabilities = true;  // how p_gen was produced
  std::uint64_t shots_used = 0;     // 0 when exact
};

namespace detail {

inline void check_same_length(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("distributions have different lengths");
  }
}

}  // namespace detail

/// KL divergence D(p_des || p_gen) in nats. Generated bins are clamped at
/// eps so a missing bin costs a large finite penalty instead of infinity;
/// desired zero bins contribute nothing.
inline double relative_entropy(const DiscreteDistribution& p_des,
                               const DiscreteDistribution& p_gen, double eps = 1e-12) {
  detail::check_same_length(p_des, p_gen);
  double sum = 0.0;
  for (std::size_t i = 0; i < p_des.size(); ++i) {
    const double p = p_des.probs[i];
    if (p <= 0.0) continue;
    sum += p * std::log(p / std::max(p_gen.probs[i], eps));
  }
  return sum;
}

inline double l2_squared(const DiscreteDistribution& p_des, const DiscreteDistribution& p_gen) {
  detail::check_same_length(p_des, p_gen);
  double sum = 0.0;
  for (std::size_t i = 0; i < p_des.size(); ++i) {
    const double d = p_gen.probs[i] - p_des.probs[i];
    sum += d * d;
  }
  return sum;
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov survival function
/// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2),
/// truncated once terms drop below 1e-12 and clamped to [0, 1].
inline double kolmogorov_q(double lambda) {
  if (!(lambda > 1e-8)) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 1000; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace detail {

inline KsResult ks_from_cdfs(const std::vector<double>& cdf1, const std::vector<double>& cdf2,
                             double m, double n) {
  double d = 0.0;
  for (std::size_t i = 0; i < cdf1.size(); ++i) {
    d = std::max(d, std::abs(cdf1[i] - cdf2[i]));
  }
  const double lambda = d * std::sqrt(m * n / (m + n));
  return KsResult{d, kolmogorov_q(lambda)};
}

inline std::vector<double> cdf_of(const std::vector<double>& probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  return cdf;
}

}  // namespace detail

/// Two-sample KS test on samples drawn from each distribution (the bin
/// index is the sample value). Deterministic for a fixed seed.
inline KsResult ks_test_sampled(const DiscreteDistribution& p_des,
                                const DiscreteDistribution& p_gen,
                                std::uint64_t samples_per_side, std::uint64_t seed) {
  detail::check_same_length(p_des, p_gen);
  if (samples_per_side < 100) {
    throw std::invalid_argument("ks_test_sampled: need at least 100 samples per side");
  }
  const auto c1 = sample_counts(p_des, samples_per_side, mix_seed(seed, 1));
  const auto c2 = sample_counts(p_gen, samples_per_side, mix_seed(seed, 2));
  const double m = static_cast<double>(samples_per_side);
  std::vector<double> f1(c1.size()), f2(c2.size());
  double a1 = 0.0, a2 = 0.0;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    a1 += static_cast<double>(c1[i]) / m;
    a2 += static_cast<double>(c2[i]) / m;
    f1[i] = a1;
    f2[i] = a2;
  }
  return detail::ks_from_cdfs(f1, f2, m, m);
}

/// Deterministic variant: the statistic comes straight from the two
/// discrete CDFs; the p-value assumes samples_per_side points per side.
inline KsResult ks_test_deterministic(const DiscreteDistribution& p_des,
                                      const DiscreteDistribution& p_gen,
                                      std::uint64_t samples_per_side) {
  detail::check_same_length(p_des, p_gen);
  if (samples_per_side < 100) {
    throw std::invalid_argument("ks_test_deterministic: need at least 100 samples per side");
  }
  const double m = static_cast<double>(samples_per_side);
  return detail::ks_from_cdfs(detail::cdf_of(p_des.probs), detail::cdf_of(p_gen.probs), m, m);
}

}  // namespace qdist
