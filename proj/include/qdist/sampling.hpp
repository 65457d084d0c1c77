#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "qdist/common.hpp"
#include "qdist/distribution.hpp"

namespace qdist {

/// Multinomial measurement sampling: `shots` independent draws from the
/// distribution, returned as per-bin counts. Deterministic for a fixed seed.
inline std::vector<std::uint64_t> sample_counts(const DiscreteDistribution& dist,
                                                std::uint64_t shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample_counts: shots must be >= 1");
  dist.validate();

  std::vector<double> cdf(dist.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    acc += dist.probs[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  std::mt19937_64 rng(mix_seed(seed, 0));
  std::vector<std::uint64_t> counts(dist.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = uniform01(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t bin = std::min<std::size_t>(
        static_cast<std::size_t>(it - cdf.begin()), dist.size() - 1);
    ++counts[bin];
  }
  return counts;
}

/// Counts normalized to an empirical distribution on the same grid.
inline DiscreteDistribution empirical_distribution(const std::vector<std::uint64_t>& counts,
                                                   const Grid& grid) {
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  if (total == 0) throw std::invalid_argument("empirical_distribution: no counts");
  std::vector<double> probs(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    probs[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return DiscreteDistribution{std::move(probs), grid};
}

}  // namespace qdist
