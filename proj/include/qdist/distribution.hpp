#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdist/common.hpp"

namespace qdist {

/// Equal-width bin grid over [lo, hi] with 2^num_qubits bins.
struct Grid {
  int num_qubits = 0;
  double lo = 0.0;
  double hi = 0.0;

  std::size_t num_bins() const { return std::size_t{1} << num_qubits; }
  double bin_width() const { return (hi - lo) / static_cast<double>(num_bins()); }
  double midpoint(std::size_t i) const {
    return lo + (static_cast<double>(i) + 0.5) * bin_width();
  }
};

/// A discrete probability distribution over 2^n bins plus the grid it was
/// discretized on. Distributions derived straight from a state vector use
/// the index grid [0, 2^n].
struct DiscreteDistribution {
  std::vector<double> probs;
  Grid grid;

  std::size_t size() const { return probs.size(); }
  int num_qubits() const { return grid.num_qubits; }

  double sum() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
  }

  void validate() const {
    if (probs.empty() || !is_power_of_two(probs.size())) {
      throw std::invalid_argument("distribution length must be a power of two");
    }
    if (probs.size() != grid.num_bins()) {
      throw std::invalid_argument("distribution length does not match its grid");
    }
    for (double p : probs) {
      if (!std::isfinite(p) || p < 0.0) {
        throw std::invalid_argument("distribution entries must be finite and nonnegative");
      }
    }
    if (std::abs(sum() - 1.0) > 1e-12) {
      throw std::invalid_argument("distribution must sum to 1 within 1e-12, got " +
                                  std::to_string(sum()));
    }
  }

  /// Wraps raw probabilities with the index grid [0, 2^n].
  static DiscreteDistribution from_probs(std::vector<double> probs) {
    const int n = log2_exact(probs.size());
    DiscreteDistribution d{std::move(probs), Grid{n, 0.0, static_cast<double>(std::size_t{1} << n)}};
    return d;
  }
};

}  // namespace qdist
