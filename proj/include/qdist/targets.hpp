#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdist/common.hpp"
#include "qdist/distribution.hpp"

namespace qdist {

enum class TargetFamily { Gaussian, LogNormal, ChiSquare, Custom };

inline const char* to_string(TargetFamily f) {
  switch (f) {
    case TargetFamily::Gaussian: return "gaussian";
    case TargetFamily::LogNormal: return "lognormal";
    case TargetFamily::ChiSquare: return "chisquare";
    case TargetFamily::Custom: return "custom";
  }
  return "?";
}

inline TargetFamily target_family_from_string(const std::string& s) {
  if (s == "gaussian") return TargetFamily::Gaussian;
  if (s == "lognormal") return TargetFamily::LogNormal;
  if (s == "chisquare") return TargetFamily::ChiSquare;
  if (s == "custom") return TargetFamily::Custom;
  throw std::invalid_argument("unknown target family '" + s + "'");
}

/// A target distribution to discretize: an unnormalized density kernel
/// over [lo, hi], or a custom point list used verbatim.
struct TargetSpec {
  TargetFamily family = TargetFamily::Gaussian;
  double coef = 0.1;  // exponent coefficient for gaussian exp(-a x^2) / lognormal exp(-b ln(x)^2)
  int dof = 4;        // chi-square degrees of freedom
  std::vector<double> custom;  // 2^n values for Custom
  double lo = -10.0;
  double hi = 10.0;
  int num_qubits = 0;

  static TargetSpec gaussian(double a, double lo, double hi, int n) {
    return TargetSpec{TargetFamily::Gaussian, a, 0, {}, lo, hi, n};
  }
  static TargetSpec lognormal(double b, double lo, double hi, int n) {
    return TargetSpec{TargetFamily::LogNormal, b, 0, {}, lo, hi, n};
  }
  static TargetSpec chi_square(int k, double lo, double hi, int n) {
    return TargetSpec{TargetFamily::ChiSquare, 0.0, k, {}, lo, hi, n};
  }
  static TargetSpec custom_points(std::vector<double> values, double lo, double hi) {
    const int n = log2_exact(values.size());
    return TargetSpec{TargetFamily::Custom, 0.0, 0, std::move(values), lo, hi, n};
  }
};

/// Evaluates the density kernel at the midpoints of 2^n equal-width bins
/// and renormalizes. Midpoint sampling keeps ln(x) and x^(k/2-1) off the
/// x = 0 endpoint for the log-normal and chi-square kernels.
inline DiscreteDistribution discretize(const TargetSpec& spec) {
  if (spec.num_qubits < 1) throw std::invalid_argument("discretize: need at least 1 qubit");
  if (!(spec.lo < spec.hi)) throw std::invalid_argument("discretize: need lo < hi");
  const Grid grid{spec.num_qubits, spec.lo, spec.hi};
  const std::size_t bins = grid.num_bins();

  std::vector<double> probs(bins);
  if (spec.family == TargetFamily::Custom) {
    if (spec.custom.size() != bins) {
      throw std::invalid_argument("discretize: custom target needs exactly " +
                                  std::to_string(bins) + " values");
    }
    probs = spec.custom;
    for (double v : probs) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("discretize: custom values must be finite and nonnegative");
      }
    }
  } else {
    for (std::size_t i = 0; i < bins; ++i) {
      const double x = grid.midpoint(i);
      double density = 0.0;
      switch (spec.family) {
        case TargetFamily::Gaussian:
          density = std::exp(-spec.coef * x * x);
          break;
        case TargetFamily::LogNormal:
          if (x <= 0.0) {
            throw std::invalid_argument("discretize: log-normal needs midpoints > 0, got " +
                                        std::to_string(x));
          }
          density = std::exp(-spec.coef * std::log(x) * std::log(x));
          break;
        case TargetFamily::ChiSquare: {
          if (spec.dof < 1) throw std::invalid_argument("discretize: chi-square needs k >= 1");
          if (x <= 0.0) {
            throw std::invalid_argument("discretize: chi-square needs midpoints > 0, got " +
                                        std::to_string(x));
          }
          density = std::pow(x, 0.5 * spec.dof - 1.0) * std::exp(-0.5 * x);
          break;
        }
        case TargetFamily::Custom:
          break;  // handled above
      }
      probs[i] = density;
    }
  }

  double total = 0.0;
  for (double p : probs) total += p;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("discretize: density vanishes or overflows on this grid");
  }
  for (double& p : probs) p /= total;
  return DiscreteDistribution{std::move(probs), grid};
}

}  // namespace qdist
