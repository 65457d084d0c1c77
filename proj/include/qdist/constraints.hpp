#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdist/common.hpp"

namespace qdist {

/// One two-sided linear constraint lo <= a . theta <= hi.
struct LinearConstraint {
  std::vector<double> coeffs;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double dot(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * x[i];
    return s;
  }

  /// Signed violation: positive means infeasible, negative is slack.
  double violation(std::span<const double> x) const {
    const double v = dot(x);
    return std::max(lo - v, v - hi);
  }
};

/// Makes a box constraint lo <= theta_slot <= hi.
inline LinearConstraint box_constraint(int dim, int slot, double lo, double hi) {
  LinearConstraint c{std::vector<double>(static_cast<std::size_t>(dim), 0.0), lo, hi};
  c.coeffs[static_cast<std::size_t>(slot)] = 1.0;
  return c;
}

/// Makes lo <= theta_a - theta_b <= hi.
inline LinearConstraint difference_constraint(int dim, int slot_a, int slot_b, double lo,
                                              double hi) {
  LinearConstraint c{std::vector<double>(static_cast<std::size_t>(dim), 0.0), lo, hi};
  c.coeffs[static_cast<std::size_t>(slot_a)] = 1.0;
  c.coeffs[static_cast<std::size_t>(slot_b)] = -1.0;
  return c;
}

/// Linear inequality constraints on an angle vector, carrying a strictly
/// feasible witness point fixed at construction time. Builders fail fast
/// (InfeasibleError) instead of handing out empty regions.
class ConstraintSet {
 public:
  static constexpr double kWitnessSlack = 1e-6;

  ConstraintSet() = default;

  ConstraintSet(int dim, std::vector<LinearConstraint> constraints,
                std::vector<double> witness)
      : dim_(dim), constraints_(std::move(constraints)), witness_(std::move(witness)) {
    if (dim_ < 0) throw std::invalid_argument("negative constraint dimension");
    if (witness_.size() != static_cast<std::size_t>(dim_)) {
      throw std::invalid_argument("witness dimension mismatch");
    }
    for (const LinearConstraint& c : constraints_) {
      if (c.coeffs.size() != static_cast<std::size_t>(dim_)) {
        throw std::invalid_argument("constraint coefficient vector has wrong length");
      }
      if (c.lo > c.hi) throw InfeasibleError("constraint has lo > hi");
    }
    if (max_violation(witness_) > -kWitnessSlack) {
      throw InfeasibleError("witness point does not satisfy every constraint with slack >= " +
                            std::to_string(kWitnessSlack));
    }
  }

  int dim() const { return dim_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }

  /// The stored strictly feasible witness.
  const std::vector<double>& feasible_point() const { return witness_; }

  /// Max signed violation over all constraints; <= 0 means feasible.
  double max_violation(std::span<const double> x) const {
    double worst = -std::numeric_limits<double>::infinity();
    if (constraints_.empty()) return 0.0;
    for (const LinearConstraint& c : constraints_) {
      worst = std::max(worst, c.violation(x));
    }
    return worst;
  }

  bool is_feasible(std::span<const double> x, double tol = 1e-6) const {
    return max_violation(x) <= tol;
  }

  /// Moves x to a nearby feasible point by cyclic projection onto the
  /// violated half-spaces. Converges fast for the box/difference chains
  /// used here; falls back to blending toward the witness if sweeps stall.
  std::vector<double> project(std::span<const double> x, double tol = 1e-9,
                              int max_sweeps = 200) const {
    std::vector<double> y(x.begin(), x.end());
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      if (max_violation(y) <= tol) return y;
      for (const LinearConstraint& c : constraints_) {
        const double v = c.dot(y);
        double excess = 0.0;
        if (v > c.hi) {
          excess = v - c.hi;
        } else if (v < c.lo) {
          excess = v - c.lo;
        } else {
          continue;
        }
        double nrm2 = 0.0;
        for (double a : c.coeffs) nrm2 += a * a;
        if (nrm2 <= 0.0) continue;
        const double step = excess / nrm2;
        for (std::size_t i = 0; i < y.size(); ++i) y[i] -= step * c.coeffs[i];
      }
    }
    // Cyclic projection can stall on sliver intersections; the witness is
    // strictly interior, so a blend always lands feasible.
    double t = 0.5;
    while (t <= 1.0) {
      std::vector<double> blend(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) {
        blend[i] = (1.0 - t) * y[i] + t * witness_[i];
      }
      if (max_violation(blend) <= tol) return blend;
      t += 0.25;
    }
    return witness_;
  }

 private:
  int dim_ = 0;
  std::vector<LinearConstraint> constraints_;
  std::vector<double> witness_;
};

}  // namespace qdist
