#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdist/constraints.hpp"
#include "qdist/metrics.hpp"
#include "qdist/sampling.hpp"
#include "qdist/simulator.hpp"

namespace qdist {

enum class OptimizerMethod { CobylaLike, NelderMeadPenalty };
enum class EvalMode { ExactProbs, Shots };

inline const char* to_string(OptimizerMethod m) {
  return m == OptimizerMethod::CobylaLike ? "cobyla" : "nelder-mead";
}

inline OptimizerMethod optimizer_method_from_string(const std::string& s) {
  if (s == "cobyla") return OptimizerMethod::CobylaLike;
  if (s == "nelder-mead") return OptimizerMethod::NelderMeadPenalty;
  throw std::invalid_argument("unknown optimizer method '" + s + "'");
}

struct OptimizerConfig {
  OptimizerMethod method = OptimizerMethod::CobylaLike;
  int max_evals = 2000;  // per restart
  double initial_step = 0.5;
  double convergence_tol = 1e-8;  // incumbent stall threshold over 50 evals
  int restarts = 5;
  std::uint64_t seed = 0;
  EvalMode mode = EvalMode::ExactProbs;
  std::uint64_t shots = 10000;

  void validate() const {
    if (max_evals < 1) throw std::invalid_argument("max_evals must be >= 1");
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    if (!(initial_step > 0.0)) throw std::invalid_argument("initial_step must be > 0");
    if (mode == EvalMode::Shots && shots < 1) throw std::invalid_argument("shots must be >= 1");
  }
};

struct OptimizationResult {
  std::vector<double> best_params;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> loss_trace;  // every evaluation, in order
  int evals_used = 0;
  double constraint_violation = 0.0;  // max signed violation at best_params
  bool budget_exhausted = false;      // no restart converged before its eval cap
  MetricsReport report;
};

/// Squared-L2 mismatch between the target and the circuit's output
/// distribution, either from exact probabilities or from a seeded shot
/// histogram.
inline double loss(const Circuit& circuit, std::span<const double> params,
                   const DiscreteDistribution& target, EvalMode mode = EvalMode::ExactProbs,
                   std::uint64_t shots = 10000, std::uint64_t seed = 0) {
  DiscreteDistribution gen = probabilities(simulate(circuit, params));
  if (mode == EvalMode::Shots) {
    gen = empirical_distribution(sample_counts(gen, shots, seed), gen.grid);
  }
  return l2_squared(target, gen);
}

namespace detail {

/// Gaussian elimination with partial pivoting; nullopt when the system is
/// numerically singular.
inline std::optional<std::vector<double>> solve_linear(std::vector<std::vector<double>> a,
                                                       std::vector<double> b) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (const auto& row : a) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  if (scale <= 0.0) return std::nullopt;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-12 * scale) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// Records every loss evaluation, tracks the feasible incumbent (global
/// and per restart), and enforces the per-restart budget and the
/// 50-evaluation stall rule.
class LossEvaluator {
 public:
  static constexpr int kStallWindow = 50;

  LossEvaluator(const Circuit& circuit, const ConstraintSet& cs,
                const DiscreteDistribution& target, const OptimizerConfig& cfg)
      : circuit_(circuit), cs_(cs), target_(target), cfg_(cfg) {}

  double eval(std::span<const double> x) {
    const double f = loss(circuit_, x, target_, cfg_.mode, cfg_.shots,
                          mix_seed(cfg_.seed, 0x6c6f7373ULL + trace_.size()));
    trace_.push_back(f);
    ++restart_evals_;
    if (cs_.is_feasible(x, 1e-6)) {
      if (f < best_loss_) {
        best_loss_ = f;
        best_params_.assign(x.begin(), x.end());
      }
      restart_best_ = std::min(restart_best_, f);
    }
    restart_history_.push_back(restart_best_);
    return f;
  }

  void begin_restart() {
    restart_evals_ = 0;
    restart_best_ = std::numeric_limits<double>::infinity();
    restart_history_.clear();
  }

  bool can_eval() const { return restart_evals_ < cfg_.max_evals; }

  bool stalled() const {
    const std::size_t w = kStallWindow;
    if (restart_history_.size() < w + 1) return false;
    const double before = restart_history_[restart_history_.size() - 1 - w];
    const double now = restart_history_.back();
    if (!std::isfinite(before)) return false;
    return before - now < cfg_.convergence_tol;
  }

  bool done() const { return !can_eval() || stalled(); }
  bool hit_cap() const { return restart_evals_ >= cfg_.max_evals; }

  const std::vector<double>& trace() const { return trace_; }
  const std::vector<double>& best_params() const { return best_params_; }
  double best_loss() const { return best_loss_; }

 private:
  const Circuit& circuit_;
  const ConstraintSet& cs_;
  const DiscreteDistribution& target_;
  const OptimizerConfig& cfg_;
  std::vector<double> trace_;
  std::vector<double> best_params_;
  double best_loss_ = std::numeric_limits<double>::infinity();
  int restart_evals_ = 0;
  double restart_best_ = std::numeric_limits<double>::infinity();
  std::vector<double> restart_history_;
};

/// Derivative-free linear-approximation trust-region method. A simplex of
/// n+1 points supplies an interpolated gradient; the step is the steepest
/// model descent of length rho projected onto the feasible polytope, so
/// every candidate (and hence the incumbent) stays feasible. rho shrinks
/// on failed steps and the simplex is rebuilt when its geometry degrades.
inline void cobyla_like(LossEvaluator& ev, const ConstraintSet& cs,
                        const std::vector<double>& start, double rho_beg) {
  const std::size_t n = start.size();
  const double rho_end = 1e-7;
  const double rho_max = 4.0 * rho_beg;
  double rho = rho_beg;

  std::vector<std::vector<double>> pts;
  std::vector<double> fv;

  auto reset_simplex = [&](const std::vector<double>& center, double f_center) {
    pts.assign(1, center);
    fv.assign(1, f_center);
    for (std::size_t i = 0; i < n && ev.can_eval(); ++i) {
      std::vector<double> p = center;
      p[i] += rho;
      fv.push_back(ev.eval(p));
      pts.push_back(std::move(p));
    }
  };

  if (!ev.can_eval()) return;
  reset_simplex(start, ev.eval(start));

  while (!ev.done() && rho > rho_end) {
    if (pts.size() < n + 1) return;  // budget died mid-rebuild

    // Interpolate the gradient from the simplex displacements.
    std::vector<std::vector<double>> s(n, std::vector<double>(n));
    std::vector<double> df(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) s[i][j] = pts[i + 1][j] - pts[0][j];
      df[i] = fv[i + 1] - fv[0];
    }
    const auto g = solve_linear(std::move(s), std::move(df));
    if (!g) {
      reset_simplex(pts[0], fv[0]);
      continue;
    }
    const double gn = norm2(*g);
    if (gn < 1e-15) {
      rho *= 0.5;
      reset_simplex(pts[0], fv[0]);
      continue;
    }

    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = pts[0][i] - rho * (*g)[i] / gn;
    std::vector<double> cand = cs.project(raw);
    // Projection of a feasible-centered ball stays in the ball, but the
    // stall fallback inside project() may not; clamp along the (feasible,
    // convex) segment.
    double slen = distance(cand, pts[0]);
    if (slen > rho) {
      const double t = rho / slen;
      for (std::size_t i = 0; i < n; ++i) cand[i] = pts[0][i] + t * (cand[i] - pts[0][i]);
      slen = rho;
    }
    if (slen < 0.05 * rho) {
      // Stuck against the boundary at this scale.
      rho *= 0.5;
      continue;
    }
    if (!ev.can_eval()) break;
    const double fc = ev.eval(cand);

    double pred = 0.0;
    for (std::size_t i = 0; i < n; ++i) pred += (*g)[i] * (cand[i] - pts[0][i]);

    if (fc < fv[0]) {
      // Accept: candidate becomes the center, old center stays in the set.
      std::size_t far = 1;
      for (std::size_t i = 2; i < pts.size(); ++i) {
        if (distance(pts[i], cand) > distance(pts[far], cand)) far = i;
      }
      pts[far] = pts[0];
      fv[far] = fv[0];
      pts[0] = std::move(cand);
      fv[0] = fc;
      if (pred < 0.0 && fc - fv[far] <= 0.7 * pred) rho = std::min(rho * 1.5, rho_max);
    } else {
      std::size_t worst = 1;
      for (std::size_t i = 2; i < pts.size(); ++i) {
        if (fv[i] > fv[worst]) worst = i;
      }
      if (fc < fv[worst]) {
        pts[worst] = std::move(cand);
        fv[worst] = fc;
      }
      rho *= 0.7;
    }

    // Rebuild when the simplex has drifted away from the trust region.
    double spread = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      spread = std::max(spread, distance(pts[i], pts[0]));
    }
    if (spread > 6.0 * rho || spread < 0.05 * rho) reset_simplex(pts[0], fv[0]);
  }
}

/// Nelder-Mead on the quadratic-penalty merit function. The weight doubles
/// whenever the inner search returns an infeasible best point.
inline void nelder_mead_penalty(LossEvaluator& ev, const ConstraintSet& cs,
                                const std::vector<double>& start, double step0) {
  const std::size_t n = start.size();

  auto penalty = [&](std::span<const double> x) {
    double p = 0.0;
    for (const LinearConstraint& c : cs.constraints()) {
      const double v = std::max(0.0, c.violation(x));
      p += v * v;
    }
    return p;
  };

  double weight = 1e3;
  std::vector<double> origin = start;
  double step = step0;

  for (int round = 0; round < 40 && ev.can_eval(); ++round) {
    auto merit = [&](std::span<const double> x) { return ev.eval(x) + weight * penalty(x); };

    std::vector<std::vector<double>> pts(1, origin);
    std::vector<double> fv(1, merit(origin));
    for (std::size_t i = 0; i < n && ev.can_eval(); ++i) {
      std::vector<double> p = origin;
      p[i] += step;
      fv.push_back(merit(p));
      pts.push_back(std::move(p));
    }
    if (pts.size() < n + 1) break;

    auto order = [&] {
      std::vector<std::size_t> idx(pts.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
      std::vector<std::vector<double>> p2;
      std::vector<double> f2;
      for (auto i : idx) {
        p2.push_back(std::move(pts[i]));
        f2.push_back(fv[i]);
      }
      pts = std::move(p2);
      fv = std::move(f2);
    };

    while (!ev.done()) {
      order();
      double diameter = 0.0;
      for (std::size_t i = 1; i < pts.size(); ++i) {
        diameter = std::max(diameter, distance(pts[i], pts[0]));
      }
      if (diameter < 1e-10 && fv.back() - fv.front() < 1e-14 * (1.0 + std::abs(fv.front()))) {
        break;
      }

      std::vector<double> centroid(n, 0.0);
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
      }
      for (double& c : centroid) c /= static_cast<double>(n);

      auto along = [&](double t) {
        std::vector<double> p(n);
        for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (centroid[j] - pts.back()[j]);
        return p;
      };

      auto reflected = along(1.0);
      if (!ev.can_eval()) break;
      const double fr = merit(reflected);
      if (fr < fv[0]) {
        auto expanded = along(2.0);
        if (!ev.can_eval()) break;
        const double fe = merit(expanded);
        if (fe < fr) {
          pts.back() = std::move(expanded);
          fv.back() = fe;
        } else {
          pts.back() = std::move(reflected);
          fv.back() = fr;
        }
      } else if (fr < fv[fv.size() - 2]) {
        pts.back() = std::move(reflected);
        fv.back() = fr;
      } else {
        const bool outside = fr < fv.back();
        auto contracted = along(outside ? 0.5 : -0.5);
        if (!ev.can_eval()) break;
        const double fc = merit(contracted);
        if (fc < std::min(fr, fv.back())) {
          pts.back() = std::move(contracted);
          fv.back() = fc;
        } else {
          // Shrink toward the best vertex.
          for (std::size_t i = 1; i < pts.size() && ev.can_eval(); ++i) {
            for (std::size_t j = 0; j < n; ++j) pts[i][j] = 0.5 * (pts[i][j] + pts[0][j]);
            fv[i] = merit(pts[i]);
          }
        }
      }
    }

    order();
    if (cs.max_violation(pts[0]) <= 1e-6) break;
    weight *= 2.0;
    origin = cs.project(pts[0]);
    step = std::max(0.25 * step, 1e-3);
  }
}

}  // namespace detail

/// Best-of-restarts constrained minimization of the distribution-mismatch
/// loss. Every returned point satisfies the constraint set within 1e-6;
/// running the same config and seed twice gives identical results.
inline OptimizationResult minimize(const Circuit& circuit, const ConstraintSet& cs,
                                   const DiscreteDistribution& target,
                                   const OptimizerConfig& cfg) {
  cfg.validate();
  circuit.validate();
  if (circuit.num_params != cs.dim()) {
    throw std::invalid_argument("minimize: circuit has " + std::to_string(circuit.num_params) +
                                " parameters but constraints have dimension " +
                                std::to_string(cs.dim()));
  }
  const std::size_t out_bins = std::size_t{1} << circuit.num_qubits;
  if (target.size() != out_bins) {
    throw std::invalid_argument("minimize: target has " + std::to_string(target.size()) +
                                " bins, circuit produces " + std::to_string(out_bins));
  }

  detail::LossEvaluator ev(circuit, cs, target, cfg);
  const std::vector<double>& witness = cs.feasible_point();
  const std::size_t n = witness.size();
  bool all_hit_cap = true;

  for (int r = 0; r < cfg.restarts; ++r) {
    std::mt19937_64 rng(mix_seed(cfg.seed, 0x72657374ULL + static_cast<std::uint64_t>(r)));
    std::vector<double> start = witness;
    for (double& x : start) x += (uniform01(rng) - 0.5) * cfg.initial_step;
    start = cs.project(start);

    ev.begin_restart();
    if (n == 0) {
      ev.eval(start);
      all_hit_cap = false;
      break;  // nothing to vary
    }
    if (cfg.method == OptimizerMethod::CobylaLike) {
      detail::cobyla_like(ev, cs, start, cfg.initial_step);
    } else {
      detail::nelder_mead_penalty(ev, cs, start, cfg.initial_step);
    }
    if (!ev.hit_cap()) all_hit_cap = false;
  }

  OptimizationResult result;
  result.best_params = ev.best_params();
  result.best_loss = ev.best_loss();
  result.loss_trace = ev.trace();
  result.evals_used = static_cast<int>(ev.trace().size());
  result.budget_exhausted = all_hit_cap;
  result.constraint_violation = n == 0 ? 0.0 : cs.max_violation(result.best_params);

  const DiscreteDistribution gen = probabilities(simulate(circuit, result.best_params));
  result.report.relative_entropy = relative_entropy(target, gen);
  result.report.l2_squared = l2_squared(target, gen);
  const KsResult ks = ks_test_sampled(target, gen, 10000, mix_seed(cfg.seed, 0x6b73ULL));
  result.report.ks_statistic = ks.statistic;
  result.report.ks_p_value = ks.p_value;
  result.report.exact_probabilities = cfg.mode == EvalMode::ExactProbs;
  result.report.shots_used = cfg.mode == EvalMode::Shots ? cfg.shots : 0;
  return result;
}

}  // namespace qdist
