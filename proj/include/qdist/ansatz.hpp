#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdist/circuit_passes.hpp"
#include "qdist/constraints.hpp"
#include "qdist/distribution.hpp"
#include "qdist/simulator.hpp"

namespace qdist {

enum class AnsatzFamily {
  AdaptiveSymmetric,
  AdaptiveAsymmetric,
  AdaptiveStrongSkew,
  RyCz,
  GroverRudolph,
};

enum class Skew { Positive, Negative };
enum class Entanglement { Linear, Circular };

inline const char* to_string(AnsatzFamily f) {
  switch (f) {
    case AnsatzFamily::AdaptiveSymmetric: return "symmetric";
    case AnsatzFamily::AdaptiveAsymmetric: return "asymmetric";
    case AnsatzFamily::AdaptiveStrongSkew: return "strong-skew";
    case AnsatzFamily::RyCz: return "rycz";
    case AnsatzFamily::GroverRudolph: return "grover-rudolph";
  }
  return "?";
}

inline AnsatzFamily ansatz_family_from_string(const std::string& s) {
  if (s == "symmetric") return AnsatzFamily::AdaptiveSymmetric;
  if (s == "asymmetric") return AnsatzFamily::AdaptiveAsymmetric;
  if (s == "strong-skew") return AnsatzFamily::AdaptiveStrongSkew;
  if (s == "rycz") return AnsatzFamily::RyCz;
  if (s == "grover-rudolph") return AnsatzFamily::GroverRudolph;
  throw std::invalid_argument("unknown ansatz family '" + s + "'");
}

struct AnsatzSpec {
  AnsatzFamily family = AnsatzFamily::AdaptiveSymmetric;
  int num_qubits = 0;
  int layers = 1;                                    // RyCz
  Entanglement entanglement = Entanglement::Linear;  // RyCz
  Skew skew = Skew::Positive;                        // asymmetric / strong-skew
  int pivot = -1;                                    // strong-skew; -1 = caller resolves
  int fine_branch = 0;  // asymmetric fine-tune block: second-MSB control bit
};

struct Ansatz {
  Circuit circuit;
  ConstraintSet constraints;
};

/// Gate counts after control-on-0 expansion, plus the parameter count.
struct GateCensus {
  std::map<GateKind, int> counts;
  int num_params = 0;

  int count(GateKind k) const {
    auto it = counts.find(k);
    return it == counts.end() ? 0 : it->second;
  }

  friend bool operator==(const GateCensus&, const GateCensus&) = default;
};

inline GateCensus circuit_census(const Circuit& circuit) {
  const Circuit expanded = expand_control_zeros(circuit);
  GateCensus census;
  census.num_params = circuit.num_params;
  for (const Gate& g : expanded.gates) ++census.counts[g.kind];
  return census;
}

// ---------------------------------------------------------------------------
// Symmetric family.
//
// A fixed RY(pi/2) on the MSB makes the two MSB branches carry equal
// amplitude; one parameterized RY per lower qubit shapes the half
// distribution, and a CNOT fan-out from the MSB mirrors it onto the upper
// half index-reversed. The mirror identity p_i = p_{2^n-1-i} holds for any
// angles; the box/ordering constraints below push the halves into a
// central bump.
// ---------------------------------------------------------------------------

inline Ansatz build_symmetric(int n) {
  if (n < 2) throw std::invalid_argument("build_symmetric: need at least 2 qubits");
  const int msb = n - 1;
  Circuit c{n, {}, n - 1};
  c.gates.push_back(Gate::ry(msb, kPi / 2));
  // theta_k acts on qubit n-k and lives in slot k-2, k = 2..n.
  for (int k = 2; k <= n; ++k) c.gates.push_back(Gate::ry_param(n - k, k - 2));
  for (int t = msb - 1; t >= 0; --t) c.gates.push_back(Gate::cnot(msb, t));

  const int dim = n - 1;
  std::vector<LinearConstraint> cs;
  for (int s = 0; s < dim; ++s) cs.push_back(box_constraint(dim, s, kPi / 2, 5 * kPi / 2));
  for (int s = 0; s + 1 < dim; ++s) {
    cs.push_back(difference_constraint(dim, s, s + 1, 0.0, 2 * kPi));
  }
  // Descending chain starting at pi keeps every bound strictly slack.
  std::vector<double> witness(static_cast<std::size_t>(dim));
  for (int s = 0; s < dim; ++s) witness[static_cast<std::size_t>(s)] = kPi - s * kPi / (4.0 * n);
  return Ansatz{std::move(c), ConstraintSet(dim, std::move(cs), std::move(witness))};
}

// ---------------------------------------------------------------------------
// Asymmetric family.
//
// The MSB splits the index range into a peak half and a tail half. The
// tail half gets one controlled RY per lower qubit with progressively
// increasing angles; the peak half reuses the symmetric construction
// (controlled on the MSB, CNOT fan-out from the second MSB) plus a block
// of doubly controlled RY gates that fine-tune the outermost quarter.
//
// Slot layout (fixed so serialized parameter vectors are unambiguous):
//   0                 theta_1 on the MSB
//   1      .. n-1     tail-side CRY angles, highest target qubit first
//   n      .. 2n-2    peak-side CRY angles, highest target qubit first
//   2n-1   .. 3n-4    fine-tune CCRY angles, highest target qubit first
// ---------------------------------------------------------------------------

namespace detail {

struct AsymmetricLayout {
  int tail_slot_begin = 1;
  int peak_slot_begin = 0;
  int fine_slot_begin = 0;
};

inline Ansatz build_skewed(int n, Skew skew, int cnot_control, int fine_branch) {
  const int msb = n - 1;
  const int smsb = n - 2;
  const int tail_bit = skew == Skew::Positive ? 1 : 0;
  const int peak_bit = 1 - tail_bit;
  const int dim = 3 * n - 3;

  Circuit c{n, {}, dim};
  c.gates.push_back(Gate::ry_param(msb, 0));
  for (int k = 2; k <= n; ++k) {
    c.gates.push_back(Gate::cry_param(Control{msb, tail_bit}, n - k, k - 1));
  }
  for (int k = 2; k <= n; ++k) {
    c.gates.push_back(Gate::cry_param(Control{msb, peak_bit}, n - k, n + k - 2));
  }
  for (int t = cnot_control - 1; t >= 0; --t) c.gates.push_back(Gate::cnot(cnot_control, t));
  for (int k = 3; k <= n; ++k) {
    c.gates.push_back(Gate::ccry_param(Control{msb, peak_bit}, Control{smsb, fine_branch},
                                       n - k, 2 * n - 2 + k - 2));
  }

  std::vector<LinearConstraint> cs;
  std::vector<double> witness(static_cast<std::size_t>(dim), 0.0);
  const double step = kPi / (4.0 * n);

  // theta_1 decides which MSB branch holds the mode; box mirrors the
  // tail-side bounds (positive skew) or the symmetric-family bounds
  // (negative skew).
  if (skew == Skew::Positive) {
    cs.push_back(box_constraint(dim, 0, -3 * kPi / 2, kPi / 2));
    witness[0] = kPi / 3;
  } else {
    cs.push_back(box_constraint(dim, 0, kPi / 2, 5 * kPi / 2));
    witness[0] = 2 * kPi / 3;
  }

  // Tail side: ascending angles capped at pi/2.
  for (int k = 2; k <= n; ++k) {
    const int s = k - 1;
    cs.push_back(box_constraint(dim, s, -3 * kPi / 2, kPi / 2));
    witness[static_cast<std::size_t>(s)] = kPi / 2 - (n - k + 1) * step;
  }
  for (int k = 2; k <= n - 1; ++k) {
    cs.push_back(difference_constraint(dim, k, k - 1, 0.0, 2 * kPi));
  }
  return Ansatz{std::move(c), ConstraintSet(dim, std::move(cs), std::move(witness))};
}

}  // namespace detail

inline Ansatz build_asymmetric(int n, Skew skew, int fine_branch = 0) {
  if (n < 3) throw std::invalid_argument("build_asymmetric: need at least 3 qubits");
  if (fine_branch != 0 && fine_branch != 1) {
    throw std::invalid_argument("build_asymmetric: fine_branch must be 0 or 1");
  }
  Ansatz a = detail::build_skewed(n, skew, n - 2, fine_branch);
  const int dim = 3 * n - 3;
  std::vector<LinearConstraint> cs = a.constraints.constraints();
  std::vector<double> witness = a.constraints.feasible_point();
  const double step = kPi / (4.0 * n);

  // Peak side: ordering constraints start one index later than on the
  // symmetric family; the angle on the second MSB stays free since the
  // half distribution is only approximately symmetric.
  cs.push_back(box_constraint(dim, n, -2 * kPi, 2 * kPi));
  witness[static_cast<std::size_t>(n)] = kPi / 2;
  for (int k = 3; k <= n; ++k) {
    const int s = n + k - 2;
    cs.push_back(box_constraint(dim, s, kPi / 2, 5 * kPi / 2));
    witness[static_cast<std::size_t>(s)] = kPi - (k - 3) * step;
  }
  for (int k = 3; k <= n - 1; ++k) {
    cs.push_back(difference_constraint(dim, n + k - 2, n + k - 1, 0.0, 2 * kPi));
  }
  for (int s = 2 * n - 1; s < dim; ++s) {
    cs.push_back(box_constraint(dim, s, -2 * kPi, 2 * kPi));
    witness[static_cast<std::size_t>(s)] = 0.0;
  }
  a.constraints = ConstraintSet(dim, std::move(cs), std::move(witness));
  return a;
}

inline Ansatz build_strong_skew(int n, int pivot, Skew skew = Skew::Positive,
                                int fine_branch = 0) {
  if (n < 4) throw std::invalid_argument("build_strong_skew: need at least 4 qubits");
  if (pivot < 1 || pivot > n - 3) {
    throw std::invalid_argument("build_strong_skew: pivot must be in [1, n-3]");
  }
  Ansatz a = detail::build_skewed(n, skew, pivot, fine_branch);
  const int dim = 3 * n - 3;
  std::vector<LinearConstraint> cs = a.constraints.constraints();
  std::vector<double> witness = a.constraints.feasible_point();
  const double step = kPi / (4.0 * n);

  // Peak side: qubits at or above the pivot act as free shoulder angles;
  // qubits below the pivot carry the mirrored bump and keep the ordering
  // chain. theta_k targets qubit n-k, so "below pivot" is k > n - pivot.
  const int first_bump_k = n - pivot + 1;
  for (int k = 2; k <= n; ++k) {
    const int s = n + k - 2;
    if (k < first_bump_k) {
      cs.push_back(box_constraint(dim, s, -2 * kPi, 2 * kPi));
      witness[static_cast<std::size_t>(s)] = kPi / 2;
    } else {
      cs.push_back(box_constraint(dim, s, kPi / 2, 5 * kPi / 2));
      witness[static_cast<std::size_t>(s)] = kPi - (k - first_bump_k) * step;
    }
  }
  for (int k = first_bump_k; k <= n - 1; ++k) {
    cs.push_back(difference_constraint(dim, n + k - 2, n + k - 1, 0.0, 2 * kPi));
  }
  for (int s = 2 * n - 1; s < dim; ++s) {
    cs.push_back(box_constraint(dim, s, -2 * kPi, 2 * kPi));
    witness[static_cast<std::size_t>(s)] = 0.0;
  }
  a.constraints = ConstraintSet(dim, std::move(cs), std::move(witness));
  return a;
}

/// Picks the strong-skew pivot for a target: the block boundary 2^p
/// nearest the peak bin, clamped to the valid pivot range.
inline int detect_pivot(const DiscreteDistribution& target) {
  const int n = target.num_qubits();
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target.probs[i] > target.probs[argmax]) argmax = i;
  }
  const double peak = static_cast<double>(argmax) + 0.5;
  int best = 1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= n - 3; ++p) {
    const double d = std::abs(static_cast<double>(std::uint64_t{1} << p) - peak);
    if (d < best_dist) {
      best_dist = d;
      best = p;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Ry-CZ baseline: alternating RY layers and CZ entanglers.
// ---------------------------------------------------------------------------

inline Ansatz build_rycz(int n, int layers, Entanglement entanglement) {
  if (n < 2) throw std::invalid_argument("build_rycz: need at least 2 qubits");
  if (layers < 1) throw std::invalid_argument("build_rycz: need at least 1 layer");
  const int dim = n * (layers + 1);
  Circuit c{n, {}, dim};
  for (int q = 0; q < n; ++q) c.gates.push_back(Gate::ry_param(q, q));
  for (int l = 1; l <= layers; ++l) {
    for (int q = 0; q + 1 < n; ++q) c.gates.push_back(Gate::cz(q, q + 1));
    // For n = 2 the circular wrap edge duplicates (0, 1); emit one CZ only.
    if (entanglement == Entanglement::Circular && n > 2) {
      c.gates.push_back(Gate::cz(n - 1, 0));
    }
    for (int q = 0; q < n; ++q) c.gates.push_back(Gate::ry_param(q, l * n + q));
  }

  std::vector<LinearConstraint> cs;
  std::vector<double> witness(static_cast<std::size_t>(dim), 2 * kPi);
  for (int s = 0; s < dim; ++s) cs.push_back(box_constraint(dim, s, 0.0, 4 * kPi));
  return Ansatz{std::move(c), ConstraintSet(dim, std::move(cs), std::move(witness))};
}

// ---------------------------------------------------------------------------
// Grover-Rudolph loader: exact, parameter-free amplitude loading. Each
// level conditions a rotation on every prefix of more significant bits;
// the angle encodes the conditional split of the remaining bin mass, so
// the prepared amplitudes are sqrt(p_i). Gate count grows as 2^n; the
// adaptive families above exist to avoid exactly that, and this loader
// serves as the exact reference.
// ---------------------------------------------------------------------------

inline Circuit build_grover_rudolph(const DiscreteDistribution& target) {
  const std::size_t bins = target.size();
  if (bins < 2 || !is_power_of_two(bins)) {
    throw std::invalid_argument("build_grover_rudolph: need 2^n bins with n >= 1");
  }
  const int n = log2_exact(bins);
  double total = 0.0;
  for (double p : target.probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("build_grover_rudolph: probabilities must be nonnegative");
    }
    total += p;
  }
  if (total <= 0.0) throw std::invalid_argument("build_grover_rudolph: all-zero target");

  Circuit c{n, {}, 0};
  // Level m rotates qubit n-1-m conditioned on the m qubits above it.
  // mass(prefix) sums target bins whose top m index bits equal the prefix.
  for (int m = 0; m < n; ++m) {
    const int target_qubit = n - 1 - m;
    const std::size_t block = bins >> m;  // bins sharing one prefix
    for (std::uint64_t prefix = 0; prefix < (std::uint64_t{1} << m); ++prefix) {
      double mass0 = 0.0, mass1 = 0.0;
      const std::size_t base = static_cast<std::size_t>(prefix) * block;
      for (std::size_t i = 0; i < block / 2; ++i) mass0 += target.probs[base + i];
      for (std::size_t i = block / 2; i < block; ++i) mass1 += target.probs[base + i];
      if (mass0 + mass1 <= 0.0) continue;  // dead branch, no gate needed
      const double theta = 2.0 * std::atan2(std::sqrt(mass1), std::sqrt(mass0));
      if (m == 0) {
        c.gates.push_back(Gate::ry(target_qubit, theta));
        continue;
      }
      std::vector<Control> controls;
      controls.reserve(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j) {
        const int control_qubit = n - 1 - j;
        const int bit = static_cast<int>((prefix >> (m - 1 - j)) & 1);
        controls.push_back(Control{control_qubit, bit});
      }
      Gate g;
      g.target = target_qubit;
      g.angle_value = theta;
      g.controls = std::move(controls);
      g.kind = m == 1 ? GateKind::CRY : (m == 2 ? GateKind::CCRY : GateKind::MCRY);
      c.gates.push_back(std::move(g));
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Spec-driven dispatch.
// ---------------------------------------------------------------------------

inline Ansatz build_ansatz(const AnsatzSpec& spec) {
  switch (spec.family) {
    case AnsatzFamily::AdaptiveSymmetric:
      return build_symmetric(spec.num_qubits);
    case AnsatzFamily::AdaptiveAsymmetric:
      return build_asymmetric(spec.num_qubits, spec.skew, spec.fine_branch);
    case AnsatzFamily::AdaptiveStrongSkew:
      return build_strong_skew(spec.num_qubits, spec.pivot, spec.skew, spec.fine_branch);
    case AnsatzFamily::RyCz:
      return build_rycz(spec.num_qubits, spec.layers, spec.entanglement);
    case AnsatzFamily::GroverRudolph:
      throw std::invalid_argument("grover-rudolph is built from a target distribution");
  }
  throw std::invalid_argument("unknown ansatz family");
}

inline GateCensus census(const AnsatzSpec& spec) {
  if (spec.family == AnsatzFamily::GroverRudolph) {
    // Counts depend on zero-mass pruning; report the dense (uniform) case.
    if (spec.num_qubits < 1) throw std::invalid_argument("census: need at least 1 qubit");
    const std::size_t bins = std::size_t{1} << spec.num_qubits;
    std::vector<double> uniform(bins, 1.0 / static_cast<double>(bins));
    return circuit_census(build_grover_rudolph(DiscreteDistribution::from_probs(uniform)));
  }
  return circuit_census(build_ansatz(spec).circuit);
}

}  // namespace qdist
