#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdist/common.hpp"
#include "qdist/distribution.hpp"

namespace qdist {

// Qubit 0 is the least significant bit of the basis index: basis state i
// encodes qubit k as bit k, so the MSB qubit is q_{n-1}.

enum class GateKind { RY, X, CNOT, CZ, CRY, CCRY, MCRY };

inline const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::RY: return "RY";
    case GateKind::X: return "X";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::CRY: return "CRY";
    case GateKind::CCRY: return "CCRY";
    case GateKind::MCRY: return "MCRY";
  }
  return "?";
}

inline GateKind gate_kind_from_string(const std::string& s) {
  if (s == "RY") return GateKind::RY;
  if (s == "X") return GateKind::X;
  if (s == "CNOT") return GateKind::CNOT;
  if (s == "CZ") return GateKind::CZ;
  if (s == "CRY") return GateKind::CRY;
  if (s == "CCRY") return GateKind::CCRY;
  if (s == "MCRY") return GateKind::MCRY;
  throw std::invalid_argument("unknown gate kind '" + s + "'");
}

inline bool is_rotation(GateKind k) {
  return k == GateKind::RY || k == GateKind::CRY || k == GateKind::CCRY ||
         k == GateKind::MCRY;
}

/// A control wire: the gate acts only on basis states where `qubit`
/// carries `bit`. Control-on-0 is first class; see expand_control_zeros
/// for the X-sandwich form.
struct Control {
  int qubit = 0;
  int bit = 1;

  friend bool operator==(const Control&, const Control&) = default;
};

struct Gate {
  GateKind kind = GateKind::RY;
  int target = 0;
  std::vector<Control> controls;
  double angle_value = 0.0;  // radians; ignored when param_slot >= 0
  int param_slot = -1;       // >= 0 references a circuit parameter

  bool has_param() const { return param_slot >= 0; }

  double angle(std::span<const double> params) const {
    if (!has_param()) return angle_value;
    if (static_cast<std::size_t>(param_slot) >= params.size()) {
      throw std::invalid_argument("gate references parameter slot " +
                                  std::to_string(param_slot) + " but only " +
                                  std::to_string(params.size()) + " values were supplied");
    }
    return params[static_cast<std::size_t>(param_slot)];
  }

  static Gate ry(int target, double theta) {
    return Gate{GateKind::RY, target, {}, theta, -1};
  }
  static Gate ry_param(int target, int slot) {
    return Gate{GateKind::RY, target, {}, 0.0, slot};
  }
  static Gate x(int target) { return Gate{GateKind::X, target, {}, 0.0, -1}; }
  static Gate cnot(int control, int target) {
    return Gate{GateKind::CNOT, target, {Control{control, 1}}, 0.0, -1};
  }
  static Gate cz(int control, int target) {
    return Gate{GateKind::CZ, target, {Control{control, 1}}, 0.0, -1};
  }
  static Gate cry(Control control, int target, double theta) {
    return Gate{GateKind::CRY, target, {control}, theta, -1};
  }
  static Gate cry_param(Control control, int target, int slot) {
    return Gate{GateKind::CRY, target, {control}, 0.0, slot};
  }
  static Gate ccry_param(Control c0, Control c1, int target, int slot) {
    return Gate{GateKind::CCRY, target, {c0, c1}, 0.0, slot};
  }
  /// Multi-controlled RY (3+ controls); fixed angle.
  static Gate mcry(std::vector<Control> controls, int target, double theta) {
    return Gate{GateKind::MCRY, target, std::move(controls), theta, -1};
  }

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Structural validation of a single gate against the qubit count.
inline void validate_gate(const Gate& g, int num_qubits) {
  auto bad = [&](const std::string& msg) {
    throw std::invalid_argument(std::string(to_string(g.kind)) + " gate: " + msg);
  };
  if (g.target < 0 || g.target >= num_qubits) bad("target out of range");
  for (const Control& c : g.controls) {
    if (c.qubit < 0 || c.qubit >= num_qubits) bad("control qubit out of range");
    if (c.qubit == g.target) bad("control coincides with target");
    if (c.bit != 0 && c.bit != 1) bad("control bit must be 0 or 1");
  }
  for (std::size_t i = 0; i < g.controls.size(); ++i) {
    for (std::size_t j = i + 1; j < g.controls.size(); ++j) {
      if (g.controls[i].qubit == g.controls[j].qubit) bad("duplicate control qubit");
    }
  }
  switch (g.kind) {
    case GateKind::RY:
    case GateKind::X:
      if (!g.controls.empty()) bad("takes no controls");
      break;
    case GateKind::CNOT:
    case GateKind::CZ:
      if (g.controls.size() != 1 || g.controls[0].bit != 1) {
        bad("takes exactly one control on bit 1");
      }
      break;
    case GateKind::CRY:
      if (g.controls.size() != 1) bad("takes exactly one control");
      break;
    case GateKind::CCRY:
      if (g.controls.size() != 2) bad("takes exactly two controls");
      break;
    case GateKind::MCRY:
      if (g.controls.size() < 3) bad("takes three or more controls");
      break;
  }
  if (!is_rotation(g.kind) && g.has_param()) bad("only rotation gates take parameters");
  if (!g.has_param() && !std::isfinite(g.angle_value)) bad("angle must be finite");
}

struct Circuit {
  int num_qubits = 0;
  std::vector<Gate> gates;
  int num_params = 0;

  void validate() const {
    if (num_qubits < 1) throw std::invalid_argument("circuit needs at least one qubit");
    if (num_params < 0) throw std::invalid_argument("negative parameter count");
    std::vector<bool> referenced(static_cast<std::size_t>(num_params), false);
    for (const Gate& g : gates) {
      validate_gate(g, num_qubits);
      if (g.has_param()) {
        if (g.param_slot >= num_params) {
          throw std::invalid_argument("gate references slot " + std::to_string(g.param_slot) +
                                      " but circuit has " + std::to_string(num_params) +
                                      " parameters");
        }
        referenced[static_cast<std::size_t>(g.param_slot)] = true;
      }
    }
    for (int s = 0; s < num_params; ++s) {
      if (!referenced[static_cast<std::size_t>(s)]) {
        throw std::invalid_argument("parameter slot " + std::to_string(s) +
                                    " is referenced by no gate");
      }
    }
  }
};

struct StateVector {
  int num_qubits = 0;
  std::vector<Complex> amplitudes;

  static StateVector zero_state(int num_qubits) {
    if (num_qubits < 1) throw std::invalid_argument("state needs at least one qubit");
    StateVector s{num_qubits, std::vector<Complex>(std::size_t{1} << num_qubits)};
    s.amplitudes[0] = 1.0;
    return s;
  }

  std::size_t dim() const { return amplitudes.size(); }

  double norm() const {
    double s = 0.0;
    for (const Complex& a : amplitudes) s += std::norm(a);
    return std::sqrt(s);
  }
};

/// Eq.-style single-qubit Y rotation, [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]].
inline std::array<std::array<double, 2>, 2> ry_matrix(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("ry_matrix: non-finite angle");
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  return {{{c, -s}, {s, c}}};
}

namespace detail {

inline void control_masks(const Gate& g, std::uint64_t& mask, std::uint64_t& value) {
  mask = 0;
  value = 0;
  for (const Control& c : g.controls) {
    mask |= std::uint64_t{1} << c.qubit;
    value |= static_cast<std::uint64_t>(c.bit) << c.qubit;
  }
}

}  // namespace detail

/// Applies one gate in place. Amplitudes whose control bits mismatch are
/// left untouched (bit-exact).
inline void apply_gate_inplace(StateVector& state, const Gate& g,
                               std::span<const double> params = {}) {
  validate_gate(g, state.num_qubits);
  const std::uint64_t dim = state.dim();
  const std::uint64_t tmask = std::uint64_t{1} << g.target;
  std::uint64_t cmask = 0, cval = 0;
  detail::control_masks(g, cmask, cval);
  auto* amp = state.amplitudes.data();

  switch (g.kind) {
    case GateKind::X:
    case GateKind::CNOT: {
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & tmask) == 0 && (i & cmask) == cval) {
          std::swap(amp[i], amp[i | tmask]);
        }
      }
      break;
    }
    case GateKind::CZ: {
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & tmask) != 0 && (i & cmask) == cval) amp[i] = -amp[i];
      }
      break;
    }
    case GateKind::RY:
    case GateKind::CRY:
    case GateKind::CCRY:
    case GateKind::MCRY: {
      const auto m = ry_matrix(g.angle(params));
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & tmask) == 0 && (i & cmask) == cval) {
          const Complex a0 = amp[i];
          const Complex a1 = amp[i | tmask];
          amp[i] = m[0][0] * a0 + m[0][1] * a1;
          amp[i | tmask] = m[1][0] * a0 + m[1][1] * a1;
        }
      }
      break;
    }
  }
}

inline StateVector apply_gate(const StateVector& state, const Gate& g,
                              std::span<const double> params = {}) {
  StateVector out = state;
  apply_gate_inplace(out, g, params);
  return out;
}

/// Runs the circuit on |0...0> with the given parameter values.
inline StateVector simulate(const Circuit& circuit, std::span<const double> params = {}) {
  circuit.validate();
  if (params.size() != static_cast<std::size_t>(circuit.num_params)) {
    throw std::invalid_argument("circuit has " + std::to_string(circuit.num_params) +
                                " parameters, got " + std::to_string(params.size()) +
                                " values");
  }
  StateVector state = StateVector::zero_state(circuit.num_qubits);
  for (const Gate& g : circuit.gates) apply_gate_inplace(state, g, params);
  return state;
}

/// Measurement distribution of a state: element i is |amplitude_i|^2.
inline DiscreteDistribution probabilities(const StateVector& state) {
  std::vector<double> probs(state.dim());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(state.amplitudes[i]);
  return DiscreteDistribution::from_probs(std::move(probs));
}

}  // namespace qdist
