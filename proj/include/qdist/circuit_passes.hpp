#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qdist/simulator.hpp"

namespace qdist {

/// Rewrites control-on-0 wires into X sandwiches (X, control-on-1, X).
/// Adjacent gates sharing an inverted control reuse one open sandwich, so
/// a block of gates controlled on the same |0> wire costs two X gates
/// total, which is what the hand-counted circuits assume.
inline Circuit expand_control_zeros(const Circuit& circuit) {
  circuit.validate();
  Circuit out{circuit.num_qubits, {}, circuit.num_params};
  std::vector<bool> flipped(static_cast<std::size_t>(circuit.num_qubits), false);

  auto set_frame = [&](int qubit, bool want) {
    if (flipped[static_cast<std::size_t>(qubit)] != want) {
      out.gates.push_back(Gate::x(qubit));
      flipped[static_cast<std::size_t>(qubit)] = want;
    }
  };

  for (const Gate& g : circuit.gates) {
    // An open X frame on the target would conjugate the gate, so close it.
    set_frame(g.target, false);
    Gate h = g;
    for (Control& c : h.controls) {
      set_frame(c.qubit, c.bit == 0);
      c.bit = 1;
    }
    out.gates.push_back(std::move(h));
  }
  for (int q = 0; q < circuit.num_qubits; ++q) set_frame(q, false);
  return out;
}

namespace detail {

inline std::uint64_t gray_code(std::uint64_t i) { return i ^ (i >> 1); }

}  // namespace detail

/// Decomposes a controlled RY (any number of controls, any control bits)
/// into plain RY and CNOT gates via the Gray-code multiplexed-rotation
/// identity: the single active control pattern is treated as a multiplexor
/// whose other branch angles are zero. 2^k rotations and 2^k CNOTs for k
/// controls.
inline std::vector<Gate> decompose_controlled_ry(const Gate& g) {
  if (!is_rotation(g.kind)) {
    throw std::invalid_argument("decompose_controlled_ry: not a rotation gate");
  }
  if (g.has_param()) {
    throw std::invalid_argument("decompose_controlled_ry: bind parameters first");
  }
  const std::size_t k = g.controls.size();
  if (k == 0) return {g};

  const std::uint64_t size = std::uint64_t{1} << k;
  // Pattern index: bit i corresponds to controls[i].
  std::uint64_t pattern = 0;
  for (std::size_t i = 0; i < k; ++i) {
    pattern |= static_cast<std::uint64_t>(g.controls[i].bit) << i;
  }

  std::vector<Gate> out;
  out.reserve(2 * size);
  const double scale = g.angle_value / static_cast<double>(size);
  for (std::uint64_t i = 0; i < size; ++i) {
    const int sign = (std::popcount(pattern & detail::gray_code(i)) & 1) ? -1 : 1;
    out.push_back(Gate::ry(g.target, sign * scale));
    const std::uint64_t next = detail::gray_code((i + 1) & (size - 1));
    const int flip_bit = std::countr_zero(detail::gray_code(i) ^ next);
    out.push_back(Gate::cnot(g.controls[static_cast<std::size_t>(flip_bit)].qubit, g.target));
  }
  return out;
}

/// Lowers a circuit to the {RY, X, CNOT, CZ} set with all control bits 1,
/// the form the OpenQASM exporter emits. Parameters must be bound.
inline Circuit lower_to_basic_gates(const Circuit& circuit,
                                    std::span<const double> params = {}) {
  circuit.validate();
  if (params.size() != static_cast<std::size_t>(circuit.num_params)) {
    throw std::invalid_argument("lower_to_basic_gates: parameter count mismatch");
  }
  Circuit bound{circuit.num_qubits, {}, 0};
  for (Gate g : circuit.gates) {
    if (g.has_param()) {
      g.angle_value = g.angle(params);
      g.param_slot = -1;
    }
    bound.gates.push_back(std::move(g));
  }
  const Circuit expanded = expand_control_zeros(bound);
  Circuit out{circuit.num_qubits, {}, 0};
  for (const Gate& g : expanded.gates) {
    if (is_rotation(g.kind) && !g.controls.empty()) {
      auto seq = decompose_controlled_ry(g);
      out.gates.insert(out.gates.end(), seq.begin(), seq.end());
    } else {
      out.gates.push_back(g);
    }
  }
  return out;
}

}  // namespace qdist
