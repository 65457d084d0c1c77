#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdist/ansatz.hpp"
#include "qdist/circuit_passes.hpp"
#include "qdist/metrics.hpp"
#include "qdist/optimizer.hpp"
#include "qdist/simulator.hpp"
#include "qdist/targets.hpp"

namespace qdist {

/// 17 significant digits: enough to round-trip any double exactly.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// CSV precision.
inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("write failure on '" + path + "'");
}

// ---------------------------------------------------------------------------
// Circuit JSON. The writer is canonical (fixed field order, %.17g floats)
// so serialize(parse(s)) == s for files it produced; the reader accepts
// exactly the documented schema.
// ---------------------------------------------------------------------------

inline std::string circuit_to_json(const Circuit& circuit) {
  circuit.validate();
  std::string s;
  s += "{\n";
  s += "  \"version\": 1,\n";
  s += "  \"num_qubits\": " + std::to_string(circuit.num_qubits) + ",\n";
  s += "  \"num_params\": " + std::to_string(circuit.num_params) + ",\n";
  s += "  \"gates\": [";
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    const Gate& g = circuit.gates[i];
    s += i == 0 ? "\n" : ",\n";
    s += "    {\"kind\": \"";
    s += to_string(g.kind);
    s += "\", \"target\": " + std::to_string(g.target);
    if (!g.controls.empty()) {
      s += ", \"controls\": [";
      for (std::size_t c = 0; c < g.controls.size(); ++c) {
        if (c > 0) s += ", ";
        s += "{\"qubit\": " + std::to_string(g.controls[c].qubit) +
             ", \"bit\": " + std::to_string(g.controls[c].bit) + "}";
      }
      s += "]";
    }
    if (is_rotation(g.kind)) {
      if (g.has_param()) {
        s += ", \"angle\": {\"param\": " + std::to_string(g.param_slot) + "}";
      } else {
        s += ", \"angle\": {\"value\": " + fmt17(g.angle_value) + "}";
      }
    }
    s += "}";
  }
  s += circuit.gates.empty() ? "]\n" : "\n  ]\n";
  s += "}\n";
  return s;
}

inline Circuit circuit_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("circuit JSON: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != 1) {
      throw std::invalid_argument("circuit JSON: unsupported version");
    }
    Circuit c;
    c.num_qubits = j.at("num_qubits").get<int>();
    c.num_params = j.at("num_params").get<int>();
    for (const auto& jg : j.at("gates")) {
      Gate g;
      g.kind = gate_kind_from_string(jg.at("kind").get<std::string>());
      g.target = jg.at("target").get<int>();
      if (jg.contains("controls")) {
        for (const auto& jc : jg.at("controls")) {
          g.controls.push_back(Control{jc.at("qubit").get<int>(), jc.at("bit").get<int>()});
        }
      }
      if (jg.contains("angle")) {
        const auto& ja = jg.at("angle");
        if (ja.contains("param")) {
          g.param_slot = ja.at("param").get<int>();
        } else {
          g.angle_value = ja.at("value").get<double>();
        }
      } else if (is_rotation(g.kind)) {
        throw std::invalid_argument("circuit JSON: rotation gate without angle");
      }
      c.gates.push_back(std::move(g));
    }
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("circuit JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Parameter vectors.
// ---------------------------------------------------------------------------

inline std::string params_to_json(const std::vector<double>& values) {
  std::string s;
  s += "{\n";
  s += "  \"version\": 1,\n";
  s += "  \"num_params\": " + std::to_string(values.size()) + ",\n";
  s += "  \"values\": [";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) s += ", ";
    s += fmt17(values[i]);
  }
  s += "]\n}\n";
  return s;
}

inline std::vector<double> params_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("version").get<int>() != 1) {
      throw std::invalid_argument("params JSON: unsupported version");
    }
    std::vector<double> values = j.at("values").get<std::vector<double>>();
    if (values.size() != j.at("num_params").get<std::size_t>()) {
      throw std::invalid_argument("params JSON: num_params does not match values");
    }
    return values;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("params JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Run metadata + metrics, one JSON per optimization run; the report
// command aggregates these.
// ---------------------------------------------------------------------------

struct RunRecord {
  std::string family;
  int qubits = 0;
  int layers = 0;  // 0 for the adaptive families
  std::uint64_t seed = 0;
  std::string method;
  std::string mode;  // "exact" | "shots"
  std::uint64_t shots = 0;
  std::string target;
  double best_loss = 0.0;
  int evals_used = 0;
  double constraint_violation = 0.0;
  bool budget_exhausted = false;
  MetricsReport metrics;
};

inline std::string run_record_to_json(const RunRecord& r) {
  std::string s;
  s += "{\n";
  s += "  \"version\": 1,\n";
  s += "  \"run\": {\n";
  s += "    \"family\": \"" + r.family + "\",\n";
  s += "    \"qubits\": " + std::to_string(r.qubits) + ",\n";
  s += "    \"layers\": " + std::to_string(r.layers) + ",\n";
  s += "    \"seed\": " + std::to_string(r.seed) + ",\n";
  s += "    \"method\": \"" + r.method + "\",\n";
  s += "    \"mode\": \"" + r.mode + "\",\n";
  s += "    \"shots\": " + std::to_string(r.shots) + ",\n";
  s += "    \"target\": \"" + r.target + "\",\n";
  s += "    \"best_loss\": " + fmt17(r.best_loss) + ",\n";
  s += "    \"evals_used\": " + std::to_string(r.evals_used) + ",\n";
  s += "    \"constraint_violation\": " + fmt17(r.constraint_violation) + ",\n";
  s += std::string("    \"budget_exhausted\": ") + (r.budget_exhausted ? "true" : "false") +
       "\n";
  s += "  },\n";
  s += "  \"metrics\": {\n";
  s += "    \"relative_entropy\": " + fmt17(r.metrics.relative_entropy) + ",\n";
  s += "    \"l2_squared\": " + fmt17(r.metrics.l2_squared) + ",\n";
  s += "    \"ks_statistic\": " + fmt17(r.metrics.ks_statistic) + ",\n";
  s += "    \"ks_p_value\": " + fmt17(r.metrics.ks_p_value) + "\n";
  s += "  }\n";
  s += "}\n";
  return s;
}

inline RunRecord run_record_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    const auto& run = j.at("run");
    const auto& m = j.at("metrics");
    RunRecord r;
    r.family = run.at("family").get<std::string>();
    r.qubits = run.at("qubits").get<int>();
    r.layers = run.at("layers").get<int>();
    r.seed = run.at("seed").get<std::uint64_t>();
    r.method = run.at("method").get<std::string>();
    r.mode = run.at("mode").get<std::string>();
    r.shots = run.at("shots").get<std::uint64_t>();
    r.target = run.at("target").get<std::string>();
    r.best_loss = run.at("best_loss").get<double>();
    r.evals_used = run.at("evals_used").get<int>();
    r.constraint_violation = run.at("constraint_violation").get<double>();
    r.budget_exhausted = run.at("budget_exhausted").get<bool>();
    r.metrics.relative_entropy = m.at("relative_entropy").get<double>();
    r.metrics.l2_squared = m.at("l2_squared").get<double>();
    r.metrics.ks_statistic = m.at("ks_statistic").get<double>();
    r.metrics.ks_p_value = m.at("ks_p_value").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("metrics JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV emitters. Column layouts are fixed; floats at 12 significant digits.
// ---------------------------------------------------------------------------

inline std::string trace_to_csv(const std::vector<double>& trace) {
  std::string s = "eval,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    s += std::to_string(i) + "," + fmt12(trace[i]) + "\n";
  }
  return s;
}

inline std::string distribution_table_to_csv(const DiscreteDistribution& desired,
                                             const DiscreteDistribution& generated) {
  if (desired.size() != generated.size()) {
    throw std::invalid_argument("distribution table: length mismatch");
  }
  std::string s = "bin_index,x_midpoint,p_des,p_gen\n";
  for (std::size_t i = 0; i < desired.size(); ++i) {
    s += std::to_string(i) + "," + fmt12(desired.grid.midpoint(i)) + "," +
         fmt12(desired.probs[i]) + "," + fmt12(generated.probs[i]) + "\n";
  }
  return s;
}

inline std::string target_to_csv(const DiscreteDistribution& d) {
  std::string s = "bin_index,x_midpoint,p\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    s += std::to_string(i) + "," + fmt12(d.grid.midpoint(i)) + "," + fmt12(d.probs[i]) + "\n";
  }
  return s;
}

inline std::string bitstring_of(std::size_t index, int num_qubits) {
  std::string s(static_cast<std::size_t>(num_qubits), '0');
  for (int q = 0; q < num_qubits; ++q) {
    if (index & (std::size_t{1} << q)) s[static_cast<std::size_t>(num_qubits - 1 - q)] = '1';
  }
  return s;
}

inline std::string counts_to_csv(const std::vector<std::uint64_t>& counts, int num_qubits) {
  std::string s = "state,count\n";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    s += bitstring_of(i, num_qubits) + "," + std::to_string(counts[i]) + "\n";
  }
  return s;
}

/// Loads a custom target from CSV: either a single probability column of
/// length 2^n, or two columns x,density on a uniform ascending grid (the
/// domain is inferred from the spacing).
inline TargetSpec custom_target_from_csv(const std::string& text, double lo, double hi) {
  std::vector<double> xs, values;
  std::istringstream in(text);
  std::string line;
  bool two_columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // Tolerate a header row.
    if (line.find_first_not_of("0123456789+-.eE, \t\r") != std::string::npos) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(row, cell, ',')) {
      if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
      cells.push_back(std::stod(cell));
    }
    if (cells.empty()) continue;
    if (cells.size() == 1) {
      values.push_back(cells[0]);
    } else if (cells.size() == 2) {
      two_columns = true;
      xs.push_back(cells[0]);
      values.push_back(cells[1]);
    } else {
      throw std::invalid_argument("custom target CSV: expected 1 or 2 columns");
    }
  }
  if (values.empty() || !is_power_of_two(values.size())) {
    throw std::invalid_argument("custom target CSV: need 2^n rows, got " +
                                std::to_string(values.size()));
  }
  if (two_columns) {
    if (xs.size() != values.size()) {
      throw std::invalid_argument("custom target CSV: mixed 1- and 2-column rows");
    }
    const double w = xs.size() > 1 ? xs[1] - xs[0] : 1.0;
    if (!(w > 0.0)) throw std::invalid_argument("custom target CSV: x must be ascending");
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (std::abs((xs[i] - xs[i - 1]) - w) > 1e-6 * std::max(1.0, std::abs(w))) {
        throw std::invalid_argument("custom target CSV: x grid must be uniform");
      }
    }
    lo = xs.front() - 0.5 * w;
    hi = xs.back() + 0.5 * w;
  }
  return TargetSpec::custom_points(std::move(values), lo, hi);
}

// ---------------------------------------------------------------------------
// OpenQASM 2.0 exporter. Control-on-0 wires become X sandwiches and
// controlled rotations are lowered to {ry, cx}, so everything maps onto
// qelib1 primitives.
// ---------------------------------------------------------------------------

inline std::string circuit_to_qasm(const Circuit& circuit,
                                   std::span<const double> params = {}) {
  const Circuit lowered = lower_to_basic_gates(circuit, params);
  std::string s;
  s += "OPENQASM 2.0;\n";
  s += "include \"qelib1.inc\";\n";
  s += "qreg q[" + std::to_string(lowered.num_qubits) + "];\n";
  s += "creg c[" + std::to_string(lowered.num_qubits) + "];\n";
  for (const Gate& g : lowered.gates) {
    switch (g.kind) {
      case GateKind::RY:
        s += "ry(" + fmt17(g.angle_value) + ") q[" + std::to_string(g.target) + "];\n";
        break;
      case GateKind::X:
        s += "x q[" + std::to_string(g.target) + "];\n";
        break;
      case GateKind::CNOT:
        s += "cx q[" + std::to_string(g.controls[0].qubit) + "],q[" +
             std::to_string(g.target) + "];\n";
        break;
      case GateKind::CZ:
        s += "cz q[" + std::to_string(g.controls[0].qubit) + "],q[" +
             std::to_string(g.target) + "];\n";
        break;
      default:
        throw std::invalid_argument("qasm export: unexpected lowered gate");
    }
  }
  s += "measure q -> c;\n";
  return s;
}

}  // namespace qdist
