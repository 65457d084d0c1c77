#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "qdist/ansatz.hpp"
#include "qdist/optimizer.hpp"
#include "qdist/serialization.hpp"
#include "qdist/targets.hpp"

namespace qdist::cli {

// Exit codes: 0 success, 2 invalid arguments, 3 infeasible constraints,
// 4 I/O failure. Every error path prints one line "error E<code>: ...".

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("QDIST_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("QDIST_SEED must be an unsigned integer");
    }
  }
  return 0;
}

namespace detail {

struct FamilyOptions {
  std::string family = "symmetric";
  int qubits = 0;
  int layers = 1;
  std::string entanglement = "linear";
  std::string skew = "positive";
  std::string pivot = "auto";
  int fine_branch = 0;

  void add_flags(CLI::App* cmd, bool family_required = true) {
    auto* f = cmd->add_option("--family", family,
                              "symmetric|asymmetric|strong-skew|rycz|grover-rudolph");
    if (family_required) f->required();
    cmd->add_option("--qubits", qubits, "number of qubits")->required();
    cmd->add_option("--layers", layers, "entangling layers (rycz)");
    cmd->add_option("--entanglement", entanglement, "linear|circular (rycz)");
    cmd->add_option("--skew", skew, "positive|negative (asymmetric families)");
    cmd->add_option("--pivot", pivot, "strong-skew CNOT control qubit, or 'auto'");
    cmd->add_option("--fine-branch", fine_branch,
                    "second-MSB control bit of the fine-tune block (0 or 1)");
  }

  Skew skew_value() const {
    if (skew == "positive") return Skew::Positive;
    if (skew == "negative") return Skew::Negative;
    throw std::invalid_argument("--skew must be positive or negative");
  }

  Entanglement entanglement_value() const {
    if (entanglement == "linear") return Entanglement::Linear;
    if (entanglement == "circular") return Entanglement::Circular;
    throw std::invalid_argument("--entanglement must be linear or circular");
  }

  /// Builds the spec; the strong-skew pivot may need the target, so it is
  /// resolved by the caller when set to "auto".
  AnsatzSpec to_spec(std::optional<int> resolved_pivot = std::nullopt) const {
    AnsatzSpec spec;
    spec.family = ansatz_family_from_string(family);
    spec.num_qubits = qubits;
    spec.layers = layers;
    spec.entanglement = entanglement_value();
    spec.skew = skew_value();
    spec.fine_branch = fine_branch;
    if (spec.family == AnsatzFamily::AdaptiveStrongSkew) {
      if (resolved_pivot) {
        spec.pivot = *resolved_pivot;
      } else if (pivot == "auto") {
        throw std::invalid_argument("--pivot auto needs a target distribution");
      } else {
        spec.pivot = std::stoi(pivot);
      }
    }
    return spec;
  }

  bool pivot_is_auto() const { return pivot == "auto"; }
};

struct TargetOptions {
  std::string target = "gaussian";
  std::string domain;
  double coef = 0.1;
  int dof = 4;
  std::string custom_csv;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--target", target, "gaussian|lognormal|chisquare|custom");
    cmd->add_option("--domain", domain, "x range as lo,hi");
    cmd->add_option("--coef", coef, "exponent coefficient a/b for gaussian/lognormal");
    cmd->add_option("--dof", dof, "chi-square degrees of freedom");
    cmd->add_option("--custom", custom_csv, "CSV file for a custom target");
  }

  std::pair<double, double> parse_domain(double def_lo, double def_hi) const {
    if (domain.empty()) return {def_lo, def_hi};
    const auto comma = domain.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("--domain expects lo,hi");
    }
    try {
      return {std::stod(domain.substr(0, comma)), std::stod(domain.substr(comma + 1))};
    } catch (const std::exception&) {
      throw std::invalid_argument("--domain expects numeric lo,hi");
    }
  }

  DiscreteDistribution resolve(int qubits) const {
    const TargetFamily fam = target_family_from_string(target);
    switch (fam) {
      case TargetFamily::Gaussian: {
        auto [lo, hi] = parse_domain(-10.0, 10.0);
        return discretize(TargetSpec::gaussian(coef, lo, hi, qubits));
      }
      case TargetFamily::LogNormal: {
        auto [lo, hi] = parse_domain(0.0, 3.0);
        return discretize(TargetSpec::lognormal(coef, lo, hi, qubits));
      }
      case TargetFamily::ChiSquare: {
        auto [lo, hi] = parse_domain(0.0, 20.0);
        return discretize(TargetSpec::chi_square(dof, lo, hi, qubits));
      }
      case TargetFamily::Custom: {
        if (custom_csv.empty()) {
          throw std::invalid_argument("--target custom needs --custom FILE");
        }
        auto [lo, hi] = parse_domain(0.0, 1.0);
        TargetSpec spec = custom_target_from_csv(read_file(custom_csv), lo, hi);
        if (spec.num_qubits != qubits) {
          throw std::invalid_argument("custom target has " +
                                      std::to_string(spec.num_qubits) + " qubits, expected " +
                                      std::to_string(qubits));
        }
        return discretize(spec);
      }
    }
    throw std::invalid_argument("unknown target family");
  }

  std::string label() const {
    if (target == "gaussian" || target == "lognormal") {
      return target + "(" + fmt12(coef) + ")";
    }
    if (target == "chisquare") return target + "(k=" + std::to_string(dof) + ")";
    return target;
  }
};

struct OptimizeOptions {
  std::string method = "cobyla";
  std::string mode = "exact";
  std::uint64_t shots = 10000;
  std::uint64_t seed = 0;
  int restarts = 5;
  int max_evals = 2000;
  bool compare = false;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--method", method, "cobyla|nelder-mead");
    cmd->add_option("--mode", mode, "exact|shots loss evaluation");
    cmd->add_option("--shots", shots, "shots per evaluation in shots mode");
    cmd->add_option("--seed", seed, "RNG seed (default: QDIST_SEED or 0)");
    cmd->add_option("--restarts", restarts, "optimizer restarts");
    cmd->add_option("--max-evals", max_evals, "evaluation budget per restart");
    cmd->add_flag("--compare", compare, "also run the rycz baseline at layers 1-3");
  }

  OptimizerConfig to_config() const {
    OptimizerConfig cfg;
    cfg.method = optimizer_method_from_string(method);
    if (mode == "exact") {
      cfg.mode = EvalMode::ExactProbs;
    } else if (mode == "shots") {
      cfg.mode = EvalMode::Shots;
    } else {
      throw std::invalid_argument("--mode must be exact or shots");
    }
    cfg.shots = shots;
    cfg.seed = seed;
    cfg.restarts = restarts;
    cfg.max_evals = max_evals;
    return cfg;
  }
};

inline void print_census(std::ostream& os, const GateCensus& census) {
  os << "census:";
  for (const auto& [kind, count] : census.counts) {
    os << " " << to_string(kind) << "=" << count;
  }
  os << " params=" << census.num_params << "\n";
}

/// One optimization run written to its own directory: circuit.json,
/// params.json, trace.csv, distribution.csv, metrics.json.
inline RunRecord run_and_write(const Ansatz& ansatz, const AnsatzSpec& spec,
                               const DiscreteDistribution& target,
                               const OptimizerConfig& cfg, const std::string& target_label,
                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const OptimizationResult result = minimize(ansatz.circuit, ansatz.constraints, target, cfg);

  DiscreteDistribution generated = probabilities(simulate(ansatz.circuit, result.best_params));
  generated.grid = target.grid;

  RunRecord record;
  record.family = to_string(spec.family);
  record.qubits = spec.num_qubits;
  record.layers = spec.family == AnsatzFamily::RyCz ? spec.layers : 0;
  record.seed = cfg.seed;
  record.method = to_string(cfg.method);
  record.mode = cfg.mode == EvalMode::ExactProbs ? "exact" : "shots";
  record.shots = cfg.mode == EvalMode::Shots ? cfg.shots : 0;
  record.target = target_label;
  record.best_loss = result.best_loss;
  record.evals_used = result.evals_used;
  record.constraint_violation = result.constraint_violation;
  record.budget_exhausted = result.budget_exhausted;
  record.metrics = result.report;

  write_file((dir / "circuit.json").string(), circuit_to_json(ansatz.circuit));
  write_file((dir / "params.json").string(), params_to_json(result.best_params));
  write_file((dir / "trace.csv").string(), trace_to_csv(result.loss_trace));
  write_file((dir / "distribution.csv").string(), distribution_table_to_csv(target, generated));
  write_file((dir / "metrics.json").string(), run_record_to_json(record));
  return record;
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  CLI::App app{"parameterized quantum circuits that load probability distributions"};
  app.require_subcommand(1);

  // build ----------------------------------------------------------------
  auto* build = app.add_subcommand("build", "construct a circuit and print its gate census");
  detail::FamilyOptions build_family;
  detail::TargetOptions build_target;
  std::string build_out;
  build_family.add_flags(build);
  build_target.add_flags(build);  // used by grover-rudolph and --pivot auto
  build->add_option("--out", build_out, "circuit JSON output path")->required();

  // targets ----------------------------------------------------------------
  auto* targets_cmd = app.add_subcommand("targets", "discretize a target distribution to CSV");
  detail::TargetOptions targets_target;
  int targets_qubits = 0;
  std::string targets_out;
  targets_target.add_flags(targets_cmd);
  targets_cmd->add_option("--qubits", targets_qubits, "number of qubits")->required();
  targets_cmd->add_option("--out", targets_out, "CSV output path")->required();

  // simulate ---------------------------------------------------------------
  auto* simulate_cmd = app.add_subcommand("simulate", "exact output distribution of a circuit");
  std::string sim_circuit, sim_params, sim_out;
  simulate_cmd->add_option("--circuit", sim_circuit, "circuit JSON")->required();
  simulate_cmd->add_option("--params", sim_params, "parameter JSON (if parameterized)");
  simulate_cmd->add_option("--out", sim_out, "CSV output path")->required();

  // optimize ---------------------------------------------------------------
  auto* optimize_cmd = app.add_subcommand("optimize", "fit a circuit to a target distribution");
  detail::FamilyOptions opt_family;
  detail::TargetOptions opt_target;
  detail::OptimizeOptions opt_opts;
  std::string opt_out;
  opt_family.add_flags(optimize_cmd);
  opt_target.add_flags(optimize_cmd);
  opt_opts.add_flags(optimize_cmd);
  opt_opts.seed = default_seed();
  optimize_cmd->add_option("--out", opt_out, "output directory")->required();

  // sample -----------------------------------------------------------------
  auto* sample_cmd = app.add_subcommand("sample", "draw measurement shots from a circuit");
  std::string sam_circuit, sam_params, sam_out;
  std::uint64_t sam_shots = 10000;
  std::uint64_t sam_seed = default_seed();
  sample_cmd->add_option("--circuit", sam_circuit, "circuit JSON")->required();
  sample_cmd->add_option("--params", sam_params, "parameter JSON (if parameterized)");
  sample_cmd->add_option("--shots", sam_shots, "number of shots");
  sample_cmd->add_option("--seed", sam_seed, "RNG seed (default: QDIST_SEED or 0)");
  sample_cmd->add_option("--out", sam_out, "counts CSV output path")->required();

  // report -----------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "aggregate run metrics into a table");
  std::string rep_dir, rep_out;
  report_cmd->add_option("--dir", rep_dir, "directory to scan for metrics.json")->required();
  report_cmd->add_option("--out", rep_out, "report CSV output path")->required();

  // export-qasm ------------------------------------------------------------
  auto* qasm_cmd = app.add_subcommand("export-qasm", "emit OpenQASM 2.0 for a bound circuit");
  std::string qasm_circuit, qasm_params, qasm_out;
  qasm_cmd->add_option("--circuit", qasm_circuit, "circuit JSON")->required();
  qasm_cmd->add_option("--params", qasm_params, "parameter JSON (if parameterized)");
  qasm_cmd->add_option("--out", qasm_out, "QASM output path")->required();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      throw std::invalid_argument(e.what());
    }

    if (build->parsed()) {
      Circuit circuit;
      if (build_family.family == "grover-rudolph") {
        circuit = build_grover_rudolph(build_target.resolve(build_family.qubits));
      } else {
        std::optional<int> pivot;
        if (build_family.family == "strong-skew" && build_family.pivot_is_auto()) {
          pivot = detect_pivot(build_target.resolve(build_family.qubits));
        }
        circuit = build_ansatz(build_family.to_spec(pivot)).circuit;
      }
      write_file(build_out, circuit_to_json(circuit));
      detail::print_census(std::cout, circuit_census(circuit));
      return 0;
    }

    if (targets_cmd->parsed()) {
      write_file(targets_out, target_to_csv(targets_target.resolve(targets_qubits)));
      return 0;
    }

    if (simulate_cmd->parsed()) {
      const Circuit circuit = circuit_from_json(read_file(sim_circuit));
      std::vector<double> params;
      if (!sim_params.empty()) params = params_from_json(read_file(sim_params));
      const DiscreteDistribution d = probabilities(simulate(circuit, params));
      std::string csv = "bin_index,probability\n";
      for (std::size_t i = 0; i < d.size(); ++i) {
        csv += std::to_string(i) + "," + fmt12(d.probs[i]) + "\n";
      }
      write_file(sim_out, csv);
      return 0;
    }

    if (optimize_cmd->parsed()) {
      const DiscreteDistribution target = opt_target.resolve(opt_family.qubits);
      std::optional<int> pivot;
      if (opt_family.family == "strong-skew" && opt_family.pivot_is_auto()) {
        pivot = detect_pivot(target);
      }
      const AnsatzSpec spec = opt_family.to_spec(pivot);
      if (spec.family == AnsatzFamily::GroverRudolph) {
        throw std::invalid_argument("grover-rudolph has no parameters to optimize");
      }
      const OptimizerConfig cfg = opt_opts.to_config();
      const std::filesystem::path out_dir(opt_out);
      const RunRecord main_run = detail::run_and_write(
          build_ansatz(spec), spec, target, cfg, opt_target.label(), out_dir);
      std::cout << to_string(spec.family) << ": rel_entropy=" << fmt12(main_run.metrics.relative_entropy)
                << " l2_sq=" << fmt12(main_run.metrics.l2_squared)
                << " ks_p=" << fmt12(main_run.metrics.ks_p_value) << "\n";
      if (opt_opts.compare) {
        for (int layers = 1; layers <= 3; ++layers) {
          AnsatzSpec rycz{AnsatzFamily::RyCz, spec.num_qubits, layers};
          const RunRecord r = detail::run_and_write(
              build_ansatz(rycz), rycz, target, cfg, opt_target.label(),
              out_dir / ("rycz-l" + std::to_string(layers)));
          std::cout << "rycz l=" << layers
                    << ": rel_entropy=" << fmt12(r.metrics.relative_entropy)
                    << " l2_sq=" << fmt12(r.metrics.l2_squared)
                    << " ks_p=" << fmt12(r.metrics.ks_p_value) << "\n";
        }
      }
      return 0;
    }

    if (sample_cmd->parsed()) {
      const Circuit circuit = circuit_from_json(read_file(sam_circuit));
      std::vector<double> params;
      if (!sam_params.empty()) params = params_from_json(read_file(sam_params));
      const auto counts = sample_counts(probabilities(simulate(circuit, params)), sam_shots,
                                        sam_seed);
      write_file(sam_out, counts_to_csv(counts, circuit.num_qubits));
      return 0;
    }

    if (report_cmd->parsed()) {
      if (!std::filesystem::is_directory(rep_dir)) {
        throw IoError("'" + rep_dir + "' is not a directory");
      }
      std::vector<std::filesystem::path> files;
      for (const auto& entry : std::filesystem::recursive_directory_iterator(rep_dir)) {
        if (entry.is_regular_file() && entry.path().filename() == "metrics.json") {
          files.push_back(entry.path());
        }
      }
      if (files.empty()) throw IoError("no metrics.json found under '" + rep_dir + "'");
      std::sort(files.begin(), files.end());

      struct Bucket {
        int n_runs = 0;
        double rel = 0.0, l2 = 0.0, ksp = 0.0;
      };
      std::map<std::tuple<std::string, int, int>, Bucket> rows;
      for (const auto& f : files) {
        const RunRecord r = run_record_from_json(read_file(f.string()));
        Bucket& b = rows[{r.family, r.qubits, r.layers}];
        ++b.n_runs;
        b.rel += r.metrics.relative_entropy;
        b.l2 += r.metrics.l2_squared;
        b.ksp += r.metrics.ks_p_value;
      }
      std::string csv = "family,qubits,layers,n_runs,rel_entropy,l2_sq,ks_p\n";
      for (const auto& [key, b] : rows) {
        const auto& [family, qubits, layers] = key;
        csv += family + "," + std::to_string(qubits) + "," + std::to_string(layers) + "," +
               std::to_string(b.n_runs) + "," + fmt12(b.rel / b.n_runs) + "," +
               fmt12(b.l2 / b.n_runs) + "," + fmt12(b.ksp / b.n_runs) + "\n";
      }
      write_file(rep_out, csv);
      return 0;
    }

    if (qasm_cmd->parsed()) {
      const Circuit circuit = circuit_from_json(read_file(qasm_circuit));
      std::vector<double> params;
      if (!qasm_params.empty()) params = params_from_json(read_file(qasm_params));
      write_file(qasm_out, circuit_to_qasm(circuit, params));
      return 0;
    }

    throw std::invalid_argument("no subcommand given");
  } catch (const std::invalid_argument& e) {
    std::cerr << "error E2: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "error E3: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error E4: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error E4: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error E2: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace qdist::cli
