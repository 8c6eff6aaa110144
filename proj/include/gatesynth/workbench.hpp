#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gatesynth/hamlib.hpp"
#include "gatesynth/polymat.hpp"
#include "gatesynth/pop.hpp"
#include "gatesynth/problem.hpp"

namespace gatesynth {

/// Counter-based uniform stream keyed by (base seed, trial). Each draw is a
/// splitmix64 finalization of (key, counter), so any trial can be regenerated
/// without replaying the others.
class TrialRng {
 public:
  TrialRng(std::uint64_t base_seed, std::uint64_t trial);

  std::uint64_t key() const { return key_; }
  std::uint64_t next_bits();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

struct Target {
  std::vector<double> x;
  CMatrix unitary;
  CMatrix log;
  int rejections = 0;
};

inline constexpr int kMaxTargetRejections = 100;

/// Draw x* uniformly from [-1,1]^m, redrawing while the action integral is
/// >= pi - 1e-3; U* = propagate_reference(spec, x*), Omega = principal_log(U*).
/// Throws ConfigError after kMaxTargetRejections consecutive rejections.
Target gen_target(const ProblemSpec& spec, std::uint64_t base_seed, std::uint64_t trial);

struct BenchConfig {
  std::string system = "ibmq3";
  int qubits = 3;          ///< Ising chain length
  double coupling = 1.0;   ///< Ising J
  int controls = 3;        ///< m
  bool piecewise = false;
  int order = 3;           ///< Magnus order (poly) or BCH grade (piecewise)
  double horizon = 0.5;
  int trials = 50;
  std::uint64_t seed = 1;
  int relax_order = 0;     ///< <= 0: minimal order
  double ball = 0.0;       ///< <= 0: sqrt(m) * 1.05
  int threads = 0;         ///< <= 0: hardware concurrency

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

SystemPair make_system(const BenchConfig& cfg);
ProblemSpec make_spec(const BenchConfig& cfg);
MinimizeConfig make_minimize_config(const BenchConfig& cfg);

/// Lambda_n for polynomial controls, Sigma_n for piecewise ones.
PolyMatrix build_generator_for(const ProblemSpec& spec, int order);

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string status;  ///< rank-1, polished, failed or error
  std::string message;
  std::vector<double> x_star;
  std::vector<double> x_hat;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  double infid_gen = 0.0;
  double infid_prop = 0.0;
  int relax_order = 0;
  double build_ms = 0.0;
  double solve_ms = 0.0;
  double total_ms = 0.0;

  bool ok() const { return status == "rank-1" || status == "polished"; }
};

/// One synthesis problem end to end against a given target.
TrialRecord synthesize(const ProblemSpec& spec, int order, const Target& target, const MinimizeConfig& minimize);

struct Quantiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double p90 = 0.0;
};

/// Linear-interpolation quantiles; all zero for an empty sample.
Quantiles quantiles(std::vector<double> values);

struct FidelitySummary {
  int trials = 0;
  int failed = 0;
  Quantiles infid_prop;
  Quantiles infid_gen;
};

struct FidelityReport {
  BenchConfig config;
  std::vector<TrialRecord> records;  ///< sorted by trial index
  FidelitySummary summary;

  bool any_failed() const { return summary.failed > 0; }
};

FidelityReport run_fidelity_bench(const BenchConfig& cfg);

void write_fidelity_csv(std::ostream& os, const FidelityReport& report);
void write_fidelity_json(std::ostream& os, const FidelityReport& report);

struct TimingRow {
  int qubits = 0;
  int repetition = 0;
  double build_ms = 0.0;
  double solve_ms = 0.0;
};

struct TimingStats {
  int qubits = 0;
  double build_mean = 0.0;
  double build_std = 0.0;
  double solve_mean = 0.0;
  double solve_std = 0.0;
};

struct TimingReport {
  BenchConfig config;
  std::vector<TimingRow> rows;
  std::vector<TimingStats> stats;
};

inline constexpr int kTimingRepetitions = 5;

/// Ising chains of min_qubits..max_qubits; per N and repetition, time the
/// objective build (Lambda_n plus ||G - Omega||^2) and the global solve.
TimingReport run_timing_bench(const BenchConfig& cfg, int min_qubits, int max_qubits,
                              int repetitions = kTimingRepetitions);

void write_timing_csv(std::ostream& os, const TimingReport& report);
void write_timing_json(std::ostream& os, const TimingReport& report);

/// Problem file:
///   {"dim": d, "H0": [[[re,im],...],...], "Hc": ..., "T": 0.5,
///    "control": {"type": "poly"|"piecewise", "m": 3}}
/// Entries may also be plain real numbers. Throws ConfigError on malformed
/// input or non-Hermitian matrices.
ProblemSpec load_problem(std::istream& is);
ProblemSpec load_problem_file(const std::string& path);

}  // namespace gatesynth
