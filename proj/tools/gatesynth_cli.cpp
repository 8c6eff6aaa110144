// gatesynth: gate synthesis from polynomial and piecewise-constant controls.
//
//   gatesynth synth          --system ibmq3 --horizon 0.5 --control-dim 3 --order 3
//   gatesynth synth-pw       --control-dim 3 --order 4
//   gatesynth bench-fidelity --trials 50 --seed 1 --out fid.csv
//   gatesynth bench-timing   --qubits 6 --format json
//   gatesynth target-gen     --trials 5
//
// Exit status: 0 success, 2 configuration error, 3 a trial failed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gatesynth/errors.hpp"
#include "gatesynth/numerics.hpp"
#include "gatesynth/objective.hpp"
#include "gatesynth/workbench.hpp"

using namespace gatesynth;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTrialFailed = 3;

struct Options {
  BenchConfig bench;
  std::string control = "poly";
  std::string format = "csv";
  std::string out;
  std::string problem;
  std::vector<double> x_star;
  int min_qubits = 2;
  bool trials_set = false;
  bool order_set = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--system", o.bench.system, "Hamiltonian family")
      ->check(CLI::IsMember({"ibmq3", "ising"}))
      ->capture_default_str();
  sub->add_option("--qubits", o.bench.qubits, "Ising chain length")->capture_default_str();
  sub->add_option("--coupling", o.bench.coupling, "Ising coupling J")->capture_default_str();
  sub->add_option("--horizon", o.bench.horizon, "gate time T")->capture_default_str();
  sub->add_option("--control-dim", o.bench.controls, "control parameters m")->capture_default_str();
  sub->add_option("--order", o.bench.order, "Magnus order / BCH grade")
      ->each([&o](const std::string&) { o.order_set = true; });
  sub->add_option("--trials", o.bench.trials, "number of trials")
      ->each([&o](const std::string&) { o.trials_set = true; });
  sub->add_option("--seed", o.bench.seed, "base seed")->capture_default_str();
  sub->add_option("--relax-order", o.bench.relax_order, "relaxation order (0: minimal)")->capture_default_str();
  sub->add_option("--ball", o.bench.ball, "search radius (0: sqrt(m)*1.05)")->capture_default_str();
  sub->add_option("--threads", o.bench.threads, "worker threads (0: all cores)")->capture_default_str();
  sub->add_option("--out", o.out, "output path (default stdout)");
  sub->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ConfigError("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void print_summary(const FidelityReport& r) {
  const auto& s = r.summary;
  std::fprintf(stderr, "trials %d  failed %d\n", s.trials, s.failed);
  std::fprintf(stderr, "infid_prop  q1 %.3e  median %.3e  q3 %.3e  p90 %.3e\n", s.infid_prop.q1,
               s.infid_prop.median, s.infid_prop.q3, s.infid_prop.p90);
  std::fprintf(stderr, "infid_gen   q1 %.3e  median %.3e  q3 %.3e  p90 %.3e\n", s.infid_gen.q1,
               s.infid_gen.median, s.infid_gen.q3, s.infid_gen.p90);
}

void write_report(Options& o, const FidelityReport& report) {
  Output out(o.out);
  if (o.format == "json") {
    write_fidelity_json(out.stream(), report);
  } else {
    write_fidelity_csv(out.stream(), report);
  }
}

int cmd_synth(Options& o, bool piecewise) {
  o.bench.piecewise = piecewise;
  if (!o.order_set) o.bench.order = piecewise ? 4 : 3;
  std::optional<ProblemSpec> spec;
  if (!o.problem.empty()) {
    spec = load_problem_file(o.problem);
    if (spec->is_piecewise() != piecewise) {
      throw ConfigError(std::string("problem file declares ") + (spec->is_piecewise() ? "piecewise" : "poly") +
                        " controls; use " + (spec->is_piecewise() ? "synth-pw" : "synth"));
    }
    o.bench.system = "file:" + o.problem;
    o.bench.controls = spec->control_count();
    o.bench.horizon = spec->horizon();
  } else {
    o.bench.validate();
    spec = make_spec(o.bench);
  }
  o.bench.trials = 1;

  Target target;
  if (!o.x_star.empty()) {
    if (static_cast<int>(o.x_star.size()) != spec->control_count()) {
      throw ConfigError("--x-star needs " + std::to_string(spec->control_count()) + " values");
    }
    target.x = o.x_star;
    target.unitary = propagate_reference(*spec, target.x).unitary;
    target.log = principal_log(target.unitary);
  } else {
    target = gen_target(*spec, o.bench.seed, 0);
  }

  FidelityReport report;
  report.config = o.bench;
  TrialRecord rec;
  try {
    rec = synthesize(*spec, o.bench.order, target, make_minimize_config(o.bench));
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.message = e.what();
    rec.x_star = target.x;
    rec.infid_gen = rec.infid_prop = 1.0;
  }
  rec.seed = o.bench.seed;
  report.records.push_back(rec);
  report.summary.trials = 1;
  report.summary.failed = rec.ok() ? 0 : 1;
  if (rec.ok()) {
    report.summary.infid_prop = quantiles({rec.infid_prop});
    report.summary.infid_gen = quantiles({rec.infid_gen});
  } else {
    std::fprintf(stderr, "trial failed: %s\n", rec.message.c_str());
  }
  write_report(o, report);
  return rec.ok() ? 0 : kExitTrialFailed;
}

int cmd_bench_fidelity(Options& o) {
  if (o.control != "poly" && o.control != "piecewise") throw ConfigError("--control must be poly or piecewise");
  o.bench.piecewise = o.control == "piecewise";
  if (!o.order_set) o.bench.order = o.bench.piecewise ? 4 : 3;
  if (!o.trials_set) o.bench.trials = o.bench.piecewise ? 20 : 50;
  const FidelityReport report = run_fidelity_bench(o.bench);
  write_report(o, report);
  print_summary(report);
  return report.any_failed() ? kExitTrialFailed : 0;
}

int cmd_bench_timing(Options& o) {
  if (!o.order_set) o.bench.order = 3;
  o.bench.system = "ising";
  const TimingReport report = run_timing_bench(o.bench, o.min_qubits, o.bench.qubits);
  Output out(o.out);
  if (o.format == "json") {
    write_timing_json(out.stream(), report);
  } else {
    write_timing_csv(out.stream(), report);
  }
  for (const auto& s : report.stats) {
    std::fprintf(stderr, "N=%d  build %.3f +- %.3f ms  solve %.3f +- %.3f ms\n", s.qubits, s.build_mean,
                 s.build_std, s.solve_mean, s.solve_std);
  }
  return 0;
}

nlohmann::json matrix_json(const CMatrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_target_gen(Options& o) {
  o.bench.piecewise = o.control == "piecewise";
  if (!o.trials_set) o.bench.trials = 1;
  o.bench.validate();
  const ProblemSpec spec = make_spec(o.bench);
  Output out(o.out);
  auto& os = out.stream();
  auto docs = nlohmann::json::array();
  if (o.format == "csv") {
    os << "trial,seed,rejections,action";
    for (int k = 0; k < o.bench.controls; ++k) os << ",x_star_" << k;
    os << "\n";
  }
  for (int t = 0; t < o.bench.trials; ++t) {
    const Target tg = gen_target(spec, o.bench.seed, static_cast<std::uint64_t>(t));
    const double action = action_integral(spec, tg.x);
    if (o.format == "csv") {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", action);
      os << t << ',' << o.bench.seed << ',' << tg.rejections << ',' << buf;
      for (double v : tg.x) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << ',' << buf;
      }
      os << "\n";
    } else {
      docs.push_back({{"trial", t},
                      {"seed", o.bench.seed},
                      {"rejections", tg.rejections},
                      {"action", action},
                      {"x_star", tg.x},
                      {"unitary", matrix_json(tg.unitary)},
                      {"log", matrix_json(tg.log)}});
    }
  }
  if (o.format == "json") os << docs.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gate synthesis workbench"};
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth", "synthesize one polynomial-control gate");
  auto* synth_pw = app.add_subcommand("synth-pw", "synthesize one piecewise-constant gate");
  auto* fid = app.add_subcommand("bench-fidelity", "planted-target recovery benchmark");
  auto* timing = app.add_subcommand("bench-timing", "Ising build/solve timing benchmark");
  auto* tgen = app.add_subcommand("target-gen", "emit deterministic planted targets");
  for (auto* sub : {synth, synth_pw, fid, timing, tgen}) add_common(sub, o);
  for (auto* sub : {synth, synth_pw}) {
    sub->add_option("--problem", o.problem, "JSON problem file");
    sub->add_option("--x-star", o.x_star, "planted control (default: random from --seed)")->delimiter(',');
  }
  for (auto* sub : {fid, tgen}) {
    sub->add_option("--control", o.control, "control model")
        ->check(CLI::IsMember({"poly", "piecewise"}))
        ->capture_default_str();
  }
  timing->add_option("--min-qubits", o.min_qubits, "smallest chain (--qubits is the largest)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, false);
    if (synth_pw->parsed()) return cmd_synth(o, true);
    if (fid->parsed()) return cmd_bench_fidelity(o);
    if (timing->parsed()) return cmd_bench_timing(o);
    return cmd_target_gen(o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitTrialFailed;
  }
}
