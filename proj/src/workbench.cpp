#include "gatesynth/workbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numbers>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "gatesynth/bch.hpp"
#include "gatesynth/errors.hpp"
#include "gatesynth/magnus.hpp"
#include "gatesynth/numerics.hpp"
#include "gatesynth/objective.hpp"

namespace gatesynth {

using Clock = std::chrono::steady_clock;
using json = nlohmann::json;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// %.17g round-trips doubles; used for every numeric CSV field.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string ms(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

TrialRng::TrialRng(std::uint64_t base_seed, std::uint64_t trial)
    : key_(splitmix64(splitmix64(base_seed) ^ (trial * 0xD1B54A32D192ED03ull + 1))) {}

std::uint64_t TrialRng::next_bits() { return splitmix64(key_ + 0x632BE59BD9B4E019ull * ++counter_); }

double TrialRng::uniform(double lo, double hi) {
  const double u = static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

Target gen_target(const ProblemSpec& spec, std::uint64_t base_seed, std::uint64_t trial) {
  TrialRng rng(base_seed, trial);
  const int m = spec.control_count();
  Target out;
  for (;;) {
    out.x.resize(static_cast<std::size_t>(m));
    for (double& v : out.x) v = rng.uniform(-1.0, 1.0);
    if (action_integral(spec, out.x) < std::numbers::pi - 1e-3) break;
    if (++out.rejections >= kMaxTargetRejections) {
      throw ConfigError("gen_target: " + std::to_string(kMaxTargetRejections) +
                        " consecutive draws exceed the action bound; shorten the horizon");
    }
  }
  out.unitary = propagate_reference(spec, out.x).unitary;
  out.log = principal_log(out.unitary);
  return out;
}

void BenchConfig::validate() const {
  if (system != "ibmq3" && system != "ising") throw ConfigError("unknown system '" + system + "'");
  if (system == "ising" && (qubits < 2 || qubits > 7)) throw ConfigError("--qubits must lie in [2, 7]");
  if (controls < 1 || controls > 12) throw ConfigError("--control-dim must lie in [1, 12]");
  if (piecewise ? (order < 1 || order > kMaxBchOrder) : (order < 1 || order > 3)) {
    throw ConfigError(piecewise ? "--order must lie in [1, 4] for piecewise controls"
                                : "--order must lie in [1, 3] for polynomial controls");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("--horizon must be positive");
  if (trials < 1) throw ConfigError("--trials must be >= 1");
  if (relax_order < 0) throw ConfigError("--relax-order must be >= 0");
  if (!(ball >= 0.0)) throw ConfigError("--ball must be >= 0");
}

SystemPair make_system(const BenchConfig& cfg) {
  if (cfg.system == "ibmq3") return ibmq3();
  if (cfg.system == "ising") {
    try {
      return build_ising(cfg.qubits, cfg.coupling);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unknown system '" + cfg.system + "'");
}

ProblemSpec make_spec(const BenchConfig& cfg) {
  const SystemPair sys = make_system(cfg);
  ControlModel control = cfg.piecewise ? ControlModel{PiecewiseControl{cfg.controls}}
                                       : ControlModel{PolyControl{cfg.controls}};
  return {sys.h0, sys.hc, cfg.horizon, control};
}

MinimizeConfig make_minimize_config(const BenchConfig& cfg) {
  MinimizeConfig mc;
  mc.radius = cfg.ball;
  mc.relax_order = cfg.relax_order;
  return mc;
}

PolyMatrix build_generator_for(const ProblemSpec& spec, int order) {
  return spec.is_piecewise() ? build_sigma(spec, order) : build_lambda(spec, order);
}

TrialRecord synthesize(const ProblemSpec& spec, int order, const Target& target, const MinimizeConfig& minimize) {
  TrialRecord rec;
  rec.x_star = target.x;
  const auto start = Clock::now();

  auto t0 = Clock::now();
  const PolyMatrix g = build_generator_for(spec, order);
  const Polynomial p = build_objective(g, target.log);
  rec.build_ms = ms_since(t0);

  MinimizeConfig mc = minimize;
  mc.least_squares = LeastSquaresForm{g, target.log};
  const SynthesisResult res = minimize_global(p, mc);
  rec.solve_ms = res.timings.total_ms;
  rec.status = to_string(res.status);
  rec.x_hat = res.x;
  rec.objective = res.value;
  rec.bound = res.bound;
  rec.gap = res.gap;
  rec.relax_order = res.relax_order;

  if (rec.ok()) {
    rec.infid_gen = infidelity(expm_antihermitian(evaluate(g, rec.x_hat)), target.unitary);
    rec.infid_prop = infidelity(propagate_reference(spec, rec.x_hat).unitary, target.unitary);
  } else {
    rec.message = "no minimizer candidate";
    rec.infid_gen = rec.infid_prop = 1.0;
  }
  rec.total_ms = ms_since(start);
  return rec;
}

Quantiles quantiles(std::vector<double> values) {
  Quantiles q;
  if (values.empty()) return q;
  std::sort(values.begin(), values.end());
  auto at = [&](double f) {
    const double pos = f * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  q.q1 = at(0.25);
  q.median = at(0.5);
  q.q3 = at(0.75);
  q.p90 = at(0.9);
  return q;
}

namespace {

unsigned worker_count(int requested, int jobs) {
  unsigned n = requested > 0 ? static_cast<unsigned>(requested) : std::thread::hardware_concurrency();
  return std::clamp<unsigned>(n, 1u, static_cast<unsigned>(std::max(1, jobs)));
}

TrialRecord run_trial(const ProblemSpec& spec, const BenchConfig& cfg, int trial) {
  const auto start = Clock::now();
  TrialRecord rec;
  try {
    const Target target = gen_target(spec, cfg.seed, static_cast<std::uint64_t>(trial));
    rec = synthesize(spec, cfg.order, target, make_minimize_config(cfg));
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.message = e.what();
    rec.infid_gen = rec.infid_prop = 1.0;
  }
  rec.trial = trial;
  rec.seed = cfg.seed;
  rec.total_ms = ms_since(start);
  return rec;
}

}  // namespace

FidelityReport run_fidelity_bench(const BenchConfig& cfg) {
  cfg.validate();
  const ProblemSpec spec = make_spec(cfg);
  FidelityReport report;
  report.config = cfg;

  const unsigned workers = worker_count(cfg.threads, cfg.trials);
  std::vector<std::future<std::vector<TrialRecord>>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      std::vector<TrialRecord> mine;
      for (int t = static_cast<int>(w); t < cfg.trials; t += static_cast<int>(workers)) {
        mine.push_back(run_trial(spec, cfg, t));
      }
      return mine;
    }));
  }
  for (auto& job : jobs) {
    for (auto& rec : job.get()) report.records.push_back(std::move(rec));
  }
  std::sort(report.records.begin(), report.records.end(),
            [](const TrialRecord& a, const TrialRecord& b) { return a.trial < b.trial; });

  std::vector<double> prop;
  std::vector<double> gen;
  report.summary.trials = cfg.trials;
  for (const auto& rec : report.records) {
    if (!rec.ok()) {
      ++report.summary.failed;
      continue;
    }
    prop.push_back(rec.infid_prop);
    gen.push_back(rec.infid_gen);
  }
  report.summary.infid_prop = quantiles(prop);
  report.summary.infid_gen = quantiles(gen);
  return report;
}

namespace {

json config_json(const BenchConfig& c) {
  return {{"system", c.system},
          {"qubits", c.qubits},
          {"coupling", c.coupling},
          {"control", {{"type", c.piecewise ? "piecewise" : "poly"}, {"m", c.controls}}},
          {"order", c.order},
          {"horizon", c.horizon},
          {"trials", c.trials},
          {"seed", c.seed},
          {"relax_order", c.relax_order},
          {"ball", c.ball}};
}

json quantiles_json(const Quantiles& q) {
  return {{"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"p90", q.p90}};
}

}  // namespace

void write_fidelity_csv(std::ostream& os, const FidelityReport& report) {
  const auto& c = report.config;
  os << "# system=" << c.system << " qubits=" << c.qubits << " coupling=" << num(c.coupling)
     << " control=" << (c.piecewise ? "piecewise" : "poly") << " m=" << c.controls << " order=" << c.order
     << " T=" << num(c.horizon) << " seed=" << c.seed << "\n";
  os << "trial,seed,status,objective,gap,infid_gen,infid_prop,build_ms,solve_ms,total_ms";
  for (int k = 0; k < c.controls; ++k) os << ",x_star_" << k;
  for (int k = 0; k < c.controls; ++k) os << ",x_hat_" << k;
  os << "\n";
  for (const auto& r : report.records) {
    os << r.trial << ',' << r.seed << ',' << r.status << ',' << num(r.objective) << ',' << num(r.gap) << ','
       << num(r.infid_gen) << ',' << num(r.infid_prop) << ',' << ms(r.build_ms) << ',' << ms(r.solve_ms) << ','
       << ms(r.total_ms);
    for (int k = 0; k < c.controls; ++k) {
      os << ',' << (k < static_cast<int>(r.x_star.size()) ? num(r.x_star[static_cast<std::size_t>(k)]) : "");
    }
    for (int k = 0; k < c.controls; ++k) {
      os << ',' << (k < static_cast<int>(r.x_hat.size()) ? num(r.x_hat[static_cast<std::size_t>(k)]) : "");
    }
    os << "\n";
  }
}

void write_fidelity_json(std::ostream& os, const FidelityReport& report) {
  json doc;
  doc["config"] = config_json(report.config);
  json rows = json::array();
  for (const auto& r : report.records) {
    json row = {{"trial", r.trial},         {"seed", r.seed},           {"status", r.status},
                {"objective", r.objective}, {"bound", r.bound},         {"gap", r.gap},
                {"infid_gen", r.infid_gen}, {"infid_prop", r.infid_prop}, {"relax_order", r.relax_order},
                {"build_ms", r.build_ms},   {"solve_ms", r.solve_ms},   {"total_ms", r.total_ms},
                {"x_star", r.x_star},       {"x_hat", r.x_hat}};
    if (!r.message.empty()) row["message"] = r.message;
    rows.push_back(std::move(row));
  }
  doc["trials"] = std::move(rows);
  doc["summary"] = {{"trials", report.summary.trials},
                    {"failed", report.summary.failed},
                    {"infid_prop", quantiles_json(report.summary.infid_prop)},
                    {"infid_gen", quantiles_json(report.summary.infid_gen)}};
  os << doc.dump(2) << "\n";
}

TimingReport run_timing_bench(const BenchConfig& cfg, int min_qubits, int max_qubits, int repetitions) {
  cfg.validate();
  if (min_qubits < 2 || max_qubits > 7 || min_qubits > max_qubits) {
    throw ConfigError("timing bench qubit range must lie within [2, 7]");
  }
  if (repetitions < 1) throw ConfigError("timing bench needs at least one repetition");
  if (cfg.piecewise) throw ConfigError("timing bench uses polynomial controls");

  TimingReport report;
  report.config = cfg;
  report.config.system = "ising";
  for (int n = min_qubits; n <= max_qubits; ++n) {
    BenchConfig c = report.config;
    c.qubits = n;
    const ProblemSpec spec = make_spec(c);
    std::vector<TimingRow> rows;
    for (int rep = 0; rep < repetitions; ++rep) {
      // exact-interpolation target: the oracle propagation is not part of
      // either timed phase and dominates runtime at 2^N = 64
      TrialRng rng(cfg.seed, static_cast<std::uint64_t>(rep));
      std::vector<double> x(static_cast<std::size_t>(c.controls));
      for (double& v : x) v = rng.uniform(-1.0, 1.0);
      Target target;
      target.x = x;
      target.log = evaluate(build_lambda(spec, 3), x);
      TimingRow row;
      row.qubits = n;
      row.repetition = rep;
      auto t0 = Clock::now();
      const PolyMatrix g = build_lambda(spec, cfg.order);
      const Polynomial p = build_objective(g, target.log);
      row.build_ms = ms_since(t0);
      t0 = Clock::now();
      MinimizeConfig mc = make_minimize_config(c);
      mc.max_relax_order = 0;  // one relaxation at the requested order
      (void)minimize_global(p, mc);
      row.solve_ms = ms_since(t0);
      rows.push_back(row);
    }
    TimingStats st;
    st.qubits = n;
    auto mean_std = [&](auto field, double& mean, double& sd) {
      double s = 0.0;
      for (const auto& r : rows) s += r.*field;
      mean = s / static_cast<double>(rows.size());
      double v = 0.0;
      for (const auto& r : rows) v += (r.*field - mean) * (r.*field - mean);
      sd = rows.size() > 1 ? std::sqrt(v / static_cast<double>(rows.size() - 1)) : 0.0;
    };
    mean_std(&TimingRow::build_ms, st.build_mean, st.build_std);
    mean_std(&TimingRow::solve_ms, st.solve_mean, st.solve_std);
    report.stats.push_back(st);
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  return report;
}

void write_timing_csv(std::ostream& os, const TimingReport& report) {
  os << "# system=ising coupling=" << num(report.config.coupling) << " m=" << report.config.controls
     << " order=" << report.config.order << " T=" << num(report.config.horizon) << " seed=" << report.config.seed
     << "\n";
  os << "qubits,repetition,build_ms,solve_ms\n";
  for (const auto& r : report.rows) {
    os << r.qubits << ',' << r.repetition << ',' << ms(r.build_ms) << ',' << ms(r.solve_ms) << "\n";
  }
}

void write_timing_json(std::ostream& os, const TimingReport& report) {
  json doc;
  doc["config"] = config_json(report.config);
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"qubits", r.qubits}, {"repetition", r.repetition}, {"build_ms", r.build_ms},
                    {"solve_ms", r.solve_ms}});
  }
  json stats = json::array();
  for (const auto& s : report.stats) {
    stats.push_back({{"qubits", s.qubits},
                     {"build_ms", {{"mean", s.build_mean}, {"std", s.build_std}}},
                     {"solve_ms", {{"mean", s.solve_mean}, {"std", s.solve_std}}}});
  }
  doc["rows"] = std::move(rows);
  doc["stats"] = std::move(stats);
  os << doc.dump(2) << "\n";
}

namespace {

CMatrix read_matrix(const json& j, int dim, const char* name) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw ConfigError(std::string(name) + ": expected " + std::to_string(dim) + " rows");
  }
  CMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw ConfigError(std::string(name) + ": row " + std::to_string(r) + " must have " +
                        std::to_string(dim) + " entries");
    }
    for (int c = 0; c < dim; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(r, c) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError(std::string(name) + ": entry (" + std::to_string(r) + "," + std::to_string(c) +
                          ") must be a number or [re, im]");
      }
    }
  }
  if (hermitian_defect(m) > 1e-12) throw ConfigError(std::string(name) + " is not Hermitian");
  return m;
}

}  // namespace

ProblemSpec load_problem(std::istream& is) {
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("problem file: ") + e.what());
  }
  try {
    const int dim = doc.at("dim").get<int>();
    if (dim < 1) throw ConfigError("problem file: dim must be >= 1");
    CMatrix h0 = read_matrix(doc.at("H0"), dim, "H0");
    CMatrix hc = read_matrix(doc.at("Hc"), dim, "Hc");
    const double horizon = doc.at("T").get<double>();
    const json& ctl = doc.at("control");
    const std::string type = ctl.at("type").get<std::string>();
    const int m = ctl.at("m").get<int>();
    ControlModel control;
    if (type == "poly") {
      control = PolyControl{m};
    } else if (type == "piecewise") {
      control = PiecewiseControl{m};
    } else {
      throw ConfigError("problem file: control.type must be \"poly\" or \"piecewise\"");
    }
    return {std::move(h0), std::move(hc), horizon, control};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("problem file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("problem file: ") + e.what());
  }
}

ProblemSpec load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file '" + path + "'");
  return load_problem(in);
}

}  // namespace gatesynth
