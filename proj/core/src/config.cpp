#include "lowrank/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

constexpr double kMHz = kTwoPi * 1e6;
constexpr double kNs = 1e-9;

// A mapping node plus its key path; rejects keys outside the allowed set.
class Block {
 public:
  Block(const YAML::Node& node, std::string path, std::set<std::string> allowed)
      : node_(node), path_(std::move(path)), present_(node_ && !node_.IsNull()) {
    if (!present_) return;
    if (!node_.IsMap()) fail(path_, "expected a mapping");
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(join(key), "unknown key");
    }
  }

  bool has(const std::string& key) const { return present_ && node_[key]; }
  YAML::Node raw(const std::string& key) const { return present_ ? node_[key] : YAML::Node(); }
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class T>
  void get(const std::string& key, T& out) const {
    if (!has(key)) return;
    try {
      out = node_[key].as<T>();
    } catch (const YAML::Exception&) {
      fail(join(key), "wrong type");
    }
  }

  void scaled(const std::string& key, double& out, double scale) const {
    if (!has(key)) return;
    double v = 0.0;
    get(key, v);
    out = v * scale;
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
  }

 private:
  YAML::Node node_;
  std::string path_;
  bool present_ = false;
};

SolverKind solver_at(const std::string& path, const std::string& name) {
  try {
    return parse_solver_kind(name);
  } catch (const Error&) {
    Block::fail(path, "unknown solver '" + name + "' (full, lra, rwa-full, rwa-lra)");
  }
}

SubsystemLayout read_layout(const Block& parent, const std::string& key, SubsystemLayout layout) {
  const Block b(parent.raw(key), parent.join(key), {"n_lower", "n_upper", "n_transmon"});
  b.get("n_lower", layout.n_lower);
  b.get("n_upper", layout.n_upper);
  b.get("n_transmon", layout.n_transmon);
  return layout;
}

std::vector<double> read_times(const Block& b, const std::string& key) {
  std::vector<double> out;
  const YAML::Node n = b.raw(key);
  try {
    if (n.IsSequence()) {
      for (const auto& x : n) out.push_back(x.as<double>() * kNs);
    } else {
      out.push_back(n.as<double>() * kNs);
    }
  } catch (const YAML::Exception&) {
    Block::fail(b.join(key), "expected a number or a list of numbers");
  }
  return out;
}

void read_device(const Block& root, RunConfig& cfg) {
  const Block b(root.raw("device"), "device",
                {"ec_mhz", "ej_mhz", "ej_over_ec", "omega_r_mhz", "omega_f_mhz", "g_mhz", "j_mhz",
                 "kappa_mhz", "gamma_mhz", "omega_d_mhz", "eta", "n_cut"});
  DeviceSpec& d = cfg.device;
  if (b.has("ej_mhz") && b.has("ej_over_ec")) {
    Block::fail("device", "give ej_mhz or ej_over_ec, not both");
  }
  double ratio = d.e_j / d.e_c;
  b.scaled("ec_mhz", d.e_c, kMHz);
  b.get("ej_over_ec", ratio);
  d.e_j = ratio * d.e_c;
  b.scaled("ej_mhz", d.e_j, kMHz);
  b.scaled("omega_r_mhz", d.omega_r, kMHz);
  b.scaled("omega_f_mhz", d.omega_f, kMHz);
  b.scaled("g_mhz", d.g, kMHz);
  b.scaled("j_mhz", d.j_coupling, kMHz);
  b.scaled("kappa_mhz", d.kappa, kMHz);
  b.scaled("gamma_mhz", d.gamma, kMHz);
  b.scaled("omega_d_mhz", d.omega_d, kMHz);
  b.get("eta", d.eta);
  b.get("n_cut", d.n_cut);
  d.layout = read_layout(root, "layout", d.layout);
}

void read_pulse(const Block& root, RunConfig& cfg) {
  const Block b(root.raw("pulse"), "pulse",
                {"shape", "amplitude_mhz", "heights_mhz", "sigma_ns", "t0_ns", "max_amplitude_mhz"});
  PulseConfig& p = cfg.pulse;
  if (b.has("shape")) {
    std::string shape;
    b.get("shape", shape);
    if (shape == "square") p.shape = PulseConfig::Shape::square;
    else if (shape == "stepwise") p.shape = PulseConfig::Shape::stepwise;
    else if (shape == "zero") p.shape = PulseConfig::Shape::zero;
    else Block::fail("pulse.shape", "expected square, stepwise or zero");
  }
  b.scaled("amplitude_mhz", p.amplitude, kMHz);
  b.scaled("max_amplitude_mhz", p.max_amplitude, kMHz);
  if (b.has("sigma_ns")) {
    double v = 0.0;
    b.get("sigma_ns", v);
    p.sigma = v * kNs;
  }
  if (b.has("t0_ns")) {
    double v = 0.0;
    b.get("t0_ns", v);
    p.t0 = v * kNs;
  }
  if (b.has("heights_mhz")) {
    p.heights.clear();
    const YAML::Node hs = b.raw("heights_mhz");
    if (!hs.IsSequence()) Block::fail("pulse.heights_mhz", "expected a list");
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const std::string path = "pulse.heights_mhz[" + std::to_string(i) + "]";
      try {
        if (hs[i].IsSequence()) {
          if (hs[i].size() != 2) Block::fail(path, "expected [re, im]");
          p.heights.emplace_back(hs[i][0].as<double>() * kMHz, hs[i][1].as<double>() * kMHz);
        } else {
          p.heights.emplace_back(hs[i].as<double>() * kMHz, 0.0);
        }
      } catch (const YAML::Exception&) {
        Block::fail(path, "expected a number or [re, im]");
      }
    }
  }
  if (p.shape == PulseConfig::Shape::stepwise && p.heights.empty()) {
    Block::fail("pulse.heights_mhz", "stepwise pulses need at least one height");
  }
}

void read_solver(const Block& root, RunConfig& cfg) {
  const Block b(root.raw("solver"), "solver",
                {"kind", "rank", "eps_init", "seed", "rtol", "atol", "max_step_ns", "save_dt_ns",
                 "diagnostic_rank"});
  RunSettings& s = cfg.solver;
  if (b.has("kind")) {
    std::string kind;
    b.get("kind", kind);
    s.solver = solver_at("solver.kind", kind);
  }
  b.get("rank", s.rank);
  b.get("eps_init", s.eps_init);
  b.get("seed", s.seed);
  b.get("rtol", s.rtol);
  b.get("atol", s.atol);
  b.scaled("max_step_ns", s.max_step, kNs);
  b.scaled("save_dt_ns", s.save_dt, kNs);
  b.get("diagnostic_rank", s.diagnostic_rank);
}

void read_spsa(const Block& parent, SpsaConfig& s) {
  const Block b(parent.raw("spsa"), parent.join("spsa"),
                {"a", "c", "A", "alpha", "gamma", "iterations", "seed", "reference_mhz",
                 "max_amplitude_mhz", "clip", "parallel_probes"});
  b.get("a", s.a);
  b.get("c", s.c);
  b.get("A", s.stability);
  b.get("alpha", s.alpha);
  b.get("gamma", s.gamma);
  b.get("iterations", s.iterations);
  b.get("seed", s.seed);
  b.scaled("reference_mhz", s.reference, kMHz);
  b.scaled("max_amplitude_mhz", s.max_amplitude, kMHz);
  b.get("clip", s.clip_amplitude);
  b.get("parallel_probes", s.parallel_probes);
}

void read_workflow(const Block& root, RunConfig& cfg) {
  const Block w(root.raw("workflow"), "workflow", {"tau_ns", "simulate", "benchmark", "optimize"});
  if (w.has("tau_ns")) cfg.taus = read_times(w, "tau_ns");

  const Block sim(w.raw("simulate"), "workflow.simulate", {"solvers"});
  if (sim.has("solvers")) {
    cfg.simulate_solvers.clear();
    std::vector<std::string> names;
    sim.get("solvers", names);
    for (const auto& n : names) cfg.simulate_solvers.push_back(solver_at("workflow.simulate.solvers", n));
  }

  const Block bench(w.raw("benchmark"), "workflow.benchmark",
                    {"cases", "tau_ns", "repeats", "warmup_ns"});
  BenchmarkConfig& bc = cfg.benchmark;
  if (bench.has("tau_ns")) {
    const auto t = read_times(bench, "tau_ns");
    if (t.size() != 1) Block::fail("workflow.benchmark.tau_ns", "expected a single value");
    bc.tau = t.front();
  }
  bench.get("repeats", bc.repeats);
  bench.scaled("warmup_ns", bc.warmup_span, kNs);
  if (bench.has("cases")) {
    const YAML::Node cases = bench.raw("cases");
    if (!cases.IsSequence()) Block::fail("workflow.benchmark.cases", "expected a list");
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const std::string path = "workflow.benchmark.cases[" + std::to_string(i) + "]";
      const Block c(cases[i], path, {"solver", "rank"});
      BenchmarkCase bcase;
      bcase.rank = cfg.solver.rank;
      std::string kind = "lra";
      c.get("solver", kind);
      bcase.solver = solver_at(path + ".solver", kind);
      c.get("rank", bcase.rank);
      bc.cases.push_back(bcase);
    }
  }

  const Block opt(w.raw("optimize"), "workflow.optimize",
                  {"tau_ns", "n_steps", "initial_amplitude_mhz", "spsa", "validation"});
  OptimizeConfig& oc = cfg.optimize;
  if (opt.has("tau_ns")) {
    const auto t = read_times(opt, "tau_ns");
    if (t.size() != 1) Block::fail("workflow.optimize.tau_ns", "expected a single value");
    oc.tau = t.front();
  }
  opt.get("n_steps", oc.n_steps);
  opt.scaled("initial_amplitude_mhz", oc.initial_amplitude, kMHz);
  oc.spsa.max_amplitude = cfg.pulse.max_amplitude;
  read_spsa(opt, oc.spsa);
  const Block val(opt.raw("validation"), "workflow.optimize.validation",
                  {"enabled", "layout", "rank"});
  val.get("enabled", oc.validation.enabled);
  val.get("rank", oc.validation.rank);
  oc.validation.layout = read_layout(val, "layout", oc.validation.layout);
}

}  // namespace

PulseEnvelope PulseConfig::build(double tau) const {
  const double s = sigma.value_or(0.5e-9);
  switch (shape) {
    case Shape::zero:
      return PulseEnvelope::zero(tau);
    case Shape::stepwise:
      return PulseEnvelope::stepwise(heights, tau, s, t0.value_or(2.5e-9), max_amplitude);
    case Shape::square:
      break;
  }
  return PulseEnvelope::square(amplitude, tau, t0.value_or(3e-9), s, max_amplitude);
}

void RunConfig::validate() const {
  try {
    device.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("device: ") + e.what());
  }
  const long n = device.layout.dim();
  const auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  check(solver.rank >= 1, "solver.rank: must be >= 1");
  check(!is_low_rank(solver.solver) || solver.rank <= n, "solver.rank: exceeds the Hilbert dimension");
  check(solver.eps_init > 0.0 && solver.eps_init * (solver.rank - 1) < 1.0,
        "solver.eps_init: need 0 < eps_init and (rank - 1) eps_init < 1");
  check(solver.rtol > 0.0 && solver.atol > 0.0, "solver: tolerances must be positive");
  check(solver.max_step >= 0.0, "solver.max_step_ns: must be >= 0");
  check(solver.save_dt > 0.0, "solver.save_dt_ns: must be positive");
  check(solver.diagnostic_rank >= 0, "solver.diagnostic_rank: must be >= 0");
  check(!taus.empty(), "workflow.tau_ns: needs at least one readout time");
  for (double t : taus) check(t > 0.0, "workflow.tau_ns: readout times must be positive");
  check(pulse.max_amplitude > 0.0, "pulse.max_amplitude_mhz: must be positive");
  check(std::abs(pulse.amplitude) <= pulse.max_amplitude, "pulse.amplitude_mhz: exceeds the bound");
  for (const auto& h : pulse.heights) {
    check(std::abs(h) <= pulse.max_amplitude * (1.0 + 1e-12), "pulse.heights_mhz: exceeds the bound");
  }
  if (pulse.sigma) check(*pulse.sigma > 0.0, "pulse.sigma_ns: must be positive");
  check(benchmark.repeats >= 1, "workflow.benchmark.repeats: must be >= 1");
  check(benchmark.tau > 0.0, "workflow.benchmark.tau_ns: must be positive");
  check(benchmark.warmup_span >= 0.0, "workflow.benchmark.warmup_ns: must be >= 0");
  for (const auto& c : benchmark.cases) {
    check(c.rank >= 1 && (!is_low_rank(c.solver) || c.rank <= n),
          "workflow.benchmark.cases: rank out of range");
  }
  check(optimize.n_steps >= 1, "workflow.optimize.n_steps: must be >= 1");
  check(optimize.tau > 0.0, "workflow.optimize.tau_ns: must be positive");
  check(optimize.validation.rank >= 1 &&
            optimize.validation.rank <= optimize.validation.layout.dim(),
        "workflow.optimize.validation.rank: out of range");
  try {
    optimize.spsa.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("workflow.optimize.spsa: ") + e.what());
  }
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML parse error: ") + e.what());
  }
  RunConfig cfg;
  if (!root || root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  const Block top(root, "", {"device", "layout", "pulse", "solver", "workflow", "output"});
  read_device(top, cfg);
  read_pulse(top, cfg);
  read_solver(top, cfg);
  read_workflow(top, cfg);
  const Block out(top.raw("output"), "output", {"dir"});
  out.get("dir", cfg.output_dir);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string resolved_config_text(const RunConfig& c) {
  YAML::Emitter y;
  y.SetDoublePrecision(17);
  const auto mhz = [](double w) { return w / kMHz; };
  const auto ns = [](double t) { return t / kNs; };
  const auto layout = [&](const SubsystemLayout& l) {
    y << YAML::BeginMap << YAML::Key << "n_lower" << YAML::Value << l.n_lower << YAML::Key
      << "n_upper" << YAML::Value << l.n_upper << YAML::Key << "n_transmon" << YAML::Value
      << l.n_transmon << YAML::EndMap;
  };

  y << YAML::BeginMap;
  const DeviceSpec& d = c.device;
  y << YAML::Key << "device" << YAML::Value << YAML::BeginMap;
  y << YAML::Key << "ec_mhz" << YAML::Value << mhz(d.e_c);
  y << YAML::Key << "ej_mhz" << YAML::Value << mhz(d.e_j);
  y << YAML::Key << "omega_r_mhz" << YAML::Value << mhz(d.omega_r);
  y << YAML::Key << "omega_f_mhz" << YAML::Value << mhz(d.omega_f);
  y << YAML::Key << "g_mhz" << YAML::Value << mhz(d.g);
  y << YAML::Key << "j_mhz" << YAML::Value << mhz(d.j_coupling);
  y << YAML::Key << "kappa_mhz" << YAML::Value << mhz(d.kappa);
  y << YAML::Key << "gamma_mhz" << YAML::Value << mhz(d.gamma);
  y << YAML::Key << "omega_d_mhz" << YAML::Value << mhz(d.omega_d);
  y << YAML::Key << "eta" << YAML::Value << d.eta;
  y << YAML::Key << "n_cut" << YAML::Value << d.n_cut;
  y << YAML::EndMap;
  y << YAML::Key << "layout" << YAML::Value;
  layout(d.layout);

  const PulseConfig& p = c.pulse;
  y << YAML::Key << "pulse" << YAML::Value << YAML::BeginMap;
  const char* shape = p.shape == PulseConfig::Shape::square     ? "square"
                      : p.shape == PulseConfig::Shape::stepwise ? "stepwise"
                                                                : "zero";
  y << YAML::Key << "shape" << YAML::Value << shape;
  y << YAML::Key << "amplitude_mhz" << YAML::Value << mhz(p.amplitude);
  if (!p.heights.empty()) {
    y << YAML::Key << "heights_mhz" << YAML::Value << YAML::BeginSeq;
    for (const auto& h : p.heights) {
      y << YAML::Flow << YAML::BeginSeq << mhz(h.real()) << mhz(h.imag()) << YAML::EndSeq;
    }
    y << YAML::EndSeq;
  }
  if (p.sigma) y << YAML::Key << "sigma_ns" << YAML::Value << ns(*p.sigma);
  if (p.t0) y << YAML::Key << "t0_ns" << YAML::Value << ns(*p.t0);
  y << YAML::Key << "max_amplitude_mhz" << YAML::Value << mhz(p.max_amplitude);
  y << YAML::EndMap;

  const RunSettings& s = c.solver;
  y << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  y << YAML::Key << "kind" << YAML::Value << to_string(s.solver);
  y << YAML::Key << "rank" << YAML::Value << s.rank;
  y << YAML::Key << "eps_init" << YAML::Value << s.eps_init;
  y << YAML::Key << "seed" << YAML::Value << s.seed;
  y << YAML::Key << "rtol" << YAML::Value << s.rtol;
  y << YAML::Key << "atol" << YAML::Value << s.atol;
  y << YAML::Key << "max_step_ns" << YAML::Value << ns(s.max_step);
  y << YAML::Key << "save_dt_ns" << YAML::Value << ns(s.save_dt);
  y << YAML::Key << "diagnostic_rank" << YAML::Value << s.diagnostic_rank;
  y << YAML::EndMap;

  y << YAML::Key << "workflow" << YAML::Value << YAML::BeginMap;
  y << YAML::Key << "tau_ns" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double t : c.taus) y << ns(t);
  y << YAML::EndSeq;
  if (!c.simulate_solvers.empty()) {
    y << YAML::Key << "simulate" << YAML::Value << YAML::BeginMap << YAML::Key << "solvers"
      << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (auto k : c.simulate_solvers) y << to_string(k);
    y << YAML::EndSeq << YAML::EndMap;
  }
  const BenchmarkConfig& b = c.benchmark;
  y << YAML::Key << "benchmark" << YAML::Value << YAML::BeginMap;
  y << YAML::Key << "tau_ns" << YAML::Value << ns(b.tau);
  y << YAML::Key << "repeats" << YAML::Value << b.repeats;
  y << YAML::Key << "warmup_ns" << YAML::Value << ns(b.warmup_span);
  if (!b.cases.empty()) {
    y << YAML::Key << "cases" << YAML::Value << YAML::BeginSeq;
    for (const auto& bc : b.cases) {
      y << YAML::Flow << YAML::BeginMap << YAML::Key << "solver" << YAML::Value
        << to_string(bc.solver) << YAML::Key << "rank" << YAML::Value << bc.rank << YAML::EndMap;
    }
    y << YAML::EndSeq;
  }
  y << YAML::EndMap;

  const OptimizeConfig& o = c.optimize;
  y << YAML::Key << "optimize" << YAML::Value << YAML::BeginMap;
  y << YAML::Key << "tau_ns" << YAML::Value << ns(o.tau);
  y << YAML::Key << "n_steps" << YAML::Value << o.n_steps;
  y << YAML::Key << "initial_amplitude_mhz" << YAML::Value << mhz(o.initial_amplitude);
  y << YAML::Key << "spsa" << YAML::Value << YAML::BeginMap;
  y << YAML::Key << "a" << YAML::Value << o.spsa.a;
  y << YAML::Key << "c" << YAML::Value << o.spsa.c;
  y << YAML::Key << "A" << YAML::Value << o.spsa.stability_constant();
  y << YAML::Key << "alpha" << YAML::Value << o.spsa.alpha;
  y << YAML::Key << "gamma" << YAML::Value << o.spsa.gamma;
  y << YAML::Key << "iterations" << YAML::Value << o.spsa.iterations;
  y << YAML::Key << "seed" << YAML::Value << o.spsa.seed;
  y << YAML::Key << "reference_mhz" << YAML::Value << mhz(o.spsa.reference);
  y << YAML::Key << "max_amplitude_mhz" << YAML::Value << mhz(o.spsa.max_amplitude);
  y << YAML::Key << "clip" << YAML::Value << o.spsa.clip_amplitude;
  y << YAML::Key << "parallel_probes" << YAML::Value << o.spsa.parallel_probes;
  y << YAML::EndMap;
  y << YAML::Key << "validation" << YAML::Value << YAML::BeginMap;
  y << YAML::Key << "enabled" << YAML::Value << o.validation.enabled;
  y << YAML::Key << "rank" << YAML::Value << o.validation.rank;
  y << YAML::Key << "layout" << YAML::Value;
  layout(o.validation.layout);
  y << YAML::EndMap;
  y << YAML::EndMap;
  y << YAML::EndMap;

  y << YAML::Key << "output" << YAML::Value << YAML::BeginMap << YAML::Key << "dir" << YAML::Value
    << c.output_dir << YAML::EndMap;
  y << YAML::EndMap;
  return std::string(y.c_str()) + "\n";
}

}  // namespace lowrank
