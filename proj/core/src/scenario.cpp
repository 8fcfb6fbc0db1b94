#include "finsler/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "finsler/grid.hpp"
#include "finsler/textio.hpp"

namespace finsler {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void bad_field(const std::string& section, const std::string& key,
                            const std::string& why) {
  fail(Error::Kind::Config,
       "config [" + section + "] " + key + ": " + why);
}

double to_double(const std::string& section, const std::string& key,
                 const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (...) {
    bad_field(section, key, "expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& section, const std::string& key,
                 const std::string& v) {
  try {
    size_t pos = 0;
    long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (...) {
    bad_field(section, key, "expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& section, const std::string& key,
             const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_field(section, key, "expected true/false, got '" + v + "'");
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line = line.substr(0, cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(Error::Kind::Config,
             "config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(Error::Kind::Config,
           "config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    std::vector<std::string> vv = tokens(val);

    auto want = [&](size_t want_n) {
      if (vv.size() != want_n)
        bad_field(section, key,
                  "expected " + std::to_string(want_n) + " value(s)");
    };

    if (section == "scenario" && key == "name") {
      want(1);
      cfg.name = vv[0];
    } else if (section == "grid" && key == "resolution") {
      want(2);
      cfg.resolution = {static_cast<int>(to_int(section, key, vv[0])),
                        static_cast<int>(to_int(section, key, vv[1]))};
    } else if (section == "grid" && key == "period") {
      want(2);
      cfg.period = {to_double(section, key, vv[0]),
                    to_double(section, key, vv[1])};
    } else if (section == "metric" && key == "kind") {
      want(1);
      cfg.metric_kind = vv[0];
    } else if (section == "metric" && key == "conformal_amp") {
      want(1);
      cfg.metric_params.conformal_amp = to_double(section, key, vv[0]);
    } else if (section == "metric" && key == "conformal_amp2") {
      want(1);
      cfg.metric_params.conformal_amp2 = to_double(section, key, vv[0]);
    } else if (section == "metric" && key == "conformal_drift") {
      want(1);
      cfg.metric_params.conformal_drift = to_double(section, key, vv[0]);
    } else if (section == "metric" && key == "randers_b") {
      want(2);
      cfg.metric_params.randers_b = {to_double(section, key, vv[0]),
                                     to_double(section, key, vv[1])};
    } else if (section == "metric" && key == "randers_b_amp") {
      want(2);
      cfg.metric_params.randers_b_amp = {to_double(section, key, vv[0]),
                                         to_double(section, key, vv[1])};
    } else if (section == "metric" && key == "shrink_rate") {
      want(1);
      cfg.metric_params.shrink_rate = to_double(section, key, vv[0]);
    } else if (section == "metric" && key == "smoothness") {
      want(1);
      cfg.metric_params.smoothness =
          static_cast<int>(to_int(section, key, vv[0]));
    } else if (section == "metric" && key == "time_window") {
      want(1);
      cfg.time_window = to_double(section, key, vv[0]);
    } else if (section == "measure" && key == "phi") {
      want(1);
      cfg.phi_kind = vv[0];
    } else if (section == "measure" && key == "phi_amplitude") {
      want(1);
      cfg.phi_amplitude = to_double(section, key, vv[0]);
    } else if (section == "initial" && key == "u0") {
      want(1);
      cfg.u0_kind = vv[0];
    } else if (section == "initial" && key == "u0_base") {
      want(1);
      cfg.u0_base = to_double(section, key, vv[0]);
    } else if (section == "initial" && key == "u0_amp") {
      want(1);
      cfg.u0_amp = to_double(section, key, vv[0]);
    } else if (section == "initial" && key == "u0_amp2") {
      want(1);
      cfg.u0_amp2 = to_double(section, key, vv[0]);
    } else if (section == "estimate" && key == "alpha") {
      want(1);
      cfg.alpha = to_double(section, key, vv[0]);
    } else if (section == "estimate" && key == "epsilon") {
      want(1);
      cfg.epsilon = to_double(section, key, vv[0]);
    } else if (section == "estimate" && key == "N") {
      want(1);
      cfg.N = to_double(section, key, vv[0]);
    } else if (section == "estimate" && key == "check_stamps") {
      if (vv.empty()) bad_field(section, key, "expected at least one stamp");
      cfg.check_stamps.clear();
      for (const std::string& s : vv)
        cfg.check_stamps.push_back(to_double(section, key, s));
    } else if (section == "estimate" && key == "directions") {
      want(1);
      cfg.directions = static_cast<int>(to_int(section, key, vv[0]));
    } else if (section == "estimate" && key == "grid_stride") {
      want(1);
      cfg.grid_stride = static_cast<int>(to_int(section, key, vv[0]));
    } else if (section == "harnack" && key == "pairs") {
      want(1);
      cfg.harnack_pairs = static_cast<int>(to_int(section, key, vv[0]));
    } else if (section == "harnack" && key == "curve_samples") {
      want(1);
      cfg.curve_samples = static_cast<int>(to_int(section, key, vv[0]));
    } else if (section == "harnack" && key == "min_dt") {
      want(1);
      cfg.harnack_min_dt = to_double(section, key, vv[0]);
    } else if (section == "harnack" && key == "max_dt") {
      want(1);
      cfg.harnack_max_dt = to_double(section, key, vv[0]);
    } else if (section == "identities" && key == "enable") {
      cfg.identity_checks.clear();
      for (const std::string& s : vv)
        if (s != "none") cfg.identity_checks.push_back(s);
    } else if (section == "identities" && key == "probes") {
      want(1);
      cfg.probes = static_cast<int>(to_int(section, key, vv[0]));
    } else if (section == "identities" && key == "refinements") {
      want(1);
      cfg.refinements = static_cast<int>(to_int(section, key, vv[0]));
    } else if (section == "identities" && key == "t_step") {
      want(1);
      cfg.identity_t_step = to_double(section, key, vv[0]);
    } else if (section == "identities" && key == "time") {
      want(1);
      cfg.identity_time = to_double(section, key, vv[0]);
    } else if (section == "identities" && key == "evolution_time") {
      want(1);
      cfg.evolution_time = to_double(section, key, vv[0]);
    } else if (section == "output" && key == "directory") {
      want(1);
      cfg.output_directory = vv[0];
    } else if (section == "output" && key == "dump_trajectory") {
      want(1);
      cfg.dump_trajectory = to_bool(section, key, vv[0]);
    } else if (section == "run" && key == "seed") {
      want(1);
      cfg.seed = static_cast<std::uint64_t>(to_int(section, key, vv[0]));
    } else if (section == "run" && key == "threads") {
      want(1);
      cfg.threads = static_cast<int>(to_int(section, key, vv[0]));
    } else {
      bad_field(section.empty() ? "<none>" : section, key, "unknown field");
    }
  }
  validate_scenario(cfg);
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Error::Kind::Io, "cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string emit_scenario(const ScenarioConfig& cfg) {
  std::ostringstream o;
  o << "# finsler-flow scenario (periods in radians, times in flow seconds)\n";
  o << "[scenario]\n";
  o << "name = " << cfg.name << "\n\n";
  o << "[grid]\n";
  o << "resolution = " << cfg.resolution[0] << ' ' << cfg.resolution[1] << "\n";
  o << "period = " << format_double(cfg.period[0]) << ' '
    << format_double(cfg.period[1]) << "\n\n";
  o << "[metric]\n";
  o << "kind = " << cfg.metric_kind << "\n";
  o << "conformal_amp = " << format_double(cfg.metric_params.conformal_amp)
    << "\n";
  o << "conformal_amp2 = " << format_double(cfg.metric_params.conformal_amp2)
    << "\n";
  o << "conformal_drift = " << format_double(cfg.metric_params.conformal_drift)
    << "\n";
  o << "randers_b = " << format_double(cfg.metric_params.randers_b[0]) << ' '
    << format_double(cfg.metric_params.randers_b[1]) << "\n";
  o << "randers_b_amp = " << format_double(cfg.metric_params.randers_b_amp[0])
    << ' ' << format_double(cfg.metric_params.randers_b_amp[1]) << "\n";
  o << "shrink_rate = " << format_double(cfg.metric_params.shrink_rate) << "\n";
  o << "smoothness = " << cfg.metric_params.smoothness << "\n";
  o << "time_window = " << format_double(cfg.time_window) << "\n\n";
  o << "[measure]\n";
  o << "phi = " << cfg.phi_kind << "\n";
  o << "phi_amplitude = " << format_double(cfg.phi_amplitude) << "\n\n";
  o << "[initial]\n";
  o << "u0 = " << cfg.u0_kind << "\n";
  o << "u0_base = " << format_double(cfg.u0_base) << "\n";
  o << "u0_amp = " << format_double(cfg.u0_amp) << "\n";
  o << "u0_amp2 = " << format_double(cfg.u0_amp2) << "\n\n";
  o << "[estimate]\n";
  o << "alpha = " << format_double(cfg.alpha) << "\n";
  o << "epsilon = " << format_double(cfg.epsilon) << "\n";
  o << "N = " << format_double(cfg.N) << "\n";
  o << "check_stamps =";
  for (double s : cfg.check_stamps) o << ' ' << format_double(s);
  o << "\n";
  o << "directions = " << cfg.directions << "\n";
  o << "grid_stride = " << cfg.grid_stride << "\n\n";
  o << "[harnack]\n";
  o << "pairs = " << cfg.harnack_pairs << "\n";
  o << "curve_samples = " << cfg.curve_samples << "\n";
  o << "min_dt = " << format_double(cfg.harnack_min_dt) << "\n";
  o << "max_dt = " << format_double(cfg.harnack_max_dt) << "\n\n";
  o << "[identities]\n";
  o << "enable =";
  if (cfg.identity_checks.empty())
    o << " none";
  else
    for (const std::string& s : cfg.identity_checks) o << ' ' << s;
  o << "\n";
  o << "probes = " << cfg.probes << "\n";
  o << "refinements = " << cfg.refinements << "\n";
  o << "t_step = " << format_double(cfg.identity_t_step) << "\n";
  o << "time = " << format_double(cfg.identity_time) << "\n";
  o << "evolution_time = " << format_double(cfg.evolution_time) << "\n\n";
  o << "[output]\n";
  o << "directory = " << cfg.output_directory << "\n";
  o << "dump_trajectory = " << (cfg.dump_trajectory ? "true" : "false")
    << "\n\n";
  o << "[run]\n";
  o << "seed = " << cfg.seed << "\n";
  o << "threads = " << cfg.threads << "\n";
  return o.str();
}

void validate_scenario(const ScenarioConfig& cfg) {
  for (int a = 0; a < 2; ++a) {
    if (cfg.resolution[a] < 16)
      fail(Error::Kind::Config,
           "config [grid] resolution: must be >= 16 per axis");
    if (!(cfg.period[a] > 0.0))
      fail(Error::Kind::Config, "config [grid] period: must be positive");
  }
  static const std::vector<std::string> kinds{
      "euclidean", "riemannian-conformal", "randers", "shrinking-scale",
      "custom-composite"};
  if (std::find(kinds.begin(), kinds.end(), cfg.metric_kind) == kinds.end())
    fail(Error::Kind::Config,
         "config [metric] kind: unknown kind '" + cfg.metric_kind + "'");
  if (!(cfg.time_window > 0.0))
    fail(Error::Kind::Config, "config [metric] time_window: must be positive");
  if (cfg.phi_kind != "zero" && cfg.phi_kind != "cosine-x1" &&
      cfg.phi_kind != "cosine-bump")
    fail(Error::Kind::Config,
         "config [measure] phi: unknown kind '" + cfg.phi_kind + "'");
  if (cfg.u0_kind != "constant" && cfg.u0_kind != "two-plus-cos-x1" &&
      cfg.u0_kind != "trig-mix")
    fail(Error::Kind::Config,
         "config [initial] u0: unknown selector '" + cfg.u0_kind + "'");
  if (!(cfg.alpha > 1.0))
    fail(Error::Kind::Config, "config [estimate] alpha: must be > 1");
  if (!(cfg.epsilon > 0.0))
    fail(Error::Kind::Config, "config [estimate] epsilon: must be > 0");
  if (!(cfg.N > 2.0))
    fail(Error::Kind::Config, "config [estimate] N: must be > 2");
  if (cfg.check_stamps.empty())
    fail(Error::Kind::Config,
         "config [estimate] check_stamps: needs at least one stamp");
  for (size_t s = 0; s < cfg.check_stamps.size(); ++s) {
    if (!(cfg.check_stamps[s] > 0.0) ||
        cfg.check_stamps[s] > cfg.time_window + 1e-12)
      fail(Error::Kind::Config,
           "config [estimate] check_stamps: stamps must lie in (0, T]");
    if (s > 0 && cfg.check_stamps[s] <= cfg.check_stamps[s - 1])
      fail(Error::Kind::Config,
           "config [estimate] check_stamps: stamps must increase");
  }
  if (cfg.directions < 16)
    fail(Error::Kind::Config, "config [estimate] directions: must be >= 16");
  if (cfg.grid_stride < 1)
    fail(Error::Kind::Config, "config [estimate] grid_stride: must be >= 1");
  if (cfg.harnack_pairs < 1)
    fail(Error::Kind::Config, "config [harnack] pairs: must be >= 1");
  if (cfg.curve_samples < 32)
    fail(Error::Kind::Config, "config [harnack] curve_samples: must be >= 32");
  if (!(cfg.harnack_min_dt > 0.0) || !(cfg.harnack_max_dt >= cfg.harnack_min_dt))
    fail(Error::Kind::Config, "config [harnack] min_dt/max_dt: bad window");
  static const std::vector<std::string> known_checks{
      "bochner", "energy-evolution", "exchange", "defect-quadrature",
      "log-heat", "evolution", "hessian-trace"};
  for (const std::string& c : cfg.identity_checks)
    if (std::find(known_checks.begin(), known_checks.end(), c) ==
        known_checks.end())
      fail(Error::Kind::Config,
           "config [identities] enable: unknown check '" + c + "'");
  if (cfg.probes < 1)
    fail(Error::Kind::Config, "config [identities] probes: must be >= 1");
  if (cfg.refinements < 1 || cfg.refinements > 4)
    fail(Error::Kind::Config,
         "config [identities] refinements: must be in [1, 4]");
  if (!(cfg.identity_t_step > 0.0))
    fail(Error::Kind::Config, "config [identities] t_step: must be positive");
  if (!(cfg.identity_time > 0.0) || cfg.identity_time > cfg.time_window)
    fail(Error::Kind::Config,
         "config [identities] time: must lie in (0, T]");
  if (!(cfg.evolution_time > 0.0) || cfg.evolution_time > cfg.time_window)
    fail(Error::Kind::Config,
         "config [identities] evolution_time: must lie in (0, T]");
  if (cfg.threads < 1)
    fail(Error::Kind::Config, "config [run] threads: must be >= 1");

  // Metric admissibility and positive initial data.
  MetricFamily m = cfg.build_metric();
  (void)m;
  ScalarField u0 = cfg.build_initial_data();
  for (double v : u0.values)
    if (!(v > 0.0))
      fail(Error::Kind::Config,
           "config [initial]: u0 must be positive on the grid");
}

MetricFamily ScenarioConfig::build_metric() const {
  MetricKind kind;
  if (metric_kind == "euclidean") kind = MetricKind::Euclidean;
  else if (metric_kind == "riemannian-conformal")
    kind = MetricKind::RiemannianConformal;
  else if (metric_kind == "randers") kind = MetricKind::Randers;
  else if (metric_kind == "shrinking-scale") kind = MetricKind::ShrinkingScale;
  else kind = MetricKind::CustomComposite;
  return MetricFamily(kind, metric_params);
}

MeasureSpec ScenarioConfig::build_measure() const {
  if (phi_kind == "zero") return MeasureSpec();
  if (phi_kind == "cosine-x1")
    return MeasureSpec(MeasureSpec::Kind::CosineX1, phi_amplitude);
  return MeasureSpec(MeasureSpec::Kind::CosineBump, phi_amplitude);
}

GridSpec ScenarioConfig::build_grid_spec() const {
  return build_grid(resolution, period);
}

ScalarField ScenarioConfig::build_initial_data() const {
  GridSpec g = build_grid_spec();
  if (u0_kind == "constant")
    return sample(g, 0.0, [&](Vec2) { return u0_base; });
  if (u0_kind == "two-plus-cos-x1")
    return sample(g, 0.0,
                  [&](Vec2 x) { return u0_base + u0_amp * std::cos(x[0]); });
  return sample(g, 0.0, [&](Vec2 x) {
    return u0_base + u0_amp * std::cos(x[0]) + u0_amp2 * std::sin(x[1]);
  });
}

EstimateConfig ScenarioConfig::estimate_config() const {
  EstimateConfig e;
  e.alpha = alpha;
  e.epsilon = epsilon;
  e.N = N;
  return e;
}

bool ScenarioConfig::identity_enabled(const std::string& tag) const {
  return std::find(identity_checks.begin(), identity_checks.end(), tag) !=
         identity_checks.end();
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return emit_scenario(a) == emit_scenario(b);
}

namespace {

const char* kFlatStatic = R"(# bundled scenario
[scenario]
name = flat-static
[grid]
resolution = 64 64
[metric]
kind = euclidean
time_window = 0.5
[measure]
phi = zero
[initial]
u0 = two-plus-cos-x1
[estimate]
alpha = 2.0
epsilon = 0.05
N = 4.0
check_stamps = 0.05 0.1 0.2 0.35 0.5
[identities]
enable = bochner energy-evolution exchange defect-quadrature log-heat evolution hessian-trace
[output]
directory = out/flat-static
)";

const char* kRandersStatic = R"(# bundled scenario
[scenario]
name = randers-static
[grid]
resolution = 64 64
[metric]
kind = randers
randers_b = 0.0 0.0
randers_b_amp = 0.2 0.0
time_window = 0.5
[measure]
phi = zero
[initial]
u0 = trig-mix
[estimate]
alpha = 2.0
epsilon = 0.05
N = 4.0
check_stamps = 0.05 0.1 0.2 0.35 0.5
[identities]
enable = bochner energy-evolution exchange defect-quadrature log-heat evolution hessian-trace
[output]
directory = out/randers-static
)";

const char* kRandersShrink = R"(# bundled scenario
[scenario]
name = randers-shrink
[grid]
resolution = 64 64
[metric]
kind = shrinking-scale
randers_b = 0.2 0.0
shrink_rate = 0.1
time_window = 0.5
[measure]
phi = zero
[initial]
u0 = trig-mix
[estimate]
alpha = 2.0
epsilon = 0.05
N = 4.0
check_stamps = 0.05 0.1 0.2 0.35 0.5
[identities]
enable = bochner energy-evolution exchange defect-quadrature log-heat evolution hessian-trace
[output]
directory = out/randers-shrink
)";

const char* kConformalStatic = R"(# bundled scenario
[scenario]
name = conformal-static
[grid]
resolution = 64 64
[metric]
kind = riemannian-conformal
conformal_amp = 0.1
time_window = 0.5
[measure]
phi = cosine-bump
phi_amplitude = 0.05
[initial]
u0 = trig-mix
[estimate]
alpha = 2.0
epsilon = 0.05
N = 4.0
check_stamps = 0.05 0.1 0.2 0.35 0.5
[identities]
enable = bochner energy-evolution exchange defect-quadrature log-heat evolution hessian-trace
[output]
directory = out/conformal-static
)";

}  // namespace

std::vector<std::string> preset_names() {
  return {"flat-static", "randers-static", "randers-shrink",
          "conformal-static"};
}

std::string preset_text(const std::string& name) {
  if (name == "flat-static") return kFlatStatic;
  if (name == "randers-static") return kRandersStatic;
  if (name == "randers-shrink") return kRandersShrink;
  if (name == "conformal-static") return kConformalStatic;
  fail(Error::Kind::Config, "unknown preset '" + name + "'");
}

ScenarioConfig resolve_scenario(const std::string& name_or_path) {
  for (const std::string& p : preset_names())
    if (p == name_or_path) return parse_scenario(preset_text(p));
  return load_scenario_file(name_or_path);
}

}  // namespace finsler
