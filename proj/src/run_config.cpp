#include "lrfput/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lrfput/errors.hpp"
#include "lrfput/spectral.hpp"

namespace lrfput {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model",
       {"family", "a", "g", "alpha1", "beta1", "beta2", "cubic1", "cubic2", "alpha", "beta", "cubic",
        "gamma", "varsigma", "trunc_tol", "delta_star"}},
      {"grid", {"L", "N"}},
      {"dispersion", {"k_max", "n_samples"}},
      {"solver",
       {"eps", "eps_list", "sigma", "eps_max", "method", "tol", "max_iter", "linear_rtol", "restart",
        "linear_max_iter", "dense_fallback", "dealias", "residual_max", "agreement_max",
        "slope_rel_tol", "threads"}},
      {"simulate",
       {"J", "T", "dt", "force_range", "checkpoint_interval", "jc_fraction", "solution",
        "speed_max", "shape_max", "drift_max"}},
      {"output", {"dir", "seed"}},
  };
  return keys;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw SpecError("config: " + key + " = '" + v + "' is not a number");
  }
}

long to_long(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw SpecError("config: " + key + " must be an integer");
  return static_cast<long>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw SpecError("config: " + key + " must be a boolean");
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Families accept only the model keys they use.
const std::set<std::string>& family_keys(const std::string& family) {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"cm", {"a"}},
      {"nnn", {"g", "beta1", "beta2", "cubic1", "cubic2"}},
      {"fput", {"alpha1", "beta1", "cubic1"}},
      {"finite", {"alpha", "beta", "cubic"}},
      {"custom", {"alpha", "beta", "gamma", "varsigma"}},
  };
  const auto it = keys.find(family);
  if (it == keys.end()) {
    throw SpecError("config: unknown model family '" + family +
                    "' (expected cm, nnn, fput, finite or custom)");
  }
  return it->second;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    std::istringstream ws(item);
    std::string tok;
    while (ws >> tok) out.push_back(to_double("list", tok));
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw SpecError(std::string("config: ") + e.what());
  }

  // Canonical listing: sections and keys sorted, values trimmed.
  std::map<std::string, std::map<std::string, std::string>> kv;
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw SpecError("config: unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) {
      throw SpecError("config: top-level key '" + section + "' outside any section");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw SpecError("config: unknown key " + section + "." + key);
      kv[section][key] = value.data();
    }
  }
  std::string canon;
  for (const auto& [section, keys] : kv) {
    canon += "[" + section + "]\n";
    for (const auto& [k, v] : keys) canon += k + "=" + v + "\n";
  }

  RunConfig cfg;
  cfg.canonical = canon;
  cfg.hash = fnv1a_hex(canon);
  auto get = [&](const std::string& s, const std::string& k) -> const std::string* {
    const auto si = kv.find(s);
    if (si == kv.end()) return nullptr;
    const auto ki = si->second.find(k);
    return ki == si->second.end() ? nullptr : &ki->second;
  };
  auto num = [&](const std::string& s, const std::string& k, double dflt) {
    const std::string* v = get(s, k);
    return v ? to_double(s + "." + k, *v) : dflt;
  };
  auto integer = [&](const std::string& s, const std::string& k, long dflt) {
    const std::string* v = get(s, k);
    return v ? to_long(s + "." + k, *v) : dflt;
  };
  auto list = [&](const std::string& s, const std::string& k) {
    const std::string* v = get(s, k);
    return v ? parse_list(*v) : std::vector<double>{};
  };

  // [model]
  ModelSection& ms = cfg.model;
  if (const auto* f = get("model", "family")) ms.family = *f;
  const auto& allowed = family_keys(ms.family);
  if (kv.count("model")) {
    for (const auto& [k, v] : kv.at("model")) {
      if (k == "family" || k == "trunc_tol" || k == "delta_star") continue;
      if (!allowed.count(k)) {
        throw SpecError("config: key model." + k + " does not apply to family " + ms.family);
      }
    }
  }
  ms.trunc_tol = num("model", "trunc_tol", 1e-10);
  if (get("model", "delta_star")) ms.spec.delta_star = num("model", "delta_star", 0.0);
  if (ms.family == "cm") {
    ms.spec.payload = CalogeroMoserSpec{num("model", "a", 4.0)};
  } else if (ms.family == "nnn") {
    NnnSpec p;
    p.g = num("model", "g", p.g);
    p.beta1 = num("model", "beta1", p.beta1);
    p.beta2 = num("model", "beta2", p.beta2);
    p.cubic1 = num("model", "cubic1", p.cubic1);
    p.cubic2 = num("model", "cubic2", p.cubic2);
    ms.spec.payload = p;
  } else if (ms.family == "fput") {
    ClassicalFputSpec p;
    p.alpha1 = num("model", "alpha1", p.alpha1);
    p.beta1 = num("model", "beta1", p.beta1);
    p.cubic1 = num("model", "cubic1", p.cubic1);
    ms.spec.payload = p;
  } else if (ms.family == "finite") {
    const auto al = list("model", "alpha");
    auto be = list("model", "beta");
    auto cu = list("model", "cubic");
    if (al.empty()) throw SpecError("config: finite family needs model.alpha");
    if (be.size() > al.size() || cu.size() > al.size()) {
      throw SpecError("config: model.beta and model.cubic may not be longer than model.alpha");
    }
    be.resize(al.size(), 0.0);
    cu.resize(al.size(), 0.0);
    FiniteRangeSpec p;
    for (std::size_t i = 0; i < al.size(); ++i) p.terms.push_back({al[i], be[i], cu[i]});
    ms.spec.payload = p;
  } else {
    CustomCoefficientsSpec p;
    p.alpha = list("model", "alpha");
    p.beta = list("model", "beta");
    p.gamma = list("model", "gamma");
    p.varsigma = list("model", "varsigma");
    ms.spec.payload = p;
  }

  cfg.grid.L = num("grid", "L", cfg.grid.L);
  cfg.grid.N = static_cast<int>(integer("grid", "N", cfg.grid.N));

  cfg.dispersion.k_max = num("dispersion", "k_max", cfg.dispersion.k_max);
  cfg.dispersion.n_samples = static_cast<int>(integer("dispersion", "n_samples", cfg.dispersion.n_samples));

  SolverSection& ss = cfg.solver;
  if (get("solver", "eps")) ss.eps = num("solver", "eps", 0.0);
  ss.eps_list = list("solver", "eps_list");
  if (get("solver", "sigma")) ss.sigma_override = num("solver", "sigma", 0.0);
  ss.eps_max = num("solver", "eps_max", ss.eps_max);
  if (const auto* m = get("solver", "method")) ss.method = *m;
  ss.options.tol = num("solver", "tol", ss.options.tol);
  ss.options.max_iter = static_cast<int>(integer("solver", "max_iter", ss.options.max_iter));
  ss.options.linear_rtol = num("solver", "linear_rtol", ss.options.linear_rtol);
  ss.options.restart = static_cast<int>(integer("solver", "restart", ss.options.restart));
  ss.options.linear_max_iter =
      static_cast<int>(integer("solver", "linear_max_iter", ss.options.linear_max_iter));
  if (const auto* v = get("solver", "dense_fallback")) {
    ss.options.dense_fallback = to_bool("solver.dense_fallback", *v);
  }
  if (const auto* v = get("solver", "dealias")) ss.dealias = to_bool("solver.dealias", *v);
  ss.residual_max = num("solver", "residual_max", ss.residual_max);
  ss.agreement_max = num("solver", "agreement_max", ss.agreement_max);
  ss.slope_rel_tol = num("solver", "slope_rel_tol", ss.slope_rel_tol);
  const long threads = integer("solver", "threads", 0);
  if (threads < 0) throw SpecError("config: solver.threads must be >= 0");
  ss.threads = static_cast<unsigned>(threads);

  SimulateSection& sim = cfg.simulate;
  sim.options.J = static_cast<int>(integer("simulate", "J", sim.options.J));
  sim.options.T = num("simulate", "T", sim.options.T);
  sim.options.dt = num("simulate", "dt", sim.options.dt);
  sim.options.force_range = static_cast<int>(integer("simulate", "force_range", 0));
  sim.options.checkpoint_interval =
      num("simulate", "checkpoint_interval", sim.options.checkpoint_interval);
  sim.options.jc_fraction = num("simulate", "jc_fraction", sim.options.jc_fraction);
  if (const auto* v = get("simulate", "solution")) sim.solution = *v;
  sim.speed_max = num("simulate", "speed_max", sim.speed_max);
  sim.shape_max = num("simulate", "shape_max", sim.shape_max);
  sim.drift_max = num("simulate", "drift_max", sim.drift_max);

  if (const auto* v = get("output", "dir")) cfg.output.dir = *v;
  const long seed = integer("output", "seed", 0);
  if (seed < 0) throw SpecError("config: output.seed must be >= 0");
  cfg.output.seed = static_cast<std::uint64_t>(seed);
  return cfg;
}

void apply_overrides(RunConfig& cfg, std::optional<double> eps, std::optional<double> sigma) {
  char buf[64];
  if (eps) {
    cfg.solver.eps = *eps;
    std::snprintf(buf, sizeof buf, "override.eps=%.17g\n", *eps);
    cfg.canonical += buf;
  }
  if (sigma) {
    cfg.solver.sigma_override = *sigma;
    std::snprintf(buf, sizeof buf, "override.sigma=%.17g\n", *sigma);
    cfg.canonical += buf;
  }
  cfg.hash = fnv1a_hex(cfg.canonical);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("config: cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

void validate(const RunConfig& cfg, const std::string& command) {
  const ModelSection& ms = cfg.model;
  if (!(ms.trunc_tol > 0.0)) throw SpecError("config: model.trunc_tol must be positive");
  if (ms.spec.delta_star && !(*ms.spec.delta_star > 0.0)) {
    throw SpecError("config: model.delta_star must be positive");
  }
  if (const auto* cm = std::get_if<CalogeroMoserSpec>(&ms.spec.payload)) {
    if (!(cm->a > 3.0)) throw SpecError("config: Calogero-Moser exponent a must exceed 3");
  }
  if (!(cfg.dispersion.k_max >= 4.0 * 3.14159265358979323846) || cfg.dispersion.n_samples < 2048) {
    throw SpecError("config: dispersion needs k_max >= 4 pi and n_samples >= 2048");
  }
  if (command == "classify") return;

  (void)Grid(cfg.grid.L, cfg.grid.N);
  const SolverSection& ss = cfg.solver;
  const SolverOptions& o = ss.options;
  if (!(o.tol > 0.0) || o.max_iter < 1 || !(o.linear_rtol > 0.0) || o.restart < 1 ||
      o.linear_max_iter < 1) {
    throw SpecError("config: solver tolerances and iteration limits must be positive");
  }
  if (ss.method != "contraction" && ss.method != "petviashvili" && ss.method != "both") {
    throw SpecError("config: solver.method must be contraction, petviashvili or both");
  }
  if (ss.sigma_override && !(*ss.sigma_override > 0.0 && *ss.sigma_override <= 2.0)) {
    throw SpecError("config: solver.sigma must lie in (0, 2]");
  }
  if (!(ss.eps_max > 0.0)) throw SpecError("config: solver.eps_max must be positive");
  auto check_eps = [&](double e) {
    if (!(e > 0.0 && e <= ss.eps_max)) {
      std::ostringstream os;
      os << "config: eps = " << e << " outside (0, " << ss.eps_max << "]";
      throw SpecError(os.str());
    }
  };
  if (command == "sweep") {
    if (ss.eps_list.size() < 5) throw SpecError("config: sweep needs solver.eps_list with >= 5 values");
    for (double e : ss.eps_list) check_eps(e);
    return;
  }
  if (command == "solve" || (command == "simulate" && cfg.simulate.solution.empty())) {
    if (!ss.eps) throw SpecError("config: solver.eps is required");
    check_eps(*ss.eps);
  }
  if (command == "simulate") {
    const SimulationOptions& so = cfg.simulate.options;
    if (so.J < 16 || so.J % 2 != 0) throw SpecError("config: simulate.J must be even and >= 16");
    if (!(so.T > 0.0) || so.dt < 0.0 || !(so.checkpoint_interval > 0.0)) {
      throw SpecError("config: simulate.T and checkpoint_interval must be positive, dt >= 0");
    }
    if (!(so.jc_fraction > 0.0 && so.jc_fraction < 1.0)) {
      throw SpecError("config: simulate.jc_fraction must lie in (0, 1)");
    }
    if (so.force_range < 0 || 2 * so.force_range >= so.J) {
      throw SpecError("config: simulate.force_range must lie in [0, J/2)");
    }
    if (ss.eps && cfg.simulate.solution.empty() && *ss.eps * so.J < 4.0 * cfg.grid.L) {
      throw SpecError("config: simulate.J too small, need eps J >= 4 L");
    }
  }
}

}  // namespace lrfput
