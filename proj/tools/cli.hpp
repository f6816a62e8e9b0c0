#pragma once

// Experiment configuration, validation, dispatch and report I/O for the
// monadlab command-line tool.

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "suites.hpp"

namespace monadlab::cli {

inline constexpr const char* tool_name = "monadlab";
inline constexpr const char* tool_version = "0.1.0";
inline constexpr int exit_usage = 64;

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> cs = {"check-monad", "check-operad", "check-commutativity", "synth",
                                              "verify",      "refine",       "diagnose",            "suite"};
  return cs;
}

struct ExperimentConfig {
  std::string command;
  std::string verbal;
  std::string operad;
  std::string monad;
  std::string s;              // the outer monad of a diagnosis
  std::string target_verbal;  // verify: also compare with the law extended to this category
  std::string suite;
  std::vector<int> carrier_sizes{2};
  int bound = 3;
  std::vector<std::string> pool;  // empty: the default pool
  std::string mode = "exhaustive";
  std::size_t samples = 200;
  std::uint64_t seed = default_seed();
  bool prime = false;

  nlohmann::json to_json() const {
    nlohmann::json j = {{"command", command}, {"carrier_sizes", carrier_sizes},
                        {"bound", bound},     {"mode", mode},
                        {"samples", samples}, {"seed", seed},
                        {"prime", prime}};
    for (const auto& [k, v] : {std::pair<const char*, const std::string*>{"verbal", &verbal},
                               {"operad", &operad},
                               {"monad", &monad},
                               {"s", &s},
                               {"target_verbal", &target_verbal},
                               {"suite", &suite}})
      if (!v->empty()) j[k] = *v;
    std::vector<std::string> p = pool;
    if (p.empty())
      for (const auto& r : default_pool()) p.push_back(r.str());
    j["pool"] = p;
    return j;
  }
};

/// Parses a config object; every problem is reported, one line per field.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  std::vector<std::string> diag;
  ExperimentConfig c;
  if (!j.is_object()) throw UsageError("config: expected a JSON object");
  static const std::set<std::string> known = {"command", "verbal", "operad", "monad",   "s",    "target_verbal",
                                              "suite",   "carrier_sizes", "bound", "pool", "mode", "samples",
                                              "seed",    "prime"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) diag.push_back(k + ": unknown field");
  auto str = [&](const char* k, std::string& out) {
    if (!j.contains(k) || j[k].is_null()) return;
    if (j[k].is_string()) out = j[k].get<std::string>();
    else diag.push_back(std::string(k) + ": expected a string");
  };
  str("command", c.command);
  str("verbal", c.verbal);
  str("operad", c.operad);
  str("monad", c.monad);
  str("s", c.s);
  str("target_verbal", c.target_verbal);
  str("suite", c.suite);
  str("mode", c.mode);
  if (j.contains("carrier_sizes")) {
    const auto& v = j["carrier_sizes"];
    if (v.is_number_integer()) c.carrier_sizes = {v.get<int>()};
    else if (v.is_array() && std::all_of(v.begin(), v.end(), [](const auto& e) { return e.is_number_integer(); }))
      c.carrier_sizes = v.get<std::vector<int>>();
    else diag.push_back("carrier_sizes: expected an integer or a list of integers");
  }
  if (j.contains("bound")) {
    if (j["bound"].is_number_integer()) c.bound = j["bound"].get<int>();
    else diag.push_back("bound: expected an integer");
  }
  if (j.contains("samples")) {
    if (j["samples"].is_number_unsigned()) c.samples = j["samples"].get<std::size_t>();
    else diag.push_back("samples: expected a non-negative integer");
  }
  if (j.contains("seed")) {
    if (j["seed"].is_number_unsigned()) c.seed = j["seed"].get<std::uint64_t>();
    else diag.push_back("seed: expected a non-negative integer");
  }
  if (j.contains("prime")) {
    if (j["prime"].is_boolean()) c.prime = j["prime"].get<bool>();
    else diag.push_back("prime: expected a boolean");
  }
  if (j.contains("pool")) {
    const auto& v = j["pool"];
    if (v.is_array()) {
      for (const auto& e : v) {
        if (e.is_string()) c.pool.push_back(e.get<std::string>());
        else if (e.is_number_integer()) c.pool.push_back(std::to_string(e.get<std::int64_t>()));
        else diag.push_back("pool: entries must be strings such as \"1/2\" or integers");
      }
    } else {
      diag.push_back("pool: expected a list");
    }
  }
  if (!diag.empty()) {
    std::string m;
    for (const auto& d : diag) m += (m.empty() ? "" : "\n") + d;
    throw UsageError(m);
  }
  return c;
}

inline std::vector<Rational> parse_pool(const std::vector<std::string>& pool) {
  if (pool.empty()) return default_pool();
  std::vector<Rational> out;
  for (const auto& s : pool) out.push_back(Rational::parse(s));
  return out;
}

inline Sampling sampling(const ExperimentConfig& c) {
  Sampling s;
  s.seed = c.seed;
  s.samples = c.samples;
  s.pool = parse_pool(c.pool);
  if (c.mode == "sampled") s.explicit_cap = 0;
  return s;
}

/// The monad named by a diagnosis' s field: a monad name or "operad:<name>".
inline MonadPtr outer_monad(const std::string& s, const std::vector<Rational>& pool) {
  if (s.rfind("operad:", 0) == 0) return induced_monad(operad_by_name(s.substr(7), pool));
  return builtin_monad(s, pool);
}

/// Throws UsageError listing every invalid field.
inline void validate(const ExperimentConfig& c) {
  std::vector<std::string> diag;
  auto need = [&](const char* field, const std::string& v) {
    if (v.empty()) diag.push_back(std::string(field) + ": required by " + c.command);
  };
  auto cs = commands();
  if (std::find(cs.begin(), cs.end(), c.command) == cs.end())
    diag.push_back("command: unknown command '" + c.command + "'");
  if (c.carrier_sizes.empty()) diag.push_back("carrier_sizes: must not be empty");
  for (int k : c.carrier_sizes)
    if (k < 0 || k > 6) diag.push_back("carrier_sizes: " + std::to_string(k) + " is outside 0..6");
  if (c.bound < 1 || c.bound > 6) diag.push_back("bound: must be in 1..6");
  if (c.mode != "exhaustive" && c.mode != "sampled") diag.push_back("mode: must be exhaustive or sampled");
  if (c.samples == 0) diag.push_back("samples: must be positive");

  std::vector<Rational> pool = default_pool();
  bool pool_ok = true;
  try {
    pool = parse_pool(c.pool);
  } catch (const std::exception& e) {
    pool_ok = false;
    diag.push_back(std::string("pool: ") + e.what());
  }

  auto try_field = [&](const char* field, const std::string& v, auto&& make) {
    if (v.empty()) return;
    try {
      make(v);
    } catch (const std::exception& e) {
      diag.push_back(std::string(field) + ": " + e.what());
    }
  };
  try_field("verbal", c.verbal, [](const std::string& v) { VerbalCat::parse(v); });
  try_field("target_verbal", c.target_verbal, [](const std::string& v) { VerbalCat::parse(v); });
  try_field("operad", c.operad, [&](const std::string& v) { operad_by_name(v, pool); });
  try_field("suite", c.suite, [](const std::string& v) {
    auto ns = suites::suite_names();
    if (std::find(ns.begin(), ns.end(), v) == ns.end()) throw UsageError("unknown suite '" + v + "'");
  });
  // the name is checked against the default pool, then the pool against the name
  auto monad_field = [&](const char* field, const std::string& v, bool outer) {
    try_field(field, v, [&](const std::string& name) {
      outer ? outer_monad(name, default_pool()) : builtin_monad(name, default_pool());
      if (!pool_ok) return;
      try {
        MonadPtr t = outer ? outer_monad(name, pool) : builtin_monad(name, pool);
        Rng rng(c.seed);
        Sampling cfg;
        cfg.pool = pool;
        t->sample(Carrier::atoms(1), rng, cfg);
      } catch (const Refusal&) {
      } catch (const std::exception& e) {
        diag.push_back("pool: no entry is usable by " + name + " (" + e.what() + ")");
      }
    });
  };
  monad_field("monad", c.monad, false);
  monad_field("s", c.s, true);

  if (c.command == "check-monad" || c.command == "check-commutativity") need("monad", c.monad);
  if (c.command == "check-operad") need("operad", c.operad);
  if (c.command == "synth" || c.command == "verify") {
    need("operad", c.operad);
    need("monad", c.monad);
  }
  if (c.command == "refine") {
    need("monad", c.monad);
    need("verbal", c.verbal);
  }
  if (c.command == "diagnose") {
    need("s", c.s);
    need("monad", c.monad);
  }
  if (c.command == "suite") need("suite", c.suite);

  if (!diag.empty()) {
    std::string m;
    for (const auto& d : diag) m += (m.empty() ? "" : "\n") + d;
    throw UsageError(m);
  }
}

// ------------------------------------------------------------ dispatch

namespace detail {

inline Report per_carrier(const ExperimentConfig& c, const std::string& check, const std::string& subject,
                          const std::function<Report(const Carrier&)>& f) {
  Report top = suites::group(check, subject);
  top.property = check;
  for (int k : c.carrier_sizes) {
    auto x = Carrier::atoms(k);
    try {
      top.add(f(x));
    } catch (const Refusal& e) {
      Report r = suites::group(check, subject + " on " + x.name);
      r.refuse(e.what());
      top.add(std::move(r));
    }
  }
  return top;
}

inline DistLaw law(const ExperimentConfig& c, const Carrier& x, const Sampling& cfg) {
  auto o = operad_by_name(c.operad, cfg.pool);
  VerbalCat w = c.verbal.empty() ? o->w() : VerbalCat::parse(c.verbal);
  SynthOptions opt;
  opt.prime = c.prime;
  return synth_delta(w, o, builtin_monad(c.monad, cfg.pool), x, cfg, opt);
}

inline Report synth_report(const ExperimentConfig& c, const Carrier& x, const Sampling& cfg) {
  auto d = law(c, x, cfg);
  Report r = check_well_defined(d, x, cfg);
  r.details["law"] = d.name();
  r.details["carrier"] = x.name;
  // a few evaluations on S(T X)
  nlohmann::json ex = nlohmann::json::array();
  Rng rng(cfg.seed);
  Carrier tx = apply(d.t, x, cfg);
  if (!tx.empty()) {
    for (int i = 0; i < 5; ++i) {
      try {
        Val e = d.s->sample(tx, rng, cfg);
        ex.push_back({{"input", e.str()}, {"output", d(e).str()}});
      } catch (const Refusal&) {
      }
    }
  }
  r.details["examples"] = ex;
  return r;
}

inline Report refine_report(const ExperimentConfig& c, const Carrier& x, const Sampling& cfg) {
  auto s = builtin_monad(c.monad, cfg.pool);
  auto rf = refine(s, VerbalCat::parse(c.verbal), std::max(c.bound, default_inner_bound));
  Report top = suites::group("refine", rf->name() + " on " + x.name);
  top.property = "refinement";
  if (auto els = rf->enumerate(x, cfg.explicit_cap)) {
    top.details["elements"] = els->size();
    nlohmann::json shown = nlohmann::json::array();
    for (std::size_t i = 0; i < els->size() && i < 8; ++i) shown.push_back((*els)[i].str());
    top.details["first_elements"] = shown;
  }
  top.add(check_monad_laws(rf, x, cfg));
  top.add(check_monad_morphism(rf, s, [s](const Val& e) { return counit(*s, e); }, x, cfg, false, "counit"));
  return top;
}

}  // namespace detail

/// Runs one validated config.
inline Report dispatch(const ExperimentConfig& c, const Sampling& cfg, nlohmann::json* timing = nullptr) {
  const std::string& cmd = c.command;
  if (cmd == "check-monad") {
    return detail::per_carrier(c, cmd, c.monad, [&](const Carrier& x) {
      auto t = builtin_monad(c.monad, cfg.pool);
      Report r = check_monad_laws(t, x, cfg);
      if (!c.verbal.empty()) {
        Report top = suites::group("monad", t->name() + " on " + x.name);
        top.add(std::move(r));
        top.add(check_w_commutative_all(t, VerbalCat::parse(c.verbal), x, c.bound, cfg));
        return top;
      }
      return r;
    });
  }
  if (cmd == "check-operad") {
    OperadCheckOptions opt;
    opt.bound = c.bound;
    return check_operad(operad_by_name(c.operad, cfg.pool), cfg, opt);
  }
  if (cmd == "check-commutativity") {
    return detail::per_carrier(c, cmd, c.monad, [&](const Carrier& x) {
      auto t = builtin_monad(c.monad, cfg.pool);
      if (c.verbal.empty()) return crosscheck_characterizations(t, x, c.bound, cfg);
      return check_w_commutative_all(t, VerbalCat::parse(c.verbal), x, c.bound, cfg);
    });
  }
  if (cmd == "synth") {
    return detail::per_carrier(c, cmd, c.operad + " / " + c.monad,
                               [&](const Carrier& x) { return detail::synth_report(c, x, cfg); });
  }
  if (cmd == "verify") {
    return detail::per_carrier(c, cmd, c.operad + " / " + c.monad, [&](const Carrier& x) {
      auto d = detail::law(c, x, cfg);
      Report r = verify_beck(d, x, cfg);
      if (c.target_verbal.empty()) return r;
      Report top = suites::group("verify", d.name() + " on " + x.name);
      top.add(std::move(r));
      SynthOptions opt;
      opt.prime = c.prime;
      top.add(verify_invariance(d.o, VerbalCat::parse(c.target_verbal), d.t, x, cfg, opt));
      return top;
    });
  }
  if (cmd == "refine") {
    return detail::per_carrier(c, cmd, c.monad + " at " + c.verbal,
                               [&](const Carrier& x) { return detail::refine_report(c, x, cfg); });
  }
  if (cmd == "diagnose") {
    return detail::per_carrier(c, cmd, c.s + " over " + c.monad, [&](const Carrier& x) {
      DiagnoseOptions opt;
      opt.bound = c.bound;
      return diagnose(c.s, builtin_monad(c.monad, cfg.pool), x, cfg, opt);
    });
  }
  if (cmd == "suite") return suites::suite(c.suite, cfg, timing);
  throw UsageError("command: unknown command '" + cmd + "'");
}

struct RunResult {
  nlohmann::json report;  // the RunReport document
  int exit_code = 0;
};

/// Validates, runs and wraps the result with the config echo, tool version
/// and timing. Throws UsageError on an invalid config.
inline RunResult run(const ExperimentConfig& c) {
  validate(c);
  Sampling cfg = sampling(c);
  auto t0 = std::chrono::steady_clock::now();
  nlohmann::json timing = nlohmann::json::object();
  Report r;
  try {
    r = dispatch(c, cfg, &timing);
  } catch (const Refusal& e) {
    r = suites::group(c.command, "run");
    r.refuse(e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  RunResult out;
  out.exit_code = exit_code(r);
  out.report = {{"tool", tool_name},         {"version", tool_version},  {"config", c.to_json()},
                {"verdict", r.label()},      {"exit_code", out.exit_code}, {"report", r.to_json()},
                {"timing", {{"seconds", secs}}}};
  if (!timing.empty()) out.report["timing"]["criteria"] = timing;
  return out;
}

/// Accepts a bare config or a RunReport whose echoed config is replayed.
inline ExperimentConfig config_from_document(const nlohmann::json& j) {
  if (j.is_object() && j.contains("config") && j.contains("tool")) return config_from_json(j["config"]);
  return config_from_json(j);
}

// ------------------------------------------------------------ rendering

namespace detail {

inline void render(const nlohmann::json& r, int depth, std::ostringstream& os) {
  std::string verdict = r.value("verdict", "?");
  std::string line = std::string(static_cast<std::size_t>(depth) * 2, ' ') + r.value("check", "") + "  " +
                     r.value("subject", "");
  os << std::left;
  os.width(34);
  os << verdict << " ";
  os.width(9);
  os << r.value("checked", std::uint64_t{0}) << " ";
  os.width(9);
  os << r.value("untested", std::uint64_t{0}) << " " << line << "\n";
  if (r.contains("witness")) os << std::string(45 + depth * 2, ' ') << "witness: " << r["witness"].dump() << "\n";
  if (r.contains("message")) os << std::string(45 + depth * 2, ' ') << "message: " << r["message"].get<std::string>() << "\n";
  if (r.contains("children"))
    for (const auto& c : r["children"]) render(c, depth + 1, os);
}

}  // namespace detail

/// A human-readable table of a RunReport.
inline std::string render_pretty(const nlohmann::json& run) {
  std::ostringstream os;
  os << run.value("tool", "") << " " << run.value("version", "") << "  verdict: " << run.value("verdict", "")
     << "  (" << run["timing"].value("seconds", 0.0) << " s)\n";
  os << std::left;
  os.width(34);
  os << "VERDICT" << " ";
  os.width(9);
  os << "CHECKED" << " ";
  os.width(9);
  os << "UNTESTED" << " CHECK  SUBJECT\n";
  detail::render(run["report"], 0, os);
  return os.str();
}

}  // namespace monadlab::cli
