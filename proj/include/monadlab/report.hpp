#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "rational.hpp"

namespace monadlab {

using Rng = std::mt19937_64;

inline std::vector<Rational> default_pool() {
  return {Rational(0), Rational(1), Rational(2), Rational(1, 2), Rational(1, 3), Rational(3)};
}

inline std::uint64_t default_seed() {
  if (const char* s = std::getenv("MONADLAB_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::logic_error&) {
    }
  }
  return 20240601ULL;
}

/// Sampling parameters shared by every randomized check.
struct Sampling {
  std::uint64_t seed = default_seed();
  std::size_t samples = 200;
  std::vector<Rational> pool = default_pool();
  int support = 3;  // maximal support size of sampled coefficient maps
  /// Caps the size of a carrier that is listed explicitly; larger ones are sampled.
  std::size_t explicit_cap = 4096;

  nlohmann::json to_json() const {
    std::vector<std::string> p;
    for (const auto& r : pool) p.push_back(r.str());
    return {{"seed", seed}, {"samples", samples}, {"pool", p}, {"support", support}};
  }
};

enum class Verdict { Pass, Fail, Refused };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Refused: return "refused";
  }
  return "?";
}

/// Result of a check. Children are merged into the parent verdict: any
/// failure fails the parent; a refusal only matters if nothing failed.
struct Report {
  std::string check;
  std::string subject;
  std::string property;  // stable identifier of the law being checked
  Verdict verdict = Verdict::Pass;
  bool sampled = false;
  std::optional<std::uint64_t> seed;
  std::uint64_t checked = 0;
  std::uint64_t failed = 0;
  std::uint64_t untested = 0;
  nlohmann::json witness;
  nlohmann::json details = nlohmann::json::object();
  std::string message;
  std::vector<Report> children;

  bool ok() const { return verdict == Verdict::Pass; }

  std::string label() const {
    if (verdict == Verdict::Pass) return sampled ? "no counterexample found (sampled)" : "pass";
    return verdict_name(verdict);
  }

  void fail(nlohmann::json w) {
    ++failed;
    if (verdict != Verdict::Fail) {
      verdict = Verdict::Fail;
      witness = std::move(w);
    }
  }
  void refuse(const std::string& why) {
    if (verdict == Verdict::Pass) verdict = Verdict::Refused;
    message = why;
  }
  void add(Report child) {
    checked += child.checked;
    failed += child.failed;
    untested += child.untested;
    sampled = sampled || child.sampled;
    if (child.verdict == Verdict::Fail) verdict = Verdict::Fail;
    else if (child.verdict == Verdict::Refused && verdict == Verdict::Pass) verdict = Verdict::Refused;
    children.push_back(std::move(child));
  }

  nlohmann::json to_json() const {
    nlohmann::json j = {{"check", check},       {"subject", subject}, {"property", property},
                        {"verdict", label()},   {"checked", checked}, {"failed", failed},
                        {"untested", untested}, {"mode", sampled ? "sampled" : "exhaustive"}};
    if (seed) j["seed"] = *seed;
    if (!witness.is_null()) j["witness"] = witness;
    if (!details.empty()) j["details"] = details;
    if (!message.empty()) j["message"] = message;
    if (!children.empty()) {
      j["children"] = nlohmann::json::array();
      for (const auto& c : children) j["children"].push_back(c.to_json());
    }
    return j;
  }
};

inline int exit_code(const Report& r) {
  switch (r.verdict) {
    case Verdict::Pass: return 0;
    case Verdict::Fail: return 1;
    case Verdict::Refused: return 2;
  }
  return 1;
}

}  // namespace monadlab
