// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include <chrono>
#include <cstdio>
#include <iostream>

#include "suites.hpp"

using namespace monadlab;

int main() {
  Sampling cfg;
  int failures = 0;
  for (const auto& c : suites::criteria()) {
    auto t0 = std::chrono::steady_clock::now();
    Report r;
    std::string why;
    try {
      r = c.run(cfg);
    } catch (const std::exception& e) {
      r.refuse(e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = r.ok();
    if (!ok) why = r.label() + (r.witness.is_null() ? "" : " " + r.witness.dump()) + (r.message.empty() ? "" : " " + r.message);
    if (ok && c.budget_seconds > 0 && secs > c.budget_seconds) {
      ok = false;
      why = "over the " + std::to_string(static_cast<int>(c.budget_seconds)) + " s budget";
    }
    // name the first failing leaf
    if (!ok && r.verdict == Verdict::Fail) {
      const Report* leaf = &r;
      while (true) {
        const Report* next = nullptr;
        for (const auto& ch : leaf->children)
          if (ch.verdict == Verdict::Fail) {
            next = &ch;
            break;
          }
        if (!next) break;
        leaf = next;
      }
      why += " at " + leaf->check + " " + leaf->subject;
    }
    std::printf("%s criterion %d: %s (%llu checks, %.2f s)%s%s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(),
                static_cast<unsigned long long>(r.checked), secs, ok ? "" : " ", why.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
