#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "val.hpp"

namespace monadlab {

/// A function between finite ordinals dom -> cod, stored as its table.
struct FinFn {
  int dom = 0;
  int cod = 0;
  std::vector<int> table;

  FinFn() = default;
  FinFn(int d, int c, std::vector<int> t) : dom(d), cod(c), table(std::move(t)) { validate(); }

  static FinFn id(int n) {
    std::vector<int> t(n);
    std::iota(t.begin(), t.end(), 0);
    return {n, n, std::move(t)};
  }
  /// The unique map m -> 1.
  static FinFn bang(int m) { return {m, 1, std::vector<int>(m, 0)}; }
  /// The empty map 0 -> n.
  static FinFn empty(int n) { return {0, n, {}}; }
  static FinFn swap2() { return {2, 2, {1, 0}}; }
  /// Adjacent transposition of i and i+1 on n.
  static FinFn transposition(int n, int i) {
    auto f = id(n);
    std::swap(f.table[i], f.table[i + 1]);
    return f;
  }
  /// Monotone injection n -> n+1 whose image misses j.
  static FinFn skip(int n, int j) {
    std::vector<int> t(n);
    for (int i = 0; i < n; ++i) t[i] = i < j ? i : i + 1;
    return {n, n + 1, std::move(t)};
  }
  /// Monotone surjection n+k-1 -> n collapsing the block i..i+k-1.
  static FinFn merge(int n, int i, int k) {
    std::vector<int> t(n + k - 1);
    for (int j = 0; j < n + k - 1; ++j) t[j] = j < i ? j : (j < i + k ? i : j - k + 1);
    return {n + k - 1, n, std::move(t)};
  }

  int operator()(int i) const { return table.at(i); }

  bool is_injective() const {
    std::vector<char> seen(cod, 0);
    for (int v : table) {
      if (seen[v]) return false;
      seen[v] = 1;
    }
    return true;
  }
  bool is_surjective() const {
    std::vector<char> seen(cod, 0);
    for (int v : table) seen[v] = 1;
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  }
  bool is_bijective() const { return dom == cod && is_injective(); }
  bool is_monotone() const { return std::is_sorted(table.begin(), table.end()); }
  bool is_identity() const {
    if (dom != cod) return false;
    for (int i = 0; i < dom; ++i)
      if (table[i] != i) return false;
    return true;
  }
  std::vector<int> fiber_sizes() const {
    std::vector<int> s(cod, 0);
    for (int v : table) ++s[v];
    return s;
  }
  /// Inverse of a bijection.
  FinFn inverse() const {
    if (!is_bijective()) throw std::logic_error("inverse of a non-bijection");
    std::vector<int> t(dom);
    for (int i = 0; i < dom; ++i) t[table[i]] = i;
    return {cod, dom, std::move(t)};
  }

  friend bool operator==(const FinFn&, const FinFn&) = default;
  friend auto operator<=>(const FinFn& a, const FinFn& b) {
    if (auto c = a.dom <=> b.dom; c != 0) return c;
    if (auto c = a.cod <=> b.cod; c != 0) return c;
    return a.table <=> b.table;
  }

  std::string str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < table.size(); ++i) os << (i ? "," : "") << table[i];
    os << "]:" << dom << "->" << cod;
    return os.str();
  }
  nlohmann::json to_json() const { return {{"dom", dom}, {"cod", cod}, {"table", table}}; }
  static FinFn from_json(const nlohmann::json& j) {
    return {j.at("dom").get<int>(), j.at("cod").get<int>(), j.at("table").get<std::vector<int>>()};
  }
  /// Encoding as a value (tuple of atoms), used when morphisms are operad elements.
  Val to_val() const {
    std::vector<Val> xs;
    xs.reserve(table.size());
    for (int v : table) xs.push_back(Val::atom(v));
    return Val::tuple(std::move(xs));
  }
  static FinFn from_val(const Val& v, int cod) {
    std::vector<int> t;
    for (const auto& x : v.items()) t.push_back(static_cast<int>(x.as_atom()));
    return {static_cast<int>(t.size()), cod, std::move(t)};
  }

 private:
  void validate() const {
    if (dom < 0 || cod < 0) throw std::invalid_argument("negative arity");
    if (static_cast<int>(table.size()) != dom) throw std::invalid_argument("table length differs from domain");
    for (int v : table)
      if (v < 0 || v >= cod) throw std::invalid_argument("table entry out of range in " + str());
  }
};

/// g . f
inline FinFn compose(const FinFn& g, const FinFn& f) {
  if (f.cod != g.dom)
    throw std::invalid_argument("cannot compose " + g.str() + " after " + f.str());
  std::vector<int> t(f.dom);
  for (int i = 0; i < f.dom; ++i) t[i] = g.table[f.table[i]];
  return {f.dom, g.cod, std::move(t)};
}

/// Coproduct injection of the i-th summand of sum(ms).
inline FinFn coproj(const std::vector<int>& ms, std::size_t i) {
  if (i >= ms.size()) throw std::out_of_range("coproduct index out of range");
  int offset = 0;
  for (std::size_t k = 0; k < i; ++k) offset += ms[k];
  int total = std::accumulate(ms.begin(), ms.end(), 0);
  std::vector<int> t(ms[i]);
  for (int j = 0; j < ms[i]; ++j) t[j] = offset + j;
  return {ms[i], total, std::move(t)};
}

/// Verbal substitution: for beta: n' -> n and alphas[i]: m'_i -> m_i, the map
/// sum_{i'} m'_{beta(i')} -> sum_i m_i sending the i'-th block through
/// alphas[beta(i')] into the beta(i')-th block.
inline FinFn star(const FinFn& beta, const std::vector<FinFn>& alphas) {
  if (static_cast<int>(alphas.size()) != beta.cod)
    throw std::invalid_argument("star: expected " + std::to_string(beta.cod) + " maps, got " +
                                std::to_string(alphas.size()));
  std::vector<int> offset(alphas.size() + 1, 0);
  for (std::size_t i = 0; i < alphas.size(); ++i) offset[i + 1] = offset[i] + alphas[i].cod;
  std::vector<int> t;
  for (int ip = 0; ip < beta.dom; ++ip) {
    const auto& a = alphas[beta.table[ip]];
    for (int j = 0; j < a.dom; ++j) t.push_back(offset[beta.table[ip]] + a.table[j]);
  }
  int d = static_cast<int>(t.size());
  return {d, offset.back(), std::move(t)};
}

/// One of the named wide subcategories of finite ordinals and functions.
/// `Mono` (monotone maps) is not verbal; it ships for the negative closure test.
struct VerbalCat {
  enum class Kind { Fid, Fminj, Fbij, Finj, Fsurj, F, FsurjN, Mono };
  Kind kind = Kind::F;
  int k = 0;  // only for FsurjN

  static VerbalCat Fid() { return {Kind::Fid}; }
  static VerbalCat Fminj() { return {Kind::Fminj}; }
  static VerbalCat Fbij() { return {Kind::Fbij}; }
  static VerbalCat Finj() { return {Kind::Finj}; }
  static VerbalCat Fsurj() { return {Kind::Fsurj}; }
  static VerbalCat Fall() { return {Kind::F}; }
  static VerbalCat FsurjN(int k) {
    if (k < 1) throw std::invalid_argument("FsurjN needs k >= 1");
    return {Kind::FsurjN, k};
  }
  static VerbalCat Mono() { return {Kind::Mono}; }

  friend bool operator==(const VerbalCat&, const VerbalCat&) = default;

  std::string name() const {
    switch (kind) {
      case Kind::Fid: return "Fid";
      case Kind::Fminj: return "Fminj";
      case Kind::Fbij: return "Fbij";
      case Kind::Finj: return "Finj";
      case Kind::Fsurj: return "Fsurj";
      case Kind::F: return "F";
      case Kind::FsurjN: return "FsurjN:" + std::to_string(k);
      case Kind::Mono: return "Mono";
    }
    return "?";
  }
  static VerbalCat parse(const std::string& s) {
    if (s == "Fid") return Fid();
    if (s == "Fminj") return Fminj();
    if (s == "Fbij") return Fbij();
    if (s == "Finj") return Finj();
    if (s == "Fsurj") return Fsurj();
    if (s == "F") return Fall();
    if (s == "Mono") return Mono();
    if (s.rfind("FsurjN:", 0) == 0) {
      try {
        return FsurjN(std::stoi(s.substr(7)));
      } catch (const std::logic_error&) {
      }
    }
    throw UsageError("unknown verbal category '" + s + "'");
  }

  bool member(const FinFn& f) const {
    switch (kind) {
      case Kind::Fid: return f.is_identity();
      case Kind::Fminj: return f.is_monotone() && f.is_injective();
      case Kind::Fbij: return f.is_bijective();
      case Kind::Finj: return f.is_injective();
      case Kind::Fsurj: return f.is_surjective();
      case Kind::F: return true;
      case Kind::Mono: return f.is_monotone();
      case Kind::FsurjN: {
        for (int s : f.fiber_sizes()) {
          if (s == 0) return false;
          if (k == 1 ? s != 1 : (s - 1) % (k - 1) != 0) return false;
        }
        return true;
      }
    }
    return false;
  }

  /// Members m -> n in lexicographic order of their tables.
  std::vector<FinFn> enumerate(int m, int n, int bound) const {
    if (m > bound || n > bound)
      throw Refusal("enumerate: arity " + std::to_string(std::max(m, n)) + " exceeds bound " + std::to_string(bound));
    std::vector<FinFn> out;
    if (n == 0) {
      if (m == 0 && member(FinFn::empty(0))) out.push_back(FinFn::empty(0));
      return out;
    }
    std::vector<int> t(m, 0);
    while (true) {
      FinFn f{m, n, t};
      if (member(f)) out.push_back(std::move(f));
      int i = m - 1;
      while (i >= 0 && t[i] == n - 1) t[i--] = 0;
      if (i < 0) break;
      ++t[i];
    }
    return out;
  }

  /// All members with dom, cod <= bound, ordered by (dom, cod, table).
  std::vector<FinFn> enumerate_all(int bound) const {
    std::vector<FinFn> out;
    for (int m = 0; m <= bound; ++m)
      for (int n = 0; n <= bound; ++n)
        for (auto& f : enumerate(m, n, bound)) out.push_back(std::move(f));
    return out;
  }

  /// Generators of the category as used by the coend closure: every member
  /// factors through these with intermediate arities between its endpoints.
  /// Returns the generators with domain m (outgoing) whose codomain is <= bound.
  std::vector<FinFn> generators_from(int m, int bound) const {
    std::vector<FinFn> out;
    bool perms = kind == Kind::Fbij || kind == Kind::Finj || kind == Kind::Fsurj || kind == Kind::F ||
                 (kind == Kind::FsurjN);
    bool skips = kind == Kind::Fminj || kind == Kind::Finj || kind == Kind::F || kind == Kind::Mono;
    bool merges = kind == Kind::Fsurj || kind == Kind::F || kind == Kind::Mono;
    if (perms)
      for (int i = 0; i + 1 < m; ++i) out.push_back(FinFn::transposition(m, i));
    if (skips && m + 1 <= bound)
      for (int j = 0; j <= m; ++j) out.push_back(FinFn::skip(m, j));
    if (merges)
      for (int i = 0; i + 1 < m; ++i) out.push_back(FinFn::merge(m - 1, i, 2));
    if (kind == Kind::FsurjN && k >= 2)
      for (int i = 0; i + k <= m; ++i) out.push_back(FinFn::merge(m - k + 1, i, k));
    return out;
  }
  /// Generators with codomain n (incoming), domain <= bound.
  std::vector<FinFn> generators_into(int n, int bound) const {
    std::vector<FinFn> out;
    for (int m = 0; m <= bound; ++m)
      for (auto& g : generators_from(m, bound))
        if (g.cod == n) out.push_back(std::move(g));
    return out;
  }

  /// True if every member of *this is a member of other, tested on all maps
  /// with arities <= bound.
  bool included_in(const VerbalCat& other, int bound = 4) const {
    for (const auto& f : VerbalCat::Fall().enumerate_all(bound))
      if (member(f) && !other.member(f)) return false;
    return true;
  }
};

/// Outcome of an exhaustive star-closure run.
struct ClosureResult {
  bool pass = true;
  std::uint64_t checked = 0;
  std::optional<FinFn> beta;
  std::vector<FinFn> alphas;
  std::optional<FinFn> result;
};

/// Exhaustively tests that star(beta, alphas) stays in w for all beta and
/// alphas in w with every arity <= bound. Stops at the first failure.
inline ClosureResult check_star_closure(const VerbalCat& w, int bound) {
  ClosureResult res;
  auto all = w.enumerate_all(bound);
  std::vector<int> buf;
  std::vector<int> offset;
  FinFn r;
  for (const auto& beta : all) {
    int n = beta.cod;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      // assemble star(beta, alphas) into buf without allocating FinFns
      offset.assign(n + 1, 0);
      for (int i = 0; i < n; ++i) offset[i + 1] = offset[i] + all[idx[i]].cod;
      buf.clear();
      for (int ip = 0; ip < beta.dom; ++ip) {
        const auto& a = all[idx[beta.table[ip]]];
        for (int j = 0; j < a.dom; ++j) buf.push_back(offset[beta.table[ip]] + a.table[j]);
      }
      ++res.checked;
      r.dom = static_cast<int>(buf.size());
      r.cod = offset[n];
      r.table.swap(buf);
      bool ok = w.member(r);
      r.table.swap(buf);
      if (!ok) {
        r.table = buf;
        res.pass = false;
        res.beta = beta;
        for (int i = 0; i < n; ++i) res.alphas.push_back(all[idx[i]]);
        res.result = r;
        return res;
      }
      int i = n - 1;
      while (i >= 0 && idx[i] + 1 == all.size()) idx[i--] = 0;
      if (i < 0) break;
      ++idx[i];
    }
  }
  return res;
}

/// The verbal categories shipped with the library.
inline std::vector<VerbalCat> shipped_verbal_categories() {
  return {VerbalCat::Fid(),   VerbalCat::Fminj(), VerbalCat::Fbij(),     VerbalCat::Finj(),
          VerbalCat::Fsurj(), VerbalCat::Fall(),  VerbalCat::FsurjN(3)};
}

/// The lattice used by the diagnosis: Fbij <= Finj, Fsurj <= F.
inline std::vector<VerbalCat> diamond() {
  return {VerbalCat::Fbij(), VerbalCat::Finj(), VerbalCat::Fsurj(), VerbalCat::Fall()};
}

}  // namespace monadlab
