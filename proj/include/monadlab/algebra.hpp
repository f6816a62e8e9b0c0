#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"
#include "report.hpp"
#include "val.hpp"

namespace monadlab {

using BinOp = std::function<Val(const Val&, const Val&)>;
using Sampler = std::function<Val(Rng&)>;

struct Monoid {
  std::string name;
  Val unit;
  BinOp op;
  std::optional<std::vector<Val>> elements;  // finite carrier, if any
  Sampler sample;
  std::optional<Val> zero;  // set for monoids with zero
};
using MonoidPtr = std::shared_ptr<const Monoid>;

struct Semiring {
  std::string name;
  Val zero;
  Val one;
  BinOp add;
  BinOp mul;
  std::optional<std::vector<Val>> elements;
  Sampler sample;

  bool is_zero(const Val& v) const { return v == zero; }
};
using SemiringPtr = std::shared_ptr<const Semiring>;

namespace detail {

inline Val pick(const std::vector<Val>& xs, Rng& rng) {
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

inline std::vector<Val> pool_vals(const std::vector<Rational>& pool, bool (*keep)(const Rational&)) {
  std::vector<Val> out;
  for (const auto& r : pool)
    if (keep(r)) out.push_back(Val::num(r));
  if (out.empty()) throw UsageError("coefficient pool has no usable entries");
  return out;
}

}  // namespace detail

/// Sorts entries by key, merges equal keys with `add` and drops entries whose
/// coefficient equals `zero`.
inline Val make_bag(std::vector<Val::Entry> entries, const BinOp& add, const Val& zero) {
  std::sort(entries.begin(), entries.end(),
            [](const Val::Entry& a, const Val::Entry& b) { return Val::compare(a.first, b.first) < 0; });
  std::vector<Val::Entry> out;
  out.reserve(entries.size());
  for (auto& e : entries) {
    if (!out.empty() && out.back().first == e.first)
      out.back().second = add(out.back().second, e.second);
    else
      out.push_back(std::move(e));
  }
  std::erase_if(out, [&](const Val::Entry& e) { return e.second == zero; });
  return Val::bag(std::move(out));
}

inline Val make_bag(std::vector<Val::Entry> entries, const Semiring& s) {
  return make_bag(std::move(entries), s.add, s.zero);
}

/// Coefficient of key in a bag, or `zero` if absent.
inline Val bag_coef(const Val& bag, const Val& key, const Val& zero) {
  const auto& es = bag.entries();
  auto it = std::lower_bound(es.begin(), es.end(), key,
                             [](const Val::Entry& e, const Val& k) { return Val::compare(e.first, k) < 0; });
  if (it != es.end() && it->first == key) return it->second;
  return zero;
}

// ---------------------------------------------------------------- semirings

inline SemiringPtr nat_semiring(const std::vector<Rational>& pool = default_pool()) {
  auto s = std::make_shared<Semiring>();
  s->name = "nat";
  s->zero = Val::num(0);
  s->one = Val::num(1);
  s->add = [](const Val& a, const Val& b) { return Val::num(a.as_num() + b.as_num()); };
  s->mul = [](const Val& a, const Val& b) { return Val::num(a.as_num() * b.as_num()); };
  auto vals = detail::pool_vals(pool, [](const Rational& r) { return r.is_integer() && r >= Rational(0); });
  s->sample = [vals](Rng& rng) { return detail::pick(vals, rng); };
  return s;
}

inline SemiringPtr bool_semiring() {
  auto s = std::make_shared<Semiring>();
  s->name = "bool";
  s->zero = Val::num(0);
  s->one = Val::num(1);
  s->add = [](const Val& a, const Val& b) { return Val::num((a.as_num().is_zero() && b.as_num().is_zero()) ? 0 : 1); };
  s->mul = [](const Val& a, const Val& b) { return Val::num((a.as_num().is_zero() || b.as_num().is_zero()) ? 0 : 1); };
  s->elements = std::vector<Val>{Val::num(0), Val::num(1)};
  auto els = *s->elements;
  s->sample = [els](Rng& rng) { return detail::pick(els, rng); };
  return s;
}

inline SemiringPtr qnonneg_semiring(const std::vector<Rational>& pool = default_pool()) {
  auto s = std::make_shared<Semiring>();
  s->name = "qnonneg";
  s->zero = Val::num(0);
  s->one = Val::num(1);
  s->add = [](const Val& a, const Val& b) { return Val::num(a.as_num() + b.as_num()); };
  s->mul = [](const Val& a, const Val& b) { return Val::num(a.as_num() * b.as_num()); };
  auto vals = detail::pool_vals(pool, [](const Rational& r) { return r >= Rational(0); });
  s->sample = [vals](Rng& rng) { return detail::pick(vals, rng); };
  return s;
}

inline SemiringPtr int_semiring(const std::vector<Rational>& pool = default_pool()) {
  auto s = std::make_shared<Semiring>();
  s->name = "int";
  s->zero = Val::num(0);
  s->one = Val::num(1);
  s->add = [](const Val& a, const Val& b) { return Val::num(a.as_num() + b.as_num()); };
  s->mul = [](const Val& a, const Val& b) { return Val::num(a.as_num() * b.as_num()); };
  std::vector<Val> vals;
  for (const auto& r : pool)
    if (r.is_integer()) {
      vals.push_back(Val::num(r));
      if (!r.is_zero()) vals.push_back(Val::num(-r));
    }
  if (vals.empty()) throw UsageError("coefficient pool has no integer entries");
  s->sample = [vals](Rng& rng) { return detail::pick(vals, rng); };
  return s;
}

// ------------------------------------------------------------------ monoids

namespace detail {

inline MonoidPtr finite_monoid(std::string name, Val unit, BinOp op, std::vector<Val> els,
                               std::optional<Val> zero = std::nullopt) {
  auto m = std::make_shared<Monoid>();
  m->name = std::move(name);
  m->unit = std::move(unit);
  m->op = std::move(op);
  m->elements = els;
  m->sample = [els](Rng& rng) { return pick(els, rng); };
  m->zero = std::move(zero);
  return m;
}

inline std::int64_t modn(const Val& v, std::int64_t n) { return ((v.as_atom() % n) + n) % n; }

}  // namespace detail

inline MonoidPtr trivial_monoid() {
  return detail::finite_monoid("trivial", unit_val(), [](const Val&, const Val&) { return unit_val(); },
                               {unit_val()});
}

/// (Z/n, 1, *) with elements as atoms 0..n-1; zero is 0.
inline MonoidPtr zmod_mult_monoid(int n) {
  std::vector<Val> els;
  for (int i = 0; i < n; ++i) els.push_back(Val::atom(i));
  return detail::finite_monoid(
      "z" + std::to_string(n) + "mult", Val::atom(1 % n),
      [n](const Val& a, const Val& b) { return Val::atom((a.as_atom() * b.as_atom()) % n); }, els, Val::atom(0));
}

/// (Z/n, 0, +).
inline MonoidPtr zmod_add_monoid(int n) {
  std::vector<Val> els;
  for (int i = 0; i < n; ++i) els.push_back(Val::atom(i));
  return detail::finite_monoid(
      "z" + std::to_string(n) + "add", Val::atom(0),
      [n](const Val& a, const Val& b) { return Val::atom((a.as_atom() + b.as_atom()) % n); }, els);
}

/// ({0,1}, 0, or): commutative and idempotent.
inline MonoidPtr bool_or_monoid() {
  return detail::finite_monoid(
      "bool-or", Val::atom(0), [](const Val& a, const Val& b) { return Val::atom(a.as_atom() | b.as_atom()); },
      {Val::atom(0), Val::atom(1)});
}

/// ({0,1}, 1, and) with zero 0.
inline MonoidPtr bool_and_monoid() {
  return detail::finite_monoid(
      "bool-and", Val::atom(1), [](const Val& a, const Val& b) { return Val::atom(a.as_atom() & b.as_atom()); },
      {Val::atom(0), Val::atom(1)}, Val::atom(0));
}

/// {1, a, b} with x*y = x for x != 1: idempotent and not commutative.
inline MonoidPtr left_zero_monoid() {
  return detail::finite_monoid(
      "leftzero", Val::atom(0), [](const Val& a, const Val& b) { return a.as_atom() == 0 ? b : a; },
      {Val::atom(0), Val::atom(1), Val::atom(2)});
}

/// All maps {0,1} -> {0,1} under composition (f*g = f after g); elements are
/// the tables (f(0), f(1)). Neither commutative nor idempotent.
inline MonoidPtr transformation_monoid() {
  std::vector<Val> els;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) els.push_back(atoms_tuple({a, b}));
  return detail::finite_monoid(
      "trans2", atoms_tuple({0, 1}),
      [](const Val& f, const Val& g) {
        auto ap = [&](int x) { return f[static_cast<std::size_t>(g[x].as_atom())].as_atom(); };
        return atoms_tuple({ap(0), ap(1)});
      },
      els);
}

/// (Z, 0, +) over pool integers and their negatives.
inline MonoidPtr int_add_monoid(const std::vector<Rational>& pool = default_pool()) {
  auto m = std::make_shared<Monoid>();
  m->name = "int-add";
  m->unit = Val::atom(0);
  m->op = [](const Val& a, const Val& b) { return Val::atom(a.as_atom() + b.as_atom()); };
  std::vector<Val> vals;
  for (const auto& r : pool)
    if (r.is_integer()) {
      vals.push_back(Val::atom(r.num()));
      if (!r.is_zero()) vals.push_back(Val::atom(-r.num()));
    }
  m->sample = [vals](Rng& rng) { return detail::pick(vals, rng); };
  return m;
}

/// (Q>=0, 1, *) with zero 0; elements are numbers.
inline MonoidPtr qnonneg_mult_monoid(const std::vector<Rational>& pool = default_pool()) {
  auto m = std::make_shared<Monoid>();
  m->name = "qnonneg-mult";
  m->unit = Val::num(1);
  m->op = [](const Val& a, const Val& b) { return Val::num(a.as_num() * b.as_num()); };
  auto vals = detail::pool_vals(pool, [](const Rational& r) { return r >= Rational(0); });
  m->sample = [vals](Rng& rng) { return detail::pick(vals, rng); };
  m->zero = Val::num(0);
  return m;
}

/// (Q>0, 1, *).
inline MonoidPtr qpos_mult_monoid(const std::vector<Rational>& pool = default_pool()) {
  auto m = std::make_shared<Monoid>();
  m->name = "qpos-mult";
  m->unit = Val::num(1);
  m->op = [](const Val& a, const Val& b) { return Val::num(a.as_num() * b.as_num()); };
  auto vals = detail::pool_vals(pool, [](const Rational& r) { return r > Rational(0); });
  m->sample = [vals](Rng& rng) { return detail::pick(vals, rng); };
  return m;
}

// ----------------------------------------------------- monoid semirings

/// N[M]: finite multisets over M, union as sum, convolution as product.
inline SemiringPtr monoid_semiring(const MonoidPtr& m) {
  auto s = std::make_shared<Semiring>();
  s->name = "monoid-semiring:" + m->name;
  s->zero = Val::bag({});
  s->one = Val::bag({{m->unit, Val::num(1)}});
  auto count_add = [](const Val& a, const Val& b) { return Val::num(a.as_num() + b.as_num()); };
  auto zero_count = Val::num(0);
  s->add = [=](const Val& a, const Val& b) {
    auto es = a.entries();
    es.insert(es.end(), b.entries().begin(), b.entries().end());
    return make_bag(std::move(es), count_add, zero_count);
  };
  s->mul = [=](const Val& a, const Val& b) {
    std::vector<Val::Entry> es;
    for (const auto& [x, i] : a.entries())
      for (const auto& [y, j] : b.entries()) es.emplace_back(m->op(x, y), Val::num(i.as_num() * j.as_num()));
    return make_bag(std::move(es), count_add, zero_count);
  };
  s->sample = [=](Rng& rng) {
    int k = std::uniform_int_distribution<int>(0, 2)(rng);
    std::vector<Val::Entry> es;
    for (int i = 0; i < k; ++i) es.emplace_back(m->sample(rng), Val::num(std::uniform_int_distribution<int>(1, 2)(rng)));
    return make_bag(std::move(es), count_add, zero_count);
  };
  return s;
}

/// N0[P]: finite multisets over the nonzero elements of a monoid with zero;
/// products equal to zero are dropped.
inline SemiringPtr contracted_semiring(const MonoidPtr& p) {
  if (!p->zero) throw UsageError("contracted semiring needs a monoid with zero, got " + p->name);
  auto s = std::make_shared<Semiring>();
  s->name = "contracted:" + p->name;
  Val z = *p->zero;
  s->zero = Val::bag({});
  s->one = Val::bag({{p->unit, Val::num(1)}});
  auto count_add = [](const Val& a, const Val& b) { return Val::num(a.as_num() + b.as_num()); };
  auto zero_count = Val::num(0);
  s->add = [=](const Val& a, const Val& b) {
    auto es = a.entries();
    es.insert(es.end(), b.entries().begin(), b.entries().end());
    return make_bag(std::move(es), count_add, zero_count);
  };
  s->mul = [=](const Val& a, const Val& b) {
    std::vector<Val::Entry> es;
    for (const auto& [x, i] : a.entries())
      for (const auto& [y, j] : b.entries()) {
        Val xy = p->op(x, y);
        if (xy != z) es.emplace_back(xy, Val::num(i.as_num() * j.as_num()));
      }
    return make_bag(std::move(es), count_add, zero_count);
  };
  s->sample = [=](Rng& rng) {
    int k = std::uniform_int_distribution<int>(0, 2)(rng);
    std::vector<Val::Entry> es;
    for (int i = 0; i < k; ++i) {
      Val x = p->sample(rng);
      if (x != z) es.emplace_back(x, Val::num(std::uniform_int_distribution<int>(1, 2)(rng)));
    }
    return make_bag(std::move(es), count_add, zero_count);
  };
  return s;
}

// ------------------------------------------------------------ by name

inline MonoidPtr monoid_by_name(const std::string& name, const std::vector<Rational>& pool = default_pool()) {
  if (name == "trivial") return trivial_monoid();
  if (name == "bool-or") return bool_or_monoid();
  if (name == "bool-and") return bool_and_monoid();
  if (name == "leftzero") return left_zero_monoid();
  if (name == "trans2") return transformation_monoid();
  if (name == "int-add") return int_add_monoid(pool);
  if (name == "qnonneg-mult") return qnonneg_mult_monoid(pool);
  if (name == "qpos-mult") return qpos_mult_monoid(pool);
  auto numbered = [&](const std::string& prefix, const std::string& suffix) -> std::optional<int> {
    if (name.size() > prefix.size() + suffix.size() && name.rfind(prefix, 0) == 0 &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      try {
        int n = std::stoi(name.substr(prefix.size(), name.size() - prefix.size() - suffix.size()));
        if (n >= 1) return n;
      } catch (const std::logic_error&) {
      }
    }
    return std::nullopt;
  };
  if (auto n = numbered("z", "mult")) return zmod_mult_monoid(*n);
  if (auto n = numbered("z", "add")) return zmod_add_monoid(*n);
  throw UsageError("unknown monoid '" + name + "'");
}

inline SemiringPtr semiring_by_name(const std::string& name, const std::vector<Rational>& pool = default_pool()) {
  if (name == "nat") return nat_semiring(pool);
  if (name == "bool") return bool_semiring();
  if (name == "qnonneg") return qnonneg_semiring(pool);
  if (name == "int") return int_semiring(pool);
  if (name.rfind("monoid-semiring:", 0) == 0) return monoid_semiring(monoid_by_name(name.substr(16), pool));
  if (name.rfind("contracted:", 0) == 0) return contracted_semiring(monoid_by_name(name.substr(11), pool));
  throw UsageError("unknown semiring '" + name + "'");
}

// ------------------------------------------------------------ law checks

namespace detail {

template <class F>
void for_triples(const std::optional<std::vector<Val>>& els, const Sampler& sample, std::size_t n, Rng& rng,
                 Report& rep, F&& f) {
  if (els) {
    for (const auto& a : *els)
      for (const auto& b : *els)
        for (const auto& c : *els) f(a, b, c);
  } else {
    rep.sampled = true;
    for (std::size_t i = 0; i < n; ++i) {
      Val a = sample(rng), b = sample(rng), c = sample(rng);
      f(a, b, c);
    }
  }
}

inline void expect_eq(Report& r, const Val& lhs, const Val& rhs, const char* law, nlohmann::json ctx) {
  ++r.checked;
  if (lhs != rhs) {
    ctx["law"] = law;
    ctx["lhs"] = lhs.str();
    ctx["rhs"] = rhs.str();
    r.fail(std::move(ctx));
  }
}

}  // namespace detail

/// Associativity and unit laws, plus the zero laws when the monoid has a zero.
inline Report check_monoid(const Monoid& m, std::size_t samples = 1000, std::uint64_t seed = default_seed()) {
  Report r;
  r.check = "monoid-laws";
  r.subject = m.name;
  r.property = "monoid.axioms";
  Rng rng(seed);
  if (!m.elements) r.seed = seed;
  detail::for_triples(m.elements, m.sample, samples, rng, r, [&](const Val& a, const Val& b, const Val& c) {
    nlohmann::json ctx = {{"a", a.str()}, {"b", b.str()}, {"c", c.str()}};
    detail::expect_eq(r, m.op(m.op(a, b), c), m.op(a, m.op(b, c)), "associativity", ctx);
    detail::expect_eq(r, m.op(m.unit, a), a, "left unit", ctx);
    detail::expect_eq(r, m.op(a, m.unit), a, "right unit", ctx);
    if (m.zero) {
      detail::expect_eq(r, m.op(*m.zero, a), *m.zero, "left zero", ctx);
      detail::expect_eq(r, m.op(a, *m.zero), *m.zero, "right zero", ctx);
    }
  });
  return r;
}

inline Report check_semiring(const Semiring& s, std::size_t samples = 1000, std::uint64_t seed = default_seed()) {
  Report r;
  r.check = "semiring-laws";
  r.subject = s.name;
  r.property = "semiring.axioms";
  Rng rng(seed);
  if (!s.elements) r.seed = seed;
  detail::for_triples(s.elements, s.sample, samples, rng, r, [&](const Val& a, const Val& b, const Val& c) {
    nlohmann::json ctx = {{"a", a.str()}, {"b", b.str()}, {"c", c.str()}};
    detail::expect_eq(r, s.add(s.add(a, b), c), s.add(a, s.add(b, c)), "additive associativity", ctx);
    detail::expect_eq(r, s.add(a, b), s.add(b, a), "additive commutativity", ctx);
    detail::expect_eq(r, s.add(s.zero, a), a, "additive unit", ctx);
    detail::expect_eq(r, s.mul(s.mul(a, b), c), s.mul(a, s.mul(b, c)), "multiplicative associativity", ctx);
    detail::expect_eq(r, s.mul(s.one, a), a, "left multiplicative unit", ctx);
    detail::expect_eq(r, s.mul(a, s.one), a, "right multiplicative unit", ctx);
    detail::expect_eq(r, s.mul(a, s.zero), s.zero, "right annihilation", ctx);
    detail::expect_eq(r, s.mul(s.zero, a), s.zero, "left annihilation", ctx);
    detail::expect_eq(r, s.mul(a, s.add(b, c)), s.add(s.mul(a, b), s.mul(a, c)), "left distributivity", ctx);
    detail::expect_eq(r, s.mul(s.add(a, b), c), s.add(s.mul(a, c), s.mul(b, c)), "right distributivity", ctx);
  });
  return r;
}

/// True iff the monoid is commutative on its elements (or samples).
inline bool monoid_is_commutative(const Monoid& m, std::size_t samples = 200, std::uint64_t seed = 1) {
  Rng rng(seed);
  auto test = [&](const Val& a, const Val& b) { return m.op(a, b) == m.op(b, a); };
  if (m.elements) {
    for (const auto& a : *m.elements)
      for (const auto& b : *m.elements)
        if (!test(a, b)) return false;
    return true;
  }
  for (std::size_t i = 0; i < samples; ++i)
    if (!test(m.sample(rng), m.sample(rng))) return false;
  return true;
}

inline bool monoid_is_idempotent(const Monoid& m, std::size_t samples = 200, std::uint64_t seed = 1) {
  Rng rng(seed);
  if (m.elements) {
    for (const auto& a : *m.elements)
      if (m.op(a, a) != a) return false;
    return true;
  }
  for (std::size_t i = 0; i < samples; ++i) {
    Val a = m.sample(rng);
    if (m.op(a, a) != a) return false;
  }
  return true;
}

}  // namespace monadlab
