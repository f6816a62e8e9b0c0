#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "errors.hpp"
#include "finord.hpp"
#include "report.hpp"
#include "val.hpp"

namespace monadlab {

using Fn = std::function<Val(const Val&)>;

/// A set at desk scale: an explicit duplicate-free list, or a sampler.
struct Carrier {
  std::string name;
  std::optional<std::vector<Val>> elems;
  Sampler sampler;

  bool is_explicit() const { return elems.has_value(); }
  std::size_t size() const { return elems ? elems->size() : 0; }
  bool empty() const { return elems && elems->empty(); }

  Val sample(Rng& rng) const {
    if (elems) {
      if (elems->empty()) throw std::logic_error("sampling from the empty carrier " + name);
      return detail::pick(*elems, rng);
    }
    return sampler(rng);
  }

  static Carrier finite(std::string name, std::vector<Val> xs) {
    Carrier c;
    c.name = std::move(name);
    c.elems = std::move(xs);
    return c;
  }
  /// {0, ..., n-1} as atoms.
  static Carrier atoms(int n) {
    std::vector<Val> xs;
    for (int i = 0; i < n; ++i) xs.push_back(Val::atom(i));
    return finite("X" + std::to_string(n), std::move(xs));
  }
  static Carrier sampled(std::string name, Sampler s) {
    Carrier c;
    c.name = std::move(name);
    c.sampler = std::move(s);
    return c;
  }
};

/// A computable monad on sets. Elements are Vals in the monad's own canonical
/// representation; map, unit and join return canonical elements.
class Monad {
 public:
  virtual ~Monad() = default;
  virtual std::string name() const = 0;
  virtual Val unit(const Val& x) const = 0;
  virtual Val map(const Fn& f, const Val& t) const = 0;
  virtual Val join(const Val& tt) const = 0;
  virtual Val bind(const Val& t, const Fn& k) const { return join(map(k, t)); }
  /// Lists T X when it is finite and has at most `cap` elements.
  virtual std::optional<std::vector<Val>> enumerate(const Carrier& x, std::size_t cap) const = 0;
  virtual Val sample(const Carrier& x, Rng& rng, const Sampling& cfg) const = 0;
  /// Representation invariant of elements (normalization, nonemptiness, ...).
  virtual bool valid(const Val&) const { return true; }
};
using MonadPtr = std::shared_ptr<const Monad>;

/// T applied to a carrier: explicit when small enough, otherwise sampler-backed.
inline Carrier apply(const MonadPtr& t, const Carrier& x, const Sampling& cfg) {
  Carrier c;
  c.name = t->name() + "(" + x.name + ")";
  c.elems = t->enumerate(x, cfg.explicit_cap);
  auto self = t;
  c.sampler = [self, x, cfg](Rng& rng) { return self->sample(x, rng, cfg); };
  return c;
}

namespace detail {

/// Up to k draws from x: distinct elements when x is explicit.
inline std::vector<Val> draw_support(const Carrier& x, int k, Rng& rng) {
  std::vector<Val> out;
  if (x.elems) {
    std::vector<Val> pool = *x.elems;
    std::shuffle(pool.begin(), pool.end(), rng);
    for (int i = 0; i < k && i < static_cast<int>(pool.size()); ++i) out.push_back(pool[i]);
  } else {
    for (int i = 0; i < k; ++i) out.push_back(x.sampler(rng));
  }
  return out;
}

inline std::optional<std::size_t> checked_pow(std::size_t b, std::size_t e, std::size_t cap) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (b != 0 && r > cap / b) return std::nullopt;
    r *= b;
  }
  return r <= cap ? std::optional<std::size_t>(r) : std::nullopt;
}

/// All tuples over xs of length n, in lexicographic order.
inline std::vector<std::vector<Val>> all_tuples(const std::vector<Val>& xs, std::size_t n) {
  std::vector<std::vector<Val>> out;
  std::vector<std::size_t> idx(n, 0);
  if (n > 0 && xs.empty()) return out;
  while (true) {
    std::vector<Val> t;
    t.reserve(n);
    for (auto i : idx) t.push_back(xs[i]);
    out.push_back(std::move(t));
    std::size_t i = n;
    while (i > 0 && idx[i - 1] + 1 == xs.size()) idx[--i] = 0;
    if (i == 0) break;
    ++idx[i - 1];
  }
  return out;
}

}  // namespace detail

// ----------------------------------------------------------- multiset family

/// M^S (finite-support S-linear combinations) and, when affine, A^S
/// (combinations whose coefficients sum to one). Elements are bags
/// value -> coefficient with zero coefficients dropped.
class MultisetMonad : public Monad {
 public:
  MultisetMonad(SemiringPtr s, bool affine, std::string name)
      : s_(std::move(s)), affine_(affine), name_(std::move(name)) {}

  std::string name() const override { return name_; }
  const Semiring& semiring() const { return *s_; }
  SemiringPtr semiring_ptr() const { return s_; }
  bool affine() const { return affine_; }

  Val unit(const Val& x) const override { return Val::bag({{x, s_->one}}); }
  Val map(const Fn& f, const Val& t) const override {
    std::vector<Val::Entry> es;
    es.reserve(t.entries().size());
    for (const auto& [x, c] : t.entries()) es.emplace_back(f(x), c);
    return make_bag(std::move(es), *s_);
  }
  Val join(const Val& tt) const override {
    std::vector<Val::Entry> es;
    for (const auto& [inner, c] : tt.entries())
      for (const auto& [x, d] : inner.entries()) es.emplace_back(x, s_->mul(c, d));
    return make_bag(std::move(es), *s_);
  }
  Val bind(const Val& t, const Fn& k) const override {
    std::vector<Val::Entry> es;
    for (const auto& [x, c] : t.entries()) {
      Val kx = k(x);
      for (const auto& [y, d] : kx.entries()) es.emplace_back(y, s_->mul(c, d));
    }
    return make_bag(std::move(es), *s_);
  }

  std::optional<std::vector<Val>> enumerate(const Carrier& x, std::size_t cap) const override {
    if (!x.elems) return std::nullopt;
    const auto& xs = *x.elems;
    if (affine_ && xs.size() <= 1) {
      if (xs.empty()) return std::vector<Val>{};
      return std::vector<Val>{unit(xs[0])};
    }
    if (!s_->elements) {
      if (xs.empty() && !affine_) return std::vector<Val>{Val::bag({})};
      return std::nullopt;
    }
    const auto& ss = *s_->elements;
    if (!detail::checked_pow(ss.size(), xs.size(), cap * 4)) return std::nullopt;
    std::vector<Val> out;
    for (const auto& coefs : detail::all_tuples(ss, xs.size())) {
      std::vector<Val::Entry> es;
      for (std::size_t i = 0; i < xs.size(); ++i) es.emplace_back(xs[i], coefs[i]);
      Val v = make_bag(std::move(es), *s_);
      if (!affine_ || valid(v)) out.push_back(v);
    }
    if (out.size() > cap) return std::nullopt;
    std::sort(out.begin(), out.end());
    return out;
  }

  Val sample(const Carrier& x, Rng& rng, const Sampling& cfg) const override {
    if (x.empty()) {
      if (affine_) throw Refusal(name_ + " of the empty set is empty");
      return Val::bag({});
    }
    int lo = affine_ ? 1 : 0;
    int k = std::uniform_int_distribution<int>(lo, std::max(lo, cfg.support))(rng);
    auto xs = detail::draw_support(x, k, rng);
    std::vector<Val::Entry> es;
    if (!affine_) {
      for (const auto& v : xs) es.emplace_back(v, s_->sample(rng));
      return make_bag(std::move(es), *s_);
    }
    if (s_->name == "qnonneg") {
      std::vector<Rational> w;
      Rational total(0);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        Rational r(0);
        for (int tries = 0; r.is_zero(); ++tries) {
          if (tries == 256) throw UsageError(name_ + ": the coefficient pool yields no positive weight");
          r = s_->sample(rng).as_num();
        }
        w.push_back(r);
        total += r;
      }
      for (std::size_t i = 0; i < xs.size(); ++i) es.emplace_back(xs[i], Val::num(w[i] / total));
      return make_bag(std::move(es), *s_);
    }
    if (s_->name == "bool") {
      for (const auto& v : xs) es.emplace_back(v, s_->one);
      return make_bag(std::move(es), *s_);
    }
    if (s_->name == "int") {
      Rational total(0);
      for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        Val c = s_->sample(rng);
        total += c.as_num();
        es.emplace_back(xs[i], c);
      }
      es.emplace_back(xs.back(), Val::num(Rational(1) - total));
      return make_bag(std::move(es), *s_);
    }
    return unit(xs.front());
  }

  bool valid(const Val& t) const override {
    if (!t.is_bag()) return false;
    Val total = s_->zero;
    for (std::size_t i = 0; i < t.entries().size(); ++i) {
      const auto& [x, c] = t.entries()[i];
      if (s_->is_zero(c)) return false;
      if (i > 0 && !(t.entries()[i - 1].first < x)) return false;
      total = s_->add(total, c);
    }
    return !affine_ || total == s_->one;
  }

 private:
  SemiringPtr s_;
  bool affine_;
  std::string name_;
};

// ----------------------------------------------------------------- others

/// E^C: C + X with exceptions in0[c] for c < k and values in1[x].
class ExceptionMonad : public Monad {
 public:
  explicit ExceptionMonad(int k) : k_(k) {}
  std::string name() const override { return k_ == 1 ? "maybe" : "exception:" + std::to_string(k_); }
  int exceptions() const { return k_; }
  static Val raise(int c) { return Val::inj(0, Val::atom(c)); }

  Val unit(const Val& x) const override { return Val::inj(1, x); }
  Val map(const Fn& f, const Val& t) const override { return t.tag() == 0 ? t : Val::inj(1, f(t.payload())); }
  Val join(const Val& tt) const override { return tt.tag() == 0 ? tt : tt.payload(); }
  std::optional<std::vector<Val>> enumerate(const Carrier& x, std::size_t cap) const override {
    if (!x.elems || x.elems->size() + k_ > cap) return std::nullopt;
    std::vector<Val> out;
    for (int c = 0; c < k_; ++c) out.push_back(raise(c));
    for (const auto& v : *x.elems) out.push_back(unit(v));
    return out;
  }
  Val sample(const Carrier& x, Rng& rng, const Sampling&) const override {
    bool exc = k_ > 0 && (x.empty() || std::uniform_int_distribution<int>(0, 2)(rng) == 0);
    if (exc) return raise(std::uniform_int_distribution<int>(0, k_ - 1)(rng));
    return unit(x.sample(rng));
  }
  bool valid(const Val& t) const override {
    return t.is_inj() && (t.tag() == 1 || (t.tag() == 0 && t.payload().as_atom() < k_));
  }

 private:
  int k_;
};

/// R^C: functions C -> X stored as k-tuples; join takes the diagonal.
class ReaderMonad : public Monad {
 public:
  explicit ReaderMonad(int k) : k_(k) {}
  std::string name() const override { return "reader:" + std::to_string(k_); }
  Val unit(const Val& x) const override { return Val::tuple(std::vector<Val>(k_, x)); }
  Val map(const Fn& f, const Val& t) const override {
    std::vector<Val> out;
    for (const auto& v : t.items()) out.push_back(f(v));
    return Val::tuple(std::move(out));
  }
  Val join(const Val& tt) const override {
    std::vector<Val> out;
    for (int c = 0; c < k_; ++c) out.push_back(tt[c][c]);
    return Val::tuple(std::move(out));
  }
  std::optional<std::vector<Val>> enumerate(const Carrier& x, std::size_t cap) const override {
    if (!x.elems || !detail::checked_pow(x.elems->size(), k_, cap)) return std::nullopt;
    std::vector<Val> out;
    for (auto& t : detail::all_tuples(*x.elems, k_)) out.push_back(Val::tuple(std::move(t)));
    return out;
  }
  Val sample(const Carrier& x, Rng& rng, const Sampling&) const override {
    std::vector<Val> out;
    for (int c = 0; c < k_; ++c) out.push_back(x.sample(rng));
    return Val::tuple(std::move(out));
  }
  bool valid(const Val& t) const override { return t.is_tuple() && static_cast<int>(t.size()) == k_; }

 private:
  int k_;
};

/// W^M: pairs (m, x); join multiplies the logs left to right.
class WriterMonad : public Monad {
 public:
  explicit WriterMonad(MonoidPtr m) : m_(std::move(m)) {}
  std::string name() const override { return "writer:" + m_->name; }
  const Monoid& monoid() const { return *m_; }
  Val unit(const Val& x) const override { return Val::tuple({m_->unit, x}); }
  Val map(const Fn& f, const Val& t) const override { return Val::tuple({t[0], f(t[1])}); }
  Val join(const Val& tt) const override { return Val::tuple({m_->op(tt[0], tt[1][0]), tt[1][1]}); }
  std::optional<std::vector<Val>> enumerate(const Carrier& x, std::size_t cap) const override {
    if (!x.elems || !m_->elements || m_->elements->size() * x.elems->size() > cap) return std::nullopt;
    std::vector<Val> out;
    for (const auto& m : *m_->elements)
      for (const auto& v : *x.elems) out.push_back(Val::tuple({m, v}));
    return out;
  }
  Val sample(const Carrier& x, Rng& rng, const Sampling&) const override {
    return Val::tuple({m_->sample(rng), x.sample(rng)});
  }
  bool valid(const Val& t) const override { return t.is_tuple() && t.size() == 2; }

 private:
  MonoidPtr m_;
};

/// Finite lists; join concatenates.
class ListMonad : public Monad {
 public:
  std::string name() const override { return "list"; }
  Val unit(const Val& x) const override { return Val::tuple({x}); }
  Val map(const Fn& f, const Val& t) const override {
    std::vector<Val> out;
    for (const auto& v : t.items()) out.push_back(f(v));
    return Val::tuple(std::move(out));
  }
  Val join(const Val& tt) const override {
    std::vector<Val> out;
    for (const auto& l : tt.items()) out.insert(out.end(), l.items().begin(), l.items().end());
    return Val::tuple(std::move(out));
  }
  std::optional<std::vector<Val>> enumerate(const Carrier& x, std::size_t) const override {
    if (x.empty()) return std::vector<Val>{Val::tuple({})};
    return std::nullopt;
  }
  Val sample(const Carrier& x, Rng& rng, const Sampling& cfg) const override {
    int len = x.empty() ? 0 : std::uniform_int_distribution<int>(0, cfg.support)(rng);
    std::vector<Val> out;
    for (int i = 0; i < len; ++i) out.push_back(x.sample(rng));
    return Val::tuple(std::move(out));
  }
};

/// Indexed valuations as a stand-alone monad: finite multisets of pairs
/// (positive rational weight, value).
class IndexedValuationMonad : public Monad {
 public:
  std::string name() const override { return "iv"; }
  Val unit(const Val& x) const override { return Val::bag({{Val::tuple({Val::num(1), x}), Val::num(1)}}); }
  Val map(const Fn& f, const Val& t) const override {
    std::vector<Val::Entry> es;
    for (const auto& [rx, n] : t.entries()) es.emplace_back(Val::tuple({rx[0], f(rx[1])}), n);
    return make_bag(std::move(es), add_, Val::num(0));
  }
  Val join(const Val& tt) const override {
    std::vector<Val::Entry> es;
    for (const auto& [rv, n] : tt.entries())
      for (const auto& [sx, m] : rv[1].entries())
        es.emplace_back(Val::tuple({Val::num(rv[0].as_num() * sx[0].as_num()), sx[1]}),
                        Val::num(n.as_num() * m.as_num()));
    return make_bag(std::move(es), add_, Val::num(0));
  }
  std::optional<std::vector<Val>> enumerate(const Carrier& x, std::size_t) const override {
    if (x.empty()) return std::vector<Val>{Val::bag({})};
    return std::nullopt;
  }
  Val sample(const Carrier& x, Rng& rng, const Sampling& cfg) const override {
    if (x.empty()) return Val::bag({});
    int k = std::uniform_int_distribution<int>(0, cfg.support)(rng);
    std::vector<Rational> pos;
    for (const auto& r : cfg.pool)
      if (r > Rational(0)) pos.push_back(r);
    std::vector<Val::Entry> es;
    for (int i = 0; i < k; ++i) {
      Rational r = pos[std::uniform_int_distribution<std::size_t>(0, pos.size() - 1)(rng)];
      es.emplace_back(Val::tuple({Val::num(r), x.sample(rng)}), Val::num(1));
    }
    return make_bag(std::move(es), add_, Val::num(0));
  }
  bool valid(const Val& t) const override {
    for (const auto& [rx, n] : t.entries())
      if (!(rx[0].as_num() > Rational(0)) || !(n.as_num() > Rational(0))) return false;
    return true;
  }

 private:
  BinOp add_ = [](const Val& a, const Val& b) { return Val::num(a.as_num() + b.as_num()); };
};

// ------------------------------------------------------------------- zoo

inline MonadPtr multiset_monad(SemiringPtr s, std::string name = "") {
  if (name.empty()) name = "multiset:" + s->name;
  return std::make_shared<MultisetMonad>(std::move(s), false, std::move(name));
}
inline MonadPtr affine_monad(SemiringPtr s, std::string name = "") {
  if (name.empty()) name = "affine:" + s->name;
  return std::make_shared<MultisetMonad>(std::move(s), true, std::move(name));
}
inline MonadPtr pfin_monad() { return multiset_monad(bool_semiring(), "pfin"); }
inline MonadPtr pfin_plus_monad() { return affine_monad(bool_semiring(), "pfin+"); }
inline MonadPtr dist_monad(const std::vector<Rational>& pool = default_pool()) {
  // sampling normalizes positive weights drawn from the pool
  if (std::none_of(pool.begin(), pool.end(), [](const Rational& r) { return r > Rational(0); }))
    throw UsageError("coefficient pool has no positive entries");
  return affine_monad(qnonneg_semiring(pool), "dist");
}
inline MonadPtr valuation_monad(const std::vector<Rational>& pool = default_pool()) {
  return multiset_monad(qnonneg_semiring(pool), "valuation");
}
inline MonadPtr exception_monad(int k) { return std::make_shared<ExceptionMonad>(k); }
inline MonadPtr reader_monad(int k) { return std::make_shared<ReaderMonad>(k); }
inline MonadPtr writer_monad(MonoidPtr m) { return std::make_shared<WriterMonad>(std::move(m)); }
inline MonadPtr list_monad() { return std::make_shared<ListMonad>(); }
inline MonadPtr iv_monad() { return std::make_shared<IndexedValuationMonad>(); }

/// Builtin monads by configuration name.
inline MonadPtr builtin_monad(const std::string& name, const std::vector<Rational>& pool = default_pool()) {
  auto suffix_int = [&](const std::string& prefix) -> std::optional<int> {
    if (name.rfind(prefix, 0) != 0) return std::nullopt;
    try {
      std::size_t used = 0;
      int k = std::stoi(name.substr(prefix.size()), &used);
      if (used == name.size() - prefix.size() && k >= 0) return k;
    } catch (const std::logic_error&) {
    }
    throw UsageError("malformed monad parameter in '" + name + "'");
  };
  if (name == "pfin") return pfin_monad();
  if (name == "pfin+") return pfin_plus_monad();
  if (name == "dist") return dist_monad(pool);
  if (name == "valuation") return valuation_monad(pool);
  if (name == "list") return list_monad();
  if (name == "iv") return iv_monad();
  if (name == "maybe") return exception_monad(1);
  if (name.rfind("multiset:", 0) == 0) return multiset_monad(semiring_by_name(name.substr(9), pool));
  if (name.rfind("affine:", 0) == 0) return affine_monad(semiring_by_name(name.substr(7), pool));
  if (name.rfind("writer:", 0) == 0) return writer_monad(monoid_by_name(name.substr(7), pool));
  if (auto k = suffix_int("exception:")) return exception_monad(*k);
  if (auto k = suffix_int("reader:")) return reader_monad(*k);
  throw UsageError("unknown monad '" + name + "'");
}

/// The zoo exercised by the law and commutativity suites.
inline std::vector<std::string> zoo_names() {
  return {"pfin",           "pfin+",          "dist",          "valuation",        "multiset:nat",
          "multiset:int",   "affine:int",     "exception:0",   "exception:1",      "exception:2",
          "reader:1",       "reader:2",       "reader:3",      "writer:z2mult",    "writer:z3add",
          "writer:bool-or", "writer:leftzero", "writer:trans2", "list",             "iv"};
}

// --------------------------------------------- strength and monoidal maps

inline Val pair(const Val& a, const Val& b) { return Val::tuple({a, b}); }

/// Left strength: (x, e) |-> T(y |-> (x, y))(e).
inline Val tau(const Monad& t, const Val& x, const Val& e) {
  return t.map([&](const Val& y) { return pair(x, y); }, e);
}
/// Right strength: (a, y) |-> T(x |-> (x, y))(a).
inline Val tau_r(const Monad& t, const Val& a, const Val& y) {
  return t.map([&](const Val& x) { return pair(x, y); }, a);
}

/// The canonical monoidal map TX x TY -> T(X x Y); the left argument's effect
/// happens first.
inline Val psi(const Monad& t, const Val& a, const Val& b) {
  return t.bind(a, [&](const Val& x) { return tau(t, x, b); });
}
/// The other canonical choice: the right argument's effect happens first.
inline Val psi_prime(const Monad& t, const Val& a, const Val& b) {
  return t.bind(b, [&](const Val& y) { return tau_r(t, a, y); });
}

/// n-fold monoidal map (TX)^n -> T(X^n) where X^n elements are n-tuples.
/// n = 0 gives the unit at the empty tuple; n >= 2 folds psi from the right.
inline Val psi_n(const Monad& t, const std::vector<Val>& ts, bool prime = false) {
  if (ts.empty()) return t.unit(Val::tuple({}));
  Val acc = t.map([](const Val& x) { return Val::tuple({x}); }, ts.back());
  for (std::size_t i = ts.size() - 1; i-- > 0;) {
    Val p = prime ? psi_prime(t, ts[i], acc) : psi(t, ts[i], acc);
    acc = t.map(
        [](const Val& xr) {
          std::vector<Val> out{xr[0]};
          const auto& rest = xr[1].items();
          out.insert(out.end(), rest.begin(), rest.end());
          return Val::tuple(std::move(out));
        },
        p);
  }
  return acc;
}

/// x-vector reindexed along alpha: (x . alpha)_i = x_{alpha(i)}.
inline std::vector<Val> reindex(const std::vector<Val>& xs, const FinFn& alpha) {
  std::vector<Val> out;
  out.reserve(alpha.dom);
  for (int i = 0; i < alpha.dom; ++i) out.push_back(xs.at(alpha.table[i]));
  return out;
}
inline Val reindex_tuple(const Val& xs, const FinFn& alpha) { return Val::tuple(reindex(xs.items(), alpha)); }

// ------------------------------------------------------------- law suite

namespace detail {

/// Runs f on every element of c (explicit), or on samples until cfg.samples
/// of them ran without a refusal (at most 4 * cfg.samples draws).
template <class F>
void over(const Carrier& c, const Sampling& cfg, Rng& rng, Report& rep, F&& f) {
  auto guarded = [&](const Val& v) {
    try {
      f(v);
      return true;
    } catch (const Refusal&) {
      ++rep.untested;
      return false;
    }
  };
  if (c.elems) {
    for (const auto& v : *c.elems) guarded(v);
  } else {
    rep.sampled = true;
    std::size_t done = 0;
    for (std::size_t i = 0; i < 4 * cfg.samples && done < cfg.samples; ++i) {
      Val v;
      try {
        v = c.sample(rng);
      } catch (const Refusal&) {
        ++rep.untested;
        continue;
      }
      if (guarded(v)) ++done;
    }
  }
}

inline std::size_t tuple_budget() { return 4096; }

/// Calls f on every tuple in prod_i cs[i] when all are explicit and the
/// product is small, otherwise on cfg.samples random tuples. Returns true if
/// the run was exhaustive.
template <class F>
bool over_tuples(const std::vector<Carrier>& cs, const Sampling& cfg, Rng& rng, F&& f,
                 std::size_t budget = tuple_budget()) {
  bool exhaustive = true;
  std::size_t total = 1;
  for (const auto& c : cs) {
    if (!c.elems) {
      exhaustive = false;
      break;
    }
    if (c.elems->empty()) return true;  // nothing to check
    if (total > budget / c.elems->size()) {
      exhaustive = false;
      break;
    }
    total *= c.elems->size();
  }
  if (exhaustive) {
    std::vector<std::size_t> idx(cs.size(), 0);
    while (true) {
      std::vector<Val> t;
      for (std::size_t i = 0; i < cs.size(); ++i) t.push_back((*cs[i].elems)[idx[i]]);
      f(t);
      std::size_t i = cs.size();
      while (i > 0 && idx[i - 1] + 1 == cs[i - 1].elems->size()) idx[--i] = 0;
      if (i == 0) break;
      ++idx[i - 1];
    }
    return true;
  }
  for (const auto& c : cs)
    if (c.empty()) return true;
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    std::vector<Val> t;
    for (const auto& c : cs) t.push_back(c.sample(rng));
    f(t);
  }
  return false;
}

inline nlohmann::json vals_json(const std::vector<Val>& vs) {
  auto a = nlohmann::json::array();
  for (const auto& v : vs) a.push_back(v.str());
  return a;
}

inline void compare(Report& r, const Val& lhs, const Val& rhs, const std::string& law, nlohmann::json ctx) {
  ++r.checked;
  if (lhs != rhs) {
    ctx["law"] = law;
    ctx["lhs"] = lhs.str();
    ctx["rhs"] = rhs.str();
    r.fail(std::move(ctx));
  }
}

}  // namespace detail

/// Unit, associativity and functoriality laws of t on carrier x; also checks
/// that every produced element satisfies the representation invariant.
inline Report check_monad_laws(const MonadPtr& t, const Carrier& x, const Sampling& cfg) {
  Report r;
  r.check = "monad-laws";
  r.subject = t->name() + " on " + x.name;
  r.property = "monad.unit-and-associativity";
  r.seed = cfg.seed;
  Rng rng(cfg.seed);
  Carrier tx = apply(t, x, cfg);
  Carrier ttx = apply(t, tx, cfg);
  Carrier tttx = apply(t, ttx, cfg);
  auto check_valid = [&](const Val& v, const char* where) {
    if (!t->valid(v)) r.fail({{"law", "representation invariant"}, {"where", where}, {"value", v.str()}});
  };
  detail::over(tx, cfg, rng, r, [&](const Val& e) {
    check_valid(e, "input");
    detail::compare(r, t->join(t->unit(e)), e, "left unit", {{"t", e.str()}});
    Val ru = t->join(t->map([&](const Val& v) { return t->unit(v); }, e));
    detail::compare(r, ru, e, "right unit", {{"t", e.str()}});
    detail::compare(r, t->map([](const Val& v) { return v; }, e), e, "map identity", {{"t", e.str()}});
    if (x.elems && !x.elems->empty()) {
      // functoriality against a pseudo-random endofunction of X
      const auto& xs = *x.elems;
      std::vector<Val> f1(xs.size()), f2(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) {
        f1[i] = detail::pick(xs, rng);
        f2[i] = detail::pick(xs, rng);
      }
      auto look = [&](const std::vector<Val>& tab) {
        return [&xs, &tab](const Val& v) {
          auto it = std::find(xs.begin(), xs.end(), v);
          return tab[static_cast<std::size_t>(it - xs.begin())];
        };
      };
      Val lhs = t->map(look(f2), t->map(look(f1), e));
      Val rhs = t->map([&](const Val& v) { return look(f2)(look(f1)(v)); }, e);
      detail::compare(r, lhs, rhs, "map composition", {{"t", e.str()}});
    }
  });
  detail::over(tttx, cfg, rng, r, [&](const Val& e) {
    Val lhs = t->join(t->map([&](const Val& v) { return t->join(v); }, e));
    Val rhs = t->join(t->join(e));
    check_valid(lhs, "associativity output");
    detail::compare(r, lhs, rhs, "associativity", {{"t", e.str()}});
  });
  if (x.elems)
    for (const auto& v : *x.elems) check_valid(t->unit(v), "unit");
  return r;
}

}  // namespace monadlab
