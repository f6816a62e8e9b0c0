#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "algebra.hpp"
#include "errors.hpp"
#include "finord.hpp"
#include "monads.hpp"
#include "operad.hpp"
#include "quotient.hpp"
#include "val.hpp"
#include "wcomm.hpp"

namespace monadlab {

namespace detail {

/// Tuple-valued elements permuted positionwise: sorting each block is least.
inline Val sort_blocks(const Val& p, const std::vector<std::pair<int, int>>& blocks) {
  auto items = p.items();
  for (auto [lo, hi] : blocks) std::sort(items.begin() + lo, items.begin() + hi);
  return Val::tuple(std::move(items));
}

inline std::vector<Val> concat_scaled(const Monoid& m, const Val& q, const std::vector<Val>& ps) {
  std::vector<Val> out;
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (const auto& x : ps[i].items()) out.push_back(m.op(q[i], x));
  return out;
}

/// All tuples of length n over xs as Vals, or nullopt past cap.
inline std::optional<std::vector<Val>> tuple_vals(const std::vector<Val>& xs, int n, std::size_t cap) {
  if (!checked_pow(xs.size(), static_cast<std::size_t>(n), cap)) return std::nullopt;
  std::vector<Val> out;
  for (auto& t : all_tuples(xs, static_cast<std::size_t>(n))) out.push_back(Val::tuple(std::move(t)));
  return out;
}

inline Val sample_tuple(int n, Rng& rng, const Sampler& s) {
  std::vector<Val> xs;
  for (int i = 0; i < n; ++i) xs.push_back(s(rng));
  return Val::tuple(std::move(xs));
}

}  // namespace detail

/// The terminal W-operad: one element in each arity. The positive variant has
/// O_0 empty; over Fsurj it presents nonempty finite sets.
class TerminalOperad : public Operad {
 public:
  TerminalOperad(VerbalCat w, bool positive) : w_(w), positive_(positive) {}
  std::string name() const override { return (positive_ ? "terminal+:" : "terminal:") + w_.name(); }
  VerbalCat w() const override { return w_; }
  std::optional<std::vector<Val>> elems(int n, std::size_t) const override {
    if (positive_ && n == 0) return std::vector<Val>{};
    return std::vector<Val>{unit_val()};
  }
  Val act(const FinFn&, const Val&) const override { return unit_val(); }
  std::optional<Val> least_in_blocks(const Val& p, const std::vector<std::pair<int, int>>&) const override {
    return p;
  }
  Val ido() const override { return unit_val(); }
  Val subst(const Val&, const std::vector<Val>&, const std::vector<int>&) const override { return unit_val(); }
  std::optional<int> reduced_arity(int k) const override {
    if (!positive_ && drops()) return 0;
    return Operad::reduced_arity(k);
  }
  std::optional<std::pair<Val, std::vector<Val>>> normal_form(const Val&, const std::vector<Val>&) const override {
    if (!positive_ && drops()) return std::pair{unit_val(), std::vector<Val>{}};
    return std::nullopt;
  }

 private:
  bool drops() const {
    return w_.kind == VerbalCat::Kind::Fminj || w_.kind == VerbalCat::Kind::Finj || w_.kind == VerbalCat::Kind::F;
  }
  VerbalCat w_;
  bool positive_;
};

/// Over Fid: O_0 = C (k atoms), O_1 = {ido}.
class ExceptionOperad : public Operad {
 public:
  explicit ExceptionOperad(int k) : k_(k) {}
  std::string name() const override { return "exception:" + std::to_string(k_); }
  VerbalCat w() const override { return VerbalCat::Fid(); }
  std::optional<int> top_arity() const override { return 1; }
  std::optional<std::vector<Val>> elems(int n, std::size_t) const override {
    std::vector<Val> out;
    if (n == 0)
      for (int c = 0; c < k_; ++c) out.push_back(Val::atom(c));
    if (n == 1) out.push_back(unit_val());
    return out;
  }
  Val act(const FinFn&, const Val& p) const override { return p; }
  Val ido() const override { return unit_val(); }
  Val subst(const Val& q, const std::vector<Val>& ps, const std::vector<int>&) const override {
    return ps.empty() ? q : ps[0];
  }

 private:
  int k_;
};

/// Over Fid: O_1 = M, nothing else.
class WriterOperad : public Operad {
 public:
  explicit WriterOperad(MonoidPtr m) : m_(std::move(m)) {}
  std::string name() const override { return "writer:" + m_->name; }
  VerbalCat w() const override { return VerbalCat::Fid(); }
  std::optional<int> top_arity() const override { return 1; }
  std::optional<std::vector<Val>> elems(int n, std::size_t) const override {
    if (n != 1) return std::vector<Val>{};
    return m_->elements;
  }
  Val sample(int n, Rng& rng, const Sampling& cfg) const override {
    if (n != 1) throw Refusal(name() + ": O_" + std::to_string(n) + " is empty");
    if (m_->elements) return Operad::sample(n, rng, cfg);
    return m_->sample(rng);
  }
  Val act(const FinFn&, const Val& p) const override { return p; }
  Val ido() const override { return m_->unit; }
  Val subst(const Val& q, const std::vector<Val>& ps, const std::vector<int>&) const override {
    return m_->op(q, ps.at(0));
  }

 private:
  MonoidPtr m_;
};

/// Over Fbij: O_n = M^n, permuted by the action, substitution multiplies
/// componentwise.
class MonoidActionOperad : public Operad {
 public:
  explicit MonoidActionOperad(MonoidPtr m) : m_(std::move(m)) {}
  std::string name() const override { return "monoid-action:" + m_->name; }
  VerbalCat w() const override { return VerbalCat::Fbij(); }
  std::optional<std::vector<Val>> elems(int n, std::size_t cap) const override {
    if (!m_->elements) return std::nullopt;
    return detail::tuple_vals(*m_->elements, n, cap);
  }
  Val sample(int n, Rng& rng, const Sampling&) const override { return detail::sample_tuple(n, rng, m_->sample); }
  Val act(const FinFn& s, const Val& p) const override {
    std::vector<Val> out(s.cod);
    for (int i = 0; i < s.dom; ++i) out[s(i)] = p[i];
    return Val::tuple(std::move(out));
  }
  Val ido() const override { return Val::tuple({m_->unit}); }
  Val subst(const Val& q, const std::vector<Val>& ps, const std::vector<int>&) const override {
    return Val::tuple(detail::concat_scaled(*m_, q, ps));
  }
  std::optional<std::vector<Val>> preimages(const FinFn& s, const Val& p) const override {
    return std::vector<Val>{act(s.inverse(), p)};
  }
  std::optional<Val> least_in_blocks(const Val& p, const std::vector<std::pair<int, int>>& blocks) const override {
    return detail::sort_blocks(p, blocks);
  }

 private:
  MonoidPtr m_;
};

/// Over Finj: O_n = P^n for a monoid with zero; injections pad with 0.
/// With broken = true the padding uses 1, which is still a functor but
/// violates the compatibility axiom.
class Monoid0ActionOperad : public Operad {
 public:
  Monoid0ActionOperad(MonoidPtr p, bool broken) : p_(std::move(p)), broken_(broken) {
    if (!p_->zero) throw UsageError("monoid0-action needs a monoid with zero, got " + p_->name);
  }
  std::string name() const override { return (broken_ ? "monoid0-action-broken:" : "monoid0-action:") + p_->name; }
  VerbalCat w() const override { return VerbalCat::Finj(); }
  std::optional<Val> least_in_blocks(const Val& p, const std::vector<std::pair<int, int>>& blocks) const override {
    return detail::sort_blocks(p, blocks);
  }
  std::optional<std::vector<Val>> elems(int n, std::size_t cap) const override {
    if (!p_->elements) return std::nullopt;
    return detail::tuple_vals(*p_->elements, n, cap);
  }
  Val sample(int n, Rng& rng, const Sampling&) const override {
    std::uniform_int_distribution<int> coin(0, 3);
    return detail::sample_tuple(n, rng, [&](Rng& r) { return coin(r) == 0 ? pad() : p_->sample(r); });
  }
  Val act(const FinFn& a, const Val& p) const override {
    std::vector<Val> out(a.cod, pad());
    for (int i = 0; i < a.dom; ++i) out[a(i)] = p[i];
    return Val::tuple(std::move(out));
  }
  Val ido() const override { return Val::tuple({p_->unit}); }
  Val subst(const Val& q, const std::vector<Val>& ps, const std::vector<int>&) const override {
    return Val::tuple(detail::concat_scaled(*p_, q, ps));
  }
  std::optional<std::vector<Val>> preimages(const FinFn& a, const Val& p) const override {
    std::vector<char> hit(a.cod, 0);
    std::vector<Val> q;
    for (int i = 0; i < a.dom; ++i) {
      hit[a(i)] = 1;
      q.push_back(p[a(i)]);
    }
    for (int j = 0; j < a.cod; ++j)
      if (!hit[j] && p[j] != pad()) return std::vector<Val>{};
    return std::vector<Val>{Val::tuple(std::move(q))};
  }
  std::optional<std::pair<Val, std::vector<Val>>> normal_form(const Val& p, const std::vector<Val>& xs) const override {
    if (broken_) return std::nullopt;
    return canon_by_descent(*this, p, xs, true);
  }

 private:
  Val pad() const { return broken_ ? p_->unit : *p_->zero; }
  MonoidPtr p_;
  bool broken_;
};

/// Over Fsurj: O_n = full-support probability distributions on n, acted on
/// by pushforward. Weights are exact rationals; the pool only seeds samples.
class DistributionOperad : public Operad {
 public:
  explicit DistributionOperad(std::vector<Rational> pool) {
    for (const auto& r : pool)
      if (r > Rational(0)) pos_.push_back(r);
    if (pos_.empty()) throw UsageError("distribution operad needs a positive pool entry");
  }
  std::string name() const override { return "distribution"; }
  VerbalCat w() const override { return VerbalCat::Fsurj(); }
  std::optional<std::vector<Val>> elems(int n, std::size_t) const override {
    if (n == 0) return std::vector<Val>{};
    if (n == 1) return std::vector<Val>{Val::tuple({Val::num(1)})};
    return std::nullopt;
  }
  Val sample(int n, Rng& rng, const Sampling&) const override {
    if (n == 0) throw Refusal("distribution: O_0 is empty");
    std::vector<Rational> w;
    Rational total(0);
    for (int i = 0; i < n; ++i) {
      w.push_back(pos_[std::uniform_int_distribution<std::size_t>(0, pos_.size() - 1)(rng)]);
      total += w.back();
    }
    std::vector<Val> out;
    for (const auto& r : w) out.push_back(Val::num(r / total));
    return Val::tuple(std::move(out));
  }
  Val act(const FinFn& b, const Val& p) const override {
    std::vector<Rational> out(b.cod, Rational(0));
    for (int i = 0; i < b.dom; ++i) out[b(i)] += p[i].as_num();
    std::vector<Val> vs;
    for (const auto& r : out) vs.push_back(Val::num(r));
    return Val::tuple(std::move(vs));
  }
  Val ido() const override { return Val::tuple({Val::num(1)}); }
  Val subst(const Val& q, const std::vector<Val>& ps, const std::vector<int>&) const override {
    std::vector<Val> out;
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (const auto& x : ps[i].items()) out.push_back(Val::num(q[i].as_num() * x.as_num()));
    return Val::tuple(std::move(out));
  }
  std::optional<std::vector<Val>> preimages(const FinFn& b, const Val& p) const override {
    if (b.is_bijective()) {
      std::vector<Val> q;
      for (int i = 0; i < b.dom; ++i) q.push_back(p[b(i)]);
      return std::vector<Val>{Val::tuple(std::move(q))};
    }
    return std::nullopt;  // splitting a weight has infinitely many answers
  }

 private:
  std::vector<Rational> pos_;
};

/// Over Finj (or Fminj): O_0 empty, O_1 = M, a single element above. It
/// induces the same monad for every M.
class NonuniquenessOperad : public Operad {
 public:
  NonuniquenessOperad(MonoidPtr m, VerbalCat w) : m_(std::move(m)), w_(w) {}
  std::string name() const override { return "nonuniqueness:" + m_->name; }
  VerbalCat w() const override { return w_; }
  std::optional<std::vector<Val>> elems(int n, std::size_t) const override {
    if (n == 0) return std::vector<Val>{};
    if (n == 1) return m_->elements;
    return std::vector<Val>{unit_val()};
  }
  Val sample(int n, Rng& rng, const Sampling& cfg) const override {
    if (n == 1 && !m_->elements) return m_->sample(rng);
    return Operad::sample(n, rng, cfg);
  }
  Val act(const FinFn& a, const Val& p) const override { return a.cod == 1 ? p : unit_val(); }
  Val ido() const override { return m_->unit; }
  Val subst(const Val& q, const std::vector<Val>& ps, const std::vector<int>& ms) const override {
    if (ps.size() == 1 && ms[0] == 1) return m_->op(q, ps[0]);
    return unit_val();
  }
  std::optional<int> reduced_arity(int k) const override { return k == 0 ? 0 : 1; }

 private:
  MonoidPtr m_;
  VerbalCat w_;
};

/// O_n = W-morphisms n' -> n with n' <= inner_bound; substitution is the
/// verbal substitution.
class MonoidOperad : public Operad {
 public:
  MonoidOperad(VerbalCat w, int inner_bound) : w_(w), inner_(inner_bound) {}
  std::string name() const override { return "monoid:" + w_.name(); }
  VerbalCat w() const override { return w_; }
  int max_arity() const override { return inner_; }
  std::optional<std::vector<Val>> elems(int n, std::size_t cap) const override {
    std::vector<Val> out;
    for (int np = 0; np <= inner_; ++np)
      for (const auto& a : w_.enumerate(np, n, std::max(np, n))) {
        out.push_back(a.to_val());
        if (out.size() > cap) return std::nullopt;
      }
    std::sort(out.begin(), out.end());
    return out;
  }
  Val act(const FinFn& g, const Val& p) const override { return compose(g, FinFn::from_val(p, g.dom)).to_val(); }
  Val ido() const override { return FinFn::id(1).to_val(); }
  Val subst(const Val& q, const std::vector<Val>& ps, const std::vector<int>& ms) const override {
    FinFn beta = FinFn::from_val(q, static_cast<int>(ps.size()));
    std::vector<FinFn> alphas;
    for (std::size_t i = 0; i < ps.size(); ++i) alphas.push_back(FinFn::from_val(ps[i], ms[i]));
    FinFn r = star(beta, alphas);
    if (r.dom > inner_)
      throw Refusal("monoid operad: " + beta.str() + " * (...) has domain " + std::to_string(r.dom) +
                    " beyond the inner bound " + std::to_string(inner_));
    return r.to_val();
  }

 private:
  VerbalCat w_;
  int inner_;
};

/// Left Kan extension of a W-operad along W in W'. Elements are canonical
/// pairs (p, alpha) stored as (p, alpha.table).
class ExtendedOperad : public Operad {
 public:
  ExtendedOperad(OperadPtr base, VerbalCat w2, int inner_bound)
      : base_(std::move(base)), w2_(w2), inner_(inner_bound) {
    if (!base_->w().included_in(w2_, 4))
      throw UsageError("cannot extend " + base_->name() + " to " + w2_.name() + ": not a subcategory");
  }
  std::string name() const override { return "extend:" + base_->name() + ":" + w2_.name(); }
  VerbalCat w() const override { return w2_; }
  int max_arity() const override { return inner_; }
  const OperadPtr& base() const { return base_; }

  /// Canonical form of [p, alpha].
  Val canon(const Val& p, const FinFn& alpha) const {
    Val key = Val::tuple({p, alpha.to_val(), Val::atom(alpha.cod)});
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const int cod = alpha.cod;
    CanonOptions opt;
    opt.bound = inner_;
    opt.carrier = Carrier::atoms(cod);
    VerbalCat w2 = w2_;
    opt.admissible = [w2, cod](const std::vector<Val>& xs) {
      std::vector<int> t;
      for (const auto& x : xs) t.push_back(static_cast<int>(x.as_atom()));
      return w2.member(FinFn(static_cast<int>(t.size()), cod, std::move(t)));
    };
    std::vector<Val> xs = alpha.to_val().items();
    auto r = canonicalize(*base_, p, xs, opt);
    Val out = Val::tuple({r.p, Val::tuple(r.xs)});
    cache_.emplace(key, out);
    return out;
  }
  Val canon(const Val& pa, int cod) const { return canon(pa[0], FinFn::from_val(pa[1], cod)); }

  std::optional<std::vector<Val>> elems(int n2, std::size_t cap) const override {
    if (n2 > inner_) return std::nullopt;
    std::vector<Val> out;
    for (int n = 0; n <= inner_; ++n) {
      auto ps = base_->elems(n, cap);
      if (!ps) return std::nullopt;
      if (ps->empty()) continue;
      for (const auto& a : w2_.enumerate(n, n2, std::max(n, n2)))
        for (const auto& p : *ps) out.push_back(canon(p, a));
      if (out.size() > cap * 8) return std::nullopt;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.size() > cap) return std::nullopt;
    return out;
  }
  Val sample(int n2, Rng& rng, const Sampling& cfg) const override {
    if (n2 > inner_) throw Refusal(name() + ": arity " + std::to_string(n2) + " beyond " + std::to_string(inner_));
    for (int attempt = 0; attempt < 64; ++attempt) {
      int n = std::uniform_int_distribution<int>(0, inner_)(rng);
      auto as = w2_.enumerate(n, n2, std::max(n, n2));
      if (as.empty()) continue;
      try {
        Val p = base_->sample(n, rng, cfg);
        return canon(p, as[std::uniform_int_distribution<std::size_t>(0, as.size() - 1)(rng)]);
      } catch (const Refusal&) {
      }
    }
    throw Refusal(name() + ": found no element of arity " + std::to_string(n2));
  }
  Val act(const FinFn& g, const Val& pa) const override {
    if (g.cod > inner_) throw Refusal(name() + ": arity " + std::to_string(g.cod) + " beyond " + std::to_string(inner_));
    return canon(pa[0], compose(g, FinFn::from_val(pa[1], g.dom)));
  }
  Val ido() const override { return canon(base_->ido(), FinFn::id(1)); }
  Val subst(const Val& q, const std::vector<Val>& ps, const std::vector<int>& ms) const override {
    const int n2 = static_cast<int>(ps.size());
    FinFn beta = FinFn::from_val(q[1], n2);
    std::vector<FinFn> alphas;
    for (int i = 0; i < n2; ++i) alphas.push_back(FinFn::from_val(ps[i][1], ms[i]));
    std::vector<Val> picked;
    std::vector<int> dims;
    int total = 0;
    for (int i = 0; i < beta.dom; ++i) {
      picked.push_back(ps[beta(i)][0]);
      dims.push_back(alphas[beta(i)].dom);
      total += dims.back();
    }
    int m2 = detail::sum(ms);
    if (total > inner_ || m2 > inner_)
      throw Refusal(name() + ": substitution reaches arity " + std::to_string(std::max(total, m2)) + " beyond " +
                    std::to_string(inner_));
    return canon(base_->subst(q[0], picked, dims), star(beta, alphas));
  }
  std::optional<int> reduced_arity(int k) const override {
    auto b = base_->reduced_arity(k);
    if (detail::acts_as_fsurj(w2_) || w2_.kind == VerbalCat::Kind::F) return b ? std::min(*b, k) : k;
    return b;
  }
  /// [[p, alpha], xs] and [p, xs . alpha] name the same element, so the base
  /// normal form lifts.
  std::optional<std::pair<Val, std::vector<Val>>> normal_form(const Val& pa, const std::vector<Val>& xs) const override {
    FinFn alpha = FinFn::from_val(pa[1], static_cast<int>(xs.size()));
    CanonOptions opt;
    opt.bound = inner_;
    auto r = canonicalize(*base_, pa[0], reindex(xs, alpha), opt);
    if (!r.complete) return std::nullopt;
    return std::pair{canon(r.p, FinFn::id(static_cast<int>(r.xs.size()))), r.xs};
  }

 private:
  OperadPtr base_;
  VerbalCat w2_;
  int inner_;
  mutable std::unordered_map<Val, Val, ValHash> cache_;
};

/// Same data with the action narrowed to a subcategory.
class RestrictedOperad : public Operad {
 public:
  RestrictedOperad(OperadPtr o, VerbalCat w) : o_(std::move(o)), w_(w) {
    if (!w_.included_in(o_->w(), 4))
      throw UsageError("cannot restrict " + o_->name() + " to " + w_.name() + ": not a subcategory");
  }
  std::string name() const override { return "restrict:" + o_->name() + ":" + w_.name(); }
  VerbalCat w() const override { return w_; }
  int max_arity() const override { return o_->max_arity(); }
  std::optional<int> top_arity() const override { return o_->top_arity(); }
  std::optional<std::vector<Val>> elems(int n, std::size_t cap) const override { return o_->elems(n, cap); }
  Val sample(int n, Rng& rng, const Sampling& cfg) const override { return o_->sample(n, rng, cfg); }
  Val act(const FinFn& a, const Val& p) const override { return o_->act(a, p); }
  Val ido() const override { return o_->ido(); }
  Val subst(const Val& q, const std::vector<Val>& ps, const std::vector<int>& ms) const override {
    return o_->subst(q, ps, ms);
  }
  std::optional<std::vector<Val>> preimages(const FinFn& b, const Val& p) const override { return o_->preimages(b, p); }

 private:
  OperadPtr o_;
  VerbalCat w_;
};

/// Kleisli endomorphism operad: O_n = functions X^n -> TX, tabulated in the
/// lexicographic order of X^n.
class KleisliEndOperad : public Operad {
 public:
  KleisliEndOperad(MonadPtr t, Carrier x, VerbalCat w, int bound, const Sampling& cfg, bool skip_checks)
      : t_(std::move(t)), x_(std::move(x)), w_(w), bound_(bound), cfg_(cfg) {
    if (!x_.elems) throw UsageError("endo operad needs an explicit carrier");
    for (std::size_t i = 0; i < x_.elems->size(); ++i) index_.emplace((*x_.elems)[i], static_cast<int>(i));
    if (skip_checks) return;
    if (!predicate_commutative(t_, x_, cfg).ok())
      throw Refusal("endo operad: " + t_->name() + " fails the commutativity check");
    if (!check_w_commutative_all(t_, w_, x_, bound_, cfg).ok())
      throw Refusal("endo operad: " + t_->name() + " fails the " + w_.name() + "-commutativity check");
  }
  std::string name() const override {
    return "endo:" + t_->name() + ":" + std::to_string(x_.size()) + ":" + w_.name();
  }
  VerbalCat w() const override { return w_; }
  int max_arity() const override { return bound_; }

  std::optional<std::vector<Val>> elems(int n, std::size_t cap) const override {
    auto tx = t_->enumerate(x_, cap);
    if (!tx) return std::nullopt;
    auto rows = detail::checked_pow(x_.size(), static_cast<std::size_t>(n), cap);
    if (!rows) return std::nullopt;
    return detail::tuple_vals(*tx, static_cast<int>(*rows), cap);
  }
  Val sample(int n, Rng& rng, const Sampling& cfg) const override {
    if (n > bound_) throw Refusal(name() + ": arity beyond bound");
    std::size_t rows = *detail::checked_pow(x_.size(), static_cast<std::size_t>(n), SIZE_MAX);
    std::vector<Val> out;
    for (std::size_t i = 0; i < rows; ++i) out.push_back(t_->sample(x_, rng, cfg));
    return Val::tuple(std::move(out));
  }
  /// The function as a table indexed by the tuples of X^n.
  Val tabulate(int n, const std::function<Val(const std::vector<Val>&)>& f) const {
    std::vector<Val> out;
    for (const auto& xs : detail::all_tuples(*x_.elems, static_cast<std::size_t>(n))) out.push_back(f(xs));
    return Val::tuple(std::move(out));
  }
  Val at(const Val& f, const std::vector<Val>& xs) const {
    std::size_t i = 0;
    for (const auto& x : xs) i = i * x_.size() + static_cast<std::size_t>(index_.at(x));
    return f[i];
  }
  Val act(const FinFn& a, const Val& f) const override {
    if (a.cod > bound_) throw Refusal(name() + ": arity beyond bound");
    return tabulate(a.cod, [&](const std::vector<Val>& xs) { return at(f, reindex(xs, a)); });
  }
  Val ido() const override {
    return tabulate(1, [&](const std::vector<Val>& xs) { return t_->unit(xs[0]); });
  }
  Val subst(const Val& g, const std::vector<Val>& fs, const std::vector<int>& ms) const override {
    const int m = detail::sum(ms);
    if (m > bound_) throw Refusal(name() + ": substitution reaches arity " + std::to_string(m));
    return tabulate(m, [&](const std::vector<Val>& xs) {
      std::vector<Val> ts;
      std::size_t k = 0;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        std::vector<Val> block(xs.begin() + k, xs.begin() + k + ms[i]);
        ts.push_back(at(fs[i], block));
        k += ms[i];
      }
      return t_->bind(psi_n(*t_, ts), [&](const Val& ys) { return at(g, ys.items()); });
    });
  }

 private:
  MonadPtr t_;
  Carrier x_;
  VerbalCat w_;
  int bound_;
  Sampling cfg_;
  std::map<Val, int> index_;
};

// ------------------------------------------------------------ constructors

inline constexpr int default_inner_bound = 4;

inline OperadPtr terminal_operad(VerbalCat w) { return std::make_shared<TerminalOperad>(w, false); }
/// O_0 empty; terminal_operad_positive(Fsurj) presents P_fin^+.
inline OperadPtr terminal_operad_positive(VerbalCat w) { return std::make_shared<TerminalOperad>(w, true); }
inline OperadPtr exception_operad(int k) { return std::make_shared<ExceptionOperad>(k); }
inline OperadPtr writer_operad(MonoidPtr m) { return std::make_shared<WriterOperad>(std::move(m)); }
inline OperadPtr monoid_action_operad(MonoidPtr m) { return std::make_shared<MonoidActionOperad>(std::move(m)); }
inline OperadPtr monoid0_action_operad(MonoidPtr p, bool broken = false) {
  return std::make_shared<Monoid0ActionOperad>(std::move(p), broken);
}
inline OperadPtr distribution_operad(std::vector<Rational> pool = default_pool()) {
  return std::make_shared<DistributionOperad>(std::move(pool));
}
inline OperadPtr nonuniqueness_operad(MonoidPtr m, VerbalCat w = VerbalCat::Finj()) {
  if (w.kind != VerbalCat::Kind::Finj && w.kind != VerbalCat::Kind::Fminj)
    throw UsageError("nonuniqueness operad lives over Finj or Fminj");
  return std::make_shared<NonuniquenessOperad>(std::move(m), w);
}
inline OperadPtr monoid_operad(VerbalCat w, int inner_bound = default_inner_bound) {
  return std::make_shared<MonoidOperad>(w, inner_bound);
}
inline OperadPtr extend(OperadPtr o, VerbalCat w2, int inner_bound = default_inner_bound) {
  return std::make_shared<ExtendedOperad>(std::move(o), w2, inner_bound);
}
inline OperadPtr restrict(OperadPtr o, VerbalCat w) { return std::make_shared<RestrictedOperad>(std::move(o), w); }
/// Throws Refusal unless t is commutative and W-commutative on x (checked up to bound).
inline OperadPtr kleisli_end_operad(MonadPtr t, Carrier x, VerbalCat w, int bound, const Sampling& cfg = {},
                                    bool skip_checks = false) {
  return std::make_shared<KleisliEndOperad>(std::move(t), std::move(x), w, bound, cfg, skip_checks);
}

// ------------------------------------------------ from monads to operads

/// The W-operad n |-> S(n) of a monad S.
class MonadOperad : public Operad {
 public:
  MonadOperad(MonadPtr s, VerbalCat w, int bound) : s_(std::move(s)), w_(w), bound_(bound) {}
  std::string name() const override { return "opd:" + w_.name() + ":" + s_->name(); }
  VerbalCat w() const override { return w_; }
  int max_arity() const override { return bound_; }
  const MonadPtr& monad() const { return s_; }

  std::optional<std::vector<Val>> elems(int n, std::size_t cap) const override {
    return s_->enumerate(Carrier::atoms(n), cap);
  }
  Val sample(int n, Rng& rng, const Sampling& cfg) const override {
    if (n == 0) {
      auto es = s_->enumerate(Carrier::atoms(0), 64);
      if (es && es->empty()) throw Refusal(name() + ": no nullary operations");
      if (es) return detail::pick(*es, rng);
    }
    return s_->sample(Carrier::atoms(n), rng, cfg);
  }
  Val act(const FinFn& a, const Val& p) const override {
    return s_->map([&](const Val& i) { return Val::atom(a(static_cast<int>(i.as_atom()))); }, p);
  }
  Val ido() const override { return s_->unit(Val::atom(0)); }
  Val subst(const Val& q, const std::vector<Val>& ps, const std::vector<int>& ms) const override {
    std::vector<int> offset(ms.size() + 1, 0);
    for (std::size_t i = 0; i < ms.size(); ++i) offset[i + 1] = offset[i] + ms[i];
    if (offset.back() > bound_) throw Refusal(name() + ": substitution reaches arity " + std::to_string(offset.back()));
    return s_->bind(q, [&](const Val& iv) {
      auto i = static_cast<std::size_t>(iv.as_atom());
      return s_->map([&](const Val& j) { return Val::atom(offset[i] + j.as_atom()); }, ps.at(i));
    });
  }
  std::optional<std::vector<Val>> preimages(const FinFn& b, const Val& p) const override {
    if (b.is_injective() && b.dom > 0) {
      // S of a split mono is a split mono: retract, then check
      std::vector<int> r(b.cod, 0);
      for (int i = 0; i < b.dom; ++i) r[b(i)] = i;
      Val q = act(FinFn(b.cod, b.dom, r), p);
      if (act(b, q) == p) return std::vector<Val>{q};
      return std::vector<Val>{};
    }
    return Operad::preimages(b, p);
  }
  std::optional<std::pair<Val, std::vector<Val>>> normal_form(const Val& p, const std::vector<Val>& xs) const override {
    // multiset monads preserve the intersections of images that descent needs
    if (!dynamic_cast<const MultisetMonad*>(s_.get())) return std::nullopt;
    if (w_.kind == VerbalCat::Kind::Finj) return canon_by_descent(*this, p, xs, true);
    if (w_.kind == VerbalCat::Kind::Fminj) return canon_by_descent(*this, p, xs, false);
    return std::nullopt;
  }

 private:
  MonadPtr s_;
  VerbalCat w_;
  int bound_;
};

inline OperadPtr monad_to_operad(MonadPtr s, VerbalCat w, int bound = default_inner_bound) {
  return std::make_shared<MonadOperad>(std::move(s), w, bound);
}

/// Operads by configuration name.
inline OperadPtr operad_by_name(const std::string& name, const std::vector<Rational>& pool = default_pool()) {
  auto after = [&](const std::string& prefix) -> std::optional<std::string> {
    if (name.rfind(prefix, 0) == 0) return name.substr(prefix.size());
    return std::nullopt;
  };
  auto split_last = [&](const std::string& s) {
    auto pos = s.rfind(':');
    if (pos == std::string::npos || pos == 0 || pos + 1 == s.size())
      throw UsageError("malformed operad name '" + name + "'");
    return std::pair{s.substr(0, pos), s.substr(pos + 1)};
  };
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      int k = std::stoi(s, &used);
      if (used == s.size() && k >= 0) return k;
    } catch (const std::logic_error&) {
    }
    throw UsageError("malformed number in operad name '" + name + "'");
  };
  if (name == "semigroup") return terminal_operad_positive(VerbalCat::Fsurj());
  if (name == "distribution") return distribution_operad(pool);
  if (auto r = after("distribution:")) {
    std::vector<Rational> p;
    std::string s = *r;
    for (std::size_t start = 0; start <= s.size();) {
      auto end = s.find(',', start);
      if (end == std::string::npos) end = s.size();
      try {
        p.push_back(Rational::parse(s.substr(start, end - start)));
      } catch (const std::exception&) {
        throw UsageError("malformed pool in operad name '" + name + "'");
      }
      start = end + 1;
    }
    return distribution_operad(p);
  }
  if (auto r = after("terminal:")) return terminal_operad(VerbalCat::parse(*r));
  if (auto r = after("terminal+:")) return terminal_operad_positive(VerbalCat::parse(*r));
  if (auto r = after("exception:")) return exception_operad(to_int(*r));
  if (auto r = after("writer:")) return writer_operad(monoid_by_name(*r, pool));
  if (auto r = after("monoid-action:")) return monoid_action_operad(monoid_by_name(*r, pool));
  if (auto r = after("monoid0-action-broken:")) return monoid0_action_operad(monoid_by_name(*r, pool), true);
  if (auto r = after("monoid0-action:")) return monoid0_action_operad(monoid_by_name(*r, pool));
  if (auto r = after("nonuniqueness:")) return nonuniqueness_operad(monoid_by_name(*r, pool));
  if (auto r = after("monoid:")) return monoid_operad(VerbalCat::parse(*r));
  if (auto r = after("extend:")) {
    auto [inner, w] = split_last(*r);
    return extend(operad_by_name(inner, pool), VerbalCat::parse(w));
  }
  if (auto r = after("restrict:")) {
    auto [inner, w] = split_last(*r);
    return restrict(operad_by_name(inner, pool), VerbalCat::parse(w));
  }
  if (auto r = after("opd:")) {
    auto pos = r->find(':');
    if (pos == std::string::npos) throw UsageError("malformed operad name '" + name + "'");
    return monad_to_operad(builtin_monad(r->substr(pos + 1), pool), VerbalCat::parse(r->substr(0, pos)));
  }
  if (auto r = after("endo:")) {
    // endo:<monad>:<k> over Fbij, or endo:<monad>:<k>:<W>
    auto [head, last] = split_last(*r);
    VerbalCat w = VerbalCat::Fbij();
    std::string mk = *r;
    if (!last.empty() && !std::isdigit(static_cast<unsigned char>(last[0]))) {
      w = VerbalCat::parse(last);
      mk = head;
    }
    auto [monad, k] = split_last(mk);
    Sampling cfg;
    cfg.pool = pool;
    return kleisli_end_operad(builtin_monad(monad, pool), Carrier::atoms(to_int(k)), w, 3, cfg);
  }
  throw UsageError("unknown operad '" + name + "'");
}

/// Names exercised by the operad suite.
inline std::vector<std::string> shipped_operad_names() {
  return {"terminal:Fid",           "terminal:Fminj",        "terminal:Fbij",         "terminal:Finj",
          "terminal:Fsurj",         "terminal:F",            "semigroup",             "exception:0",
          "exception:2",            "writer:z3add",          "writer:trans2",         "monoid-action:z2mult",
          "monoid-action:z3add",    "monoid0-action:z2mult", "monoid0-action:z3mult", "distribution",
          "nonuniqueness:z2add",    "monoid:Fid",            "monoid:Fbij",           "monoid:Finj",
          "monoid:Fsurj",           "extend:terminal:Fid:Fbij", "extend:terminal:Fbij:F",
          "extend:exception:1:Finj", "restrict:terminal:F:Fbij", "opd:Fbij:pfin",         "opd:Finj:valuation"};
}

}  // namespace monadlab
