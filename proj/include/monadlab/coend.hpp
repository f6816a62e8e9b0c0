#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "finord.hpp"
#include "monads.hpp"
#include "operad.hpp"
#include "operads.hpp"
#include "quotient.hpp"
#include "report.hpp"
#include "val.hpp"

namespace monadlab {

/// The monad induced by a W-operad. Elements are canonical pairs
/// (p, (x_0, ..., x_{n-1})).
class InducedMonad : public Monad {
 public:
  explicit InducedMonad(OperadPtr o, CanonOptions opt = {}, CanonMethod m = CanonMethod::Auto, std::string name = "")
      : q_(std::move(o), std::move(opt), m), name_(std::move(name)) {
    if (name_.empty()) name_ = "mnd:" + q_.operad().name();
  }

  std::string name() const override { return name_; }
  const Operad& operad() const { return q_.operad(); }
  const OperadPtr& operad_ptr() const { return q_.operad_ptr(); }
  const Quotient& quotient() const { return q_; }

  Val elem(const Val& p, const std::vector<Val>& xs) const {
    if (static_cast<int>(xs.size()) > q_.operad().max_arity())
      throw Refusal(name_ + ": arity " + std::to_string(xs.size()) + " beyond " +
                    std::to_string(q_.operad().max_arity()));
    return q_.elem(p, xs);
  }

  Val unit(const Val& x) const override { return elem(q_.operad().ido(), {x}); }
  Val map(const Fn& f, const Val& t) const override {
    std::vector<Val> ys;
    for (const auto& x : t[1].items()) ys.push_back(f(x));
    return elem(t[0], ys);
  }
  Val join(const Val& tt) const override {
    std::vector<Val> ps, xs;
    std::vector<int> ms;
    for (const auto& inner : tt[1].items()) {
      ps.push_back(inner[0]);
      ms.push_back(static_cast<int>(inner[1].size()));
      for (const auto& x : inner[1].items()) xs.push_back(x);
    }
    if (static_cast<int>(xs.size()) > q_.operad().max_arity())
      throw Refusal(name_ + ": join reaches arity " + std::to_string(xs.size()));
    return elem(q_.operad().subst(tt[0], ps, ms), xs);
  }

  std::optional<std::vector<Val>> enumerate(const Carrier& x, std::size_t cap) const override {
    if (!x.elems) return std::nullopt;
    auto top = q_.operad().reduced_arity(static_cast<int>(x.size()));
    if (!top) return std::nullopt;
    std::set<Val> out;
    for (int n = 0; n <= *top; ++n) {
      auto ps = q_.operad().elems(n, cap);
      if (!ps) return std::nullopt;
      if (ps->empty()) continue;
      if (!detail::checked_pow(x.size(), static_cast<std::size_t>(n), cap * 4)) return std::nullopt;
      for (const auto& xs : detail::all_tuples(*x.elems, static_cast<std::size_t>(n)))
        for (const auto& p : *ps) {
          out.insert(elem(p, xs));
          if (out.size() > cap) return std::nullopt;
        }
    }
    return std::vector<Val>(out.begin(), out.end());
  }

  Val sample(const Carrier& x, Rng& rng, const Sampling& cfg) const override {
    int hi = std::min(cfg.support, q_.operad().max_arity());
    if (auto top = q_.operad().top_arity()) hi = std::min(hi, *top);
    for (int attempt = 0; attempt < 64; ++attempt) {
      int n = std::uniform_int_distribution<int>(0, std::max(hi, 0))(rng);
      if (n > 0 && x.empty()) continue;
      try {
        Val p = q_.operad().sample(n, rng, cfg);
        std::vector<Val> xs;
        for (int i = 0; i < n; ++i) xs.push_back(x.sample(rng));
        return elem(p, xs);
      } catch (const Refusal&) {
      }
    }
    throw Refusal(name_ + ": no element found on " + x.name);
  }

  bool valid(const Val& t) const override {
    if (!t.is_tuple() || t.size() != 2 || !t[1].is_tuple()) return false;
    return q_.elem(t[0], t[1].items()) == t;
  }

 private:
  Quotient q_;
  std::string name_;
};

inline std::shared_ptr<const InducedMonad> induced_monad(OperadPtr o, CanonOptions opt = {},
                                                         CanonMethod m = CanonMethod::Auto) {
  return std::make_shared<InducedMonad>(std::move(o), std::move(opt), m);
}

/// Canonical classes of pairs of arity <= max_arity over x, computed with x
/// as the carrier of the closure.
inline std::optional<std::vector<Val>> census(const OperadPtr& o, const Carrier& x, int max_arity,
                                              CanonMethod m = CanonMethod::Auto, int closure_bound = 4,
                                              std::size_t cap = 4096) {
  if (!x.elems) return std::nullopt;
  CanonOptions opt;
  opt.carrier = x;
  opt.bound = std::max(closure_bound, max_arity);
  Quotient q(o, opt, m);
  std::set<Val> out;
  for (int n = 0; n <= max_arity; ++n) {
    auto ps = o->elems(n, cap);
    if (!ps) return std::nullopt;
    if (ps->empty()) continue;
    for (const auto& xs : detail::all_tuples(*x.elems, static_cast<std::size_t>(n)))
      for (const auto& p : *ps) out.insert(q.elem(p, xs));
  }
  return std::vector<Val>(out.begin(), out.end());
}

/// The W-operadic refinement: the monad induced by monad_to_operad(s, w).
inline std::shared_ptr<const InducedMonad> refine(MonadPtr s, VerbalCat w, int bound = 6) {
  std::string name = "refine:" + w.name() + ":" + s->name();
  return std::make_shared<InducedMonad>(monad_to_operad(std::move(s), w, bound), CanonOptions{}, CanonMethod::Auto,
                                        name);
}

/// The counit Rf_W(S) -> S: [p, xs] |-> S(i |-> x_i)(p).
inline Val counit(const Monad& s, const Val& t) {
  const auto& xs = t[1].items();
  return s.map([&](const Val& i) { return xs.at(static_cast<std::size_t>(i.as_atom())); }, t[0]);
}

// ------------------------------------------------------ monad morphisms

/// Checks that phi (acting on the outer layer only) commutes with units,
/// joins and maps on x, and optionally that it is a bijection on the
/// enumerated elements.
inline Report check_monad_morphism(const MonadPtr& a, const MonadPtr& b, const Fn& phi, const Carrier& x,
                                   const Sampling& cfg, bool bijective, const std::string& label = "") {
  Report r;
  r.check = bijective ? "monad-isomorphism" : "monad-morphism";
  r.subject = label.empty() ? a->name() + " -> " + b->name() : label;
  r.property = bijective ? "monad.isomorphism" : "monad.morphism";
  r.seed = cfg.seed;
  r.details["carrier"] = x.name;
  Rng rng(cfg.seed);
  if (x.elems)
    for (const auto& v : *x.elems) detail::compare(r, phi(a->unit(v)), b->unit(v), "unit", {{"x", v.str()}});
  Carrier ax = apply(a, x, cfg);
  Carrier aax = apply(a, ax, cfg);
  detail::over(aax, cfg, rng, r, [&](const Val& tt) {
    Val lhs = phi(a->join(tt));
    Val rhs = b->join(b->map(phi, phi(tt)));
    detail::compare(r, lhs, rhs, "join", {{"t", tt.str()}});
  });
  if (x.elems && !x.elems->empty()) {
    const auto& xs = *x.elems;
    detail::over(ax, cfg, rng, r, [&](const Val& t) {
      std::map<Val, Val> tab;
      for (const auto& v : xs) tab[v] = detail::pick(xs, rng);
      Fn f = [&](const Val& v) { return tab.at(v); };
      detail::compare(r, phi(a->map(f, t)), b->map(f, phi(t)), "naturality", {{"t", t.str()}});
    });
  }
  if (bijective) {
    Carrier bx = apply(b, x, cfg);
    if (ax.elems && bx.elems) {
      std::set<Val> image;
      for (const auto& t : *ax.elems) image.insert(phi(t));
      std::set<Val> target(bx.elems->begin(), bx.elems->end());
      ++r.checked;
      r.details["sizes"] = {ax.elems->size(), bx.elems->size()};
      if (image.size() != ax.elems->size() || image != target)
        r.fail({{"law", "bijection"}, {"domain", ax.elems->size()}, {"image", image.size()},
                {"codomain", bx.elems->size()}});
    } else {
      // injectivity on samples
      r.sampled = true;
      std::map<Val, Val> seen;
      for (std::size_t i = 0; i < cfg.samples; ++i) {
        Val t;
        try {
          t = ax.sample(rng);
        } catch (const Refusal&) {
          ++r.untested;
          continue;
        }
        Val img = phi(t);
        ++r.checked;
        auto [it, fresh] = seen.emplace(img, t);
        if (!fresh && it->second != t)
          r.fail({{"law", "injectivity"}, {"first", it->second.str()}, {"second", t.str()}, {"image", img.str()}});
      }
    }
  }
  return r;
}

/// check_monad_morphism on every element of Mnd(O)(X) of arity <= max_n:
/// unit on X, naturality along every endomap of X, join on every element of
/// arity <= outer_n over those, and injectivity when `bijective`.
inline Report check_monad_morphism_bounded(const std::shared_ptr<const InducedMonad>& a, const MonadPtr& b,
                                           const Fn& phi, const Carrier& x, int max_n, int outer_n,
                                           bool bijective, const std::string& label = "") {
  Report r;
  r.check = bijective ? "monad-isomorphism" : "monad-morphism";
  r.subject = (label.empty() ? a->name() + " -> " + b->name() : label) + " on " + x.name;
  r.property = bijective ? "monad.isomorphism" : "monad.morphism";
  r.details["carrier"] = x.name;
  auto dom = census(a->operad_ptr(), x, max_n);
  if (!dom) {
    r.refuse(a->operad().name() + " is not listable at arity " + std::to_string(max_n));
    return r;
  }
  auto dom2 = census(a->operad_ptr(), Carrier::finite("M" + x.name, *dom), outer_n);
  if (!dom2) {
    r.refuse(a->operad().name() + " is not listable at arity " + std::to_string(outer_n));
    return r;
  }
  r.details["inputs"] = dom->size();
  r.details["join_inputs"] = dom2->size();
  for (const auto& v : *x.elems) detail::compare(r, phi(a->unit(v)), b->unit(v), "unit", {{"x", v.str()}});
  const auto& xs = *x.elems;
  auto maps = detail::all_tuples(xs, xs.size());
  for (const auto& img : maps) {
    std::map<Val, Val> tab;
    for (std::size_t i = 0; i < xs.size(); ++i) tab[xs[i]] = img[i];
    Fn f = [&](const Val& v) { return tab.at(v); };
    for (const auto& t : *dom)
      detail::compare(r, phi(a->map(f, t)), b->map(f, phi(t)), "naturality", {{"t", t.str()}});
  }
  for (const auto& tt : *dom2) {
    try {
      detail::compare(r, phi(a->join(tt)), b->join(b->map(phi, phi(tt))), "join", {{"t", tt.str()}});
    } catch (const Refusal&) {
      ++r.untested;
    }
  }
  if (bijective) {
    std::map<Val, Val> seen;
    for (const auto& t : *dom) {
      ++r.checked;
      Val img = phi(t);
      auto [it, fresh] = seen.emplace(img, t);
      if (!fresh) r.fail({{"law", "injectivity"}, {"first", it->second.str()}, {"second", t.str()}, {"image", img.str()}});
      if (!b->valid(img)) r.fail({{"law", "image"}, {"t", t.str()}, {"image", img.str()}});
    }
  }
  return r;
}

// ------------------------------------------------------- isomorphisms

/// Mnd(extend(o, w')) -> Mnd(o): [[p, alpha], xs] |-> [p, xs . alpha].
inline Fn extension_iso(std::shared_ptr<const InducedMonad> base) {
  return [base](const Val& t) {
    const Val& pa = t[0];
    auto xs = t[1].items();
    FinFn alpha = FinFn::from_val(pa[1], static_cast<int>(xs.size()));
    return base->elem(pa[0], reindex(xs, alpha));
  };
}

/// Into a multiset monad: sum over positions of coeff(p, i) x_i, skipping
/// positions whose coefficient is absent.
inline Fn multiset_iso(MonadPtr target, std::function<std::optional<Val>(const Val& p, std::size_t i)> coeff) {
  auto ms = std::dynamic_pointer_cast<const MultisetMonad>(target);
  if (!ms) throw UsageError("multiset_iso: " + target->name() + " is not a multiset monad");
  return [ms, coeff](const Val& t) {
    std::vector<Val::Entry> es;
    const auto& xs = t[1].items();
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (auto c = coeff(t[0], i)) es.emplace_back(xs[i], *c);
    return make_bag(std::move(es), ms->semiring());
  };
}

/// Compares the closed forms with the generic closure on every pair of
/// arity <= max_n over carriers of size 1..max_x (sampled operations where
/// O_n is not listable).
inline Report check_fast_paths(const OperadPtr& o, int max_x, int max_n, const Sampling& cfg) {
  Report r;
  r.check = "coend-fast-paths";
  r.subject = o->name();
  r.property = "coend.closed-forms";
  r.seed = cfg.seed;
  Rng rng(cfg.seed);
  for (int k = 1; k <= max_x; ++k) {
    CanonOptions opt;
    opt.carrier = Carrier::atoms(k);
    opt.bound = std::max(4, max_n + 1);
    for (int n = 0; n <= max_n; ++n) {
      std::vector<Val> ps;
      if (auto es = o->elems(n, 64)) {
        ps = *es;
      } else {
        r.sampled = true;
        for (int i = 0; i < 8; ++i) {
          try {
            ps.push_back(o->sample(n, rng, cfg));
          } catch (const Refusal&) {
          }
        }
      }
      for (const auto& xs : detail::all_tuples(*opt.carrier->elems, static_cast<std::size_t>(n)))
        for (const auto& p : ps) {
          auto fast = canonicalize(*o, p, xs, opt);
          auto slow = canonicalize(*o, p, xs, opt, CanonMethod::Generic);
          if (!slow.complete) {
            ++r.untested;
            continue;
          }
          detail::compare(r, coend_elem(fast.p, fast.xs), coend_elem(slow.p, slow.xs), fast.method,
                          {{"input", coend_elem(p, xs).str()}, {"carrier", opt.carrier->name}});
        }
    }
  }
  return r;
}

/// Coefficient of position i of p in S(n), for p an element of a multiset monad.
inline Val position_coeff(const MultisetMonad& s, const Val& p, std::size_t i) {
  return bag_coef(p, Val::atom(static_cast<std::int64_t>(i)), s.semiring().zero);
}

/// Rf_Finj(V) in the indexed-valuation presentation: the bag of (p_i, x_i)
/// over positions with p_i != 0.
inline Fn indexed_valuation_view(std::shared_ptr<const MultisetMonad> v) {
  return [v](const Val& t) {
    std::vector<Val::Entry> es;
    const auto& xs = t[1].items();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      Val c = position_coeff(*v, t[0], i);
      if (c != v->semiring().zero) es.emplace_back(Val::tuple({c, xs[i]}), Val::num(1));
    }
    return make_bag(
        std::move(es), [](const Val& a, const Val& b) { return Val::num(a.as_num() + b.as_num()); }, Val::num(0));
  };
}

/// Rf_Fsurj(S)(X) = sum over finite A in X of S(A), listed directly.
inline std::optional<std::vector<Val>> fsurj_refinement_presentation(const MonadPtr& s, const Carrier& x,
                                                                     std::size_t cap) {
  if (!x.elems) return std::nullopt;
  const auto& xs = *x.elems;
  if (xs.size() > 12) return std::nullopt;
  std::set<Val> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << xs.size()); ++mask) {
    std::vector<Val> a;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (mask >> i & 1) a.push_back(xs[i]);
    auto sa = s->enumerate(Carrier::finite("A", a), cap);
    if (!sa) return std::nullopt;
    for (const auto& e : *sa) out.insert(Val::tuple({Val::tuple(a), e}));
    if (out.size() > cap) return std::nullopt;
  }
  return std::vector<Val>(out.begin(), out.end());
}

/// Canonical element of Rf_Fsurj(S) to its (A, S(A)) presentation.
inline Fn fsurj_refinement_view(MonadPtr s) {
  return [s](const Val& t) { return Val::tuple({t[1], counit(*s, t)}); };
}

/// Rf_Fbij(S)(X) at arities <= max_n: orbits of (p, xs) under simultaneous
/// permutation, each named by its least member, computed by brute force.
inline std::optional<std::vector<Val>> fbij_refinement_presentation(const MonadPtr& s, const Carrier& x, int max_n,
                                                                    std::size_t cap) {
  if (!x.elems) return std::nullopt;
  std::set<Val> out;
  for (int n = 0; n <= max_n; ++n) {
    auto ps = s->enumerate(Carrier::atoms(n), cap);
    if (!ps) return std::nullopt;
    auto perms = VerbalCat::Fbij().enumerate(n, n, n);
    for (const auto& xs : detail::all_tuples(*x.elems, static_cast<std::size_t>(n)))
      for (const auto& p : *ps) {
        std::optional<Val> best;
        for (const auto& sg : perms) {
          // (p, xs . sg) ~ (S(sg) p, xs)
          Val sp = s->map([&](const Val& i) { return Val::atom(sg(static_cast<int>(i.as_atom()))); }, p);
          std::vector<Val> ys(n);
          for (int i = 0; i < n; ++i) ys[sg(i)] = xs[i];
          Val k = coend_key(sp, ys);
          if (!best || k < *best) best = k;
        }
        out.insert(coend_elem((*best)[1], (*best)[0].items()));
      }
  }
  return std::vector<Val>(out.begin(), out.end());
}

}  // namespace monadlab
