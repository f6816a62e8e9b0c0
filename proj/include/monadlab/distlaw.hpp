#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coend.hpp"
#include "errors.hpp"
#include "finord.hpp"
#include "monads.hpp"
#include "operads.hpp"
#include "report.hpp"
#include "val.hpp"
#include "wcomm.hpp"

namespace monadlab {

/// The canonical law Mnd(O) T -> T Mnd(O) for a W-commutative T.
/// Elements of S T X are canonical pairs (p, (t_0, ..., t_{n-1})).
struct DistLaw {
  VerbalCat w;
  OperadPtr o;
  std::shared_ptr<const InducedMonad> s;
  MonadPtr t;
  bool prime = false;  // use psi' instead of psi

  /// On one representative: T(xs |-> [p, xs])(psi^(n)(ts)).
  Val on_pair(const Val& p, const std::vector<Val>& ts) const {
    return t->map([&](const Val& xs) { return s->elem(p, xs.items()); }, psi_n(*t, ts, prime));
  }
  Val operator()(const Val& e) const { return on_pair(e[0], e[1].items()); }
  Fn fn() const {
    auto self = *this;
    return [self](const Val& e) { return self(e); };
  }
  std::string name() const { return s->name() + " over " + t->name() + " at " + w.name(); }
};

struct SynthOptions {
  bool prime = false;
  bool check_precondition = true;
  int bound = 3;  // arity bound of the W-commutativity precheck
  CanonOptions canon;
};

/// Builds delta for (w, o, t). An operad over a smaller category is extended
/// to w first. Throws Refusal when t fails the W-commutativity check on x.
inline DistLaw synth_delta(const VerbalCat& w, OperadPtr o, MonadPtr t, const Carrier& x, const Sampling& cfg,
                           const SynthOptions& opt = {}) {
  if (!(o->w() == w)) {
    if (!o->w().included_in(w)) throw UsageError("operad " + o->name() + " is not over a subcategory of " + w.name());
    o = extend(o, w);
  }
  if (opt.check_precondition) {
    auto r = check_w_commutative_all(t, w, x, opt.bound, cfg, opt.prime);
    if (!r.ok()) {
      const Report* bad = &r;
      for (const auto& c : r.children)
        if (!c.ok()) {
          bad = &c;
          break;
        }
      throw Refusal(t->name() + " is not " + w.name() + "-commutative: " + bad->witness.dump());
    }
  }
  DistLaw d;
  d.w = w;
  d.o = o;
  d.s = std::make_shared<InducedMonad>(o, opt.canon);
  d.t = std::move(t);
  d.prime = opt.prime;
  return d;
}

namespace detail {

/// Number of leaves, used to rank witnesses.
inline std::size_t leaf_count(const Val& v) {
  if (v.is_tuple()) {
    std::size_t n = 1;
    for (const auto& x : v.items()) n += leaf_count(x);
    return n;
  }
  if (v.is_bag()) {
    std::size_t n = 1;
    for (const auto& [k, c] : v.entries()) n += leaf_count(k) + leaf_count(c);
    return n;
  }
  if (v.is_inj()) return 1 + leaf_count(v.payload());
  return 1;
}

/// Up to k further pairs in the class of (p, xs), reached by a seeded random
/// walk along the generators of W. Positions created by a map that is not
/// onto are filled by `fill`.
inline std::vector<CoendPair> alternatives(const Operad& o, const Val& p, const std::vector<Val>& xs, std::size_t k,
                                           Rng& rng, const Sampler& fill, int cap) {
  const VerbalCat w = o.w();
  std::vector<CoendPair> found{{p, xs}};
  std::set<Val> seen{coend_key(p, xs)};
  for (std::size_t attempt = 0; attempt < 40 * (k + 1) && found.size() <= k; ++attempt) {
    const auto& [q, ys] = found[std::uniform_int_distribution<std::size_t>(0, found.size() - 1)(rng)];
    const int n = static_cast<int>(ys.size());
    std::optional<CoendPair> next;
    if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
      auto gens = w.generators_from(n, std::max(cap, n));
      if (gens.empty()) continue;
      const FinFn& g = gens[std::uniform_int_distribution<std::size_t>(0, gens.size() - 1)(rng)];
      std::vector<std::optional<Val>> out(g.cod);
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        auto& slot = out[g(i)];
        if (!slot) slot = ys[i];
        else ok = *slot == ys[i];
      }
      if (!ok) continue;
      std::vector<Val> zs;
      for (auto& v : out) zs.push_back(v ? *v : fill(rng));
      next = CoendPair{o.act(g, q), zs};
    } else {
      auto gens = w.generators_into(n, std::max(cap, n));
      if (gens.empty()) continue;
      const FinFn& g = gens[std::uniform_int_distribution<std::size_t>(0, gens.size() - 1)(rng)];
      auto pre = o.preimages(g, q);
      if (!pre || pre->empty()) continue;
      next = CoendPair{(*pre)[std::uniform_int_distribution<std::size_t>(0, pre->size() - 1)(rng)], reindex(ys, g)};
    }
    if (next && seen.insert(coend_key(next->first, next->second)).second) found.push_back(*next);
  }
  found.erase(found.begin());
  return found;
}

/// Relabels the carrier points of a witness through a functor-shaped map.
using Relabel = std::function<Val(const Fn&, const Val&)>;

/// Greedy shrink: first the smallest failing input, then merging carrier
/// points while the failure persists, in a fixed order.
inline Val minimize(std::vector<Val> failures, const std::vector<Val>& points, const Relabel& relabel,
                    const std::function<bool(const Val&)>& fails) {
  std::sort(failures.begin(), failures.end(), [](const Val& a, const Val& b) {
    auto la = leaf_count(a), lb = leaf_count(b);
    return la != lb ? la < lb : a < b;
  });
  Val best = failures.front();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = points.size(); i-- > 1 && !changed;)
      for (std::size_t j = 0; j < i && !changed; ++j) {
        Fn merge = [&](const Val& v) { return v == points[i] ? points[j] : v; };
        Val cand;
        try {
          cand = relabel(merge, best);
        } catch (const Refusal&) {
          continue;
        }
        if (cand != best && fails(cand)) {
          best = cand;
          changed = true;
        }
      }
  }
  return best;
}

/// Distinct carrier points occurring in a witness, read through the functor.
inline std::size_t points_used(const Val& w, const std::vector<Val>& points, const Relabel& relabel) {
  std::set<Val> used;
  relabel(
      [&](const Val& v) {
        used.insert(v);
        return v;
      },
      w);
  std::size_t n = 0;
  for (const auto& p : points) n += used.count(p);
  return n;
}

}  // namespace detail

struct BeckOptions {
  bool minimize = true;
  std::size_t representatives = 3;  // alternative representatives per input in the well-definedness check
  std::size_t well_defined_inputs = 60;
};

/// The sufficient conditions for compatibility with the multiplication of T
/// that hold: "commutative-T" and "small-operad" (no operations of arity > 1).
inline std::vector<std::string> side_conditions(const DistLaw& d, const Carrier& x, const Sampling& cfg) {
  std::vector<std::string> out;
  if (predicate_commutative(d.t, x, cfg).ok()) out.push_back("commutative-T");
  bool small = false;
  if (auto top = d.o->top_arity()) small = *top <= 1;
  if (!small) {
    small = true;
    for (int n = 2; n <= 4 && small; ++n) {
      auto es = d.o->elems(n, 64);
      small = es && es->empty();
    }
  }
  if (small) out.push_back("small-operad");
  return out;
}

/// Evaluates delta on several representatives of each input class.
inline Report check_well_defined(const DistLaw& d, const Carrier& x, const Sampling& cfg, const BeckOptions& opt = {}) {
  Report r;
  r.check = "well-definedness";
  r.subject = d.name();
  r.property = "distlaw.well-defined";
  r.seed = cfg.seed;
  Rng rng(cfg.seed);
  Carrier tx = apply(d.t, x, cfg);
  Carrier stx = apply(d.s, tx, cfg);
  std::vector<Val> inputs;
  if (stx.elems && stx.elems->size() <= opt.well_defined_inputs) {
    inputs = *stx.elems;
  } else {
    r.sampled = true;
    for (std::size_t i = 0; i < opt.well_defined_inputs; ++i) {
      try {
        inputs.push_back(stx.sample(rng));
      } catch (const Refusal&) {
        ++r.untested;
      }
    }
  }
  if (tx.empty()) return r;
  Sampler fill = [&](Rng& g) { return tx.sample(g); };
  std::size_t most = 0;
  for (const auto& e : inputs) {
    try {
      Val out = d(e);
      auto alts = detail::alternatives(*d.o, e[0], e[1].items(), opt.representatives, rng, fill,
                                       std::max(d.s->quotient().options().bound, 3));
      most = std::max(most, alts.size() + 1);
      for (const auto& [q, ys] : alts) {
        Val alt = d.on_pair(q, ys);
        ++r.checked;
        if (alt != out)
          r.fail({{"law", "representative independence"},
                  {"first", e.str()},
                  {"second", coend_elem(q, ys).str()},
                  {"lhs", out.str()},
                  {"rhs", alt.str()}});
      }
    } catch (const Refusal&) {
      ++r.untested;
    }
  }
  r.details["max_representatives"] = most;
  bool singleton = true;
  for (int n = 0; n <= 3 && singleton; ++n)
    singleton = d.w.generators_from(n, 3).empty() && d.w.generators_into(n, 3).empty();
  if (singleton) r.details["singleton_classes"] = true;
  return r;
}

/// The four compatibility squares, the well-definedness check and the side
/// condition. Failures of the multiplication square are minimized.
inline Report verify_beck(const DistLaw& d, const Carrier& x, const Sampling& cfg, const BeckOptions& opt = {}) {
  Report r;
  r.check = "distributive-law";
  r.subject = d.name();
  r.property = "distlaw.beck";
  r.seed = cfg.seed;
  r.details["verbal"] = d.w.name();
  r.details["operad"] = d.o->name();
  r.details["monad"] = d.t->name();
  r.details["carrier"] = x.name;
  r.details["psi"] = d.prime ? "psi'" : "psi";
  auto sides = side_conditions(d, x, cfg);
  r.details["side_conditions"] = sides;
  r.details["side_condition"] = sides.empty() ? "none" : sides.front();

  const auto& s = *d.s;
  const auto& t = *d.t;
  Fn delta = d.fn();
  Carrier sx = apply(d.s, x, cfg);
  Carrier tx = apply(d.t, x, cfg);
  Carrier stx = apply(d.s, tx, cfg);
  Carrier sstx = apply(d.s, stx, cfg);
  Carrier ttx = apply(d.t, tx, cfg);
  Carrier sttx = apply(d.s, ttx, cfg);

  struct Square {
    std::string check, property;
    const Carrier* domain;
    std::function<std::pair<Val, Val>(const Val&)> sides;
    detail::Relabel relabel;
  };
  auto tmap = [&](const Fn& f) { return [&t, f](const Val& v) { return t.map(f, v); }; };
  auto smap = [&](const Fn& f) { return [&s, f](const Val& v) { return s.map(f, v); }; };
  std::vector<Square> squares{
      {"eta-S", "distlaw.unit-of-S", &tx,
       [&](const Val& e) {
         return std::pair{delta(s.unit(e)), t.map([&](const Val& v) { return s.unit(v); }, e)};
       },
       [&](const Fn& f, const Val& e) { return t.map(f, e); }},
      {"mu-S", "distlaw.multiplication-of-S", &sstx,
       [&](const Val& e) {
         Val lhs = delta(s.join(e));
         Val rhs = t.map([&](const Val& v) { return s.join(v); }, delta(s.map(delta, e)));
         return std::pair{lhs, rhs};
       },
       [&](const Fn& f, const Val& e) { return s.map(smap(tmap(f)), e); }},
      {"eta-T", "distlaw.unit-of-T", &sx,
       [&](const Val& e) {
         return std::pair{delta(s.map([&](const Val& v) { return t.unit(v); }, e)), t.unit(e)};
       },
       [&](const Fn& f, const Val& e) { return s.map(f, e); }},
      {"mu-T", "distlaw.multiplication-of-T", &sttx,
       [&](const Val& e) {
         Val lhs = delta(s.map([&](const Val& v) { return t.join(v); }, e));
         Val rhs = t.join(t.map(delta, delta(e)));
         return std::pair{lhs, rhs};
       },
       [&](const Fn& f, const Val& e) { return s.map(tmap(tmap(f)), e); }},
  };

  for (const auto& sq : squares) {
    Report c;
    c.check = sq.check;
    c.subject = d.name();
    c.property = sq.property;
    c.seed = cfg.seed;
    Rng rng(cfg.seed);
    std::vector<Val> failures;
    detail::over(*sq.domain, cfg, rng, c, [&](const Val& e) {
      auto [lhs, rhs] = sq.sides(e);
      ++c.checked;
      if (lhs != rhs) {
        ++c.failed;
        c.verdict = Verdict::Fail;
        if (failures.size() < 64) failures.push_back(e);
      }
    });
    if (!failures.empty()) {
      Val w = failures.front();
      if (opt.minimize && x.elems && !x.elems->empty())
        w = detail::minimize(failures, *x.elems, sq.relabel, [&](const Val& e) {
          try {
            auto [l, rr] = sq.sides(e);
            return l != rr;
          } catch (const Refusal&) {
            return false;
          }
        });
      auto [lhs, rhs] = sq.sides(w);
      std::size_t used = x.elems ? detail::points_used(w, *x.elems, sq.relabel) : 0;
      c.witness = {{"law", sq.check},   {"input", w.str()},       {"input_value", w.to_json()},
                   {"lhs", lhs.str()},   {"rhs", rhs.str()},       {"points_used", used}};
    }
    r.add(std::move(c));
  }
  r.add(check_well_defined(d, x, cfg, opt));
  if (!r.ok()) {
    for (const auto& c : r.children)
      if (!c.ok()) {
        r.witness = c.witness;
        break;
      }
  }
  return r;
}

/// delta for (o, t) against delta' for (extend(o, w2), t), compared through
/// the isomorphism Mnd(extend(o, w2)) -> Mnd(o).
inline Report verify_invariance(const OperadPtr& o, const VerbalCat& w2, const MonadPtr& t, const Carrier& x,
                                const Sampling& cfg, const SynthOptions& opt = {}) {
  Report r;
  r.check = "change-of-base";
  r.subject = o->name() + " from " + o->w().name() + " to " + w2.name() + " over " + t->name();
  r.property = "distlaw.change-of-base";
  r.seed = cfg.seed;
  DistLaw d = synth_delta(o->w(), o, t, x, cfg, opt);
  DistLaw d2 = synth_delta(w2, w2 == o->w() ? o : extend(o, w2), t, x, cfg, opt);
  Fn phi = extension_iso(d.s);
  if (w2 == o->w()) phi = [](const Val& v) { return v; };
  Rng rng(cfg.seed);
  Carrier tx = apply(t, x, cfg);
  Carrier s2tx = apply(d2.s, tx, cfg);
  detail::over(s2tx, cfg, rng, r, [&](const Val& e) {
    Val lhs = t->map(phi, d2(e));
    Val rhs = d(phi(e));
    detail::compare(r, lhs, rhs, "delta = delta'", {{"input", e.str()}});
  });
  return r;
}

// ------------------------------------------------------------ diagnosis

/// A library operad whose induced monad is the named monad, and the least
/// diamond-or-smaller category it lives over.
inline std::optional<std::pair<VerbalCat, std::string>> operadic_witness(const std::string& monad) {
  if (monad == "list") return std::pair{VerbalCat::Fid(), std::string("terminal:Fid")};
  if (monad == "maybe") return std::pair{VerbalCat::Fid(), std::string("exception:1")};
  if (monad.rfind("exception:", 0) == 0) return std::pair{VerbalCat::Fid(), monad};
  if (monad.rfind("writer:", 0) == 0) return std::pair{VerbalCat::Fid(), monad};
  if (monad == "multiset:nat") return std::pair{VerbalCat::Fbij(), std::string("terminal:Fbij")};
  if (monad == "valuation") return std::pair{VerbalCat::Fbij(), std::string("monoid-action:qnonneg-mult")};
  if (monad == "iv") return std::pair{VerbalCat::Finj(), std::string("opd:Finj:valuation")};
  if (monad == "pfin") return std::pair{VerbalCat::Fsurj(), std::string("terminal:Fsurj")};
  if (monad == "pfin+") return std::pair{VerbalCat::Fsurj(), std::string("semigroup")};
  if (monad == "dist") return std::pair{VerbalCat::Fsurj(), std::string("distribution")};
  return std::nullopt;
}

struct DiagnoseOptions {
  int bound = 3;
  bool synthesize = true;  // build and verify the suggested law
  BeckOptions beck;
};

namespace detail {

inline std::string lift_name(const std::string& op, const VerbalCat& from, const VerbalCat& to) {
  return from == to ? op : "extend:" + op + ":" + to.name();
}

/// Pointwise check of the writer law over the bijective refinement of P_fin:
/// [p, ((m_i, x_i))] |-> (prod m_i, [p, (x_i)]).
inline Report check_writer_instance(const DistLaw& d, const Monoid& m, const Carrier& x, const Sampling& cfg) {
  Report r;
  r.check = "writer-instance";
  r.subject = d.name();
  r.property = "distlaw.writer-product";
  r.seed = cfg.seed;
  Rng rng(cfg.seed);
  Carrier stx = apply(d.s, apply(d.t, x, cfg), cfg);
  over(stx, cfg, rng, r, [&](const Val& e) {
    Val prod = m.unit;
    std::vector<Val> xs;
    for (const auto& mx : e[1].items()) {
      prod = m.op(prod, mx[0]);
      xs.push_back(mx[1]);
    }
    compare(r, d(e), Val::tuple({prod, d.s->elem(e[0], xs)}), "writer product", {{"input", e.str()}});
  });
  return r;
}

}  // namespace detail

/// Fills the diamond with operadicity evidence for s and W-commutativity
/// verdicts for t, intersects, and suggests a law. `s` names a monad, or an
/// operad when prefixed with "operad:".
inline Report diagnose(const std::string& s, const MonadPtr& t, const Carrier& x, const Sampling& cfg,
                       const DiagnoseOptions& opt = {}) {
  Report r;
  r.check = "diagnosis";
  r.subject = s + " over " + t->name();
  r.property = "distlaw.diagnosis";
  r.seed = cfg.seed;

  std::optional<std::pair<VerbalCat, std::string>> witness;
  MonadPtr smonad;
  if (s.rfind("operad:", 0) == 0) {
    auto o = operad_by_name(s.substr(7), cfg.pool);
    witness = std::pair{o->w(), s.substr(7)};
    smonad = induced_monad(o);
  } else {
    smonad = builtin_monad(s, cfg.pool);
    witness = operadic_witness(s);
  }

  const auto ws = diamond();
  std::map<std::string, std::optional<std::string>> evidence;
  std::map<std::string, bool> commutative;
  auto rows = nlohmann::json::array();
  std::vector<VerbalCat> both;
  for (const auto& w : ws) {
    std::optional<std::string> ev;
    if (witness && witness->first.included_in(w)) ev = detail::lift_name(witness->second, witness->first, w);
    auto c = check_w_commutative_all(t, w, x, opt.bound, cfg);
    c.check = "commutativity-at-" + w.name();
    bool com = c.ok();
    r.add(std::move(c));
    evidence[w.name()] = ev;
    commutative[w.name()] = com;
    rows.push_back({{"verbal", w.name()},
                    {"operadic", ev ? nlohmann::json(*ev) : nlohmann::json("no witness in library")},
                    {"commutative", com}});
    if (ev && com) both.push_back(w);
  }
  // the verdicts themselves are the findings: a failed commutativity check is not a failure of the diagnosis
  r.verdict = Verdict::Pass;
  r.failed = 0;

  // evidence upward, commutativity downward along the diamond's inclusions
  bool consistent = true;
  for (const auto& a : ws)
    for (const auto& b : ws)
      if (a.included_in(b) && !(a == b)) {
        if (evidence[a.name()] && !evidence[b.name()]) consistent = false;
        if (commutative[b.name()] && !commutative[a.name()]) consistent = false;
      }
  r.details["diamond"] = rows;
  r.details["consistent"] = consistent;
  auto inter = nlohmann::json::array();
  for (const auto& w : both) inter.push_back(w.name());
  r.details["intersection"] = inter;
  if (!consistent) r.fail({{"law", "diamond consistency"}, {"diamond", rows}});

  std::optional<DistLaw> law;
  try {
    if (!both.empty()) {
      const VerbalCat& w = both.front();
      r.details["suggestion"] = "direct delta at " + w.name();
      if (opt.synthesize)
        law = synth_delta(w, operad_by_name(*evidence[w.name()], cfg.pool), t, x, cfg, {false, false, opt.bound, {}});
    } else {
      std::optional<VerbalCat> best;
      for (const auto& w : {VerbalCat::Fall(), VerbalCat::Finj(), VerbalCat::Fsurj(), VerbalCat::Fbij()})
        if (commutative[w.name()]) {
          best = w;
          break;
        }
      if (!best) {
        r.details["suggestion"] = "none";
      } else {
        r.details["suggestion"] = "refine " + s + " at " + best->name();
        if (opt.synthesize)
          law = synth_delta(*best, monad_to_operad(smonad, *best, 6), t, x, cfg, {false, false, opt.bound, {}});
      }
    }
  } catch (const Refusal& e) {
    r.refuse(e.what());
  }
  if (law) {
    r.details["law"] = law->name();
    auto b = verify_beck(*law, x, cfg, opt.beck);
    r.add(std::move(b));
    if (auto wr = std::dynamic_pointer_cast<const WriterMonad>(t);
        wr && s == "pfin" && law->w == VerbalCat::Fbij() && !both.size())
      r.add(detail::check_writer_instance(*law, wr->monoid(), x, cfg));
  }
  return r;
}

}  // namespace monadlab
