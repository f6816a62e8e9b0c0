#pragma once

#include <string>
#include <vector>

#include "finord.hpp"
#include "monads.hpp"
#include "report.hpp"

namespace monadlab {

/// Evaluates both sides of the W-commutativity square for one alpha and one
/// input tuple: psi^(m)(t . alpha) and T(x |-> x . alpha)(psi^(n)(t)).
inline std::pair<Val, Val> w_commutativity_sides(const Monad& t, const FinFn& alpha, const std::vector<Val>& ts,
                                                 bool prime = false) {
  Val lhs = psi_n(t, reindex(ts, alpha), prime);
  Val rhs = t.map([&](const Val& xs) { return reindex_tuple(xs, alpha); }, psi_n(t, ts, prime));
  return {lhs, rhs};
}

/// Heterogeneous form: position i of an n-tuple draws from carriers[i % size].
inline Report check_w_commutative_multi(const MonadPtr& t, const VerbalCat& w, const std::vector<Carrier>& carriers,
                                        int bound, const Sampling& cfg, bool prime = false) {
  Report r;
  r.check = "w-commutativity";
  std::string cs;
  for (const auto& c : carriers) cs += (cs.empty() ? "" : ",") + c.name;
  r.subject = t->name() + " at " + w.name() + " on (" + cs + ")";
  r.property = "w-commutativity.square";
  r.seed = cfg.seed;
  r.details["bound"] = bound;
  r.details["psi"] = prime ? "psi'" : "psi";
  Rng rng(cfg.seed);
  std::vector<Carrier> tcs;
  for (const auto& c : carriers) tcs.push_back(apply(t, c, cfg));
  for (const auto& alpha : w.enumerate_all(bound)) {
    std::vector<Carrier> pos;
    for (int i = 0; i < alpha.cod; ++i) pos.push_back(tcs[static_cast<std::size_t>(i) % tcs.size()]);
    bool exhaustive = detail::over_tuples(pos, cfg, rng, [&](const std::vector<Val>& ts) {
      auto [lhs, rhs] = w_commutativity_sides(*t, alpha, ts, prime);
      ++r.checked;
      if (lhs != rhs)
        r.fail({{"alpha", alpha.to_json()},
                {"input", detail::vals_json(ts)},
                {"input_values", [&] {
                   auto a = nlohmann::json::array();
                   for (const auto& v : ts) a.push_back(v.to_json());
                   return a;
                 }()},
                {"lhs", lhs.str()},
                {"rhs", rhs.str()}});
    });
    if (!exhaustive) r.sampled = true;
  }
  return r;
}

inline Report check_w_commutative(const MonadPtr& t, const VerbalCat& w, const Carrier& x, int bound,
                                  const Sampling& cfg, bool prime = false) {
  return check_w_commutative_multi(t, w, {x}, bound, cfg, prime);
}

/// Runs the check on x and on the degenerate carriers 0 and 1.
inline Report check_w_commutative_all(const MonadPtr& t, const VerbalCat& w, const Carrier& x, int bound,
                                      const Sampling& cfg, bool prime = false) {
  Report r;
  r.check = "w-commutativity";
  r.subject = t->name() + " at " + w.name();
  r.property = "w-commutativity.square";
  r.seed = cfg.seed;
  for (const auto& c : {Carrier::atoms(0), Carrier::atoms(1), x})
    r.add(check_w_commutative(t, w, c, bound, cfg, prime));
  return r;
}

// ------------------------------------------------------------ predicates

namespace detail {

template <class F>
Report predicate(const std::string& name, const std::string& property, const MonadPtr& t, const Carrier& x,
                 const Sampling& cfg, int arity, F&& body) {
  Report r;
  r.check = name;
  r.subject = t->name();
  r.property = property;
  r.seed = cfg.seed;
  Rng rng(cfg.seed);
  for (const auto& c : {Carrier::atoms(0), Carrier::atoms(1), x}) {
    Carrier tc = apply(t, c, cfg);
    std::vector<Carrier> cs(static_cast<std::size_t>(arity), tc);
    bool exhaustive = over_tuples(cs, cfg, rng, [&](const std::vector<Val>& ts) {
      auto [lhs, rhs] = body(ts);
      ++r.checked;
      if (lhs != rhs)
        r.fail({{"carrier", c.name}, {"input", vals_json(ts)}, {"lhs", lhs.str()}, {"rhs", rhs.str()}});
    });
    if (!exhaustive) r.sampled = true;
  }
  return r;
}

}  // namespace detail

/// T!_X == eta_1 . ! on TX.
inline Report predicate_affine(const MonadPtr& t, const Carrier& x, const Sampling& cfg) {
  return detail::predicate("affine", "predicate.affine", t, x, cfg, 1, [&](const std::vector<Val>& ts) {
    return std::pair{t->map([](const Val&) { return unit_val(); }, ts[0]), t->unit(unit_val())};
  });
}

/// psi(b, a) == T(swap)(psi(a, b)).
inline Report predicate_commutative(const MonadPtr& t, const Carrier& x, const Sampling& cfg) {
  return detail::predicate("commutative", "predicate.commutative", t, x, cfg, 2, [&](const std::vector<Val>& ts) {
    Val lhs = psi(*t, ts[1], ts[0]);
    Val rhs = t->map([](const Val& p) { return pair(p[1], p[0]); }, psi(*t, ts[0], ts[1]));
    return std::pair{lhs, rhs};
  });
}

/// psi^(n)(e, ..., e) == T(diagonal)(e).
inline Report predicate_n_relevant(const MonadPtr& t, const Carrier& x, const Sampling& cfg, int n) {
  return detail::predicate(n == 2 ? "relevant" : std::to_string(n) + "-relevant",
                           n == 2 ? "predicate.relevant" : "predicate.n-relevant", t, x, cfg, 1,
                           [&](const std::vector<Val>& ts) {
                             Val lhs = psi_n(*t, std::vector<Val>(static_cast<std::size_t>(n), ts[0]));
                             Val rhs = t->map(
                                 [n](const Val& v) { return Val::tuple(std::vector<Val>(static_cast<std::size_t>(n), v)); },
                                 ts[0]);
                             return std::pair{lhs, rhs};
                           });
}

inline Report predicate_relevant(const MonadPtr& t, const Carrier& x, const Sampling& cfg) {
  return predicate_n_relevant(t, x, cfg, 2);
}

inline Report predicate_hyperaffine(const MonadPtr& t, const Carrier& x, const Sampling& cfg) {
  Report r;
  r.check = "hyperaffine";
  r.subject = t->name();
  r.property = "predicate.hyperaffine";
  r.seed = cfg.seed;
  r.add(predicate_affine(t, x, cfg));
  r.add(predicate_relevant(t, x, cfg));
  return r;
}

/// Evaluates both sides of each of the seven characterizations of
/// W-commutativity and fails on any disagreement.
inline Report crosscheck_characterizations(const MonadPtr& t, const Carrier& x, int bound, const Sampling& cfg,
                                           int n_relevant = 3) {
  Report r;
  r.check = "characterization-crosscheck";
  r.subject = t->name() + " on " + x.name;
  r.property = "w-commutativity.characterizations";
  r.seed = cfg.seed;
  bool aff = predicate_affine(t, x, cfg).ok();
  bool com = predicate_commutative(t, x, cfg).ok();
  bool rel = predicate_relevant(t, x, cfg).ok();
  bool nrel = predicate_n_relevant(t, x, cfg, n_relevant).ok();
  struct Row {
    VerbalCat w;
    bool predicted;
    std::string formula;
  };
  std::vector<Row> rows = {
      {VerbalCat::Fid(), true, "always"},
      {VerbalCat::Fminj(), aff, "affine"},
      {VerbalCat::Fbij(), com, "commutative"},
      {VerbalCat::Finj(), com && aff, "commutative and affine"},
      {VerbalCat::Fsurj(), com && rel, "commutative and relevant"},
      {VerbalCat::Fall(), aff && rel, "hyperaffine"},
      {VerbalCat::FsurjN(n_relevant), com && nrel, "commutative and " + std::to_string(n_relevant) + "-relevant"},
  };
  r.details["predicates"] = {{"affine", aff}, {"commutative", com}, {"relevant", rel}, {"n-relevant", nrel}};
  r.details["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    // the n-relevance row needs arity n to see any non-bijection
    int b = row.w.kind == VerbalCat::Kind::FsurjN ? std::max(bound, n_relevant) : bound;
    auto wr = check_w_commutative_all(t, row.w, x, b, cfg);
    bool direct = wr.ok();
    r.checked += wr.checked;
    r.sampled = r.sampled || wr.sampled;
    r.details["rows"].push_back(
        {{"w", row.w.name()}, {"w_commutative", direct}, {"formula", row.formula}, {"formula_holds", row.predicted}});
    if (direct != row.predicted)
      r.fail({{"w", row.w.name()}, {"w_commutative", direct}, {"formula", row.formula}, {"formula_holds", row.predicted}});
  }
  return r;
}

}  // namespace monadlab
