#pragma once

// Pinned acceptance bundles. Each criterion returns one Report; the suites
// group them and the acceptance binary prints one line per criterion.

#include <chrono>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <monadlab/coend.hpp>
#include <monadlab/distlaw.hpp>
#include <monadlab/wcomm.hpp>

namespace monadlab::suites {

/// A boolean claim as a report.
inline Report fact(std::string check, std::string subject, bool holds, nlohmann::json got = nullptr,
                   nlohmann::json want = nullptr) {
  Report r;
  r.check = std::move(check);
  r.subject = std::move(subject);
  r.property = "fact";
  r.checked = 1;
  if (!holds) r.fail({{"got", got}, {"want", want}});
  return r;
}

/// Wraps a report whose expected outcome is not necessarily a pass: the
/// wrapper passes iff `holds`, and keeps the inner report as its only child.
inline Report expectation(std::string check, Report inner, bool holds, std::string claim) {
  Report r;
  r.check = std::move(check);
  r.subject = inner.subject;
  r.property = inner.property;
  r.seed = inner.seed;
  r.checked = inner.checked;
  r.untested = inner.untested;
  r.sampled = inner.sampled;
  r.details["claim"] = std::move(claim);
  if (!holds) r.fail({{"inner_verdict", inner.label()}, {"inner_witness", inner.witness}});
  r.children.push_back(std::move(inner));
  return r;
}

inline const Report* child(const Report& r, const std::string& check) {
  for (const auto& c : r.children)
    if (c.check == check) return &c;
  return nullptr;
}

inline Report group(std::string check, std::string subject) {
  Report r;
  r.check = std::move(check);
  r.subject = std::move(subject);
  r.property = "bundle";
  return r;
}

// ------------------------------------------------------------ criteria

inline Report star_closure(const Sampling&) {
  Report top = group("star-closure", "shipped verbal categories");
  for (const auto& w : shipped_verbal_categories()) {
    using K = VerbalCat::Kind;
    int bound = (w.kind == K::Fid || w.kind == K::Fbij || w.kind == K::Fminj) ? 4 : 3;
    auto res = check_star_closure(w, bound);
    Report r = fact("star-closure", w.name() + " at arity <= " + std::to_string(bound), res.pass);
    r.checked = res.checked;
    r.property = "verbal.star-closure";
    top.add(std::move(r));
  }
  auto neg = check_star_closure(VerbalCat::Mono(), 3);
  bool holds = !neg.pass && neg.beta == FinFn::bang(2) && neg.alphas == std::vector<FinFn>{FinFn::id(2)} &&
               neg.result && neg.result->table == std::vector<int>{0, 1, 0, 1};
  nlohmann::json got = nullptr;
  if (neg.result) got = neg.result->table;
  top.add(fact("star-closure-negative", "Mono at arity <= 3", holds, got, {0, 1, 0, 1}));
  return top;
}

inline Report operad_axioms(const Sampling& cfg) {
  Report top = group("operad-axioms", "shipped operads");
  for (const auto& n : shipped_operad_names()) top.add(check_operad(operad_by_name(n, cfg.pool), cfg, {3, 500}));
  auto broken = check_operad(monoid0_action_operad(zmod_mult_monoid(3), true), cfg, {3, 500});
  const Report* fun = child(broken, "operad-functoriality");
  const Report* com = child(broken, "operad-compatibility");
  bool holds = fun && fun->ok() && com && com->verdict == Verdict::Fail;
  top.add(expectation("broken-variant", std::move(broken), holds, "padding with 1 fails compatibility only"));
  return top;
}

inline Report monad_laws(const Sampling& cfg) {
  Report top = group("monad-laws", "zoo at |X| <= 3");
  for (const auto& n : zoo_names())
    for (int k = 0; k <= 3; ++k) top.add(check_monad_laws(builtin_monad(n, cfg.pool), Carrier::atoms(k), cfg));
  return top;
}

inline Report characterizations(const Sampling& cfg) {
  Report top = group("characterizations", "zoo at |X| = 2");
  auto x = Carrier::atoms(2);
  for (const auto& n : zoo_names()) top.add(crosscheck_characterizations(builtin_monad(n, cfg.pool), x, 3, cfg));

  auto verdict = [&](const MonadPtr& t, const VerbalCat& w) { return check_w_commutative_all(t, w, x, 3, cfg).ok(); };
  auto d = dist_monad(cfg.pool), p = pfin_monad(), e2 = exception_monad(2), r2 = reader_monad(2);
  struct Named {
    MonadPtr t;
    VerbalCat w;
    bool want;
  };
  for (const auto& c : std::vector<Named>{{d, VerbalCat::Finj(), true},
                                          {d, VerbalCat::Fsurj(), false},
                                          {p, VerbalCat::Fbij(), true},
                                          {p, VerbalCat::Finj(), false},
                                          {p, VerbalCat::Fsurj(), false},
                                          {e2, VerbalCat::Fbij(), false},
                                          {e2, VerbalCat::Fsurj(), false},
                                          {r2, VerbalCat::Fall(), true}}) {
    bool got = verdict(c.t, c.w);
    top.add(fact("named-verdict", c.t->name() + " " + c.w.name() + "-commutative", got == c.want, got, c.want));
  }
  // exceptions satisfy the relevance side of the surjection row only
  bool rel = predicate_relevant(e2, x, cfg).ok();
  bool com = predicate_commutative(e2, x, cfg).ok();
  top.add(fact("named-verdict", e2->name() + " relevant but not commutative", rel && !com,
               {{"relevant", rel}, {"commutative", com}}, {{"relevant", true}, {"commutative", false}}));
  return top;
}

inline Report coend_fast_paths(const Sampling& cfg) {
  Report top = group("coend-fast-paths", "shipped operads over Fid, Fbij, Fsurj");
  for (const auto& n : shipped_operad_names()) {
    auto o = operad_by_name(n, cfg.pool);
    using K = VerbalCat::Kind;
    auto k = o->w().kind;
    if (k != K::Fid && k != K::Fbij && k != K::Fsurj) continue;
    top.add(check_fast_paths(o, 3, 2, cfg));
  }
  auto m = induced_monad(operad_by_name("terminal:Fsurj"));
  auto phi = multiset_iso(pfin_monad(), [](const Val&, std::size_t) { return Val::num(1); });
  for (int k = 0; k <= 3; ++k) {
    auto els = m->enumerate(Carrier::atoms(k), 4096);
    std::size_t want = std::size_t{1} << k;
    top.add(fact("element-count", m->name() + " on X" + std::to_string(k), els && els->size() == want,
                 els ? nlohmann::json(els->size()) : nlohmann::json(nullptr), want));
    top.add(check_monad_morphism(m, pfin_monad(), phi, Carrier::atoms(k), cfg, true, "to pfin"));
  }
  return top;
}

struct Triple {
  VerbalCat w;
  std::string operad;
  std::string monad;
};

inline std::vector<Triple> positive_triples() {
  return {{VerbalCat::Fbij(), "extend:terminal:Fid:Fbij", "multiset:int"},
          {VerbalCat::Finj(), "extend:terminal:Fbij:Finj", "dist"},
          {VerbalCat::Fsurj(), "semigroup", "maybe"},
          {VerbalCat::Fall(), "extend:exception:1:F", "reader:2"},
          {VerbalCat::Fall(), "extend:terminal:Fid:F", "reader:2"},
          {VerbalCat::Fid(), "exception:2", "list"},
          {VerbalCat::Fid(), "writer:z2mult", "pfin"},
          {VerbalCat::Finj(), "opd:Finj:valuation", "pfin+"},
          {VerbalCat::Finj(), "opd:Finj:valuation", "dist"}};
}

/// (v + 2w)(x + 3y + z) through the law of the list operad over integer
/// multisets, read back as words.
inline Report ring_computation(const Sampling& cfg) {
  auto d = synth_delta(VerbalCat::Fbij(), operad_by_name("extend:terminal:Fid:Fbij"),
                       builtin_monad("multiset:int", cfg.pool), Carrier::atoms(2), cfg);
  auto ext = std::dynamic_pointer_cast<const ExtendedOperad>(d.o);
  auto a = [](int i) { return Val::atom(i); };
  Val prod = ext->canon(unit_val(), FinFn::id(2));
  Val t0 = Val::bag({{a(0), Val::num(1)}, {a(1), Val::num(2)}});
  Val t1 = Val::bag({{a(2), Val::num(1)}, {a(3), Val::num(3)}, {a(4), Val::num(1)}});
  Val out = d(d.s->elem(prod, {t0, t1}));
  std::map<std::vector<int>, std::int64_t> got;
  for (const auto& [word, c] : out.entries()) {
    auto xs = word[1].items();
    FinFn alpha = FinFn::from_val(word[0][1], static_cast<int>(xs.size()));
    std::vector<int> w;
    for (const auto& v : reindex(xs, alpha)) w.push_back(static_cast<int>(v.as_atom()));
    got[w] = c.as_num().num();
  }
  std::map<std::vector<int>, std::int64_t> want{{{0, 2}, 1}, {{0, 3}, 3}, {{0, 4}, 1},
                                                {{1, 2}, 2}, {{1, 3}, 6}, {{1, 4}, 2}};
  auto js = [](const std::map<std::vector<int>, std::int64_t>& m) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [w, c] : m) j.push_back({{"word", w}, {"coefficient", c}});
    return j;
  };
  return fact("ring-computation", d.name(), got == want, js(got), js(want));
}

inline Report positive_laws(const Sampling& cfg) {
  Report top = group("beck-positive", "positive triples at |X| = 2");
  auto x = Carrier::atoms(2);
  for (const auto& tr : positive_triples()) {
    auto d = synth_delta(tr.w, operad_by_name(tr.operad, cfg.pool), builtin_monad(tr.monad, cfg.pool), x, cfg);
    auto r = verify_beck(d, x, cfg);
    bool counted = true;
    for (const auto& c : {"eta-S", "mu-S", "eta-T", "mu-T"}) {
      const Report* ax = child(r, c);
      counted = counted && ax && ax->checked > 0 && (!ax->sampled || ax->checked >= cfg.samples);
    }
    top.add(expectation("beck-axioms", std::move(r), counted, "all four axioms pass with enough points"));
  }
  top.add(ring_computation(cfg));
  return top;
}

inline Report negative_probe(const Sampling& cfg) {
  auto x = Carrier::atoms(2);
  auto d = synth_delta(VerbalCat::Fid(), terminal_operad(VerbalCat::Fid()), list_monad(), x, cfg);
  auto r = verify_beck(d, x, cfg);
  bool holds = r.verdict == Verdict::Fail;
  for (const auto& c : {"eta-S", "mu-S", "eta-T"}) holds = holds && child(r, c) && child(r, c)->ok();
  const Report* mu = child(r, "mu-T");
  holds = holds && mu && mu->verdict == Verdict::Fail && mu->witness.contains("points_used") &&
          mu->witness["points_used"].get<int>() <= 2;
  return expectation("beck-negative", std::move(r), holds, "only the multiplication of T fails, witness on <= 2 points");
}

/// The valuation monad with its coefficients listed from the pool, so that
/// bounded parts of its refinements can be enumerated. The operations are
/// those of valuation_monad(pool).
inline std::shared_ptr<const MultisetMonad> listed_valuation(const std::vector<Rational>& pool) {
  auto s = std::make_shared<Semiring>(*qnonneg_semiring(pool));
  std::set<Val> els;
  for (const auto& r : pool)
    if (r >= Rational(0)) els.insert(Val::num(r));
  s->elements = std::vector<Val>(els.begin(), els.end());
  return std::make_shared<MultisetMonad>(s, false, "valuation");
}

inline Report refinement_isos(const Sampling& cfg) {
  Report top = group("refinements", "isomorphisms and counits at |X| <= 3");
  auto one_bag = [](const Val& c) { return Val::bag({{c, Val::num(1)}}); };
  auto pf = std::dynamic_pointer_cast<const MultisetMonad>(pfin_monad());
  auto v = listed_valuation(cfg.pool);
  auto nonzero = [](std::shared_ptr<const MultisetMonad> s, std::function<Val(const Val&)> f) {
    return [s, f](const Val& p, std::size_t i) -> std::optional<Val> {
      Val c = position_coeff(*s, p, i);
      if (c == s->semiring().zero) return std::nullopt;
      return f(c);
    };
  };
  auto rf_pf_inj = refine(pf, VerbalCat::Finj());
  auto rf_pf_bij = refine(pf, VerbalCat::Fbij());
  auto rf_v_inj = refine(v, VerbalCat::Finj());
  auto rf_v_bij = refine(v, VerbalCat::Fbij());
  auto nat = builtin_monad("multiset:nat", cfg.pool);
  auto pf_mon = builtin_monad("multiset:monoid-semiring:bool-and", cfg.pool);
  auto v_mon = builtin_monad("multiset:monoid-semiring:qnonneg-mult", cfg.pool);
  auto v_con = builtin_monad("multiset:contracted:qnonneg-mult", cfg.pool);
  struct Case {
    std::shared_ptr<const InducedMonad> rf;
    MonadPtr src;
    MonadPtr target;
    Fn phi;
  };
  std::vector<Case> cases = {
      {rf_pf_inj, pf, nat, multiset_iso(nat, nonzero(pf, [](const Val&) { return Val::num(1); }))},
      {rf_pf_bij, pf, pf_mon,
       multiset_iso(pf_mon,
                    [pf, one_bag](const Val& p, std::size_t i) {
                      return one_bag(Val::atom(position_coeff(*pf, p, i) == pf->semiring().zero ? 0 : 1));
                    })},
      {rf_v_bij, v, v_mon,
       multiset_iso(v_mon, [v, one_bag](const Val& p, std::size_t i) { return one_bag(position_coeff(*v, p, i)); })},
      {rf_v_inj, v, iv_monad(), indexed_valuation_view(v)},
      {rf_v_inj, v, v_con, multiset_iso(v_con, nonzero(v, one_bag))},
  };
  for (int k = 0; k <= 3; ++k) {
    auto x = Carrier::atoms(k);
    for (const auto& c : cases) {
      std::string label = c.rf->name() + " to " + c.target->name();
      top.add(check_monad_morphism_bounded(c.rf, c.target, c.phi, x, 2, 2, true, label));
      top.add(check_monad_morphism(c.rf, c.target, c.phi, x, cfg, true, label));
    }
    for (const auto& [rf, s] : std::vector<std::pair<std::shared_ptr<const InducedMonad>, MonadPtr>>{
             {rf_pf_inj, pf}, {rf_pf_bij, pf}, {rf_v_inj, v}}) {
      MonadPtr src = s;
      Fn eps = [src](const Val& e) { return counit(*src, e); };
      top.add(check_monad_morphism_bounded(rf, src, eps, x, 2, 2, false, "counit of " + rf->name()));
      top.add(check_monad_morphism(rf, src, eps, x, cfg, false, "counit of " + rf->name()));
    }
  }
  return top;
}

inline Report invariance(const Sampling& cfg) {
  Report top = group("invariance", "extension along a larger category");
  auto x = Carrier::atoms(2);
  top.add(verify_invariance(terminal_operad(VerbalCat::Fbij()), VerbalCat::Finj(), dist_monad(cfg.pool), x, cfg));
  top.add(verify_invariance(exception_operad(1), VerbalCat::Fall(), reader_monad(2), x, cfg));
  for (const auto& c : top.children)
    if (c.checked == 0) top.fail({{"empty", c.subject}});
  return top;
}

inline Report diagnosis(const Sampling& cfg) {
  Report top = group("diagnosis", "empty intersections and their repair");
  auto x = Carrier::atoms(2);
  for (const auto& s : {"dist", "pfin"}) {
    auto r = diagnose(s, pfin_monad(), x, cfg);
    const Report* law = child(r, "distributive-law");
    bool holds = r.ok() && r.details["intersection"].empty() && r.details["consistent"].get<bool>() &&
                 r.details["suggestion"] != "none" && law && law->ok() && law->checked > 0;
    top.add(expectation("diagnosis", std::move(r), holds, "empty intersection, consistent, refined law verified"));
  }
  auto r = diagnose("pfin", writer_monad(monoid_by_name("z3add")), x, cfg);
  const Report* wi = child(r, "writer-instance");
  bool holds = r.ok() && wi && wi->ok() && wi->checked > 0;
  top.add(expectation("diagnosis", std::move(r), holds, "writer instance checked pointwise"));
  return top;
}

// ------------------------------------------------------------ bundles

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;  // 0 means no runtime bound
  std::function<Report(const Sampling&)> run;
};

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> cs = {
      {1, "verbal closure", 10, star_closure},
      {2, "operad axioms", 60, operad_axioms},
      {3, "monad laws over the zoo", 60, monad_laws},
      {4, "commutativity characterizations", 0, characterizations},
      {5, "coend fast paths", 0, coend_fast_paths},
      {6, "positive distributive laws", 600, positive_laws},
      {7, "negative distributive-law probe", 0, negative_probe},
      {8, "refinement isomorphisms", 0, refinement_isos},
      {9, "invariance under extension", 0, invariance},
      {10, "diagnosis", 0, diagnosis},
  };
  return cs;
}

inline const std::map<std::string, std::vector<int>>& suite_members() {
  static const std::map<std::string, std::vector<int>> m = {
      {"laws", {3}},          {"operads", {1, 2, 5}},  {"wcomm", {4}},
      {"distlaws", {6, 7, 9, 10}}, {"refinements", {8}}, {"all", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}},
  };
  return m;
}

inline std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : suite_members()) out.push_back(k);
  return out;
}

/// Runs a bundle. Wall-clock seconds per criterion go to `timing` so that
/// the report itself stays deterministic.
inline Report suite(const std::string& name, const Sampling& cfg, nlohmann::json* timing = nullptr) {
  auto it = suite_members().find(name);
  if (it == suite_members().end()) throw UsageError("suite: unknown suite '" + name + "'");
  Report top = group("suite", name);
  for (int id : it->second) {
    const auto& c = criteria()[static_cast<std::size_t>(id - 1)];
    auto t0 = std::chrono::steady_clock::now();
    Report r = c.run(cfg);
    r.details["criterion"] = c.id;
    r.details["title"] = c.title;
    if (timing)
      (*timing)[std::to_string(c.id)] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    top.add(std::move(r));
  }
  return top;
}

}  // namespace monadlab::suites
