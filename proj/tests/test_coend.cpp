#include <gtest/gtest.h>

#include <set>

#include <monadlab/coend.hpp>

using namespace monadlab;

namespace {

Val a(int i) { return Val::atom(i); }

std::vector<std::string> canon_operads() {
  return {"terminal:Fid",  "terminal:Fbij",     "terminal:Fsurj",         "terminal:Finj",
          "terminal:F",    "exception:1",       "monoid-action:z2mult",   "monoid-action:trans2",
          "writer:z3add",  "monoid0-action:z3mult", "extend:terminal:Fid:Fbij"};
}

Val one_bag(const Val& c) { return Val::bag({{c, Val::num(1)}}); }

}  // namespace

TEST(Canonical, IdempotentAndConstantOnClasses) {
  Sampling cfg;
  Rng rng(11);
  for (const auto& name : canon_operads()) {
    auto o = operad_by_name(name);
    CanonOptions opt;
    opt.carrier = Carrier::atoms(2);
    for (int i = 0; i < 40; ++i) {
      int n = std::uniform_int_distribution<int>(0, 3)(rng);
      Val p;
      try {
        p = o->sample(n, rng, cfg);
      } catch (const Refusal&) {
        continue;
      }
      std::vector<Val> xs;
      for (int k = 0; k < n; ++k) xs.push_back(a(std::uniform_int_distribution<int>(0, 1)(rng)));
      auto r = canonicalize(*o, p, xs, opt);
      auto again = canonicalize(*o, r.p, r.xs, opt);
      EXPECT_EQ(coend_elem(again.p, again.xs), coend_elem(r.p, r.xs)) << name;
      // every pair reachable by the generating relation lands on the same form
      auto g = canonicalize(*o, p, xs, opt, CanonMethod::Generic);
      if (!g.complete) continue;
      for (const auto& k : g.visited) {
        if (static_cast<int>(k[0].size()) > 3) continue;
        auto c = canonicalize(*o, k[1], k[0].items(), opt);
        EXPECT_EQ(coend_elem(c.p, c.xs), coend_elem(r.p, r.xs)) << name << " from " << k.str();
      }
    }
  }
}

TEST(Canonical, FastPathsAgreeWithTheGenericClosure) {
  for (const auto& name : canon_operads()) {
    auto o = operad_by_name(name);
    for (int k = 1; k <= 3; ++k) {
      CanonOptions opt;
      opt.carrier = Carrier::atoms(k);
      opt.bound = 4;
      for (int n = 0; n <= 2; ++n) {
        auto ps = o->elems(n, 64);
        if (!ps) continue;
        for (const auto& xs : detail::all_tuples(*opt.carrier->elems, static_cast<std::size_t>(n)))
          for (const auto& p : *ps) {
            auto fast = canonicalize(*o, p, xs, opt);
            auto slow = canonicalize(*o, p, xs, opt, CanonMethod::Generic);
            ASSERT_TRUE(slow.complete) << name;
            EXPECT_EQ(coend_elem(fast.p, fast.xs), coend_elem(slow.p, slow.xs))
                << name << " " << fast.method << " " << coend_elem(p, xs).str();
          }
      }
    }
  }
}

TEST(Canonical, BlockShortcutMatchesSearch) {
  auto o = operad_by_name("monoid-action:z3mult");
  std::vector<std::pair<int, int>> blocks{{0, 3}, {3, 5}};
  auto perms = VerbalCat::Fbij().enumerate(5, 5, 5);
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    Val p = o->sample(5, rng, Sampling{});
    std::optional<Val> best;
    for (const auto& s : perms) {
      bool fixes = true;
      for (int k = 0; k < 5; ++k) fixes = fixes && (s(k) < 3) == (k < 3);
      if (!fixes) continue;
      Val c = o->act(s, p);
      if (!best || c < *best) best = c;
    }
    EXPECT_EQ(o->least_in_blocks(p, blocks), best);
  }
}

TEST(Canonical, MethodsAreDispatchedByCategory) {
  EXPECT_EQ(canonicalize(*operad_by_name("terminal:Fid"), unit_val(), {a(1), a(0)}).method, "identity");
  EXPECT_EQ(canonicalize(*operad_by_name("terminal:Fbij"), unit_val(), {a(1), a(0)}).method, "sorting");
  EXPECT_EQ(canonicalize(*operad_by_name("terminal:Fsurj"), unit_val(), {a(1), a(1)}).method, "collapse");
  auto r = canonicalize(*operad_by_name("terminal:Finj"), unit_val(), {a(1), a(0)});
  EXPECT_EQ(r.method, "normal-form");
  EXPECT_TRUE(r.xs.empty());
}

TEST(Canonical, NodeLimitRefuses) {
  CanonOptions opt;
  opt.carrier = Carrier::atoms(3);
  opt.node_limit = 5;
  EXPECT_THROW(canonicalize(*operad_by_name("terminal:F"), unit_val(), {a(0), a(1)}, opt, CanonMethod::Generic),
               Refusal);
}

TEST(Induced, MonadLaws) {
  Sampling cfg;
  cfg.samples = 100;
  for (const auto& name : canon_operads()) {
    auto m = induced_monad(operad_by_name(name));
    for (int k : {0, 2}) {
      auto r = check_monad_laws(m, Carrier::atoms(k), cfg);
      EXPECT_TRUE(r.ok()) << name << " " << r.to_json()["witness"].dump();
    }
  }
}

TEST(Induced, TerminalOverIdentitiesIsLists) {
  auto m = induced_monad(operad_by_name("terminal:Fid"));
  auto r = check_monad_morphism(m, list_monad(), [](const Val& t) { return t[1]; }, Carrier::atoms(2), Sampling{},
                                true);
  EXPECT_TRUE(r.ok()) << r.to_json().dump();
}

TEST(Induced, TerminalOverBijectionsIsNaturalMultisets) {
  auto target = builtin_monad("multiset:nat");
  auto phi = multiset_iso(target, [](const Val&, std::size_t) { return Val::num(1); });
  auto r = check_monad_morphism(induced_monad(operad_by_name("terminal:Fbij")), target, phi, Carrier::atoms(2),
                                Sampling{}, true);
  EXPECT_TRUE(r.ok()) << r.to_json().dump();
}

TEST(Induced, TerminalOverSurjectionsIsFinitePowerset) {
  auto target = pfin_monad();
  auto phi = multiset_iso(target, [](const Val&, std::size_t) { return Val::num(1); });
  auto m = induced_monad(operad_by_name("terminal:Fsurj"));
  for (int k = 0; k <= 3; ++k) {
    auto r = check_monad_morphism(m, target, phi, Carrier::atoms(k), Sampling{}, true);
    EXPECT_TRUE(r.ok()) << k << " " << r.to_json().dump();
    EXPECT_EQ(m->enumerate(Carrier::atoms(k), 4096)->size(), std::size_t{1} << k);
  }
}

TEST(Induced, ExceptionOperadGivesExceptions) {
  for (int c : {0, 1, 2}) {
    auto target = exception_monad(c);
    Fn phi = [](const Val& t) {
      return t[1].size() == 0 ? ExceptionMonad::raise(static_cast<int>(t[0].as_atom())) : Val::inj(1, t[1][0]);
    };
    auto r = check_monad_morphism(induced_monad(exception_operad(c)), target, phi, Carrier::atoms(2), Sampling{},
                                  true);
    EXPECT_TRUE(r.ok()) << c << " " << r.to_json().dump();
    EXPECT_FALSE(r.sampled);
  }
}

TEST(Induced, DistributionOperadGivesDistributions) {
  auto target = dist_monad();
  auto phi = multiset_iso(target, [](const Val& p, std::size_t i) { return p[i]; });
  auto r = check_monad_morphism(induced_monad(operad_by_name("distribution")), target, phi, Carrier::atoms(3),
                                Sampling{}, true);
  EXPECT_TRUE(r.ok()) << r.to_json().dump();
}

TEST(Induced, ExtensionDoesNotChangeTheMonad) {
  for (const auto& [base, w] : std::vector<std::pair<std::string, VerbalCat>>{
           {"monoid-action:z2mult", VerbalCat::Fall()},
           {"terminal:Fid", VerbalCat::Fbij()},
           {"exception:1", VerbalCat::Finj()},
           {"terminal:Fbij", VerbalCat::Fsurj()}}) {
    auto o = operad_by_name(base);
    auto target = induced_monad(o);
    auto r = check_monad_morphism(induced_monad(extend(o, w)), target, extension_iso(target), Carrier::atoms(2),
                                  Sampling{}, true);
    EXPECT_TRUE(r.ok()) << base << " " << w.name() << " " << r.to_json().dump();
  }
}

TEST(Induced, NonuniquenessMonadForgetsTheMonoid) {
  for (const auto& m : {"z2mult", "z3add", "trans2"}) {
    auto o = nonuniqueness_operad(monoid_by_name(m));
    std::vector<std::size_t> sizes;
    for (int k = 0; k <= 2; ++k) sizes.push_back(census(o, Carrier::atoms(k), 3)->size());
    EXPECT_EQ(sizes, (std::vector<std::size_t>{0, 1, 1})) << m;
  }
}

TEST(Refine, CounitIsAMonadMorphism) {
  Sampling cfg;
  cfg.samples = 100;
  for (const auto& s : {"pfin", "dist", "maybe", "reader:2", "multiset:int"})
    for (const auto& w : diamond()) {
      auto t = builtin_monad(s);
      auto rf = refine(t, w);
      auto r = check_monad_morphism(rf, t, [t](const Val& e) { return counit(*t, e); }, Carrier::atoms(2), cfg, false);
      EXPECT_TRUE(r.ok()) << s << " " << w.name() << " " << r.to_json()["witness"].dump();
      EXPECT_GT(r.checked, 0u);
    }
}

TEST(Refine, OverBijectionsCoefficientsBecomeMultisetsOfScalars) {
  // M^S refined over bijections is M with coefficients in the monoid semiring of (S, *)
  auto target = builtin_monad("multiset:monoid-semiring:bool-and");
  auto pf = std::dynamic_pointer_cast<const MultisetMonad>(pfin_monad());
  auto phi = multiset_iso(target, [pf](const Val& p, std::size_t i) {
    return one_bag(Val::atom(position_coeff(*pf, p, i) == pf->semiring().zero ? 0 : 1));
  });
  auto rf = refine(pf, VerbalCat::Fbij());
  auto r = check_monad_morphism(rf, target, phi, Carrier::atoms(2), Sampling{}, true);
  EXPECT_TRUE(r.ok()) << r.to_json().dump();

  // against the brute-force orbit presentation
  auto classes = census(rf->operad_ptr(), Carrier::atoms(2), 2);
  auto orbits = fbij_refinement_presentation(pfin_monad(), Carrier::atoms(2), 2, 4096);
  ASSERT_TRUE(classes && orbits);
  EXPECT_EQ(*classes, *orbits);
  std::set<Val> images;
  for (const auto& c : *classes) images.insert(phi(c));
  EXPECT_EQ(images.size(), classes->size());
}

TEST(Refine, OverInjectionsZeroCoefficientsDisappear) {
  auto target = builtin_monad("multiset:contracted:bool-and");
  auto pf = std::dynamic_pointer_cast<const MultisetMonad>(pfin_monad());
  auto phi = multiset_iso(target, [pf](const Val& p, std::size_t i) -> std::optional<Val> {
    if (position_coeff(*pf, p, i) == pf->semiring().zero) return std::nullopt;
    return one_bag(Val::atom(1));
  });
  auto rf = refine(pf, VerbalCat::Finj());
  auto r = check_monad_morphism(rf, target, phi, Carrier::atoms(2), Sampling{}, true);
  EXPECT_TRUE(r.ok()) << r.to_json().dump();

  // multisets of size <= 3 on two points
  auto classes = census(rf->operad_ptr(), Carrier::atoms(2), 3);
  ASSERT_TRUE(classes);
  EXPECT_EQ(classes->size(), 10u);
  std::set<Val> images;
  for (const auto& c : *classes) images.insert(phi(c));
  EXPECT_EQ(images.size(), 10u);
}

TEST(Refine, ValuationsOverInjectionsAreIndexedValuations) {
  auto v = std::dynamic_pointer_cast<const MultisetMonad>(valuation_monad());
  auto rf = refine(v, VerbalCat::Finj());
  Fn to_iv = [v](const Val& t) {
    std::vector<Val::Entry> es;
    const auto& xs = t[1].items();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      Val c = position_coeff(*v, t[0], i);
      if (c != v->semiring().zero) es.emplace_back(Val::tuple({c, xs[i]}), Val::num(1));
    }
    return make_bag(std::move(es), [](const Val& x, const Val& y) { return Val::num(x.as_num() + y.as_num()); },
                    Val::num(0));
  };
  auto r = check_monad_morphism(rf, iv_monad(), to_iv, Carrier::atoms(2), Sampling{}, true);
  EXPECT_TRUE(r.ok()) << r.to_json().dump();

  auto target = builtin_monad("multiset:contracted:qnonneg-mult");
  auto phi = multiset_iso(target, [v](const Val& p, std::size_t i) -> std::optional<Val> {
    Val c = position_coeff(*v, p, i);
    if (c == v->semiring().zero) return std::nullopt;
    return one_bag(c);
  });
  auto r2 = check_monad_morphism(rf, target, phi, Carrier::atoms(2), Sampling{}, true);
  EXPECT_TRUE(r2.ok()) << r2.to_json().dump();
}

TEST(Refine, OverSurjectionsIsASumOverFiniteSubsets) {
  for (const auto& s : {"pfin", "maybe", "reader:2"}) {
    auto t = builtin_monad(s);
    auto rf = refine(t, VerbalCat::Fsurj());
    for (int k = 0; k <= 2; ++k) {
      auto els = rf->enumerate(Carrier::atoms(k), 4096);
      auto pres = fsurj_refinement_presentation(t, Carrier::atoms(k), 4096);
      ASSERT_TRUE(els && pres) << s;
      std::set<Val> image;
      auto view = fsurj_refinement_view(t);
      for (const auto& e : *els) image.insert(view(e));
      EXPECT_EQ(image.size(), els->size()) << s;
      EXPECT_EQ(std::vector<Val>(image.begin(), image.end()), *pres) << s << " " << k;
    }
  }
}

TEST(Refine, MonadOperadsAreOperads) {
  for (const auto& s : {"pfin", "maybe", "multiset:int", "reader:2"})
    for (const auto& w : diamond()) {
      auto r = check_operad(monad_to_operad(builtin_monad(s), w, 4), Sampling{}, {3, 200});
      EXPECT_TRUE(r.ok()) << s << " " << w.name() << " " << r.to_json()["witness"].dump();
    }
}
