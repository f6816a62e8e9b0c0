#include <gtest/gtest.h>

#include <chrono>
#include <set>

#include <monadlab/operads.hpp>

using namespace monadlab;

namespace {

Val a(int i) { return Val::atom(i); }

const Report* child(const Report& r, const std::string& check) {
  for (const auto& c : r.children)
    if (c.check == check) return &c;
  return nullptr;
}

}  // namespace

TEST(Operads, ShippedOperadsPassTheAxioms) {
  Sampling cfg;
  for (const auto& n : shipped_operad_names()) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = check_operad(operad_by_name(n), cfg, {3, 500});
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_TRUE(r.ok()) << n << " " << r.to_json()["witness"].dump();
    EXPECT_GT(r.checked, 0u) << n;
    EXPECT_LT(secs, 60.0) << n;
  }
}

TEST(Operads, TerminalOperadEverywhere) {
  for (const auto& w : diamond()) {
    auto r = check_operad(terminal_operad(w), Sampling{});
    EXPECT_TRUE(r.ok()) << w.name();
    EXPECT_FALSE(r.sampled) << w.name();
  }
}

TEST(Operads, MonoidActionSubstitution) {
  auto m = transformation_monoid();
  auto o = monoid_action_operad(m);
  const auto& els = *m->elements;
  Val u = els[1], v = els[2], x = els[3], y = els[0], z = els[2];
  Val got = o->subst(Val::tuple({u, v}), {Val::tuple({x}), Val::tuple({y, z})}, {1, 2});
  EXPECT_EQ(got, Val::tuple({m->op(u, x), m->op(v, y), m->op(v, z)}));

  auto z5 = zmod_mult_monoid(5);
  auto o5 = monoid_action_operad(z5);
  EXPECT_EQ(o5->subst(atoms_tuple({2, 3}), {atoms_tuple({4}), atoms_tuple({2, 3})}, {1, 2}), atoms_tuple({3, 1, 4}));
}

TEST(Operads, Monoid0ActionPadsWithZero) {
  auto o = monoid0_action_operad(zmod_mult_monoid(3));
  FinFn alpha(2, 3, {2, 0});
  EXPECT_EQ(o->act(alpha, Val::tuple({a(1), a(2)})), Val::tuple({a(2), a(0), a(1)}));
  auto pre = o->preimages(alpha, Val::tuple({a(2), a(0), a(1)}));
  ASSERT_TRUE(pre && pre->size() == 1);
  EXPECT_EQ(pre->front(), Val::tuple({a(1), a(2)}));
  EXPECT_TRUE(o->preimages(alpha, Val::tuple({a(2), a(1), a(1)}))->empty());
}

TEST(Operads, PaddingWithOneBreaksCompatibility) {
  auto o = monoid0_action_operad(zmod_mult_monoid(3), true);
  auto r = check_operad(o, Sampling{});
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(child(r, "operad-functoriality")->ok());
  EXPECT_FALSE(child(r, "operad-compatibility")->ok());
}

TEST(Operads, Z2MultActionIsExhaustive) {
  auto r = check_operad(monoid_action_operad(zmod_mult_monoid(2)), Sampling{});
  EXPECT_TRUE(r.ok());
  EXPECT_FALSE(r.sampled);
  EXPECT_EQ(r.untested, 0u);
}

TEST(Operads, MonoidOperadSubstIsStar) {
  for (const auto& w : diamond()) {
    auto o = monoid_operad(w, 9);
    auto all = w.enumerate_all(3);
    std::size_t compared = 0;
    for (const auto& beta : all) {
      if (beta.cod > 2) continue;
      // families of maps into arities summing to at most 3
      std::vector<std::vector<FinFn>> fams{{}};
      for (int i = 0; i < beta.cod; ++i) {
        std::vector<std::vector<FinFn>> next;
        for (const auto& f : fams)
          for (const auto& al : all) {
            auto g = f;
            g.push_back(al);
            next.push_back(g);
          }
        fams = next;
      }
      for (const auto& fam : fams) {
        std::vector<Val> ps;
        std::vector<int> ms;
        int total = 0;
        for (const auto& al : fam) {
          ps.push_back(al.to_val());
          ms.push_back(al.cod);
          total += al.cod;
        }
        if (total > 3) continue;
        Val got = o->subst(beta.to_val(), ps, ms);
        EXPECT_EQ(got, star(beta, fam).to_val());
        ++compared;
      }
    }
    EXPECT_GT(compared, 0u) << w.name();
    EXPECT_EQ(o->ido(), FinFn::id(1).to_val());
  }
}

TEST(Operads, MonoidOperadRefusesPastInnerBound) {
  auto o = monoid_operad(VerbalCat::Fall(), 2);
  Val two = FinFn(2, 1, {0, 0}).to_val();
  EXPECT_THROW(o->subst(FinFn(2, 2, {0, 1}).to_val(), {two, two}, {1, 1}), Refusal);
}

TEST(Extension, TerminalFidGivesTheMonoidOperad) {
  for (const auto& w : diamond()) {
    auto ext = extend(terminal_operad(VerbalCat::Fid()), w);
    auto mon = monoid_operad(w);
    for (int n = 0; n <= 3; ++n) {
      auto e = ext->elems(n, 4096), m = mon->elems(n, 4096);
      ASSERT_TRUE(e && m);
      std::vector<Val> relabeled;
      for (const auto& x : *e) relabeled.push_back(x[1]);
      std::sort(relabeled.begin(), relabeled.end());
      EXPECT_EQ(relabeled, *m) << w.name() << " n=" << n;
    }
    // substitution agrees through the relabeling
    auto e1 = *ext->elems(1, 4096);
    auto e2 = *ext->elems(2, 4096);
    for (const auto& q : e2)
      for (const auto& p0 : e1)
        for (const auto& p1 : e1) {
          Val lhs;
          try {
            lhs = ext->subst(q, {p0, p1}, {1, 1});
          } catch (const Refusal&) {
            continue;
          }
          EXPECT_EQ(lhs[1], mon->subst(q[1], {p0[1], p1[1]}, {1, 1})) << w.name();
        }
  }
}

TEST(Extension, ToTheSameCategoryIsARelabeling) {
  auto base = monoid_action_operad(zmod_mult_monoid(2));
  auto ext = extend(base, VerbalCat::Fbij());
  for (int n = 0; n <= 3; ++n) EXPECT_EQ(ext->elems(n, 4096)->size(), base->elems(n, 4096)->size()) << n;
}

TEST(Extension, OrbitCount) {
  const int bound = 4;
  auto ext = extend(terminal_operad(VerbalCat::Fbij()), VerbalCat::Fall(), bound);
  // brute force: maps n' -> 2 up to permutations of n'
  std::set<std::pair<int, std::vector<int>>> orbits;
  for (int np = 0; np <= bound; ++np)
    for (const auto& f : VerbalCat::Fall().enumerate(np, 2, bound)) {
      std::vector<int> least = f.table;
      for (const auto& s : VerbalCat::Fbij().enumerate(np, np, bound)) {
        std::vector<int> g = compose(f, s).table;
        if (g < least) least = g;
      }
      orbits.insert({np, least});
    }
  EXPECT_EQ(ext->elems(2, 4096)->size(), orbits.size());
  EXPECT_EQ(orbits.size(), 15u);
}

TEST(Restriction, TerminalRestrictsToTerminal) {
  auto r = restrict(terminal_operad(VerbalCat::Fall()), VerbalCat::Fbij());
  auto t = terminal_operad(VerbalCat::Fbij());
  for (const auto& al : VerbalCat::Fbij().enumerate_all(3)) EXPECT_EQ(r->act(al, unit_val()), t->act(al, unit_val()));
  EXPECT_THROW(restrict(terminal_operad(VerbalCat::Fbij()), VerbalCat::Fall()), UsageError);
  EXPECT_TRUE(check_operad(r, Sampling{}).ok());
}

TEST(Restriction, AgreesOnTheSmallerCategory) {
  auto o = monoid0_action_operad(zmod_mult_monoid(3));
  auto r = restrict(o, VerbalCat::Fminj());
  Rng rng(1);
  for (const auto& al : VerbalCat::Fminj().enumerate_all(3)) {
    Val p = o->sample(al.dom, rng, Sampling{});
    EXPECT_EQ(r->act(al, p), o->act(al, p));
  }
}

TEST(Restriction, RestrictThenExtendChangesTheTheory) {
  auto t = terminal_operad(VerbalCat::Fsurj());
  auto back = extend(restrict(t, VerbalCat::Fbij()), VerbalCat::Fsurj());
  EXPECT_EQ(t->elems(1, 10)->size(), 1u);
  // one class of surjections n -> 1 for each 1 <= n <= 4
  EXPECT_EQ(back->elems(1, 4096)->size(), 4u);
}

TEST(Restriction, UnitMapIsInjective) {
  auto o = monoid_action_operad(zmod_add_monoid(3));
  auto ext = std::dynamic_pointer_cast<const ExtendedOperad>(extend(o, VerbalCat::Fall()));
  ASSERT_TRUE(ext);
  for (int n = 0; n <= 3; ++n) {
    std::set<Val> images;
    auto ps = *o->elems(n, 4096);
    for (const auto& p : ps) images.insert(ext->canon(p, FinFn::id(n)));
    EXPECT_EQ(images.size(), ps.size()) << n;
  }
}

TEST(Kleisli, PowersetOverBijectionsAtSizeTwo) {
  auto o = kleisli_end_operad(pfin_monad(), Carrier::atoms(2), VerbalCat::Fbij(), 2);
  auto r = check_operad(o, Sampling{}, {2, 500});
  EXPECT_TRUE(r.ok()) << r.to_json()["witness"].dump();
  EXPECT_EQ(r.untested, 0u);
}

TEST(Kleisli, UnitIsTheTabulatedUnit) {
  auto t = pfin_monad();
  auto o = std::dynamic_pointer_cast<const KleisliEndOperad>(
      kleisli_end_operad(t, Carrier::atoms(3), VerbalCat::Fbij(), 2));
  EXPECT_EQ(o->ido(), Val::tuple({t->unit(a(0)), t->unit(a(1)), t->unit(a(2))}));
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    Val g = o->sample(2, rng, Sampling{});
    EXPECT_EQ(o->subst(g, {o->ido(), o->ido()}, {1, 1}), g);
  }
}

TEST(Kleisli, NonCommutativeMonadFailsAssociativity) {
  for (const auto& name : {"writer:trans2", "exception:2"}) {
    auto t = builtin_monad(name);
    EXPECT_THROW(kleisli_end_operad(t, Carrier::atoms(2), VerbalCat::Fid(), 2), Refusal) << name;
    auto o = kleisli_end_operad(t, Carrier::atoms(2), VerbalCat::Fid(), 2, Sampling{}, true);
    auto r = check_operad(o, Sampling{}, {2, 500});
    EXPECT_FALSE(child(r, "operad-associativity")->ok()) << name;
  }
}

TEST(Kleisli, RefusesWithoutWCommutativity) {
  try {
    kleisli_end_operad(pfin_monad(), Carrier::atoms(2), VerbalCat::Finj(), 2);
    FAIL();
  } catch (const Refusal& e) {
    EXPECT_NE(std::string(e.what()).find("Finj-commutativity"), std::string::npos);
  }
}

TEST(Operads, NamesResolve) {
  EXPECT_EQ(operad_by_name("extend:terminal:Fid:F")->name(), "extend:terminal:Fid:F");
  EXPECT_EQ(operad_by_name("endo:pfin:2")->w(), VerbalCat::Fbij());
  EXPECT_EQ(operad_by_name("endo:writer:z2mult:1:Fid")->w(), VerbalCat::Fid());
  EXPECT_EQ(operad_by_name("distribution:1,2")->name(), "distribution");
  EXPECT_EQ(operad_by_name("opd:Finj:multiset:nat")->name(), "opd:Finj:multiset:nat");
  EXPECT_THROW(operad_by_name("opd:Finj"), UsageError);
  EXPECT_THROW(operad_by_name("foo"), UsageError);
  EXPECT_THROW(operad_by_name("monoid0-action:z3add"), UsageError);
  EXPECT_THROW(operad_by_name("extend:terminal:F:Fbij"), UsageError);
}
