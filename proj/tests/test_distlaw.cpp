#include <gtest/gtest.h>

#include <monadlab/distlaw.hpp>

using namespace monadlab;

namespace {

Val a(int i) { return Val::atom(i); }

const Report* child(const Report& r, const std::string& check) {
  for (const auto& c : r.children)
    if (c.check == check) return &c;
  return nullptr;
}

struct Triple {
  VerbalCat w;
  std::string operad;
  std::string monad;
};

std::vector<Triple> positive_triples() {
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

DistLaw law(const Triple& tr, const Carrier& x, const Sampling& cfg) {
  return synth_delta(tr.w, operad_by_name(tr.operad), builtin_monad(tr.monad), x, cfg);
}

}  // namespace

TEST(Delta, RingComputation) {
  // (v + 2w)(x + 3y + z) with v, w, x, y, z = 0..4
  Carrier x = Carrier::atoms(5);
  Sampling cfg;
  auto d = synth_delta(VerbalCat::Fbij(), operad_by_name("extend:terminal:Fid:Fbij"), builtin_monad("multiset:int"),
                       Carrier::atoms(2), cfg);
  auto ext = std::dynamic_pointer_cast<const ExtendedOperad>(d.o);
  ASSERT_TRUE(ext);
  Val prod = ext->canon(unit_val(), FinFn::id(2));
  Val t0 = Val::bag({{a(0), Val::num(1)}, {a(1), Val::num(2)}});
  Val t1 = Val::bag({{a(2), Val::num(1)}, {a(3), Val::num(3)}, {a(4), Val::num(1)}});
  Val out = d(d.s->elem(prod, {t0, t1}));

  // read each monomial back as a word through the list presentation
  std::map<std::vector<int>, int> got;
  for (const auto& [word, c] : out.entries()) {
    auto xs = word[1].items();
    FinFn alpha = FinFn::from_val(word[0][1], static_cast<int>(xs.size()));
    std::vector<int> w;
    for (const auto& v : reindex(xs, alpha)) w.push_back(static_cast<int>(v.as_atom()));
    got[w] = static_cast<int>(c.as_num().num());
  }
  std::map<std::vector<int>, int> want{{{0, 2}, 1}, {{0, 3}, 3}, {{0, 4}, 1},
                                       {{1, 2}, 2}, {{1, 3}, 6}, {{1, 4}, 2}};
  EXPECT_EQ(got, want);
  (void)x;
}

TEST(Delta, UnitOfSInstance) {
  Sampling cfg;
  auto d = law(positive_triples()[1], Carrier::atoms(2), cfg);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    Val e = d.t->sample(Carrier::atoms(2), rng, cfg);
    EXPECT_EQ(d(d.s->unit(e)), d.t->map([&](const Val& v) { return d.s->unit(v); }, e));
  }
}

TEST(Delta, RefusesWithoutWCommutativity) {
  Sampling cfg;
  try {
    synth_delta(VerbalCat::Finj(), operad_by_name("extend:terminal:Fbij:Finj"), pfin_monad(), Carrier::atoms(2), cfg);
    FAIL();
  } catch (const Refusal& e) {
    EXPECT_NE(std::string(e.what()).find("Finj-commutative"), std::string::npos);
  }
}

TEST(Beck, PositiveSuite) {
  Sampling cfg;
  for (const auto& tr : positive_triples()) {
    auto d = law(tr, Carrier::atoms(2), cfg);
    auto r = verify_beck(d, Carrier::atoms(2), cfg);
    EXPECT_TRUE(r.ok()) << d.name() << " " << r.to_json()["witness"].dump();
    for (const auto& c : {"eta-S", "mu-S", "eta-T", "mu-T"}) {
      ASSERT_NE(child(r, c), nullptr);
      EXPECT_GT(child(r, c)->checked, 0u) << d.name() << " " << c;
      EXPECT_LT(child(r, c)->untested, child(r, c)->checked) << d.name() << " " << c;
    }
    const Report* wd = child(r, "well-definedness");
    ASSERT_NE(wd, nullptr);
    if (tr.w == VerbalCat::Fid()) EXPECT_TRUE(wd->details["singleton_classes"].get<bool>());
    else {
      EXPECT_GT(wd->checked, 0u) << d.name();
      EXPECT_FALSE(wd->details.contains("singleton_classes")) << d.name();
    }
    EXPECT_NE(r.details["side_condition"], "none") << d.name();
  }
}

TEST(Beck, SideConditionsAreRecorded) {
  Sampling cfg;
  auto list_case = verify_beck(law(positive_triples()[5], Carrier::atoms(2), cfg), Carrier::atoms(2), cfg);
  EXPECT_EQ(list_case.details["side_conditions"], nlohmann::json({"small-operad"}));
  auto writer_case = verify_beck(law(positive_triples()[6], Carrier::atoms(2), cfg), Carrier::atoms(2), cfg);
  EXPECT_EQ(writer_case.details["side_conditions"], nlohmann::json({"commutative-T", "small-operad"}));
  auto dist_case = verify_beck(law(positive_triples()[1], Carrier::atoms(2), cfg), Carrier::atoms(2), cfg);
  EXPECT_EQ(dist_case.details["side_condition"], "commutative-T");
}

TEST(Beck, ListOverListFailsOnlyTheMultiplicationOfT) {
  Sampling cfg;
  auto d = synth_delta(VerbalCat::Fid(), terminal_operad(VerbalCat::Fid()), list_monad(), Carrier::atoms(2), cfg);
  auto r = verify_beck(d, Carrier::atoms(2), cfg);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(child(r, "eta-S")->ok());
  EXPECT_TRUE(child(r, "mu-S")->ok());
  EXPECT_TRUE(child(r, "eta-T")->ok());
  const Report* mu = child(r, "mu-T");
  ASSERT_FALSE(mu->ok());
  EXPECT_EQ(r.details["side_condition"], "none");
  EXPECT_LE(mu->witness["points_used"].get<int>(), 2);
  // the witness replays
  Val w = Val::from_json(mu->witness["input_value"]);
  Val lhs = d(d.s->map([&](const Val& v) { return d.t->join(v); }, w));
  Val rhs = d.t->join(d.t->map(d.fn(), d(w)));
  EXPECT_EQ(lhs.str(), mu->witness["lhs"].get<std::string>());
  EXPECT_EQ(rhs.str(), mu->witness["rhs"].get<std::string>());
  EXPECT_NE(lhs, rhs);
  // and is reproducible
  EXPECT_EQ(verify_beck(d, Carrier::atoms(2), cfg).to_json(), r.to_json());
}

TEST(Beck, ClassesHaveSeveralRepresentatives) {
  Sampling cfg;
  for (const auto& tr : positive_triples()) {
    if (tr.w == VerbalCat::Fid()) continue;
    auto d = law(tr, Carrier::atoms(2), cfg);
    auto r = check_well_defined(d, Carrier::atoms(2), cfg);
    EXPECT_TRUE(r.ok()) << d.name();
    EXPECT_GE(r.details["max_representatives"].get<int>(), 3) << d.name();
  }
}

TEST(Beck, PrimeAgreesForCommutativeMonads) {
  Sampling cfg;
  auto d = law(positive_triples()[1], Carrier::atoms(2), cfg);
  SynthOptions opt;
  opt.prime = true;
  auto d2 = synth_delta(d.w, d.o, d.t, Carrier::atoms(2), cfg, opt);
  Rng rng(9);
  Carrier tx = apply(d.t, Carrier::atoms(2), cfg);
  for (int i = 0; i < 50; ++i) {
    Val e = d.s->sample(tx, rng, cfg);
    EXPECT_EQ(d(e), d2(e));
  }
}

TEST(Beck, IndexedValuationsOverDistributions) {
  // independent formula on the indexed-valuation presentation: choose one
  // point from each distribution independently
  Sampling cfg;
  auto d = law(positive_triples()[8], Carrier::atoms(2), cfg);
  auto v = std::dynamic_pointer_cast<const MultisetMonad>(valuation_monad());
  auto add = [](const Val& x, const Val& y) { return Val::num(x.as_num() + y.as_num()); };
  Fn to_iv = [&](const Val& t) {
    std::vector<Val::Entry> es;
    const auto& xs = t[1].items();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      Val c = position_coeff(*v, t[0], i);
      if (c != v->semiring().zero) es.emplace_back(Val::tuple({c, xs[i]}), Val::num(1));
    }
    return make_bag(std::move(es), add, Val::num(0));
  };
  Rng rng(21);
  Carrier tx = apply(d.t, Carrier::atoms(2), cfg);
  for (int i = 0; i < 60; ++i) {
    Val e = d.s->sample(tx, rng, cfg);
    std::vector<std::pair<Val, Val>> terms;  // (weight, distribution)
    const auto& ds = e[1].items();
    for (std::size_t k = 0; k < ds.size(); ++k) terms.emplace_back(position_coeff(*v, e[0], k), ds[k]);
    std::vector<Val::Entry> outcome{{Val::bag({}), Val::num(1)}};
    for (const auto& [wgt, dist] : terms) {
      std::vector<Val::Entry> next;
      for (const auto& [bag, pr] : outcome)
        for (const auto& [pt, q] : dist.entries()) {
          auto es = bag.entries();
          es.emplace_back(Val::tuple({wgt, pt}), Val::num(1));
          next.emplace_back(make_bag(std::move(es), add, Val::num(0)), Val::num(pr.as_num() * q.as_num()));
        }
      outcome = std::move(next);
    }
    Val want = make_bag(std::move(outcome), add, Val::num(0));
    EXPECT_EQ(d.t->map(to_iv, d(e)), want) << e.str();
  }
}

TEST(Invariance, ExtensionGivesTheSameLaw) {
  Sampling cfg;
  auto r1 = verify_invariance(terminal_operad(VerbalCat::Fbij()), VerbalCat::Finj(), dist_monad(), Carrier::atoms(2),
                              cfg);
  EXPECT_TRUE(r1.ok()) << r1.to_json().dump();
  EXPECT_GT(r1.checked, 0u);
  auto r2 = verify_invariance(exception_operad(1), VerbalCat::Fall(), reader_monad(2), Carrier::atoms(2), cfg);
  EXPECT_TRUE(r2.ok()) << r2.to_json().dump();
  auto r3 = verify_invariance(exception_operad(2), VerbalCat::Fid(), list_monad(), Carrier::atoms(2), cfg);
  EXPECT_TRUE(r3.ok());
}

TEST(Diagnosis, DistributionsOverPowerset) {
  Sampling cfg;
  auto r = diagnose("dist", pfin_monad(), Carrier::atoms(2), cfg);
  EXPECT_TRUE(r.ok()) << r.to_json().dump();
  EXPECT_TRUE(r.details["intersection"].empty());
  EXPECT_TRUE(r.details["consistent"].get<bool>());
  EXPECT_EQ(r.details["suggestion"], "refine dist at Fbij");
  EXPECT_NE(child(r, "distributive-law"), nullptr);
  EXPECT_TRUE(child(r, "distributive-law")->ok());
}

TEST(Diagnosis, PowersetOverPowerset) {
  Sampling cfg;
  auto r = diagnose("pfin", pfin_monad(), Carrier::atoms(2), cfg);
  EXPECT_TRUE(r.ok()) << r.to_json().dump();
  EXPECT_TRUE(r.details["intersection"].empty());
  EXPECT_EQ(r.details["suggestion"], "refine pfin at Fbij");
  const auto& rows = r.details["diamond"];
  EXPECT_EQ(rows[0]["operadic"], "no witness in library");
  EXPECT_EQ(rows[2]["operadic"], "terminal:Fsurj");
  EXPECT_EQ(rows[3]["operadic"], "extend:terminal:Fsurj:F");
  EXPECT_TRUE(rows[0]["commutative"].get<bool>());
  EXPECT_FALSE(rows[1]["commutative"].get<bool>());
}

TEST(Diagnosis, PowersetOverWriter) {
  Sampling cfg;
  auto r = diagnose("pfin", writer_monad(monoid_by_name("z3add")), Carrier::atoms(2), cfg);
  EXPECT_TRUE(r.ok()) << r.to_json().dump();
  ASSERT_NE(child(r, "writer-instance"), nullptr);
  EXPECT_TRUE(child(r, "writer-instance")->ok());
  EXPECT_GT(child(r, "writer-instance")->checked, 0u);
}

TEST(Diagnosis, IndexedValuationsOverNonemptyPowerset) {
  Sampling cfg;
  auto r = diagnose("iv", pfin_plus_monad(), Carrier::atoms(2), cfg);
  EXPECT_TRUE(r.ok()) << r.to_json().dump();
  EXPECT_EQ(r.details["intersection"], nlohmann::json({"Finj"}));
  EXPECT_EQ(r.details["suggestion"], "direct delta at Finj");
  EXPECT_TRUE(child(r, "distributive-law")->ok());
}

TEST(Diagnosis, NoWitnessIsNotAClaim) {
  Sampling cfg;
  DiagnoseOptions opt;
  opt.synthesize = false;
  auto r = diagnose("reader:2", pfin_monad(), Carrier::atoms(2), cfg, opt);
  for (const auto& row : r.details["diamond"]) EXPECT_EQ(row["operadic"], "no witness in library");
  EXPECT_TRUE(r.details["consistent"].get<bool>());
}
