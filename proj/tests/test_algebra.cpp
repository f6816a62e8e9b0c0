#include <gtest/gtest.h>

#include <monadlab/algebra.hpp>

using namespace monadlab;

namespace {
Val q(std::int64_t n, std::int64_t d = 1) { return Val::num(Rational(n, d)); }
Val ms(std::vector<std::pair<Val, int>> xs) {
  std::vector<Val::Entry> es;
  for (auto& [v, n] : xs) es.emplace_back(v, Val::num(n));
  return make_bag(std::move(es), [](const Val& a, const Val& b) { return Val::num(a.as_num() + b.as_num()); },
                  Val::num(0));
}
}  // namespace

TEST(Rational, LowestTerms) {
  Rational r(6, -4);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 2);
  EXPECT_EQ(Rational(1, 2) + Rational(1, 3), Rational(5, 6));
  EXPECT_EQ(Rational(0, 7).den(), 1);
  EXPECT_EQ(Rational::parse("-3/9"), Rational(-1, 3));
  EXPECT_THROW(Rational(1, 0), std::domain_error);
  EXPECT_THROW(Rational::parse("x"), std::invalid_argument);
}

TEST(Rational, OverflowIsReported) {
  Rational big(INT64_MAX / 2 + 1);
  EXPECT_THROW(big * Rational(4), ArithmeticOverflow);
}

TEST(Semiring, BasicExamples) {
  auto b = bool_semiring();
  EXPECT_EQ(b->add(q(1), q(1)), q(1));
  EXPECT_EQ(b->mul(q(1), q(0)), q(0));
  auto r = qnonneg_semiring();
  EXPECT_EQ(r->add(q(1, 2), q(1, 3)), q(5, 6));
  auto z = int_semiring();
  EXPECT_EQ(z->mul(q(-1), q(-1)), q(1));
}

TEST(Semiring, AllInstancesPassLaws) {
  std::vector<SemiringPtr> all = {nat_semiring(),
                                  bool_semiring(),
                                  qnonneg_semiring(),
                                  int_semiring(),
                                  monoid_semiring(trivial_monoid()),
                                  monoid_semiring(int_add_monoid()),
                                  monoid_semiring(zmod_add_monoid(3)),
                                  monoid_semiring(left_zero_monoid()),
                                  contracted_semiring(qnonneg_mult_monoid()),
                                  contracted_semiring(bool_and_monoid()),
                                  contracted_semiring(zmod_mult_monoid(4))};
  for (const auto& s : all) {
    auto r = check_semiring(*s);
    EXPECT_TRUE(r.ok()) << s->name << ": " << r.to_json().dump();
    if (!s->elements) {
      EXPECT_GE(r.checked, 1000u);
      EXPECT_TRUE(r.sampled);
    }
  }
}

TEST(Monoid, AllInstancesPassLaws) {
  for (const auto& name : {"trivial", "z2mult", "z4mult", "z3add", "bool-or", "bool-and", "leftzero", "trans2",
                           "int-add", "qnonneg-mult", "qpos-mult"}) {
    auto m = monoid_by_name(name);
    auto r = check_monoid(*m);
    EXPECT_TRUE(r.ok()) << name << ": " << r.to_json().dump();
  }
}

TEST(Monoid, Properties) {
  EXPECT_TRUE(monoid_is_commutative(*zmod_mult_monoid(2)));
  EXPECT_TRUE(monoid_is_idempotent(*bool_or_monoid()));
  EXPECT_FALSE(monoid_is_idempotent(*zmod_add_monoid(2)));
  EXPECT_FALSE(monoid_is_commutative(*left_zero_monoid()));
  EXPECT_TRUE(monoid_is_idempotent(*left_zero_monoid()));
  EXPECT_FALSE(monoid_is_commutative(*transformation_monoid()));
  EXPECT_FALSE(monoid_is_idempotent(*transformation_monoid()));
}

TEST(MonoidSemiring, TrivialMonoidGivesNat) {
  auto s = monoid_semiring(trivial_monoid());
  // n copies of the unit behave like n
  auto n = [&](int k) { return ms({{unit_val(), k}}); };
  EXPECT_EQ(s->add(n(2), n(3)), n(5));
  EXPECT_EQ(s->mul(n(2), n(3)), n(6));
  EXPECT_EQ(s->one, n(1));
  EXPECT_EQ(s->zero, Val::bag({}));
}

TEST(MonoidSemiring, ConvolutionOverIntegers) {
  // In N[(Z,0,+)] written multiplicatively: (x + x) * x^2 = 2 x^3.
  auto s = monoid_semiring(int_add_monoid());
  Val x1 = Val::atom(1), x2 = Val::atom(2), x3 = Val::atom(3);
  Val lhs = s->mul(s->add(ms({{x1, 1}}), ms({{x1, 1}})), ms({{x2, 1}}));
  EXPECT_EQ(lhs, ms({{x3, 2}}));
}

TEST(ContractedSemiring, Examples) {
  auto s = contracted_semiring(qnonneg_mult_monoid());
  EXPECT_EQ(s->mul(ms({{q(1, 2), 1}}), ms({{q(2), 1}})), ms({{q(1), 1}}));
  auto z4 = contracted_semiring(zmod_mult_monoid(4));
  EXPECT_EQ(z4->mul(ms({{Val::atom(2), 1}}), ms({{Val::atom(2), 1}})), Val::bag({}));
}

TEST(ContractedSemiring, BooleanCaseIsNat) {
  // N0[2_mult,0]: multisets over {1} only, i.e. counts.
  auto s = contracted_semiring(bool_and_monoid());
  auto n = [&](int k) { return k == 0 ? Val::bag({}) : ms({{Val::atom(1), k}}); };
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b) {
      EXPECT_EQ(s->add(n(a), n(b)), n(a + b));
      EXPECT_EQ(s->mul(n(a), n(b)), n(a * b));
    }
}

TEST(ContractedSemiring, IsomorphicToPositiveMonoidSemiring) {
  // N0[(Q>=0)_mult,0] and N[(Q>0)_mult] agree on multisets of positive numbers.
  auto c = contracted_semiring(qnonneg_mult_monoid());
  auto p = monoid_semiring(qpos_mult_monoid());
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    Val a = p->sample(rng), b = p->sample(rng);
    EXPECT_EQ(c->add(a, b), p->add(a, b));
    EXPECT_EQ(c->mul(a, b), p->mul(a, b));
  }
  EXPECT_EQ(c->one, p->one);
  EXPECT_EQ(c->zero, p->zero);
}

TEST(Algebra, NamesResolve) {
  EXPECT_EQ(semiring_by_name("monoid-semiring:z2mult")->name, "monoid-semiring:z2mult");
  EXPECT_EQ(semiring_by_name("contracted:qnonneg-mult")->name, "contracted:qnonneg-mult");
  EXPECT_THROW(semiring_by_name("reals"), UsageError);
  EXPECT_THROW(contracted_semiring(zmod_add_monoid(2)), UsageError);
}

TEST(Val, OrderAndJson) {
  Val a = Val::tuple({Val::atom(1), Val::num(Rational(1, 2)), Val::inj(0, Val::atom(3))});
  Val b = Val::from_json(a.to_json());
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_LT(Val::atom(5), Val::num(0));
  EXPECT_LT(Val::tuple({Val::atom(9)}), Val::tuple({Val::atom(0), Val::atom(0)}));
  Val bag = ms({{Val::atom(2), 1}, {Val::atom(0), 3}});
  EXPECT_EQ(bag.entries().front().first, Val::atom(0));
  EXPECT_EQ(Val::from_json(bag.to_json()), bag);
}
