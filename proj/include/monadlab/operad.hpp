#pragma once

#include <algorithm>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "finord.hpp"
#include "monads.hpp"
#include "report.hpp"
#include "val.hpp"

namespace monadlab {

/// A W-operad given by data. Elements of O_n are Vals; the arity of an
/// element is always known from context and passed alongside.
class Operad {
 public:
  virtual ~Operad() = default;
  virtual std::string name() const = 0;
  virtual VerbalCat w() const = 0;

  /// Substitutions whose result would exceed this arity refuse.
  virtual int max_arity() const { return std::numeric_limits<int>::max(); }
  /// Largest n with O_n nonempty, when there is one.
  virtual std::optional<int> top_arity() const { return std::nullopt; }

  /// O_n as a list when it is finite with at most cap elements.
  virtual std::optional<std::vector<Val>> elems(int n, std::size_t cap) const = 0;
  /// A random element of O_n. Throws Refusal when O_n is empty or cannot be sampled.
  virtual Val sample(int n, Rng& rng, const Sampling& cfg) const {
    auto es = elems(n, cfg.explicit_cap);
    if (!es || es->empty()) throw Refusal(name() + ": cannot sample O_" + std::to_string(n));
    return detail::pick(*es, rng);
  }

  virtual Val act(const FinFn& alpha, const Val& p) const = 0;
  virtual Val ido() const = 0;
  /// subst(q, ps) where q has arity ps.size() and ps[i] has arity ms[i].
  virtual Val subst(const Val& q, const std::vector<Val>& ps, const std::vector<int>& ms) const = 0;

  /// All q with act(beta)q == p, or nullopt when they cannot be listed.
  virtual std::optional<std::vector<Val>> preimages(const FinFn& beta, const Val& p) const {
    auto es = elems(beta.dom, 4096);
    if (!es) return std::nullopt;
    std::vector<Val> out;
    for (const auto& q : *es)
      if (act(beta, q) == p) out.push_back(q);
    return out;
  }

  /// Every coend class over a k-element set has a representative of arity at
  /// most this, when such a bound is known.
  virtual std::optional<int> reduced_arity(int k) const {
    const VerbalCat w = this->w();
    auto top = top_arity();
    bool collapses = w.kind == VerbalCat::Kind::Fsurj || w.kind == VerbalCat::Kind::F ||
                     (w.kind == VerbalCat::Kind::FsurjN && w.k == 2);
    if (collapses) return top ? std::min(*top, k) : k;
    return top;
  }

  /// Least p' in the orbit of p under permutations that fix each half-open
  /// block [lo, hi) setwise, when the operad can find it without search.
  virtual std::optional<Val> least_in_blocks(const Val&, const std::vector<std::pair<int, int>>&) const {
    return std::nullopt;
  }

  /// A closed normal form for the coend pair (p, xs), when the operad knows one.
  virtual std::optional<std::pair<Val, std::vector<Val>>> normal_form(const Val&, const std::vector<Val>&) const {
    return std::nullopt;
  }
};
using OperadPtr = std::shared_ptr<const Operad>;

/// O_n as a carrier: explicit when listable, otherwise sampled.
inline Carrier arity_carrier(const OperadPtr& o, int n, const Sampling& cfg) {
  Carrier c;
  c.name = "O_" + std::to_string(n);
  c.elems = o->elems(n, cfg.explicit_cap);
  c.sampler = [o, n, cfg](Rng& rng) { return o->sample(n, rng, cfg); };
  return c;
}

namespace detail {

inline int sum(const std::vector<int>& v) {
  int s = 0;
  for (int x : v) s += x;
  return s;
}

/// All vectors of length n with nonnegative entries summing to at most total.
inline std::vector<std::vector<int>> compositions(int n, int total) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int left) -> void {
    if (static_cast<int>(cur.size()) == n) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur.push_back(v);
      self(self, left - v);
      cur.pop_back();
    }
  };
  rec(rec, total);
  return out;
}

/// Runs one axiom instance shape over its input tuples; refusals count as untested.
template <class F>
void run_shape(Report& r, const std::vector<Carrier>& slots, const Sampling& cfg, Rng& rng, F&& f,
               std::size_t budget = tuple_budget()) {
  try {
    bool exhaustive = over_tuples(slots, cfg, rng, [&](const std::vector<Val>& in) {
      try {
        f(in);
      } catch (const Refusal&) {
        ++r.untested;
      }
    }, budget);
    if (!exhaustive) r.sampled = true;
  } catch (const Refusal&) {
    ++r.untested;
  }
}

inline Sampling per_shape(const Sampling& cfg, std::size_t shapes, std::size_t target) {
  Sampling s = cfg;
  s.samples = std::max<std::size_t>(4, shapes == 0 ? target : (target + shapes - 1) / shapes);
  return s;
}

/// Largest product of slot sizes still enumerated exhaustively for one shape.
inline std::size_t shape_budget(std::size_t shapes, std::size_t total, std::size_t samples) {
  return std::clamp<std::size_t>(shapes == 0 ? total : total / shapes, samples, tuple_budget());
}

}  // namespace detail

struct OperadCheckOptions {
  int bound = 3;
  std::size_t target_samples = 500;  // per axiom, when sampling
  std::size_t exhaustive_budget = 1000000;  // per axiom, split evenly over the shapes
};

/// Functoriality of the action, the compatibility square, both unit laws and
/// associativity, on all instance shapes with every arity <= bound.
inline Report check_operad(const OperadPtr& o, const Sampling& cfg, OperadCheckOptions opt = {}) {
  const int b = opt.bound;
  const VerbalCat w = o->w();
  Report top;
  top.check = "operad-axioms";
  top.subject = o->name();
  top.property = "operad.axioms";
  top.seed = cfg.seed;
  top.details["bound"] = b;
  Rng rng(cfg.seed);
  std::vector<Carrier> ar;
  for (int n = 0; n <= b; ++n) ar.push_back(arity_carrier(o, n, cfg));
  auto cmp = [](Report& r, const Val& lhs, const Val& rhs, nlohmann::json ctx) {
    ++r.checked;
    if (lhs != rhs) {
      ctx["lhs"] = lhs.str();
      ctx["rhs"] = rhs.str();
      r.fail(std::move(ctx));
    }
  };
  auto sub = [&](const char* name, const char* property) {
    Report r;
    r.check = name;
    r.subject = o->name();
    r.property = property;
    r.seed = cfg.seed;
    return r;
  };

  // functoriality
  {
    Report r = sub("operad-functoriality", "operad.action-functorial");
    auto all = w.enumerate_all(b);
    std::size_t shapes = 0;
    for (const auto& a : all)
      for (const auto& g : all)
        if (g.dom == a.cod) ++shapes;
    auto scfg = detail::per_shape(cfg, shapes + static_cast<std::size_t>(b) + 1, opt.target_samples);
    for (int m = 0; m <= b; ++m)
      detail::run_shape(r, {ar[m]}, scfg, rng, [&](const std::vector<Val>& in) {
        cmp(r, o->act(FinFn::id(m), in[0]), in[0], {{"law", "identity"}, {"arity", m}, {"p", in[0].str()}});
      });
    for (const auto& a : all)
      for (const auto& g : all) {
        if (g.dom != a.cod) continue;
        detail::run_shape(r, {ar[a.dom]}, scfg, rng, [&](const std::vector<Val>& in) {
          cmp(r, o->act(compose(g, a), in[0]), o->act(g, o->act(a, in[0])),
              {{"law", "composition"}, {"alpha", a.str()}, {"beta", g.str()}, {"p", in[0].str()}});
        }, detail::shape_budget(shapes, opt.exhaustive_budget, scfg.samples));
      }
    top.add(std::move(r));
  }

  // compatibility of subst with the action
  {
    Report r = sub("operad-compatibility", "operad.subst-compatibility");
    auto all = w.enumerate_all(b);
    struct Shape {
      FinFn beta;
      std::vector<FinFn> alphas;
    };
    std::vector<Shape> shapes;
    for (int n = 0; n <= b; ++n) {
      // families (alpha_i : m'_i -> m_i)_{i<n} with sum of m_i <= b
      std::vector<std::vector<FinFn>> fams{{}};
      for (int i = 0; i < n; ++i) {
        std::vector<std::vector<FinFn>> next;
        for (const auto& fam : fams) {
          int used = 0;
          for (const auto& a : fam) used += a.cod;
          for (const auto& a : all)
            if (used + a.cod <= b) {
              auto f2 = fam;
              f2.push_back(a);
              next.push_back(std::move(f2));
            }
        }
        fams = std::move(next);
      }
      for (const auto& beta : all) {
        if (beta.cod != n) continue;
        for (const auto& fam : fams) {
          int mprime = 0;
          for (int ip = 0; ip < beta.dom; ++ip) mprime += fam[beta(ip)].dom;
          if (mprime <= b) shapes.push_back({beta, fam});
        }
      }
    }
    auto scfg = detail::per_shape(cfg, shapes.size(), opt.target_samples);
    for (const auto& s : shapes) {
      const int n = s.beta.cod, np = s.beta.dom;
      std::vector<Carrier> slots{ar[np]};
      for (int i = 0; i < n; ++i) slots.push_back(ar[s.alphas[i].dom]);
      detail::run_shape(r, slots, scfg, rng, [&](const std::vector<Val>& in) {
        const Val& q = in[0];
        std::vector<Val> acted;
        std::vector<int> ms;
        for (int i = 0; i < n; ++i) {
          acted.push_back(o->act(s.alphas[i], in[1 + i]));
          ms.push_back(s.alphas[i].cod);
        }
        Val lhs = o->subst(o->act(s.beta, q), acted, ms);
        std::vector<Val> picked;
        std::vector<int> mps;
        for (int ip = 0; ip < np; ++ip) {
          picked.push_back(in[1 + s.beta(ip)]);
          mps.push_back(s.alphas[s.beta(ip)].dom);
        }
        Val rhs = o->act(star(s.beta, s.alphas), o->subst(q, picked, mps));
        nlohmann::json al = nlohmann::json::array();
        for (const auto& a : s.alphas) al.push_back(a.str());
        cmp(r, lhs, rhs, {{"beta", s.beta.str()}, {"alphas", al}, {"inputs", detail::vals_json(in)}});
      }, detail::shape_budget(shapes.size(), opt.exhaustive_budget, scfg.samples));
    }
    top.add(std::move(r));
  }

  // unit laws
  {
    Report r = sub("operad-unit", "operad.unit-laws");
    auto scfg = detail::per_shape(cfg, static_cast<std::size_t>(b) + 1, opt.target_samples);
    for (int m = 0; m <= b; ++m)
      detail::run_shape(r, {ar[m]}, scfg, rng, [&](const std::vector<Val>& in) {
        const Val& p = in[0];
        cmp(r, o->subst(o->ido(), {p}, {m}), p, {{"law", "left unit"}, {"p", p.str()}});
        cmp(r, o->subst(p, std::vector<Val>(m, o->ido()), std::vector<int>(m, 1)), p,
            {{"law", "right unit"}, {"p", p.str()}});
      });
    top.add(std::move(r));
  }

  // associativity
  {
    Report r = sub("operad-associativity", "operad.associativity");
    struct Shape {
      std::vector<int> ms, ls;
    };
    std::vector<Shape> shapes;
    for (int n = 0; n <= b; ++n)
      for (const auto& ms : detail::compositions(n, b))
        for (const auto& ls : detail::compositions(detail::sum(ms), b)) shapes.push_back({ms, ls});
    auto scfg = detail::per_shape(cfg, shapes.size(), opt.target_samples);
    for (const auto& s : shapes) {
      const int n = static_cast<int>(s.ms.size());
      std::vector<Carrier> slots{ar[n]};
      for (int mj : s.ms) slots.push_back(ar[mj]);
      for (int l : s.ls) slots.push_back(ar[l]);
      detail::run_shape(r, slots, scfg, rng, [&](const std::vector<Val>& in) {
        const Val& rr = in[0];
        std::vector<Val> qs(in.begin() + 1, in.begin() + 1 + n);
        std::vector<Val> ps(in.begin() + 1 + n, in.end());
        // left: substitute the inner substitutions into r
        std::vector<Val> inner;
        std::vector<int> inner_ar;
        std::size_t k = 0;
        for (int j = 0; j < n; ++j) {
          std::vector<Val> pj(ps.begin() + k, ps.begin() + k + s.ms[j]);
          std::vector<int> lj(s.ls.begin() + k, s.ls.begin() + k + s.ms[j]);
          inner.push_back(o->subst(qs[j], pj, lj));
          inner_ar.push_back(detail::sum(lj));
          k += s.ms[j];
        }
        Val lhs = o->subst(rr, inner, inner_ar);
        Val rhs = o->subst(o->subst(rr, qs, s.ms), ps, s.ls);
        cmp(r, lhs, rhs, {{"ms", s.ms}, {"ls", s.ls}, {"inputs", detail::vals_json(in)}});
      }, detail::shape_budget(shapes.size(), opt.exhaustive_budget, scfg.samples));
    }
    top.add(std::move(r));
  }
  return top;
}

}  // namespace monadlab
