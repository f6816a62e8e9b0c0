#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "finord.hpp"
#include "operad.hpp"
#include "val.hpp"

namespace monadlab {

/// A pair (p, xs) with p in O_n and xs in X^n.
using CoendPair = std::pair<Val, std::vector<Val>>;

/// Order key: arity, then the tuple, then the operad element.
inline Val coend_key(const Val& p, const std::vector<Val>& xs) { return Val::tuple({Val::tuple(xs), p}); }
/// Element of the induced monad: (p, (x_0, ..., x_{n-1})).
inline Val coend_elem(const Val& p, const std::vector<Val>& xs) { return Val::tuple({p, Val::tuple(xs)}); }
inline CoendPair coend_split(const Val& e) { return {e[0], e[1].items()}; }

enum class CanonMethod { Auto, Generic };

struct CanonOptions {
  int bound = 4;                      // arity cap for the generic closure
  std::optional<Carrier> carrier;     // supplies values for positions added by injections
  std::function<bool(const std::vector<Val>&)> admissible;  // restricts the tuples visited
  std::size_t node_limit = 200000;
};

struct CanonResult {
  Val p;
  std::vector<Val> xs;
  bool complete = true;
  std::vector<Val> visited;  // keys of every node seen by the generic closure
  std::string method;
};

namespace detail {

inline bool is_kind(const VerbalCat& w, VerbalCat::Kind k) { return w.kind == k; }
inline bool acts_as_fbij(const VerbalCat& w) {
  return w.kind == VerbalCat::Kind::Fbij || (w.kind == VerbalCat::Kind::FsurjN && w.k == 1);
}
inline bool acts_as_fsurj(const VerbalCat& w) {
  return w.kind == VerbalCat::Kind::Fsurj || (w.kind == VerbalCat::Kind::FsurjN && w.k == 2);
}

}  // namespace detail

/// Least element of the permutation orbit of (p, xs): sorted tuple, then the
/// least p over the stabilizer of that tuple.
inline CoendPair canon_by_sorting(const Operad& o, const Val& p, const std::vector<Val>& xs) {
  const int n = static_cast<int>(xs.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return xs[a] < xs[b]; });
  std::vector<Val> ys(n);
  std::vector<int> sigma(n);
  for (int k = 0; k < n; ++k) {
    ys[k] = xs[idx[k]];
    sigma[idx[k]] = k;
  }
  FinFn s(n, n, sigma);
  Val sp = o.act(s, p);
  // blocks of equal values
  std::vector<std::pair<int, int>> blocks;
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && ys[j] == ys[i]) ++j;
    if (j - i > 1) blocks.emplace_back(i, j);
    i = j;
  }
  if (blocks.empty()) return {sp, ys};
  if (auto least = o.least_in_blocks(sp, blocks)) return {*least, ys};
  Val best = sp;
  std::vector<int> tau(n);
  std::iota(tau.begin(), tau.end(), 0);
  auto rec = [&](auto&& self, std::size_t b) -> void {
    if (b == blocks.size()) {
      Val c = o.act(FinFn(n, n, tau), sp);
      if (c < best) best = c;
      return;
    }
    auto [lo, hi] = blocks[b];
    std::vector<int> perm(tau.begin() + lo, tau.begin() + hi);
    std::sort(perm.begin(), perm.end());
    do {
      std::copy(perm.begin(), perm.end(), tau.begin() + lo);
      self(self, b + 1);
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::iota(tau.begin() + lo, tau.begin() + hi, lo);
  };
  rec(rec, 0);
  return {best, ys};
}

/// Collapse onto the sorted list of distinct values.
inline CoendPair canon_by_collapse(const Operad& o, const Val& p, const std::vector<Val>& xs) {
  std::vector<Val> ys = xs;
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  std::vector<int> t;
  t.reserve(xs.size());
  for (const auto& x : xs) t.push_back(static_cast<int>(std::lower_bound(ys.begin(), ys.end(), x) - ys.begin()));
  FinFn beta(static_cast<int>(xs.size()), static_cast<int>(ys.size()), std::move(t));
  return {o.act(beta, p), ys};
}

/// Repeatedly drops a position j whenever p lies in the image of the skip
/// map missing j, then sorts when permutations are available. Valid for
/// operads whose action on injections is injective and preserves pullbacks.
inline CoendPair canon_by_descent(const Operad& o, Val p, std::vector<Val> xs, bool permute) {
  bool changed = true;
  while (changed && !xs.empty()) {
    changed = false;
    const int n = static_cast<int>(xs.size());
    for (int j = 0; j < n; ++j) {
      auto pre = o.preimages(FinFn::skip(n - 1, j), p);
      if (pre && !pre->empty()) {
        p = *std::min_element(pre->begin(), pre->end());
        xs.erase(xs.begin() + j);
        changed = true;
        break;
      }
    }
  }
  if (permute) return canon_by_sorting(o, p, xs);
  return {p, xs};
}

/// Breadth-first closure of the generating relation along the generators of
/// W, in both directions, within the arity cap. Returns the least node.
inline CanonResult canon_generic(const Operad& o, const Val& p0, const std::vector<Val>& xs0, const CanonOptions& opt) {
  const VerbalCat w = o.w();
  CanonResult res;
  res.method = "generic";
  const int cap = std::max(opt.bound, static_cast<int>(xs0.size()));
  std::unordered_set<Val, ValHash> seen;
  std::deque<CoendPair> todo;
  Val best_key = coend_key(p0, xs0);
  CoendPair best{p0, xs0};
  auto visit = [&](Val p, std::vector<Val> xs) {
    if (opt.admissible && !opt.admissible(xs)) return;
    Val k = coend_key(p, xs);
    if (!seen.insert(k).second) return;
    if (seen.size() > opt.node_limit)
      throw Refusal("coend closure of " + o.name() + " exceeds " + std::to_string(opt.node_limit) + " nodes");
    res.visited.push_back(k);
    if (k < best_key) {
      best_key = k;
      best = {p, xs};
    }
    todo.emplace_back(std::move(p), std::move(xs));
  };
  visit(p0, xs0);
  while (!todo.empty()) {
    auto [p, xs] = std::move(todo.front());
    todo.pop_front();
    const int n = static_cast<int>(xs.size());
    // forward: (p, ys . g) ~ (g p, ys)
    for (const auto& g : w.generators_from(n, cap)) {
      std::vector<std::optional<Val>> ys(g.cod);
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        auto& slot = ys[g(i)];
        if (!slot) slot = xs[i];
        else ok = *slot == xs[i];
      }
      if (!ok) continue;
      std::vector<int> free;
      for (int j = 0; j < g.cod; ++j)
        if (!ys[j]) free.push_back(j);
      Val gp = o.act(g, p);
      if (free.empty()) {
        std::vector<Val> y;
        for (auto& v : ys) y.push_back(*v);
        visit(gp, std::move(y));
        continue;
      }
      std::vector<Val> cands;
      if (opt.carrier && opt.carrier->elems) {
        cands = *opt.carrier->elems;
      } else {
        res.complete = false;
        cands = xs;
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
      }
      if (cands.empty()) continue;
      std::vector<std::size_t> ci(free.size(), 0);
      while (true) {
        std::vector<Val> y;
        for (int j = 0, f = 0; j < g.cod; ++j) y.push_back(ys[j] ? *ys[j] : cands[ci[f++]]);
        visit(gp, std::move(y));
        std::size_t i = ci.size();
        while (i > 0 && ci[i - 1] + 1 == cands.size()) ci[--i] = 0;
        if (i == 0) break;
        ++ci[i - 1];
      }
    }
    // backward: (p, xs) = (g q, xs) ~ (q, xs . g)
    for (const auto& g : w.generators_into(n, cap)) {
      auto pre = o.preimages(g, p);
      if (!pre) {
        res.complete = false;
        continue;
      }
      for (const auto& q : *pre) visit(q, reindex(xs, g));
    }
  }
  res.p = best.first;
  res.xs = best.second;
  return res;
}

/// Canonical representative of the class of (p, xs) in the coend of O.
inline CanonResult canonicalize(const Operad& o, const Val& p, const std::vector<Val>& xs, const CanonOptions& opt = {},
                                CanonMethod method = CanonMethod::Auto) {
  if (method == CanonMethod::Generic) return canon_generic(o, p, xs, opt);
  const VerbalCat w = o.w();
  CanonResult r;
  if (w.kind == VerbalCat::Kind::Fid || (w.kind == VerbalCat::Kind::FsurjN && w.k == 0)) {
    r.p = p;
    r.xs = xs;
    r.method = "identity";
    return r;
  }
  if (detail::acts_as_fbij(w)) {
    std::tie(r.p, r.xs) = canon_by_sorting(o, p, xs);
    r.method = "sorting";
    return r;
  }
  if (detail::acts_as_fsurj(w)) {
    std::tie(r.p, r.xs) = canon_by_collapse(o, p, xs);
    r.method = "collapse";
    return r;
  }
  if (auto nf = o.normal_form(p, xs)) {
    std::tie(r.p, r.xs) = *nf;
    r.method = "normal-form";
    return r;
  }
  return canon_generic(o, p, xs, opt);
}

/// Cached canonicalization for one operad and one set of options.
class Quotient {
 public:
  explicit Quotient(OperadPtr o, CanonOptions opt = {}, CanonMethod m = CanonMethod::Auto)
      : o_(std::move(o)), opt_(std::move(opt)), m_(m) {}

  const Operad& operad() const { return *o_; }
  const OperadPtr& operad_ptr() const { return o_; }
  const CanonOptions& options() const { return opt_; }
  /// False once some closure could not list preimages or had to invent values.
  bool complete() const { return complete_; }

  Val elem(const Val& p, const std::vector<Val>& xs) const {
    Val k = coend_key(p, xs);
    if (auto it = cache_.find(k); it != cache_.end()) return it->second;
    auto r = canonicalize(*o_, p, xs, opt_, m_);
    complete_ = complete_ && r.complete;
    Val e = coend_elem(r.p, r.xs);
    cache_.emplace(k, e);
    if (r.complete)
      for (const auto& v : r.visited) cache_.emplace(v, e);
    return e;
  }

 private:
  OperadPtr o_;
  CanonOptions opt_;
  CanonMethod m_;
  mutable bool complete_ = true;
  mutable std::unordered_map<Val, Val, ValHash> cache_;
};

}  // namespace monadlab
