#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rational.hpp"

namespace monadlab {

/// Immutable tagged tree used for every element the library touches: carrier
/// elements, coefficients, products, coproduct injections and finite
/// coefficient maps. Composite nodes are shared; copying a Val is cheap.
class Val {
 public:
  enum class Kind : std::uint8_t { Atom = 0, Num = 1, Tuple = 2, Inj = 3, Bag = 4 };
  using Entry = std::pair<Val, Val>;

  Val() : kind_(Kind::Tuple), hash_(seed(Kind::Tuple)) {}  // the empty tuple

  static Val atom(std::int64_t i) {
    Val v(Kind::Atom);
    v.a_ = i;
    v.hash_ = mix(seed(Kind::Atom), std::hash<std::int64_t>{}(i));
    return v;
  }
  static Val num(const Rational& r) {
    Val v(Kind::Num);
    v.a_ = r.num();
    v.b_ = r.den();
    v.hash_ = mix(mix(seed(Kind::Num), std::hash<std::int64_t>{}(v.a_)), std::hash<std::int64_t>{}(v.b_));
    return v;
  }
  static Val num(std::int64_t n) { return num(Rational(n)); }
  static Val tuple(std::vector<Val> items) {
    Val v(Kind::Tuple);
    std::size_t h = seed(Kind::Tuple);
    for (const auto& x : items) h = mix(h, x.hash_);
    v.hash_ = h;
    if (!items.empty()) v.node_ = std::make_shared<const Node>(Node{std::move(items), {}});
    return v;
  }
  static Val inj(std::int64_t tag, Val payload) {
    Val v(Kind::Inj);
    v.a_ = tag;
    v.hash_ = mix(mix(seed(Kind::Inj), std::hash<std::int64_t>{}(tag)), payload.hash_);
    v.node_ = std::make_shared<const Node>(Node{{std::move(payload)}, {}});
    return v;
  }
  /// Entries must already be sorted by key with distinct keys; coefficient
  /// normalization is the caller's business (see algebra.hpp).
  static Val bag(std::vector<Entry> entries) {
    Val v(Kind::Bag);
    std::size_t h = seed(Kind::Bag);
    for (const auto& [k, c] : entries) h = mix(mix(h, k.hash_), c.hash_);
    v.hash_ = h;
    if (!entries.empty()) v.node_ = std::make_shared<const Node>(Node{{}, std::move(entries)});
    return v;
  }

  Kind kind() const { return kind_; }
  bool is_atom() const { return kind_ == Kind::Atom; }
  bool is_num() const { return kind_ == Kind::Num; }
  bool is_tuple() const { return kind_ == Kind::Tuple; }
  bool is_inj() const { return kind_ == Kind::Inj; }
  bool is_bag() const { return kind_ == Kind::Bag; }

  std::int64_t as_atom() const {
    expect(Kind::Atom);
    return a_;
  }
  Rational as_num() const {
    expect(Kind::Num);
    return Rational(a_, b_);
  }
  const std::vector<Val>& items() const {
    expect(Kind::Tuple);
    return node_ ? node_->items : empty_items();
  }
  std::size_t size() const { return items().size(); }
  const Val& operator[](std::size_t i) const { return items().at(i); }
  std::int64_t tag() const {
    expect(Kind::Inj);
    return a_;
  }
  const Val& payload() const {
    expect(Kind::Inj);
    return node_->items[0];
  }
  const std::vector<Entry>& entries() const {
    expect(Kind::Bag);
    return node_ ? node_->entries : empty_entries();
  }

  std::size_t hash() const { return hash_; }

  friend bool operator==(const Val& x, const Val& y) {
    if (x.hash_ != y.hash_ || x.kind_ != y.kind_) return false;
    if (x.node_ == y.node_) return x.a_ == y.a_ && x.b_ == y.b_;
    return compare(x, y) == 0;
  }
  friend std::strong_ordering operator<=>(const Val& x, const Val& y) { return compare(x, y) <=> 0; }

  /// Total order: kind first; tuples and bags are compared shortlex.
  static int compare(const Val& x, const Val& y) {
    if (x.kind_ != y.kind_) return x.kind_ < y.kind_ ? -1 : 1;
    switch (x.kind_) {
      case Kind::Atom:
        return x.a_ < y.a_ ? -1 : (x.a_ > y.a_ ? 1 : 0);
      case Kind::Num: {
        auto c = Rational(x.a_, x.b_) <=> Rational(y.a_, y.b_);
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
      }
      case Kind::Tuple: {
        if (x.node_ == y.node_) return 0;
        const auto& a = x.items();
        const auto& b = y.items();
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (std::size_t i = 0; i < a.size(); ++i)
          if (int c = compare(a[i], b[i])) return c;
        return 0;
      }
      case Kind::Inj:
        if (x.a_ != y.a_) return x.a_ < y.a_ ? -1 : 1;
        return compare(x.payload(), y.payload());
      case Kind::Bag: {
        if (x.node_ == y.node_) return 0;
        const auto& a = x.entries();
        const auto& b = y.entries();
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (std::size_t i = 0; i < a.size(); ++i) {
          if (int c = compare(a[i].first, b[i].first)) return c;
          if (int c = compare(a[i].second, b[i].second)) return c;
        }
        return 0;
      }
    }
    return 0;
  }

  std::string str() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }
  friend std::ostream& operator<<(std::ostream& os, const Val& v) {
    v.print(os);
    return os;
  }

  /// Structured JSON: atom -> int, num -> "p/q" string, tuple -> array,
  /// inj -> {"in": k, "v": ...}, bag -> {"bag": [[key, coef], ...]}.
  nlohmann::json to_json() const {
    switch (kind_) {
      case Kind::Atom:
        return a_;
      case Kind::Num:
        return Rational(a_, b_).str();
      case Kind::Tuple: {
        auto arr = nlohmann::json::array();
        for (const auto& x : items()) arr.push_back(x.to_json());
        return arr;
      }
      case Kind::Inj:
        return {{"in", a_}, {"v", payload().to_json()}};
      case Kind::Bag: {
        auto arr = nlohmann::json::array();
        for (const auto& [k, c] : entries()) arr.push_back({k.to_json(), c.to_json()});
        return {{"bag", arr}};
      }
    }
    return nullptr;
  }
  static Val from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return atom(j.get<std::int64_t>());
    if (j.is_string()) return num(Rational::parse(j.get<std::string>()));
    if (j.is_array()) {
      std::vector<Val> xs;
      for (const auto& e : j) xs.push_back(from_json(e));
      return tuple(std::move(xs));
    }
    if (j.is_object() && j.contains("in")) return inj(j.at("in").get<std::int64_t>(), from_json(j.at("v")));
    if (j.is_object() && j.contains("bag")) {
      std::vector<Entry> es;
      for (const auto& e : j.at("bag")) es.emplace_back(from_json(e.at(0)), from_json(e.at(1)));
      return bag(std::move(es));
    }
    throw std::invalid_argument("cannot decode value from JSON: " + j.dump());
  }

 private:
  struct Node {
    std::vector<Val> items;
    std::vector<Entry> entries;
  };

  explicit Val(Kind k) : kind_(k) {}

  Kind kind_;
  std::int64_t a_ = 0;
  std::int64_t b_ = 1;
  std::size_t hash_ = 0;
  std::shared_ptr<const Node> node_;

  static std::size_t seed(Kind k) { return 0x9e3779b97f4a7c15ULL * (static_cast<std::size_t>(k) + 1); }
  static std::size_t mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }
  static const std::vector<Val>& empty_items() {
    static const std::vector<Val> e;
    return e;
  }
  static const std::vector<Entry>& empty_entries() {
    static const std::vector<Entry> e;
    return e;
  }
  void expect(Kind k) const {
    if (kind_ != k) throw std::logic_error("value has the wrong shape: " + str());
  }

  void print(std::ostream& os) const {
    switch (kind_) {
      case Kind::Atom:
        if (a_ >= 0 && a_ < 26)
          os << static_cast<char>('a' + a_);
        else
          os << 'e' << a_;
        break;
      case Kind::Num:
        os << Rational(a_, b_);
        break;
      case Kind::Tuple: {
        os << '(';
        bool first = true;
        for (const auto& x : items()) {
          if (!first) os << ',';
          first = false;
          x.print(os);
        }
        os << ')';
        break;
      }
      case Kind::Inj:
        os << "in" << a_ << '[';
        payload().print(os);
        os << ']';
        break;
      case Kind::Bag: {
        os << '{';
        bool first = true;
        for (const auto& [k, c] : entries()) {
          if (!first) os << ", ";
          first = false;
          k.print(os);
          os << ':';
          c.print(os);
        }
        os << '}';
        break;
      }
    }
  }
};

struct ValHash {
  std::size_t operator()(const Val& v) const { return v.hash(); }
};

inline Val unit_val() { return Val(); }

/// Tuple of atoms 0..n-1 style helpers.
inline Val atoms_tuple(const std::vector<std::int64_t>& xs) {
  std::vector<Val> v;
  v.reserve(xs.size());
  for (auto x : xs) v.push_back(Val::atom(x));
  return Val::tuple(std::move(v));
}

}  // namespace monadlab

template <>
struct std::hash<monadlab::Val> {
  std::size_t operator()(const monadlab::Val& v) const { return v.hash(); }
};
