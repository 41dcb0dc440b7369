#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "canonical.hpp"
#include "conversions.hpp"
#include "enumerate.hpp"
#include "oracle.hpp"
#include "random.hpp"
#include "rational.hpp"
#include "shape.hpp"
#include "tensor_expr.hpp"

namespace invar {

// Names one connected contraction class: the r-th class (1-based, in
// canonical representative order) among the connected classes of the shape.
struct InvariantId {
  InvKind kind = InvKind::I;
  int degree = 0;
  int r = 0;

  Shape shape() const { return Shape(kind, degree); }

  std::string to_string() const {
    return std::string(1, kind_letter(kind)) + "[" + std::to_string(degree) + "," +
           std::to_string(r) + "]";
  }

  friend bool operator==(const InvariantId&, const InvariantId&) = default;
  friend bool operator<(const InvariantId& a, const InvariantId& b) {
    if (a.degree != b.degree) return a.degree < b.degree;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.r < b.r;
  }
};

// Product of invariant classes times an optional signature sign sig (sig
// squares to one).  The ordering is an elimination order that ranks the more
// complicated invariants higher: compare the total degree, then the
// constituents from the largest one down, and let the sign break exact ties.
// Multiplying two comparable monomials by a common factor preserves their
// order unless they were a sign-flip pair.
class InvariantMonomial {
 public:
  InvariantMonomial() = default;
  InvariantMonomial(std::vector<InvariantId> ids, int sigma_pow)
      : ids_(std::move(ids)), sigma_(sigma_pow & 1) {
    std::sort(ids_.begin(), ids_.end());
  }

  static InvariantMonomial single(const InvariantId& id, int sigma_pow = 0) {
    return InvariantMonomial({id}, sigma_pow);
  }

  const std::vector<InvariantId>& ids() const { return ids_; }
  int sigma_pow() const { return sigma_; }
  bool is_unit() const { return ids_.empty() && sigma_ == 0; }
  int max_degree() const { return ids_.empty() ? 0 : ids_.back().degree; }
  int total_degree() const {
    int n = 0;
    for (const auto& id : ids_) n += id.degree;
    return n;
  }

  // Multiset inclusion of the constituents; the signs never obstruct
  // divisibility since the quotient can absorb a sig.
  bool divisible_by(const InvariantMonomial& d) const {
    auto i = ids_.begin();
    for (const auto& x : d.ids_) {
      i = std::lower_bound(i, ids_.end(), x);
      if (i == ids_.end() || !(*i == x)) return false;
      ++i;
    }
    return true;
  }

  InvariantMonomial divided_by(const InvariantMonomial& d) const {
    std::vector<InvariantId> out;
    auto i = ids_.begin();
    for (const auto& x : d.ids_) {
      auto j = std::lower_bound(i, ids_.end(), x);
      if (j == ids_.end() || !(*j == x)) throw std::invalid_argument("monomial not divisible");
      out.insert(out.end(), i, j);
      i = j + 1;
    }
    out.insert(out.end(), i, ids_.end());
    return InvariantMonomial(std::move(out), sigma_ ^ d.sigma_);
  }

  InvariantMonomial times(const InvariantMonomial& o) const {
    std::vector<InvariantId> out;
    out.reserve(ids_.size() + o.ids_.size());
    std::merge(ids_.begin(), ids_.end(), o.ids_.begin(), o.ids_.end(), std::back_inserter(out));
    return InvariantMonomial(std::move(out), sigma_ ^ o.sigma_);
  }

  InvariantMonomial sigma_flipped() const { return InvariantMonomial(ids_, sigma_ ^ 1); }

  std::string to_string() const {
    std::string s = sigma_ ? "sig" : "";
    for (const auto& id : ids_) {
      if (!s.empty()) s += "*";
      s += id.to_string();
    }
    return s.empty() ? "1" : s;
  }

  friend bool operator==(const InvariantMonomial&, const InvariantMonomial&) = default;
  friend bool operator<(const InvariantMonomial& a, const InvariantMonomial& b) {
    int ta = a.total_degree(), tb = b.total_degree();
    if (ta != tb) return ta < tb;
    auto i = a.ids_.rbegin();
    auto j = b.ids_.rbegin();
    for (; i != a.ids_.rend() && j != b.ids_.rend(); ++i, ++j)
      if (!(*i == *j)) return *i < *j;
    if (a.ids_.size() != b.ids_.size()) return a.ids_.size() < b.ids_.size();
    return a.sigma_ < b.sigma_;
  }

 private:
  std::vector<InvariantId> ids_;
  int sigma_ = 0;
};

// Polynomial with rational coefficients in the invariant monomials.
class InvariantPolynomial {
 public:
  using Terms = std::map<InvariantMonomial, Rational>;

  InvariantPolynomial() = default;

  static InvariantPolynomial term(const InvariantMonomial& m, const Rational& c) {
    InvariantPolynomial p;
    p.add(m, c);
    return p;
  }

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const Terms& terms() const { return terms_; }

  void add(const InvariantMonomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  InvariantPolynomial& operator+=(const InvariantPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  InvariantPolynomial& operator-=(const InvariantPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add(m, -c);
    return *this;
  }

  void scale(const Rational& c) {
    if (c == 0) {
      terms_.clear();
      return;
    }
    for (auto& [m, v] : terms_) v *= c;
  }

  // Adds c * q * p.
  void add_product(const InvariantPolynomial& p, const InvariantMonomial& q, const Rational& c) {
    for (const auto& [m, v] : p.terms_) add(m.times(q), v * c);
  }

  const std::pair<const InvariantMonomial, Rational>& leading() const {
    if (terms_.empty()) throw std::logic_error("leading term of zero polynomial");
    return *terms_.rbegin();
  }

  InvariantPolynomial sigma_flipped() const {
    InvariantPolynomial out;
    for (const auto& [m, c] : terms_) out.terms_.emplace(m.sigma_flipped(), c);
    return out;
  }

  // Scaled so the leading coefficient is one.
  InvariantPolynomial normalized() const {
    InvariantPolynomial out = *this;
    if (!out.terms_.empty()) out.scale(1 / Rational(out.leading().second));
    return out;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [m, c] = *it;
      if (s.empty()) {
        if (c < 0) s += "-";
      } else {
        s += c < 0 ? " - " : " + ";
      }
      Rational a = abs(c);
      if (a != 1 || m.is_unit()) {
        s += a.get_str();
        if (!m.is_unit()) s += "*";
      }
      if (!m.is_unit()) s += m.to_string();
    }
    return s;
  }

  friend bool operator==(const InvariantPolynomial&, const InvariantPolynomial&) = default;
  friend bool operator<(const InvariantPolynomial& a, const InvariantPolynomial& b) {
    return a.terms_ < b.terms_;
  }

 private:
  Terms terms_;
};

inline InvariantPolynomial operator*(const InvariantPolynomial& a, const InvariantPolynomial& b) {
  InvariantPolynomial out;
  for (const auto& [m, c] : b.terms()) out.add_product(a, m, c);
  return out;
}

// Rewriting system on invariant monomials.  Each rule head == tail has the
// head strictly larger than every tail monomial, and the stored rules are
// kept fully inter-reduced, so reduce() computes normal forms with respect
// to the whole set.
class SyzygySet {
 public:
  struct Rule {
    InvariantPolynomial tail;
    // The tail contains the head's own sigma flip (the relation only pins
    // the sign-odd combination); rewriting through a sigma quotient would
    // grow the polynomial, so such quotients are skipped.
    bool sigma_locked = false;

    friend bool operator==(const Rule&, const Rule&) = default;
  };

  std::size_t size() const { return rules_.size(); }
  const std::map<InvariantMonomial, Rule>& rules() const { return rules_; }
  bool is_head(const InvariantMonomial& m) const { return rules_.count(m) != 0; }

  InvariantPolynomial reduce(InvariantPolynomial p) const {
    InvariantPolynomial out;
    while (!p.is_zero()) {
      InvariantMonomial m = p.leading().first;
      Rational c = p.leading().second;
      p.add(m, -c);
      const auto* rule = find_rule(m);
      if (!rule)
        out.add(m, c);
      else
        p.add_product(rule->second.tail, m.divided_by(rule->first), c);
    }
    return out;
  }

  bool reduces_to_zero(InvariantPolynomial p) const { return reduce(std::move(p)).is_zero(); }

  // Reduces the relation against the current rules and, when anything
  // survives, installs it as a rewrite rule, dissolving any existing rule
  // the new head rewrites and re-normalizing affected tails.  Returns
  // whether the relation carried new content.
  bool insert(InvariantPolynomial p) {
    bool changed = false;
    std::vector<InvariantPolynomial> work;
    work.push_back(std::move(p));
    while (!work.empty()) {
      InvariantPolynomial cur = reduce(std::move(work.back()));
      work.pop_back();
      if (cur.is_zero()) continue;
      changed = true;
      if (cur.leading().first.ids().empty())
        throw std::logic_error("inconsistent relation: nonzero constant reduces to zero");
      cur = cur.normalized();
      InvariantMonomial head = cur.leading().first;
      InvariantPolynomial tail;
      for (const auto& [m, c] : cur.terms())
        if (!(m == head)) tail.add(m, -c);

      // If the tail carries the head's sigma flip, combine with the sigma
      // mirror of the relation: for flip coefficient c with c^2 != 1 the
      // flip can be eliminated outright; for c^2 == 1 only the mirror
      // difference is extractable and the rule stays sigma locked.
      bool locked = false;
      InvariantMonomial flip = head.sigma_flipped();
      if (auto it = tail.terms().find(flip); it != tail.terms().end()) {
        Rational cf = -it->second;  // coefficient of flip inside cur
        if (cf * cf != 1) {
          InvariantPolynomial mirror = cur.sigma_flipped();
          mirror.scale(-cf);
          cur += mirror;
          cur.scale(1 / (1 - cf * cf));
          tail = InvariantPolynomial();
          for (const auto& [m, c] : cur.terms())
            if (!(m == head)) tail.add(m, -c);
        } else {
          InvariantPolynomial mirror = cur.sigma_flipped();
          mirror.scale(-cf);
          mirror += cur;
          work.push_back(std::move(mirror));
          locked = true;
        }
      }
      tail = reduce(std::move(tail));

      // Existing rules whose head the new rule rewrites dissolve back into
      // the worklist; surviving tails touched by the new head are
      // re-normalized once the rule is in place.
      std::vector<InvariantMonomial> dissolved;
      for (const auto& [h, r] : rules_)
        if (h.divisible_by(head) && !(locked && ((h.sigma_pow() ^ head.sigma_pow()) & 1)))
          dissolved.push_back(h);
      for (const auto& h : dissolved) {
        InvariantPolynomial whole = InvariantPolynomial::term(h, 1);
        whole -= rules_.at(h).tail;
        rules_.erase(h);
        work.push_back(std::move(whole));
      }

      rules_[head] = Rule{std::move(tail), locked};

      std::vector<InvariantMonomial> touched;
      for (const auto& [h, r] : rules_) {
        if (h == head) continue;
        for (const auto& [m, c] : r.tail.terms())
          if (m.divisible_by(head)) {
            touched.push_back(h);
            break;
          }
      }
      for (const auto& h : touched) rules_.at(h).tail = reduce(rules_.at(h).tail);
    }
    return changed;
  }

  // Merges every rule of the other set into this one.
  int absorb(const SyzygySet& o) {
    int added = 0;
    for (const auto& [h, r] : o.rules_) {
      InvariantPolynomial whole = InvariantPolynomial::term(h, 1);
      whole -= r.tail;
      if (insert(std::move(whole))) ++added;
    }
    return added;
  }

 private:
  // Largest rule head dividing m whose application shrinks the polynomial.
  // Candidate heads are exactly the nonempty submultisets of m's ids (with
  // either sign), so they are enumerated and looked up directly.
  const std::pair<const InvariantMonomial, Rule>* find_rule(const InvariantMonomial& m) const {
    if (rules_.empty() || m.ids().empty()) return nullptr;
    std::vector<std::pair<InvariantId, int>> distinct;
    for (const auto& id : m.ids())
      if (distinct.empty() || !(distinct.back().first == id))
        distinct.emplace_back(id, 1);
      else
        ++distinct.back().second;

    const std::pair<const InvariantMonomial, Rule>* best = nullptr;
    std::vector<InvariantId> sub;
    auto visit = [&](std::size_t pos, auto&& self) -> void {
      if (pos == distinct.size()) {
        if (sub.empty()) return;
        for (int sig : {0, 1}) {
          auto it = rules_.find(InvariantMonomial(sub, sig));
          if (it == rules_.end()) continue;
          if (it->second.sigma_locked && ((m.sigma_pow() ^ sig) & 1)) continue;
          if (!best || best->first < it->first) best = &*it;
        }
        return;
      }
      const auto& [id, mult] = distinct[pos];
      for (int take = 0; take <= mult; ++take) {
        self(pos + 1, self);
        sub.push_back(id);
      }
      sub.resize(sub.size() - static_cast<std::size_t>(mult) - 1);
      return;
    };
    visit(0, visit);
    return best;
  }

  std::map<InvariantMonomial, Rule> rules_;
};

// Census lookup: numbers the connected classes of every registered shape and
// maps canonical representatives back to their ids.
class InvariantIndex {
 public:
  void add_census(Census c) {
    Shape s = c.shape;
    Lut lut;
    for (const auto& e : c.entries)
      if (!e.reducible) {
        lut.by_rep.emplace(e.rep, static_cast<int>(lut.reps.size()) + 1);
        lut.reps.push_back(e.rep);
      }
    censuses_[s] = std::move(c);
    luts_[s] = std::move(lut);
  }

  bool has_shape(const Shape& s) const { return censuses_.count(s) != 0; }
  const std::map<Shape, Census>& censuses() const { return censuses_; }

  const Census& census(const Shape& s) const {
    auto it = censuses_.find(s);
    if (it == censuses_.end()) throw std::out_of_range("no census for shape");
    return it->second;
  }

  int connected_count(const Shape& s) const { return static_cast<int>(reps(s).size()); }

  const std::vector<SignedPerm>& reps(const Shape& s) const {
    auto it = luts_.find(s);
    if (it == luts_.end()) throw std::out_of_range("no census for shape");
    return it->second.reps;
  }

  std::vector<InvariantId> ids(const Shape& s) const {
    std::vector<InvariantId> out;
    int n = connected_count(s);
    for (int r = 1; r <= n; ++r) out.push_back({s.kind, s.degree, r});
    return out;
  }

  std::optional<InvariantId> id_of(const Shape& s, const SignedPerm& rep) const {
    auto it = luts_.find(s);
    if (it == luts_.end()) return std::nullopt;
    auto jt = it->second.by_rep.find(rep);
    if (jt == it->second.by_rep.end()) return std::nullopt;
    return InvariantId{s.kind, s.degree, jt->second};
  }

  const SignedPerm& rep_of(const InvariantId& id) const {
    const auto& v = reps(id.shape());
    if (id.r < 1 || id.r > static_cast<int>(v.size()))
      throw std::out_of_range("invariant id out of range: " + id.to_string());
    return v[id.r - 1];
  }

  CanonicalizerCache& canonicalizers() const { return cache_; }

  // Invariant-algebra image of one configuration: the zero polynomial for a
  // vanishing class, otherwise coeff * sig^k times the product of the ids of
  // the connected components.
  InvariantPolynomial config_polynomial(const Shape& shape, const SignedPerm& g,
                                        const Rational& coeff = 1, int sigma_pow = 0) const {
    SplitResult sr = split_and_canonicalize(shape, g, cache_);
    if (sr.zero) return {};
    std::vector<InvariantId> parts;
    for (const auto& [ps, rep] : sr.parts) {
      auto id = id_of(ps, rep);
      if (!id)
        throw std::out_of_range("class missing from census: " +
                                std::string(1, kind_letter(ps.kind)) + " degree " +
                                std::to_string(ps.degree));
      parts.push_back(*id);
    }
    return InvariantPolynomial::term(InvariantMonomial(std::move(parts), sigma_pow),
                                     coeff * sr.sign);
  }

  // The same through an explicit tensor monomial in R and epsilon.
  InvariantPolynomial term_polynomial(const TensorTerm& t) const {
    TermConfig tc = term_to_config(t);
    return config_polynomial(tc.shape, tc.config, tc.coeff, tc.sigma_pow);
  }

  InvariantPolynomial expr_polynomial(const TensorExpr& e) const {
    InvariantPolynomial out;
    for (const auto& t : e.terms) out += term_polynomial(t);
    return out;
  }

 private:
  struct Lut {
    std::vector<SignedPerm> reps;
    std::map<SignedPerm, int> by_rep;
  };
  std::map<Shape, Census> censuses_;
  std::map<Shape, Lut> luts_;
  mutable CanonicalizerCache cache_;
};

// Numeric value of a monomial on a curvature sample: the product of the
// component representative values, times the sample's sign of det(g) for a
// sig factor.  The memo caches per-id values across calls on one sample.
inline Rational evaluate_monomial(const InvariantIndex& idx, const InvariantMonomial& m,
                                  const CurvatureSample& s,
                                  std::map<InvariantId, Rational>* memo = nullptr) {
  Rational v = m.sigma_pow() ? Rational(s.sigma) : Rational(1);
  for (const auto& id : m.ids()) {
    if (memo) {
      auto it = memo->find(id);
      if (it != memo->end()) {
        v *= it->second;
        continue;
      }
    }
    Rational w = evaluate_term(config_term(id.shape(), idx.rep_of(id)), s);
    if (memo) memo->emplace(id, w);
    v *= w;
  }
  return v;
}

inline Rational evaluate_polynomial(const InvariantIndex& idx, const InvariantPolynomial& p,
                                    const CurvatureSample& s,
                                    std::map<InvariantId, Rational>* memo = nullptr) {
  Rational acc = 0;
  for (const auto& [m, c] : p.terms()) acc += c * evaluate_monomial(idx, m, s, memo);
  return acc;
}

// ---------------------------------------------------------------------------
// Relation generators.

// Three-term cyclic sums over the last three slots of one Riemann factor,
// applied to every connected class of the shape.  Returns the distinct
// nonzero relations.
inline std::vector<InvariantPolynomial> cyclic_relations(const InvariantIndex& idx,
                                                         const Shape& shape) {
  std::vector<InvariantPolynomial> out;
  std::set<InvariantPolynomial> seen;
  int n = shape.n_slots();
  for (const SignedPerm& rep : idx.reps(shape)) {
    for (int f = 0; f < shape.n_factors(); ++f) {
      if (shape.factor_is_epsilon(f)) continue;
      int b = 4 * f;
      std::vector<int> img(n);
      for (int i = 0; i < n; ++i) img[i] = i;
      img[b + 1] = b + 3;
      img[b + 3] = b + 2;
      img[b + 2] = b + 1;
      SignedPerm cyc = SignedPerm::from_images(img, +1);
      InvariantPolynomial rel;
      SignedPerm g = rep;
      for (int k = 0; k < 3; ++k) {
        rel += idx.config_polynomial(shape, g);
        g = compose(cyc, g);
      }
      if (rel.is_zero()) continue;
      rel = rel.normalized();
      if (seen.insert(rel).second) out.push_back(std::move(rel));
    }
  }
  return out;
}

inline int add_cyclic_relations(const InvariantIndex& idx, const Shape& shape, SyzygySet& rules) {
  int added = 0;
  for (auto& rel : cyclic_relations(idx, shape))
    if (rules.insert(std::move(rel))) ++added;
  return added;
}

// Signed sum over the 120 arrangements of five chosen slots; any five slot
// contents are linearly dependent in four dimensions, so the sum vanishes.
inline InvariantPolynomial dimensional_relation(const InvariantIndex& idx, const Shape& shape,
                                                const SignedPerm& g,
                                                const std::array<int, 5>& slots) {
  int n = shape.n_slots();
  InvariantPolynomial rel;
  std::array<int, 5> perm = {0, 1, 2, 3, 4};
  do {
    int sign = 1;
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j)
        if (perm[i] > perm[j]) sign = -sign;
    std::vector<int> img(n);
    for (int i = 0; i < n; ++i) img[i] = i;
    for (int i = 0; i < 5; ++i) img[slots[i]] = slots[perm[i]];
    SignedPerm tau = SignedPerm::from_images(img, +1);
    rel += idx.config_polynomial(shape, compose(tau, g), sign);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return rel;
}

struct DimensionalOptions {
  bool exhaustive = true;
  std::uint64_t seed = 0;
  // Sampling stops after this many consecutive draws without new content.
  int window = 200;
  std::uint64_t max_samples = 0;  // 0: unlimited
};

// Generates dimensional relations for the shape directly into the rule set.
// Exhaustive mode sweeps every (connected class, slot 5-subset) pair;
// sampling mode draws random pairs until the window goes idle.  Returns the
// number of relations that carried new content.
inline int add_dimensional_relations(const InvariantIndex& idx, const Shape& shape,
                                     SyzygySet& rules, const DimensionalOptions& opt = {}) {
  int n = shape.n_slots();
  const auto& reps = idx.reps(shape);
  if (n < 5 || reps.empty()) return 0;
  int added = 0;
  if (opt.exhaustive) {
    for (const SignedPerm& rep : reps)
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          for (int c = b + 1; c < n; ++c)
            for (int d = c + 1; d < n; ++d)
              for (int e = d + 1; e < n; ++e) {
                InvariantPolynomial rel =
                    dimensional_relation(idx, shape, rep, {a, b, c, d, e});
                if (!rel.is_zero() && rules.insert(std::move(rel))) ++added;
              }
    return added;
  }
  std::uint64_t tag = 0x1000u | (shape.has_epsilon() ? 0x100u : 0u) |
                      static_cast<std::uint64_t>(shape.degree);
  std::mt19937_64 rng(mix_seed(opt.seed, tag));
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  int idle = 0;
  std::uint64_t samples = 0;
  while (idle < opt.window && (opt.max_samples == 0 || samples < opt.max_samples)) {
    ++samples;
    const SignedPerm& rep = reps[random_below(rng, reps.size())];
    for (int i = 0; i < 5; ++i) {
      std::size_t j = i + random_below(rng, static_cast<std::size_t>(n - i));
      std::swap(pool[i], pool[j]);
    }
    std::array<int, 5> slots;
    std::copy_n(pool.begin(), 5, slots.begin());
    std::sort(slots.begin(), slots.end());
    InvariantPolynomial rel = dimensional_relation(idx, shape, rep, slots);
    if (!rel.is_zero() && rules.insert(std::move(rel))) {
      ++added;
      idle = 0;
    } else {
      ++idle;
    }
  }
  return added;
}

// The product of two dual classes with the epsilon pair contracted out:
// a sum of pure curvature monomials, each carrying one power of sig.
inline TensorExpr signature_product_expansion(const InvariantIndex& idx, const InvariantId& d1,
                                              const InvariantId& d2) {
  if (d1.kind != InvKind::D || d2.kind != InvKind::D)
    throw std::invalid_argument("signature expansion needs two dual classes");
  TensorTerm t1 = config_term(d1.shape(), idx.rep_of(d1));
  TensorTerm t2 = config_term(d2.shape(), idx.rep_of(d2));
  TensorTerm prod = multiply_terms(t1, t2);
  return tidy(expand_epsilon_pair(prod, 0, static_cast<std::size_t>(1 + d1.degree)));
}

// Relation identifying the monomial D1*D2 with its epsilon-free expansion.
inline InvariantPolynomial signature_relation(const InvariantIndex& idx, const InvariantId& d1,
                                              const InvariantId& d2) {
  InvariantPolynomial rel = InvariantPolynomial::term(InvariantMonomial({d1, d2}, 0), 1);
  rel -= idx.expr_polynomial(signature_product_expansion(idx, d1, d2));
  return rel;
}

// All pairwise products of dual classes up to the given total degree.
inline int add_signature_relations(const InvariantIndex& idx, int max_total_degree,
                                   SyzygySet& rules) {
  std::vector<InvariantId> duals;
  for (const auto& [shape, census] : idx.censuses())
    if (shape.kind == InvKind::D)
      for (const auto& id : idx.ids(shape)) duals.push_back(id);
  int added = 0;
  for (std::size_t i = 0; i < duals.size(); ++i)
    for (std::size_t j = i; j < duals.size(); ++j) {
      if (duals[i].degree + duals[j].degree > max_total_degree) continue;
      if (rules.insert(signature_relation(idx, duals[i], duals[j]))) ++added;
    }
  return added;
}

// Number of connected classes of the shape whose singleton monomial is in
// normal form: the classes the rule set cannot rewrite into anything else.
inline int surviving_count(const InvariantIndex& idx, const Shape& shape,
                           const SyzygySet& rules) {
  int alive = 0;
  for (const InvariantId& id : idx.ids(shape)) {
    InvariantPolynomial p = InvariantPolynomial::term(InvariantMonomial::single(id), 1);
    if (rules.reduce(p) == p) ++alive;
  }
  return alive;
}

}  // namespace invar
