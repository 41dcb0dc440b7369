#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "perm_group.hpp"
#include "permutation.hpp"
#include "shape.hpp"

namespace invar {

namespace detail {

// Orbit partition of all points under a generator set, stored as Schreier
// vectors (parent point + generator index), with the orbit root always the
// smallest orbit member.  to_point(x) rebuilds the representative mapping
// root -> x on demand; trees are shallow, so this trades a couple of
// compositions for a big memory saving across the many cached nodes.
struct OrbitPartition {
  std::array<std::int8_t, max_points> orbit_min{};
  std::array<std::int8_t, max_points> parent{};
  std::array<std::int8_t, max_points> via{};

  void compute(const std::vector<SignedPerm>& generators, int n) {
    orbit_min.fill(-1);
    parent.fill(-1);
    via.fill(-1);
    std::vector<int> queue;
    for (int root = 0; root < n; ++root) {
      if (orbit_min[root] >= 0) continue;
      orbit_min[root] = static_cast<std::int8_t>(root);
      queue.clear();
      queue.push_back(root);
      for (std::size_t k = 0; k < queue.size(); ++k) {
        int x = queue[k];
        for (std::size_t gi = 0; gi < generators.size(); ++gi) {
          int y = generators[gi](x);
          if (orbit_min[y] >= 0) continue;
          orbit_min[y] = static_cast<std::int8_t>(root);
          parent[y] = static_cast<std::int8_t>(x);
          via[y] = static_cast<std::int8_t>(gi);
          queue.push_back(y);
        }
      }
    }
  }

  // Walking up from x meets the tree edges in application order, so the
  // product root->x accumulates directly.
  SignedPerm to_point(int x, const std::vector<SignedPerm>& generators, int n) const {
    SignedPerm p = SignedPerm::identity(n);
    while (parent[x] >= 0) {
      p = compose(p, generators[via[x]]);
      x = parent[x];
    }
    return p;
  }
};

// One node of the lazily grown tree of pointwise value stabilizers of S.
// The node at path (v_0, ..., v_{k-1}) generates Stab_S(v_0, ..., v_{k-1}).
struct StabNode {
  std::vector<SignedPerm> gens;
  OrbitPartition part;
  std::map<int, std::unique_ptr<StabNode>> children;

  StabNode(std::vector<SignedPerm> g, int n) : gens(std::move(g)) { part.compute(gens, n); }

  StabNode* child(int v, int n) {
    auto it = children.find(v);
    if (it != children.end()) return it->second.get();
    // Schreier generators of the stabilizer of v, filtered through an
    // incremental group so the child generating set stays small.
    std::vector<SignedPerm> kept;
    PermGroup filter(n);
    int root = part.orbit_min[v];
    SignedPerm v_to_root = part.to_point(v, gens, n).inverse();
    for (int y = 0; y < n; ++y) {
      if (part.orbit_min[y] != root) continue;
      SignedPerm w_y = compose(part.to_point(y, gens, n), v_to_root);  // v -> y
      for (const SignedPerm& g : gens) {
        SignedPerm w_z = compose(part.to_point(g(y), gens, n), v_to_root);
        SignedPerm s = compose(w_z.inverse(), compose(g, w_y));
        if (s.is_identity()) continue;
        if (!filter.contains(s)) {
          filter.add_generator(s);
          kept.push_back(s);
        }
      }
    }
    auto node = std::make_unique<StabNode>(std::move(kept), n);
    StabNode* out = node.get();
    children.emplace(v, std::move(node));
    return out;
  }
};

}  // namespace detail

// Canonical representative of the double coset {s·g·d : s in S, d in D} under
// the frozen total order (lexicographic images, then sign +1 first).
//
// g maps contraction positions ("names") to slots; S acts on slots from the
// left, D on names from the right.  The scan fixes the image of name i at
// step i: right freedom is level i of D's natural-base stabilizer chain and
// left freedom the pointwise stabilizer of the already-chosen values in S.
// Candidates are kept as full composites and deduplicated on (images, sign);
// seeing the same images with both signs proves the coset contains h and -h,
// i.e. the monomial vanishes -> ZERO, reported as std::nullopt.
//
// Instances cache the D chain and the S stabilizer tree, so reuse across many
// canonicalizations of the same shape is cheap.  Not thread-safe: give each
// worker its own instance.
class DoubleCosetCanonicalizer {
 public:
  DoubleCosetCanonicalizer(const std::vector<SignedPerm>& s_gens,
                           const std::vector<SignedPerm>& d_gens, int n)
      : DoubleCosetCanonicalizer(PermGroup::from_generators(s_gens, n),
                                 PermGroup::from_generators(d_gens, n)) {}

  DoubleCosetCanonicalizer(const PermGroup& s, const PermGroup& d)
      : n_(s.degree()),
        all_zero_(s.sign_degenerate() || d.sign_degenerate()),
        d_chain_(d),
        s_root_(s.strong_generators(), s.degree()) {
    if (s.degree() != d.degree()) throw std::invalid_argument("S and D degree mismatch");
  }

  DoubleCosetCanonicalizer(const DoubleCosetCanonicalizer&) = delete;
  DoubleCosetCanonicalizer& operator=(const DoubleCosetCanonicalizer&) = delete;

  explicit DoubleCosetCanonicalizer(const Shape& shape)
      : DoubleCosetCanonicalizer(shape.slot_generators(), shape.dummy_generators(),
                                 shape.n_slots()) {}

  int degree() const { return n_; }

  std::optional<SignedPerm> canonicalize(const SignedPerm& g) {
    if (g.degree() != n_) throw std::invalid_argument("degree mismatch in canonicalize");
    if (all_zero_) return std::nullopt;
    cands_.clear();
    cands_.push_back(g);
    detail::StabNode* node = &s_root_;
    for (int i = 0; i < n_; ++i) {
      const auto& lvl = d_chain_.level(i).tr;
      int best = n_;
      for (const SignedPerm& c : cands_)
        for (int y : lvl.orbit) {
          int m = node->part.orbit_min[c(y)];
          if (m < best) best = m;
        }
      next_.clear();
      for (const SignedPerm& c : cands_) {
        for (std::size_t yi = 0; yi < lvl.orbit.size(); ++yi) {
          int w = c(lvl.orbit[yi]);
          if (node->part.orbit_min[w] != best) continue;
          SignedPerm sigma = node->part.to_point(w, node->gens, n_).inverse();  // w -> best
          next_.push_back(compose(sigma, compose(c, lvl.u[yi])));
        }
      }
      std::sort(next_.begin(), next_.end());
      cands_.clear();
      for (std::size_t k = 0; k < next_.size(); ++k) {
        if (k > 0 && next_[k].same_images(next_[k - 1])) {
          if (next_[k].sign() != next_[k - 1].sign()) return std::nullopt;  // ZERO
          continue;
        }
        cands_.push_back(next_[k]);
      }
      node = node->child(best, n_);
    }
    return cands_.front();
  }

 private:
  int n_;
  bool all_zero_;
  PermGroup d_chain_;
  detail::StabNode s_root_;
  std::vector<SignedPerm> cands_, next_;
};

inline std::optional<SignedPerm> canonical_double_coset_rep(const SignedPerm& g,
                                                            const PermGroup& s,
                                                            const PermGroup& d) {
  DoubleCosetCanonicalizer canon(s, d);
  return canon.canonicalize(g);
}

// Shared per-shape canonicalizers; they accumulate stabilizer caches, so
// reusing one across calls is much cheaper than rebuilding.
class CanonicalizerCache {
 public:
  DoubleCosetCanonicalizer& get(const Shape& shape) {
    auto it = map_.find(shape);
    if (it == map_.end())
      it = map_.emplace(shape, std::make_unique<DoubleCosetCanonicalizer>(shape)).first;
    return *it->second;
  }

 private:
  std::map<Shape, std::unique_ptr<DoubleCosetCanonicalizer>> map_;
};

// Exhaustive reference: minimum over all |S|·|D| products.  Test oracle and
// verification fallback for small groups.
inline std::optional<SignedPerm> brute_force_double_coset_rep(const SignedPerm& g,
                                                              const PermGroup& s,
                                                              const PermGroup& d,
                                                              std::size_t cap = 1u << 20) {
  auto s_elems = enumerate_elements(s, cap);
  auto d_elems = enumerate_elements(d, cap);
  if (s_elems.size() * d_elems.size() > cap)
    throw std::runtime_error("double coset too large for brute force");
  std::optional<SignedPerm> best;
  bool zero = false;
  for (const SignedPerm& se : s_elems) {
    SignedPerm sg = compose(se, g);
    for (const SignedPerm& de : d_elems) {
      SignedPerm h = compose(sg, de);
      if (!best) {
        best = h;
        continue;
      }
      if (h.same_images(*best)) {
        if (h.sign() != best->sign()) zero = true;
        continue;
      }
      if (h < *best) {
        // The zero flag tracks the current minimum only; a vanishing coset
        // always exposes both signs at its minimal images, so resetting here
        // is sound.
        best = h;
        zero = false;
      }
    }
  }
  if (zero) return std::nullopt;
  return best;
}

}  // namespace invar
