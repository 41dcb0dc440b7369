#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "canonical.hpp"
#include "permutation.hpp"
#include "random.hpp"
#include "shape.hpp"

namespace invar {

namespace detail {

// A perfect matching on the slots of a shape, stored as a partner array:
// partner[i] == j  <=>  slots i and j are contracted with each other.
struct Matching {
  int n = 0;
  std::array<std::uint8_t, max_points> partner{};

  friend bool operator==(const Matching& a, const Matching& b) {
    if (a.n != b.n) return false;
    for (int i = 0; i < a.n; ++i)
      if (a.partner[i] != b.partner[i]) return false;
    return true;
  }
};

// (2m-1)!! = number of perfect matchings on 2m points.
inline std::uint64_t double_factorial_odd(int m) {
  std::uint64_t r = 1;
  for (int k = 3; k <= 2 * m - 1; k += 2) r *= static_cast<std::uint64_t>(k);
  return r;
}

inline std::uint64_t matching_count(int n_slots) {
  return double_factorial_odd(n_slots / 2);
}

// Packs a matching into 4 bits per slot; only valid for n <= 16.
inline std::uint64_t matching_key(const Matching& m) {
  std::uint64_t key = 0;
  for (int i = 0; i < m.n; ++i) key = (key << 4) | m.partner[i];
  return key;
}

inline Matching apply_to_matching(const SignedPerm& s, const Matching& m) {
  Matching out;
  out.n = m.n;
  for (int i = 0; i < m.n; ++i) out.partner[s(i)] = static_cast<std::uint8_t>(s(m.partner[i]));
  return out;
}

// Lexicographic rank of a matching: repeatedly take the smallest unmatched
// slot and index its partner among the remaining slots in increasing order.
inline std::uint64_t matching_rank(const Matching& m) {
  std::uint32_t alive = (m.n == 32) ? 0xffffffffu : ((1u << m.n) - 1);
  std::uint64_t rank = 0;
  while (alive) {
    int a = std::countr_zero(alive);
    int b = m.partner[a];
    std::uint32_t between = alive & ((1u << b) - 1) & ~((2u << a) - 1);
    int idx = std::popcount(between);
    alive &= ~((1u << a) | (1u << b));
    rank += static_cast<std::uint64_t>(idx) * double_factorial_odd(std::popcount(alive) / 2);
  }
  return rank;
}

inline Matching matching_unrank(int n, std::uint64_t rank) {
  Matching m;
  m.n = n;
  std::uint32_t alive = (n == 32) ? 0xffffffffu : ((1u << n) - 1);
  while (alive) {
    int a = std::countr_zero(alive);
    alive &= ~(1u << a);
    std::uint64_t block = double_factorial_odd((std::popcount(alive) - 1) / 2);
    int idx = static_cast<int>(rank / block);
    rank %= block;
    std::uint32_t rest = alive;
    for (int k = 0; k < idx; ++k) rest &= rest - 1;
    int b = std::countr_zero(rest);
    alive &= ~(1u << b);
    m.partner[a] = static_cast<std::uint8_t>(b);
    m.partner[b] = static_cast<std::uint8_t>(a);
  }
  return m;
}

// Configuration with dummy pairs assigned in slot order: pair j occupies the
// j-th matched pair when pairs are sorted by their smaller slot, with the
// upper index on the smaller slot.
inline SignedPerm config_from_matching(const Matching& m) {
  std::vector<int> images(m.n);
  int j = 0;
  for (int a = 0; a < m.n; ++a) {
    int b = m.partner[a];
    if (b < a) continue;
    images[2 * j] = a;
    images[2 * j + 1] = b;
    ++j;
  }
  return SignedPerm::from_images(images, 1);
}

inline Matching matching_of_config(const Shape& shape, const SignedPerm& g) {
  Matching m;
  m.n = shape.n_slots();
  for (int j = 0; j < shape.n_pairs(); ++j) {
    int a = g(2 * j), b = g(2 * j + 1);
    m.partner[a] = static_cast<std::uint8_t>(b);
    m.partner[b] = static_cast<std::uint8_t>(a);
  }
  return m;
}

// Union-find over the factors of a shape, joined along matching edges.
inline std::vector<int> factor_component_of(const Shape& shape, const Matching& m) {
  std::vector<int> root(shape.n_factors());
  for (int f = 0; f < shape.n_factors(); ++f) root[f] = f;
  auto find = [&](int x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (int a = 0; a < m.n; ++a) {
    int b = m.partner[a];
    if (b < a) continue;
    int fa = find(shape.factor_of_slot(a)), fb = find(shape.factor_of_slot(b));
    if (fa != fb) root[std::max(fa, fb)] = std::min(fa, fb);
  }
  for (int f = 0; f < shape.n_factors(); ++f) root[f] = find(f);
  return root;
}

inline bool matching_is_connected(const Shape& shape, const Matching& m) {
  auto root = factor_component_of(shape, m);
  for (int f = 0; f < shape.n_factors(); ++f)
    if (root[f] != 0) return false;
  return true;
}

}  // namespace detail

// One S x D equivalence class of scalar configurations, up to overall sign.
struct ClassEntry {
  SignedPerm rep;                 // canonical slot images, sign normalized to +1
  std::uint64_t matchings = 0;    // matchings in the class (exhaustive sweeps only)
  bool reducible = false;         // contraction graph has more than one component
};

struct Census {
  Shape shape;
  std::vector<ClassEntry> entries;     // sorted by rep
  std::uint64_t zero_matchings = 0;    // matchings whose class vanishes identically
  std::uint64_t total_matchings = 0;   // (n_slots - 1)!! for exhaustive sweeps
  std::uint64_t samples = 0;           // draws taken (randomized sweeps only)

  std::size_t irreducible_count() const {
    std::size_t k = 0;
    for (const auto& e : entries) k += e.reducible ? 0 : 1;
    return k;
  }
};

// Walks every perfect matching of the shape's slots, partitioned into
// S-orbits.  The dummy group rearranges the configurations of a fixed
// matching but never the matching itself (and carries no signs), so each
// S-orbit of matchings is exactly one equivalence class.  Sign labels are
// propagated along the orbit BFS; an inconsistent edge proves the class
// contains both signs of some configuration and therefore vanishes.
inline Census exhaustive_census(const Shape& shape) {
  const int n = shape.n_slots();
  if (n > 16)
    throw std::invalid_argument("exhaustive_census: shape too large (more than 16 slots)");
  const std::uint64_t total = detail::matching_count(n);
  const std::vector<SignedPerm> s_gens = shape.slot_generators();

  DoubleCosetCanonicalizer canon(shape);
  Census census;
  census.shape = shape;
  census.total_matchings = total;

  std::vector<bool> visited(total, false);
  std::vector<std::uint64_t> orbit_ranks;
  std::unordered_map<std::uint64_t, std::int8_t> label;
  std::queue<detail::Matching> frontier;

  for (std::uint64_t r = 0; r < total; ++r) {
    if (visited[r]) continue;
    detail::Matching root = detail::matching_unrank(n, r);

    orbit_ranks.clear();
    label.clear();
    bool conflict = false;
    label.emplace(detail::matching_key(root), 1);
    orbit_ranks.push_back(r);
    frontier.push(root);
    while (!frontier.empty()) {
      detail::Matching cur = frontier.front();
      frontier.pop();
      std::int8_t cur_sign = label.at(detail::matching_key(cur));
      for (const auto& s : s_gens) {
        detail::Matching next = detail::apply_to_matching(s, cur);
        std::int8_t next_sign = static_cast<std::int8_t>(cur_sign * s.sign());
        auto [it, inserted] = label.emplace(detail::matching_key(next), next_sign);
        if (inserted) {
          orbit_ranks.push_back(detail::matching_rank(next));
          frontier.push(next);
        } else if (it->second != next_sign) {
          conflict = true;
        }
      }
    }

    for (std::uint64_t rank : orbit_ranks) visited[rank] = true;
    if (conflict) {
      census.zero_matchings += orbit_ranks.size();
      continue;
    }

    auto rep = canon.canonicalize(detail::config_from_matching(root));
    if (!rep.has_value())
      throw std::logic_error("exhaustive_census: sign-consistent orbit canonicalized to zero");
    ClassEntry entry;
    entry.rep = SignedPerm::from_images(
        std::vector<int>(rep->raw_images(), rep->raw_images() + n), 1);
    entry.matchings = orbit_ranks.size();
    entry.reducible = !detail::matching_is_connected(shape, root);
    census.entries.push_back(std::move(entry));
  }

  std::sort(census.entries.begin(), census.entries.end(),
            [](const ClassEntry& a, const ClassEntry& b) { return a.rep < b.rep; });
  std::uint64_t seen = census.zero_matchings;
  for (const auto& e : census.entries) seen += e.matchings;
  if (seen != total)
    throw std::logic_error("exhaustive_census: class sizes do not partition the matchings");
  return census;
}

struct RandomCensusOptions {
  std::uint64_t seed = 0;
  // Stop once this many consecutive draws produce no new class, scaled by the
  // number of classes found so far (but never less than min_window draws).
  std::uint64_t window_factor = 50;
  std::uint64_t min_window = 0;
  std::uint64_t max_samples = UINT64_MAX;
};

// Draws uniformly random matchings until the saturation window closes.  Each
// draw k has its own seed, so results are independent of batching or thread
// placement.  Vanishing classes canonicalize to nothing and are discarded.
inline Census random_census(const Shape& shape, const RandomCensusOptions& opt) {
  const int n = shape.n_slots();
  DoubleCosetCanonicalizer canon(shape);
  Census census;
  census.shape = shape;

  std::set<SignedPerm> seen;
  std::vector<int> slots(n);
  const std::uint64_t base_seed = mix_seed(
      opt.seed, (shape.has_epsilon() ? 0x100u : 0u) | static_cast<unsigned>(shape.degree));
  std::uint64_t since_novel = 0;
  std::uint64_t k = 0;
  for (; k < opt.max_samples; ++k) {
    std::mt19937_64 rng(mix_seed(base_seed, k));
    for (int i = 0; i < n; ++i) slots[i] = i;
    shuffle_vector(slots, rng);
    auto rep = canon.canonicalize(SignedPerm::from_images(slots, 1));
    bool novel = false;
    if (rep.has_value()) {
      SignedPerm images = SignedPerm::from_images(
          std::vector<int>(rep->raw_images(), rep->raw_images() + n), 1);
      novel = seen.insert(images).second;
    }
    since_novel = novel ? 0 : since_novel + 1;
    std::uint64_t window = std::max<std::uint64_t>(
        opt.window_factor * std::max<std::uint64_t>(seen.size(), 1), opt.min_window);
    if (!novel && since_novel >= window) {
      ++k;
      break;
    }
  }
  census.samples = k;

  for (const auto& images : seen) {
    ClassEntry entry;
    entry.rep = images;
    entry.reducible =
        !detail::matching_is_connected(shape, detail::matching_of_config(shape, images));
    census.entries.push_back(std::move(entry));
  }
  return census;
}

// Builds the configuration whose factors are the given parts laid out left
// to right, with each part keeping its internal contraction pattern.  A dual
// part must come first so that its epsilon lands on factor 0.
inline SignedPerm compose_parts(const Shape& whole,
                                const std::vector<std::pair<Shape, SignedPerm>>& parts) {
  std::vector<int> images(whole.n_slots());
  int slot_offset = 0, pair_offset = 0;
  for (const auto& [part_shape, part_rep] : parts) {
    for (int j = 0; j < part_shape.n_pairs(); ++j) {
      images[2 * (pair_offset + j)] = slot_offset + part_rep(2 * j);
      images[2 * (pair_offset + j) + 1] = slot_offset + part_rep(2 * j + 1);
    }
    slot_offset += part_shape.n_slots();
    pair_offset += part_shape.n_pairs();
  }
  if (slot_offset != whole.n_slots() || 2 * pair_offset != whole.n_slots())
    throw std::invalid_argument("compose_parts: parts do not tile the shape");
  return SignedPerm::from_images(images, 1);
}

namespace detail {

// Enumerates the product classes of `shape` given complete lower-degree
// censuses: each is a multiset of connected lower-degree classes (with
// exactly one dual part for dual shapes), and distinct multisets always give
// distinct classes.
inline std::vector<ClassEntry> composed_product_entries(
    const Shape& shape, const std::map<Shape, Census>& table, CanonicalizerCache& cache) {
  std::vector<std::pair<Shape, SignedPerm>> inv_pool;
  for (int d = 1; d < shape.degree; ++d) {
    auto it = table.find(Shape(InvKind::I, d));
    if (it == table.end())
      throw std::invalid_argument("composed_product_entries: missing invariant census");
    for (const auto& e : it->second.entries)
      if (!e.reducible) inv_pool.emplace_back(it->second.shape, e.rep);
  }

  std::vector<ClassEntry> out;
  DoubleCosetCanonicalizer& canon = cache.get(shape);
  auto emit = [&](const std::vector<std::pair<Shape, SignedPerm>>& parts) {
    auto rep = canon.canonicalize(compose_parts(shape, parts));
    if (!rep.has_value())
      throw std::logic_error("composed_product_entries: product of classes vanished");
    ClassEntry entry;
    entry.rep = SignedPerm::from_images(
        std::vector<int>(rep->raw_images(), rep->raw_images() + shape.n_slots()), 1);
    entry.reducible = true;
    out.push_back(std::move(entry));
  };

  // Multisets are walked with non-decreasing pool position, so each is
  // produced exactly once.
  std::vector<std::pair<Shape, SignedPerm>> chosen;
  auto rec = [&](auto&& self, std::size_t min_pos, int remaining) -> void {
    if (remaining == 0) {
      if (chosen.size() >= 2) emit(chosen);
      return;
    }
    for (std::size_t p = min_pos; p < inv_pool.size(); ++p) {
      if (inv_pool[p].first.degree > remaining) continue;
      chosen.push_back(inv_pool[p]);
      self(self, p, remaining - inv_pool[p].first.degree);
      chosen.pop_back();
    }
  };

  if (!shape.has_epsilon()) {
    rec(rec, 0, shape.degree);
  } else {
    for (int k = 1; k < shape.degree; ++k) {
      auto it = table.find(Shape(InvKind::D, k));
      if (it == table.end())
        throw std::invalid_argument("composed_product_entries: missing dual census");
      for (const auto& dual_part : it->second.entries) {
        if (dual_part.reducible) continue;
        chosen.assign(1, {it->second.shape, dual_part.rep});
        rec(rec, 0, shape.degree - k);
      }
    }
  }
  return out;
}

}  // namespace detail

struct CensusOptions {
  bool randomized = false;
  RandomCensusOptions random;
};

// Complete census of a shape.  Exhaustive mode sweeps every matching; in
// randomized mode the sampler is only responsible for connected classes
// (rare product classes would defeat any saturation window) and the product
// classes are composed exactly from the lower-degree censuses in `table`.
inline Census full_census(const Shape& shape, const std::map<Shape, Census>& table,
                          const CensusOptions& opt, CanonicalizerCache& cache) {
  if (!opt.randomized) return exhaustive_census(shape);

  Census census = random_census(shape, opt.random);
  std::erase_if(census.entries, [](const ClassEntry& e) { return e.reducible; });
  std::vector<ClassEntry> products = detail::composed_product_entries(shape, table, cache);
  census.entries.insert(census.entries.end(), products.begin(), products.end());
  std::sort(census.entries.begin(), census.entries.end(),
            [](const ClassEntry& a, const ClassEntry& b) { return a.rep < b.rep; });
  for (std::size_t i = 1; i < census.entries.size(); ++i)
    if (census.entries[i].rep == census.entries[i - 1].rep)
      throw std::logic_error("full_census: duplicate class representative");
  return census;
}

// Censuses for (I, 1..max_inv_degree) and (D, 1..max_dual_degree), built in
// increasing degree so product composition always has its inputs.  Shapes
// with more than `exhaustive_slot_limit` slots use the randomized sampler.
inline std::map<Shape, Census> census_table(int max_inv_degree, int max_dual_degree,
                                            const RandomCensusOptions& random_opt,
                                            CanonicalizerCache& cache,
                                            int exhaustive_slot_limit = 16) {
  std::map<Shape, Census> table;
  auto build = [&](const Shape& shape) {
    CensusOptions opt;
    opt.randomized = shape.n_slots() > exhaustive_slot_limit;
    opt.random = random_opt;
    table.emplace(shape, full_census(shape, table, opt, cache));
  };
  for (int d = 1; d <= std::max(max_inv_degree, max_dual_degree); ++d) {
    if (d <= max_inv_degree) build(Shape(InvKind::I, d));
    if (d <= max_dual_degree) build(Shape(InvKind::D, d));
  }
  return table;
}

// Splits a configuration along the connected components of its contraction
// graph and canonicalizes each part, so that the value of the whole equals
// sign * product of the part values.
struct SplitResult {
  bool zero = false;
  int sign = 1;
  std::vector<std::pair<Shape, SignedPerm>> parts;  // sorted by (shape, rep images)
};

inline SplitResult split_and_canonicalize(const Shape& shape, const SignedPerm& g,
                                          CanonicalizerCache& cache) {
  detail::Matching m = detail::matching_of_config(shape, g);
  std::vector<int> comp = detail::factor_component_of(shape, m);

  SplitResult result;
  std::vector<int> roots;
  for (int f = 0; f < shape.n_factors(); ++f)
    if (comp[f] == f) roots.push_back(f);

  for (int root : roots) {
    std::array<int, max_points> new_slot{};
    int width = 0;
    bool has_epsilon = false;
    int riemann_factors = 0;
    for (int f = 0; f < shape.n_factors(); ++f) {
      if (comp[f] != root) continue;
      if (shape.factor_is_epsilon(f))
        has_epsilon = true;
      else
        ++riemann_factors;
      int base = 4 * f;
      for (int s = 0; s < 4; ++s) new_slot[base + s] = width++;
    }
    Shape part_shape(has_epsilon ? InvKind::D : InvKind::I, riemann_factors);

    // Collect this component's contractions, then assign its dummies in
    // order of the smaller new slot, keeping each pair's orientation.
    std::vector<std::pair<int, int>> pairs;
    for (int j = 0; j < shape.n_pairs(); ++j) {
      int a = g(2 * j), b = g(2 * j + 1);
      if (comp[shape.factor_of_slot(a)] != root) continue;
      pairs.emplace_back(new_slot[a], new_slot[b]);
    }
    std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
      return std::min(x.first, x.second) < std::min(y.first, y.second);
    });
    std::vector<int> images(part_shape.n_slots());
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      images[2 * j] = pairs[j].first;
      images[2 * j + 1] = pairs[j].second;
    }

    auto rep = cache.get(part_shape).canonicalize(SignedPerm::from_images(images, 1));
    if (!rep.has_value()) {
      result.zero = true;
      return result;
    }
    result.sign *= rep->sign();
    result.parts.emplace_back(
        part_shape, SignedPerm::from_images(
                        std::vector<int>(rep->raw_images(),
                                         rep->raw_images() + part_shape.n_slots()),
                        1));
  }

  result.sign *= g.sign();
  std::sort(result.parts.begin(), result.parts.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  return result;
}

}  // namespace invar
