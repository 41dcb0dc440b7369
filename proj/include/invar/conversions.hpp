#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "tensor_expr.hpp"

namespace invar {

inline constexpr int dimension = 4;

// Eliminates every metric factor that touches a contraction: traces count the
// dimension, contracted slots get the metric's other index.  Metrics with two
// free slots stay.
inline void contract_metric_term(TensorTerm& t) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t fi = 0; fi < t.factors.size() && !changed; ++fi) {
      TensorFactor& f = t.factors[fi];
      if (f.name != "g") continue;
      if (f.indices[0].label == f.indices[1].label) {
        t.coeff *= dimension;
        t.factors.erase(t.factors.begin() + fi);
        changed = true;
        break;
      }
      for (int k = 0; k < 2 && !changed; ++k) {
        const std::string& label = f.indices[k].label;
        Index other = f.indices[1 - k];
        for (std::size_t fj = 0; fj < t.factors.size() && !changed; ++fj) {
          if (fj == fi) continue;
          for (Index& idx : t.factors[fj].indices) {
            if (idx.label != label) continue;
            idx = other;
            t.factors.erase(t.factors.begin() + fi);
            changed = true;
            break;
          }
        }
      }
    }
  }
}

inline TensorExpr contract_metric(TensorExpr e) {
  for (auto& t : e.terms) contract_metric_term(t);
  return e;
}

// The metric and the Ricci tensor are symmetric, so their slot order is a
// rendering artifact; fixing it lets syntactically equal terms cancel.
inline void sort_symmetric_slots(TensorTerm& t) {
  for (auto& f : t.factors)
    if ((f.name == "g" || f.name == "R") && f.rank() == 2 && f.indices[1] < f.indices[0])
      std::swap(f.indices[0], f.indices[1]);
}

inline TensorExpr tidy(TensorExpr e) {
  for (auto& t : e.terms) {
    contract_metric_term(t);
    sort_symmetric_slots(t);
  }
  normalize_terms(e);
  return e;
}

// Ricci tensor and scalar as traces of the full curvature tensor.
inline TensorExpr ricci_to_riemann(TensorExpr e) {
  for (auto& t : e.terms) {
    for (auto& f : t.factors) {
      if (f.name != "R" || f.rank() == 4) continue;
      std::set<std::string> used = all_labels(t);
      int counter = 0;
      if (f.rank() == 2) {
        std::string c = fresh_label(used, counter);
        f.indices = {upper(c), f.indices[0], lower(c), f.indices[1]};
      } else {
        std::string c = fresh_label(used, counter);
        used.insert(c);
        std::string a = fresh_label(used, counter);
        f.indices = {upper(c), upper(a), lower(c), lower(a)};
      }
    }
  }
  return e;
}

// Rewrites traces inside a single curvature factor back to Ricci form:
// contractions across the two antisymmetric pairs give (sign, Ricci), inside
// one pair they vanish.  Applied repeatedly a fully traced factor collapses
// to the curvature scalar.
inline TensorExpr riemann_to_ricci(TensorExpr e) {
  for (auto& t : e.terms) {
    bool changed = true;
    while (changed && t.coeff != 0) {
      changed = false;
      for (auto& f : t.factors) {
        if (f.name != "R") continue;
        if (f.rank() == 4) {
          int p = -1, q = -1;
          for (int i = 0; i < 4 && p < 0; ++i)
            for (int j = i + 1; j < 4 && p < 0; ++j)
              if (f.indices[i].label == f.indices[j].label) {
                p = i;
                q = j;
              }
          if (p < 0) continue;
          if ((p == 0 && q == 1) || (p == 2 && q == 3)) {
            t.coeff = 0;
          } else {
            if (!((p == 0 && q == 2) || (p == 1 && q == 3))) t.coeff = -t.coeff;
            std::vector<Index> rest;
            for (int i = 0; i < 4; ++i)
              if (i != p && i != q) rest.push_back(f.indices[i]);
            f.indices = rest;
          }
          changed = true;
          break;
        }
        if (f.rank() == 2 && f.indices[0].label == f.indices[1].label) {
          f.indices.clear();
          changed = true;
          break;
        }
      }
    }
  }
  normalize_terms(e);
  return e;
}

namespace detail {

// Traceless part correction: the four metric*Ricci terms and the two
// metric*metric*scalar terms of the four-dimensional decomposition, with an
// overall sign choice for each direction of the rewrite.
inline TensorExpr curvature_decomposition_tail(const std::vector<Index>& idx, int direction) {
  const Index &a = idx[0], &b = idx[1], &c = idx[2], &d = idx[3];
  auto metric = [](const Index& x, const Index& y) { return TensorFactor{"g", {x, y}}; };
  auto ricci = [](const Index& x, const Index& y) { return TensorFactor{"R", {x, y}}; };
  TensorFactor scalar{"R", {}};
  TensorExpr out;
  Rational half(1, 2), sixth(1, 6);
  out.terms.push_back({-direction * half, 0, {metric(a, c), ricci(d, b)}});
  out.terms.push_back({direction * half, 0, {metric(a, d), ricci(c, b)}});
  out.terms.push_back({direction * half, 0, {metric(b, c), ricci(d, a)}});
  out.terms.push_back({-direction * half, 0, {metric(b, d), ricci(c, a)}});
  out.terms.push_back({direction * sixth, 0, {metric(a, c), metric(d, b), scalar}});
  out.terms.push_back({-direction * sixth, 0, {metric(a, d), metric(c, b), scalar}});
  return out;
}

inline TensorExpr replace_factor(const TensorTerm& t, std::size_t fi, const TensorExpr& by) {
  TensorTerm rest = t;
  rest.factors.erase(rest.factors.begin() + fi);
  TensorExpr out;
  for (const auto& rt : by.terms) {
    TensorTerm nt = rest;
    nt.coeff *= rt.coeff;
    nt.sigma_pow = (nt.sigma_pow + rt.sigma_pow) & 1;
    nt.factors.insert(nt.factors.end(), rt.factors.begin(), rt.factors.end());
    out.terms.push_back(std::move(nt));
  }
  return out;
}

template <typename Pred, typename Rewrite>
TensorExpr rewrite_factors(TensorExpr e, Pred&& match, Rewrite&& rewrite) {
  TensorExpr out;
  std::vector<TensorTerm> work(e.terms.rbegin(), e.terms.rend());
  while (!work.empty()) {
    TensorTerm t = std::move(work.back());
    work.pop_back();
    bool hit = false;
    for (std::size_t fi = 0; fi < t.factors.size(); ++fi) {
      if (!match(t, fi)) continue;
      TensorExpr replaced = rewrite(t, fi);
      work.insert(work.end(), replaced.terms.rbegin(), replaced.terms.rend());
      hit = true;
      break;
    }
    if (!hit) out.terms.push_back(std::move(t));
  }
  return out;
}

}  // namespace detail

inline TensorExpr weyl_to_riemann(TensorExpr e) {
  return detail::rewrite_factors(
      std::move(e), [](const TensorTerm& t, std::size_t fi) { return t.factors[fi].name == "C"; },
      [](const TensorTerm& t, std::size_t fi) {
        const auto& idx = t.factors[fi].indices;
        TensorExpr by = detail::curvature_decomposition_tail(idx, +1);
        by.terms.push_back({1, 0, {TensorFactor{"R", idx}}});
        return detail::replace_factor(t, fi, by);
      });
}

inline TensorExpr riemann_to_weyl(TensorExpr e) {
  return detail::rewrite_factors(
      std::move(e),
      [](const TensorTerm& t, std::size_t fi) {
        return t.factors[fi].name == "R" && t.factors[fi].rank() == 4;
      },
      [](const TensorTerm& t, std::size_t fi) {
        const auto& idx = t.factors[fi].indices;
        TensorExpr by = detail::curvature_decomposition_tail(idx, -1);
        by.terms.push_back({1, 0, {TensorFactor{"C", idx}}});
        return detail::replace_factor(t, fi, by);
      });
}

// Connected components of a term's contraction structure: factors are
// adjacent when they share an index label.  Returns one component id per
// factor, numbered by first appearance.
inline std::vector<int> factor_components(const TensorTerm& t) {
  std::size_t n = t.factors.size();
  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      bool linked = false;
      for (const auto& a : t.factors[i].indices) {
        for (const auto& b : t.factors[j].indices)
          if (a.label == b.label) {
            linked = true;
            break;
          }
        if (linked) break;
      }
      if (linked) root[find(static_cast<int>(j))] = find(static_cast<int>(i));
    }
  std::vector<int> out(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int r = find(static_cast<int>(i));
    if (out[r] < 0) out[r] = next++;
    out[i] = out[r];
  }
  return out;
}

// Replaces the two given epsilon factors by the signed sum over slot
// pairings: both are first brought to pure variance with emitted metrics,
// then each of the 24 pairings contributes a product of mixed deltas.  Picks
// up one power of the signature sign.
inline TensorExpr expand_epsilon_pair(const TensorTerm& t, std::size_t f1, std::size_t f2) {
  std::set<std::string> used = all_labels(t);
  int counter = 0;
  std::vector<TensorFactor> emitted;
  std::vector<Index> up_side, down_side;
  for (int k = 0; k < 4; ++k) {
    Index i1 = t.factors[f1].indices[k];
    if (i1.up) {
      up_side.push_back(i1);
    } else {
      std::string m = fresh_label(used, counter);
      used.insert(m);
      emitted.push_back(TensorFactor{"g", {i1, lower(m)}});
      up_side.push_back(upper(m));
    }
    Index i2 = t.factors[f2].indices[k];
    if (!i2.up) {
      down_side.push_back(i2);
    } else {
      std::string m = fresh_label(used, counter);
      used.insert(m);
      emitted.push_back(TensorFactor{"g", {i2, upper(m)}});
      down_side.push_back(lower(m));
    }
  }
  TensorTerm rest = t;
  rest.factors.erase(rest.factors.begin() + std::max(f1, f2));
  rest.factors.erase(rest.factors.begin() + std::min(f1, f2));
  rest.factors.insert(rest.factors.end(), emitted.begin(), emitted.end());
  rest.sigma_pow ^= 1;

  TensorExpr out;
  std::array<int, 4> pi = {0, 1, 2, 3};
  do {
    int sign = 1;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (pi[i] > pi[j]) sign = -sign;
    TensorTerm nt = rest;
    nt.coeff *= sign;
    for (int k = 0; k < 4; ++k)
      nt.factors.push_back(TensorFactor{"g", {up_side[k], down_side[pi[k]]}});
    out.terms.push_back(std::move(nt));
  } while (std::next_permutation(pi.begin(), pi.end()));
  return out;
}

// Expands epsilon pairs living in one connected component until none remain.
// A product of components carrying one epsilon each is left as such.
inline TensorExpr expand_connected_epsilon_pairs(TensorExpr e) {
  TensorExpr out;
  std::vector<TensorTerm> work(e.terms.rbegin(), e.terms.rend());
  while (!work.empty()) {
    TensorTerm t = std::move(work.back());
    work.pop_back();
    contract_metric_term(t);
    std::vector<int> comp = factor_components(t);
    int pair_f1 = -1, pair_f2 = -1;
    for (std::size_t i = 0; i < t.factors.size() && pair_f1 < 0; ++i) {
      if (t.factors[i].name != "epsilon") continue;
      for (std::size_t j = i + 1; j < t.factors.size(); ++j)
        if (t.factors[j].name == "epsilon" && comp[i] == comp[j]) {
          pair_f1 = static_cast<int>(i);
          pair_f2 = static_cast<int>(j);
          break;
        }
    }
    if (pair_f1 < 0) {
      out.terms.push_back(std::move(t));
      continue;
    }
    TensorExpr replaced = expand_epsilon_pair(t, pair_f1, pair_f2);
    work.insert(work.end(), replaced.terms.rbegin(), replaced.terms.rend());
  }
  return out;
}

}  // namespace invar
