#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "permutation.hpp"
#include "random.hpp"
#include "rational.hpp"
#include "shape.hpp"
#include "tensor_expr.hpp"

namespace invar {

inline int levi_civita(int a, int b, int c, int d) {
  int v[4] = {a, b, c, d};
  int sign = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      if (v[i] == v[j]) return 0;
      if (v[i] > v[j]) sign = -sign;
    }
  return sign;
}

// A random tensor with exactly the algebraic symmetries of a curvature
// tensor, in an orthonormal diagonal frame.  Components are exact rationals,
// so identities certified against it hold as polynomial statements, not up to
// rounding.
struct CurvatureSample {
  std::array<int, 4> frame{};  // diagonal covariant metric entries, each +-1
  int sigma = 1;               // product of the frame entries
  std::vector<Rational> riemann;  // 256 covariant components
  std::vector<Rational> ricci;    // 16
  std::vector<Rational> weyl;     // 256
  Rational scalar;

  static int idx4(int a, int b, int c, int d) { return ((a * 4 + b) * 4 + c) * 4 + d; }

  const Rational& rie(int a, int b, int c, int d) const { return riemann[idx4(a, b, c, d)]; }

  // The bivector construction: a symmetric 6x6 array over the antisymmetric
  // index pairs has all the pair symmetries, and removing the totally
  // antisymmetric part (one third of the cyclic sum) enforces the first
  // Bianchi identity.
  static CurvatureSample random(std::mt19937_64& rng, int sigma) {
    CurvatureSample s;
    if (sigma != 1 && sigma != -1) throw std::invalid_argument("sigma must be +-1");
    s.sigma = sigma;
    s.frame = sigma == 1 ? std::array<int, 4>{1, 1, 1, 1} : std::array<int, 4>{-1, 1, 1, 1};

    static constexpr int pair_of[4][4] = {
        {-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    long m[6][6];
    for (int p = 0; p < 6; ++p)
      for (int q = p; q < 6; ++q)
        m[p][q] = m[q][p] = static_cast<long>(random_below(rng, 19)) - 9;

    std::vector<Rational> r0(256);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) {
            if (a == b || c == d) continue;
            int sign = (a < b ? 1 : -1) * (c < d ? 1 : -1);
            r0[idx4(a, b, c, d)] = sign * m[pair_of[a][b]][pair_of[c][d]];
          }
    s.riemann.resize(256);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) {
            Rational cyc = r0[idx4(a, b, c, d)] + r0[idx4(a, c, d, b)] + r0[idx4(a, d, b, c)];
            s.riemann[idx4(a, b, c, d)] = r0[idx4(a, b, c, d)] - cyc / 3;
          }

    s.ricci.assign(16, 0);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) s.ricci[a * 4 + b] += s.frame[c] * s.rie(c, a, c, b);
    s.scalar = 0;
    for (int a = 0; a < 4; ++a) s.scalar += s.frame[a] * s.ricci[a * 4 + a];

    s.weyl.resize(256);
    auto g = [&](int x, int y) { return x == y ? Rational(s.frame[x]) : Rational(0); };
    auto ric = [&](int x, int y) { return s.ricci[x * 4 + y]; };
    Rational half(1, 2), sixth(1, 6);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d)
            s.weyl[idx4(a, b, c, d)] =
                s.rie(a, b, c, d) -
                half * (g(a, c) * ric(d, b) - g(a, d) * ric(c, b) - g(b, c) * ric(d, a) +
                        g(b, d) * ric(c, a)) +
                sixth * s.scalar * (g(a, c) * g(d, b) - g(a, d) * g(c, b));
    return s;
  }

  // Covariant component array for a named factor.
  std::vector<Rational> components(const std::string& name, int rank) const {
    if (name == "R" && rank == 4) return riemann;
    if (name == "R" && rank == 2) return ricci;
    if (name == "R" && rank == 0) return {scalar};
    if (name == "C" && rank == 4) return weyl;
    if (name == "g" && rank == 2) {
      std::vector<Rational> out(16, 0);
      for (int a = 0; a < 4; ++a) out[a * 4 + a] = frame[a];
      return out;
    }
    if (name == "epsilon" && rank == 4) {
      std::vector<Rational> out(256, 0);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int c = 0; c < 4; ++c)
            for (int d = 0; d < 4; ++d) out[idx4(a, b, c, d)] = levi_civita(a, b, c, d);
      return out;
    }
    throw std::invalid_argument("no components for " + name + " of rank " + std::to_string(rank));
  }
};

namespace detail {

struct WorkTensor {
  std::vector<Index> slots;
  std::vector<Rational> data;  // covariant, first slot has the largest stride
};

// Contracts every label appearing twice within the tensor.  One slot of each
// pair is contravariant, which contributes the frame sign of the summed
// value.
inline void trace_internal(WorkTensor& w, const CurvatureSample& s) {
  for (;;) {
    int p = -1, q = -1;
    for (std::size_t i = 0; i < w.slots.size() && p < 0; ++i)
      for (std::size_t j = i + 1; j < w.slots.size(); ++j)
        if (w.slots[i].label == w.slots[j].label) {
          p = static_cast<int>(i);
          q = static_cast<int>(j);
          break;
        }
    if (p < 0) return;
    int rank = static_cast<int>(w.slots.size());
    int out_rank = rank - 2;
    std::vector<Index> out_slots;
    for (int i = 0; i < rank; ++i)
      if (i != p && i != q) out_slots.push_back(w.slots[i]);
    std::vector<Rational> out(std::size_t(1) << (2 * out_rank), 0);
    std::vector<int> vals(rank, 0);
    for (std::size_t oi = 0; oi < out.size(); ++oi) {
      std::size_t rest = oi;
      for (int i = out_rank - 1; i >= 0; --i) {
        vals[i] = static_cast<int>(rest & 3);
        rest >>= 2;
      }
      Rational acc = 0;
      for (int v = 0; v < 4; ++v) {
        std::size_t full = 0;
        int k = 0;
        for (int i = 0; i < rank; ++i) {
          int value = (i == p || i == q) ? v : vals[k++];
          full = full * 4 + static_cast<std::size_t>(value);
        }
        acc += s.frame[v] * w.data[full];
      }
      out[oi] = acc;
    }
    w.slots = std::move(out_slots);
    w.data = std::move(out);
  }
}

// Contracts all labels shared between a and b; each contributes one frame
// sign.  Slots of the result: the remaining slots of a, then of b.
inline WorkTensor contract_pair(const WorkTensor& a, const WorkTensor& b,
                                const CurvatureSample& s) {
  std::vector<int> a_shared, b_shared;  // positions of shared labels
  std::vector<int> a_keep, b_keep;
  for (std::size_t i = 0; i < a.slots.size(); ++i) {
    bool shared = false;
    for (std::size_t j = 0; j < b.slots.size(); ++j)
      if (a.slots[i].label == b.slots[j].label) {
        a_shared.push_back(static_cast<int>(i));
        b_shared.push_back(static_cast<int>(j));
        shared = true;
        break;
      }
    if (!shared) a_keep.push_back(static_cast<int>(i));
  }
  {
    std::set<int> bs(b_shared.begin(), b_shared.end());
    for (std::size_t j = 0; j < b.slots.size(); ++j)
      if (!bs.count(static_cast<int>(j))) b_keep.push_back(static_cast<int>(j));
  }
  WorkTensor out;
  for (int i : a_keep) out.slots.push_back(a.slots[i]);
  for (int j : b_keep) out.slots.push_back(b.slots[j]);
  int out_rank = static_cast<int>(out.slots.size());
  int n_shared = static_cast<int>(a_shared.size());
  out.data.assign(std::size_t(1) << (2 * out_rank), 0);

  std::vector<int> a_vals(a.slots.size()), b_vals(b.slots.size());
  std::vector<int> out_vals(out_rank, 0), sh_vals(n_shared, 0);
  for (std::size_t oi = 0; oi < out.data.size(); ++oi) {
    std::size_t rest = oi;
    for (int i = out_rank - 1; i >= 0; --i) {
      out_vals[i] = static_cast<int>(rest & 3);
      rest >>= 2;
    }
    Rational acc = 0;
    std::size_t n_sh_comb = std::size_t(1) << (2 * n_shared);
    for (std::size_t si = 0; si < n_sh_comb; ++si) {
      std::size_t r2 = si;
      int weight = 1;
      for (int i = n_shared - 1; i >= 0; --i) {
        sh_vals[i] = static_cast<int>(r2 & 3);
        r2 >>= 2;
      }
      for (int i = 0; i < n_shared; ++i) weight *= s.frame[sh_vals[i]];
      for (std::size_t i = 0; i < a_keep.size(); ++i) a_vals[a_keep[i]] = out_vals[i];
      for (int i = 0; i < n_shared; ++i) a_vals[a_shared[i]] = sh_vals[i];
      for (std::size_t j = 0; j < b_keep.size(); ++j)
        b_vals[b_keep[j]] = out_vals[a_keep.size() + j];
      for (int i = 0; i < n_shared; ++i) b_vals[b_shared[i]] = sh_vals[i];
      std::size_t ai = 0, bi = 0;
      for (std::size_t i = 0; i < a_vals.size(); ++i) ai = ai * 4 + a_vals[i];
      for (std::size_t j = 0; j < b_vals.size(); ++j) bi = bi * 4 + b_vals[j];
      if (weight == 1)
        acc += a.data[ai] * b.data[bi];
      else
        acc -= a.data[ai] * b.data[bi];
    }
    out.data[oi] = acc;
  }
  return out;
}

}  // namespace detail

// Exact value of a fully contracted term: factors are traced internally,
// then merged pairwise along shared contractions, always choosing the merge
// with the smallest intermediate.
inline Rational evaluate_term(const TensorTerm& t, const CurvatureSample& s) {
  Rational acc = t.coeff;
  if (t.sigma_pow & 1) acc *= s.sigma;
  if (acc == 0) return acc;
  std::vector<detail::WorkTensor> work;
  for (const auto& f : t.factors) {
    detail::WorkTensor w{f.indices, s.components(f.name, f.rank())};
    detail::trace_internal(w, s);
    if (w.slots.empty())
      acc *= w.data[0];
    else
      work.push_back(std::move(w));
  }
  while (!work.empty()) {
    int bi = -1, bj = -1, best_rank = 1 << 30;
    for (std::size_t i = 0; i < work.size(); ++i)
      for (std::size_t j = i + 1; j < work.size(); ++j) {
        int shared = 0;
        for (const auto& si : work[i].slots)
          for (const auto& sj : work[j].slots)
            if (si.label == sj.label) ++shared;
        if (shared == 0) continue;
        int rank = static_cast<int>(work[i].slots.size() + work[j].slots.size()) - 2 * shared;
        if (rank < best_rank) {
          best_rank = rank;
          bi = static_cast<int>(i);
          bj = static_cast<int>(j);
        }
      }
    if (bi < 0) throw std::invalid_argument("term is not a scalar: " + to_string(TensorExpr{{t}}));
    detail::WorkTensor merged = detail::contract_pair(work[bi], work[bj], s);
    work.erase(work.begin() + bj);
    work.erase(work.begin() + bi);
    if (merged.slots.empty())
      acc *= merged.data[0];
    else
      work.push_back(std::move(merged));
  }
  return acc;
}

inline Rational evaluate(const TensorExpr& e, const CurvatureSample& s) {
  Rational acc = 0;
  for (const auto& t : e.terms) acc += evaluate_term(t, s);
  return acc;
}

// Reference evaluator: sums over all assignments of the contracted labels.
// Free labels take their value from the given map, and contribute their frame
// sign when contravariant, so this also yields single components of tensor
// (non-scalar) expressions.
inline Rational evaluate_term_naive(const TensorTerm& t, const CurvatureSample& s,
                                    const std::map<std::string, int>& free_values = {}) {
  std::map<std::string, int> occurrences;
  for (const auto& f : t.factors)
    for (const auto& i : f.indices) ++occurrences[i.label];
  std::vector<std::string> dummies;
  for (const auto& [label, n] : occurrences) {
    if (n == 1 && !free_values.count(label))
      throw std::invalid_argument("no value given for free index " + label);
    if (n == 2) dummies.push_back(label);
  }
  std::vector<std::vector<Rational>> comps;
  for (const auto& f : t.factors) comps.push_back(s.components(f.name, f.rank()));

  Rational total = 0;
  std::vector<int> assign(dummies.size(), 0);
  for (;;) {
    std::map<std::string, int> value = free_values;
    for (std::size_t i = 0; i < dummies.size(); ++i) value[dummies[i]] = assign[i];
    Rational prod = 1;
    for (std::size_t fi = 0; fi < t.factors.size() && prod != 0; ++fi) {
      std::size_t idx = 0;
      for (const auto& i : t.factors[fi].indices) {
        int v = value.at(i.label);
        if (i.up) prod *= s.frame[v];
        idx = idx * 4 + static_cast<std::size_t>(v);
      }
      prod *= comps[fi][idx];
    }
    total += prod;
    std::size_t k = 0;
    while (k < assign.size() && ++assign[k] == 4) assign[k++] = 0;
    if (k == assign.size()) break;
  }
  if (t.sigma_pow & 1) total *= s.sigma;
  return total * t.coeff;
}

inline Rational evaluate_component(const TensorExpr& e, const CurvatureSample& s,
                                   const std::map<std::string, int>& free_values) {
  Rational acc = 0;
  for (const auto& t : e.terms) acc += evaluate_term_naive(t, s, free_values);
  return acc;
}

// The contraction monomial described by a configuration: contraction j joins
// the slots g(2j) (contravariant side) and g(2j+1) (covariant side); the
// configuration's sign multiplies the coefficient.
inline TensorTerm config_term(const Shape& shape, const SignedPerm& g) {
  if (g.degree() != shape.n_slots()) throw std::invalid_argument("config degree mismatch");
  std::vector<Index> slot_index(shape.n_slots());
  for (int j = 0; j < shape.n_pairs(); ++j) {
    std::string label = "d" + std::to_string(j);
    slot_index[g(2 * j)] = upper(label);
    slot_index[g(2 * j + 1)] = lower(label);
  }
  TensorTerm t;
  t.coeff = g.sign();
  for (int f = 0; f < shape.n_factors(); ++f) {
    TensorFactor fac;
    fac.name = shape.factor_is_epsilon(f) ? "epsilon" : "R";
    for (int k = 0; k < 4; ++k) fac.indices.push_back(slot_index[4 * f + k]);
    t.factors.push_back(std::move(fac));
  }
  return t;
}

struct TermConfig {
  Shape shape;
  SignedPerm config;  // sign +1; the numeric prefactor lives in coeff
  Rational coeff;
  int sigma_pow = 0;
};

// Inverse of config_term for fully contracted monomials in R and at most one
// epsilon.  Factors are reordered epsilon-first to match the shape layout;
// contractions are numbered by the first slot where each dummy appears.
inline TermConfig term_to_config(const TensorTerm& t) {
  int eps = -1;
  std::vector<int> rs;
  for (int f = 0; f < static_cast<int>(t.factors.size()); ++f) {
    const TensorFactor& fac = t.factors[f];
    if (fac.rank() != 4) throw std::invalid_argument("term_to_config: factor of rank != 4");
    if (fac.name == "epsilon") {
      if (eps >= 0) throw std::invalid_argument("term_to_config: more than one epsilon");
      eps = f;
    } else if (fac.name == "R") {
      rs.push_back(f);
    } else {
      throw std::invalid_argument("term_to_config: unsupported factor " + fac.name);
    }
  }
  if (rs.empty()) throw std::invalid_argument("term_to_config: no Riemann factors");
  if (!free_indices(t).empty()) throw std::invalid_argument("term_to_config: free indices");

  Shape shape(eps >= 0 ? InvKind::D : InvKind::I, static_cast<int>(rs.size()));
  std::vector<int> order;
  if (eps >= 0) order.push_back(eps);
  order.insert(order.end(), rs.begin(), rs.end());

  // slot_of[label][up?1:0] after mapping factors onto shape slots.
  std::map<std::string, std::array<int, 2>> occ;
  for (int f = 0; f < shape.n_factors(); ++f) {
    const TensorFactor& fac = t.factors[order[f]];
    for (int k = 0; k < 4; ++k) {
      const Index& ix = fac.indices[k];
      auto [it, fresh] = occ.emplace(ix.label, std::array<int, 2>{-1, -1});
      int& cell = it->second[ix.up ? 1 : 0];
      if (cell >= 0) throw std::invalid_argument("term_to_config: repeated index occurrence");
      (void)fresh;
      cell = 4 * f + k;
    }
  }

  std::vector<std::pair<int, std::string>> pairs;  // (first slot, label)
  for (const auto& [label, slots] : occ) pairs.emplace_back(std::min(slots[0], slots[1]), label);
  std::sort(pairs.begin(), pairs.end());

  std::vector<int> img(shape.n_slots());
  int j = 0;
  for (const auto& [first, label] : pairs) {
    (void)first;
    const auto& slots = occ.at(label);
    img[2 * j] = slots[1];      // contravariant occurrence
    img[2 * j + 1] = slots[0];  // covariant occurrence
    ++j;
  }
  return {shape, SignedPerm::from_images(img, +1), t.coeff, t.sigma_pow & 1};
}

struct CertifyResult {
  bool ok = true;
  int sigma = 0;            // witness frame on failure
  std::uint64_t trial = 0;  // witness trial on failure
  Rational value;
};

// Checks that a scalar expression vanishes identically by evaluating it on
// random curvature tensors in both signatures.  A nonzero value disproves the
// identity; repeated zeros of a nonzero polynomial have vanishing probability.
inline CertifyResult certify_zero(const TensorExpr& e, int trials = 3,
                                  std::uint64_t seed = 0x1e55) {
  for (int sigma : {1, -1})
    for (int k = 0; k < trials; ++k) {
      std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(k * 2 + (sigma < 0))));
      CurvatureSample sample = CurvatureSample::random(rng, sigma);
      Rational v = evaluate(e, sample);
      if (v != 0) return {false, sigma, static_cast<std::uint64_t>(k), v};
    }
  return {};
}

}  // namespace invar
