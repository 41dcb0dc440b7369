#pragma once

#include <stdexcept>
#include <vector>

#include "permutation.hpp"

namespace invar {

enum class InvKind : std::uint8_t { I, D };

inline char kind_letter(InvKind k) { return k == InvKind::I ? 'I' : 'D'; }

// Slot layout of a fully contracted monomial: `degree` Riemann factors, plus
// one leading epsilon block for duals.  Every factor has rank 4, so factor
// boundaries are multiples of 4.  Slot indices are 0-based; names (contraction
// positions) pair up as (0,1), (2,3), ... with the even name contravariant.
struct Shape {
  InvKind kind = InvKind::I;
  int degree = 0;

  Shape() = default;
  Shape(InvKind k, int n) : kind(k), degree(n) {
    if (n < 0 || n_slots() > max_points)
      throw std::invalid_argument("shape out of supported range");
  }

  bool has_epsilon() const { return kind == InvKind::D; }
  int n_slots() const { return 4 * degree + (has_epsilon() ? 4 : 0); }
  int n_pairs() const { return n_slots() / 2; }
  int n_factors() const { return degree + (has_epsilon() ? 1 : 0); }
  int factor_of_slot(int s) const { return s / 4; }
  bool factor_is_epsilon(int f) const { return has_epsilon() && f == 0; }

  // Slot symmetries: per-factor permutation symmetries plus exchanges of
  // identical factors.
  std::vector<SignedPerm> slot_generators() const {
    int n = n_slots();
    std::vector<SignedPerm> gens;
    auto transposition = [&](int a, int b, int sign) {
      std::vector<int> img(n);
      for (int i = 0; i < n; ++i) img[i] = i;
      std::swap(img[a], img[b]);
      return SignedPerm::from_images(img, sign);
    };
    int base = 0;
    if (has_epsilon()) {
      for (int i = 0; i < 3; ++i) gens.push_back(transposition(i, i + 1, -1));
      base = 4;
    }
    for (int f = 0; f < degree; ++f) {
      int b = base + 4 * f;
      gens.push_back(transposition(b, b + 1, -1));
      gens.push_back(transposition(b + 2, b + 3, -1));
      std::vector<int> img(n);
      for (int i = 0; i < n; ++i) img[i] = i;
      std::swap(img[b], img[b + 2]);
      std::swap(img[b + 1], img[b + 3]);
      gens.push_back(SignedPerm::from_images(img, +1));
    }
    for (int f = 0; f + 1 < degree; ++f) {
      int b = base + 4 * f;
      std::vector<int> img(n);
      for (int i = 0; i < n; ++i) img[i] = i;
      for (int i = 0; i < 4; ++i) std::swap(img[b + i], img[b + 4 + i]);
      gens.push_back(SignedPerm::from_images(img, +1));
    }
    return gens;
  }

  // Dummy relabelling: swapping the two occurrences of a contraction (sign +1
  // through the symmetric metric) and exchanging whole pairs (sign +1).
  std::vector<SignedPerm> dummy_generators() const {
    int n = n_slots();
    std::vector<SignedPerm> gens;
    for (int j = 0; j < n_pairs(); ++j) {
      std::vector<int> img(n);
      for (int i = 0; i < n; ++i) img[i] = i;
      std::swap(img[2 * j], img[2 * j + 1]);
      gens.push_back(SignedPerm::from_images(img, +1));
    }
    for (int j = 0; j + 1 < n_pairs(); ++j) {
      std::vector<int> img(n);
      for (int i = 0; i < n; ++i) img[i] = i;
      std::swap(img[2 * j], img[2 * j + 2]);
      std::swap(img[2 * j + 1], img[2 * j + 3]);
      gens.push_back(SignedPerm::from_images(img, +1));
    }
    return gens;
  }

  friend bool operator==(const Shape& a, const Shape& b) {
    return a.kind == b.kind && a.degree == b.degree;
  }
  friend bool operator<(const Shape& a, const Shape& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.degree < b.degree;
  }
};

}  // namespace invar
