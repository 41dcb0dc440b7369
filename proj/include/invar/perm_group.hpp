#pragma once

#include <array>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "permutation.hpp"
#include "rational.hpp"

namespace invar {

// Orbit of one point under a generator set, with a transversal:
// u[k] maps root to orbit[k].  BFS order is deterministic (queue order,
// generators applied in list order), which keeps everything reproducible.
struct OrbitTransversal {
  int root = 0;
  std::vector<int> orbit;
  std::array<int, max_points> where{};  // index into orbit, or -1
  std::vector<SignedPerm> u;

  void compute(int r, const std::vector<SignedPerm>& gens, int n) {
    root = r;
    orbit.clear();
    u.clear();
    where.fill(-1);
    orbit.push_back(r);
    u.push_back(SignedPerm::identity(n));
    where[r] = 0;
    for (std::size_t k = 0; k < orbit.size(); ++k) {
      for (const SignedPerm& g : gens) {
        int y = g(orbit[k]);
        if (where[y] < 0) {
          where[y] = static_cast<int>(orbit.size());
          orbit.push_back(y);
          u.push_back(compose(g, u[k]));
        }
      }
    }
  }

  bool contains(int x) const { return where[x] >= 0; }
  const SignedPerm& to(int x) const { return u[where[x]]; }
};

// Permutation group with a base/strong-generating-set chain along the
// natural base (0, 1, ..., n-1).  Level k holds the generators that fix
// 0..k-1 pointwise and the orbit of k under them, so the chain doubles as
// the stabilizer tower used by double-coset canonicalization.
//
// Signs: elements are signed permutations.  If some generator word gives
// identity images with sign -1 the group is flagged sign-degenerate (a
// tensor with such a symmetry group vanishes identically); order() counts
// unsigned elements (product of fundamental orbit lengths) either way.
class PermGroup {
 public:
  struct Level {
    int point = 0;
    std::vector<SignedPerm> gens;
    OrbitTransversal tr;
  };

  explicit PermGroup(int degree) : degree_(degree), sign_degenerate_(false) {
    if (degree < 0 || degree > max_points) throw std::invalid_argument("degree out of range");
    levels_.resize(degree);
    for (int k = 0; k < degree; ++k) {
      levels_[k].point = k;
      levels_[k].tr.compute(k, {}, degree);
    }
  }

  static PermGroup from_generators(const std::vector<SignedPerm>& gens, int degree) {
    PermGroup g(degree);
    for (const SignedPerm& p : gens) g.add_generator(p);
    return g;
  }

  void add_generator(const SignedPerm& p) {
    if (p.degree() != degree_) throw std::invalid_argument("degree mismatch in add_generator");
    if (contains(p)) return;
    insert(p);
  }

  int degree() const { return degree_; }
  bool sign_degenerate() const { return sign_degenerate_; }
  std::size_t num_levels() const { return levels_.size(); }
  const Level& level(std::size_t k) const { return levels_[k]; }

  std::vector<int> base() const {
    std::vector<int> b;
    for (const Level& l : levels_)
      if (l.tr.orbit.size() > 1) b.push_back(l.point);
    return b;
  }

  std::vector<SignedPerm> strong_generators() const {
    std::vector<SignedPerm> out;
    for (const Level& l : levels_) out.insert(out.end(), l.gens.begin(), l.gens.end());
    return out;
  }

  Integer order() const {
    Integer o = 1;
    for (const Level& l : levels_) o *= static_cast<unsigned long>(l.tr.orbit.size());
    return o;
  }

  // Strips p through the chain; the residue has identity images iff p's
  // images are generated.  The sign of the residue distinguishes p from -p.
  SignedPerm sift(const SignedPerm& p) const {
    if (p.degree() != degree_) throw std::invalid_argument("degree mismatch in sift");
    SignedPerm r = p;
    for (const Level& l : levels_) {
      int x = r(l.point);
      if (x == l.point) continue;
      if (!l.tr.contains(x)) return r;
      r = compose(l.tr.to(x).inverse(), r);
    }
    return r;
  }

  bool contains(const SignedPerm& p) const {
    SignedPerm r = sift(p);
    if (!r.images_are_identity()) return false;
    return r.sign() == +1 || sign_degenerate_;
  }

 private:
  // A generator is stored at the level of its first moved point, so the
  // generating set of the k-th stabilizer (elements fixing 0..k-1) is the
  // union of the lists at levels >= k.
  std::vector<SignedPerm> stabilizer_gens(int k) const {
    std::vector<SignedPerm> out;
    for (std::size_t j = k; j < levels_.size(); ++j)
      out.insert(out.end(), levels_[j].gens.begin(), levels_[j].gens.end());
    return out;
  }

  void insert(const SignedPerm& p) {
    int j = first_moved(p);
    if (j < 0) {
      if (p.sign() < 0) sign_degenerate_ = true;
      return;
    }
    levels_[j].gens.push_back(p);
    verify_from(j);
  }

  // Bottom-up Schreier-Sims verification: at level k all deeper levels are
  // already verified, so sifting Schreier generators through them is valid.
  // A non-trivial residue is stored at its first-moved level m > k and
  // verification restarts there.
  void verify_from(int start) {
    int k = start;
    while (k >= 0) {
      Level& l = levels_[k];
      std::vector<SignedPerm> gens = stabilizer_gens(k);
      l.tr.compute(l.point, gens, degree_);
      bool restarted = false;
      for (std::size_t i = 0; i < l.tr.orbit.size() && !restarted; ++i) {
        for (const SignedPerm& g : gens) {
          int y = g(l.tr.orbit[i]);
          SignedPerm s = compose(l.tr.to(y).inverse(), compose(g, l.tr.u[i]));
          SignedPerm r = sift_from(s, k + 1);
          if (r.images_are_identity()) {
            if (r.sign() < 0) sign_degenerate_ = true;
            continue;
          }
          int m = first_moved(r);  // > k: Schreier residues fix 0..k
          levels_[m].gens.push_back(r);
          k = m;
          restarted = true;
          break;
        }
      }
      if (!restarted) --k;
    }
  }

  SignedPerm sift_from(const SignedPerm& p, int start_level) const {
    SignedPerm r = p;
    for (std::size_t k = start_level; k < levels_.size(); ++k) {
      const Level& l = levels_[k];
      int x = r(l.point);
      if (x == l.point) continue;
      if (!l.tr.contains(x)) return r;
      r = compose(l.tr.to(x).inverse(), r);
    }
    return r;
  }

  int first_moved(const SignedPerm& p) const {
    for (int i = 0; i < degree_; ++i)
      if (p(i) != i) return i;
    return -1;
  }

  int degree_;
  bool sign_degenerate_;
  std::vector<Level> levels_;
};

// Full element closure (signed elements are distinct by images AND sign).
// Intended for tests and brute-force fallbacks; throws past `cap`.
inline std::vector<SignedPerm> enumerate_elements(const std::vector<SignedPerm>& gens, int degree,
                                                  std::size_t cap = 1000000) {
  std::set<SignedPerm> seen;
  std::vector<SignedPerm> queue{SignedPerm::identity(degree)};
  seen.insert(queue[0]);
  for (std::size_t k = 0; k < queue.size(); ++k) {
    for (const SignedPerm& g : gens) {
      SignedPerm next = compose(g, queue[k]);
      if (seen.insert(next).second) {
        if (seen.size() > cap) throw std::runtime_error("group closure exceeds cap");
        queue.push_back(next);
      }
    }
  }
  return queue;
}

inline std::vector<SignedPerm> enumerate_elements(const PermGroup& g, std::size_t cap = 1000000) {
  return enumerate_elements(g.strong_generators(), g.degree(), cap);
}

}  // namespace invar
