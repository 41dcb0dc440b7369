#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace invar {

// Largest point count we ever canonicalize: degree-7 non-dual monomials have
// 28 slots, degree-5 duals 24.
inline constexpr int max_points = 32;

// A permutation of {0..n-1} tagged with a sign in {+1,-1}.  The sign rides
// along multiplicatively under composition; it is how antisymmetries of
// tensor slots are tracked without doubling the point set.
class SignedPerm {
 public:
  SignedPerm() : n_(0), sign_(1) { img_.fill(0); }

  static SignedPerm identity(int n) {
    check_degree(n);
    SignedPerm p;
    p.n_ = static_cast<std::uint8_t>(n);
    for (int i = 0; i < n; ++i) p.img_[i] = static_cast<std::uint8_t>(i);
    return p;
  }

  static SignedPerm from_images(const std::vector<int>& images, int sign = +1) {
    check_degree(static_cast<int>(images.size()));
    if (sign != +1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
    SignedPerm p;
    p.n_ = static_cast<std::uint8_t>(images.size());
    p.sign_ = static_cast<std::int8_t>(sign);
    std::array<bool, max_points> seen{};
    for (std::size_t i = 0; i < images.size(); ++i) {
      int v = images[i];
      if (v < 0 || v >= static_cast<int>(images.size()) || seen[v])
        throw std::invalid_argument("images are not a bijection");
      seen[v] = true;
      p.img_[i] = static_cast<std::uint8_t>(v);
    }
    return p;
  }

  int degree() const { return n_; }
  int sign() const { return sign_; }
  int operator()(int x) const {
    assert(x >= 0 && x < n_);
    return img_[x];
  }

  bool images_are_identity() const {
    for (int i = 0; i < n_; ++i)
      if (img_[i] != i) return false;
    return true;
  }
  bool is_identity() const { return sign_ == +1 && images_are_identity(); }

  SignedPerm inverse() const {
    SignedPerm r;
    r.n_ = n_;
    r.sign_ = sign_;
    for (int i = 0; i < n_; ++i) r.img_[img_[i]] = static_cast<std::uint8_t>(i);
    return r;
  }

  // (p∘q)(x) = p(q(x)); signs multiply.
  friend SignedPerm compose(const SignedPerm& p, const SignedPerm& q) {
    if (p.n_ != q.n_) throw std::invalid_argument("degree mismatch in compose");
    SignedPerm r;
    r.n_ = p.n_;
    r.sign_ = static_cast<std::int8_t>(p.sign_ * q.sign_);
    for (int i = 0; i < p.n_; ++i) r.img_[i] = p.img_[q.img_[i]];
    return r;
  }

  SignedPerm negated() const {
    SignedPerm r = *this;
    r.sign_ = static_cast<std::int8_t>(-r.sign_);
    return r;
  }

  friend bool operator==(const SignedPerm& a, const SignedPerm& b) {
    return a.n_ == b.n_ && a.sign_ == b.sign_ &&
           std::memcmp(a.img_.data(), b.img_.data(), a.n_) == 0;
  }
  friend bool operator!=(const SignedPerm& a, const SignedPerm& b) { return !(a == b); }

  bool same_images(const SignedPerm& o) const {
    return n_ == o.n_ && std::memcmp(img_.data(), o.img_.data(), n_) == 0;
  }

  // Lexicographic on the image sequence; ties broken with +1 before -1.
  // This is the frozen total order that invariant numbering depends on.
  friend bool operator<(const SignedPerm& a, const SignedPerm& b) {
    assert(a.n_ == b.n_);
    int c = std::memcmp(a.img_.data(), b.img_.data(), a.n_);
    if (c != 0) return c < 0;
    return a.sign_ > b.sign_;  // +1 sorts first
  }

  // Disjoint-cycle text: "-(1,2)(5,7,6)", 1-based points, identity "()".
  std::string to_cycles() const {
    std::string out;
    if (sign_ < 0) out += '-';
    std::array<bool, max_points> done{};
    bool any = false;
    for (int i = 0; i < n_; ++i) {
      if (done[i] || img_[i] == i) continue;
      any = true;
      out += '(';
      int j = i;
      bool first = true;
      while (!done[j]) {
        if (!first) out += ',';
        out += std::to_string(j + 1);
        done[j] = true;
        first = false;
        j = img_[j];
      }
      out += ')';
    }
    if (!any) out += "()";
    return out;
  }

  static SignedPerm from_cycles(const std::string& text, int n) {
    check_degree(n);
    SignedPerm p = identity(n);
    std::size_t i = 0;
    auto skip_ws = [&] {
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    };
    skip_ws();
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
      if (text[i] == '-') p.sign_ = -1;
      ++i;
    }
    std::array<bool, max_points> used{};
    bool any_cycle = false;
    skip_ws();
    while (i < text.size() && text[i] == '(') {
      ++i;
      any_cycle = true;
      std::vector<int> cyc;
      skip_ws();
      while (i < text.size() && text[i] != ')') {
        std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start) throw std::invalid_argument("bad cycle text: '" + text + "'");
        int v = std::stoi(text.substr(start, i - start));
        if (v < 1 || v > n || used[v - 1])
          throw std::invalid_argument("cycle point out of range or repeated: '" + text + "'");
        used[v - 1] = true;
        cyc.push_back(v - 1);
        skip_ws();
        if (i < text.size() && text[i] == ',') {
          ++i;
          skip_ws();
        }
      }
      if (i >= text.size()) throw std::invalid_argument("unterminated cycle: '" + text + "'");
      ++i;  // ')'
      for (std::size_t k = 0; k < cyc.size(); ++k)
        p.img_[cyc[k]] = static_cast<std::uint8_t>(cyc[(k + 1) % cyc.size()]);
      skip_ws();
    }
    if (!any_cycle) throw std::invalid_argument("no cycles in: '" + text + "'");
    return p;
  }

  const std::uint8_t* raw_images() const { return img_.data(); }

 private:
  static void check_degree(int n) {
    if (n < 0 || n > max_points) throw std::invalid_argument("degree out of range");
  }

  std::uint8_t n_;
  std::int8_t sign_;
  std::array<std::uint8_t, max_points> img_;
};

}  // namespace invar
