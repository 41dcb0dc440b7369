#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"

namespace invar {

// Abstract index with variance.  "-a" on input denotes the covariant
// position; bare labels are contravariant.
struct Index {
  std::string label;
  bool up = true;

  friend bool operator==(const Index&, const Index&) = default;
  friend auto operator<=>(const Index& a, const Index& b) {
    if (auto c = a.label <=> b.label; c != 0) return c;
    return (a.up ? 1 : 0) <=> (b.up ? 1 : 0);
  }
};

inline Index upper(std::string label) { return Index{std::move(label), true}; }
inline Index lower(std::string label) { return Index{std::move(label), false}; }
inline Index flipped(const Index& i) { return Index{i.label, !i.up}; }

// One named tensor with an ordered slot list: R[a,-b,c,d], g[a,b], R[].
struct TensorFactor {
  std::string name;
  std::vector<Index> indices;

  int rank() const { return static_cast<int>(indices.size()); }

  friend bool operator==(const TensorFactor&, const TensorFactor&) = default;
  friend auto operator<=>(const TensorFactor& a, const TensorFactor& b) {
    if (auto c = a.name <=> b.name; c != 0) return c;
    return a.indices <=> b.indices;
  }
};

// Product of factors with an exact rational coefficient.  sigma_pow carries
// the symbolic metric-signature sign "sig" (sig^2 = 1, so it is kept mod 2).
struct TensorTerm {
  Rational coeff = 1;
  int sigma_pow = 0;
  std::vector<TensorFactor> factors;

  friend bool operator==(const TensorTerm&, const TensorTerm&) = default;
};

struct TensorExpr {
  std::vector<TensorTerm> terms;

  friend bool operator==(const TensorExpr&, const TensorExpr&) = default;
};

class TensorParseError : public std::runtime_error {
 public:
  TensorParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Labels appearing exactly twice in the term (validated elsewhere to have
// opposite variance).
inline std::set<std::string> dummy_labels(const TensorTerm& t) {
  std::map<std::string, int> count;
  for (const auto& f : t.factors)
    for (const auto& i : f.indices) ++count[i.label];
  std::set<std::string> out;
  for (const auto& [label, c] : count)
    if (c == 2) out.insert(label);
  return out;
}

inline std::set<Index> free_indices(const TensorTerm& t) {
  std::map<std::string, int> count;
  for (const auto& f : t.factors)
    for (const auto& i : f.indices) ++count[i.label];
  std::set<Index> out;
  for (const auto& f : t.factors)
    for (const auto& i : f.indices)
      if (count[i.label] == 1) out.insert(i);
  return out;
}

inline std::set<std::string> all_labels(const TensorTerm& t) {
  std::set<std::string> out;
  for (const auto& f : t.factors)
    for (const auto& i : f.indices) out.insert(i.label);
  return out;
}

inline std::string fresh_label(const std::set<std::string>& used, int& counter) {
  for (;;) {
    std::string cand = "i" + std::to_string(counter++);
    if (!used.count(cand)) return cand;
  }
}

inline void relabel(TensorTerm& t, const std::map<std::string, std::string>& renames) {
  for (auto& f : t.factors)
    for (auto& i : f.indices) {
      auto it = renames.find(i.label);
      if (it != renames.end()) i.label = it->second;
    }
}

// Sorts factors, merges syntactically identical terms, drops zeros.  Purely
// syntactic: terms differing in dummy label names stay distinct here; making
// those collide is the canonicalizer's job.
inline void normalize_terms(TensorExpr& e) {
  for (auto& t : e.terms) {
    t.sigma_pow &= 1;
    std::sort(t.factors.begin(), t.factors.end());
  }
  std::sort(e.terms.begin(), e.terms.end(), [](const TensorTerm& a, const TensorTerm& b) {
    if (a.factors != b.factors) return a.factors < b.factors;
    if (a.sigma_pow != b.sigma_pow) return a.sigma_pow < b.sigma_pow;
    return a.coeff < b.coeff;
  });
  std::vector<TensorTerm> merged;
  for (auto& t : e.terms) {
    if (!merged.empty() && merged.back().factors == t.factors &&
        merged.back().sigma_pow == t.sigma_pow) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const TensorTerm& t) { return t.coeff == 0; });
  e.terms = std::move(merged);
}

inline TensorExpr operator+(TensorExpr a, const TensorExpr& b) {
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}

inline TensorExpr operator*(const Rational& c, TensorExpr e) {
  for (auto& t : e.terms) t.coeff *= c;
  return e;
}

inline TensorExpr operator-(TensorExpr a, const TensorExpr& b) {
  return std::move(a) + Rational(-1) * b;
}

// Term product; dummy labels private to the right factor are renamed away
// from every label on the left, so contractions never collide.  A label free
// on both sides deliberately becomes a contraction, matching how products of
// index expressions are written.
inline TensorTerm multiply_terms(const TensorTerm& a, TensorTerm b) {
  std::set<std::string> left = all_labels(a);
  std::set<std::string> used = left;
  for (const auto& l : all_labels(b)) used.insert(l);
  std::map<std::string, std::string> renames;
  int counter = 0;
  for (const auto& l : dummy_labels(b))
    if (left.count(l)) renames[l] = fresh_label(used, counter);
  relabel(b, renames);
  TensorTerm out;
  out.coeff = a.coeff * b.coeff;
  out.sigma_pow = (a.sigma_pow + b.sigma_pow) & 1;
  out.factors = a.factors;
  out.factors.insert(out.factors.end(), b.factors.begin(), b.factors.end());
  return out;
}

inline TensorExpr operator*(const TensorExpr& a, const TensorExpr& b) {
  TensorExpr out;
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) out.terms.push_back(multiply_terms(ta, tb));
  return out;
}

// ---------------------------------------------------------------------------
// Parsing.
//
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := rational | NAME '[' [idx (',' idx)*] ']' | 'sig' | '(' expr ')'
//   idx    := IDENT | '-' IDENT
//
// Recognized names: R (rank 4, 2 or 0), C or W (rank 4, stored as C),
// g (rank 2), epsilon (rank 4), sig (scalar signature sign).

namespace detail {

struct Lexer {
  const std::string& src;
  std::size_t pos = 0;

  explicit Lexer(const std::string& s) : src(s) {}

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!accept(c)) throw TensorParseError(std::string("expected ") + what, pos);
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    if (pos == start) throw TensorParseError("expected identifier", pos);
    if (std::isdigit(static_cast<unsigned char>(src[start])))
      throw TensorParseError("identifier may not start with a digit", start);
    return src.substr(start, pos - start);
  }

  Rational rational() {
    skip_ws();
    std::size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    if (pos == start) throw TensorParseError("expected number", pos);
    std::string text = src.substr(start, pos - start);
    if (pos < src.size() && src[pos] == '/') {
      std::size_t den_start = ++pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      if (pos == den_start) throw TensorParseError("expected denominator", pos);
      text += "/" + src.substr(den_start, pos - den_start);
    }
    return rational_from_string(text);
  }
};

struct Parser {
  Lexer lex;

  explicit Parser(const std::string& s) : lex(s) {}

  TensorExpr parse_expr() {
    TensorExpr out;
    bool negative = lex.accept('-');
    out = parse_term(negative);
    for (;;) {
      if (lex.accept('+')) {
        out = std::move(out) + parse_term(false);
      } else if (lex.accept('-')) {
        out = std::move(out) + parse_term(true);
      } else {
        return out;
      }
    }
  }

  TensorExpr parse_term(bool negative) {
    TensorExpr out = parse_factor();
    while (lex.accept('*')) out = out * parse_factor();
    if (negative) out = Rational(-1) * out;
    return out;
  }

  TensorExpr parse_factor() {
    char c = lex.peek();
    if (c == '(') {
      lex.expect('(', "'('");
      TensorExpr inner = parse_expr();
      lex.expect(')', "')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      TensorTerm t;
      t.coeff = lex.rational();
      return TensorExpr{{t}};
    }
    std::size_t name_pos = lex.pos;
    std::string name = lex.ident();
    if (name == "sig") {
      TensorTerm t;
      t.sigma_pow = 1;
      return TensorExpr{{t}};
    }
    if (lex.peek() != '[')
      throw TensorParseError("expected '[' after tensor name '" + name + "'", lex.pos);
    lex.expect('[', "'['");
    TensorFactor f;
    f.name = (name == "W") ? "C" : name;
    if (!lex.accept(']')) {
      for (;;) {
        bool up = !lex.accept('-');
        f.indices.push_back(Index{lex.ident(), up});
        if (lex.accept(']')) break;
        lex.expect(',', "',' or ']'");
      }
    }
    check_factor(f, name_pos);
    TensorTerm t;
    t.factors.push_back(std::move(f));
    return TensorExpr{{t}};
  }

  static void check_factor(const TensorFactor& f, std::size_t pos) {
    static const std::map<std::string, std::set<int>> ranks = {
        {"R", {0, 2, 4}}, {"C", {4}}, {"g", {2}}, {"epsilon", {4}}};
    auto it = ranks.find(f.name);
    if (it == ranks.end()) throw TensorParseError("unknown tensor name '" + f.name + "'", pos);
    if (!it->second.count(f.rank()))
      throw TensorParseError(
          "tensor '" + f.name + "' does not take " + std::to_string(f.rank()) + " indices", pos);
  }
};

}  // namespace detail

// Semantic checks shared by the parser and programmatic construction: every
// label occurs at most twice per term, repeats have opposite variance, and
// all terms expose the same free indices.
inline void validate(const TensorExpr& e) {
  bool have_free = false;
  std::set<Index> free0;
  for (const auto& t : e.terms) {
    std::map<std::string, std::vector<bool>> seen;
    for (const auto& f : t.factors)
      for (const auto& i : f.indices) seen[i.label].push_back(i.up);
    for (const auto& [label, ups] : seen) {
      if (ups.size() > 2)
        throw TensorParseError("index '" + label + "' appears more than twice in a term", 0);
      if (ups.size() == 2 && ups[0] == ups[1])
        throw TensorParseError("index '" + label + "' repeats with the same variance", 0);
    }
    std::set<Index> free = free_indices(t);
    if (!have_free) {
      free0 = free;
      have_free = true;
    } else if (free != free0) {
      throw TensorParseError("terms do not share the same free indices", 0);
    }
  }
}

inline TensorExpr parse_tensor_expr(const std::string& src) {
  detail::Parser p(src);
  TensorExpr e = p.parse_expr();
  if (!p.lex.eof()) throw TensorParseError("unexpected trailing input", p.lex.pos);
  validate(e);
  return e;
}

inline bool is_scalar(const TensorExpr& e) {
  for (const auto& t : e.terms)
    if (!free_indices(t).empty()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Rendering.  parse_tensor_expr(to_string(e)) reproduces e up to term order.

inline std::string to_string(const Index& i) { return i.up ? i.label : "-" + i.label; }

inline std::string to_string(const TensorFactor& f) {
  std::string out = f.name + "[";
  for (std::size_t k = 0; k < f.indices.size(); ++k) {
    if (k) out += ",";
    out += to_string(f.indices[k]);
  }
  return out + "]";
}

inline std::string to_string(const TensorExpr& e) {
  if (e.terms.empty()) return "0";
  std::string out;
  for (std::size_t k = 0; k < e.terms.size(); ++k) {
    const TensorTerm& t = e.terms[k];
    Rational c = t.coeff;
    if (k == 0) {
      if (c < 0) {
        out += "-";
        c = -c;
      }
    } else {
      out += c < 0 ? " - " : " + ";
      if (c < 0) c = -c;
    }
    std::vector<std::string> pieces;
    if (c != 1 || (t.factors.empty() && t.sigma_pow == 0)) pieces.push_back(to_string(c));
    if (t.sigma_pow & 1) pieces.push_back("sig");
    for (const auto& f : t.factors) pieces.push_back(to_string(f));
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      if (j) out += " * ";
      out += pieces[j];
    }
  }
  return out;
}

}  // namespace invar
