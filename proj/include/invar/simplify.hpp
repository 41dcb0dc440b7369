#pragma once

// Top layer: converting between tensor expressions and invariant-algebra
// polynomials, reducing through a relation database, and the catalog of
// classical named invariants.
//
// The round trip is riemann_to_inv -> inv_simplify -> inv_to_riemann.  Terms
// whose degree exceeds the database range cannot be named, so the simplifier
// keeps them aside in level-1 canonical tensor form instead of failing.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "conversions.hpp"
#include "database.hpp"

namespace invar {

// Level-1 normal form of one fully contracted monomial: every connected
// component replaced by the canonical representative of its class, components
// sorted.  Only the canonicalizer cache is consulted, never a census, so this
// works at any degree.
inline TensorTerm canonicalize_scalar_term(const TensorTerm& t, CanonicalizerCache& cache) {
  if (!free_indices(t).empty())
    throw std::invalid_argument("canonicalize_scalar_term: term has free indices");
  TensorTerm out;
  out.coeff = t.coeff;
  out.sigma_pow = t.sigma_pow & 1;
  if (t.factors.empty() || t.coeff == 0) return out;

  std::vector<int> comp = factor_components(t);
  int n_components = *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::pair<Shape, SignedPerm>> parts;
  for (int c = 0; c < n_components; ++c) {
    TensorTerm part;
    part.coeff = 1;
    bool has_riemann = false;
    for (std::size_t f = 0; f < t.factors.size(); ++f) {
      if (comp[f] != c) continue;
      has_riemann = has_riemann || t.factors[f].name == "R";
      part.factors.push_back(t.factors[f]);
    }
    if (!has_riemann) {
      out.coeff = 0;
      return out;
    }
    TermConfig tc = term_to_config(part);
    SplitResult sr = split_and_canonicalize(tc.shape, tc.config, cache);
    if (sr.zero) {
      out.coeff = 0;
      return out;
    }
    out.coeff *= sr.sign;
    parts.insert(parts.end(), sr.parts.begin(), sr.parts.end());
  }
  std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) {
    if (!(a.first == b.first)) return a.first < b.first;
    return std::lexicographical_compare(a.second.raw_images(), a.second.raw_images() + a.first.n_slots(),
                                        b.second.raw_images(), b.second.raw_images() + b.first.n_slots());
  });
  TensorTerm acc;
  acc.coeff = out.coeff;
  acc.sigma_pow = out.sigma_pow;
  for (const auto& [shape, rep] : parts) acc = multiply_terms(acc, config_term(shape, rep));
  return acc;
}

namespace detail {

// Converts one prepared monomial (factors all rank 4, named R or epsilon,
// at most one epsilon per connected component) into the invariant algebra,
// component by component.  When a component's class lies outside the index
// and `residual` is nonnull, the whole term is diverted there in canonical
// tensor form; otherwise the lookup failure propagates.
inline void convert_prepared_term(const InvariantIndex& idx, const TensorTerm& t,
                                  InvariantPolynomial& out, TensorExpr* residual,
                                  std::vector<std::string>* warnings) {
  if (t.coeff == 0) return;
  if (!free_indices(t).empty())
    throw std::invalid_argument("riemann_to_inv: expression has free indices");
  if (t.factors.empty()) {
    out += InvariantPolynomial::term(InvariantMonomial({}, t.sigma_pow), t.coeff);
    return;
  }
  std::vector<int> comp = factor_components(t);
  int n_components = *std::max_element(comp.begin(), comp.end()) + 1;
  InvariantPolynomial acc = InvariantPolynomial::term(InvariantMonomial({}, t.sigma_pow), t.coeff);
  try {
    for (int c = 0; c < n_components && !acc.is_zero(); ++c) {
      TensorTerm part;
      part.coeff = 1;
      bool has_riemann = false;
      for (std::size_t f = 0; f < t.factors.size(); ++f) {
        if (comp[f] != c) continue;
        has_riemann = has_riemann || t.factors[f].name == "R";
        part.factors.push_back(t.factors[f]);
      }
      if (!has_riemann) {
        acc = InvariantPolynomial();
        break;
      }
      acc = acc * idx.term_polynomial(part);
    }
  } catch (const std::out_of_range&) {
    if (!residual) throw;
    TensorTerm canon = canonicalize_scalar_term(t, idx.canonicalizers());
    if (canon.coeff != 0) {
      int degree = 0;
      for (const auto& f : t.factors) degree += f.name == "R" ? 1 : 0;
      residual->terms.push_back(std::move(canon));
      if (warnings)
        warnings->push_back("degree " + std::to_string(degree) +
                            " term beyond the database range; kept in tensor form");
    }
    return;
  }
  out += acc;
}

}  // namespace detail

// Scalar tensor expression -> polynomial in the named invariant classes.
// Accepts Riemann, Ricci, scalar curvature, Weyl, metric and epsilon factors;
// throws std::invalid_argument for free indices and std::out_of_range when a
// connected class lies outside the index.
inline InvariantPolynomial riemann_to_inv(const InvariantIndex& idx, const TensorExpr& e) {
  TensorExpr prepared = expand_connected_epsilon_pairs(tidy(ricci_to_riemann(weyl_to_riemann(e))));
  InvariantPolynomial out;
  for (const TensorTerm& t : prepared.terms) detail::convert_prepared_term(idx, t, out, nullptr, nullptr);
  return out;
}

inline InvariantPolynomial riemann_to_inv(const InvariantIndex& idx, const std::string& text) {
  return riemann_to_inv(idx, parse_tensor_expr(text));
}

// Polynomial in invariant classes -> tensor expression, each class rendered
// as its canonical representative contraction.
inline TensorExpr inv_to_riemann(const InvariantIndex& idx, const InvariantPolynomial& q) {
  TensorExpr out;
  for (const auto& [m, c] : q.terms()) {
    TensorTerm t;
    t.coeff = c;
    t.sigma_pow = m.sigma_pow();
    for (const InvariantId& id : m.ids()) t = multiply_terms(t, config_term(id.shape(), idx.rep_of(id)));
    out.terms.push_back(std::move(t));
  }
  normalize_terms(out);
  return out;
}

// Normal form with respect to the relation rules active at the given level
// (1 none, 2 cyclic, 3 dimensional, 4 signature).
inline InvariantPolynomial inv_simplify(const Database& db, const InvariantPolynomial& q,
                                        int level = Database::max_level) {
  return db.rules(level).reduce(q);
}

// Result of simplifying a tensor expression: the in-range part as a reduced
// invariant polynomial, plus any out-of-range terms kept in canonical tensor
// form, with one warning per diverted term.
struct SimplifyOutcome {
  InvariantPolynomial inv;
  TensorExpr residual;
  std::vector<std::string> warnings;

  bool complete() const { return residual.terms.empty(); }
};

inline SimplifyOutcome riemann_simplify(const Database& db, const TensorExpr& e,
                                        int level = Database::max_level) {
  SimplifyOutcome out;
  TensorExpr prepared = expand_connected_epsilon_pairs(tidy(ricci_to_riemann(weyl_to_riemann(e))));
  for (const TensorTerm& t : prepared.terms)
    detail::convert_prepared_term(db.index, t, out.inv, &out.residual, &out.warnings);
  out.inv = db.rules(level).reduce(out.inv);
  normalize_terms(out.residual);
  return out;
}

inline SimplifyOutcome riemann_simplify(const Database& db, const std::string& text,
                                        int level = Database::max_level) {
  return riemann_simplify(db, parse_tensor_expr(text), level);
}

// Simplified expression rendered back with full curvature tensors.
inline TensorExpr render_riemann(const Database& db, const SimplifyOutcome& o) {
  TensorExpr e = inv_to_riemann(db.index, o.inv);
  e.terms.insert(e.terms.end(), o.residual.terms.begin(), o.residual.terms.end());
  normalize_terms(e);
  return e;
}

// Same, with traces of the Riemann tensor presented through Ricci tensors.
inline TensorExpr render_ricci(const Database& db, const SimplifyOutcome& o) {
  return riemann_to_ricci(render_riemann(db, o));
}

// ---------------------------------------------------------------------------
// Catalog of classical invariants.

// One invariant in two printed renderings: a contraction of full curvature
// tensors (with one epsilon for the dual ones), and the same invariant with
// the traced factor pairs rewritten through Ricci tensors.  Both strings
// parse; `ricci_sign` is the sign carried by the Ricci rendering, so that
// value(riemann_form) == ricci_sign * value(ricci_form).
struct CatalogInvariant {
  std::string riemann_form;
  std::string ricci_form;
  int ricci_sign;
};

inline const std::vector<CatalogInvariant>& invariant_catalog() {
  static const std::vector<CatalogInvariant> rows = {
      {"R[a,b,-a,-b]", "R[]", +1},
      {"R[a,b,-a,c]*R[-b,d,-c,-d]", "R[a,b]*R[-a,-b]", +1},
      {"R[a,b,c,d]*R[-a,-b,-c,-d]", "R[a,b,c,d]*R[-a,-b,-c,-d]", +1},
      {"R[a,b,c,d]*R[-a,-b,e,f]*epsilon[-c,-d,-e,-f]",
       "R[a,b,c,d]*R[-a,-b,e,f]*epsilon[-c,-d,-e,-f]", +1},
      {"R[a,b,-a,c]*R[-b,d,-d,e]*R[-c,f,-e,-f]", "R[a,b]*R[-a,c]*R[-b,-c]", -1},
      {"R[a,b,-a,c]*R[-b,d,-c,e]*R[-d,f,-e,-f]", "R[a,b]*R[c,d]*R[-a,-c,-b,-d]", +1},
      {"R[a,b,-a,c]*R[-b,d,e,f]*R[-d,g,-g,h]*epsilon[-c,-e,-f,-h]",
       "R[a,b]*R[c,d]*R[-a,-c,e,f]*epsilon[-b,-d,-e,-f]", -1},
      {"R[a,b,c,d]*R[-a,-b,e,f]*R[-c,-d,-e,-f]", "R[a,b,c,d]*R[-a,-b,e,f]*R[-c,-d,-e,-f]", +1},
      {"R[a,b,c,d]*R[-a,-b,e,f]*R[-c,-d,g,h]*epsilon[-e,-f,-g,-h]",
       "R[a,b,c,d]*R[-a,-b,e,f]*R[-c,-d,g,h]*epsilon[-e,-f,-g,-h]", +1},
      {"R[a,b,-a,c]*R[-b,d,-d,e]*R[-c,f,-f,g]*R[-e,h,-g,-h]", "R[a,b]*R[-a,c]*R[-b,d]*R[-c,-d]", +1},
      {"R[a,b,-a,c]*R[-b,d,e,f]*R[-c,g,-e,-f]*R[-d,h,-g,-h]",
       "R[a,b]*R[c,d]*R[-a,-c,e,f]*R[-b,-d,-e,-f]", +1},
      {"R[a,b,-a,c]*R[-b,d,-c,e]*R[-d,f,-e,g]*R[-f,h,-g,-h]",
       "R[a,b]*R[c,d]*R[-a,e,-b,f]*R[-c,-e,-d,-f]", +1},
      {"R[a,b,-a,c]*R[-b,d,-c,e]*R[-d,f,g,h]*R[-f,i,-i,j]*epsilon[-e,-g,-h,-j]",
       "R[a,b]*R[c,d]*R[-a,e,-b,f]*R[-c,-e,g,h]*epsilon[-d,-f,-g,-h]", -1},
      {"R[a,b,-a,c]*R[-b,d,-c,e]*R[-d,f,-f,g]*R[-e,h,-h,i]*R[-g,j,-i,-j]",
       "R[a,b]*R[-a,c]*R[-b,d]*R[e,f]*R[-c,-e,-d,-f]", +1},
      {"R[a,b,-a,c]*R[-b,d,-c,e]*R[-d,f,-e,g]*R[-f,h,-h,i]*R[-g,j,-i,-j]",
       "R[a,b]*R[-a,c]*R[d,e]*R[-b,f,-c,g]*R[-d,-f,-e,-g]", -1},
      {"R[a,b,-a,c]*R[-b,d,-c,e]*R[-d,f,g,h]*R[-e,i,-g,-h]*R[-f,j,-i,-j]",
       "R[a,b]*R[c,d]*R[-a,e,-b,f]*R[-c,-e,g,h]*R[-d,-f,-g,-h]", +1},
      {"R[a,b,-a,c]*R[-b,d,-d,e]*R[-c,f,-f,g]*R[-e,h,i,j]*R[-h,k,-k,l]*epsilon[-g,-i,-j,-l]",
       "R[a,b]*R[-a,c]*R[-b,d]*R[e,f]*R[-c,-e,g,h]*epsilon[-d,-f,-g,-h]", -1},
      {"R[a,b,-a,c]*R[-b,d,-c,e]*R[-d,f,-e,g]*R[-f,h,i,j]*R[-h,k,-k,l]*epsilon[-g,-i,-j,-l]",
       "R[a,b]*R[c,d]*R[-a,e,-b,f]*R[-c,g,h,i]*R[-e,-g,-f,j]*epsilon[-d,-h,-i,-j]", -1},
      {"R[a,b,-a,c]*R[-b,d,-d,e]*R[-c,f,-f,g]*R[-e,h,i,j]*R[-g,k,-i,-j]*R[-h,l,-k,-l]",
       "R[a,b]*R[-a,c]*R[-b,d]*R[e,f]*R[-c,-e,g,h]*R[-d,-f,-g,-h]", +1},
      {"R[a,b,-a,c]*R[-b,d,-c,e]*R[-d,f,-e,g]*R[-f,h,-h,i]*R[-g,j,-j,k]*R[-i,l,-k,-l]",
       "R[a,b]*R[-a,c]*R[-b,d]*R[e,f]*R[-c,g,-d,h]*R[-e,-g,-f,-h]", +1},
      {"R[a,b,-a,c]*R[-b,d,-d,e]*R[-c,f,-e,g]*R[-f,h,i,j]*R[-g,k,-i,-j]*R[-h,l,-k,-l]",
       "R[a,b]*R[-a,c]*R[d,e]*R[-b,f,-c,g]*R[-d,-f,h,i]*R[-e,-g,-h,-i]", -1},
      {"R[a,b,-a,c]*R[-b,d,-c,e]*R[-d,f,g,h]*R[-e,i,-g,-h]*R[-f,j,-i,k]*R[-j,l,-k,-l]",
       "R[a,b]*R[c,d]*R[-a,e,-b,f]*R[-c,g,-d,h]*R[-e,-g,i,j]*R[-f,-h,-i,-j]", +1},
      {"R[a,b,-a,c]*R[-b,d,-d,e]*R[-c,f,-e,g]*R[-f,h,-g,i]*R[-h,j,-j,k]*R[-i,l,-l,m]*R[-k,n,-m,-n]",
       "R[a,b]*R[-a,c]*R[-b,d]*R[e,f]*R[-e,g]*R[-c,h,-d,i]*R[-f,-h,-g,-i]", -1},
      {"R[a,b,-a,c]*R[-b,d,-d,e]*R[-c,f,-f,g]*R[-e,h,-g,i]*R[-h,j,k,l]*R[-i,m,-k,-l]*R[-j,n,-m,-n]",
       "R[a,b]*R[-a,c]*R[-b,d]*R[e,f]*R[-c,g,-d,h]*R[-e,-g,i,j]*R[-f,-h,-i,-j]", +1},
      {"R[a,b,-a,c]*R[-b,d,-c,e]*R[-d,f,g,h]*R[-e,i,-g,-h]*R[-f,j,-i,k]*R[-j,l,-l,m]*R[-k,n,-m,-n]",
       "R[a,b]*R[-a,c]*R[d,e]*R[-b,f,-c,g]*R[-d,h,-e,i]*R[-f,-h,j,k]*R[-g,-i,-j,-k]", -1},
  };
  return rows;
}

// One row of the independence table: an invariant class no relation reduces,
// with both printed renderings.  Catalog renderings are used where the class
// has one (sign-adjusted to equal the class exactly); otherwise the canonical
// representative is rendered directly.
struct BasisRow {
  InvariantId id;
  std::string riemann_form;
  std::string ricci_form;
  bool catalogued = false;
};

inline std::vector<BasisRow> independent_basis_table(const Database& db) {
  std::vector<BasisRow> rows;
  for (const auto& [shape, census] : db.index.censuses()) {
    for (const InvariantId& id : db.index.ids(shape)) {
      InvariantPolynomial p = InvariantPolynomial::term(InvariantMonomial({id}, 0), 1);
      if (!(db.signature.reduce(p) == p)) continue;
      BasisRow row;
      row.id = id;
      TensorExpr rep;
      rep.terms.push_back(config_term(shape, db.index.rep_of(id)));
      row.riemann_form = to_string(rep);
      row.ricci_form = to_string(riemann_to_ricci(rep));
      rows.push_back(std::move(row));
    }
  }
  for (const CatalogInvariant& cat : invariant_catalog()) {
    TensorExpr e = parse_tensor_expr(cat.riemann_form);
    int degree = 0;
    for (const auto& f : e.terms.at(0).factors) degree += f.name == "R" ? 1 : 0;
    bool dual = e.terms.at(0).factors.size() > static_cast<std::size_t>(degree);
    if (!db.index.has_shape(Shape(dual ? InvKind::D : InvKind::I, degree))) continue;
    InvariantPolynomial q = riemann_to_inv(db.index, e);
    if (q.size() != 1 || q.leading().first.ids().size() != 1) continue;
    const InvariantId& id = q.leading().first.ids().at(0);
    const Rational& c = q.leading().second;
    auto it = std::find_if(rows.begin(), rows.end(), [&](const BasisRow& r) { return r.id == id; });
    if (it == rows.end()) continue;
    it->riemann_form = (c < 0 ? "-" : "") + cat.riemann_form;
    it->ricci_form = (c * cat.ricci_sign < 0 ? "-" : "") + cat.ricci_form;
    it->catalogued = true;
  }
  std::sort(rows.begin(), rows.end(), [](const BasisRow& a, const BasisRow& b) { return a.id < b.id; });
  return rows;
}

// ---------------------------------------------------------------------------
// The fourteen classical curvature invariants of degree <= 7 built from
// Ricci and Weyl factors.  Definitions are self-contained parseable strings.

struct NamedInvariant {
  std::string name;
  int degree;
  std::string definition;
};

inline const std::vector<NamedInvariant>& named_invariant_catalog() {
  static const std::vector<NamedInvariant> rows = {
      {"I1", 1, "R[]"},
      {"I2", 2, "R[a,b]*R[-a,-b]"},
      {"I3", 3, "R[a,b]*R[-a,c]*R[-b,-c]"},
      {"I4", 4, "R[a,b]*R[-a,c]*R[-b,d]*R[-c,-d]"},
      {"J1", 2, "W[a,b,c,d]*W[-a,-b,-c,-d]"},
      {"J2", 3, "W[a,b,c,d]*W[-a,-b,e,f]*W[-c,-d,-e,-f]"},
      {"J3", 4,
       "W[a,b,c,d]*W[-a,-b,e,f]*W[-c,-d,g,h]*W[-e,-f,-g,-h]"
       " - 1/4*(W[a,b,c,d]*W[-a,-b,-c,-d])*(W[a,b,c,d]*W[-a,-b,-c,-d])"},
      {"J4", 5,
       "W[a,b,c,d]*W[e,f,g,h]*W[-a,-b,-e,-f]*W[-c,-d,i,j]*W[-g,-h,-i,-j]"
       " - 5/12*(W[a,b,c,d]*W[-a,-b,-c,-d])*(W[a,b,c,d]*W[-a,-b,e,f]*W[-c,-d,-e,-f])"},
      {"K1", 3, "R[a,b]*R[c,d]*W[-a,-c,-b,-d]"},
      {"K2", 4, "R[a,b]*R[c,d]*W[-a,-c,e,f]*W[-b,-d,-e,-f]"},
      {"K3", 5,
       "R[a,b]*R[c,d]*W[-a,-c,e,f]*W[-b,-d,g,h]*W[-e,-f,-g,-h]"
       " - 1/4*(W[a,b,c,d]*W[-a,-b,-c,-d])*(R[a,b]*R[c,d]*W[-a,-c,-b,-d])"
       " + 1/12*(R[a,b]*R[-a,-b] - R[]*R[])*(W[a,b,c,d]*W[-a,-b,e,f]*W[-c,-d,-e,-f])"},
      {"K4", 5, "R[a,b]*R[-a,c]*R[d,e]*R[-d,f]*W[-b,-e,-c,-f]"},
      {"K5", 6, "R[a,b]*R[-a,c]*R[d,e]*R[-d,f]*W[-b,-e,g,h]*W[-c,-f,-g,-h]"},
      {"K6", 7,
       "R[a,b]*R[-a,c]*R[d,e]*R[-d,f]*W[-b,-e,g,h]*W[-c,-f,i,j]*W[-g,-h,-i,-j]"
       " - 1/4*(W[a,b,c,d]*W[-a,-b,-c,-d])*(R[a,b]*R[-a,c]*R[d,e]*R[-d,f]*W[-b,-e,-c,-f])"
       " + 1/12*(R[a,b]*R[-a,c]*R[-b,d]*R[-c,-d] - (R[a,b]*R[-a,-b])*(R[c,d]*R[-c,-d]))"
       "*(W[a,b,c,d]*W[-a,-b,e,f]*W[-c,-d,-e,-f])"},
  };
  return rows;
}

inline const NamedInvariant& named_invariant(const std::string& name) {
  for (const NamedInvariant& row : named_invariant_catalog())
    if (row.name == name) return row;
  throw std::invalid_argument("unknown named invariant: " + name);
}

// Expansion of a named invariant over the invariant classes, reduced at the
// given level.  Throws std::out_of_range when the database range is too small
// for the definition (K5 needs degree 6, K6 degree 7).
inline InvariantPolynomial nk_expand(const Database& db, const std::string& name,
                                     int level = Database::max_level) {
  InvariantPolynomial q = riemann_to_inv(db.index, named_invariant(name).definition);
  return db.rules(level).reduce(q);
}

}  // namespace invar
