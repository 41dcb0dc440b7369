#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace invar {

using Rational = mpq_class;
using Integer = mpz_class;

// Parses "p", "-p" or "p/q" exactly; throws std::invalid_argument otherwise.
inline Rational rational_from_string(const std::string& text) {
  mpq_class q;
  if (text.empty() || q.set_str(text, 10) != 0)
    throw std::invalid_argument("bad rational: '" + text + "'");
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace invar
