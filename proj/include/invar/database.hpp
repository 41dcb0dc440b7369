#pragma once

#include <array>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "enumerate.hpp"
#include "oracle.hpp"
#include "random.hpp"
#include "relations.hpp"
#include "shape.hpp"

namespace invar {

// A database bundles the class censuses for every shape in range with three
// cumulative rule systems, one per simplification level beyond plain
// canonicalization: level 2 rewrites through cyclic relations, level 3 adds
// the antisymmetrization relations, level 4 adds the dual pair expansions.
struct DatabaseOptions {
  int max_inv_degree = 5;   // R^n scalars up to this degree
  int max_dual_degree = 4;  // eps R^n scalars up to this degree
  // Shapes with more slots than these limits switch from exhaustive sweeps
  // to seeded saturation sampling.
  int exhaustive_census_slots = 16;
  int exhaustive_dimensional_slots = 16;
  std::uint64_t seed = 2024;
  // A randomized sweep stops after a window of consecutive draws that
  // produce nothing new; the census window scales with the classes found.
  std::uint64_t census_window_factor = 50;
  std::uint64_t census_min_window = 1'000'000;
  std::uint64_t dimensional_window = 2'000;

  friend bool operator==(const DatabaseOptions&, const DatabaseOptions&) = default;
};

class Database {
 public:
  DatabaseOptions options;
  InvariantIndex index;
  SyzygySet cyclic;
  SyzygySet dimensional;
  SyzygySet signature;

  static constexpr int max_level = 4;

  // Rule system for one simplification level.  Level 1 is canonicalization
  // alone, so its rule set is empty.
  const SyzygySet& rules(int level) const {
    static const SyzygySet none;
    switch (level) {
      case 1: return none;
      case 2: return cyclic;
      case 3: return dimensional;
      case 4: return signature;
      default: throw std::out_of_range("database: level must be between 1 and 4");
    }
  }
};

namespace detail {

inline DimensionalOptions dimensional_sweep_options(const DatabaseOptions& opt,
                                                    const Shape& shape) {
  DimensionalOptions d;
  d.exhaustive = shape.n_slots() <= opt.exhaustive_dimensional_slots;
  d.seed = opt.seed;
  d.window = opt.dimensional_window;
  return d;
}

inline CensusOptions census_sweep_options(const DatabaseOptions& opt, const Shape& shape) {
  CensusOptions c;
  c.randomized = shape.n_slots() > opt.exhaustive_census_slots;
  c.random.seed = opt.seed;
  c.random.window_factor = opt.census_window_factor;
  c.random.min_window = opt.census_min_window;
  return c;
}

}  // namespace detail

// Builds the censuses and all three rule systems.  Each level starts from the
// previous one, so every per-shape sweep runs exactly once.
inline Database build_database(const DatabaseOptions& opt = {}) {
  Database db;
  db.options = opt;

  RandomCensusOptions random;
  random.seed = opt.seed;
  random.window_factor = opt.census_window_factor;
  random.min_window = opt.census_min_window;
  auto table = census_table(opt.max_inv_degree, opt.max_dual_degree, random,
                            db.index.canonicalizers(), opt.exhaustive_census_slots);
  for (auto& [shape, census] : table) db.index.add_census(std::move(census));

  for (const auto& [shape, census] : db.index.censuses())
    add_cyclic_relations(db.index, shape, db.cyclic);

  db.dimensional = db.cyclic;
  for (const auto& [shape, census] : db.index.censuses())
    add_dimensional_relations(db.index, shape, db.dimensional,
                              detail::dimensional_sweep_options(opt, shape));

  db.signature = db.dimensional;
  add_signature_relations(db.index, opt.max_inv_degree, db.signature);
  return db;
}

// Extends a database with one more dual degree in place: census, cyclic
// relations, antisymmetrization sweep, and whatever dual pair expansions the
// inv degree range still admits.
inline void add_dual_shape(Database& db, int degree) {
  const Shape shape(InvKind::D, degree);
  if (db.index.has_shape(shape))
    throw std::invalid_argument("database: shape already present");

  db.index.add_census(full_census(shape, db.index.censuses(),
                                  detail::census_sweep_options(db.options, shape),
                                  db.index.canonicalizers()));

  add_cyclic_relations(db.index, shape, db.cyclic);
  add_cyclic_relations(db.index, shape, db.dimensional);
  add_dimensional_relations(db.index, shape, db.dimensional,
                            detail::dimensional_sweep_options(db.options, shape));
  for (const auto& [head, rule] : db.dimensional.rules()) {
    InvariantPolynomial p = InvariantPolynomial::term(head, 1);
    p -= rule.tail;
    db.signature.insert(p);
  }
  if (degree + 1 <= db.options.max_inv_degree)
    add_signature_relations(db.index, db.options.max_inv_degree, db.signature);
  if (degree > db.options.max_dual_degree) db.options.max_dual_degree = degree;
}

// Independent invariants of one shape at each level: connected classes, then
// the survivors of the cyclic, dimensional and signature rule systems.
inline std::array<int, 4> level_counts(const Database& db, const Shape& shape) {
  return {static_cast<int>(db.index.connected_count(shape)),
          surviving_count(db.index, shape, db.cyclic),
          surviving_count(db.index, shape, db.dimensional),
          surviving_count(db.index, shape, db.signature)};
}

// ---------------------------------------------------------------------------
// Parsing for the printed invariant algebra.  The grammar is exactly what the
// to_string methods emit, so parse(print(x)) == x.

namespace detail {

[[noreturn]] inline void fail_parse(const char* what, std::string_view text) {
  throw std::runtime_error(std::string("database: cannot parse ") + what + " from \"" +
                           std::string(text) + "\"");
}

inline bool consume(std::string_view& s, char c) {
  if (s.empty() || s.front() != c) return false;
  s.remove_prefix(1);
  return true;
}

inline int parse_int(std::string_view& s, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p == s.data()) fail_parse(what, s);
  s.remove_prefix(static_cast<std::size_t>(p - s.data()));
  return v;
}

inline Rational parse_rational(std::string_view tok) {
  try {
    Rational q{std::string(tok)};
    if (q.get_den() == 0) fail_parse("coefficient", tok);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    fail_parse("coefficient", tok);
  }
}

}  // namespace detail

inline InvariantId parse_invariant_id(std::string_view s) {
  std::string_view rest = s;
  InvKind kind = InvKind::I;
  if (detail::consume(rest, 'D'))
    kind = InvKind::D;
  else if (!detail::consume(rest, 'I'))
    detail::fail_parse("invariant id", s);
  if (!detail::consume(rest, '[')) detail::fail_parse("invariant id", s);
  int degree = detail::parse_int(rest, "invariant id");
  if (!detail::consume(rest, ',')) detail::fail_parse("invariant id", s);
  int r = detail::parse_int(rest, "invariant id");
  if (!detail::consume(rest, ']') || !rest.empty()) detail::fail_parse("invariant id", s);
  if (degree < 1 || r < 1) detail::fail_parse("invariant id", s);
  return InvariantId{kind, degree, r};
}

inline InvariantMonomial parse_invariant_monomial(std::string_view s) {
  if (s == "1") return InvariantMonomial({}, 0);
  if (s.empty()) detail::fail_parse("monomial", s);
  int sigma = 0;
  std::vector<InvariantId> ids;
  std::string_view rest = s;
  while (true) {
    std::size_t cut = rest.find('*');
    std::string_view tok = rest.substr(0, cut);
    if (tok == "sig")
      sigma ^= 1;
    else
      ids.push_back(parse_invariant_id(tok));
    if (cut == std::string_view::npos) break;
    rest.remove_prefix(cut + 1);
  }
  return InvariantMonomial(std::move(ids), sigma);
}

inline InvariantPolynomial parse_invariant_polynomial(std::string_view s) {
  InvariantPolynomial p;
  if (s == "0") return p;
  if (s.empty()) detail::fail_parse("polynomial", s);
  int sign = +1;
  std::string_view rest = s;
  if (rest.front() == '-') {
    sign = -1;
    rest.remove_prefix(1);
  }
  while (true) {
    std::size_t plus = rest.find(" + ");
    std::size_t minus = rest.find(" - ");
    std::size_t cut = std::min(plus, minus);
    std::string_view term = rest.substr(0, cut);

    Rational coeff = 1;
    std::string_view mono = term;
    if (!term.empty() && term.front() >= '0' && term.front() <= '9') {
      std::size_t star = term.find('*');
      coeff = detail::parse_rational(term.substr(0, star));
      mono = star == std::string_view::npos ? std::string_view("1") : term.substr(star + 1);
    }
    p += InvariantPolynomial::term(parse_invariant_monomial(mono), sign * coeff);

    if (cut == std::string_view::npos) break;
    sign = cut == plus ? +1 : -1;
    rest.remove_prefix(cut + 3);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Plain text serialization.  The file is line oriented and human readable:
// censuses list one class per line, rule systems list one "head -> tail" per
// line in the algebra's own notation.

inline void save_database(const Database& db, std::ostream& os) {
  const DatabaseOptions& o = db.options;
  os << "invar-db 1\n";
  os << "options max-inv " << o.max_inv_degree << " max-dual " << o.max_dual_degree
     << " census-slots " << o.exhaustive_census_slots << " dimensional-slots "
     << o.exhaustive_dimensional_slots << " seed " << o.seed << " census-window "
     << o.census_window_factor << ' ' << o.census_min_window << " dimensional-window "
     << o.dimensional_window << "\n";

  os << "censuses " << db.index.censuses().size() << "\n";
  for (const auto& [shape, census] : db.index.censuses()) {
    os << "census " << kind_letter(shape.kind) << ' ' << shape.degree << " classes "
       << census.entries.size() << " zero " << census.zero_matchings << " total "
       << census.total_matchings << " samples " << census.samples << "\n";
    for (const auto& e : census.entries) {
      os << "class";
      for (int i = 0; i < shape.n_slots(); ++i)
        os << ' ' << static_cast<int>(e.rep.raw_images()[i]);
      os << ' ' << (e.reducible ? 1 : 0) << ' ' << e.matchings << "\n";
    }
  }

  auto dump_rules = [&os](const char* name, const SyzygySet& set) {
    os << "rules " << name << ' ' << set.rules().size() << "\n";
    for (const auto& [head, rule] : set.rules())
      os << head.to_string() << " -> " << rule.tail.to_string() << "\n";
  };
  dump_rules("cyclic", db.cyclic);
  dump_rules("dimensional", db.dimensional);
  dump_rules("signature", db.signature);
  os << "end\n";
}

inline std::string database_string(const Database& db) {
  std::ostringstream os;
  save_database(db, os);
  return os.str();
}

inline Database load_database(std::istream& is) {
  auto expect = [&is](const char* word) {
    std::string tok;
    if (!(is >> tok) || tok != word)
      throw std::runtime_error(std::string("database: expected \"") + word +
                               "\" but found \"" + tok + "\"");
  };
  auto checked = [&is](auto& value, const char* what) {
    if (!(is >> value))
      throw std::runtime_error(std::string("database: cannot read ") + what);
  };

  Database db;
  expect("invar-db");
  int version = 0;
  checked(version, "format version");
  if (version != 1) throw std::runtime_error("database: unsupported format version");

  DatabaseOptions& o = db.options;
  expect("options");
  expect("max-inv");
  checked(o.max_inv_degree, "options");
  expect("max-dual");
  checked(o.max_dual_degree, "options");
  expect("census-slots");
  checked(o.exhaustive_census_slots, "options");
  expect("dimensional-slots");
  checked(o.exhaustive_dimensional_slots, "options");
  expect("seed");
  checked(o.seed, "options");
  expect("census-window");
  checked(o.census_window_factor, "options");
  checked(o.census_min_window, "options");
  expect("dimensional-window");
  checked(o.dimensional_window, "options");

  expect("censuses");
  std::size_t n_censuses = 0;
  checked(n_censuses, "census count");
  for (std::size_t k = 0; k < n_censuses; ++k) {
    expect("census");
    std::string kind_tok;
    checked(kind_tok, "census shape");
    if (kind_tok != "I" && kind_tok != "D")
      throw std::runtime_error("database: unknown shape kind \"" + kind_tok + "\"");
    int degree = 0;
    checked(degree, "census shape");

    Census census;
    census.shape = Shape(kind_tok == "I" ? InvKind::I : InvKind::D, degree);
    std::size_t n_classes = 0;
    expect("classes");
    checked(n_classes, "census header");
    expect("zero");
    checked(census.zero_matchings, "census header");
    expect("total");
    checked(census.total_matchings, "census header");
    expect("samples");
    checked(census.samples, "census header");

    census.entries.reserve(n_classes);
    std::vector<int> img(static_cast<std::size_t>(census.shape.n_slots()));
    for (std::size_t j = 0; j < n_classes; ++j) {
      expect("class");
      for (auto& x : img) checked(x, "class images");
      int reducible = 0;
      ClassEntry entry;
      checked(reducible, "class entry");
      checked(entry.matchings, "class entry");
      entry.rep = SignedPerm::from_images(img, +1);
      entry.reducible = reducible != 0;
      census.entries.push_back(entry);
    }
    db.index.add_census(std::move(census));
  }

  auto load_rules = [&](const char* name, SyzygySet& set) {
    expect("rules");
    expect(name);
    std::size_t n = 0;
    checked(n, "rule count");
    std::string line;
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::getline(is >> std::ws, line))
        throw std::runtime_error("database: truncated rule section");
      std::size_t cut = line.find(" -> ");
      if (cut == std::string::npos)
        throw std::runtime_error("database: malformed rule \"" + line + "\"");
      InvariantPolynomial p =
          InvariantPolynomial::term(parse_invariant_monomial(std::string_view(line).substr(0, cut)), 1);
      p -= parse_invariant_polynomial(std::string_view(line).substr(cut + 4));
      if (!set.insert(p))
        throw std::runtime_error("database: stored rule reduced to nothing: " + line);
    }
  };
  load_rules("cyclic", db.cyclic);
  load_rules("dimensional", db.dimensional);
  load_rules("signature", db.signature);
  expect("end");
  return db;
}

inline void save_database_file(const Database& db, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("database: cannot write " + path);
  save_database(db, os);
  if (!os.flush()) throw std::runtime_error("database: write failed for " + path);
}

inline Database load_database_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("database: cannot read " + path);
  return load_database(is);
}

// ---------------------------------------------------------------------------
// Certification: every stored rule head == tail must hold numerically on
// random curvature, in both signatures.

struct CertificationReport {
  int trials = 0;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0; }
};

// Certifies every stored rule on `trials` random geometries per signature
// frame.  `sigma` restricts the frames checked (+1, -1, or 0 for both).
// Frames are independent, so they run on a small worker pool when `threads`
// exceeds one; the report is identical regardless of the thread count.
inline CertificationReport certify_database(const Database& db, int trials = 3,
                                            std::uint64_t seed = 0x0c3121f1, int sigma = 0,
                                            int threads = 1) {
  CertificationReport report;
  report.trials = trials;
  const std::array<std::pair<const char*, const SyzygySet*>, 3> levels = {
      {{"cyclic", &db.cyclic}, {"dimensional", &db.dimensional}, {"signature", &db.signature}}};

  std::vector<std::pair<int, int>> frames;
  for (int s : {+1, -1})
    if (sigma == 0 || sigma == s)
      for (int t = 0; t < trials; ++t) frames.emplace_back(s, t);

  auto run_frame = [&](const std::pair<int, int>& frame) {
    auto [s, t] = frame;
    CertificationReport part;
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(2 * t + (s < 0))));
    CurvatureSample sample = CurvatureSample::random(rng, s);
    std::map<InvariantId, Rational> memo;
    for (const auto& [name, set] : levels)
      for (const auto& [head, rule] : set->rules()) {
        ++part.checks;
        if (evaluate_monomial(db.index, head, sample, &memo) ==
            evaluate_polynomial(db.index, rule.tail, sample, &memo))
          continue;
        ++part.failures;
        if (part.first_failure.empty())
          part.first_failure = std::string(name) + " rule " + head.to_string() + " at sigma " +
                               (s < 0 ? "-1" : "+1");
      }
    return part;
  };

  std::vector<CertificationReport> parts(frames.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < frames.size(); ++i) parts[i] = run_frame(frames[i]);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < frames.size(); i = next++) parts[i] = run_frame(frames[i]);
    };
    std::vector<std::thread> pool;
    int n = std::min<int>(threads, static_cast<int>(frames.size()));
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  }
  for (const CertificationReport& part : parts) {
    report.checks += part.checks;
    report.failures += part.failures;
    if (report.first_failure.empty()) report.first_failure = part.first_failure;
  }
  return report;
}

}  // namespace invar
