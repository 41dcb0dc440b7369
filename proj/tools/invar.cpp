// Command-line driver: enumeration, database build, certification and
// simplification of curvature invariants.
//
// Exit codes: 0 success, 1 domain error (bad input, failed certification,
// missing database), 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "invar/simplify.hpp"

using namespace invar;
using nlohmann::json;

namespace {

struct Output {
  bool as_json = false;
  json result;
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }

  // Text mode prints result lines directly; json mode buffers everything.
  void line(const std::string& s) {
    if (!as_json) std::cout << s << "\n";
  }

  void flush() {
    if (as_json) {
      json wrapper;
      wrapper["result"] = result;
      wrapper["warnings"] = warnings;
      std::cout << wrapper.dump(2) << "\n";
    } else {
      for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
    }
  }
};

InvKind parse_kind(const std::string& s) {
  if (s == "I") return InvKind::I;
  if (s == "D") return InvKind::D;
  throw std::invalid_argument("kind must be I or D");
}

Database load_db(const std::string& flag) {
  std::string path = flag;
  if (path.empty())
    if (const char* env = std::getenv("INVAR_DB")) path = env;
  if (path.empty())
    throw std::runtime_error("no database given: pass --db FILE or set INVAR_DB");
  return load_database_file(path);
}

std::map<Shape, Census> censuses_through(InvKind kind, int degree, const std::string& mode,
                                         std::uint64_t seed, std::uint64_t window_factor,
                                         std::uint64_t min_window, std::uint64_t max_samples,
                                         CanonicalizerCache& cache) {
  RandomCensusOptions ropt;
  ropt.seed = seed;
  ropt.window_factor = window_factor;
  ropt.min_window = min_window;
  ropt.max_samples = max_samples == 0 ? UINT64_MAX : max_samples;
  int slot_limit = mode == "exhaustive" ? 8 * max_points : mode == "random" ? 0 : 16;
  int max_inv = kind == InvKind::I ? degree : degree - 1;
  int max_dual = kind == InvKind::D ? degree : 0;
  return census_table(max_inv, max_dual, ropt, cache, slot_limit);
}

int run_enumerate(Output& out, const std::string& kind_text, int degree, const std::string& mode,
                  std::uint64_t seed, std::uint64_t window_factor, std::uint64_t min_window,
                  std::uint64_t max_samples) {
  InvKind kind = parse_kind(kind_text);
  CanonicalizerCache cache;
  auto table =
      censuses_through(kind, degree, mode, seed, window_factor, min_window, max_samples, cache);
  const Census& census = table.at(Shape(kind, degree));

  json entries = json::array();
  int connected = 0;
  for (std::size_t k = 0; k < census.entries.size(); ++k) {
    const ClassEntry& e = census.entries[k];
    std::string id;
    if (!e.reducible) id = InvariantId{kind, degree, ++connected}.to_string();
    if (out.as_json) {
      json row;
      row["index"] = k + 1;
      row["config"] = e.rep.to_cycles();
      row["reducible"] = e.reducible;
      if (id.empty())
        row["id"] = nullptr;
      else
        row["id"] = id;
      entries.push_back(row);
    } else {
      out.line(std::to_string(k + 1) + "  " + e.rep.to_cycles() + "  " +
               (e.reducible ? "product" : "connected") + (id.empty() ? "" : "  " + id));
    }
  }
  out.result["kind"] = kind_text;
  out.result["degree"] = degree;
  out.result["classes"] = census.entries.size();
  out.result["connected"] = connected;
  out.result["zero_matchings"] = census.zero_matchings;
  out.result["total_matchings"] = census.total_matchings;
  if (census.samples) out.result["samples"] = census.samples;
  out.result["entries"] = std::move(entries);
  if (!out.as_json) {
    std::string summary = "# classes " + std::to_string(census.entries.size()) + " connected " +
                          std::to_string(connected) + " matchings " +
                          std::to_string(census.total_matchings);
    if (census.samples) summary += " samples " + std::to_string(census.samples);
    out.line(summary);
  }
  return 0;
}

int run_counts(Output& out, const std::string& kind_text, int through, const std::string& column,
               const std::string& db_path, const std::string& mode, std::uint64_t seed,
               std::uint64_t window_factor, std::uint64_t min_window) {
  InvKind kind = parse_kind(kind_text);
  std::vector<std::size_t> counts;
  if (column == "classes" || column == "connected") {
    CanonicalizerCache cache;
    auto table = censuses_through(kind, through, mode, seed, window_factor, min_window, 0, cache);
    for (int d = 1; d <= through; ++d) {
      const Census& c = table.at(Shape(kind, d));
      counts.push_back(column == "classes" ? c.entries.size()
                                           : static_cast<std::size_t>(c.irreducible_count()));
    }
  } else {
    Database db = load_db(db_path);
    int pick = column == "connected" ? 0 : column == "cyclic" ? 1 : column == "dimensional" ? 2 : 3;
    for (int d = 1; d <= through; ++d) {
      Shape shape(kind, d);
      if (!db.index.has_shape(shape))
        throw std::runtime_error("database does not cover " + std::string(1, kind_letter(kind)) +
                                 " degree " + std::to_string(d));
      counts.push_back(static_cast<std::size_t>(level_counts(db, shape)[pick]));
    }
  }
  std::string text;
  for (std::size_t c : counts) text += (text.empty() ? "" : " ") + std::to_string(c);
  out.line(text);
  out.result["kind"] = kind_text;
  out.result["through"] = through;
  out.result["column"] = column;
  out.result["counts"] = counts;
  return 0;
}

int run_build_db(Output& out, const std::string& out_path, const std::string& extend_path,
                 DatabaseOptions opt, bool max_inv_given) {
  Database db;
  if (extend_path.empty()) {
    db = build_database(opt);
  } else {
    db = load_database_file(extend_path);
    if (max_inv_given && db.options.max_inv_degree != opt.max_inv_degree)
      throw std::runtime_error("extension keeps the invariant degree range (" +
                               std::to_string(db.options.max_inv_degree) +
                               "); rebuild to change it");
    if (opt.max_dual_degree < db.options.max_dual_degree)
      throw std::runtime_error("database already covers dual degree " +
                               std::to_string(db.options.max_dual_degree));
    for (int d = db.options.max_dual_degree + 1; d <= opt.max_dual_degree; ++d)
      add_dual_shape(db, d);
  }
  save_database_file(db, out_path);
  out.result["file"] = out_path;
  out.result["max_inv"] = db.options.max_inv_degree;
  out.result["max_dual"] = db.options.max_dual_degree;
  out.result["rules"] = {{"cyclic", db.cyclic.size()},
                         {"dimensional", db.dimensional.size()},
                         {"signature", db.signature.size()}};
  out.line("wrote " + out_path + ": cyclic " + std::to_string(db.cyclic.size()) +
           ", dimensional " + std::to_string(db.dimensional.size()) + ", signature " +
           std::to_string(db.signature.size()) + " rules");
  return 0;
}

int run_certify(Output& out, const std::string& db_path, int trials, std::uint64_t seed, int sigma,
                int threads) {
  Database db = load_db(db_path);
  CertificationReport report = certify_database(db, trials, seed, sigma, threads);
  out.result["ok"] = report.ok();
  out.result["checks"] = report.checks;
  out.result["failures"] = report.failures;
  out.result["trials"] = report.trials;
  if (!report.ok()) out.result["first_failure"] = report.first_failure;
  if (report.ok()) {
    out.line("ok: " + std::to_string(report.checks) + " checks");
    return 0;
  }
  out.line("FAILED: " + std::to_string(report.failures) + " of " +
           std::to_string(report.checks) + " checks; first: " + report.first_failure);
  if (out.as_json) out.flush();
  throw std::runtime_error("certification failed");
}

int run_simplify(Output& out, const std::string& db_path, const std::string& expr_text,
                 const std::string& file_path, int level, const std::string& form) {
  std::string text = expr_text;
  if (!file_path.empty()) {
    std::ifstream in(file_path);
    if (!in) throw std::runtime_error("cannot read " + file_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }
  Database db = load_db(db_path);
  SimplifyOutcome o = riemann_simplify(db, text, level);
  for (const std::string& w : o.warnings) out.warn(w);

  std::string rendered;
  if (form == "inv") {
    rendered = o.inv.to_string();
    if (!o.residual.terms.empty()) {
      std::string tail = to_string(o.residual);
      rendered = o.inv.is_zero() ? tail : rendered + " + " + tail;
    }
  } else if (form == "riemann") {
    rendered = to_string(render_riemann(db, o));
  } else {
    rendered = to_string(render_ricci(db, o));
  }
  out.line(rendered);
  out.result["form"] = form;
  out.result["level"] = level;
  out.result["text"] = rendered;
  out.result["inv"] = o.inv.to_string();
  out.result["residual"] = to_string(o.residual);
  out.result["complete"] = o.complete();
  return 0;
}

int run_basis(Output& out, const std::string& db_path, bool table) {
  Database db = load_db(db_path);
  std::vector<BasisRow> rows = independent_basis_table(db);
  json jrows = json::array();
  std::size_t id_width = 2, riemann_width = 12;
  for (const BasisRow& row : rows) {
    id_width = std::max(id_width, row.id.to_string().size());
    riemann_width = std::max(riemann_width, row.riemann_form.size());
  }
  if (table)
    out.line(std::string("id").append(id_width, ' ').substr(0, id_width + 2) +
             std::string("riemann form").append(riemann_width, ' ').substr(0, riemann_width + 2) +
             "ricci form");
  for (const BasisRow& row : rows) {
    if (table) {
      std::string id = row.id.to_string();
      std::string riemann = row.riemann_form;
      id.append(id_width + 2 - id.size(), ' ');
      riemann.append(riemann_width + 2 - riemann.size(), ' ');
      out.line(id + riemann + row.ricci_form);
    } else {
      out.line(row.id.to_string() + "\t" + row.riemann_form + "\t" + row.ricci_form);
    }
    jrows.push_back({{"id", row.id.to_string()},
                     {"riemann", row.riemann_form},
                     {"ricci", row.ricci_form},
                     {"catalogued", row.catalogued}});
  }
  out.result["rows"] = std::move(jrows);
  return 0;
}

int run_nk(Output& out, const std::string& db_path, const std::string& name, bool all, int level) {
  Database db = load_db(db_path);
  json jrows = json::array();
  std::vector<const NamedInvariant*> picks;
  if (all)
    for (const NamedInvariant& row : named_invariant_catalog()) picks.push_back(&row);
  else
    picks.push_back(&named_invariant(name));
  for (const NamedInvariant* row : picks) {
    try {
      InvariantPolynomial p = nk_expand(db, row->name, level);
      out.line(row->name + " = " + p.to_string());
      jrows.push_back({{"name", row->name},
                       {"degree", row->degree},
                       {"definition", row->definition},
                       {"expansion", p.to_string()}});
    } catch (const std::out_of_range&) {
      if (!all) throw std::runtime_error(row->name + " needs invariants of degree " +
                                         std::to_string(row->degree) +
                                         "; the database does not cover that");
      out.warn(row->name + " skipped: needs invariants of degree " + std::to_string(row->degree));
    }
  }
  out.result["level"] = level;
  out.result["expansions"] = std::move(jrows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvature invariant canonicalization and simplification"};
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  app.add_flag("--json", as_json, "wrap output as {\"result\": ..., \"warnings\": [...]}");

  std::string kind = "I", mode = "auto", column = "classes", db_path, out_path, extend_path;
  std::string expr_text, file_path, form = "ricci", nk_name;
  int degree = 1, through = 4, level = Database::max_level, trials = 3, sigma = 0;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  bool table = false, nk_all = false;
  DatabaseOptions opt;
  std::uint64_t seed = opt.seed;
  std::uint64_t window_factor = opt.census_window_factor;
  std::uint64_t min_window = opt.census_min_window;
  std::uint64_t max_samples = 0;

  CLI::App* cmd_enumerate = app.add_subcommand("enumerate", "list one census of invariant classes");
  cmd_enumerate->add_option("--kind", kind, "I or D")->required();
  cmd_enumerate->add_option("--degree", degree, "number of curvature factors")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_enumerate->add_option("--mode", mode, "exhaustive, random or auto")
      ->check(CLI::IsMember({"exhaustive", "random", "auto"}));
  cmd_enumerate->add_option("--seed", seed, "random census seed");
  cmd_enumerate->add_option("--window-factor", window_factor, "idle window per class");
  cmd_enumerate->add_option("--min-window", min_window, "idle window floor");
  cmd_enumerate->add_option("--max-samples", max_samples, "sample budget, 0 for none");

  CLI::App* cmd_counts = app.add_subcommand("counts", "class counts per degree");
  cmd_counts->add_option("--kind", kind, "I or D")->required();
  cmd_counts->add_option("--through", through, "largest degree")->required()->check(CLI::PositiveNumber);
  cmd_counts->add_option("--column", column, "classes, connected, cyclic, dimensional or signature")
      ->check(CLI::IsMember({"classes", "connected", "cyclic", "dimensional", "signature"}));
  cmd_counts->add_option("--db", db_path, "database file (relation columns only)");
  cmd_counts->add_option("--mode", mode, "exhaustive, random or auto")
      ->check(CLI::IsMember({"exhaustive", "random", "auto"}));
  cmd_counts->add_option("--seed", seed, "random census seed");
  cmd_counts->add_option("--window-factor", window_factor, "idle window per class");
  cmd_counts->add_option("--min-window", min_window, "idle window floor");

  CLI::App* cmd_build = app.add_subcommand("build-db", "build or extend a relation database");
  cmd_build->add_option("--out", out_path, "output file")->required();
  cmd_build->add_option("--extend", extend_path, "grow an existing database by dual degrees");
  cmd_build->add_option("--max-inv", opt.max_inv_degree, "largest invariant degree")
      ->check(CLI::PositiveNumber);
  cmd_build->add_option("--max-dual", opt.max_dual_degree, "largest dual degree")
      ->check(CLI::PositiveNumber);
  cmd_build->add_option("--seed", opt.seed, "seed for sampled sweeps");
  cmd_build->add_option("--census-slots", opt.exhaustive_census_slots,
                        "largest slot count enumerated exhaustively");
  cmd_build->add_option("--dimensional-slots", opt.exhaustive_dimensional_slots,
                        "largest slot count swept exhaustively");
  cmd_build->add_option("--window-factor", opt.census_window_factor, "census idle window per class");
  cmd_build->add_option("--min-window", opt.census_min_window, "census idle window floor");
  cmd_build->add_option("--dimensional-window", opt.dimensional_window,
                        "idle window for sampled relation sweeps");

  CLI::App* cmd_certify = app.add_subcommand("certify", "evaluate every stored rule on random geometries");
  cmd_certify->add_option("--db", db_path, "database file (default $INVAR_DB)");
  cmd_certify->add_option("--trials", trials, "geometries per signature frame")->check(CLI::PositiveNumber);
  cmd_certify->add_option("--seed", seed, "sample seed");
  cmd_certify->add_option("--sigma", sigma, "restrict the signature frame")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, int>{{"+1", 1}, {"1", 1}, {"-1", -1}, {"both", 0}}));
  cmd_certify->add_option("--threads", threads, "worker pool size");

  CLI::App* cmd_simplify = app.add_subcommand("simplify", "canonicalize and reduce an expression");
  CLI::Option* opt_expr = cmd_simplify->add_option("--expr", expr_text, "expression text");
  cmd_simplify->add_option("--file", file_path, "read the expression from a file")->excludes(opt_expr);
  cmd_simplify->add_option("--level", level, "1 canonical, 2 cyclic, 3 dimensional, 4 signature")
      ->check(CLI::Range(1, Database::max_level));
  cmd_simplify->add_option("--db", db_path, "database file (default $INVAR_DB)");
  cmd_simplify->add_option("--out", form, "inv, riemann or ricci")
      ->check(CLI::IsMember({"inv", "riemann", "ricci"}));

  CLI::App* cmd_basis = app.add_subcommand("basis", "independent invariants with printed renderings");
  cmd_basis->add_option("--db", db_path, "database file (default $INVAR_DB)");
  cmd_basis->add_flag("--table", table, "aligned columns with a header");

  CLI::App* cmd_nk = app.add_subcommand("nk", "expand classical named invariants");
  CLI::Option* opt_name = cmd_nk->add_option("--name", nk_name, "I1..I4, J1..J4, K1..K6");
  cmd_nk->add_flag("--all", nk_all, "expand every named invariant that fits")->excludes(opt_name);
  cmd_nk->add_option("--level", level, "reduction level")->check(CLI::Range(1, Database::max_level));
  cmd_nk->add_option("--db", db_path, "database file (default $INVAR_DB)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*cmd_simplify && expr_text.empty() && file_path.empty()) {
    std::cerr << "simplify needs --expr or --file\n";
    return 2;
  }
  if (*cmd_nk && !nk_all && nk_name.empty()) {
    std::cerr << "nk needs --name or --all\n";
    return 2;
  }

  Output out;
  out.as_json = as_json;
  try {
    int rc = 0;
    if (*cmd_enumerate)
      rc = run_enumerate(out, kind, degree, mode, seed, window_factor, min_window, max_samples);
    else if (*cmd_counts)
      rc = run_counts(out, kind, through, column, db_path, mode, seed, window_factor, min_window);
    else if (*cmd_build)
      rc = run_build_db(out, out_path, extend_path, opt, cmd_build->count("--max-inv") > 0);
    else if (*cmd_certify)
      rc = run_certify(out, db_path, trials, seed, sigma, threads);
    else if (*cmd_simplify)
      rc = run_simplify(out, db_path, expr_text, file_path, level, form);
    else if (*cmd_basis)
      rc = run_basis(out, db_path, table);
    else if (*cmd_nk)
      rc = run_nk(out, db_path, nk_name, nk_all, level);
    out.flush();
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
