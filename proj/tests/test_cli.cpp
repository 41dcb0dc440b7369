#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

// Runs the installed binary (path in INVAR_BIN) through the shell and
// captures stdout; stderr passes through unless redirected in `args`.
RunResult run_cli(const std::string& args) {
  const char* bin = std::getenv("INVAR_BIN");
  REQUIRE(bin != nullptr);
  std::string cmd = std::string("\"") + bin + "\" " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string scratch_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

const std::string& tiny_db() {
  static const std::string path = [] {
    std::string p = scratch_path("invar_cli_tiny.db");
    RunResult r = run_cli("build-db --out \"" + p + "\" --max-inv 2 --max-dual 1 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    return p;
  }();
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("counts subcommand reproduces the class tables", "[cli]") {
  RunResult i = run_cli("counts --kind I --through 4 2>/dev/null");
  REQUIRE(i.exit_code == 0);
  REQUIRE(i.out == "1 4 13 57\n");

  RunResult d = run_cli("counts --kind D --through 3 2>/dev/null");
  REQUIRE(d.exit_code == 0);
  REQUIRE(d.out == "1 5 35\n");

  RunResult c = run_cli("counts --kind I --through 3 --column connected 2>/dev/null");
  REQUIRE(c.exit_code == 0);
  REQUIRE(c.out == "1 3 9\n");
}

TEST_CASE("enumerate lists a census with stable numbering", "[cli]") {
  RunResult r = run_cli("enumerate --kind I --degree 2 --json 2>/dev/null");
  REQUIRE(r.exit_code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(j["warnings"].empty());
  const auto& res = j["result"];
  REQUIRE(res["classes"] == 4);
  REQUIRE(res["connected"] == 3);
  REQUIRE(res["total_matchings"] == 105);
  REQUIRE(res["entries"].size() == 4);
  REQUIRE(res["entries"][0]["reducible"] == true);
  REQUIRE(res["entries"][1]["id"] == "I[2,1]");

  RunResult text = run_cli("enumerate --kind I --degree 2 2>/dev/null");
  REQUIRE(text.exit_code == 0);
  REQUIRE(text.out.find("product") != std::string::npos);
  REQUIRE(text.out.find("I[2,3]") != std::string::npos);
  REQUIRE(text.out.find("# classes 4 connected 3") != std::string::npos);
}

TEST_CASE("database lifecycle works through the command line", "[cli]") {
  const std::string& db = tiny_db();
  REQUIRE(std::filesystem::exists(db));

  RunResult certify = run_cli("certify --db \"" + db + "\" --trials 1 2>/dev/null");
  REQUIRE(certify.exit_code == 0);
  REQUIRE(certify.out.find("ok:") == 0);

  RunResult dual = run_cli("simplify --db \"" + db +
                           "\" --expr 'R[a,b,c,d]*epsilon[-a,-b,-c,-d]' 2>/dev/null");
  REQUIRE(dual.exit_code == 0);
  REQUIRE(dual.out == "0\n");

  RunResult trace =
      run_cli("simplify --db \"" + db + "\" --expr '1/3*R[a,b,-a,-b]' --out inv 2>/dev/null");
  REQUIRE(trace.exit_code == 0);
  REQUIRE(trace.out == "1/3*I[1,1]\n");

  RunResult ricci =
      run_cli("simplify --db \"" + db + "\" --expr '1/3*R[a,b,-a,-b]' 2>/dev/null");
  REQUIRE(ricci.out == "1/3 * R[]\n");

  RunResult basis = run_cli("basis --db \"" + db + "\" --json 2>/dev/null");
  REQUIRE(basis.exit_code == 0);
  nlohmann::json jb = nlohmann::json::parse(basis.out);
  REQUIRE(jb["result"]["rows"].size() == 3);
  REQUIRE(jb["result"]["rows"][0]["id"] == "I[1,1]");

  RunResult grown = run_cli("build-db --out \"" + db + ".grown\" --extend \"" + db +
                            "\" --max-dual 2 2>/dev/null");
  REQUIRE(grown.exit_code == 0);
  RunResult counts = run_cli("counts --kind D --through 2 --column signature --db \"" + db +
                             ".grown\" 2>/dev/null");
  REQUIRE(counts.exit_code == 0);
  REQUIRE(counts.out == "0 1\n");
}

TEST_CASE("named invariant expansions fit the database or warn", "[cli]") {
  const std::string& db = tiny_db();
  RunResult all = run_cli("nk --all --db \"" + db + "\" --json 2>/dev/null");
  REQUIRE(all.exit_code == 0);
  nlohmann::json j = nlohmann::json::parse(all.out);
  REQUIRE(j["result"]["expansions"].size() == 3);
  REQUIRE(j["result"]["expansions"][0]["name"] == "I1");
  REQUIRE(j["warnings"].size() == 11);

  RunResult one = run_cli("nk --name I2 --db \"" + db + "\" 2>/dev/null");
  REQUIRE(one.exit_code == 0);
  REQUIRE(one.out == "I2 = I[2,1]\n");

  RunResult big = run_cli("nk --name K3 --db \"" + db + "\" 2>/dev/null");
  REQUIRE(big.exit_code == 1);
}

TEST_CASE("the INVAR_DB variable supplies the default database", "[cli]") {
  const std::string& db = tiny_db();
  setenv("INVAR_DB", db.c_str(), 1);
  RunResult r = run_cli("simplify --expr 'R[a,b,-a,-b]' --out inv 2>/dev/null");
  unsetenv("INVAR_DB");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out == "I[1,1]\n");
}

TEST_CASE("exit codes distinguish usage from domain errors", "[cli]") {
  REQUIRE(run_cli("bogus 2>/dev/null").exit_code == 2);
  REQUIRE(run_cli("2>/dev/null").exit_code == 2);
  REQUIRE(run_cli("simplify 2>/dev/null").exit_code == 2);
  REQUIRE(run_cli("enumerate --kind X --degree 1 2>/dev/null").exit_code == 1);
  REQUIRE(run_cli("simplify --expr 'R[a,b]' --db \"" + tiny_db() + "\" 2>/dev/null").exit_code == 1);
  REQUIRE(run_cli("certify --db /nonexistent.db 2>/dev/null").exit_code == 1);
  REQUIRE(run_cli("enumerate --degree 1 2>/dev/null").exit_code == 2);
}

TEST_CASE("outputs are byte identical for a fixed seed", "[cli]") {
  std::string args = "enumerate --kind I --degree 3 --mode random --seed 11 --min-window 3000 "
                     "--json 2>/dev/null";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  REQUIRE(a.out == b.out);
  nlohmann::json j = nlohmann::json::parse(a.out);
  REQUIRE(j["result"]["classes"] == 13);

  std::string f1 = scratch_path("invar_cli_det1.db");
  std::string f2 = scratch_path("invar_cli_det2.db");
  std::string build = "--max-inv 2 --max-dual 1 --census-slots 6 --min-window 4000 "
                      "--dimensional-slots 6 --dimensional-window 500 --seed 3 2>/dev/null";
  REQUIRE(run_cli("build-db --out \"" + f1 + "\" " + build).exit_code == 0);
  REQUIRE(run_cli("build-db --out \"" + f2 + "\" " + build).exit_code == 0);
  REQUIRE(slurp(f1) == slurp(f2));
}
