#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kCli = SEPDIST_CLI_PATH;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("sepdist_cli_test_" + std::to_string(std::rand()) + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string command = kCli + " " + args + " >/dev/null 2>/dev/null";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("") == 2);
  CHECK(run("discrete --no-such-flag") == 2);
  CHECK(run("continuous --epsilon 0.1") == 2);  // --alpha missing
  CHECK(run("sweep --epsilon 0.1:0.2") == 2);   // malformed grid
  CHECK(run("continuous --epsilon 0.1 --alpha 1 --t-max banana") == 2);
}

TEST_CASE("discrete command emits the protocol verdicts") {
  TempDir tmp;
  const fs::path out = tmp.path / "discrete.json";
  REQUIRE(run("discrete --format json --out " + out.string()) == 0);

  const json doc = json::parse(slurp(out));
  CHECK(doc.contains("version"));
  CHECK(doc["config"]["command"] == "discrete");
  CHECK(std::abs(doc["prob_outcome_0"].get<double>() - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(doc["extraction_negativity"].get<double>() - (std::sqrt(2.0) - 1.0) / 6.0) <
        1e-10);
  CHECK(doc["steps"]["sigma"]["neg_c_ab"].get<double>() <= 1e-12);
  CHECK(doc["steps"]["tau"]["neg_c_ab"].get<double>() <= 1e-12);
}

TEST_CASE("continuous command writes the five-column trace") {
  TempDir tmp;
  const fs::path out = tmp.path / "trace.csv";
  REQUIRE(run("continuous --epsilon 0.1 --alpha 1.0 --t-max auto --steps 41 --out " +
              out.string()) == 0);
  const std::string text = slurp(out);
  CHECK(text.find("time,neg_c_ab,neg_a_bc,neg_b_ac,neg_ab\n") != std::string::npos);
  CHECK(text.find("# epsilon=0.1") != std::string::npos);

  // every mediator-cut entry is at the eigensolver floor
  std::istringstream lines(text);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 't') continue;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');  // time
    std::getline(cells, cell, ',');  // neg_c_ab
    CHECK(std::stod(cell) <= 1e-10);
    ++rows;
  }
  CHECK(rows == 41);
}

TEST_CASE("identical configurations give byte-identical outputs") {
  TempDir tmp;
  const fs::path first = tmp.path / "a.json";
  const fs::path second = tmp.path / "b.json";
  const std::string args = "channels --samples 32 --seed 777 --format json --out ";
  REQUIRE(run(args + first.string()) == 0);
  REQUIRE(run(args + second.string()) == 0);
  CHECK(slurp(first) == slurp(second));
  CHECK(!slurp(first).empty());

  const fs::path t1 = tmp.path / "t1.csv";
  const fs::path t2 = tmp.path / "t2.csv";
  const std::string targs =
      "continuous --epsilon 0.08 --alpha 0.5 --steps 17 --format csv --out ";
  REQUIRE(run(targs + t1.string()) == 0);
  REQUIRE(run(targs + t2.string()) == 0);
  CHECK(slurp(t1) == slurp(t2));
}

TEST_CASE("sweep command flags feasibility on a tiny grid") {
  TempDir tmp;
  const fs::path out = tmp.path / "sweep.json";
  REQUIRE(run("sweep --epsilon 0.1 --alpha 0:1:2 --steps 41 --format json --out " +
              out.string()) == 0);
  const json doc = json::parse(slurp(out));
  REQUIRE(doc["rows"].size() == 2);
  CHECK(doc["rows"][0]["alpha"] == 0.0);
  CHECK(doc["rows"][0]["sim_feasible"] == false);
  CHECK(doc["rows"][1]["alpha"] == 1.0);
  CHECK(doc["rows"][1]["sim_feasible"] == true);
}

TEST_CASE("nogo command reports a vanishing amplitude") {
  TempDir tmp;
  const fs::path out = tmp.path / "nogo.json";
  REQUIRE(run("nogo --samples 64 --seed 5 --out " + out.string()) == 0);
  const json doc = json::parse(slurp(out));
  CHECK(doc["max_amplitude"].get<double>() <= 1e-12);
  CHECK(doc["vanishes"] == true);
}

TEST_CASE("trotter command reports convergence and the bounce trace") {
  TempDir tmp;
  const fs::path out = tmp.path / "trotter.json";
  REQUIRE(run("trotter --epsilon 0.1 --alpha 1.0 --t-max 10 --n-trotter 32 --out " +
              out.string()) == 0);
  const json doc = json::parse(slurp(out));
  REQUIRE(doc["convergence"].size() == 3);
  const double d0 = doc["convergence"][0]["distance"].get<double>();
  const double d1 = doc["convergence"][1]["distance"].get<double>();
  const double d2 = doc["convergence"][2]["distance"].get<double>();
  CHECK(d0 / d1 > 1.5);
  CHECK(d1 / d2 > 1.5);
  CHECK(doc["bounce"]["neg_c_ab"].size() == 64);
}
