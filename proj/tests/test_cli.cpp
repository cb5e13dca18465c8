#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cph/cli.hpp"

using namespace cph;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string netlist(const std::string& name) { return std::string(CPH_SOURCE_DIR) + "/netlists/" + name; }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TEST_CASE("check reports A1 violations with a witness") {
  const Run r = run({"check", netlist("dup_v.net")});
  CHECK(r.code == kExitAnalysisFailure);
  CHECK(r.out.find("V-loop: V1 V2") != std::string::npos);
  const Run ok = run({"check", netlist("p8by5.net")});
  CHECK(ok.code == kExitOk);
  const json j = json::parse(run({"check", netlist("dup_v.net"), "--json"}).out);
  CHECK(j["a1"] == false);
  CHECK(j["a2"] == true);
  CHECK(j["witnesses"][0]["kind"] == "V-loop");
  CHECK(j["witnesses"][0]["labels"] == json::array({"V1", "V2"}));
}

TEST_CASE("analyze JSON has the documented keys") {
  const Run r = run({"analyze", netlist("p8by5.net"), "--json"});
  REQUIRE(r.code == kExitOk);
  const json j = json::parse(r.out);
  for (const char* key : {"nodes", "edges", "well_posedness", "tree", "partition_sizes", "structure", "jacobian", "dof",
                          "index", "sa_amenable"})
    CHECK(j.contains(key));
  for (const char* key : {"rows", "cols", "sigma", "offsets", "hvt", "dof", "index", "classified_index", "det_J",
                          "det_JC", "det_JL", "det_JG"})
    CHECK(j["structure"].contains(key));
  CHECK(j["dof"] == 2);
  CHECK(j["index"] == 2);
  CHECK(j["sa_amenable"] == true);
  CHECK(j["tree"]["T"] == json::array({"R1", "V2", "C3", "L4"}));
  CHECK(j["structure"]["sigma"][0][2] == "-inf");
  CHECK(j["structure"]["offsets"]["c"] == json::array({1, 0, 1, 0, 0, 0}));
  CHECK(j["structure"]["det_J"].get<double>() == Catch::Approx(32.8024).epsilon(1e-5));
}

TEST_CASE("tree, sigma and index subcommands") {
  const json tree = json::parse(run({"tree", netlist("p8by5.net"), "--json"}).out);
  CHECK(tree["N"] == json::array({"R5", "C6", "L7", "I8"}));
  CHECK(tree["F"][3] == json::array({-1, 0, 0, 1}));
  CHECK(tree["partition"]["C"] == json::array({"C6"}));
  const json sigma = json::parse(run({"sigma", netlist("p8by5.net"), "--json"}).out);
  CHECK(sigma["hvt_value"] == 2);
  const Run idx = run({"index", netlist("lc.net")});
  CHECK(idx.code == kExitOk);
  CHECK(idx.out.find("index 0") != std::string::npos);
  const Run text = run({"analyze", netlist("series_rlc.net")});
  CHECK(text.code == kExitOk);
  CHECK(text.out.find("SA-amenable") != std::string::npos);
}

TEST_CASE("simulate RC matches exponential decay") {
  const Run r = run({"simulate", netlist("rc.net"), "--t1", "5", "--tol", "1e-10"});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::string header, line, last;
  std::getline(in, header);
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  const auto cols = split(header);
  const auto vals = split(last);
  REQUIRE(cols.size() == vals.size());
  CHECK(cols.front() == "time");
  CHECK(cols.back() == "H");
  const auto q = std::find(cols.begin(), cols.end(), "x_C2") - cols.begin();
  REQUIRE(q < static_cast<long>(cols.size()));
  CHECK(std::stod(vals[0]) == 5.0);
  CHECK(std::stod(vals[static_cast<std::size_t>(q)]) == Catch::Approx(std::exp(-5.0)).epsilon(1e-7));
  CHECK(std::find(cols.begin(), cols.end(), "v_R1") != cols.end());
  CHECK(std::find(cols.begin(), cols.end(), "i_C2") != cols.end());
}

TEST_CASE("simulate with the nodal reference and CSV output") {
  const auto path = std::filesystem::temp_directory_path() / "cph_cli_test.csv";
  const Run r = run({"simulate", netlist("p8by5.net"), "--t1", "2", "--oracle", "--csv", path.string(), "--samples", "21"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.empty());
  CHECK(r.err.find("relative") != std::string::npos);
  std::ifstream f(path);
  int lines = 0;
  for (std::string line; std::getline(f, line);) ++lines;
  CHECK(lines == 22);
  std::filesystem::remove(path);
  const Run coupled = run({"simulate", netlist("coupled.net"), "--coupling", netlist("coupled.json"), "--t1", "1", "--oracle"});
  CHECK(coupled.code == kExitOk);
}

TEST_CASE("codegen writes the residual function") {
  const Run r = run({"codegen", netlist("p8by5.net"), "--name", "P8by5"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("// Function to specify circuit P8by5 for DAETS") != std::string::npos);
  const Run coupled = run({"codegen", netlist("coupled.net"), "--coupling", netlist("coupled.json")});
  CHECK(coupled.code == kExitAnalysisFailure);
}

TEST_CASE("selftest passes") {
  const Run r = run({"selftest", "--random", "20"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
  const json j = json::parse(run({"selftest", "--json"}).out);
  CHECK(j["failures"] == 0);
}

TEST_CASE("exit codes for usage and input errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({"simulate", netlist("rc.net"), "--t1", "-1"}).code == kExitUsage);
  CHECK(run({"simulate", netlist("rc.net"), "--s0", "1,2"}).code != kExitOk);
  CHECK(run({"check", netlist("missing.net")}).code == kExitUsage);
  const auto bad = std::filesystem::temp_directory_path() / "cph_cli_bad.net";
  {
    std::ofstream(bad) << "R1 1 2 1\nR2 2 2 1\n";
  }
  const Run r = run({"check", bad.string()});
  CHECK(r.code == kExitAnalysisFailure);
  CHECK(r.err.find("line 2") != std::string::npos);
  std::filesystem::remove(bad);
  CHECK(run({"--help"}).code == kExitOk);
}
