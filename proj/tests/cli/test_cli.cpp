#include "proofdoor/chunking.hpp"
#include "proofdoor/cnf.hpp"
#include "proofdoor/proofdoor.hpp"
#include "families.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace proofdoor;

namespace {

const std::string kTool = PROOFDOOR_TOOL;
const fs::path kFixtures = PROOFDOOR_FIXTURES;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("proofdoor_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun run(const std::string &args) {
    fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    std::string cmd = kTool + " " + args + " >" + out.string() + " 2>" +
                      err.string();
    int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string tmp(const std::string &name) const {
    return (dir_ / name).string();
  }
  static std::string fx(const std::string &name) {
    return (kFixtures / name).string();
  }
  void write(const std::string &name, const std::string &text) const {
    std::ofstream(dir_ / name) << text;
  }

  fs::path dir_;
};

} // namespace

TEST_F(CliTest, ProofdoorOnChainMatchesLibrary) {
  CliRun r = run("proofdoor " + fx("chain.cnf") + " --chunks " +
              fx("chain.chunks.json") + " -o " + tmp("pd"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  Proofdoor pd = read_proofdoor_archive(tmp("pd"));
  ASSERT_EQ(pd.interpolants.size(), 2u);
  EXPECT_EQ(pd.interpolants[0].clauses(), std::vector<Clause>{Clause{1}});
  EXPECT_EQ(pd.interpolants[1].clauses(), std::vector<Clause>{Clause{2}});
  ChunkedFormula cf =
      build_chunked(read_dimacs_file(fx("chain.cnf")),
                    read_chunk_spec_file(fx("chain.chunks.json")));
  Proofdoor lib = strongest_proofdoor(cf);
  for (std::size_t j = 0; j < 2; ++j)
    EXPECT_TRUE(same_clause_multiset(pd.interpolants[j], lib.interpolants[j]));
  json run_manifest = json::parse(slurp(tmp("pd") + "/run.json"));
  EXPECT_EQ(run_manifest["command"], "proofdoor");
  EXPECT_EQ(run_manifest["exit_code"], 0);
  EXPECT_EQ(run_manifest["inputs"].size(), 2u);
}

TEST_F(CliTest, ProofdoorAllKindsWritesThreeArchives) {
  CliRun r = run("proofdoor " + fx("gadget.cnf") + " --chunks " +
              fx("gadget.chunks.json") + " --kind all -o " + tmp("pd"));
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char *k : {"strongest", "mcmillan", "weakest"}) {
    Proofdoor pd = read_proofdoor_archive(tmp("pd") + "/" + k);
    EXPECT_TRUE(pd.valid()) << k;
  }
}

TEST_F(CliTest, ProofdoorExitCodes) {
  write("sat.cnf", "p cnf 2 2\n1 2 0\n-1 0\n");
  write("sat.json", R"({"mode":"clause-ranges","ranges":[[0,1],[1,2]]})");
  EXPECT_EQ(run("proofdoor " + tmp("sat.cnf") + " --chunks " +
                tmp("sat.json") + " -o " + tmp("a"))
                .code,
            4);
  EXPECT_EQ(run("proofdoor " + fx("chain.cnf") + " --chunks " +
                tmp("missing.json") + " -o " + tmp("b"))
                .code,
            2);
  EXPECT_EQ(run("proofdoor " + fx("chain.cnf") + " -o " + tmp("c")).code, 2);
  write("bad.json", R"({"mode":"clause-ranges","ranges":[[0,1]]})");
  EXPECT_EQ(run("proofdoor " + fx("chain.cnf") + " --chunks " +
                tmp("bad.json") + " -o " + tmp("d"))
                .code,
            2);
  write("broken.cnf", "p cnf 2 1\n1 x 0\n");
  EXPECT_EQ(run("proofdoor " + tmp("broken.cnf") + " --chunks " +
                fx("chain.chunks.json") + " -o " + tmp("e"))
                .code,
            2);
}

TEST_F(CliTest, ProofdoorBlowupExitsThree) {
  // Weakest interpolants of this cut need the negation of a wide clause
  // distributed over many binary clauses.
  std::ostringstream cnf;
  cnf << "p cnf 24 15\n-1 0\n-2 0\n";
  for (int v = 1; v <= 24; ++v)
    cnf << v << ' ';
  cnf << "0\n";
  for (int i = 0; i < 12; ++i)
    cnf << 2 * i + 1 << ' ' << 2 * i + 2 << " 0\n";
  write("wide.cnf", cnf.str());
  write("wide.json", R"({"mode":"clause-ranges","ranges":[[0,3],[3,15]]})");
  CliRun r = run("proofdoor " + tmp("wide.cnf") + " --chunks " +
              tmp("wide.json") + " --kind weakest --max-clauses 1000 -o " +
              tmp("pd"));
  EXPECT_EQ(r.code, 3) << r.err;
  json m = json::parse(slurp(tmp("pd") + "/manifest.json"));
  EXPECT_EQ(m["complete"], false);
  EXPECT_EQ(m["cuts"][0]["status"], "blowup");
}

TEST_F(CliTest, AbsorbChainEndToEnd) {
  ASSERT_EQ(run("proofdoor " + fx("gadget.cnf") + " --chunks " +
                fx("gadget.chunks.json") + " -o " + tmp("pd"))
                .code,
            0);
  CliRun r = run("absorb " + fx("gadget.cnf") + " --chunks " +
              fx("gadget.chunks.json") + " --proofdoor " + tmp("pd") +
              " --solve -o " + tmp("ab"));
  ASSERT_EQ(r.code, 0) << r.err;
  json s = json::parse(slurp(tmp("ab") + "/score.json"));
  EXPECT_GE(s["score"].get<double>(), 0.99);
  EXPECT_EQ(s["rows"], 9);
  EXPECT_EQ(s["cols"], 8);
  EXPECT_TRUE(fs::exists(tmp("ab") + "/heatmap.svg"));

  // The same trace through a file, and with several workers.
  ASSERT_EQ(run("solve " + fx("gadget.cnf") + " --drat " + tmp("g.drat")).code,
            0);
  CliRun d = run("absorb " + fx("gadget.cnf") + " --chunks " +
              fx("gadget.chunks.json") + " --proofdoor " + tmp("pd") +
              " --drat " + tmp("g.drat") + " -j 3 -o " + tmp("ab3"));
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(slurp(tmp("ab") + "/heatmap.csv"),
            slurp(tmp("ab3") + "/heatmap.csv"));
}

TEST_F(CliTest, AbsorbAllAbsorbedDoorGivesOnes) {
  // The chain refutes by unit propagation, so every prefix absorbs all.
  ASSERT_EQ(run("proofdoor " + fx("chain.cnf") + " --chunks " +
                fx("chain.chunks.json") + " -o " + tmp("pd"))
                .code,
            0);
  CliRun r = run("absorb " + fx("chain.cnf") + " --chunks " +
              fx("chain.chunks.json") + " --proofdoor " + tmp("pd") +
              " --solve -o " + tmp("ab"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(tmp("ab") + "/heatmap.csv"),
            "prefix,I_1,I_2\nPi_0,1,1\nPi_1,1,1\nPi_2,1,1\n");
}

TEST_F(CliTest, AbsorbRejectsForeignTrace) {
  ASSERT_EQ(run("proofdoor " + fx("gadget.cnf") + " --chunks " +
                fx("gadget.chunks.json") + " -o " + tmp("pd"))
                .code,
            0);
  // Line 3 claims a clause the gadget formula does not imply by RUP.
  write("foreign.drat", "c from another formula\n2 0\n-7 0\n0\n");
  CliRun r = run("absorb " + fx("gadget.cnf") + " --chunks " +
              fx("gadget.chunks.json") + " --proofdoor " + tmp("pd") +
              " --drat " + tmp("foreign.drat") + " -o " + tmp("ab"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  // Neither --drat nor --solve.
  EXPECT_EQ(run("absorb " + fx("gadget.cnf") + " --chunks " +
                fx("gadget.chunks.json") + " --proofdoor " + tmp("pd") +
                " -o " + tmp("x"))
                .code,
            2);
  // Archive that does not fit the chunking.
  ASSERT_EQ(run("proofdoor " + fx("chain.cnf") + " --chunks " +
                fx("chain.chunks.json") + " -o " + tmp("small"))
                .code,
            0);
  EXPECT_EQ(run("absorb " + fx("gadget.cnf") + " --chunks " +
                fx("gadget.chunks.json") + " --proofdoor " + tmp("small") +
                " --solve -o " + tmp("y"))
                .code,
            2);
}

TEST_F(CliTest, ClassifyFixtures) {
  CliRun r = run("classify " + fx("timings.csv") + " --plot -o " + tmp("cl"));
  ASSERT_EQ(r.code, 0) << r.err;
  json rep = json::parse(slurp(tmp("cl") + "/report.json"));
  std::map<std::string, std::string> label;
  for (const auto &f : rep["families"])
    label[f["family"]] = f["label"];
  EXPECT_EQ(label["lin"], "linear");
  EXPECT_EQ(label["short"], "unknown");
  EXPECT_EQ(label["cut"], "exponential");
  EXPECT_TRUE(fs::exists(tmp("cl") + "/lin.svg"));

  CliRun p = run("classify " + fx("bifurcated.csv") + " --parity -o " +
              tmp("bi") + " --json-to-stdout");
  ASSERT_EQ(p.code, 0) << p.err;
  json out = json::parse(p.out);
  EXPECT_EQ(out["families"][0]["parity_labels"]["odd"], "exponential");
  EXPECT_EQ(out["families"][0]["parity_labels"]["even"], "linear");
}

TEST_F(CliTest, ClassifySchemaErrorNamesRow) {
  CliRun r = run("classify " + fx("bad.csv") + " -o " + tmp("cl"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(CliTest, ClassifyJobsMatchSequential) {
  ASSERT_EQ(run("classify " + fx("timings.csv") + " -o " + tmp("a")).code, 0);
  ASSERT_EQ(
      run("classify " + fx("timings.csv") + " -j 3 -o " + tmp("b")).code, 0);
  EXPECT_EQ(slurp(tmp("a") + "/report.json"), slurp(tmp("b") + "/report.json"));
}

TEST_F(CliTest, ScrambleDeterministicAndReversible) {
  for (const char *name : {"s1.cnf", "s2.cnf"})
    ASSERT_EQ(run("scramble " + fx("gadget.cnf") +
                  " --kind by-iteration --seed 11 --chunks " +
                  fx("gadget.chunks.json") + " -o " + tmp(name))
                  .code,
              0);
  EXPECT_EQ(slurp(tmp("s1.cnf")), slurp(tmp("s2.cnf")));
  EXPECT_EQ(slurp(tmp("s1.cnf.scramble.json")),
            slurp(tmp("s2.cnf.scramble.json")));
  ASSERT_TRUE(fs::exists(tmp("s1.cnf.chunks.json")));

  CnfFormula orig = read_dimacs_file(fx("gadget.cnf"));
  CnfFormula scr = read_dimacs_file(tmp("s1.cnf"));
  EXPECT_TRUE(same_clause_multiset(orig, scr));

  // The emitted chunk map reproduces the original proofdoor.
  ASSERT_EQ(run("proofdoor " + tmp("s1.cnf") + " --chunks " +
                tmp("s1.cnf.chunks.json") + " -o " + tmp("pd"))
                .code,
            0);

  ASSERT_EQ(run("scramble " + tmp("s1.cnf") + " --undo " +
                tmp("s1.cnf.scramble.json") + " -o " + tmp("u.cnf"))
                .code,
            0);
  EXPECT_EQ(read_dimacs_file(tmp("u.cnf")), orig);
}

TEST_F(CliTest, ScrambleEdgeCases) {
  write("one.cnf", "p cnf 3 1\n3 -1 2 0\n");
  ASSERT_EQ(run("scramble " + tmp("one.cnf") +
                " --kind by-clause --seed 5 -o " + tmp("o.cnf"))
                .code,
            0);
  EXPECT_EQ(read_dimacs_file(tmp("o.cnf")), read_dimacs_file(tmp("one.cnf")));
  EXPECT_FALSE(fs::exists(tmp("o.cnf.chunks.json")));
  EXPECT_EQ(run("scramble " + fx("gadget.cnf") +
                " --kind by-iteration --seed 5 -o " + tmp("x.cnf"))
                .code,
            2);
  EXPECT_EQ(run("scramble " + fx("gadget.cnf") + " --kind by-row -o " +
                tmp("y.cnf"))
                .code,
            2);
  // Record for a different formula.
  EXPECT_EQ(run("scramble " + fx("gadget.cnf") + " --undo " +
                tmp("o.cnf.scramble.json") + " -o " + tmp("z.cnf"))
                .code,
            2);
}

TEST_F(CliTest, ValidateItp) {
  write("a.cnf", "p cnf 2 2\n1 0\n-1 2 0\n");
  write("b.cnf", "p cnf 2 1\n-2 0\n");
  write("good.cnf", "p cnf 2 1\n2 0\n");
  write("bad.cnf", "p cnf 2 1\n-2 0\n");
  EXPECT_EQ(run("validate-itp --a " + tmp("a.cnf") + " --b " + tmp("b.cnf") +
                " --itp " + tmp("good.cnf"))
                .code,
            0);
  CliRun bad = run("validate-itp --a " + tmp("a.cnf") + " --b " + tmp("b.cnf") +
                " --itp " + tmp("bad.cnf") + " --json-to-stdout");
  EXPECT_EQ(bad.code, 4);
  EXPECT_EQ(json::parse(bad.out)["a_implies_i"], "false");

  ASSERT_EQ(run("proofdoor " + fx("gadget.cnf") + " --chunks " +
                fx("gadget.chunks.json") + " -o " + tmp("pd"))
                .code,
            0);
  EXPECT_EQ(run("validate-itp " + fx("gadget.cnf") + " --chunks " +
                fx("gadget.chunks.json") + " --proofdoor " + tmp("pd"))
                .code,
            0);
  EXPECT_EQ(run("validate-itp --a " + tmp("a.cnf")).code, 2);
}

TEST_F(CliTest, SolveStatusesAndBudget) {
  CliRun u = run("solve " + fx("chain.cnf") + " --json-to-stdout");
  ASSERT_EQ(u.code, 0);
  EXPECT_EQ(json::parse(u.out)["status"], "UNSAT");
  write("sat.cnf", "p cnf 2 1\n1 -2 0\n");
  CliRun s = run("solve " + tmp("sat.cnf") + " --json-to-stdout");
  ASSERT_EQ(s.code, 0);
  EXPECT_EQ(json::parse(s.out)["status"], "SAT");

  std::ostringstream php;
  auto lits = proofdoor::testing::pigeonhole(6);
  php << "p cnf 42 " << lits.size() << '\n';
  for (const Clause &c : lits) {
    for (Lit l : c)
      php << l.to_dimacs() << ' ';
    php << "0\n";
  }
  write("php.cnf", php.str());
  EXPECT_EQ(run("solve " + tmp("php.cnf") + " --conflict-budget 5").code, 3);
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  write("cfg.toml", "[proofdoor]\nkind=weakest\n");
  ASSERT_EQ(run("--config " + tmp("cfg.toml") + " proofdoor " +
                fx("chain.cnf") + " --chunks " + fx("chain.chunks.json") +
                " -o " + tmp("a"))
                .code,
            0);
  EXPECT_EQ(json::parse(slurp(tmp("a") + "/manifest.json"))["kind"],
            "weakest");
  ASSERT_EQ(run("--config " + tmp("cfg.toml") + " proofdoor " +
                fx("chain.cnf") + " --chunks " + fx("chain.chunks.json") +
                " --kind mcmillan -o " + tmp("b"))
                .code,
            0);
  EXPECT_EQ(json::parse(slurp(tmp("b") + "/manifest.json"))["kind"],
            "mcmillan");
  write("typo.toml", "[proofdoor]\nkinds=weakest\n");
  EXPECT_EQ(run("--config " + tmp("typo.toml") + " proofdoor " +
                fx("chain.cnf") + " --chunks " + fx("chain.chunks.json") +
                " -o " + tmp("c"))
                .code,
            2);
}

TEST_F(CliTest, ReportCollectsArtifacts) {
  ASSERT_EQ(run("proofdoor " + fx("gadget.cnf") + " --chunks " +
                fx("gadget.chunks.json") + " -o " + tmp("pd"))
                .code,
            0);
  ASSERT_EQ(run("absorb " + fx("gadget.cnf") + " --chunks " +
                fx("gadget.chunks.json") + " --proofdoor " + tmp("pd") +
                " --solve -o " + tmp("ab"))
                .code,
            0);
  ASSERT_EQ(run("classify " + fx("timings.csv") + " -o " + tmp("cl")).code,
            0);
  CliRun r = run("report " + tmp("pd") + " " + tmp("ab") + " " + tmp("cl") +
              " -o " + tmp("summary.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(slurp(tmp("summary.json")));
  ASSERT_EQ(j["runs"].size(), 3u);
  EXPECT_EQ(j["runs"][0]["proofdoor"]["params"]["c"], 1);
  EXPECT_GE(j["runs"][1]["absorption"]["score"].get<double>(), 0.99);
  EXPECT_EQ(j["runs"][2]["scaling"]["families"].size(), 3u);
  EXPECT_NE(slurp(tmp("summary.md")).find("incrementality score"),
            std::string::npos);
  EXPECT_EQ(run("report " + tmp("nope") + " -o " + tmp("x.json")).code, 2);
}

TEST_F(CliTest, StdoutSilentByDefault) {
  CliRun r = run("classify " + fx("timings.csv") + " -o " + tmp("cl"));
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(r.err.empty());
  CliRun q = run("-q classify " + fx("timings.csv") + " -o " + tmp("cl2"));
  EXPECT_TRUE(q.err.empty());
}
