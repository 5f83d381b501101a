#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"

#include "cagraph/io.hpp"

using namespace cagraph;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int status = -1;
  std::string out;
};

// Run the installed binary through the shell, capturing stdout and the exit
// status.  Callers append their own redirections when stderr matters.
CmdResult run(const std::string& args) {
  CmdResult r;
  const std::string cmd = std::string(CAGRAPH_BIN) + " " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int wstatus = pclose(pipe);
  r.status = WIFEXITED(wstatus) ? WEXITSTATUS(wstatus) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("cagraph_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const char* name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("the generate-transform-simulate pipeline reports its artifacts") {
  TempDir d;
  const std::string g = d.file("g.json"), c = d.file("c.json"), p = d.file("p.json");

  const CmdResult gen = run("generate --stencil1d 8,2,2,1 -o " + g + " --cover " + c);
  CHECK(gen.status == 0);
  CHECK(gen.out == "wrote " + g + ": 24 tasks, 44 edges, 2 processors\n" + //
                       "wrote " + c + ": 6 blocks\n");
  CHECK(fs::exists(g));
  CHECK(fs::exists(c));

  const CmdResult tr = run("transform -g " + g + " -b 2 -o " + p);
  CHECK(tr.status == 0);
  CHECK(tr.out == "macro-steps: 1 (block 2)\n"
                  "redundant tasks: 2\n"
                  "messages: 2, elements: 4\n"
                  "wrote " +
                      p + "\n");
  // the written plan is loadable against the written graph
  const TaskGraph graph = load_graph(g);
  CHECK(load_plan(p, graph).block == 2);

  const CmdResult sim = run("simulate -g " + g + " -b 2 --alpha 2 --threads 3");
  CHECK(sim.status == 0);
  CHECK(sim.out ==
        "Graph on node 0,\n"
        "    execution of 1 macro steps:\n"
        "k1 local execution: 0\n"
        "  parallel time: 0\n"
        "k3 receive: 2\n"
        "k2 local execution: 5\n"
        "  parallel time: 2\n"
        "k3 local execution: 4\n"
        "  parallel time: 2\n"
        "total parallel time : 1*(0+2+2) = 4\n"
        "overlap analysis:\n"
        "  2 tasks to recv, 2 k2 parallel time\n"
        "\n"
        "Graph on node 1,\n"
        "    execution of 1 macro steps:\n"
        "k1 local execution: 0\n"
        "  parallel time: 0\n"
        "k3 receive: 2\n"
        "k2 local execution: 5\n"
        "  parallel time: 2\n"
        "k3 local execution: 4\n"
        "  parallel time: 2\n"
        "total parallel time : 1*(0+2+2) = 4\n"
        "overlap analysis:\n"
        "  2 tasks to recv, 2 k2 parallel time\n"
        "\n"
        "combined total parallel time: 4\n");

  const CmdResult js = run("simulate -g " + g + " -b 2 --alpha 2 --threads 3 --json");
  CHECK(js.status == 0);
  const nlohmann::json jt = nlohmann::json::parse(js.out);
  CHECK(jt.at("total") == 4.0);
  CHECK(jt.at("rows").size() == 2);
}

TEST_CASE("validate reports the cover and gates the exit code") {
  TempDir d;
  const std::string g = d.file("g.json"), c = d.file("c.json");
  REQUIRE(run("generate --stencil1d 8,2,2,1 -o " + g + " --cover " + c).status == 0);

  const CmdResult ok = run("validate -g " + g + " -c " + c);
  CHECK(ok.status == 0);
  nlohmann::json rep = nlohmann::json::parse(ok.out);
  CHECK(rep.at("valid") == true);
  CHECK(rep.at("granularity") == 4);
  CHECK(rep.at("overlap_ok") == false);

  // per-level blocks sit one step apart, so the overlap gate trips
  const std::string errfile = d.file("err.txt");
  const CmdResult ov = run("validate -g " + g + " -c " + c + " --overlap 2>" + errfile);
  CHECK(ov.status == 1);
  const std::string err = read_file(errfile);
  CHECK(err.find("overlap: block (k=1, p=0): remote input '(4,0)' of '(3,1)' is only one step "
                 "back\n") != std::string::npos);

  // drop one task from its block: validation fails and says which task
  std::string broken = read_file(c);
  const std::string needle = ",\n        \"(3,1)\"";
  broken.replace(broken.find(needle), needle.size(), "");
  write_file(d.file("broken.json"), broken);
  const CmdResult bad = run("validate -g " + g + " -c " + d.file("broken.json"));
  CHECK(bad.status == 1);
  rep = nlohmann::json::parse(bad.out);
  CHECK(rep.at("valid") == false);
  CHECK(rep.at("violations")[0].at("condition") == 1);
  CHECK(rep.at("violations")[0].at("detail") == "task '(3,1)' not covered by any block");
}

TEST_CASE("usage errors exit 2, computation errors exit 1") {
  TempDir d;
  const std::string g = d.file("g.json");
  REQUIRE(run("generate --stencil1d 8,2,2,1 -o " + g).status == 0);

  CHECK(run("generate --stencil1d 8,2,2,1 2>/dev/null").status == 2);        // missing -o
  CHECK(run("generate --stencil1d 8,2,2,1 -o x --frobnicate 2>/dev/null").status == 2);
  CHECK(run("generate --stencil1d 8,2 -o x 2>/dev/null").status == 2);       // bad arity
  CHECK(run("--help >/dev/null").status == 0);

  const std::string errfile = d.file("err.txt");
  const CmdResult impossible =
      run("generate --stencil1d 2,4,2,1 -o " + d.file("x.json") + " 2>" + errfile);
  CHECK(impossible.status == 1);
  CHECK(read_file(errfile) == "cagraph: cannot spread 2 points over 4 processors\n");

  const CmdResult badb = run("transform -g " + g + " -b 0 -o " + d.file("x.json") + " 2>" + errfile);
  CHECK(badb.status == 1);
  CHECK(read_file(errfile) == "cagraph: block size must be at least 1, got 0\n");
}

TEST_CASE("flags read the environment and explicit flags win") {
  TempDir d;
  const std::string g = d.file("g.json");
  REQUIRE(run("generate --stencil1d 8,2,2,1 -o " + g).status == 0);

  // CA_ALPHA supplies the latency when the flag is absent
  CmdResult r;
  {
    const std::string cmd = "CA_ALPHA=2 " + std::string(CAGRAPH_BIN) + " simulate -g " + g +
                            " -b 2 --threads 3";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    r.status = WEXITSTATUS(pclose(pipe));
  }
  CHECK(r.status == 0);
  CHECK(r.out.find("combined total parallel time: 4\n") != std::string::npos);

  // an explicit --alpha overrides the environment
  CmdResult w;
  {
    const std::string cmd = "CA_ALPHA=999 " + std::string(CAGRAPH_BIN) + " simulate -g " + g +
                            " -b 2 --alpha 2 --threads 3";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) w.out.append(buf, n);
    w.status = WEXITSTATUS(pclose(pipe));
  }
  CHECK(w.status == 0);
  CHECK(w.out.find("combined total parallel time: 4\n") != std::string::npos);
}

TEST_CASE("sweep writes the table and per-latency plot files") {
  TempDir d;
  write_file(d.file("cfg.json"),
             R"({"graph": {"kind": "stencil1d", "points": 8, "procs": 2, "steps": 2,
                 "radius": 1}, "b": [1, 2], "alpha": [0, 10], "threads": [1, 2]})");
  const std::string csv = d.file("s.csv"), plots = (d.path / "plots").string();

  const CmdResult r = run("sweep --config " + d.file("cfg.json") + " -o " + csv + " --gnuplot " +
                          plots);
  CHECK(r.status == 0);
  CHECK(r.out == "wrote " + csv + ": 12 rows\n" +              //
                     "wrote " + plots + "/alpha_0.dat\n" +     //
                     "wrote " + plots + "/alpha_10.dat\n");
  CHECK(load_sweep_csv(csv).rows.size() == 12);
  CHECK(read_file(plots + "/alpha_10.dat") ==
        "# alpha = 10\n"
        "# threads naive blocked_b1 blocked_b2\n"
        "1 28 22 14\n"
        "2 24 22 12\n");
}

TEST_CASE("transform can emit a split drawing next to the plan") {
  TempDir d;
  const std::string g = d.file("g.json");
  REQUIRE(run("generate --stencil1d 8,2,2,1 -o " + g).status == 0);
  const CmdResult r =
      run("transform -g " + g + " -b 2 -o " + d.file("p.json") + " --emit-dot " + d.file("s.dot"));
  CHECK(r.status == 0);
  CHECK(r.out.find("wrote " + d.file("s.dot") + "\n") != std::string::npos);
  const std::string dot = read_file(d.file("s.dot"));
  CHECK(dot.rfind("digraph split_p0 {", 0) == 0);
  CHECK(dot.find("(4,0)") != std::string::npos); // the received halo shows up
}

TEST_CASE("random generation is reproducible for a fixed seed") {
  TempDir d;
  REQUIRE(run("generate --random 20,0.1,3 --seed 7 -o " + d.file("r1.json")).status == 0);
  REQUIRE(run("generate --random 20,0.1,3 --seed 7 -o " + d.file("r2.json")).status == 0);
  CHECK(read_file(d.file("r1.json")) == read_file(d.file("r2.json")));
  REQUIRE(run("generate --random 20,0.1,3 --seed 8 -o " + d.file("r3.json")).status == 0);
  CHECK(read_file(d.file("r1.json")) != read_file(d.file("r3.json")));
}
