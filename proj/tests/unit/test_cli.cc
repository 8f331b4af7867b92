#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "propsum/corpus.h"
#include "propsum/serialize.h"
#include "synthetic.h"
#include "test_support.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run_cli(const std::string& args, const fs::path& dir) {
  fs::path out_file = dir / "stdout.txt";
  std::string cmd = std::string("\"") + PROPSUM_CLI_PATH + "\" --log-level off " + args + " > \"" +
                    out_file.string() + "\" 2>&1";
  int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::ostringstream s;
  s << in.rdbuf();
  r.out = s.str();
  return r;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

struct Workspace {
  fs::path dir;
  fs::path corpus;
  Workspace() {
    dir = testsupport::fresh_dir("cli");
    corpus = dir / "topics.jsonl";
    propsum::write_corpus(corpus, {testsupport::repeated_fact_topic(), testsupport::random_topic(3)});
  }
  std::string c() const { return "--corpus \"" + corpus.string() + "\""; }
};

}  // namespace

TEST_CASE("run writes a run directory and prints it") {
  Workspace ws;
  auto r = run_cli("run " + ws.c() + " -o \"" + (ws.dir / "runs").string() + "\"", ws.dir);
  REQUIRE(r.code == 0);
  fs::path run_dir = trim(r.out.substr(r.out.rfind('\n', r.out.size() - 2) + 1));
  CHECK(fs::exists(run_dir / "repeated" / "summary.txt"));
  CHECK(fs::exists(run_dir / "random3" / "evidence.json"));

  auto eval = run_cli("eval " + ws.c() + " --run-dir \"" + run_dir.string() + "\"", ws.dir);
  CHECK(eval.code == 0);
  CHECK(eval.out.find("rouge1") != std::string::npos);

  auto ev = run_cli("report-evidence --artifact \"" + (run_dir / "repeated" / "artifact.json").string() + "\"",
                    ws.dir);
  CHECK(ev.code == 0);
  CHECK(ev.out.find("\"evidence\"") != std::string::npos);
}

TEST_CASE("data derivation subcommands") {
  Workspace ws;
  auto out = ws.dir / "data";
  CHECK(run_cli("derive-salience-labels " + ws.c() + " -o \"" + out.string() + "\"", ws.dir).code == 0);
  CHECK(fs::exists(out / "salience_labels.jsonl"));
  CHECK(fs::exists(out / "salience_train.jsonl"));
  CHECK(run_cli("derive-fusion-data " + ws.c() + " -o \"" + out.string() + "\"", ws.dir).code == 0);
  CHECK(fs::exists(out / "fusion_train.jsonl"));
}

TEST_CASE("oracle, ablate and tune") {
  Workspace ws;
  for (const char* kind : {"prop", "sent", "cluster-rep", "ranking"}) {
    INFO(kind);
    CHECK(run_cli(std::string("oracle --kind ") + kind + " " + ws.c(), ws.dir).code == 0);
  }
  auto ablate = run_cli("ablate " + ws.c() + " --topic repeated", ws.dir);
  CHECK(ablate.code == 0);
  CHECK(ablate.out.find("salience_prop_clustering") != std::string::npos);
  auto tune = run_cli("tune --param tau " + ws.c(), ws.dir);
  CHECK(tune.code == 0);
  CHECK(tune.out.find("best") != std::string::npos);
}

TEST_CASE("exit codes") {
  Workspace ws;
  CHECK(run_cli("run " + ws.c() + " --set bogus=1", ws.dir).code == 2);
  CHECK(run_cli("run " + ws.c() + " --set salience_tau=7", ws.dir).code == 2);
  CHECK(run_cli("run --no-such-flag", ws.dir).code == 2);
  CHECK(run_cli("run --corpus \"" + (ws.dir / "missing.jsonl").string() + "\"", ws.dir).code == 3);
  {
    std::ofstream bad(ws.dir / "bad.jsonl");
    bad << "{\"topic_id\": 5}\n";
  }
  CHECK(run_cli("run --corpus \"" + (ws.dir / "bad.jsonl").string() + "\"", ws.dir).code == 3);
  CHECK(run_cli("run " + ws.c() +
                    " --set backends.extraction=fixture"
                    " --set 'backend_options={\"extraction\":{\"path\":\"nowhere.jsonl\"}}'",
                ws.dir)
            .code == 3);
  // A score file without entries for the corpus makes the salience backend fail.
  std::ofstream(ws.dir / "scores.jsonl") << "{\"prop_id\": \"elsewhere/d/0/0\", \"score\": 0.5}\n";
  CHECK(run_cli("run " + ws.c() + " -o \"" + (ws.dir / "runs").string() +
                    "\" --set backends.salience=score-file"
                    " --set 'backend_options={\"salience\":{\"path\":\"" +
                    (ws.dir / "scores.jsonl").string() + "\"}}'",
                ws.dir)
            .code == 4);
}
