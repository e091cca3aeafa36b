// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Drives the qfe binary as a subprocess.

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "qfe/data/csv.hpp"
#include "qfe/pipeline/pipeline.hpp"

extern char** environ;

using namespace qfe;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "qfe-cli-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    dir = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
};

const fs::path& workdir() {
  static const TempDir t;
  return t.dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Proc {
  pid_t pid = -1;
  fs::path out, err;
};

Proc spawn(const std::vector<std::string>& args, const std::string& tag) {
  static int counter = 0;
  Proc p;
  p.out = workdir() / (tag + "." + std::to_string(counter) + ".out");
  p.err = workdir() / (tag + "." + std::to_string(counter++) + ".err");
  std::vector<char*> argv;
  std::string exe = QFE_CLI_PATH;
  argv.push_back(exe.data());
  std::vector<std::string> copy = args;
  for (auto& a : copy) argv.push_back(a.data());
  argv.push_back(nullptr);
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_addopen(&fa, 1, p.out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_addopen(&fa, 2, p.err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  REQUIRE(posix_spawn(&p.pid, exe.c_str(), &fa, nullptr, argv.data(), environ) == 0);
  posix_spawn_file_actions_destroy(&fa);
  return p;
}

int wait_exit(const Proc& p) {
  int status = 0;
  REQUIRE(waitpid(p.pid, &status, 0) == p.pid);
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

struct Result {
  int code;
  std::string out, err;
};

Result run(const std::vector<std::string>& args) {
  Proc p = spawn(args, "run");
  int code = wait_exit(p);
  return {code, slurp(p.out), slurp(p.err)};
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

// Port announced on a server's stderr.
std::uint16_t wait_for_port(const Proc& p) {
  static const std::regex re("listening on [^\\s]*:(\\d+)");
  for (int i = 0; i < 600; ++i) {
    std::smatch m;
    std::string err = slurp(p.err);
    if (std::regex_search(err, m, re)) return static_cast<std::uint16_t>(std::stoi(m[1]));
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  FAIL("server did not announce a port: " << slurp(p.err));
  return 0;
}

// synth -> train -> keygen once; records keep a borrower_id column.
void prepare() {
  static bool done = false;
  if (done) return;
  REQUIRE(run({"synth", "--rows", "300", "--features", "6", "--seed", "4", "--out", path("data.csv")}).code == 0);
  auto t = run({"train", "--data", path("data.csv"), "--model", path("model.json"), "--epochs", "4", "--hidden", "3",
                "--lr", "0.01", "--seed", "2"});
  REQUIRE_MESSAGE(t.code == 0, t.err);
  CHECK(t.err.find("epoch 4/4") != std::string::npos);
  auto k = run({"keygen", "--model", path("model.json"), "--out-dir", path("keys"), "--seed", "3"});
  REQUIRE_MESSAGE(k.code == 0, k.err);

  CsvTable data = read_csv(path("data.csv"));
  CsvTable recs;
  recs.header = {"borrower_id"};
  recs.header.insert(recs.header.end(), data.header.begin(), data.header.end());
  for (std::size_t r = 0; r < 5; ++r) {
    std::vector<CsvCell> row{std::to_string(100 - 7 * r)};
    row.insert(row.end(), data.rows[r].begin(), data.rows[r].end());
    recs.rows.push_back(row);
  }
  write_csv(path("records.csv"), recs);
  done = true;
}

std::string in_process_reports() {
  ClientBundle cb = deserialize_client_bundle(read_file(path("keys/qfe.client")));
  EvaluatorBundle eb = deserialize_eval_bundle(read_file(path("keys/qfe.eval")));
  REQUIRE(cb.transform.has_value());
  CsvTable t = read_csv(path("records.csv"));
  std::vector<BorrowerRecord> recs;
  for (const auto& row : t.rows) {
    recs.push_back({std::stoull(*row[0]), quantize_record(cb.transform->apply(t.header, row), cb.config)});
  }
  return to_jsonl(score_batch(encrypt_batch(recs, cb, Rng::from_seed(99), 1), eb, 1));
}

}  // namespace

TEST_CASE("usage errors exit 2, help exits 0") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"train", "--help"}).code == 0);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"train", "--bogus"}).code == 2);
  CHECK(run({"train", "--data", "/nonexistent.csv", "--model", "m.json"}).code == 2);
  CHECK(run({"bench", "--reps", "0"}).code == 2);
}

TEST_CASE("encrypt then score matches the in-process pipeline") {
  prepare();
  auto e = run({"encrypt", "--client-bundle", path("keys/qfe.client"), "--records", path("records.csv"), "--out",
                path("ct.bin")});
  REQUIRE_MESSAGE(e.code == 0, e.err);
  auto s = run({"score", "--eval-bundle", path("keys/qfe.eval"), "--ciphertexts", path("ct.bin")});
  REQUIRE_MESSAGE(s.code == 0, s.err);
  CHECK(s.out == in_process_reports());
  auto reports = parse_jsonl(s.out);
  REQUIRE(reports.size() == 5);
  CHECK(reports.front().borrower_id == 72);
  CHECK(reports.back().borrower_id == 100);

  auto timed = run({"score", "--eval-bundle", path("keys/qfe.eval"), "--ciphertexts", path("ct.bin"), "--timings"});
  CHECK(timed.out.find("timings_ms") != std::string::npos);

  // Swapped bundle: runtime error, typed message, exit 1.
  auto bad = run({"score", "--eval-bundle", path("keys/qfe.client"), "--ciphertexts", path("ct.bin")});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("error[format_error]") != std::string::npos);
  CHECK(bad.out.empty());
}

TEST_CASE("config file errors are typed") {
  prepare();
  std::ofstream(path("bad.json")) << R"({"train": {"epochz": 3}})";
  auto r = run({"--config", path("bad.json"), "train", "--data", path("data.csv"), "--model", path("x.json")});
  CHECK(r.code == 1);
  CHECK(r.err.find("error[config_error]") != std::string::npos);
  CHECK_FALSE(fs::exists(path("x.json")));
}

TEST_CASE("bench writes a header and one row per cell") {
  auto r = run({"bench", "--dims", "5", "--borrowers", "10", "--reps", "2", "--features", "20", "--seed", "1"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  std::istringstream in(r.out);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "dim,borrowers,rep,encrypt_ms,score_ms,keygen_ms,project_ms,decrypt_ms,dlog_ms");
  CHECK(row.rfind("5,10,2,", 0) == 0);
  CHECK_FALSE(std::getline(in, extra));
}

TEST_CASE("services over TCP: authority, evaluator, submit") {
  prepare();
  Proc auth = spawn({"serve-authority", "--state", path("keys/qfe.auth"), "--listen", "127.0.0.1:0", "--client-token",
                     "tok"},
                    "auth");
  const std::string auth_addr = "127.0.0.1:" + std::to_string(wait_for_port(auth));
  Proc eval = spawn({"serve-evaluator", "--authority", auth_addr, "--listen", "127.0.0.1:0", "--workers", "2"}, "eval");
  const std::string eval_addr = "127.0.0.1:" + std::to_string(wait_for_port(eval));

  auto s = run({"submit", "--evaluator", eval_addr, "--authority", auth_addr, "--client-token", "tok", "--records",
                path("records.csv"), "--workers", "2"});
  CHECK_MESSAGE(s.code == 0, s.err);
  CHECK(s.out == in_process_reports());

  auto denied = run({"submit", "--evaluator", eval_addr, "--authority", auth_addr, "--client-token", "nope",
                     "--records", path("records.csv")});
  CHECK(denied.code == 1);
  CHECK(denied.err.find("error[protocol_error]") != std::string::npos);

  kill(eval.pid, SIGTERM);
  kill(auth.pid, SIGTERM);
  CHECK(wait_exit(eval) == 0);
  CHECK(wait_exit(auth) == 0);
}
