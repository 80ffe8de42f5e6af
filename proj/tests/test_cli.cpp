#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

std::string cli_path() {
  const char* p = std::getenv("CGU_CLI");
  return p ? p : "";
}
std::string fixtures_path() {
  const char* p = std::getenv("CGU_FIXTURES");
  return p ? p : "fixtures";
}

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof(buf), pipe))
    out.append(buf, got);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

}  // namespace

TEST_CASE("cli: twisting dichotomy") {
  if (cli_path().empty()) return;
  auto r = run("twisting --n 4");
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.output);
  CHECK(j["command"] == "twisting");
  CHECK(j["verdicts"][0]["status"] == "OK");
  CHECK(j["verdicts"][0]["witness"].get<std::string>().find("NoneExists") !=
        std::string::npos);
  auto r3 = run("twisting --n 3");
  auto j3 = nlohmann::json::parse(r3.output);
  CHECK(j3["verdicts"][0]["witness"].get<std::string>().find("exists") !=
        std::string::npos);
}

TEST_CASE("cli: gu-witness") {
  if (cli_path().empty()) return;
  auto r = run("gu-witness --n 4");
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.output);
  bool local_ok = false, global_ok = false, sep_ok = false;
  for (const auto& v : j["verdicts"]) {
    if (v["check"] == "local_conjugacy")
      local_ok = (v["status"] == "OK" &&
                  v["witness"].get<std::string>().find("16/16") !=
                      std::string::npos);
    if (v["check"] == "global_conjugacy") global_ok = (v["status"] == "OK");
    if (v["check"] == "separator") sep_ok = (v["status"] == "OK");
  }
  CHECK(local_ok);
  CHECK(global_ok);
  CHECK(sep_ok);
}

TEST_CASE("cli: lift round trip on the dihedral fixture files") {
  if (cli_path().empty()) return;
  auto r = run("lift --group " + fixtures_path() + "/d4.json --rep " +
               fixtures_path() + "/d4rep.json --chi eps --field cyclo:8");
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.output);
  bool lifted = false;
  for (const auto& v : j["verdicts"])
    if (v["check"] == "lift[chi^(1-n)]")
      lifted = (v["status"] == "OK" &&
                v["witness"].get<std::string>().find("round-trip OK") !=
                    std::string::npos);
  CHECK(lifted);
}

TEST_CASE("cli: reports are byte-identical across runs with one seed") {
  if (cli_path().empty()) return;
  auto a = run("invariants --samples 50 --seed 7");
  auto b = run("invariants --samples 50 --seed 7");
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
}

TEST_CASE("cli: input errors exit with code 2") {
  if (cli_path().empty()) return;
  auto r = run("lift --group /nonexistent.json --rep /nonexistent.json");
  CHECK(r.exit_code == 2);
  auto r2 = run("sign --fixture nope");
  CHECK(r2.exit_code == 2);
}

TEST_CASE("cli: ladic demo") {
  if (cli_path().empty()) return;
  auto r = run("ladic --l 5 --M 3 --precisions 1,2,3");
  CHECK(r.exit_code == 0);
}
