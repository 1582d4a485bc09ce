#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "support.hpp"

#ifndef CERTIVEX_CLI
#define CERTIVEX_CLI "certivex"
#endif

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  std::string cmd = std::string(CERTIVEX_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string src(const std::string& relative) { return std::string(CERTIVEX_TEST_DIR) + "/" + relative; }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("certivex_cli_test_" + name)).string();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("verify") {
    auto r = run("verify " + src("countdown.c"));
    CHECK(r.code == 0);
    CHECK(r.out == "verified: 4 obligations proved\n");

    r = run("verify " + src("data/countdown_wrong_post.c"));
    CHECK(r.code == 1);
    CHECK(r.out.find("countermodel: s0 = 0") != std::string::npos);

    r = run("verify " + src("data/missing_invariant.c"));
    CHECK(r.code == 3);

    r = run("--json verify " + src("data/div_zero.c"));
    CHECK(r.code == 1);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["verdict"] == "rejected");
    CHECK(j["failed"]["origin"] == "division-by-zero");

    CHECK(run("verify /nonexistent/file.c").code == 4);
  }

  TEST_CASE("certificate round trip") {
    std::string cert = temp_path("countdown.json");
    auto r = run("verify " + src("countdown.c") + " --emit-cert " + cert);
    REQUIRE(r.code == 0);
    r = run("check-cert " + src("countdown.c") + " " + cert);
    CHECK(r.code == 0);

    r = run("check-cert " + src("data/countdown_wrong_post.c") + " " + cert);
    CHECK(r.code == 1);
    CHECK(r.out.find("digest") != std::string::npos);

    std::string broken = temp_path("broken.json");
    std::ofstream(broken) << "{ not json";
    CHECK(run("check-cert " + src("countdown.c") + " " + broken).code == 1);
    std::filesystem::remove(cert);
    std::filesystem::remove(broken);
  }

  TEST_CASE("run") {
    auto r = run("run " + src("countdown.c"));
    CHECK(r.code == 0);
    CHECK(r.out.find("Return 0 {x=0}") != std::string::npos);

    r = run("run " + src("data/clamp.c") + " --arg a=5 --arg b=3");
    CHECK(r.code == 0);

    r = run("run " + src("data/div_zero.c"));
    CHECK(r.code == 1);
    CHECK(r.out.find("DivByZero") != std::string::npos);

    r = run("--fuel 100 run " + src("data/spin.c"));
    CHECK(r.code == 0);
    CHECK(r.out.find("FuelExhausted") != std::string::npos);
    CHECK(run("run " + src("data/clamp.c") + " --arg a=x").code == 64);
  }

  TEST_CASE("translate") {
    auto r = run("translate " + src("countdown.c"));
    CHECK(r.code == 0);
    CHECK(r.out.rfind("Block(Lit 32767, Seq(Catch(Loop(", 0) == 0);
  }

  TEST_CASE("usage errors") {
    CHECK(run("").code == 64);
    CHECK(run("frobnicate").code == 64);
    CHECK(run("--samples 0 difftest").code == 64);
    CHECK(run("--fuel -3 run " + src("countdown.c")).code == 64);
    CHECK(run("--help").code == 0);
  }

  TEST_CASE("difftest") {
    auto r = run("--samples 20 --valuations 8 difftest");
    CHECK(r.code == 0);
    CHECK(r.out.find("0 counterexamples") != std::string::npos);
  }
}
