#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "corpus.hpp"
#include "sessions/cli.hpp"

using namespace sessions;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string at(const std::string& stem) { return (corpus::dir() / (stem + ".pi")).string(); }

std::string temp_file(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / ("sessions_cli_" + name);
    std::ofstream(p) << text;
    return p.string();
}

} // namespace

TEST_CASE("infer prints one signature per session") {
    const Outcome o = cli({"infer", at("calc")});
    CHECK(o.code == ExitOk);
    CHECK(o.out.find("server :: (Recv Int (Recv Int (Offer (Send Int a) (Send Bool a))), a)\n") != std::string::npos);
    CHECK(o.out.find("calc :: (Bot, End)\n") != std::string::npos);
}

TEST_CASE("infer against every expectation file") {
    for (const auto& stem : corpus::programs()) {
        CAPTURE(stem);
        const auto expect = (corpus::dir() / (stem + ".expect")).string();
        CHECK(cli({"infer", at(stem), "--expect", expect}).code == ExitOk);
    }
}

TEST_CASE("a wrong expectation is a mismatch") {
    const auto expect = temp_file("wrong.expect", "calc :: (End, End)\n");
    const Outcome o = cli({"infer", at("calc"), "--expect", expect});
    CHECK(o.code == ExitMismatch);
    CHECK(o.err.find("calc") != std::string::npos);
}

TEST_CASE("expectations compare up to variable renaming") {
    const auto expect = temp_file("renamed.expect", "server :: (Recv Int (Recv Int (Offer (Send Int zz) (Send Bool zz))), zz)\n");
    CHECK(cli({"infer", at("calc"), "--expect", expect}).code == ExitOk);
}

TEST_CASE("ill-typed client is reported at the fork") {
    std::string src = corpus::source("calc");
    src.replace(src.find("send c 123;"), 11, "send c \"x\";");
    const Outcome o = cli({"infer", temp_file("bad_calc.pi", src)});
    CHECK(o.code == ExitTypeError);
    CHECK(o.err.find(":21:3:") != std::string::npos); // `fork client(c);`
    CHECK(o.err.find("Recv Int") != std::string::npos);
    CHECK(o.err.find("Send String") != std::string::npos);
}

TEST_CASE("input problems exit 3") {
    CHECK(cli({"infer", "/nonexistent/x.pi"}).code == ExitInput);
    CHECK(cli({"infer", temp_file("syntax.pi", "session main( {")}).code == ExitInput);
    CHECK(cli({"infer", at("calc"), "--unchecked"}).code == ExitInput);
    CHECK(cli({"infer", at("calc"), "--format", "xml"}).code == ExitInput);
    CHECK(cli({}).code == ExitInput);
}

TEST_CASE("structured output is versioned JSON") {
    const Outcome o = cli({"infer", at("fig6"), "--format", "structured"});
    REQUIRE(o.code == ExitOk);
    const auto j = nlohmann::json::parse(o.out);
    CHECK(j.at("schema_version") == "1");
}

TEST_CASE("run prints the effect log") {
    CHECK(cli({"run", at("calc")}).out == "PRINT Lesser\n");
    CHECK(cli({"run", at("pq"), "--seed", "3"}).out == "PRINT Hello\n");
    const auto script = (corpus::dir() / "readline.script").string();
    const Outcome o = cli({"run", at("readline"), "--script", script});
    CHECK(o.code == ExitOk);
    CHECK(o.out == corpus::slurp(corpus::dir() / "readline.log"));
}

TEST_CASE("run exit codes") {
    CHECK(cli({"run", at("loop")}).code == ExitStalled);
    CHECK(cli({"run", at("loop"), "--step-budget", "50"}).out.ends_with("BUDGET_EXHAUSTED\n"));
    const auto mutant = (corpus::dir() / "negative" / "calc_fork_twice.pi").string();
    CHECK(cli({"run", mutant}).code == ExitTypeError);
    const Outcome o = cli({"run", mutant, "--unchecked"});
    CHECK(o.code == ExitRuntimeError);
    CHECK(o.out.starts_with("ERROR "));
    const auto lone = temp_file("lone.pi", "session main() {\n  c <- new;\n  x <- recv c;\n}\n");
    CHECK(cli({"run", lone, "--unchecked"}).out == "DEADLOCK\n");
    CHECK(cli({"run", lone, "--unchecked"}).code == ExitStalled);
}

TEST_CASE("trace goes to stderr") {
    const Outcome o = cli({"run", at("calc"), "--trace"});
    CHECK(o.out == "PRINT Lesser\n");
    CHECK_FALSE(o.err.empty());
}

TEST_CASE("dual") {
    CHECK(cli({"dual", "Send Int End"}).out == "Recv Int End\n");
    CHECK(cli({"dual", "Rec Z (Offer (Var Z) End)"}).out == "Rec Z (Select (Var Z) End)\n");
    CHECK(cli({"dual", "Bot"}).code == ExitTypeError);
    CHECK(cli({"dual", "Send Int"}).code == ExitInput);
}

TEST_CASE("elaborate") {
    const Outcome o = cli({"elaborate", at("calc"), "--session", "client"});
    CHECK(o.code == ExitOk);
    CHECK(o.out.starts_with("client = SendP(c, 123, SendP(c, 456, Sel2P(c, RecvP(c, ans,"));
    CHECK(cli({"elaborate", at("loop"), "--session", "loop"}).code == ExitTypeError);
}

TEST_CASE("check prints a derivation or the failing rule") {
    const Outcome ok = cli({"check", at("pq")});
    CHECK(ok.code == ExitOk);
    CHECK(ok.out.starts_with("[Cres]"));
    CHECK(cli({"check", at("calc"), "--session", "server"}).code == ExitOk);
    const Outcome bad = cli({"check", at("calc"), "--session", "server", "--env", "c: Send Int End"});
    CHECK(bad.code == ExitTypeError);
    CHECK(bad.err.find("rejected") != std::string::npos);
}
