#include <doctest.h>

#include "corpus.hpp"
#include "gen.hpp"
#include "sessions/runtime.hpp"
#include "sessions/surface.hpp"

using namespace sessions;

namespace {

RunResult run_stem(const std::string& stem, std::uint64_t seed = 0) {
    RunOptions o;
    o.seed = seed;
    o.script = corpus::script(stem);
    return run(parse(corpus::source(stem)), o);
}

RunResult run_text(const std::string& text, std::uint64_t seed = 0, bool unchecked = true) {
    RunOptions o;
    o.seed = seed;
    o.unchecked = unchecked;
    return run(parse(text), o);
}

std::vector<std::string> prints(const RunResult& r) {
    std::vector<std::string> out;
    for (const auto& e : r.effects)
        if (e.text.starts_with("PRINT ")) out.push_back(e.text.substr(6));
    return out;
}

// DSL text realizing a protocol on c; Select takes the first branch.
void emit(const gen::TP& t, std::string& out, const std::string& indent, int& fresh) {
    static const char* literal[] = {"7", "True", "\"s\""};
    switch (t->op) {
    case gen::Op::Send:
        out += indent + "send c " + literal[t->value % 3] + ";\n";
        emit(t->kids[0], out, indent, fresh);
        return;
    case gen::Op::Recv:
        out += indent + "x" + std::to_string(fresh++) + " <- recv c;\n";
        emit(t->kids[0], out, indent, fresh);
        return;
    case gen::Op::Select:
        out += indent + "sel1 c;\n";
        emit(t->kids[0], out, indent, fresh);
        return;
    case gen::Op::Offer:
        out += indent + "offer c {\n";
        emit(t->kids[0], out, indent + "  ", fresh);
        out += indent + "} {\n";
        emit(t->kids[1], out, indent + "  ", fresh);
        out += indent + "};\n";
        return;
    default: return;
    }
}

gen::TP random_protocol(gen::Rng& r, int depth) {
    if (depth == 0 || r.chance(15)) return gen::mk(gen::Op::End);
    switch (r.below(4)) {
    case 0: return gen::mk(gen::Op::Send, {random_protocol(r, depth - 1)}, r.below(3));
    case 1: return gen::mk(gen::Op::Recv, {random_protocol(r, depth - 1)}, r.below(3));
    case 2: return gen::mk(gen::Op::Select, {random_protocol(r, depth - 1), random_protocol(r, depth - 1)});
    default: return gen::mk(gen::Op::Offer, {random_protocol(r, depth - 1), random_protocol(r, depth - 1)});
    }
}

std::string pair_program(const gen::TP& a, const gen::TP& b) {
    std::string text;
    int fresh = 0;
    text += "session left(c) {\n";
    emit(a, text, "  ", fresh);
    text += "}\nsession right(c) {\n";
    emit(b, text, "  ", fresh);
    text += "}\nsession main() {\n  c <- new;\n  fork left(c);\n  fork right(c);\n}\n";
    return text;
}

} // namespace

TEST_CASE("values print like show") {
    Value s;
    s.kind = Value::Kind::Str;
    s.s = "a";
    CHECK(show_value(s) == "a");
    Value l;
    l.kind = Value::Kind::List;
    l.items = {s, s};
    CHECK(show_value(l) == "[\"a\",\"a\"]");
    Value t;
    t.kind = Value::Kind::Tagged;
    t.s = "MAIL";
    t.items = {s};
    CHECK(show_value(t) == "MAIL(\"a\")");
    Value u;
    CHECK(show_value(u) == "()");
}

TEST_CASE("redex pairs") {
    CHECK(is_redex("send", "recv"));
    CHECK(is_redex("offer", "sel2"));
    CHECK(is_redex("catch", "throw"));
    CHECK_FALSE(is_redex("send", "send"));
    CHECK_FALSE(is_redex("sel1", "recv"));
}

TEST_CASE("calculator prints Lesser") {
    const RunResult r = run_stem("calc");
    CHECK(r.status == RunStatus::Completed);
    CHECK(prints(r) == std::vector<std::string>{"Lesser"});
}

TEST_CASE("channel passing prints Hello and records the pass") {
    const RunResult r = run_stem("pq");
    CHECK(prints(r) == std::vector<std::string>{"Hello"});
    CHECK(r.passes.size() == 1);
}

TEST_CASE("SMTP transcript") {
    const std::vector<std::string> want = {
        "CONNECT smtp",
        "PRINT EHLO(\"mydomain\")",
        "PRINT MAIL(\"alice@example.org\")",
        "PRINT RCPT(\"bob@example.org\")",
        "PRINT DATA",
        "PRINT MailBody([\"Hello Bob\",\"See you\"])",
        "PRINT QUIT",
    };
    for (std::uint64_t seed = 0; seed < 5; ++seed) CHECK(corpus::lines(run_stem("smtp", seed).log()) == want);
}

TEST_CASE("rejected recipient takes the error branch") {
    const auto p = prints(run_stem("smtp_reject"));
    REQUIRE_FALSE(p.empty());
    CHECK(p.back() == "QUIT");
    CHECK(std::find(p.begin(), p.end(), "[\"550 no such user\"]") != p.end());
}

TEST_CASE("corpus logs match their golden files at seed 0") {
    for (const auto& stem : corpus::programs()) {
        CAPTURE(stem);
        CHECK(run_stem(stem).log() == corpus::slurp(corpus::dir() / (stem + ".log")));
    }
}

TEST_CASE("loop runs out of budget without error") {
    const RunResult r = run_stem("loop");
    CHECK(r.status == RunStatus::BudgetExhausted);
    CHECK(r.steps == 10000);
    CHECK_FALSE(r.error);
}

TEST_CASE("two sends on one channel are a non-redex pair") {
    const RunResult r = run_text(
        "session a(c) {\n  send c 1;\n}\nsession main() {\n  c <- new;\n  fork a(c);\n  send c 2;\n}\n");
    REQUIRE(r.error);
    CHECK(r.error->classification == ErrorClass::NonRedexPair);
    CHECK(r.status == RunStatus::Error);
}

TEST_CASE("three processes on one channel") {
    const RunResult r = run_text("session a(c) {\n  x <- recv c;\n}\nsession main() {\n  c <- new;\n"
                                 "  fork a(c);\n  fork a(c);\n  send c 2;\n}\n");
    REQUIRE(r.error);
    CHECK(r.error->classification == ErrorClass::ThreeOrMore);
    CHECK(r.error->actions.size() == 3);
}

TEST_CASE("selection against a receive is a non-redex pair") {
    const RunResult r = run_text(
        "session a(c) {\n  x <- recv c;\n}\nsession main() {\n  c <- new;\n  fork a(c);\n  sel1 c;\n}\n");
    REQUIRE(r.error);
    CHECK(r.error->classification == ErrorClass::NonRedexPair);
}

TEST_CASE("a lone receive deadlocks") {
    const RunResult r = run_text("session main() {\n  c <- new;\n  x <- recv c;\n}\n");
    CHECK(r.status == RunStatus::Deadlock);
    CHECK_FALSE(r.error);
}

TEST_CASE("checked runs refuse ill-typed programs") {
    CHECK_THROWS_AS(run_text("session main() {\n  c <- new;\n  x <- recv c;\n}\n", 0, false), Error);
}

TEST_CASE("readline without input is an error") {
    RunOptions o;
    CHECK_THROWS_AS(run(parse(corpus::source("readline")), o), ScriptExhausted);
}

TEST_CASE("property: runs are a function of the seed") {
    for (const auto& stem : corpus::programs()) {
        CAPTURE(stem);
        for (std::uint64_t seed : {1u, 7u}) CHECK(run_stem(stem, seed).log() == run_stem(stem, seed).log());
    }
}

TEST_CASE("property: typed corpus programs never reach an error") {
    for (const auto& stem : corpus::programs()) {
        CAPTURE(stem);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const RunResult r = run_stem(stem, seed);
            CHECK_FALSE(r.error);
            CHECK(r.status != RunStatus::Deadlock);
        }
    }
}

TEST_CASE("property: a protocol against its dual completes, a flipped first action errs") {
    gen::Rng r(51);
    int errors = 0;
    for (int i = 0; i < 200; ++i) {
        const auto t = random_protocol(r, 5);
        if (t->op == gen::Op::End) continue;
        const auto d = *gen::ref_dual(t);
        const std::string good = pair_program(t, d);
        CAPTURE(good);
        const RunResult ok = run_text(good, i, false);
        CHECK(ok.status == RunStatus::Completed);

        auto flipped = gen::mk(t->op == gen::Op::Send ? gen::Op::Recv : gen::Op::Send, {t->kids[0]}, 0);
        if (t->op == gen::Op::Select || t->op == gen::Op::Offer)
            flipped = gen::mk(t->op == gen::Op::Select ? gen::Op::Offer : gen::Op::Select, {t->kids[0], t->kids[0]});
        const RunResult bad = run_text(pair_program(flipped, d), i);
        CHECK(bad.error);
        errors += bad.error ? 1 : 0;
    }
    CHECK(errors > 100);
}
