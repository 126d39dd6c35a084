#include <doctest.h>

#include "corpus.hpp"
#include "gen.hpp"
#include "sessions/infer.hpp"
#include "sessions/surface.hpp"
#include "sessions/type_syntax.hpp"

using namespace sessions;

namespace {

std::string inferred(const std::string& stem, const std::string& name) {
    return print_signature(infer_program(parse(corpus::source(stem))).at(name));
}

// A straight-line session over k channel parameters, and the signature an
// independent fold over its actions predicts.
struct Straight {
    std::string program;
    std::string expected;
};

Straight random_straight(gen::Rng& r, int k) {
    static const char* literal[] = {"1", "True", "\"s\""};
    static const char* literal_type[] = {"Int", "Bool", "String"};
    std::vector<std::vector<std::string>> actions(k); // type prefixes per channel
    std::string body;
    int fresh = 0;
    const int n = r.below(9);
    for (int i = 0; i < n; ++i) {
        const int c = r.below(k);
        const std::string ch = "c" + std::to_string(c);
        switch (r.below(4)) {
        case 0: {
            const int v = r.below(3);
            body += "  send " + ch + " " + literal[v] + ";\n";
            actions[c].push_back(std::string("Send ") + literal_type[v]);
            break;
        }
        case 1:
            body += "  x" + std::to_string(i) + " <- recv " + ch + ";\n";
            actions[c].push_back("Recv v" + std::to_string(fresh++));
            break;
        case 2:
            body += "  sel1 " + ch + ";\n";
            actions[c].push_back("Select1 w" + std::to_string(fresh++));
            break;
        default:
            body += "  sel2 " + ch + ";\n";
            actions[c].push_back("Select2 w" + std::to_string(fresh++));
            break;
        }
    }
    std::string params, pre = "ss", post = "ss";
    for (int c = 0; c < k; ++c) {
        params += (c ? ", c" : "c") + std::to_string(c);
        std::string t = "t" + std::to_string(c);
        post += " :> " + t;
        for (auto it = actions[c].rbegin(); it != actions[c].rend(); ++it) {
            if (it->starts_with("Select1 "))
                t = "Select (" + t + ") " + it->substr(8);
            else if (it->starts_with("Select2 "))
                t = "Select " + it->substr(8) + " (" + t + ")";
            else
                t = *it + " (" + t + ")";
        }
        pre += " :> " + t;
    }
    return {"session s(" + params + ") {\n" + body + "}\n", "Session (" + pre + ") (" + post + ") ()"};
}

} // namespace

TEST_CASE("calculator server signature") {
    CHECK(inferred("calc", "server") == canonical_signature("(Recv Int (Recv Int (Offer (Send Int a) (Send Bool a))), a)"));
}

TEST_CASE("calc composes to Bot and ends") { CHECK(inferred("calc", "calc") == canonical_signature("(Bot, End)")); }

TEST_CASE("two channels are tracked by level") {
    CHECK(inferred("fig6", "fig6") == canonical_signature("Session (ss :> Send String u1 :> Send Bool u2) (ss :> u1 :> u2) ()"));
}

TEST_CASE("SMTP client signature") {
    const std::string want = canonical_signature(
        "EndedTail ss => Session (ss :> Recv R2yz (Send EHLO (Recv R2yz (Rec Z (SelectN "
        "(Send MAIL (Recv R2yz (Rec (S Z) (SelectN "
        "(Send RCPT (OfferN (Recv R2yz (Var (S Z))) (Recv R5yz (Send QUIT Close)))) "
        "(Send DATA (Recv R354 (Send MailBody (Recv R2yz (Var Z)))))))))"
        " (Send QUIT Close))))) :> Recv String (Recv String (Select (Recv [String] Close) (Send [String] Close))))"
        " (ss :> End :> End) ()");
    CHECK(inferred("smtp", "sendMail") == want);
}

TEST_CASE("loop delegates on every iteration") {
    const auto sig = infer_program(parse(corpus::source("loop"))).at("loop");
    CHECK(print_type(sig.pre.entries.at(0)) == "Rec Z (Throw (Recv String End) (Var Z))");
}

TEST_CASE("corpus signatures match their expectation files") {
    for (const auto& stem : corpus::programs()) {
        CAPTURE(stem);
        const InferenceResult r = infer_program(parse(corpus::source(stem)));
        for (const auto& line : corpus::lines(corpus::slurp(corpus::dir() / (stem + ".expect")))) {
            const auto sep = line.find("::");
            if (sep == std::string::npos || line.starts_with(" ")) continue;
            const std::string name = line.substr(0, sep - 1);
            if (name == "sendMail") continue; // multi-line, covered above
            CAPTURE(name);
            CHECK(print_signature(r.at(name)) == canonical_signature(line.substr(sep + 2)));
        }
    }
}

TEST_CASE("mismatched fork is a type error naming both sides") {
    std::string src = corpus::source("calc");
    src.replace(src.find("send c 123;"), 11, "send c \"x\";");
    try {
        infer_program(parse(src));
        FAIL("accepted");
    } catch (const TypeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("Recv Int (Recv Int") != std::string::npos);
        CHECK(msg.find("Send String") != std::string::npos);
    }
}

TEST_CASE("recursion without unwind is an occurs error") {
    CHECK_THROWS_AS(infer_program(parse("session s(c) {\n  send c 1;\n  recur1 s c;\n}\n")), OccursError);
}

TEST_CASE("negative corpus is rejected") {
    for (const auto& stem : corpus::programs(corpus::dir() / "negative")) {
        CAPTURE(stem);
        CHECK_THROWS_AS(infer_program(parse(corpus::slurp(corpus::dir() / "negative" / (stem + ".pi")))), InferError);
    }
}

TEST_CASE("property: straight-line sessions infer the folded prefix") {
    gen::Rng r(31);
    for (int i = 0; i < 300; ++i) {
        const Straight s = random_straight(r, 2 + r.below(2));
        CAPTURE(s.program);
        CHECK(print_signature(infer_session(parse(s.program), "s")) == canonical_signature(s.expected));
    }
}

TEST_CASE("property: an unused channel parameter is left untouched") {
    gen::Rng r(32);
    for (int i = 0; i < 200; ++i) {
        Straight s = random_straight(r, 2);
        s.program.replace(s.program.find(") {"), 3, ", spare) {");
        const SessionSignature sig = infer_session(parse(s.program), "s");
        REQUIRE(sig.pre.entries.size() == 3);
        CHECK(sig.pre.entries[2].is(SessionKind::UVar));
        CHECK(sig.pre.entries[2] == sig.post.entries[2]);
    }
}

TEST_CASE("property: inference is deterministic and survives the structured form") {
    for (const auto& stem : corpus::programs()) {
        CAPTURE(stem);
        const Program p = parse(corpus::source(stem));
        const InferenceResult a = infer_program(p), b = infer_program(p);
        const std::string json = structured_signatures(a);
        CHECK(json == structured_signatures(b));
        for (const auto& name : a.order)
            CHECK(print_signature(signature_from_structured(json, name)) == print_signature(a.at(name)));
    }
}
