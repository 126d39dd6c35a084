// Acceptance criteria; one line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "corpus.hpp"
#include "gen.hpp"
#include "sessions/infer.hpp"
#include "sessions/oracle.hpp"
#include "sessions/runtime.hpp"
#include "sessions/surface.hpp"
#include "sessions/type_syntax.hpp"

using namespace sessions;

namespace {

constexpr double kFixtureSeconds = 1.0;
constexpr double kCorpusSeconds = 60.0;
constexpr double kAlgebraSeconds = 5.0;
constexpr double kOracleSeconds = 30.0;
constexpr std::uint64_t kSeeds = 200;
constexpr std::uint64_t kNegativeSeeds = 20;
constexpr std::size_t kBudget = 10000;

struct Verdict {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

class Clock {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2fs", s);
    return buf;
}

RunResult run_stem(const Program& p, const std::string& stem, std::uint64_t seed, bool unchecked = false) {
    RunOptions o;
    o.seed = seed;
    o.unchecked = unchecked;
    o.step_budget = kBudget;
    o.script = corpus::script(stem);
    return run(p, o);
}

Verdict signature_fixtures() {
    struct Fixture {
        const char* stem;
        const char* session;
        const char* text;
    };
    const Fixture fixtures[] = {
        {"calc", "server", "(Recv Int (Recv Int (Offer (Send Int a) (Send Bool a))), a)"},
        {"calc", "calc", "(Bot, End)"},
        {"fig6", "fig6", "Session (ss :> Send String u1 :> Send Bool u2) (ss :> u1 :> u2) ()"},
        {"smtp", "sendMail",
         "(SList ss l, IsEnded ss b1) => Session t"
         " (ss :> Recv R2yz (Send EHLO (Recv R2yz (Rec Z (SelectN"
         " (Send MAIL (Recv R2yz (Rec (S Z) (SelectN"
         " (Send RCPT (OfferN (Recv R2yz (Var (S Z))) (Recv R5yz (Send QUIT Close))))"
         " (Send DATA (Recv R354 (Send MailBody (Recv R2yz (Var Z)))))))))"
         " (Send QUIT Close)))))"
         " :> Recv String (Recv String (Select (Recv [String] Close) (Send [String] Close))))"
         " (ss :> End :> End) ()"},
    };
    Verdict v;
    double slowest = 0;
    for (const auto& f : fixtures) {
        Clock clock;
        const std::string got = print_signature(infer_program(parse(corpus::source(f.stem))).at(f.session));
        slowest = std::max(slowest, clock.seconds());
        if (got != canonical_signature(f.text)) v.fail(std::string(f.session) + " inferred " + got);
    }
    if (slowest >= kFixtureSeconds) v.fail("slowest fixture took " + fmt(slowest));
    if (v.ok) v.detail = "4 signatures, slowest " + fmt(slowest);
    return v;
}

Verdict runtime_fixtures() {
    const std::vector<std::pair<std::string, std::vector<std::string>>> want = {
        {"calc", {"PRINT Lesser"}},
        {"pq", {"PRINT Hello"}},
        {"smtp",
         {"CONNECT smtp", "PRINT EHLO(\"mydomain\")", "PRINT MAIL(\"alice@example.org\")",
          "PRINT RCPT(\"bob@example.org\")", "PRINT DATA", "PRINT MailBody([\"Hello Bob\",\"See you\"])",
          "PRINT QUIT"}},
    };
    Verdict v;
    for (const auto& [stem, lines] : want) {
        const Program p = parse(corpus::source(stem));
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const std::string a = run_stem(p, stem, seed).log(), b = run_stem(p, stem, seed).log();
            if (a != b) v.fail(stem + " differs between runs at seed " + std::to_string(seed));
            if (corpus::lines(a) != lines) v.fail(stem + " log at seed " + std::to_string(seed) + ": " + a);
        }
    }
    if (v.ok) v.detail = "3 programs x 10 seeds";
    return v;
}

Verdict corpus_safety() {
    Verdict v;
    Clock clock;
    const auto stems = corpus::programs();
    if (stems.size() != 30) v.fail("corpus has " + std::to_string(stems.size()) + " programs, want 30");
    std::size_t reports = 0, runs = 0;
    for (const auto& stem : stems) {
        const Program p = parse(corpus::source(stem));
        for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
            const RunResult r = run_stem(p, stem, seed);
            ++runs;
            if (r.error) {
                ++reports;
                v.fail(stem + " seed " + std::to_string(seed) + ": ERROR on " + r.error->channel);
            }
        }
    }
    const double t = clock.seconds();
    if (t >= kCorpusSeconds) v.fail("took " + fmt(t));
    if (v.ok) v.detail = std::to_string(runs) + " runs, " + std::to_string(reports) + " error reports, " + fmt(t);
    return v;
}

Verdict negative_corpus() {
    Verdict v;
    const auto dir = corpus::dir() / "negative";
    const auto stems = corpus::programs(dir);
    if (stems.size() != 30) v.fail("negative corpus has " + std::to_string(stems.size()) + " programs, want 30");
    for (const auto& stem : stems) {
        const Program p = parse(corpus::slurp(dir / (stem + ".pi")));
        bool rejected = false;
        try {
            infer_program(p);
        } catch (const InferError&) {
            rejected = true;
        }
        if (!rejected) v.fail(stem + " is accepted by inference");
        bool reported = false;
        for (std::uint64_t seed = 0; seed < kNegativeSeeds && !reported; ++seed) {
            RunOptions o;
            o.seed = seed;
            o.unchecked = true;
            o.step_budget = kBudget;
            reported = run(p, o).error.has_value();
        }
        if (!reported) v.fail(stem + " reaches no error report in seeds 0.." + std::to_string(kNegativeSeeds - 1));
    }
    if (v.ok) v.detail = std::to_string(stems.size()) + " mutants rejected and erroneous";
    return v;
}

Verdict algebra() {
    Verdict v;
    Clock clock;
    gen::Rng r(2024);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto t = gen::random_type(r);
        if (gen::depth_of(t) > 7) v.fail("generator exceeded depth 6");
        const SessionType u = gen::build(t);
        const SessionType d = dual(u);
        if (d != gen::build(*gen::ref_dual(t))) v.fail("dual differs from the reference on " + std::to_string(i));
        if (dual(d) != u) v.fail("dual is not an involution on " + std::to_string(i));
        if (comp(u, SessionType::end()) != u || comp(SessionType::end(), u) != u) v.fail("End is not a unit");
        if (!u.is(SessionKind::End) && comp(u, d) != SessionType::bot()) v.fail("u (+) dual u is not Bot");
        ++checked;
    }
    try {
        dual(SessionType::bot());
        v.fail("dual(Bot) is defined");
    } catch (const DualUndefined&) {
    }
    const SessionType s = SessionType::send(ValueType::integer(), SessionType::end());
    try {
        comp(s, s);
        v.fail("Send Int End (+) Send Int End is defined");
    } catch (const CompUndefined&) {
    }
    const double t = clock.seconds();
    if (t >= kAlgebraSeconds) v.fail("took " + fmt(t));
    if (v.ok) v.detail = std::to_string(checked) + " random types, " + fmt(t);
    return v;
}

SessionType close_open(const SessionType& u) {
    using K = SessionKind;
    switch (u.kind()) {
    case K::UVar: return SessionType::end();
    case K::Send: return SessionType::send(u.value(), close_open(u.cont()));
    case K::Recv: return SessionType::recv(u.value(), close_open(u.cont()));
    case K::Rec: return SessionType::rec(u.level(), close_open(u.body()));
    case K::End:
    case K::Bot:
    case K::Close:
    case K::Var: return u;
    default: return SessionType::binary(u.kind(), close_open(u.left()), close_open(u.right()));
    }
}

bool inference_accepts(const Program& p) {
    try {
        check_runnable(p, infer_program(p), p.entry);
        return true;
    } catch (const Error&) {
        return false;
    }
}

Verdict oracle_agreement() {
    Verdict v;
    Clock clock;
    std::size_t programs = 0, sessions = 0, brute = 0;
    auto agree = [&](const Program& p, const std::string& label) {
        const auto proc = elaborate(p.entry, p);
        const DataTable data = data_table(p);
        const bool oracle = check({}, *proc, {}, data).ok;
        if (oracle != inference_accepts(p)) v.fail(label + ": inference and checker disagree");
        const ProcessPtr body = proc->kind == ProcKind::New ? proc->p : proc;
        if (parallel_width(*body) <= 3) {
            ++brute;
            if (check({}, *proc, {}, data, CheckOptions{false, false}).ok != oracle)
                v.fail(label + ": exhaustive split search disagrees");
        }
        return oracle;
    };
    for (const auto& stem : corpus::fragment()) {
        const Program p = parse(corpus::source(stem));
        if (!agree(p, stem)) v.fail(stem + " is rejected");
        ++programs;
        const InferenceResult r = infer_program(p);
        for (const auto& d : p.sessions) {
            Sorting gamma;
            SessionEnv delta;
            std::size_t ci = 0;
            for (const auto& prm : d.params) {
                if (prm.is_channel())
                    delta.insert_or_assign(prm.name, close_open(r.at(d.name).pre.entries.at(ci++)));
                else
                    gamma.insert_or_assign(prm.name, *prm.type);
            }
            if (!check(gamma, *elaborate(d, p), delta, data_table(p)).ok)
                v.fail(stem + "." + d.name + ": inferred pre is not derivable");
            ++sessions;
        }
    }
    const auto dir = corpus::dir() / "negative";
    for (const auto& stem : corpus::programs(dir))
        if (agree(parse(corpus::slurp(dir / (stem + ".pi"))), "negative/" + stem)) v.fail(stem + " is accepted");
    if (programs < 15) v.fail("only " + std::to_string(programs) + " fragment programs");
    if (brute == 0) v.fail("no program small enough for the exhaustive search");
    const double t = clock.seconds();
    if (t >= kOracleSeconds) v.fail("took " + fmt(t));
    if (v.ok)
        v.detail = std::to_string(programs) + " programs, " + std::to_string(sessions) + " sessions, " +
                   std::to_string(brute) + " exhaustive, " + fmt(t);
    return v;
}

Verdict recursive_delegation() {
    Verdict v;
    const Program p = parse(corpus::source("loop"));
    const SessionType pre = infer_program(p).at("loop").pre.entries.at(0);
    const SessionType want = SessionType::rec(
        0, SessionType::throw_(SessionType::recv(ValueType::str(), SessionType::end()), SessionType::var(0)));
    if (pre != want) v.fail("loop pre is " + print_type(pre));
    const RunResult r = run_stem(p, "loop", 0);
    if (r.status != RunStatus::BudgetExhausted) v.fail("run did not exhaust the budget");
    if (r.steps != kBudget) v.fail("run stopped after " + std::to_string(r.steps) + " steps");
    if (r.error) v.fail("run reported an error");
    if (v.ok) v.detail = print_type(pre) + ", budget exhausted at " + std::to_string(r.steps);
    return v;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"reference signatures", signature_fixtures},
        {"reference runs", runtime_fixtures},
        {"typed corpus is error free", corpus_safety},
        {"mutants are rejected and erroneous", negative_corpus},
        {"type algebra", algebra},
        {"inference agrees with the typing rules", oracle_agreement},
        {"recursive delegation", recursive_delegation},
    };
    int failed = 0;
    int n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v.fail(std::string("exception: ") + e.what());
        }
        std::cout << (v.ok ? "PASS" : "FAIL") << " " << n << " " << name << ": " << v.detail << "\n";
        failed += v.ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
