#include <doctest.h>

#include "corpus.hpp"
#include "gen.hpp"
#include "sessions/surface.hpp"

using namespace sessions;

namespace {

Expr random_expr(gen::Rng& r, int depth) {
    static const char* names[] = {"x", "y", "n", "msg"};
    static const char* words[] = {"", "abc", "Hello", "two words"};
    if (depth <= 0 || r.chance(25)) {
        switch (r.below(5)) {
        case 0: return Expr::integer(r.below(1000));
        case 1: return Expr::boolean(r.chance(50));
        case 2: return Expr::string(words[r.below(4)]);
        case 3: return Expr::unit();
        default: return Expr::variable(names[r.below(4)]);
        }
    }
    switch (r.below(7)) {
    case 0: return Expr::binary(ExprKind::Add, random_expr(r, depth - 1), random_expr(r, depth - 1));
    case 1: return Expr::binary(ExprKind::Sub, random_expr(r, depth - 1), random_expr(r, depth - 1));
    case 2: return Expr::binary(ExprKind::Less, random_expr(r, depth - 1), random_expr(r, depth - 1));
    case 3: return Expr::binary(ExprKind::Equal, random_expr(r, depth - 1), random_expr(r, depth - 1));
    case 4: {
        Expr e;
        e.kind = ExprKind::If;
        e.args = {random_expr(r, depth - 1), random_expr(r, depth - 1), random_expr(r, depth - 1)};
        return e;
    }
    case 5: {
        Expr e;
        e.kind = ExprKind::List;
        for (int i = r.below(3); i > 0; --i) e.args.push_back(random_expr(r, depth - 1));
        return e;
    }
    default: {
        std::vector<Expr> fields;
        for (int i = r.below(3); i > 0; --i) fields.push_back(random_expr(r, depth - 1));
        return Expr::construct("Tag", fields);
    }
    }
}

} // namespace

TEST_CASE("a minimal session parses") {
    const Program p = parse("session main() { c <- new; send c 1; }");
    REQUIRE(p.sessions.size() == 1);
    const Block& b = p.sessions[0].body;
    REQUIRE(b.size() == 2);
    CHECK(b[0].kind == StmtKind::New);
    CHECK(b[0].bind == "c");
    CHECK(b[1].kind == StmtKind::Send);
    CHECK(b[1].expr == Expr::integer(1));
}

TEST_CASE("syntax errors carry a location and the expected tokens") {
    try {
        parse("session main() {\n  send c\n}");
        FAIL("no error");
    } catch (const SyntaxError& e) {
        CHECK(e.loc().line == 3);
        CHECK(e.loc().column == 1);
        CHECK_FALSE(e.expected().empty());
    }
}

TEST_CASE("unbound channels are name errors") {
    const Program p = parse("session main() { send c 1; }");
    CHECK_THROWS_AS(resolve_names(p), NameError);
}

TEST_CASE("fork of an unknown session is a name error") {
    const Program p = parse("session main() { c <- new; fork nobody(c); }");
    CHECK_THROWS_AS(resolve_names(p), NameError);
}

TEST_CASE("entry declaration selects the entry session") {
    CHECK(parse(corpus::source("calc")).entry == "startCalc");
    CHECK(parse("session main() { }").entry == "main");
}

TEST_CASE("operators associate and bind as expected") {
    CHECK(parse_expr("1 + 2 < 4") ==
          Expr::binary(ExprKind::Less, Expr::binary(ExprKind::Add, Expr::integer(1), Expr::integer(2)),
                       Expr::integer(4)));
    CHECK(parse_expr("5 - 2 - 1") ==
          Expr::binary(ExprKind::Sub, Expr::binary(ExprKind::Sub, Expr::integer(5), Expr::integer(2)),
                       Expr::integer(1)));
}

TEST_CASE("tagged patterns in recv") {
    const Program p = parse("data Point(Int, Int)\nsession s(c) { Point(x, _) <- recv c; }");
    const Stmt& st = p.sessions[0].body[0];
    CHECK(st.pattern.kind == Pattern::Kind::Tagged);
    CHECK(st.pattern.name == "Point");
    CHECK(st.pattern.fields == std::vector<std::string>{"x", "_"});
}

TEST_CASE("every corpus program parses, resolves and prints back to itself") {
    for (const auto& d : {corpus::dir(), corpus::dir() / "negative"}) {
        for (const auto& stem : corpus::programs(d)) {
            CAPTURE(stem);
            const Program p = parse(corpus::slurp(d / (stem + ".pi")));
            CHECK_NOTHROW(resolve_names(p));
            const std::string once = print_program(p);
            const Program q = parse(once);
            CHECK(print_program(q) == once);
            REQUIRE(q.sessions.size() == p.sessions.size());
            for (std::size_t i = 0; i < p.sessions.size(); ++i) CHECK(q.sessions[i] == p.sessions[i]);
        }
    }
}

TEST_CASE("property: printed expressions parse back") {
    gen::Rng r(21);
    for (int i = 0; i < 1000; ++i) {
        const Expr e = random_expr(r, 4);
        const std::string text = print_expr(e);
        CAPTURE(text);
        CHECK(parse_expr(text) == e);
    }
}
