#include <cctype>
#include <set>

#include "sessions/surface.hpp"
#include "sessions/type_syntax.hpp"

namespace sessions {

namespace {

const std::set<std::string>& keywords() {
    static const std::set<std::string> k = {
        "session", "data",   "service", "entry",  "new",    "send",  "recv",   "sel1",  "sel2",   "offer",
        "sel1N",   "sel2N",  "offerN",  "throw",  "catch",  "fork",  "io",     "unwind", "recur1", "close",
        "connect", "return", "if",      "then",   "else",   "True",  "False",  "by",    "print",  "readline",
    };
    return k;
}

bool is_upper(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

class Parser {
public:
    explicit Parser(std::string_view text) : ts_(tokenize(text)) {}

    Program program() {
        Program p;
        while (!ts_.at_end()) {
            if (ts_.accept_word("data")) {
                DataDecl d;
                d.name = constructor_name();
                if (ts_.accept_punct("(")) {
                    VarScope scope;
                    do {
                        d.payload.push_back(parse_value_type(ts_, scope));
                    } while (ts_.accept_punct(","));
                    ts_.expect_punct(")");
                }
                p.data_decls.push_back(std::move(d));
            } else if (ts_.accept_word("service")) {
                ServiceDecl s;
                s.name = name();
                ts_.expect_punct(":");
                VarScope scope;
                s.type = parse_type(ts_, scope);
                if (ts_.accept_word("by")) s.server = name();
                p.service_decls.push_back(std::move(s));
            } else if (ts_.accept_word("entry")) {
                p.entry = name();
            } else if (ts_.is_word("session")) {
                p.sessions.push_back(session());
            } else {
                ts_.fail({"'data'", "'service'", "'session'", "'entry'"});
            }
            ts_.accept_punct(";");
        }
        return p;
    }

    Expr whole_expr() {
        Expr e = expr();
        if (!ts_.at_end()) ts_.fail({"end of input"});
        return e;
    }

private:
    std::string name() {
        const Token& t = ts_.peek();
        if (t.kind != TokenKind::Ident || keywords().count(t.text) || is_upper(t.text)) ts_.fail({"name"});
        return ts_.next().text;
    }

    std::string constructor_name() {
        const Token& t = ts_.peek();
        if (t.kind != TokenKind::Ident || !is_upper(t.text) || keywords().count(t.text))
            ts_.fail({"constructor name"});
        return ts_.next().text;
    }

    SessionDecl session() {
        SessionDecl d;
        d.loc = ts_.peek().loc;
        ts_.expect_word("session");
        d.name = name();
        ts_.expect_punct("(");
        if (!ts_.is_punct(")")) {
            do {
                Param p;
                p.name = name();
                if (ts_.accept_punct(":")) {
                    VarScope scope;
                    p.type = parse_value_type(ts_, scope);
                }
                d.params.push_back(std::move(p));
            } while (ts_.accept_punct(","));
        }
        ts_.expect_punct(")");
        d.body = block();
        return d;
    }

    Block block() {
        ts_.expect_punct("{");
        Block b;
        while (!ts_.accept_punct("}")) {
            if (ts_.at_end()) ts_.fail({"'}'"});
            b.push_back(stmt());
            if (!ts_.accept_punct(";") && !ts_.is_punct("}") && b.back().block1.empty())
                ts_.fail({"';'", "'}'"});
        }
        return b;
    }

    Stmt stmt() {
        Stmt s;
        s.loc = ts_.peek().loc;
        s.id = next_id_++;
        auto subject = [&](StmtKind k) {
            ts_.next();
            s.kind = k;
            s.chan = name();
        };
        if (ts_.is_word("send")) {
            subject(StmtKind::Send);
            s.expr = expr();
        } else if (ts_.is_word("sel1")) {
            subject(StmtKind::Sel1);
        } else if (ts_.is_word("sel2")) {
            subject(StmtKind::Sel2);
        } else if (ts_.is_word("sel1N")) {
            subject(StmtKind::Sel1N);
        } else if (ts_.is_word("sel2N")) {
            subject(StmtKind::Sel2N);
        } else if (ts_.is_word("offer") || ts_.is_word("offerN")) {
            subject(ts_.is_word("offer") ? StmtKind::Offer : StmtKind::OfferN);
            s.block1 = block();
            s.block2 = block();
        } else if (ts_.is_word("throw")) {
            subject(StmtKind::Throw);
            s.chan2 = name();
        } else if (ts_.is_word("close")) {
            subject(StmtKind::Close);
        } else if (ts_.accept_word("unwind")) {
            s.kind = StmtKind::Unwind;
            s.level = ts_.expect_number();
            s.chan = name();
        } else if (ts_.accept_word("recur1")) {
            s.kind = StmtKind::Recur1;
            s.target = name();
            s.chan = name();
        } else if (ts_.accept_word("fork")) {
            s.kind = StmtKind::Fork;
            if (ts_.is_punct("{")) {
                s.inline_fork = true;
                s.block1 = block();
            } else {
                s.target = name();
                ts_.expect_punct("(");
                if (!ts_.is_punct(")")) {
                    do {
                        s.args.push_back(expr());
                    } while (ts_.accept_punct(","));
                }
                ts_.expect_punct(")");
            }
        } else if (ts_.accept_word("io")) {
            s.kind = StmtKind::Io;
            io_action(s);
        } else if (ts_.accept_word("return")) {
            s.kind = StmtKind::Return;
            s.expr = expr();
        } else {
            binding_stmt(s);
        }
        return s;
    }

    void io_action(Stmt& s) {
        if (ts_.accept_word("print")) {
            s.io = IoKind::Print;
            ts_.expect_punct("(");
            s.expr = expr();
            ts_.expect_punct(")");
        } else if (ts_.accept_word("readline")) {
            s.io = IoKind::ReadLine;
            ts_.expect_punct("(");
            ts_.expect_punct(")");
        } else {
            ts_.fail({"'print'", "'readline'"});
        }
    }

    Pattern pattern() {
        Pattern p;
        if (ts_.accept_word("_")) {
            p.kind = Pattern::Kind::Wildcard;
            return p;
        }
        const Token& t = ts_.peek();
        if (t.kind == TokenKind::Ident && is_upper(t.text) && !keywords().count(t.text)) {
            p.kind = Pattern::Kind::Tagged;
            p.name = ts_.next().text;
            if (ts_.accept_punct("(")) {
                do {
                    p.fields.push_back(ts_.accept_word("_") ? "_" : name());
                } while (ts_.accept_punct(","));
                ts_.expect_punct(")");
            }
            return p;
        }
        p.kind = Pattern::Kind::Name;
        p.name = name();
        return p;
    }

    void binding_stmt(Stmt& s) {
        const Token& first = ts_.peek();
        if (first.kind != TokenKind::Ident) ts_.fail({"statement"});
        Pattern p = pattern();
        ts_.expect_punct("<-");
        if (ts_.accept_word("recv")) {
            s.kind = StmtKind::Recv;
            s.pattern = std::move(p);
            s.chan = name();
            return;
        }
        if (p.kind != Pattern::Kind::Name) ts_.fail({"'recv'"});
        s.bind = p.name;
        if (ts_.accept_word("new")) {
            s.kind = StmtKind::New;
        } else if (ts_.accept_word("catch")) {
            s.kind = StmtKind::Catch;
            s.chan = name();
        } else if (ts_.accept_word("connect")) {
            s.kind = StmtKind::Connect;
            s.target = name();
        } else if (ts_.accept_word("io")) {
            s.kind = StmtKind::Io;
            if (!ts_.accept_word("readline")) ts_.fail({"'readline'"});
            s.io = IoKind::ReadLine;
            ts_.expect_punct("(");
            ts_.expect_punct(")");
        } else {
            ts_.fail({"'new'", "'recv'", "'catch'", "'connect'", "'io'"});
        }
    }

    // expr := add (("<" | "==") add)?
    Expr expr() {
        if (ts_.is_word("if")) {
            const SourceLoc loc = ts_.next().loc;
            Expr e;
            e.kind = ExprKind::If;
            e.loc = loc;
            e.args.push_back(expr());
            ts_.expect_word("then");
            e.args.push_back(expr());
            ts_.expect_word("else");
            e.args.push_back(expr());
            return e;
        }
        Expr lhs = additive();
        if (ts_.accept_punct("<")) return Expr::binary(ExprKind::Less, std::move(lhs), additive());
        if (ts_.accept_punct("==")) return Expr::binary(ExprKind::Equal, std::move(lhs), additive());
        return lhs;
    }

    Expr additive() {
        Expr lhs = postfix();
        for (;;) {
            if (ts_.accept_punct("+")) {
                lhs = Expr::binary(ExprKind::Add, std::move(lhs), postfix());
            } else if (ts_.accept_punct("-")) {
                lhs = Expr::binary(ExprKind::Sub, std::move(lhs), postfix());
            } else {
                return lhs;
            }
        }
    }

    Expr postfix() {
        Expr e = atom();
        while (ts_.is_punct(".") && ts_.peek(1).kind == TokenKind::Number) {
            ts_.next();
            Expr p;
            p.kind = ExprKind::Project;
            p.loc = e.loc;
            p.index = ts_.expect_number();
            p.args.push_back(std::move(e));
            e = std::move(p);
        }
        return e;
    }

    Expr atom() {
        const Token& t = ts_.peek();
        const SourceLoc loc = t.loc;
        Expr e;
        if (t.kind == TokenKind::Number) {
            e = Expr::integer(std::stoll(ts_.next().text));
        } else if (ts_.is_punct("-") && ts_.peek(1).kind == TokenKind::Number) {
            ts_.next();
            e = Expr::integer(-std::stoll(ts_.next().text));
        } else if (t.kind == TokenKind::String) {
            e = Expr::string(ts_.next().text);
        } else if (ts_.accept_word("True")) {
            e = Expr::boolean(true);
        } else if (ts_.accept_word("False")) {
            e = Expr::boolean(false);
        } else if (ts_.accept_punct("(")) {
            if (ts_.accept_punct(")")) {
                e = Expr::unit();
            } else {
                e = expr();
                ts_.expect_punct(")");
            }
        } else if (ts_.accept_punct("[")) {
            e.kind = ExprKind::List;
            if (!ts_.is_punct("]")) {
                do {
                    e.args.push_back(expr());
                } while (ts_.accept_punct(","));
            }
            ts_.expect_punct("]");
        } else if (t.kind == TokenKind::Ident && is_upper(t.text) && !keywords().count(t.text)) {
            e = Expr::construct(ts_.next().text);
            if (ts_.accept_punct("(")) {
                if (!ts_.is_punct(")")) {
                    do {
                        e.args.push_back(expr());
                    } while (ts_.accept_punct(","));
                }
                ts_.expect_punct(")");
            }
        } else if (t.kind == TokenKind::Ident && !keywords().count(t.text)) {
            e = Expr::variable(ts_.next().text);
        } else {
            ts_.fail({"expression"});
        }
        e.loc = loc;
        return e;
    }

    TokenStream ts_;
    unsigned next_id_ = 0;
};

} // namespace

Program parse(std::string_view text) { return Parser(text).program(); }

Expr parse_expr(std::string_view text) { return Parser(text).whole_expr(); }

} // namespace sessions
