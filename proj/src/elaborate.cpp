#include "sessions/oracle.hpp"

namespace sessions {

namespace {

struct Renaming {
    std::map<std::string, std::string> chans;
    std::map<std::string, Expr> vals;
    bool inlined = false;
};

class Elaborator {
public:
    explicit Elaborator(const Program& p) : p_(p) {}

    ProcessPtr session(const SessionDecl& d, Renaming r) { return block(d.body, 0, Process::inact(), r); }

private:
    const Program& p_;
    unsigned counter_ = 0;
    std::vector<std::string> stack_;

    std::string chan(const std::string& c, const Renaming& r) {
        auto it = r.chans.find(c);
        return it == r.chans.end() ? c : it->second;
    }

    Expr expr(const Expr& e, const Renaming& r) {
        if (e.kind == ExprKind::Var) {
            auto it = r.vals.find(e.text);
            if (it != r.vals.end()) return it->second;
            return e;
        }
        Expr out = e;
        for (auto& a : out.args) a = expr(a, r);
        return out;
    }

    std::string bind(const std::string& name, Renaming& r, bool channel) {
        if (!r.inlined || name == "_") return name;
        std::string fresh = name + "_" + std::to_string(++counter_);
        if (channel)
            r.chans[name] = fresh;
        else
            r.vals[name] = Expr::variable(fresh);
        return fresh;
    }

    Pattern pattern(const Pattern& pat, Renaming& r) {
        Pattern out = pat;
        if (pat.kind == Pattern::Kind::Name) out.name = bind(pat.name, r, false);
        for (auto& f : out.fields)
            if (f != "_") f = bind(f, r, false);
        return out;
    }

    ProcessPtr fork(const Stmt& st, const Renaming& r) {
        if (st.inline_fork) return block(st.block1, 0, Process::inact(), r);
        const SessionDecl* d = p_.find_session(st.target);
        if (!d) throw OutsideFragment("unknown session " + st.target);
        if (std::find(stack_.begin(), stack_.end(), st.target) != stack_.end())
            throw OutsideFragment("recursive fork of " + st.target);
        Renaming inner;
        inner.inlined = true;
        for (std::size_t i = 0; i < d->params.size() && i < st.args.size(); ++i) {
            const Param& prm = d->params[i];
            Expr arg = expr(st.args[i], r);
            if (prm.is_channel())
                inner.chans[prm.name] = chan(st.args[i].text, r);
            else
                inner.vals[prm.name] = arg;
        }
        stack_.push_back(st.target);
        ProcessPtr body = session(*d, inner);
        stack_.pop_back();
        return body;
    }

    ProcessPtr block(const Block& b, std::size_t i, const ProcessPtr& k, Renaming r) {
        if (i == b.size()) return k;
        const Stmt& st = b[i];
        auto rest = [&](Renaming& r2) { return block(b, i + 1, k, r2); };
        switch (st.kind) {
        case StmtKind::New: {
            std::string d = bind(st.bind, r, true);
            return Process::new_(d, rest(r));
        }
        case StmtKind::Send: {
            std::string c = chan(st.chan, r);
            Expr e = expr(st.expr, r);
            return Process::send(c, e, rest(r));
        }
        case StmtKind::Recv: {
            std::string c = chan(st.chan, r);
            Pattern x = pattern(st.pattern, r);
            return Process::recv(c, x, rest(r));
        }
        case StmtKind::Sel1:
        case StmtKind::Sel2: return Process::sel(st.kind == StmtKind::Sel1 ? 1 : 2, chan(st.chan, r), rest(r));
        case StmtKind::Offer: {
            ProcessPtr k2 = rest(r);
            return Process::offer(chan(st.chan, r), block(st.block1, 0, k2, r), block(st.block2, 0, k2, r));
        }
        case StmtKind::Throw: {
            std::string c = chan(st.chan, r), d = chan(st.chan2, r);
            return Process::send_s(c, d, rest(r));
        }
        case StmtKind::Catch: {
            std::string c = chan(st.chan, r);
            std::string d = bind(st.bind, r, true);
            return Process::recv_s(c, d, rest(r));
        }
        case StmtKind::Fork: {
            ProcessPtr child = fork(st, r);
            return Process::par(rest(r), child);
        }
        case StmtKind::Io:
            if (st.io == IoKind::Print) {
                Expr e = expr(st.expr, r);
                return Process::print(e, rest(r));
            } else {
                std::string x = bind(st.bind, r, false);
                return Process::readline(x, rest(r));
            }
        case StmtKind::Return: return rest(r);
        case StmtKind::Sel1N:
        case StmtKind::Sel2N:
        case StmtKind::OfferN:
        case StmtKind::Unwind:
        case StmtKind::Recur1:
        case StmtKind::Close:
        case StmtKind::Connect: break;
        }
        throw OutsideFragment(std::to_string(st.loc.line) + ":" + std::to_string(st.loc.column) +
                              ": statement outside the π-calculus fragment");
    }
};

} // namespace

ProcessPtr elaborate(const SessionDecl& decl, const Program& program) {
    Elaborator e(program);
    return e.session(decl, {});
}

ProcessPtr elaborate(const std::string& session, const Program& program) {
    const SessionDecl* d = program.find_session(session);
    if (!d) throw OutsideFragment("unknown session " + session);
    return elaborate(*d, program);
}

} // namespace sessions
