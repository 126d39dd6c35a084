#include <set>
#include <sstream>

#include "sessions/surface.hpp"

namespace sessions {

namespace {
std::string located(SourceLoc loc, const std::string& message) {
    std::ostringstream os;
    os << loc.line << ":" << loc.column << ": " << message;
    return os.str();
}
} // namespace

NameError::NameError(SourceLoc loc, const std::string& message) : Error(located(loc, message)), loc_(loc) {}

namespace {

struct Scope {
    std::set<std::string> channels;
    std::set<std::string> values;
};

class Resolver {
public:
    explicit Resolver(const Program& p) : p_(p) {}

    void run() {
        std::set<std::string> seen;
        for (const auto& d : p_.data_decls)
            if (!seen.insert(d.name).second) throw NameError({}, "duplicate data type " + d.name);
        seen.clear();
        for (const auto& s : p_.service_decls) {
            if (!seen.insert(s.name).second) throw NameError({}, "duplicate service " + s.name);
            if (s.server) {
                const SessionDecl* d = p_.find_session(*s.server);
                if (!d) throw NameError({}, "service " + s.name + " served by undeclared session " + *s.server);
                if (d->channel_count() != 1 || d->params.size() != 1)
                    throw NameError(d->loc, "server session " + d->name + " must take exactly one channel");
            }
        }
        seen.clear();
        for (const auto& d : p_.sessions) {
            if (!seen.insert(d.name).second) throw NameError(d.loc, "duplicate session " + d.name);
            Scope scope;
            for (const auto& param : d.params) {
                if (scope.channels.count(param.name) || scope.values.count(param.name))
                    throw NameError(d.loc, "duplicate parameter " + param.name + " of " + d.name);
                (param.is_channel() ? scope.channels : scope.values).insert(param.name);
            }
            block(d.body, scope);
        }
    }

private:
    void channel(const Scope& s, const std::string& name, SourceLoc loc) {
        if (!s.channels.count(name)) throw NameError(loc, "unbound channel " + name);
    }

    void bind_channel(Scope& s, const std::string& name, SourceLoc loc) {
        if (s.channels.count(name) || s.values.count(name))
            throw NameError(loc, "channel name " + name + " is already bound");
        s.channels.insert(name);
    }

    void bind_value(Scope& s, const std::string& name, SourceLoc loc) {
        if (name == "_") return;
        if (s.channels.count(name)) throw NameError(loc, "value name " + name + " clashes with a channel");
        s.values.insert(name);
    }

    const DataDecl& tag(const std::string& name, std::size_t arity, SourceLoc loc) {
        const DataDecl* d = p_.find_data(name);
        if (!d) throw NameError(loc, "undeclared constructor " + name);
        if (d->payload.size() != arity)
            throw NameError(loc, "constructor " + name + " expects " + std::to_string(d->payload.size()) +
                                     " fields, given " + std::to_string(arity));
        return *d;
    }

    void expr(const Expr& e, const Scope& s) {
        if (e.kind == ExprKind::Var) {
            if (s.channels.count(e.text)) throw NameError(e.loc, "channel " + e.text + " used as a value");
            if (!s.values.count(e.text)) throw NameError(e.loc, "unbound variable " + e.text);
        }
        if (e.kind == ExprKind::Construct) tag(e.text, e.args.size(), e.loc);
        for (const auto& a : e.args) expr(a, s);
    }

    void block(const Block& b, Scope scope) {
        for (std::size_t i = 0; i < b.size(); ++i) {
            const Stmt& st = b[i];
            if (st.kind == StmtKind::Return && i + 1 != b.size())
                throw NameError(st.loc, "return must be the last statement of its block");
            stmt(st, scope);
        }
    }

    void stmt(const Stmt& st, Scope& s) {
        switch (st.kind) {
        case StmtKind::New: bind_channel(s, st.bind, st.loc); break;
        case StmtKind::Send:
            channel(s, st.chan, st.loc);
            expr(st.expr, s);
            break;
        case StmtKind::Recv:
            channel(s, st.chan, st.loc);
            if (st.pattern.kind == Pattern::Kind::Name) bind_value(s, st.pattern.name, st.loc);
            if (st.pattern.kind == Pattern::Kind::Tagged) {
                tag(st.pattern.name, st.pattern.fields.size(), st.loc);
                for (const auto& f : st.pattern.fields) bind_value(s, f, st.loc);
            }
            break;
        case StmtKind::Sel1:
        case StmtKind::Sel2:
        case StmtKind::Sel1N:
        case StmtKind::Sel2N:
        case StmtKind::Close:
        case StmtKind::Unwind: channel(s, st.chan, st.loc); break;
        case StmtKind::Offer:
        case StmtKind::OfferN:
            channel(s, st.chan, st.loc);
            block(st.block1, s);
            block(st.block2, s);
            break;
        case StmtKind::Throw:
            channel(s, st.chan, st.loc);
            channel(s, st.chan2, st.loc);
            if (st.chan == st.chan2) throw NameError(st.loc, "cannot throw channel " + st.chan + " over itself");
            break;
        case StmtKind::Catch:
            channel(s, st.chan, st.loc);
            bind_channel(s, st.bind, st.loc);
            break;
        case StmtKind::Fork:
            if (st.inline_fork) {
                block(st.block1, s);
            } else {
                call(st, s);
            }
            break;
        case StmtKind::Io:
            if (st.io == IoKind::Print) expr(st.expr, s);
            else if (!st.bind.empty()) bind_value(s, st.bind, st.loc);
            break;
        case StmtKind::Recur1: {
            channel(s, st.chan, st.loc);
            const SessionDecl* d = p_.find_session(st.target);
            if (!d) throw NameError(st.loc, "undeclared session " + st.target);
            if (d->params.size() != 1 || d->channel_count() != 1)
                throw NameError(st.loc, "recur1 target " + st.target + " must take exactly one channel");
            break;
        }
        case StmtKind::Connect:
            if (!p_.find_service(st.target)) throw NameError(st.loc, "undeclared service " + st.target);
            bind_channel(s, st.bind, st.loc);
            break;
        case StmtKind::Return: expr(st.expr, s); break;
        }
    }

    void call(const Stmt& st, const Scope& s) {
        const SessionDecl* d = p_.find_session(st.target);
        if (!d) throw NameError(st.loc, "undeclared session " + st.target);
        if (d->params.size() != st.args.size())
            throw NameError(st.loc, st.target + " expects " + std::to_string(d->params.size()) + " arguments");
        std::set<std::string> used;
        for (std::size_t i = 0; i < st.args.size(); ++i) {
            const Expr& a = st.args[i];
            if (d->params[i].is_channel()) {
                if (a.kind != ExprKind::Var) throw NameError(a.loc, "channel argument expected");
                channel(s, a.text, a.loc);
                if (!used.insert(a.text).second)
                    throw NameError(a.loc, "channel " + a.text + " passed twice to " + st.target);
            } else {
                expr(a, s);
            }
        }
    }

    const Program& p_;
};

} // namespace

void resolve_names(const Program& program) { Resolver(program).run(); }

} // namespace sessions
