#include "sessions/ast.hpp"

namespace sessions {

Expr Expr::integer(std::int64_t v) {
    Expr e;
    e.kind = ExprKind::Int;
    e.int_value = v;
    return e;
}

Expr Expr::boolean(bool v) {
    Expr e;
    e.kind = ExprKind::Bool;
    e.bool_value = v;
    return e;
}

Expr Expr::string(std::string v) {
    Expr e;
    e.kind = ExprKind::Str;
    e.text = std::move(v);
    return e;
}

Expr Expr::unit() { return Expr{}; }

Expr Expr::variable(std::string name) {
    Expr e;
    e.kind = ExprKind::Var;
    e.text = std::move(name);
    return e;
}

Expr Expr::binary(ExprKind k, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = k;
    e.loc = lhs.loc;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
}

Expr Expr::construct(std::string tag, std::vector<Expr> fields) {
    Expr e;
    e.kind = ExprKind::Construct;
    e.text = std::move(tag);
    e.args = std::move(fields);
    return e;
}

// Locations are not part of structural equality.
bool operator==(const Expr& a, const Expr& b) {
    return a.kind == b.kind && a.int_value == b.int_value && a.bool_value == b.bool_value && a.text == b.text &&
           a.index == b.index && a.args == b.args;
}

bool operator==(const Stmt& a, const Stmt& b) {
    return a.kind == b.kind && a.chan == b.chan && a.chan2 == b.chan2 && a.bind == b.bind && a.target == b.target &&
           a.pattern == b.pattern && a.expr == b.expr && a.args == b.args && a.io == b.io && a.level == b.level &&
           a.inline_fork == b.inline_fork && a.block1 == b.block1 && a.block2 == b.block2;
}

std::size_t SessionDecl::channel_count() const {
    std::size_t n = 0;
    for (const auto& p : params)
        if (p.is_channel()) ++n;
    return n;
}

bool operator==(const SessionDecl& a, const SessionDecl& b) {
    return a.name == b.name && a.params == b.params && a.body == b.body;
}

const SessionDecl* Program::find_session(const std::string& name) const {
    for (const auto& s : sessions)
        if (s.name == name) return &s;
    return nullptr;
}

const DataDecl* Program::find_data(const std::string& name) const {
    for (const auto& d : data_decls)
        if (d.name == name) return &d;
    return nullptr;
}

const ServiceDecl* Program::find_service(const std::string& name) const {
    for (const auto& s : service_decls)
        if (s.name == name) return &s;
    return nullptr;
}

} // namespace sessions
