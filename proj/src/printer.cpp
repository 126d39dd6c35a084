#include <sstream>

#include "sessions/surface.hpp"
#include "sessions/type_syntax.hpp"

namespace sessions {

namespace {

int precedence(const Expr& e) {
    switch (e.kind) {
    case ExprKind::If: return 0;
    case ExprKind::Less:
    case ExprKind::Equal: return 1;
    case ExprKind::Add:
    case ExprKind::Sub: return 2;
    case ExprKind::Project: return 3;
    default: return 4;
    }
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out + "\"";
}

std::string print_at(const Expr& e, int min_prec) {
    std::string s;
    switch (e.kind) {
    case ExprKind::Int: s = std::to_string(e.int_value); break;
    case ExprKind::Bool: s = e.bool_value ? "True" : "False"; break;
    case ExprKind::Str: s = quote(e.text); break;
    case ExprKind::Unit: s = "()"; break;
    case ExprKind::Var: s = e.text; break;
    case ExprKind::List: {
        s = "[";
        for (std::size_t i = 0; i < e.args.size(); ++i) s += (i ? ", " : "") + print_at(e.args[i], 0);
        s += "]";
        break;
    }
    case ExprKind::Construct: {
        s = e.text;
        if (!e.args.empty()) {
            s += "(";
            for (std::size_t i = 0; i < e.args.size(); ++i) s += (i ? ", " : "") + print_at(e.args[i], 0);
            s += ")";
        }
        break;
    }
    case ExprKind::Add:
    case ExprKind::Sub:
        s = print_at(e.args[0], 2) + (e.kind == ExprKind::Add ? " + " : " - ") + print_at(e.args[1], 3);
        break;
    case ExprKind::Less:
    case ExprKind::Equal:
        s = print_at(e.args[0], 2) + (e.kind == ExprKind::Less ? " < " : " == ") + print_at(e.args[1], 2);
        break;
    case ExprKind::If:
        s = "if " + print_at(e.args[0], 0) + " then " + print_at(e.args[1], 0) + " else " + print_at(e.args[2], 0);
        break;
    case ExprKind::Project: s = print_at(e.args[0], 4) + "." + std::to_string(e.index); break;
    }
    // A negative literal directly after '-' or before '.' is parenthesized.
    const bool negative = e.kind == ExprKind::Int && e.int_value < 0 && min_prec >= 3;
    if (precedence(e) < min_prec || negative) return "(" + s + ")";
    return s;
}

std::string print_pattern(const Pattern& p) {
    switch (p.kind) {
    case Pattern::Kind::Wildcard: return "_";
    case Pattern::Kind::Name: return p.name;
    case Pattern::Kind::Tagged: {
        std::string s = p.name;
        if (!p.fields.empty()) {
            s += "(";
            for (std::size_t i = 0; i < p.fields.size(); ++i) s += (i ? ", " : "") + p.fields[i];
            s += ")";
        }
        return s;
    }
    }
    return "_";
}

void print_stmt(std::ostringstream& os, const Stmt& s, int indent);

void print_braced(std::ostringstream& os, const Block& b, int indent) {
    os << "{\n" << print_block(b, indent + 2) << std::string(indent, ' ') << "}";
}

void print_stmt(std::ostringstream& os, const Stmt& s, int indent) {
    switch (s.kind) {
    case StmtKind::New: os << s.bind << " <- new"; break;
    case StmtKind::Send: os << "send " << s.chan << " " << print_at(s.expr, 4); break;
    case StmtKind::Recv: os << print_pattern(s.pattern) << " <- recv " << s.chan; break;
    case StmtKind::Sel1: os << "sel1 " << s.chan; break;
    case StmtKind::Sel2: os << "sel2 " << s.chan; break;
    case StmtKind::Sel1N: os << "sel1N " << s.chan; break;
    case StmtKind::Sel2N: os << "sel2N " << s.chan; break;
    case StmtKind::Offer:
    case StmtKind::OfferN:
        os << (s.kind == StmtKind::Offer ? "offer " : "offerN ") << s.chan << " ";
        print_braced(os, s.block1, indent);
        os << " ";
        print_braced(os, s.block2, indent);
        break;
    case StmtKind::Throw: os << "throw " << s.chan << " " << s.chan2; break;
    case StmtKind::Catch: os << s.bind << " <- catch " << s.chan; break;
    case StmtKind::Fork:
        os << "fork ";
        if (s.inline_fork) {
            print_braced(os, s.block1, indent);
        } else {
            os << s.target << "(";
            for (std::size_t i = 0; i < s.args.size(); ++i) os << (i ? ", " : "") << print_at(s.args[i], 0);
            os << ")";
        }
        break;
    case StmtKind::Io:
        if (s.io == IoKind::Print) {
            os << "io print(" << print_at(s.expr, 0) << ")";
        } else {
            if (!s.bind.empty()) os << s.bind << " <- ";
            os << "io readline()";
        }
        break;
    case StmtKind::Unwind: os << "unwind " << s.level << " " << s.chan; break;
    case StmtKind::Recur1: os << "recur1 " << s.target << " " << s.chan; break;
    case StmtKind::Close: os << "close " << s.chan; break;
    case StmtKind::Connect: os << s.bind << " <- connect " << s.target; break;
    case StmtKind::Return: os << "return " << print_at(s.expr, 0); break;
    }
}

} // namespace

std::string print_expr(const Expr& e) { return print_at(e, 0); }

std::string print_block(const Block& block, int indent) {
    std::ostringstream os;
    for (const auto& s : block) {
        os << std::string(indent, ' ');
        print_stmt(os, s, indent);
        os << ";\n";
    }
    return os.str();
}

std::string print_program(const Program& p) {
    std::ostringstream os;
    for (const auto& d : p.data_decls) {
        os << "data " << d.name;
        if (!d.payload.empty()) {
            os << "(";
            for (std::size_t i = 0; i < d.payload.size(); ++i) os << (i ? ", " : "") << print_value_type(d.payload[i]);
            os << ")";
        }
        os << "\n";
    }
    for (const auto& s : p.service_decls) {
        os << "service " << s.name << " : " << print_type(s.type);
        if (s.server) os << " by " << *s.server;
        os << "\n";
    }
    if (p.entry != "main") os << "entry " << p.entry << "\n";
    for (const auto& d : p.sessions) {
        os << "\nsession " << d.name << "(";
        for (std::size_t i = 0; i < d.params.size(); ++i) {
            os << (i ? ", " : "") << d.params[i].name;
            if (d.params[i].type) os << ": " << print_value_type(*d.params[i].type);
        }
        os << ") {\n" << print_block(d.body, 2) << "}\n";
    }
    return os.str();
}

} // namespace sessions
