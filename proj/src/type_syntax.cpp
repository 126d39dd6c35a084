#include "sessions/type_syntax.hpp"

#include <cctype>

namespace sessions {

std::string VarNamer::fresh() {
    const unsigned n = count_++;
    std::string name(1, static_cast<char>('a' + n % 26));
    if (n >= 26) name += std::to_string(n / 26);
    return name;
}

std::string VarNamer::session_var(unsigned id) {
    auto it = session_.find(id);
    if (it != session_.end()) return it->second;
    return session_[id] = fresh();
}

std::string VarNamer::value_var(unsigned id) {
    auto it = value_.find(id);
    if (it != value_.end()) return it->second;
    return value_[id] = fresh();
}

std::string VarNamer::tail(unsigned id) {
    auto it = tail_.find(id);
    if (it != tail_.end()) return it->second;
    static const char* const names[] = {"ss", "tt", "uu", "vv"};
    const std::size_t n = tail_.size();
    std::string name = n < 4 ? names[n] : "ss" + std::to_string(n);
    return tail_[id] = name;
}

// ---------------------------------------------------------------------------
// Printing

std::string print_level(unsigned level, bool as_argument) {
    if (level == 0) return "Z";
    std::string s = "S " + print_level(level - 1, true);
    return as_argument ? "(" + s + ")" : s;
}

std::string print_value_type(const ValueType& v, VarNamer& names, bool as_argument) {
    switch (v.kind()) {
    case ValueKind::Int: return "Int";
    case ValueKind::Bool: return "Bool";
    case ValueKind::Str: return "String";
    case ValueKind::Unit: return "()";
    case ValueKind::List: return "[" + print_value_type(v.elem(), names) + "]";
    case ValueKind::Tagged: return v.name();
    case ValueKind::Var: return names.value_var(v.var_id());
    case ValueKind::Chan: {
        std::string s = "Chan " + print_type(v.session(), names, true) + " " +
                        std::to_string(v.level().offset);
        return as_argument ? "(" + s + ")" : s;
    }
    }
    return "?";
}

std::string print_value_type(const ValueType& v) {
    VarNamer names;
    return print_value_type(v, names);
}

std::string print_type(const SessionType& u, VarNamer& names, bool as_argument) {
    using K = SessionKind;
    std::string s;
    switch (u.kind()) {
    case K::End:
    case K::Bot:
    case K::Close: return kind_name(u.kind());
    case K::UVar: return names.session_var(u.uvar_id());
    case K::Send:
    case K::Recv:
        s = std::string(kind_name(u.kind())) + " " + print_value_type(u.value(), names, true) + " ";
        s += print_type(u.cont(), names, true);
        break;
    case K::Rec:
        s = "Rec " + print_level(u.level(), true) + " " + print_type(u.body(), names, true);
        break;
    case K::Var: s = "Var " + print_level(u.level(), true); break;
    default:
        s = std::string(kind_name(u.kind())) + " " + print_type(u.left(), names, true) + " ";
        s += print_type(u.right(), names, true);
        break;
    }
    return as_argument ? "(" + s + ")" : s;
}

std::string print_type(const SessionType& u) {
    VarNamer names;
    return print_type(u, names);
}

std::string print_row(const EnvRow& row, VarNamer& names) {
    std::string s = row.tail ? names.tail(*row.tail) : "Nil";
    for (const auto& e : row.entries) s += " :> " + print_type(e, names);
    return s;
}

std::string print_row(const EnvRow& row) {
    VarNamer names;
    return print_row(row, names);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool is_lower_ident(const Token& t) {
    return t.kind == TokenKind::Ident && (std::islower(static_cast<unsigned char>(t.text[0])) || t.text[0] == '_');
}

unsigned lookup_var(std::map<std::string, unsigned>& table, VarScope& scope, const std::string& name) {
    auto it = table.find(name);
    if (it != table.end()) return it->second;
    const unsigned id = scope.next_id++;
    table.emplace(name, id);
    return id;
}

unsigned parse_level(TokenStream& ts, bool as_argument) {
    if (ts.peek().kind == TokenKind::Number) return ts.expect_number();
    if (ts.accept_word("Z")) return 0;
    if (ts.accept_punct("(")) {
        const unsigned l = parse_level(ts, false);
        ts.expect_punct(")");
        return l;
    }
    if (!as_argument && ts.accept_word("S")) return 1 + parse_level(ts, true);
    ts.fail({"level (Z, S n or a number)"});
}

SessionType parse_session_arg(TokenStream& ts, VarScope& scope);

SessionType parse_session(TokenStream& ts, VarScope& scope, bool as_argument) {
    using K = SessionKind;
    if (ts.accept_punct("(")) {
        SessionType u = parse_session(ts, scope, false);
        ts.expect_punct(")");
        return u;
    }
    const Token& t = ts.peek();
    if (t.kind != TokenKind::Ident) ts.fail({"session type"});
    if (is_lower_ident(t)) {
        const std::string name = ts.next().text;
        return SessionType::uvar(lookup_var(scope.session, scope, name));
    }
    const std::string w = t.text;
    if (w == "End") return ts.next(), SessionType::end();
    if (w == "Bot") return ts.next(), SessionType::bot();
    if (w == "Close") return ts.next(), SessionType::close();
    if (as_argument) ts.fail({"'('", "End", "Bot", "Close", "type variable"});
    static const std::pair<const char*, K> binaries[] = {
        {"Select", K::Select}, {"Offer", K::Offer}, {"SelectN", K::SelectN},
        {"OfferN", K::OfferN}, {"Throw", K::Throw}, {"Catch", K::Catch},
    };
    if (w == "Send" || w == "Recv") {
        ts.next();
        ValueType v = parse_value_type(ts, scope, true);
        SessionType u = parse_session_arg(ts, scope);
        return w == "Send" ? SessionType::send(std::move(v), std::move(u))
                           : SessionType::recv(std::move(v), std::move(u));
    }
    for (const auto& [name, kind] : binaries) {
        if (w == name) {
            ts.next();
            SessionType a = parse_session_arg(ts, scope);
            SessionType b = parse_session_arg(ts, scope);
            return SessionType::binary(kind, std::move(a), std::move(b));
        }
    }
    if (w == "Rec") {
        ts.next();
        const unsigned level = parse_level(ts, true);
        return SessionType::rec(level, parse_session_arg(ts, scope));
    }
    if (w == "Var") {
        ts.next();
        return SessionType::var(parse_level(ts, true));
    }
    ts.fail({"session type constructor"});
}

SessionType parse_session_arg(TokenStream& ts, VarScope& scope) { return parse_session(ts, scope, true); }

} // namespace

ValueType parse_value_type(TokenStream& ts, VarScope& scope, bool as_argument) {
    if (ts.accept_punct("[")) {
        ValueType e = parse_value_type(ts, scope);
        ts.expect_punct("]");
        return ValueType::list(std::move(e));
    }
    if (ts.accept_punct("(")) {
        if (ts.accept_punct(")")) return ValueType::unit();
        ValueType v = parse_value_type(ts, scope);
        ts.expect_punct(")");
        return v;
    }
    const Token& t = ts.peek();
    if (t.kind != TokenKind::Ident) ts.fail({"value type"});
    if (is_lower_ident(t)) {
        const std::string name = ts.next().text;
        return ValueType::var(lookup_var(scope.value, scope, name));
    }
    const std::string w = ts.next().text;
    if (w == "Int") return ValueType::integer();
    if (w == "Bool") return ValueType::boolean();
    if (w == "Str" || w == "String") return ValueType::str();
    if (w == "Unit") return ValueType::unit();
    (void)as_argument;
    return ValueType::tagged(w);
}

SessionType parse_type(TokenStream& ts, VarScope& scope) { return parse_session(ts, scope, false); }

EnvRow parse_row(TokenStream& ts, VarScope& scope) {
    EnvRow row;
    if (!ts.accept_word("Nil")) {
        if (!is_lower_ident(ts.peek())) ts.fail({"Nil", "row variable"});
        const std::string name = ts.next().text;
        row.tail = lookup_var(scope.tail, scope, name);
    }
    while (ts.accept_punct(":>")) row.entries.push_back(parse_type(ts, scope));
    return row;
}

namespace {
template <typename T, typename F>
T parse_whole(std::string_view text, F&& f) {
    TokenStream ts(tokenize(text));
    T out = f(ts);
    if (!ts.at_end()) ts.fail({"end of input"});
    return out;
}
} // namespace

SessionType parse_type(std::string_view text, VarScope& scope) {
    return parse_whole<SessionType>(text, [&](TokenStream& ts) { return parse_type(ts, scope); });
}

SessionType parse_type(std::string_view text) {
    VarScope scope;
    return parse_type(text, scope);
}

ValueType parse_value_type(std::string_view text) {
    VarScope scope;
    return parse_whole<ValueType>(text, [&](TokenStream& ts) { return parse_value_type(ts, scope); });
}

EnvRow parse_row(std::string_view text, VarScope& scope) {
    return parse_whole<EnvRow>(text, [&](TokenStream& ts) { return parse_row(ts, scope); });
}

} // namespace sessions
