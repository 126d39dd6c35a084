#include <json.hpp>

#include "sessions/infer.hpp"
#include "sessions/type_syntax.hpp"

namespace sessions {

namespace {

using json = nlohmann::ordered_json;

bool single_channel_form(const SessionSignature& sig) {
    return sig.channel_params.size() == 1 && sig.value_params.empty() && sig.pre.entries.size() == 1 &&
           sig.post.entries.size() == 1 && sig.result.is(ValueKind::Unit);
}

std::string print_with(const SessionSignature& sig, VarNamer& names) {
    // Names are handed out left to right, so each piece is printed in order.
    if (single_channel_form(sig)) {
        const std::string pre = print_type(sig.pre.entries[0], names);
        return "(" + pre + ", " + print_type(sig.post.entries[0], names) + ")";
    }
    std::string s;
    for (const auto& r : sig.residual) s += "EndedTail " + names.tail(r.tail) + " => ";
    s += "Session (" + print_row(sig.pre, names) + ") ";
    s += "(" + print_row(sig.post, names) + ") ";
    s += print_value_type(sig.result, names, true);
    return s;
}

} // namespace

std::string print_signature(const SessionSignature& sig) {
    VarNamer names;
    return print_with(sig, names);
}

SessionSignature parse_signature(std::string_view text) {
    TokenStream ts(tokenize(text));
    VarScope scope;
    SessionSignature sig;
    const bool context_tuple =
        ts.is_punct("(") && (ts.is_word("SList", 1) || ts.is_word("IsEnded", 1) || ts.is_word("EndedTail", 1));
    if (!context_tuple && ts.accept_punct("(")) {
        sig.pre.tail = sig.post.tail = scope.next_id++;
        sig.pre.entries.push_back(parse_type(ts, scope));
        ts.expect_punct(",");
        sig.post.entries.push_back(parse_type(ts, scope));
        ts.expect_punct(")");
        sig.channel_params.push_back({"", {sig.pre.tail, 0}});
    } else {
        std::optional<std::string> ended;
        if (ts.accept_word("EndedTail")) {
            ended = ts.expect_ident();
            ts.expect_punct("=>");
        } else if (context_tuple) {
            // (SList ss l, IsEnded ss b) => ...
            ts.expect_punct("(");
            do {
                if (ts.accept_word("SList")) {
                    ts.expect_ident();
                    ts.expect_ident();
                } else if (ts.accept_word("IsEnded")) {
                    ended = ts.expect_ident();
                    ts.expect_ident();
                } else {
                    ts.expect_word("EndedTail");
                    ended = ts.expect_ident();
                }
            } while (ts.accept_punct(","));
            ts.expect_punct(")");
            ts.expect_punct("=>");
        }
        ts.expect_word("Session");
        if (!ts.is_punct("(")) ts.expect_ident(); // index type variable
        ts.expect_punct("(");
        sig.pre = parse_row(ts, scope);
        ts.expect_punct(")");
        ts.expect_punct("(");
        sig.post = parse_row(ts, scope);
        ts.expect_punct(")");
        sig.result = parse_value_type(ts, scope, true);
        if (ended) {
            auto it = scope.tail.find(*ended);
            const unsigned id = it != scope.tail.end() ? it->second : scope.next_id++;
            sig.residual.push_back({ResidualKind::EndedTail, id});
        }
        // Arity is not part of the text; recover it from the rows.
        const std::size_t n = sig.pre.entries.size();
        for (std::size_t i = 0; i < n; ++i)
            sig.channel_params.push_back({"", {sig.pre.tail, static_cast<unsigned>(i)}});
        if (n == 1 && sig.post.entries.size() == 1 && sig.result.is(ValueKind::Unit))
            sig.value_params.push_back({"", ValueType::unit()}); // keep the long form
    }
    if (!ts.at_end()) ts.fail({"end of signature"});
    return sig;
}

std::string canonical_signature(std::string_view text) { return print_signature(parse_signature(text)); }

// ---------------------------------------------------------------------------
// Structured form

namespace {

json value_json(const ValueType& v, VarNamer& names) {
    json j;
    switch (v.kind()) {
    case ValueKind::Int: j["kind"] = "Int"; break;
    case ValueKind::Bool: j["kind"] = "Bool"; break;
    case ValueKind::Str: j["kind"] = "String"; break;
    case ValueKind::Unit: j["kind"] = "Unit"; break;
    case ValueKind::List:
        j["kind"] = "List";
        j["elem"] = value_json(v.elem(), names);
        break;
    case ValueKind::Tagged:
        j["kind"] = "Tagged";
        j["name"] = v.name();
        break;
    case ValueKind::Var:
        j["kind"] = "Var";
        j["name"] = names.value_var(v.var_id());
        break;
    case ValueKind::Chan: j["kind"] = "Chan"; break;
    }
    return j;
}

json type_json(const SessionType& u, VarNamer& names) {
    json j;
    j["kind"] = kind_name(u.kind());
    switch (u.kind()) {
    case SessionKind::Send:
    case SessionKind::Recv:
        j["value"] = value_json(u.value(), names);
        j["cont"] = type_json(u.cont(), names);
        break;
    case SessionKind::Rec:
        j["level"] = u.level();
        j["body"] = type_json(u.body(), names);
        break;
    case SessionKind::Var: j["level"] = u.level(); break;
    case SessionKind::UVar: j["name"] = names.session_var(u.uvar_id()); break;
    case SessionKind::End:
    case SessionKind::Bot:
    case SessionKind::Close: break;
    default:
        j["left"] = type_json(u.left(), names);
        j["right"] = type_json(u.right(), names);
    }
    return j;
}

json row_json(const EnvRow& row, VarNamer& names) {
    json j;
    j["tail"] = row.tail ? json(names.tail(*row.tail)) : json(nullptr);
    json entries = json::array();
    for (const auto& u : row.entries) {
        VarNamer copy = names;
        json e = type_json(u, names);
        e["text"] = print_type(u, copy);
        entries.push_back(e);
    }
    j["entries"] = entries;
    return j;
}

ValueType value_from(const json& j, VarScope& scope) {
    const std::string k = j.at("kind");
    if (k == "Int") return ValueType::integer();
    if (k == "Bool") return ValueType::boolean();
    if (k == "String") return ValueType::str();
    if (k == "Unit") return ValueType::unit();
    if (k == "List") return ValueType::list(value_from(j.at("elem"), scope));
    if (k == "Tagged") return ValueType::tagged(j.at("name"));
    if (k == "Var") {
        const std::string n = j.at("name");
        auto it = scope.value.find(n);
        if (it == scope.value.end()) it = scope.value.emplace(n, scope.next_id++).first;
        return ValueType::var(it->second);
    }
    throw Error("unknown value kind " + k);
}

SessionType type_from(const json& j, VarScope& scope) {
    const std::string k = j.at("kind");
    if (k == "End") return SessionType::end();
    if (k == "Bot") return SessionType::bot();
    if (k == "Close") return SessionType::close();
    if (k == "Var") return SessionType::var(j.at("level"));
    if (k == "Rec") return SessionType::rec(j.at("level"), type_from(j.at("body"), scope));
    if (k == "UVar") {
        const std::string n = j.at("name");
        auto it = scope.session.find(n);
        if (it == scope.session.end()) it = scope.session.emplace(n, scope.next_id++).first;
        return SessionType::uvar(it->second);
    }
    if (k == "Send" || k == "Recv") {
        ValueType v = value_from(j.at("value"), scope);
        SessionType c = type_from(j.at("cont"), scope);
        return k == "Send" ? SessionType::send(v, c) : SessionType::recv(v, c);
    }
    static const std::map<std::string, SessionKind> binary = {
        {"Select", SessionKind::Select}, {"Offer", SessionKind::Offer},   {"SelectN", SessionKind::SelectN},
        {"OfferN", SessionKind::OfferN}, {"Throw", SessionKind::Throw}, {"Catch", SessionKind::Catch},
    };
    auto it = binary.find(k);
    if (it == binary.end()) throw Error("unknown session kind " + k);
    SessionType l = type_from(j.at("left"), scope);
    return SessionType::binary(it->second, l, type_from(j.at("right"), scope));
}

EnvRow row_from(const json& j, VarScope& scope) {
    EnvRow row;
    if (!j.at("tail").is_null()) {
        const std::string n = j.at("tail");
        auto it = scope.tail.find(n);
        if (it == scope.tail.end()) it = scope.tail.emplace(n, scope.next_id++).first;
        row.tail = it->second;
    }
    for (const auto& e : j.at("entries")) row.entries.push_back(type_from(e, scope));
    return row;
}

} // namespace

std::string structured_signatures(const InferenceResult& result) {
    json root;
    root["schema_version"] = "1";
    json sessions = json::array();
    for (const auto& name : result.order) {
        const SessionSignature& sig = result.at(name);
        VarNamer names;
        json s;
        s["name"] = name;
        json chans = json::array();
        for (const auto& c : sig.channel_params)
            chans.push_back({{"name", c.name}, {"tail", names.tail(c.level.tail.value_or(0))}, {"offset", c.level.offset}});
        s["channel_params"] = chans;
        json vals = json::array();
        for (const auto& v : sig.value_params) vals.push_back({{"name", v.name}, {"type", value_json(v.type, names)}});
        s["value_params"] = vals;
        s["pre"] = row_json(sig.pre, names);
        s["post"] = row_json(sig.post, names);
        s["result"] = value_json(sig.result, names);
        json residual = json::array();
        for (const auto& r : sig.residual) residual.push_back({{"kind", "EndedTail"}, {"tail", names.tail(r.tail)}});
        s["residual"] = residual;
        s["pretty"] = print_signature(sig);
        sessions.push_back(s);
    }
    root["sessions"] = sessions;
    return root.dump(2);
}

SessionSignature signature_from_structured(const std::string& json_text, const std::string& name) {
    const json root = json::parse(json_text);
    for (const auto& s : root.at("sessions")) {
        if (s.at("name") != name) continue;
        VarScope scope;
        SessionSignature sig;
        for (const auto& c : s.at("channel_params")) {
            const std::string t = c.at("tail");
            auto it = scope.tail.find(t);
            if (it == scope.tail.end()) it = scope.tail.emplace(t, scope.next_id++).first;
            sig.channel_params.push_back({c.at("name"), {it->second, c.at("offset")}});
        }
        for (const auto& v : s.at("value_params")) sig.value_params.push_back({v.at("name"), value_from(v.at("type"), scope)});
        sig.pre = row_from(s.at("pre"), scope);
        sig.post = row_from(s.at("post"), scope);
        sig.result = value_from(s.at("result"), scope);
        for (const auto& r : s.at("residual")) {
            const std::string t = r.at("tail");
            auto it = scope.tail.find(t);
            if (it == scope.tail.end()) it = scope.tail.emplace(t, scope.next_id++).first;
            sig.residual.push_back({ResidualKind::EndedTail, it->second});
        }
        return sig;
    }
    throw Error("no session named " + name + " in structured output");
}

} // namespace sessions
