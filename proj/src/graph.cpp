#include <algorithm>
#include <sstream>

#include "sessions/solver.hpp"
#include "sessions/type_syntax.hpp"

namespace sessions {

namespace {
std::string located(SourceLoc loc, const std::string& message) {
    std::ostringstream os;
    os << loc.line << ":" << loc.column << ": " << message;
    return os.str();
}

std::string mismatch(const std::string& expected, const std::string& found, const std::string& context) {
    std::string m = "type error: expected " + expected + ", found " + found;
    if (!context.empty()) m += " (" + context + ")";
    return m;
}

bool is_message(SessionKind k) { return k == SessionKind::Send || k == SessionKind::Recv; }

} // namespace

InferError::InferError(SourceLoc loc, const std::string& message) : Error(located(loc, message)), loc_(loc) {}

TypeError::TypeError(SourceLoc loc, std::string expected, std::string found, const std::string& context)
    : InferError(loc, mismatch(expected, found, context)), expected_(std::move(expected)), found_(std::move(found)) {}

NodeId TypeGraph::fresh() {
    SNode n;
    n.link = static_cast<NodeId>(s_.size());
    s_.push_back(n);
    return n.link;
}

NodeId TypeGraph::node(SessionKind k, NodeId a, NodeId b) {
    NodeId id = fresh();
    s_[id].kind = k;
    s_[id].a = a;
    s_[id].b = b;
    return id;
}

NodeId TypeGraph::message(SessionKind k, NodeId value, NodeId cont) {
    NodeId id = node(k, cont);
    s_[id].value = value;
    return id;
}

NodeId TypeGraph::rec(unsigned level, NodeId body) {
    NodeId id = node(SessionKind::Rec, body);
    s_[id].level = level;
    return id;
}

NodeId TypeGraph::fresh_value() {
    VNode n;
    n.link = static_cast<NodeId>(v_.size());
    v_.push_back(n);
    return n.link;
}

NodeId TypeGraph::value(ValueKind k, NodeId elem, std::string tag) {
    NodeId id = fresh_value();
    v_[id].kind = k;
    v_[id].elem = elem;
    v_[id].tag = std::move(tag);
    return id;
}

NodeId TypeGraph::find(NodeId n) {
    NodeId root = n;
    while (s_[root].link != root) root = s_[root].link;
    while (s_[n].link != root) {
        NodeId next = s_[n].link;
        s_[n].link = root;
        n = next;
    }
    return root;
}

NodeId TypeGraph::find_value(NodeId n) {
    NodeId root = n;
    while (v_[root].link != root) root = v_[root].link;
    while (v_[n].link != root) {
        NodeId next = v_[n].link;
        v_[n].link = root;
        n = next;
    }
    return root;
}

NodeId TypeGraph::child(NodeId n, int which) {
    const SNode& s = s_[find(n)];
    return which == 0 ? s.a : s.b;
}

NodeId TypeGraph::value_of(NodeId n) { return s_[find(n)].value; }

bool TypeGraph::occurs_value(NodeId var, NodeId v) {
    v = find_value(v);
    if (v == var) return true;
    return v_[v].kind == ValueKind::List && occurs_value(var, v_[v].elem);
}

void TypeGraph::unify_value(NodeId a, NodeId b) {
    a = find_value(a);
    b = find_value(b);
    if (a == b) return;
    if (v_[a].kind == ValueKind::Var) {
        if (occurs_value(a, b)) throw Clash{a, b, true};
        v_[a].link = b;
        return;
    }
    if (v_[b].kind == ValueKind::Var) {
        if (occurs_value(b, a)) throw Clash{a, b, true};
        v_[b].link = a;
        return;
    }
    if (v_[a].kind != v_[b].kind || v_[a].tag != v_[b].tag) throw Clash{a, b, true};
    v_[a].link = b;
    if (v_[a].kind == ValueKind::List) unify_value(v_[a].elem, v_[b].elem);
}

void TypeGraph::unify(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (s_[a].kind == SessionKind::UVar) {
        s_[a].link = b;
        return;
    }
    if (s_[b].kind == SessionKind::UVar) {
        s_[b].link = a;
        return;
    }
    if (s_[a].kind != s_[b].kind || (s_[a].kind == SessionKind::Rec && s_[a].level != s_[b].level))
        throw Clash{a, b, false};
    // Bind before descending so cyclic terms terminate.
    s_[a].link = b;
    const SNode x = s_[a], y = s_[b];
    if (is_message(x.kind)) unify_value(x.value, y.value);
    if (x.a >= 0) unify(x.a, y.a);
    if (x.b >= 0) unify(x.b, y.b);
}

NodeId TypeGraph::import_value(const ValueType& v, std::map<unsigned, NodeId>& value_vars) {
    switch (v.kind()) {
    case ValueKind::Var: {
        auto it = value_vars.find(v.var_id());
        if (it != value_vars.end()) return it->second;
        return value_vars[v.var_id()] = fresh_value();
    }
    case ValueKind::List: return value(ValueKind::List, import_value(v.elem(), value_vars));
    case ValueKind::Tagged: return value(ValueKind::Tagged, -1, v.name());
    default: return value(v.kind());
    }
}

namespace {
struct Importer {
    TypeGraph& g;
    std::map<unsigned, NodeId>& vars;
    std::map<unsigned, NodeId>& value_vars;
    std::vector<std::pair<unsigned, NodeId>> recs;

    NodeId run(const SessionType& u) {
        switch (u.kind()) {
        case SessionKind::UVar: {
            auto it = vars.find(u.uvar_id());
            if (it != vars.end()) return it->second;
            return vars[u.uvar_id()] = g.fresh();
        }
        case SessionKind::Var:
            for (auto it = recs.rbegin(); it != recs.rend(); ++it)
                if (it->first == u.level()) return it->second;
            throw Error("free recursion variable at level " + std::to_string(u.level()));
        case SessionKind::Rec: {
            NodeId body = g.fresh();
            NodeId r = g.rec(u.level(), body);
            recs.emplace_back(u.level(), r);
            g.unify(body, run(u.body()));
            recs.pop_back();
            return r;
        }
        case SessionKind::Send:
        case SessionKind::Recv: return g.message(u.kind(), g.import_value(u.value(), value_vars), run(u.cont()));
        case SessionKind::End:
        case SessionKind::Bot:
        case SessionKind::Close: return g.node(u.kind());
        default: {
            NodeId l = run(u.left());
            NodeId r = run(u.right());
            return g.node(u.kind(), l, r);
        }
        }
    }
};
} // namespace

NodeId TypeGraph::import_type(const SessionType& u, std::map<unsigned, NodeId>& vars,
                              std::map<unsigned, NodeId>& value_vars) {
    Importer im{*this, vars, value_vars, {}};
    return im.run(u);
}

NodeId TypeGraph::import_type(const SessionType& u) {
    std::map<unsigned, NodeId> a, b;
    return import_type(u, a, b);
}

NodeId TypeGraph::import_value(const ValueType& v) {
    std::map<unsigned, NodeId> a;
    return import_value(v, a);
}

ValueType TypeGraph::export_value(NodeId v) {
    v = find_value(v);
    switch (v_[v].kind) {
    case ValueKind::Var: return ValueType::var(static_cast<unsigned>(v));
    case ValueKind::Int: return ValueType::integer();
    case ValueKind::Bool: return ValueType::boolean();
    case ValueKind::Str: return ValueType::str();
    case ValueKind::Unit: return ValueType::unit();
    case ValueKind::List: return ValueType::list(export_value(v_[v].elem));
    case ValueKind::Tagged: return ValueType::tagged(v_[v].tag);
    case ValueKind::Chan: break;
    }
    return ValueType::unit();
}

namespace {
struct Exporter {
    TypeGraph& g;
    SourceLoc loc;
    std::vector<NodeId> recs;
    std::vector<std::pair<NodeId, std::size_t>> path; // node, rec depth on entry

    SessionType run(NodeId n) {
        n = g.find(n);
        const SessionKind k = g.kind(n);
        if (k == SessionKind::UVar) return SessionType::uvar(static_cast<unsigned>(n));
        if (k == SessionKind::End) return SessionType::end();
        if (k == SessionKind::Bot) return SessionType::bot();
        if (k == SessionKind::Close) return SessionType::close();
        if (k == SessionKind::Rec) {
            if (std::find(recs.begin(), recs.end(), n) != recs.end()) return SessionType::var(g.level(n));
            for (NodeId r : recs)
                if (g.level(r) == g.level(n))
                    throw FoldError(loc, "recursion level " + print_level(g.level(n), false) +
                                             " is bound twice on one path");
            recs.push_back(n);
            SessionType body = run(g.child(n, 0));
            recs.pop_back();
            return SessionType::rec(g.level(n), body);
        }
        for (const auto& [m, depth] : path)
            if (m == n && depth == recs.size())
                throw OccursError(loc, "infinite session type: a cycle does not pass through a recursion binder");
        path.emplace_back(n, recs.size());
        SessionType out;
        if (k == SessionKind::Send || k == SessionKind::Recv) {
            ValueType v = g.export_value(g.value_of(n));
            SessionType c = run(g.child(n, 0));
            out = k == SessionKind::Send ? SessionType::send(v, c) : SessionType::recv(v, c);
        } else {
            SessionType l = run(g.child(n, 0));
            SessionType r = run(g.child(n, 1));
            out = SessionType::binary(k, l, r);
        }
        path.pop_back();
        return out;
    }
};
} // namespace

SessionType TypeGraph::export_type(NodeId n, SourceLoc loc) {
    Exporter ex{*this, loc, {}, {}};
    return ex.run(n);
}

std::string TypeGraph::describe(NodeId n) {
    try {
        return print_type(export_type(n));
    } catch (const Error&) {
        return std::string("<cyclic ") + kind_name(kind(n)) + ">";
    }
}

std::string TypeGraph::describe_value(NodeId v) { return print_value_type(export_value(v)); }

NodeId TypeGraph::copy_value(NodeId v, Copier& c) {
    v = find_value(v);
    auto it = c.values.find(v);
    if (it != c.values.end()) return it->second;
    NodeId out;
    if (v_[v].kind == ValueKind::List) {
        out = value(ValueKind::List, copy_value(v_[v].elem, c));
    } else {
        out = value(v_[v].kind, -1, v_[v].tag);
    }
    c.values[v] = out;
    return out;
}

NodeId TypeGraph::copy(NodeId n, Copier& c) {
    n = find(n);
    auto it = c.sessions.find(n);
    if (it != c.sessions.end()) return it->second;
    const SNode src = s_[n];
    NodeId out = fresh();
    c.sessions[n] = out;
    if (src.kind == SessionKind::UVar) return out;
    NodeId value = src.value >= 0 ? copy_value(src.value, c) : -1;
    NodeId a = src.a >= 0 ? copy(src.a, c) : -1;
    NodeId b = src.b >= 0 ? copy(src.b, c) : -1;
    s_[out].kind = src.kind;
    s_[out].value = value;
    s_[out].a = a;
    s_[out].b = b;
    s_[out].level = src.level;
    return out;
}

} // namespace sessions
