#include <algorithm>
#include <functional>
#include <set>

#include "sessions/infer.hpp"
#include "sessions/surface.hpp"
#include "sessions/type_syntax.hpp"

namespace sessions {

namespace {

struct Skeleton {
    std::vector<NodeId> pre, post; // one per channel parameter
    std::vector<NodeId> values;    // one per value parameter
    NodeId result = -1;
    std::vector<NodeId> extras; // channels created and still open at the end
    bool ended = false;
    bool done = false;
};

struct Frame {
    std::vector<NodeId> row;
    std::vector<std::vector<NodeId>> recs; // Rec nodes entered, per entry
    std::map<std::string, std::size_t> chans;
    std::map<std::string, NodeId> vals;
    NodeId result = -1;
};

struct PendingOffer {
    unsigned id;
    SourceLoc loc;
    NodeId left, right;
};

struct PendingFork {
    std::string session;
    SourceLoc loc;
    NodeId child, rest, state;
};

class Inferer {
public:
    explicit Inferer(const Program& p) : p_(p) {
        s_.set_tag_lookup([this](const std::string& tag) -> const std::vector<ValueType>* {
            const DataDecl* d = p_.find_data(tag);
            return d ? &d->payload : nullptr;
        });
    }

    InferenceResult run() {
        for (const auto& d : p_.sessions) out_.order.push_back(d.name);
        for (const auto& scc : components()) infer_component(scc);
        check_services();
        return std::move(out_);
    }

    SessionSignature schema(const Stmt& st) {
        schema_mode_ = true;
        Frame f;
        std::vector<std::string> names;
        for (const std::string* c : {&st.chan, &st.chan2})
            if (!c->empty() && std::find(names.begin(), names.end(), *c) == names.end()) names.push_back(*c);
        SessionSignature sig;
        for (const auto& n : names) {
            f.chans[n] = f.row.size();
            f.row.push_back(g_.fresh());
            f.recs.emplace_back();
            sig.channel_params.push_back({n, {0, static_cast<unsigned>(sig.channel_params.size())}});
        }
        const std::vector<NodeId> pre = f.row;
        f.result = unit();
        stmt(st, f);
        s_.solve();
        sig.pre.tail = sig.post.tail = 0;
        for (NodeId n : pre) sig.pre.entries.push_back(fold_and_default(g_, n, st.loc));
        for (NodeId n : f.row) sig.post.entries.push_back(fold_and_default(g_, n, st.loc));
        sig.result = g_.export_value(f.result);
        if (ended_) sig.residual.push_back({ResidualKind::EndedTail, 0});
        return sig;
    }

private:
    NodeId unit() { return g_.value(ValueKind::Unit); }
    NodeId end() { return g_.end(); }

    void unify(NodeId a, NodeId b, SourceLoc loc, const std::string& ctx = {}) { s_.unify(a, b, loc, ctx); }
    void unify_value(NodeId a, NodeId b, SourceLoc loc, const std::string& ctx = {}) {
        s_.unify_value(a, b, loc, ctx);
    }

    // ---- expressions ----

    NodeId expr(const Expr& e, Frame& f) {
        switch (e.kind) {
        case ExprKind::Int: return g_.value(ValueKind::Int);
        case ExprKind::Bool: return g_.value(ValueKind::Bool);
        case ExprKind::Str: return g_.value(ValueKind::Str);
        case ExprKind::Unit: return unit();
        case ExprKind::List: {
            NodeId elem = g_.fresh_value();
            for (const auto& a : e.args) unify_value(elem, expr(a, f), a.loc, "list element");
            return g_.value(ValueKind::List, elem);
        }
        case ExprKind::Var: {
            auto it = f.vals.find(e.text);
            if (it != f.vals.end()) return it->second;
            if (schema_mode_) return f.vals[e.text] = g_.fresh_value();
            throw TypeError(e.loc, "a bound variable", e.text);
        }
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Less: {
            for (const auto& a : e.args) unify_value(expr(a, f), g_.value(ValueKind::Int), a.loc, "arithmetic operand");
            return g_.value(e.kind == ExprKind::Less ? ValueKind::Bool : ValueKind::Int);
        }
        case ExprKind::Equal:
            unify_value(expr(e.args[0], f), expr(e.args[1], f), e.loc, "equality operands");
            return g_.value(ValueKind::Bool);
        case ExprKind::If: {
            unify_value(expr(e.args[0], f), g_.value(ValueKind::Bool), e.args[0].loc, "condition");
            NodeId t = expr(e.args[1], f);
            unify_value(t, expr(e.args[2], f), e.loc, "conditional branches");
            return t;
        }
        case ExprKind::Construct: {
            const DataDecl* d = p_.find_data(e.text);
            if (!d) throw TypeError(e.loc, "a declared constructor", e.text);
            for (std::size_t i = 0; i < e.args.size() && i < d->payload.size(); ++i)
                unify_value(expr(e.args[i], f), g_.import_value(d->payload[i]), e.args[i].loc,
                            "field " + std::to_string(i) + " of " + e.text);
            return g_.value(ValueKind::Tagged, -1, e.text);
        }
        case ExprKind::Project: {
            NodeId out = g_.fresh_value();
            s_.add_field(expr(e.args[0], f), e.index, out, e.loc);
            return out;
        }
        }
        return unit();
    }

    // ---- statements ----

    std::size_t offset(const Frame& f, const std::string& chan, SourceLoc loc) {
        auto it = f.chans.find(chan);
        if (it == f.chans.end()) throw TypeError(loc, "a channel in scope", chan);
        return it->second;
    }

    std::size_t append(Frame& f, NodeId entry) {
        f.row.push_back(entry);
        f.recs.emplace_back();
        return f.row.size() - 1;
    }

    // Replaces the entry at k by a fresh continuation after checking its head.
    NodeId advance(Frame& f, std::size_t k, NodeId head, NodeId cont, const Stmt& st) {
        unify(f.row[k], head, st.loc, "channel " + st.chan);
        f.row[k] = cont;
        return cont;
    }

    void bind_pattern(const Pattern& pat, NodeId v, Frame& f, SourceLoc loc) {
        switch (pat.kind) {
        case Pattern::Kind::Wildcard: return;
        case Pattern::Kind::Name: f.vals[pat.name] = v; return;
        case Pattern::Kind::Tagged: {
            unify_value(v, g_.value(ValueKind::Tagged, -1, pat.name), loc, "received value");
            const DataDecl* d = p_.find_data(pat.name);
            if (!d) throw TypeError(loc, "a declared constructor", pat.name);
            for (std::size_t i = 0; i < pat.fields.size() && i < d->payload.size(); ++i)
                if (pat.fields[i] != "_") f.vals[pat.fields[i]] = g_.import_value(d->payload[i]);
            return;
        }
        }
    }

    void block(const Block& b, Frame& f) {
        for (const auto& st : b) {
            f.result = unit();
            stmt(st, f);
            s_.propagate();
        }
    }

    // Entries from `from` on must be End.
    void end_entries(Frame& f, std::size_t from, SourceLoc loc, const std::string& why) {
        for (std::size_t i = from; i < f.row.size(); ++i) unify(f.row[i], end(), loc, why);
    }

    void stmt(const Stmt& st, Frame& f);
    void offer(const Stmt& st, Frame& f);
    void fork_block(const Stmt& st, Frame& f);
    void fork_call(const Stmt& st, Frame& f);
    void unwind(const Stmt& st, Frame& f);
    void recur(const Stmt& st, Frame& f);

    // ---- sessions ----

    struct Instance {
        std::vector<NodeId> pre, post, values, extras;
        NodeId result;
        const Skeleton* skeleton;
    };
    Instance instance(const std::string& name);
    void compose_into(Frame& f, std::size_t k, NodeId child, SourceLoc loc);

    std::vector<std::vector<std::string>> components();
    void infer_component(const std::vector<std::string>& names);
    void infer_decl(const SessionDecl& d);
    void check_services();

    const Program& p_;
    TypeGraph g_;
    Solver s_{g_};
    std::map<std::string, Skeleton> skel_;
    std::string current_;
    bool ended_ = false;
    bool schema_mode_ = false;
    std::vector<std::pair<std::string, SourceLoc>> extra_checks_;
    std::vector<PendingOffer> offers_;
    std::vector<PendingFork> forks_;
    InferenceResult out_;
};

} // namespace

namespace {

void Inferer::stmt(const Stmt& st, Frame& f) {
    switch (st.kind) {
    case StmtKind::New: f.chans[st.bind] = append(f, g_.node(SessionKind::Bot)); break;
    case StmtKind::Send: {
        const std::size_t k = offset(f, st.chan, st.loc);
        NodeId v = expr(st.expr, f);
        NodeId u = g_.fresh();
        advance(f, k, g_.message(SessionKind::Send, v, u), u, st);
        break;
    }
    case StmtKind::Recv: {
        const std::size_t k = offset(f, st.chan, st.loc);
        NodeId v = g_.fresh_value();
        NodeId u = g_.fresh();
        advance(f, k, g_.message(SessionKind::Recv, v, u), u, st);
        bind_pattern(st.pattern, v, f, st.loc);
        break;
    }
    case StmtKind::Sel1:
    case StmtKind::Sel2:
    case StmtKind::Sel1N:
    case StmtKind::Sel2N: {
        const std::size_t k = offset(f, st.chan, st.loc);
        const bool numbered = st.kind == StmtKind::Sel1N || st.kind == StmtKind::Sel2N;
        const bool first = st.kind == StmtKind::Sel1 || st.kind == StmtKind::Sel1N;
        NodeId l = g_.fresh(), r = g_.fresh();
        advance(f, k, g_.node(numbered ? SessionKind::SelectN : SessionKind::Select, l, r), first ? l : r, st);
        break;
    }
    case StmtKind::Offer:
    case StmtKind::OfferN: offer(st, f); break;
    case StmtKind::Throw: {
        const std::size_t k = offset(f, st.chan, st.loc);
        const std::size_t j = offset(f, st.chan2, st.loc);
        NodeId delegated = g_.fresh(), u = g_.fresh();
        advance(f, k, g_.node(SessionKind::Throw, delegated, u), u, st);
        NodeId rest = g_.fresh();
        s_.add_comp(delegated, rest, f.row[j], st.loc);
        f.row[j] = rest;
        break;
    }
    case StmtKind::Catch: {
        const std::size_t k = offset(f, st.chan, st.loc);
        NodeId caught = g_.fresh(), u = g_.fresh();
        advance(f, k, g_.node(SessionKind::Catch, caught, u), u, st);
        f.chans[st.bind] = append(f, caught);
        break;
    }
    case StmtKind::Fork:
        if (st.inline_fork) {
            fork_block(st, f);
        } else {
            fork_call(st, f);
        }
        ended_ = true;
        break;
    case StmtKind::Io:
        if (st.io == IoKind::Print) {
            expr(st.expr, f);
        } else if (!st.bind.empty()) {
            f.vals[st.bind] = g_.value(ValueKind::Str);
        }
        break;
    case StmtKind::Unwind: unwind(st, f); break;
    case StmtKind::Recur1:
        recur(st, f);
        ended_ = true;
        break;
    case StmtKind::Close: {
        const std::size_t k = offset(f, st.chan, st.loc);
        advance(f, k, g_.node(SessionKind::Close), end(), st);
        ended_ = true;
        break;
    }
    case StmtKind::Connect: {
        const ServiceDecl* svc = p_.find_service(st.target);
        if (!svc) throw TypeError(st.loc, "a declared service", st.target);
        f.chans[st.bind] = append(f, g_.import_type(svc->type));
        break;
    }
    case StmtKind::Return: f.result = expr(st.expr, f); break;
    }
}

void Inferer::offer(const Stmt& st, Frame& f) {
    const std::size_t k = offset(f, st.chan, st.loc);
    const bool numbered = st.kind == StmtKind::OfferN;
    NodeId l = g_.fresh(), r = g_.fresh();
    unify(f.row[k], g_.node(numbered ? SessionKind::OfferN : SessionKind::Offer, l, r), st.loc, "channel " + st.chan);
    Frame a = f, b = f;
    a.row[k] = l;
    b.row[k] = r;
    block(st.block1, a);
    block(st.block2, b);
    const std::size_t n = f.row.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::string name;
        for (const auto& [c, off] : f.chans)
            if (off == i) name = c;
        unify(a.row[i], b.row[i], st.loc, "branches disagree on channel " + name);
    }
    end_entries(a, n, st.loc, "a channel created inside a branch must be finished there");
    end_entries(b, n, st.loc, "a channel created inside a branch must be finished there");
    unify_value(a.result, b.result, st.loc, "results of the two branches");
    f.row.assign(a.row.begin(), a.row.begin() + static_cast<std::ptrdiff_t>(n));
    f.result = a.result;
    if (numbered) offers_.push_back({st.id, st.loc, l, r});
}

void Inferer::compose_into(Frame& f, std::size_t k, NodeId child, SourceLoc loc) {
    NodeId rest = g_.fresh();
    s_.add_comp(child, rest, f.row[k], loc);
    forks_.push_back({current_, loc, child, rest, f.row[k]});
    f.row[k] = rest;
}

void Inferer::fork_block(const Stmt& st, Frame& f) {
    Frame c;
    c.chans = f.chans;
    c.vals = f.vals;
    for (std::size_t i = 0; i < f.row.size(); ++i) append(c, g_.fresh());
    const std::vector<NodeId> pre = c.row;
    c.result = unit();
    block(st.block1, c);
    end_entries(c, 0, st.loc, "a forked process must finish every channel it uses");
    for (std::size_t i = 0; i < pre.size(); ++i) compose_into(f, i, pre[i], st.loc);
}

void Inferer::fork_call(const Stmt& st, Frame& f) {
    const SessionDecl* d = p_.find_session(st.target);
    if (!d) throw TypeError(st.loc, "a declared session", st.target);
    Instance in = instance(st.target);
    std::size_t ci = 0, vi = 0;
    for (std::size_t j = 0; j < d->params.size() && j < st.args.size(); ++j) {
        const Expr& arg = st.args[j];
        if (d->params[j].is_channel()) {
            const std::size_t k = offset(f, arg.text, arg.loc);
            unify(in.post[ci], end(), st.loc, st.target + " must finish channel " + arg.text);
            compose_into(f, k, in.pre[ci], st.loc);
            ++ci;
        } else {
            unify_value(expr(arg, f), in.values[vi++], arg.loc, "argument " + d->params[j].name + " of " + st.target);
        }
    }
    if (in.skeleton->done) {
        for (NodeId e : in.extras) unify(e, end(), st.loc, st.target + " must finish the channels it creates");
    } else {
        extra_checks_.emplace_back(st.target, st.loc);
    }
}

void Inferer::unwind(const Stmt& st, Frame& f) {
    const std::size_t k = offset(f, st.chan, st.loc);
    std::vector<NodeId>& scope = f.recs[k];
    NodeId e = g_.find(f.row[k]);
    if (g_.is_var(e)) {
        for (std::size_t i = scope.size(); i-- > 0;) {
            if (g_.level(scope[i]) != st.level) continue;
            unify(e, scope[i], st.loc, "unwind " + st.chan);
            scope.resize(i + 1);
            f.row[k] = g_.child(scope[i], 0);
            return;
        }
        NodeId body = g_.fresh();
        NodeId r = g_.rec(st.level, body);
        unify(e, r, st.loc);
        scope.push_back(r);
        f.row[k] = body;
        return;
    }
    if (g_.kind(e) != SessionKind::Rec)
        throw TypeError(st.loc, "a recursive session type", g_.describe(e), "unwind " + st.chan);
    if (g_.level(e) != st.level)
        throw TypeError(st.loc, "recursion at level " + print_level(st.level, false), g_.describe(e),
                        "unwind " + st.chan);
    auto it = std::find_if(scope.begin(), scope.end(), [&](NodeId r) { return g_.find(r) == e; });
    if (it != scope.end()) {
        scope.erase(it + 1, scope.end());
    } else {
        scope.push_back(e);
    }
    f.row[k] = g_.child(e, 0);
}

void Inferer::recur(const Stmt& st, Frame& f) {
    const std::size_t k = offset(f, st.chan, st.loc);
    Instance in = instance(st.target);
    unify(f.row[k], in.pre[0], st.loc, "recur1 " + st.target + " " + st.chan);
    for (std::size_t i = 0; i < f.row.size(); ++i)
        if (i != k) unify(f.row[i], end(), st.loc, "channels other than " + st.chan + " must be finished before recur1");
    f.row[k] = in.post[0];
    if (in.skeleton->done) {
        for (NodeId e : in.extras) unify(e, end(), st.loc, st.target + " must finish the channels it creates");
    } else {
        extra_checks_.emplace_back(st.target, st.loc);
    }
    f.result = in.result;
}

} // namespace

namespace {

Inferer::Instance Inferer::instance(const std::string& name) {
    const Skeleton& sk = skel_.at(name);
    Instance in{sk.pre, sk.post, sk.values, sk.extras, sk.result, &sk};
    if (!sk.done) return in;
    TypeGraph::Copier c;
    auto renew = [&](std::vector<NodeId>& v) {
        for (NodeId& n : v) n = g_.copy(n, c);
    };
    renew(in.pre);
    renew(in.post);
    renew(in.extras);
    for (NodeId& n : in.values) n = g_.copy_value(n, c);
    in.result = g_.copy_value(in.result, c);
    return in;
}

void collect_calls(const Block& b, std::set<std::string>& out) {
    for (const auto& st : b) {
        if ((st.kind == StmtKind::Fork && !st.inline_fork) || st.kind == StmtKind::Recur1) out.insert(st.target);
        collect_calls(st.block1, out);
        collect_calls(st.block2, out);
    }
}

// Strongly connected components of the call graph, callees first.
std::vector<std::vector<std::string>> Inferer::components() {
    std::map<std::string, std::set<std::string>> edges;
    for (const auto& d : p_.sessions) collect_calls(d.body, edges[d.name]);
    std::map<std::string, int> index, low;
    std::set<std::string> on_stack;
    std::vector<std::string> stack;
    std::vector<std::vector<std::string>> out;
    int counter = 0;
    std::function<void(const std::string&)> visit = [&](const std::string& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        for (const auto& w : edges[v]) {
            if (!p_.find_session(w)) continue;
            if (!index.count(w)) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack.count(w)) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] != index[v]) return;
        std::vector<std::string> scc;
        for (;;) {
            std::string w = stack.back();
            stack.pop_back();
            on_stack.erase(w);
            scc.push_back(w);
            if (w == v) break;
        }
        // Keep declaration order inside a component.
        std::vector<std::string> ordered;
        for (const auto& d : p_.sessions)
            if (std::find(scc.begin(), scc.end(), d.name) != scc.end()) ordered.push_back(d.name);
        out.push_back(ordered);
    };
    for (const auto& d : p_.sessions)
        if (!index.count(d.name)) visit(d.name);
    return out;
}

void Inferer::infer_decl(const SessionDecl& d) {
    current_ = d.name;
    ended_ = false;
    Skeleton& sk = skel_.at(d.name);
    Frame f;
    std::size_t ci = 0, vi = 0;
    for (const auto& p : d.params) {
        if (p.is_channel()) {
            f.chans[p.name] = append(f, sk.pre[ci++]);
        } else {
            f.vals[p.name] = sk.values[vi++];
        }
    }
    f.result = unit();
    block(d.body, f);
    for (std::size_t i = 0; i < sk.post.size(); ++i) unify(f.row[i], sk.post[i], d.loc);
    sk.extras.assign(f.row.begin() + static_cast<std::ptrdiff_t>(sk.post.size()), f.row.end());
    unify_value(f.result, sk.result, d.loc, "result of " + d.name);
    sk.ended = sk.ended || ended_;
}

void Inferer::infer_component(const std::vector<std::string>& names) {
    for (const auto& n : names) {
        const SessionDecl& d = *p_.find_session(n);
        Skeleton sk;
        for (const auto& p : d.params) {
            if (p.is_channel()) {
                sk.pre.push_back(g_.fresh());
                sk.post.push_back(g_.fresh());
            } else {
                sk.values.push_back(g_.import_value(*p.type));
            }
        }
        sk.result = g_.fresh_value();
        skel_[n] = sk;
    }
    for (const auto& n : names) infer_decl(*p_.find_session(n));
    for (const auto& [callee, loc] : extra_checks_)
        for (NodeId e : skel_.at(callee).extras)
            unify(e, end(), loc, callee + " must finish the channels it creates");
    extra_checks_.clear();
    s_.solve();

    for (const auto& o : offers_) {
        NodeId l = g_.find(o.left), r = g_.find(o.right);
        auto tag_of = [&](NodeId n) -> std::string {
            if (g_.kind(n) != SessionKind::Recv) return {};
            NodeId v = g_.value_of(n);
            return g_.value_kind(v) == ValueKind::Tagged ? g_.tag(v) : std::string();
        };
        const std::string lt = tag_of(l), rt = tag_of(r);
        if (lt.empty() || rt.empty() || lt == rt)
            throw TypeError(o.loc, "offerN branches that each start by receiving a distinct tagged value",
                            g_.describe(l) + " and " + g_.describe(r));
        out_.offer_tags[o.id] = lt;
    }
    offers_.clear();

    for (const auto& n : names) {
        const SessionDecl& d = *p_.find_session(n);
        Skeleton& sk = skel_.at(n);
        SessionSignature sig;
        sig.pre.tail = sig.post.tail = 0;
        for (NodeId x : sk.pre) sig.pre.entries.push_back(fold_and_default(g_, x, d.loc));
        for (NodeId x : sk.post) sig.post.entries.push_back(fold_and_default(g_, x, d.loc));
        for (NodeId x : sk.extras) sig.post.entries.push_back(fold_and_default(g_, x, d.loc));
        sig.result = g_.export_value(sk.result);
        if (sk.ended) sig.residual.push_back({ResidualKind::EndedTail, 0});
        std::size_t ci = 0, vi = 0;
        for (const auto& p : d.params) {
            if (p.is_channel()) {
                sig.channel_params.push_back({p.name, {0, static_cast<unsigned>(ci++)}});
            } else {
                sig.value_params.push_back({p.name, g_.export_value(sk.values[vi++])});
            }
        }
        out_.signatures[n] = std::move(sig);
        sk.done = true;
    }

    for (const auto& fk : forks_) {
        if (g_.kind(fk.child) == SessionKind::End) continue;
        out_.forks.push_back({fk.session, fk.loc, fold_and_default(g_, fk.child, fk.loc),
                              fold_and_default(g_, fk.rest, fk.loc), fold_and_default(g_, fk.state, fk.loc)});
    }
    forks_.clear();
}

void Inferer::check_services() {
    for (const auto& svc : p_.service_decls) {
        if (!svc.server) continue;
        const SessionDecl* d = p_.find_session(*svc.server);
        if (!d) throw TypeError({}, "a declared session", *svc.server, "server of " + svc.name);
        Instance in = instance(*svc.server);
        const std::string ctx = "session " + d->name + " serving " + svc.name;
        s_.add_dual(g_.import_type(svc.type), in.pre[0], d->loc);
        unify(in.post[0], end(), d->loc, ctx);
        for (NodeId e : in.extras) unify(e, end(), d->loc, ctx);
        s_.solve();
    }
}

} // namespace

SessionType fold_and_default(TypeGraph& graph, NodeId node, SourceLoc loc) { return graph.export_type(node, loc); }

InferenceResult infer_program(const Program& program) {
    resolve_names(program);
    return Inferer(program).run();
}

SessionSignature infer_session(const Program& program, const std::string& name) {
    InferenceResult r = infer_program(program);
    auto it = r.signatures.find(name);
    if (it == r.signatures.end()) throw Error("no session named " + name);
    return it->second;
}

SessionSignature primitive_schema(const Stmt& stmt) {
    static const Program empty;
    return Inferer(empty).schema(stmt);
}

void check_runnable(const Program& program, const InferenceResult& result, const std::string& entry) {
    const SessionDecl* d = program.find_session(entry);
    if (!d) throw TypeError({}, "an entry session", entry);
    if (!d->params.empty())
        throw TypeError(d->loc, "an entry session without parameters", entry + " takes " +
                                                                            std::to_string(d->params.size()));
    const SessionSignature& sig = result.at(entry);
    for (const auto& u : sig.post.entries)
        if (!u.is(SessionKind::End) && !u.is(SessionKind::UVar))
            throw TypeError(d->loc, "End", print_type(u), "a channel created by " + entry + " is left unfinished");
}

} // namespace sessions
