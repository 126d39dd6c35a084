#include <algorithm>
#include <optional>

#include "sessions/oracle.hpp"
#include "sessions/surface.hpp"
#include "sessions/type_syntax.hpp"

namespace sessions {

namespace {

// Holes are UVar / value Var ids; the substitution is copied to backtrack.
struct Subst {
    std::map<unsigned, SessionType> s;
    std::map<unsigned, ValueType> v;
    // Pairs that must end up dual once either side is known.
    std::vector<std::pair<SessionType, SessionType>> links;
    unsigned next = 1u << 24;

    SessionType hole() { return SessionType::uvar(next++); }
    ValueType value_hole() { return ValueType::var(next++); }

    ValueType resolve(const ValueType& t) const {
        switch (t.kind()) {
        case ValueKind::Var: {
            auto it = v.find(t.var_id());
            return it == v.end() ? t : resolve(it->second);
        }
        case ValueKind::List: return ValueType::list(resolve(t.elem()));
        default: return t;
        }
    }

    SessionType resolve(const SessionType& u) const {
        using K = SessionKind;
        switch (u.kind()) {
        case K::UVar: {
            auto it = s.find(u.uvar_id());
            return it == s.end() ? u : resolve(it->second);
        }
        case K::Send: return SessionType::send(resolve(u.value()), resolve(u.cont()));
        case K::Recv: return SessionType::recv(resolve(u.value()), resolve(u.cont()));
        case K::Rec: return SessionType::rec(u.level(), resolve(u.body()));
        case K::End:
        case K::Bot:
        case K::Close:
        case K::Var: return u;
        default: return SessionType::binary(u.kind(), resolve(u.left()), resolve(u.right()));
        }
    }

    bool unify(const ValueType& a0, const ValueType& b0) {
        ValueType a = resolve(a0), b = resolve(b0);
        if (a.is(ValueKind::Var)) {
            if (!(b.is(ValueKind::Var) && b.var_id() == a.var_id())) v.insert_or_assign(a.var_id(), b);
            return true;
        }
        if (b.is(ValueKind::Var)) {
            v.insert_or_assign(b.var_id(), a);
            return true;
        }
        if (a.kind() != b.kind()) return false;
        if (a.is(ValueKind::List)) return unify(a.elem(), b.elem());
        return a == b;
    }

    bool unify(const SessionType& a0, const SessionType& b0) {
        SessionType a = resolve(a0), b = resolve(b0);
        if (a.is(SessionKind::UVar)) {
            if (!(b.is(SessionKind::UVar) && b.uvar_id() == a.uvar_id())) s.insert_or_assign(a.uvar_id(), b);
            return true;
        }
        if (b.is(SessionKind::UVar)) {
            s.insert_or_assign(b.uvar_id(), a);
            return true;
        }
        if (a.kind() != b.kind() || a.level() != b.level()) return false;
        switch (a.kind()) {
        case SessionKind::Send:
        case SessionKind::Recv: return unify(a.value(), b.value()) && unify(a.cont(), b.cont());
        case SessionKind::Rec: return unify(a.body(), b.body());
        case SessionKind::End:
        case SessionKind::Bot:
        case SessionKind::Close:
        case SessionKind::Var: return true;
        default: return unify(a.left(), b.left()) && unify(a.right(), b.right());
        }
    }

    // Dual of a partially known type; unknown parts get a linked hole.
    std::optional<SessionType> dual(const SessionType& u0) {
        using K = SessionKind;
        SessionType u = resolve(u0);
        auto d = [this](const SessionType& x) { return dual(x); };
        switch (u.kind()) {
        case K::UVar: {
            SessionType h = hole();
            links.emplace_back(u, h);
            return h;
        }
        case K::Bot: return std::nullopt;
        case K::End:
        case K::Close:
        case K::Var: return u;
        case K::Send:
        case K::Recv: {
            auto c = d(u.cont());
            if (!c) return std::nullopt;
            return u.is(K::Send) ? SessionType::recv(u.value(), *c) : SessionType::send(u.value(), *c);
        }
        case K::Rec: {
            auto b = d(u.body());
            if (!b) return std::nullopt;
            return SessionType::rec(u.level(), *b);
        }
        case K::Throw:
        case K::Catch: {
            auto c = d(u.right());
            if (!c) return std::nullopt;
            return SessionType::binary(u.is(K::Throw) ? K::Catch : K::Throw, u.left(), *c);
        }
        default: {
            auto l = d(u.left());
            auto r = d(u.right());
            if (!l || !r) return std::nullopt;
            static const std::map<K, K> mirror = {{K::Select, K::Offer},
                                                  {K::Offer, K::Select},
                                                  {K::SelectN, K::OfferN},
                                                  {K::OfferN, K::SelectN}};
            return SessionType::binary(mirror.at(u.kind()), *l, *r);
        }
        }
    }

    bool settle() {
        for (bool progress = true; progress;) {
            progress = false;
            for (std::size_t i = 0; i < links.size(); ++i) {
                SessionType a = resolve(links[i].first), b = resolve(links[i].second);
                if (a.is(SessionKind::UVar) && b.is(SessionKind::UVar)) continue;
                if (a.is(SessionKind::UVar)) std::swap(a, b);
                links.erase(links.begin() + static_cast<std::ptrdiff_t>(i));
                auto da = dual(a);
                if (!da || !unify(b, *da)) return false;
                progress = true;
                break;
            }
        }
        return true;
    }
};

bool holds_holes(const ValueType& v) { return !v.is_ground(); }

bool holds_holes(const SessionType& u) {
    if (u.is(SessionKind::UVar)) return true;
    if ((u.is(SessionKind::Send) || u.is(SessionKind::Recv)) && holds_holes(u.value())) return true;
    switch (u.kind()) {
    case SessionKind::Send:
    case SessionKind::Recv: return holds_holes(u.cont());
    case SessionKind::Rec: return holds_holes(u.body());
    case SessionKind::End:
    case SessionKind::Bot:
    case SessionKind::Close:
    case SessionKind::Var:
    case SessionKind::UVar: return false;
    default: return holds_holes(u.left()) || holds_holes(u.right());
    }
}

class ExprTyper {
public:
    ExprTyper(const DataTable& data, Subst& s) : data_(data), s_(s) {}

    ValueType type(const Sorting& g, const Expr& e) {
        switch (e.kind) {
        case ExprKind::Int: return ValueType::integer();
        case ExprKind::Bool: return ValueType::boolean();
        case ExprKind::Str: return ValueType::str();
        case ExprKind::Unit: return ValueType::unit();
        case ExprKind::List: {
            ValueType elem = s_.value_hole();
            for (const auto& a : e.args) need(type(g, a), elem, "list element");
            return ValueType::list(s_.resolve(elem));
        }
        case ExprKind::Var: {
            auto it = g.find(e.text);
            if (it == g.end()) throw ExprTypeError("unbound variable " + e.text);
            return s_.resolve(it->second);
        }
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Less:
            for (const auto& a : e.args) need(type(g, a), ValueType::integer(), "arithmetic operand");
            return e.kind == ExprKind::Less ? ValueType::boolean() : ValueType::integer();
        case ExprKind::Equal: need(type(g, e.args[0]), type(g, e.args[1]), "equality operands"); return ValueType::boolean();
        case ExprKind::If: {
            need(type(g, e.args[0]), ValueType::boolean(), "condition");
            ValueType t = type(g, e.args[1]);
            need(type(g, e.args[2]), t, "conditional branches");
            return s_.resolve(t);
        }
        case ExprKind::Construct: {
            auto it = data_.find(e.text);
            if (it == data_.end()) throw ExprTypeError("unknown constructor " + e.text);
            if (it->second.size() != e.args.size()) throw ExprTypeError("wrong number of fields for " + e.text);
            for (std::size_t i = 0; i < e.args.size(); ++i) need(type(g, e.args[i]), it->second[i], "field of " + e.text);
            return ValueType::tagged(e.text);
        }
        case ExprKind::Project: {
            ValueType t = s_.resolve(type(g, e.args[0]));
            if (!t.is(ValueKind::Tagged)) throw ExprTypeError("projection from " + print_value_type(t));
            auto it = data_.find(t.name());
            if (it == data_.end() || e.index >= it->second.size())
                throw ExprTypeError("no field " + std::to_string(e.index) + " in " + t.name());
            return it->second[e.index];
        }
        }
        return ValueType::unit();
    }

private:
    const DataTable& data_;
    Subst& s_;

    void need(const ValueType& found, const ValueType& expected, const std::string& what) {
        if (!s_.unify(found, expected))
            throw ExprTypeError(what + ": expected " + print_value_type(s_.resolve(expected)) + ", found " +
                                print_value_type(s_.resolve(found)));
    }
};

} // namespace

DataTable data_table(const Program& program) {
    DataTable t;
    for (const auto& d : program.data_decls) t[d.name] = d.payload;
    return t;
}

ValueType check_expr(const Sorting& gamma, const Expr& e, const DataTable& data) {
    Subst s;
    ExprTyper typer(data, s);
    return s.resolve(typer.type(gamma, e));
}

std::string print_env(const SessionEnv& delta) {
    std::string out;
    for (const auto& [c, u] : delta) {
        if (!out.empty()) out += ", ";
        out += c + ": " + print_type(u);
    }
    return out.empty() ? "∅" : out;
}

std::string print_derivation(const Derivation& d) {
    std::string out;
    std::vector<std::pair<const Derivation*, int>> todo{{&d, 0}};
    while (!todo.empty()) {
        auto [n, depth] = todo.back();
        todo.pop_back();
        out += std::string(2 * depth, ' ') + n->rule + "  " + n->judgement + "\n";
        for (auto it = n->premises.rbegin(); it != n->premises.rend(); ++it) todo.push_back({&*it, depth + 1});
    }
    return out;
}


namespace {

std::string head(const Process& p) {
    switch (p.kind) {
    case ProcKind::Inact: return "inact";
    case ProcKind::Send: return "send " + p.chan + " " + print_expr(p.expr);
    case ProcKind::Recv: return "recv " + p.chan;
    case ProcKind::Sel1: return "sel1 " + p.chan;
    case ProcKind::Sel2: return "sel2 " + p.chan;
    case ProcKind::Offer: return "offer " + p.chan;
    case ProcKind::SendS: return "sendS " + p.chan + " " + p.name;
    case ProcKind::RecvS: return "recvS " + p.chan + " " + p.name;
    case ProcKind::Par: return "P ||| Q";
    case ProcKind::New: return "new " + p.name;
    case ProcKind::Io: return p.io == IoKind::Print ? "print " + print_expr(p.expr) : "readline " + p.name;
    }
    return "";
}

class Checker {
public:
    Checker(const DataTable& data, CheckOptions options) : data_(data), opt_(options) {}

    std::string reason;

    bool go(const Process& p, const Sorting& g, SessionEnv d, Subst& s, Derivation& out) {
        for (auto it = d.begin(); it != d.end();) {
            it->second = s.resolve(it->second);
            it = it->second.is(SessionKind::End) ? d.erase(it) : std::next(it);
        }
        out.judgement = head(p);
        out.env = d;
        std::string key;
        if (opt_.memo && ground(d, g, s)) {
            key = std::to_string(reinterpret_cast<std::uintptr_t>(&p)) + "|" + print_env(d) + "|" + gamma_text(g, s);
            auto it = memo_.find(key);
            if (it != memo_.end()) {
                if (it->second) out = *it->second;
                return it->second.has_value();
            }
        }
        const bool ok = rule(p, g, d, s, out);
        if (!key.empty()) memo_[key] = ok ? std::optional<Derivation>(out) : std::nullopt;
        return ok;
    }

private:
    const DataTable& data_;
    CheckOptions opt_;
    std::map<std::string, std::optional<Derivation>> memo_;

    static bool ground(const SessionEnv& d, const Sorting& g, const Subst& s) {
        for (const auto& [c, u] : d)
            if (holds_holes(u)) return false;
        for (const auto& [x, v] : g)
            if (holds_holes(s.resolve(v))) return false;
        return true;
    }

    static std::string gamma_text(const Sorting& g, const Subst& s) {
        std::string out;
        for (const auto& [x, v] : g) out += x + ":" + print_value_type(s.resolve(v)) + ",";
        return out;
    }

    bool fail(const std::string& why) {
        if (reason.empty()) reason = why;
        return false;
    }

    static SessionType at(const SessionEnv& d, const std::string& c) {
        auto it = d.find(c);
        return it == d.end() ? SessionType::end() : it->second;
    }

    static void set(SessionEnv& d, const std::string& c, const SessionType& u) { d.insert_or_assign(c, u); }

    bool expect(const std::string& rule, const std::string& c, const SessionEnv& d, const SessionType& shape,
                Subst& s) {
        if (s.unify(at(d, c), shape)) return true;
        return fail(rule + ": channel " + c + " has type " + print_type(s.resolve(at(d, c))) + ", expected " +
                    print_type(s.resolve(shape)));
    }

    bool bind_pattern(const Pattern& pat, const ValueType& v, Sorting& g, Subst& s) {
        switch (pat.kind) {
        case Pattern::Kind::Wildcard: return true;
        case Pattern::Kind::Name: g.insert_or_assign(pat.name, v); return true;
        case Pattern::Kind::Tagged: {
            if (!s.unify(v, ValueType::tagged(pat.name)))
                return fail("[Rcv]: pattern " + pat.name + " against " + print_value_type(s.resolve(v)));
            auto it = data_.find(pat.name);
            if (it == data_.end() || it->second.size() != pat.fields.size())
                return fail("[Rcv]: pattern " + pat.name + " does not match its declaration");
            for (std::size_t i = 0; i < pat.fields.size(); ++i)
                if (pat.fields[i] != "_") g.insert_or_assign(pat.fields[i], it->second[i]);
            return true;
        }
        }
        return true;
    }

    bool rule(const Process& p, const Sorting& g, SessionEnv d, Subst& s, Derivation& out) {
        switch (p.kind) {
        case ProcKind::Inact: {
            out.rule = "[Inact]";
            for (const auto& [c, u] : d)
                if (!s.unify(u, SessionType::end()))
                    return fail("[Inact]: environment not completed, " + c + ": " + print_type(s.resolve(u)));
            return true;
        }
        case ProcKind::Send: {
            out.rule = "[Send]";
            ValueType v = s.value_hole();
            SessionType u = s.hole();
            if (!expect("[Send]", p.chan, d, SessionType::send(v, u), s)) return false;
            try {
                ExprTyper typer(data_, s);
                ValueType t = typer.type(g, p.expr);
                if (!s.unify(t, v))
                    return fail("[Send]: value " + print_expr(p.expr) + " has type " + print_value_type(s.resolve(t)) +
                                ", expected " + print_value_type(s.resolve(v)));
            } catch (const ExprTypeError& e) {
                return fail(std::string("[Send]: ") + e.what());
            }
            set(d, p.chan, u);
            return premise(*p.p, g, d, s, out);
        }
        case ProcKind::Recv: {
            out.rule = "[Rcv]";
            ValueType v = s.value_hole();
            SessionType u = s.hole();
            if (!expect("[Rcv]", p.chan, d, SessionType::recv(v, u), s)) return false;
            Sorting g2 = g;
            if (!bind_pattern(p.pattern, v, g2, s)) return false;
            set(d, p.chan, u);
            return premise(*p.p, g2, d, s, out);
        }
        case ProcKind::Sel1:
        case ProcKind::Sel2: {
            out.rule = "[Sel]";
            SessionType u1 = s.hole(), u2 = s.hole();
            if (!expect("[Sel]", p.chan, d, SessionType::select(u1, u2), s)) return false;
            set(d, p.chan, p.kind == ProcKind::Sel1 ? u1 : u2);
            return premise(*p.p, g, d, s, out);
        }
        case ProcKind::Offer: {
            out.rule = "[Br]";
            SessionType u1 = s.hole(), u2 = s.hole();
            if (!expect("[Br]", p.chan, d, SessionType::offer(u1, u2), s)) return false;
            SessionEnv d2 = d;
            set(d, p.chan, u1);
            set(d2, p.chan, u2);
            return premise(*p.p, g, d, s, out) && premise(*p.q, g, d2, s, out);
        }
        case ProcKind::SendS: return thr(p, g, d, s, out);
        case ProcKind::RecvS: {
            out.rule = "[Cat]";
            SessionType u1 = s.hole(), u2 = s.hole();
            if (!expect("[Cat]", p.chan, d, SessionType::catch_(u1, u2), s)) return false;
            if (!at(d, p.name).is(SessionKind::End)) return fail("[Cat]: " + p.name + " is already in the environment");
            set(d, p.chan, u2);
            set(d, p.name, u1);
            return premise(*p.p, g, d, s, out);
        }
        case ProcKind::New: {
            out.rule = "[Cres]";
            if (!at(d, p.name).is(SessionKind::End)) return fail("[Cres]: " + p.name + " is already in the environment");
            set(d, p.name, SessionType::bot());
            return premise(*p.p, g, d, s, out);
        }
        case ProcKind::Io: {
            out.rule = "[Io]";
            Sorting g2 = g;
            if (p.io == IoKind::Print) {
                try {
                    ExprTyper typer(data_, s);
                    typer.type(g, p.expr);
                } catch (const ExprTypeError& e) {
                    return fail(std::string("[Io]: ") + e.what());
                }
            } else {
                g2.insert_or_assign(p.name, ValueType::str());
            }
            return premise(*p.p, g2, d, s, out);
        }
        case ProcKind::Par: return conc(p, g, d, s, out);
        }
        return false;
    }

    bool premise(const Process& p, const Sorting& g, const SessionEnv& d, Subst& s, Derivation& out) {
        Derivation sub;
        if (!go(p, g, d, s, sub)) return false;
        out.premises.push_back(std::move(sub));
        return true;
    }

    // [Thr] with the thrown entry split as U1 ⊕ r; r stays with the thrower.
    bool thr(const Process& p, const Sorting& g, SessionEnv d, Subst& s, Derivation& out) {
        out.rule = "[Thr]";
        if (p.chan == p.name) return fail("[Thr]: " + p.chan + " cannot be thrown over itself");
        SessionType u1 = s.hole(), u2 = s.hole();
        if (!expect("[Thr]", p.chan, d, SessionType::throw_(u1, u2), s)) return false;
        const SessionType w = s.resolve(at(d, p.name));
        const SessionType sent = s.resolve(u1);
        const bool used = [&] {
            auto fv = free_channels(*p.p);
            return std::find(fv.begin(), fv.end(), p.name) != fv.end();
        }();
        set(d, p.chan, u2);
        if (sent.is(SessionKind::UVar) && used && w.is(SessionKind::Bot)) {
            // The thrower's own use decides what is delegated.
            SessionType r = s.hole();
            set(d, p.name, r);
            if (!premise(*p.p, g, d, s, out)) return false;
            auto du = s.dual(r);
            if (!du || !s.unify(u1, *du) || !s.settle())
                return fail("[Thr]: no delegated type matches the remaining use of " + p.name);
            return true;
        }
        {
            Subst trial = s;
            if (trial.unify(u1, w)) {
                s = trial;
                set(d, p.name, SessionType::end());
                return premise(*p.p, g, d, s, out);
            }
        }
        if (sent.is(SessionKind::End)) {
            set(d, p.name, w);
            return premise(*p.p, g, d, s, out);
        }
        if (w.is(SessionKind::Bot)) {
            auto r = s.dual(sent);
            if (!r) return fail("[Thr]: delegated type " + print_type(sent) + " has no dual");
            set(d, p.name, *r);
            return premise(*p.p, g, d, s, out);
        }
        return fail("[Thr]: " + p.name + " has type " + print_type(w) + ", cannot delegate " + print_type(sent));
    }

    struct Option {
        SessionType left, right;
        bool dual = false; // right is the dual of the left's final use
    };

    bool conc(const Process& p, const Sorting& g, const SessionEnv& d, Subst& s, Derivation& out) {
        out.rule = "[Conc]";
        const auto fv1 = free_channels(*p.p), fv2 = free_channels(*p.q);
        auto in = [](const std::vector<std::string>& v, const std::string& c) {
            return std::find(v.begin(), v.end(), c) != v.end();
        };
        std::vector<std::string> chans;
        std::vector<std::vector<Option>> options;
        for (const auto& [c, u] : d) {
            std::vector<Option> opts;
            const bool l = in(fv1, c), r = in(fv2, c);
            if (opt_.prune && !(l && r)) {
                opts.push_back(r && !l ? Option{SessionType::end(), u} : Option{u, SessionType::end()});
            } else {
                opts.push_back({u, SessionType::end()});
                opts.push_back({SessionType::end(), u});
                if (u.is(SessionKind::Bot)) opts.push_back({SessionType::uvar(0), SessionType::end(), true});
            }
            chans.push_back(c);
            options.push_back(std::move(opts));
        }
        std::vector<std::size_t> pick(chans.size(), 0);
        const std::string before = reason;
        for (;;) {
            bool any_dual = false;
            for (std::size_t i = 0; i < chans.size(); ++i) any_dual = any_dual || options[i][pick[i]].dual;
            for (int first = 0; first < (any_dual ? 2 : 1); ++first) {
                Subst trial = s;
                SessionEnv d1, d2;
                std::vector<std::pair<std::string, SessionType>> duals;
                for (std::size_t i = 0; i < chans.size(); ++i) {
                    Option o = options[i][pick[i]];
                    if (o.dual) {
                        o.left = trial.hole();
                        duals.emplace_back(chans[i], o.left);
                    }
                    (first ? d2 : d1)[chans[i]] = o.left;
                    (first ? d1 : d2)[chans[i]] = o.right;
                }
                const Process& a = first ? *p.q : *p.p;
                const Process& b = first ? *p.p : *p.q;
                SessionEnv& da = first ? d2 : d1;
                SessionEnv& db = first ? d1 : d2;
                Derivation ra, rb;
                bool ok = go(a, g, da, trial, ra);
                for (const auto& [c, h] : duals) {
                    if (!ok) break;
                    auto du = trial.dual(h);
                    ok = du.has_value();
                    if (ok) db[c] = *du;
                }
                ok = ok && go(b, g, db, trial, rb) && trial.settle();
                if (ok) {
                    s = trial;
                    reason = before;
                    out.premises.push_back(std::move(first ? rb : ra));
                    out.premises.push_back(std::move(first ? ra : rb));
                    return true;
                }
            }
            std::size_t i = 0;
            while (i < pick.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
            if (i == pick.size()) break;
        }
        return fail("[Conc]: no split of " + print_env(d) + " types both components");
    }
};

} // namespace

namespace {
void finish(Derivation& d, Subst& s) {
    for (auto it = d.env.begin(); it != d.env.end();) {
        it->second = s.resolve(it->second);
        it = it->second.is(SessionKind::End) ? d.env.erase(it) : std::next(it);
    }
    d.judgement = "⊢ " + d.judgement + " ▷ " + print_env(d.env);
    for (auto& p : d.premises) finish(p, s);
}
} // namespace

CheckResult check(const Sorting& gamma, const Process& p, const SessionEnv& delta, const DataTable& data,
                  CheckOptions options) {
    Checker c(data, options);
    Subst s;
    CheckResult r;
    r.ok = c.go(p, gamma, delta, s, r.derivation);
    if (r.ok && !s.settle()) {
        r.ok = false;
        c.reason = "duality constraints between parallel components are unsatisfiable";
    }
    if (!r.ok) r.reason = c.reason;
    finish(r.derivation, s);
    return r;
}

} // namespace sessions
