#include <map>

#include "sessions/solver.hpp"

namespace sessions {

void Solver::unify(NodeId a, NodeId b, SourceLoc loc, const std::string& context) {
    try {
        g_.unify(a, b);
    } catch (const TypeGraph::Clash& c) {
        if (c.value) throw TypeError(loc, g_.describe_value(c.a), g_.describe_value(c.b), context);
        throw TypeError(loc, g_.describe(c.a), g_.describe(c.b), context);
    }
}

void Solver::unify_lazy(NodeId a, NodeId b, SourceLoc loc, const std::function<std::string()>& context) {
    try {
        g_.unify(a, b);
    } catch (const TypeGraph::Clash& c) {
        if (c.value) throw TypeError(loc, g_.describe_value(c.a), g_.describe_value(c.b), context());
        throw TypeError(loc, g_.describe(c.a), g_.describe(c.b), context());
    }
}

void Solver::unify_value(NodeId a, NodeId b, SourceLoc loc, const std::string& context) {
    try {
        g_.unify_value(a, b);
    } catch (const TypeGraph::Clash& c) {
        throw TypeError(loc, g_.describe_value(c.a), g_.describe_value(c.b), context);
    }
}

void Solver::add_dual(NodeId a, NodeId b, SourceLoc loc) { duals_.push_back({a, b, loc}); }

void Solver::add_comp(NodeId child, NodeId rest, NodeId state, SourceLoc loc) {
    comps_.push_back({child, rest, state, loc});
}

void Solver::add_field(NodeId tagged, unsigned index, NodeId out, SourceLoc loc) {
    fields_.push_back({tagged, index, out, loc});
}

namespace {
SessionKind mirror(SessionKind k) {
    switch (k) {
    case SessionKind::Send: return SessionKind::Recv;
    case SessionKind::Recv: return SessionKind::Send;
    case SessionKind::Select: return SessionKind::Offer;
    case SessionKind::Offer: return SessionKind::Select;
    case SessionKind::SelectN: return SessionKind::OfferN;
    case SessionKind::OfferN: return SessionKind::SelectN;
    case SessionKind::Throw: return SessionKind::Catch;
    case SessionKind::Catch: return SessionKind::Throw;
    default: return k;
    }
}
} // namespace

void Solver::expand_dual(DualC& d) {
    const SourceLoc loc = d.loc;
    NodeId a = g_.find(d.a), b = g_.find(d.b);
    d.expanded = true;
    NodeId known = g_.is_var(a) ? b : a;
    NodeId other = known == a ? b : a;
    const std::string what = "duality of " + g_.describe(a) + " and " + g_.describe(b);
    auto context = [what] { return what; };
    const SessionKind k = g_.kind(known);
    switch (k) {
    case SessionKind::End:
    case SessionKind::Close: unify_lazy(other, g_.node(k), loc, context); return;
    case SessionKind::Bot: throw CompositionError(loc, "Bot has no dual");
    case SessionKind::Send:
    case SessionKind::Recv: {
        NodeId cont = g_.fresh();
        NodeId from = g_.child(known, 0);
        unify_lazy(other, g_.message(mirror(k), g_.value_of(known), cont), loc, context);
        duals_.push_back({from, cont, loc});
        return;
    }
    case SessionKind::Throw:
    case SessionKind::Catch: {
        NodeId cont = g_.fresh();
        NodeId delegated = g_.child(known, 0), from = g_.child(known, 1);
        unify_lazy(other, g_.node(mirror(k), delegated, cont), loc, context);
        duals_.push_back({from, cont, loc});
        return;
    }
    case SessionKind::Rec: {
        NodeId body = g_.fresh();
        NodeId from = g_.child(known, 0);
        unify_lazy(other, g_.rec(g_.level(known), body), loc, context);
        duals_.push_back({from, body, loc});
        return;
    }
    default: {
        NodeId l = g_.fresh(), r = g_.fresh();
        NodeId l0 = g_.child(known, 0), r0 = g_.child(known, 1);
        unify_lazy(other, g_.node(mirror(k), l, r), loc, context);
        duals_.push_back({l0, l, loc});
        duals_.push_back({r0, r, loc});
        return;
    }
    }
}

bool Solver::step_duals() {
    bool progress = false;
    // A type has one dual: two constraints sharing a side force the other sides equal.
    std::map<NodeId, std::pair<std::size_t, int>> owner;
    for (std::size_t i = 0; i < duals_.size(); ++i) {
        if (duals_[i].dead) continue;
        for (int side = 0; side < 2 && !duals_[i].dead; ++side) {
            NodeId rep = g_.find(side == 0 ? duals_[i].a : duals_[i].b);
            NodeId other = side == 0 ? duals_[i].b : duals_[i].a;
            auto it = owner.find(rep);
            if (it == owner.end()) {
                owner[rep] = {i, side};
                continue;
            }
            if (it->second.first == i) continue;
            const DualC& j = duals_[it->second.first];
            NodeId counterpart = it->second.second == 0 ? j.b : j.a;
            unify(counterpart, other, duals_[i].loc, "a session type has a single dual");
            duals_[i].dead = true;
            progress = true;
        }
    }
    // Only pairs that existed before this pass; new ones wait for the check above.
    const std::size_t n = duals_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (duals_[i].dead || duals_[i].expanded) continue;
        if (g_.is_var(duals_[i].a) && g_.is_var(duals_[i].b)) continue;
        DualC copy = duals_[i];
        duals_[i].expanded = true;
        expand_dual(copy);
        progress = true;
    }
    return progress;
}

bool Solver::fire_comp(CompC& c) {
    const NodeId x = g_.find(c.child), r = g_.find(c.rest), s = g_.find(c.state);
    const SessionKind kx = g_.kind(x), kr = g_.kind(r), ks = g_.kind(s);
    const SourceLoc loc = c.loc;
    auto context = [this, s] { return "composition into " + g_.describe(s); };
    if (kx == SessionKind::Close || kr == SessionKind::Close)
        throw CompositionError(loc, "a Close endpoint cannot be shared with a forked process");
    auto end = [&] { return g_.end(); };
    if (kx == SessionKind::End) {
        unify_lazy(r, s, loc, context);
        return true;
    }
    if (kr == SessionKind::End) {
        unify_lazy(x, s, loc, context);
        return true;
    }
    if (kx == SessionKind::Bot || kr == SessionKind::Bot) {
        unify_lazy(kx == SessionKind::Bot ? r : x, end(), loc, context);
        unify_lazy(s, g_.node(SessionKind::Bot), loc, context);
        return true;
    }
    const bool xv = kx == SessionKind::UVar, rv = kr == SessionKind::UVar;
    if (!xv && !rv) {
        unify_lazy(s, g_.node(SessionKind::Bot), loc, [this, x, r] {
            return "both sides of a fork use the channel: " + g_.describe(x) + " and " + g_.describe(r);
        });
        add_dual(x, r, loc);
        return true;
    }
    if (ks == SessionKind::UVar) return false;
    if (ks == SessionKind::End) {
        unify_lazy(x, end(), loc, context);
        unify_lazy(r, end(), loc, context);
        return true;
    }
    if (ks == SessionKind::Bot) {
        if (xv && rv) return false;
        add_dual(x, r, loc);
        return true;
    }
    if (!xv) {
        unify_lazy(r, end(), loc, context);
        unify_lazy(x, s, loc, context);
        return true;
    }
    if (!rv) {
        unify_lazy(x, end(), loc, context);
        unify_lazy(r, s, loc, context);
        return true;
    }
    return false;
}

bool Solver::step_comps() {
    bool progress = false;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        if (comps_[i].done) continue;
        CompC c = comps_[i];
        if (fire_comp(c)) {
            comps_[i].done = true;
            progress = true;
        }
    }
    return progress;
}

bool Solver::step_fields() {
    bool progress = false;
    for (auto& f : fields_) {
        if (f.done) continue;
        const ValueKind k = g_.value_kind(f.tagged);
        if (k == ValueKind::Var) continue;
        f.done = true;
        progress = true;
        if (k != ValueKind::Tagged)
            throw TypeError(f.loc, "a tagged value", g_.describe_value(f.tagged), "field projection");
        const std::string tag = g_.tag(f.tagged);
        const std::vector<ValueType>* payload = tags_ ? tags_(tag) : nullptr;
        if (!payload || f.index >= payload->size())
            throw TypeError(f.loc, "a field index of " + tag, std::to_string(f.index), "field projection");
        unify_value(f.out, g_.import_value((*payload)[f.index]), f.loc, "field projection");
    }
    return progress;
}

void Solver::propagate() {
    for (;;) {
        bool p = step_fields();
        p = step_comps() || p;
        p = step_duals() || p;
        if (!p) return;
    }
}

void Solver::solve() {
    for (;;) {
        propagate();
        // Latest first: its rest is closest to the end of the session.
        CompC* open = nullptr;
        for (auto it = comps_.rbegin(); it != comps_.rend() && !open; ++it)
            if (!it->done) open = &*it;
        if (open) {
            NodeId target = g_.is_var(open->rest) ? open->rest : open->child;
            unify(target, g_.end(), open->loc);
            continue;
        }
        // Two unconstrained continuations that must stay dual: both end.
        DualC* loose = nullptr;
        for (auto& d : duals_)
            if (!d.dead && !d.expanded) {
                loose = &d;
                break;
            }
        if (!loose) break;
        unify(loose->a, g_.end(), loose->loc);
    }
    for (const auto& f : fields_)
        if (!f.done) throw AmbiguityError(f.loc, "cannot determine the tagged type of a field projection");
}

std::size_t Solver::pending() const {
    std::size_t n = 0;
    for (const auto& c : comps_) n += !c.done;
    for (const auto& d : duals_) n += !d.dead && !d.expanded;
    for (const auto& f : fields_) n += !f.done;
    return n;
}

} // namespace sessions
