#include "sessions/core.hpp"

#include "sessions/type_syntax.hpp"

namespace sessions {

// ---------------------------------------------------------------------------
// ValueType

namespace {
template <typename Node>
std::shared_ptr<const Node> make_value_node(ValueKind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return n;
}
} // namespace

ValueType ValueType::integer() {
    static const ValueType t{make_value_node<Node>(ValueKind::Int)};
    return t;
}
ValueType ValueType::boolean() {
    static const ValueType t{make_value_node<Node>(ValueKind::Bool)};
    return t;
}
ValueType ValueType::str() {
    static const ValueType t{make_value_node<Node>(ValueKind::Str)};
    return t;
}
ValueType ValueType::unit() {
    static const ValueType t{make_value_node<Node>(ValueKind::Unit)};
    return t;
}

ValueType ValueType::list(ValueType elem) {
    auto n = std::make_shared<Node>();
    n->kind = ValueKind::List;
    n->args.push_back(std::move(elem));
    return ValueType{std::move(n)};
}

ValueType ValueType::tagged(std::string name, std::vector<ValueType> payload) {
    auto n = std::make_shared<Node>();
    n->kind = ValueKind::Tagged;
    n->name = std::move(name);
    n->args = std::move(payload);
    return ValueType{std::move(n)};
}

ValueType ValueType::chan(SessionType session, LevelExpr level) {
    auto n = std::make_shared<Node>();
    n->kind = ValueKind::Chan;
    n->session = std::make_shared<const SessionType>(std::move(session));
    n->level = level;
    return ValueType{std::move(n)};
}

ValueType ValueType::var(unsigned id) {
    auto n = std::make_shared<Node>();
    n->kind = ValueKind::Var;
    n->var = id;
    return ValueType{std::move(n)};
}

const SessionType& ValueType::session() const { return *node_->session; }

bool ValueType::is_ground() const {
    switch (kind()) {
    case ValueKind::Var:
        return false;
    case ValueKind::List:
        return elem().is_ground();
    case ValueKind::Chan:
        return session().is_ground();
    default:
        return true;
    }
}

bool operator==(const ValueType& a, const ValueType& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case ValueKind::List:
        return a.elem() == b.elem();
    case ValueKind::Tagged:
        return a.name() == b.name();
    case ValueKind::Chan:
        return a.level() == b.level() && a.session() == b.session();
    case ValueKind::Var:
        return a.var_id() == b.var_id();
    default:
        return true;
    }
}

// ---------------------------------------------------------------------------
// SessionType

const char* kind_name(SessionKind k) {
    switch (k) {
    case SessionKind::Send: return "Send";
    case SessionKind::Recv: return "Recv";
    case SessionKind::Select: return "Select";
    case SessionKind::Offer: return "Offer";
    case SessionKind::SelectN: return "SelectN";
    case SessionKind::OfferN: return "OfferN";
    case SessionKind::Throw: return "Throw";
    case SessionKind::Catch: return "Catch";
    case SessionKind::End: return "End";
    case SessionKind::Bot: return "Bot";
    case SessionKind::Close: return "Close";
    case SessionKind::Rec: return "Rec";
    case SessionKind::Var: return "Var";
    case SessionKind::UVar: return "UVar";
    }
    return "?";
}

SessionType SessionType::make(SessionKind k, std::optional<ValueType> v, std::vector<SessionType> kids,
                              unsigned num) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->value = std::move(v);
    n->kids = std::move(kids);
    n->num = num;
    return SessionType{std::move(n)};
}

SessionType::SessionType() : SessionType(end()) {}

SessionType SessionType::send(ValueType v, SessionType u) {
    return make(SessionKind::Send, std::move(v), {std::move(u)});
}
SessionType SessionType::recv(ValueType v, SessionType u) {
    return make(SessionKind::Recv, std::move(v), {std::move(u)});
}
SessionType SessionType::binary(SessionKind k, SessionType u1, SessionType u2) {
    return make(k, std::nullopt, {std::move(u1), std::move(u2)});
}
SessionType SessionType::select(SessionType u1, SessionType u2) {
    return binary(SessionKind::Select, std::move(u1), std::move(u2));
}
SessionType SessionType::offer(SessionType u1, SessionType u2) {
    return binary(SessionKind::Offer, std::move(u1), std::move(u2));
}
SessionType SessionType::select_n(SessionType u1, SessionType u2) {
    return binary(SessionKind::SelectN, std::move(u1), std::move(u2));
}
SessionType SessionType::offer_n(SessionType u1, SessionType u2) {
    return binary(SessionKind::OfferN, std::move(u1), std::move(u2));
}
SessionType SessionType::throw_(SessionType u1, SessionType u2) {
    return binary(SessionKind::Throw, std::move(u1), std::move(u2));
}
SessionType SessionType::catch_(SessionType u1, SessionType u2) {
    return binary(SessionKind::Catch, std::move(u1), std::move(u2));
}

SessionType SessionType::end() {
    static const SessionType t = make(SessionKind::End, std::nullopt, {});
    return t;
}
SessionType SessionType::bot() {
    static const SessionType t = make(SessionKind::Bot, std::nullopt, {});
    return t;
}
SessionType SessionType::close() {
    static const SessionType t = make(SessionKind::Close, std::nullopt, {});
    return t;
}
SessionType SessionType::rec(unsigned level, SessionType body) {
    return make(SessionKind::Rec, std::nullopt, {std::move(body)}, level);
}
SessionType SessionType::var(unsigned level) { return make(SessionKind::Var, std::nullopt, {}, level); }
SessionType SessionType::uvar(unsigned id) { return make(SessionKind::UVar, std::nullopt, {}, id); }

bool SessionType::is_ground() const {
    if (is(SessionKind::UVar)) return false;
    for (const auto& k : node_->kids)
        if (!k.is_ground()) return false;
    return true;
}

bool SessionType::contains_bot() const {
    if (is(SessionKind::Bot)) return true;
    for (const auto& k : node_->kids)
        if (k.contains_bot()) return true;
    return false;
}

bool operator==(const SessionType& a, const SessionType& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.node_->num != b.node_->num) return false;
    if (a.node_->value.has_value() && !(*a.node_->value == *b.node_->value)) return false;
    const auto& ka = a.node_->kids;
    const auto& kb = b.node_->kids;
    if (ka.size() != kb.size()) return false;
    for (std::size_t i = 0; i < ka.size(); ++i)
        if (!(ka[i] == kb[i])) return false;
    return true;
}

const SessionType* EnvRow::lookup(const LevelExpr& level) const {
    if (level.tail != tail) return nullptr;
    if (level.offset >= entries.size()) return nullptr;
    return &entries[level.offset];
}

// ---------------------------------------------------------------------------
// Algebra

namespace {

SessionType dual_rec(const SessionType& u) {
    using K = SessionKind;
    switch (u.kind()) {
    case K::Send: return SessionType::recv(u.value(), dual_rec(u.cont()));
    case K::Recv: return SessionType::send(u.value(), dual_rec(u.cont()));
    case K::Select: return SessionType::offer(dual_rec(u.left()), dual_rec(u.right()));
    case K::Offer: return SessionType::select(dual_rec(u.left()), dual_rec(u.right()));
    case K::SelectN: return SessionType::offer_n(dual_rec(u.left()), dual_rec(u.right()));
    case K::OfferN: return SessionType::select_n(dual_rec(u.left()), dual_rec(u.right()));
    case K::Throw: return SessionType::catch_(u.left(), dual_rec(u.right()));
    case K::Catch: return SessionType::throw_(u.left(), dual_rec(u.right()));
    case K::End:
    case K::Close:
    case K::Var: return u;
    case K::Rec: return SessionType::rec(u.level(), dual_rec(u.body()));
    case K::Bot: throw DualUndefined("dual of Bot is undefined");
    case K::UVar: throw NotGround("dual of a type containing unification variables");
    }
    return u;
}

} // namespace

SessionType dual(const SessionType& u) {
    if (!u.is_ground()) throw NotGround("dual of non-ground type " + print_type(u));
    if (u.contains_bot()) throw DualUndefined("dual undefined for " + print_type(u));
    return dual_rec(u);
}

SessionType comp(const SessionType& u1, const SessionType& u2) {
    if (!u1.is_ground() || !u2.is_ground()) throw NotGround("composition of non-ground types");
    auto undefined = [&] {
        return CompUndefined("composition undefined: " + print_type(u1) + " (+) " + print_type(u2));
    };
    if (u1.is(SessionKind::Close) || u2.is(SessionKind::Close)) throw undefined();
    if (u1.is(SessionKind::End)) return u2;
    if (u2.is(SessionKind::End)) return u1;
    if (u1.contains_bot() || u2.contains_bot()) throw undefined();
    if (dual_rec(u1) == u2) return SessionType::bot();
    throw undefined();
}

EnvRow comp(const EnvRow& a, const EnvRow& b) {
    if (a.tail || b.tail) throw NotGround("composition of open rows");
    EnvRow out;
    const std::size_t n = std::max(a.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < n; ++i) {
        const SessionType x = i < a.entries.size() ? a.entries[i] : SessionType::end();
        const SessionType y = i < b.entries.size() ? b.entries[i] : SessionType::end();
        out.entries.push_back(comp(x, y));
    }
    return out;
}

SessionType substitute_var(const SessionType& u, unsigned level, const SessionType& replacement) {
    using K = SessionKind;
    switch (u.kind()) {
    case K::Var: return u.level() == level ? replacement : u;
    case K::Rec:
        if (u.level() == level) return u; // rebinds the same level
        return SessionType::rec(u.level(), substitute_var(u.body(), level, replacement));
    case K::Send: return SessionType::send(u.value(), substitute_var(u.cont(), level, replacement));
    case K::Recv: return SessionType::recv(u.value(), substitute_var(u.cont(), level, replacement));
    case K::Select:
    case K::Offer:
    case K::SelectN:
    case K::OfferN:
    case K::Throw:
    case K::Catch:
        return SessionType::binary(u.kind(), substitute_var(u.left(), level, replacement),
                                   substitute_var(u.right(), level, replacement));
    default: return u;
    }
}

SessionType unfold(const SessionType& u) {
    if (!u.is(SessionKind::Rec)) throw NotRecursive("unfold of non-recursive type " + print_type(u));
    return substitute_var(u.body(), u.level(), u);
}

namespace {

// Unfolds Rec nodes at the root. A Rec whose unfolding is again itself
// (e.g. Rec 0 (Var 0)) is left as is.
SessionType head_normal(SessionType u) {
    for (int guard = 0; guard < 64 && u.is(SessionKind::Rec); ++guard) u = unfold(u);
    return u;
}

bool eq_unf(const SessionType& a0, const SessionType& b0, unsigned depth) {
    if (depth == 0) return true;
    const SessionType a = head_normal(a0);
    const SessionType b = head_normal(b0);
    if (a.kind() != b.kind()) return false;
    using K = SessionKind;
    switch (a.kind()) {
    case K::Send:
    case K::Recv:
        return a.value() == b.value() && eq_unf(a.cont(), b.cont(), depth - 1);
    case K::Select:
    case K::Offer:
    case K::SelectN:
    case K::OfferN:
    case K::Catch:
    case K::Throw:
        return eq_unf(a.left(), b.left(), depth - 1) && eq_unf(a.right(), b.right(), depth - 1);
    case K::Var:
    case K::Rec:
        return a.level() == b.level();
    case K::UVar: return a.uvar_id() == b.uvar_id();
    default: return true;
    }
}

} // namespace

bool equal_unfolding(const SessionType& u1, const SessionType& u2, unsigned depth) {
    return eq_unf(u1, u2, depth);
}

bool is_completed(const EnvRow& row) {
    for (const auto& e : row.entries)
        if (!e.is(SessionKind::End)) return false;
    return true;
}

} // namespace sessions
