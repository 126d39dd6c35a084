#ifndef SESSIONS_TESTS_GEN_HPP
#define SESSIONS_TESTS_GEN_HPP

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sessions/core.hpp"

namespace gen {

// Test-local session type tree, kept apart from the library's representation
// so reference operations can be written against it directly.
enum class Op { Send, Recv, Select, Offer, SelectN, OfferN, Throw, Catch, End, Bot, Rec, Var };

struct T {
    Op op = Op::End;
    int value = 0; // index into value_pool() for Send/Recv
    unsigned level = 0;
    std::vector<std::shared_ptr<T>> kids;
};
using TP = std::shared_ptr<T>;

inline TP mk(Op op, std::vector<TP> kids = {}, int value = 0, unsigned level = 0) {
    auto t = std::make_shared<T>();
    t->op = op;
    t->kids = std::move(kids);
    t->value = value;
    t->level = level;
    return t;
}

inline const std::vector<sessions::ValueType>& value_pool() {
    using sessions::ValueType;
    static const std::vector<ValueType> pool = {
        ValueType::integer(),
        ValueType::boolean(),
        ValueType::str(),
        ValueType::list(ValueType::str()),
        ValueType::tagged("MAIL", {ValueType::str()}),
        ValueType::tagged("QUIT"),
    };
    return pool;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    int below(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }
    bool chance(int percent) { return below(100) < percent; }

private:
    std::mt19937_64 eng_;
};

struct Shape {
    int depth = 6;
    bool bot = false;  // Bot may appear at a leaf
    bool rec = true;   // Rec/Var may appear
};

inline TP random_type(Rng& r, int depth, unsigned binders, const Shape& s) {
    if (depth <= 0 || r.chance(15)) {
        if (s.bot && r.chance(20)) return mk(Op::Bot);
        if (binders > 0 && r.chance(40)) return mk(Op::Var, {}, 0, static_cast<unsigned>(r.below(binders)));
        return mk(Op::End);
    }
    const int pick = r.below(s.rec ? 10 : 9);
    switch (pick) {
    case 0: return mk(Op::Send, {random_type(r, depth - 1, binders, s)}, r.below(6));
    case 1: return mk(Op::Recv, {random_type(r, depth - 1, binders, s)}, r.below(6));
    case 2:
    case 3:
    case 4:
    case 5: {
        static const Op ops[] = {Op::Select, Op::Offer, Op::SelectN, Op::OfferN};
        return mk(ops[pick - 2], {random_type(r, depth - 1, binders, s), random_type(r, depth - 1, binders, s)});
    }
    case 6:
    case 7: {
        // The delegated type is a closed, Bot-free protocol.
        Shape inner = s;
        inner.bot = false;
        return mk(pick == 6 ? Op::Throw : Op::Catch,
                  {random_type(r, depth - 1, 0, inner), random_type(r, depth - 1, binders, s)});
    }
    case 8: return mk(Op::End);
    default: return mk(Op::Rec, {random_type(r, depth - 1, binders + 1, s)}, 0, binders);
    }
}

inline TP random_type(Rng& r, const Shape& s = {}) { return random_type(r, s.depth, 0, s); }

inline int depth_of(const TP& t) {
    int d = 0;
    for (const auto& k : t->kids) d = std::max(d, depth_of(k));
    return d + 1;
}

inline bool has_bot(const TP& t) {
    if (t->op == Op::Bot) return true;
    for (const auto& k : t->kids)
        if (has_bot(k)) return true;
    return false;
}

inline bool same(const TP& a, const TP& b) {
    if (a->op != b->op || a->value != b->value || a->level != b->level || a->kids.size() != b->kids.size())
        return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!same(a->kids[i], b->kids[i])) return false;
    return true;
}

// Reference dual; nullopt when Bot occurs.
inline std::optional<TP> ref_dual(const TP& t) {
    auto flip = [](Op op) {
        switch (op) {
        case Op::Send: return Op::Recv;
        case Op::Recv: return Op::Send;
        case Op::Select: return Op::Offer;
        case Op::Offer: return Op::Select;
        case Op::SelectN: return Op::OfferN;
        case Op::OfferN: return Op::SelectN;
        case Op::Throw: return Op::Catch;
        case Op::Catch: return Op::Throw;
        default: return op;
        }
    };
    switch (t->op) {
    case Op::Bot: return std::nullopt;
    case Op::End:
    case Op::Var: return t;
    case Op::Throw:
    case Op::Catch: {
        if (has_bot(t->kids[0])) return std::nullopt;
        auto k = ref_dual(t->kids[1]);
        if (!k) return std::nullopt;
        return mk(flip(t->op), {t->kids[0], *k});
    }
    default: {
        std::vector<TP> kids;
        for (const auto& k : t->kids) {
            auto d = ref_dual(k);
            if (!d) return std::nullopt;
            kids.push_back(*d);
        }
        return mk(flip(t->op), kids, t->value, t->level);
    }
    }
}

// Reference u1 ⊕ u2; nullopt when undefined.
inline std::optional<TP> ref_comp(const TP& a, const TP& b) {
    if (a->op == Op::End) return b;
    if (b->op == Op::End) return a;
    auto d = ref_dual(a);
    if (d && !has_bot(b) && same(*d, b)) return mk(Op::Bot);
    return std::nullopt;
}

inline sessions::SessionType build(const TP& t) {
    using sessions::SessionType;
    switch (t->op) {
    case Op::Send: return SessionType::send(value_pool()[t->value], build(t->kids[0]));
    case Op::Recv: return SessionType::recv(value_pool()[t->value], build(t->kids[0]));
    case Op::Select: return SessionType::select(build(t->kids[0]), build(t->kids[1]));
    case Op::Offer: return SessionType::offer(build(t->kids[0]), build(t->kids[1]));
    case Op::SelectN: return SessionType::select_n(build(t->kids[0]), build(t->kids[1]));
    case Op::OfferN: return SessionType::offer_n(build(t->kids[0]), build(t->kids[1]));
    case Op::Throw: return SessionType::throw_(build(t->kids[0]), build(t->kids[1]));
    case Op::Catch: return SessionType::catch_(build(t->kids[0]), build(t->kids[1]));
    case Op::End: return SessionType::end();
    case Op::Bot: return SessionType::bot();
    case Op::Rec: return SessionType::rec(t->level, build(t->kids[0]));
    case Op::Var: return SessionType::var(t->level);
    }
    return SessionType::end();
}

// A copy with one node changed, for near-miss pairs.
inline TP perturb(Rng& r, const TP& t) {
    if (t->kids.empty() || r.chance(30)) {
        switch (t->op) {
        case Op::Send:
        case Op::Recv: return mk(t->op, t->kids, (t->value + 1) % 6);
        case Op::End: return mk(Op::Send, {mk(Op::End)}, r.below(6));
        default: return mk(Op::End);
        }
    }
    auto copy = mk(t->op, t->kids, t->value, t->level);
    const int i = r.below(static_cast<int>(t->kids.size()));
    copy->kids[i] = perturb(r, t->kids[i]);
    return copy;
}

} // namespace gen

#endif // SESSIONS_TESTS_GEN_HPP
