#ifndef SESSIONS_CORE_HPP
#define SESSIONS_CORE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sessions {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DualUndefined : public Error {
public:
    using Error::Error;
};

class NotGround : public Error {
public:
    using Error::Error;
};

class CompUndefined : public Error {
public:
    using Error::Error;
};

class NotRecursive : public Error {
public:
    using Error::Error;
};

class SessionType;

/// Position of a channel in an environment row: |base| + offset, where base
/// is either the empty row or an open row-tail variable.
struct LevelExpr {
    std::optional<unsigned> tail; // nullopt = Nil
    unsigned offset = 0;

    friend bool operator==(const LevelExpr&, const LevelExpr&) = default;
};

enum class ValueKind { Int, Bool, Str, Unit, List, Tagged, Chan, Var };

/// Types of basic values carried by Send/Recv.
class ValueType {
public:
    static ValueType integer();
    static ValueType boolean();
    static ValueType str();
    static ValueType unit();
    static ValueType list(ValueType elem);
    static ValueType tagged(std::string name, std::vector<ValueType> payload = {});
    static ValueType chan(SessionType session, LevelExpr level);
    static ValueType var(unsigned id);

    ValueKind kind() const { return node_->kind; }
    bool is(ValueKind k) const { return node_->kind == k; }

    const ValueType& elem() const { return node_->args.at(0); }
    const std::string& name() const { return node_->name; }
    const std::vector<ValueType>& payload() const { return node_->args; }
    const SessionType& session() const;
    const LevelExpr& level() const { return node_->level; }
    unsigned var_id() const { return node_->var; }

    bool is_ground() const;

    // Tagged types are nominal: equal names mean equal types.
    friend bool operator==(const ValueType& a, const ValueType& b);

private:
    struct Node {
        ValueKind kind = ValueKind::Unit;
        std::vector<ValueType> args;
        std::string name;
        std::shared_ptr<const SessionType> session;
        LevelExpr level;
        unsigned var = 0;
    };
    explicit ValueType(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

enum class SessionKind {
    Send,
    Recv,
    Select,
    Offer,
    SelectN,
    OfferN,
    Throw,
    Catch,
    End,
    Bot,
    Close,
    Rec,
    Var,
    UVar,
};

const char* kind_name(SessionKind k);

/// Immutable session-type term. Rec/Var carry de Bruijn levels (outermost
/// binder = 0); UVar is an unsolved unification variable.
class SessionType {
public:
    SessionType(); // End

    static SessionType send(ValueType v, SessionType u);
    static SessionType recv(ValueType v, SessionType u);
    static SessionType select(SessionType u1, SessionType u2);
    static SessionType offer(SessionType u1, SessionType u2);
    static SessionType select_n(SessionType u1, SessionType u2);
    static SessionType offer_n(SessionType u1, SessionType u2);
    static SessionType throw_(SessionType u1, SessionType u2);
    static SessionType catch_(SessionType u1, SessionType u2);
    static SessionType end();
    static SessionType bot();
    static SessionType close();
    static SessionType rec(unsigned level, SessionType body);
    static SessionType var(unsigned level);
    static SessionType uvar(unsigned id);

    /// Builds a binary node of the given kind (Select/Offer/SelectN/OfferN/Throw/Catch).
    static SessionType binary(SessionKind k, SessionType u1, SessionType u2);

    SessionKind kind() const { return node_->kind; }
    bool is(SessionKind k) const { return node_->kind == k; }

    /// Value carried by Send/Recv.
    const ValueType& value() const { return *node_->value; }
    /// Continuation of Send/Recv.
    const SessionType& cont() const { return node_->kids.at(0); }
    /// Branches of Select/Offer/SelectN/OfferN; delegated and continuation types of Throw/Catch.
    const SessionType& left() const { return node_->kids.at(0); }
    const SessionType& right() const { return node_->kids.at(1); }
    /// Body of Rec.
    const SessionType& body() const { return node_->kids.at(0); }
    unsigned level() const { return node_->num; }
    unsigned uvar_id() const { return node_->num; }

    bool is_ground() const;
    bool contains_bot() const;

    friend bool operator==(const SessionType& a, const SessionType& b);

private:
    struct Node {
        SessionKind kind = SessionKind::End;
        std::optional<ValueType> value;
        std::vector<SessionType> kids;
        unsigned num = 0;
    };
    explicit SessionType(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static SessionType make(SessionKind k, std::optional<ValueType> v, std::vector<SessionType> kids,
                            unsigned num = 0);
    std::shared_ptr<const Node> node_;
};

/// Open-tailed sequence of session types indexed by de Bruijn level.
struct EnvRow {
    std::optional<unsigned> tail; // nullopt = Nil
    std::vector<SessionType> entries;

    LevelExpr level_of(std::size_t index) const { return {tail, static_cast<unsigned>(index)}; }
    /// Entry at the given level, if the level addresses this row.
    const SessionType* lookup(const LevelExpr& level) const;

    friend bool operator==(const EnvRow&, const EnvRow&) = default;
};

SessionType dual(const SessionType& u);

/// The partial composition u1 ⊕ u2.
SessionType comp(const SessionType& u1, const SessionType& u2);

/// Pointwise composition; missing entries count as End. Both rows must be closed.
EnvRow comp(const EnvRow& a, const EnvRow& b);

/// One unfolding of a Rec node: body[Var k := Rec k body].
SessionType unfold(const SessionType& u);

/// Replaces free occurrences of Var(level) in u.
SessionType substitute_var(const SessionType& u, unsigned level, const SessionType& replacement);

bool equal_unfolding(const SessionType& u1, const SessionType& u2, unsigned depth);

bool is_completed(const EnvRow& row);

} // namespace sessions

#endif // SESSIONS_CORE_HPP
