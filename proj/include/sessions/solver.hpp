#ifndef SESSIONS_SOLVER_HPP
#define SESSIONS_SOLVER_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sessions/core.hpp"
#include "sessions/lexer.hpp"

namespace sessions {

/// Base class of inference failures; carries the source position of the
/// statement (or declaration) that raised the constraint.
class InferError : public Error {
public:
    InferError(SourceLoc loc, const std::string& message);
    SourceLoc loc() const { return loc_; }

private:
    SourceLoc loc_;
};

class TypeError : public InferError {
public:
    TypeError(SourceLoc loc, std::string expected, std::string found, const std::string& context = {});
    const std::string& expected() const { return expected_; }
    const std::string& found() const { return found_; }

private:
    std::string expected_, found_;
};

class CompositionError : public InferError {
public:
    using InferError::InferError;
};

class OccursError : public InferError {
public:
    using InferError::InferError;
};

class AmbiguityError : public InferError {
public:
    using InferError::InferError;
};

class FoldError : public InferError {
public:
    using InferError::InferError;
};

using NodeId = int;

/// Mutable term graph for session and value types with union-find binding.
/// Session terms may become cyclic; cycles are only legal through Rec nodes,
/// which is checked when a term is read back with `export_type`.
class TypeGraph {
public:
    // Session nodes.
    NodeId fresh();
    NodeId node(SessionKind k, NodeId a = -1, NodeId b = -1);
    NodeId message(SessionKind k, NodeId value, NodeId cont); // Send / Recv
    NodeId rec(unsigned level, NodeId body);
    NodeId end() { return node(SessionKind::End); }

    // Value nodes.
    NodeId fresh_value();
    NodeId value(ValueKind k, NodeId elem = -1, std::string tag = {});

    NodeId find(NodeId n);
    NodeId find_value(NodeId n);
    SessionKind kind(NodeId n) { return s_[find(n)].kind; }
    bool is_var(NodeId n) { return kind(n) == SessionKind::UVar; }
    NodeId child(NodeId n, int which); // 0 = first/cont/body, 1 = second
    NodeId value_of(NodeId n);         // Send/Recv payload
    unsigned level(NodeId n) { return s_[find(n)].level; }
    ValueKind value_kind(NodeId v) { return v_[find_value(v)].kind; }
    const std::string& tag(NodeId v) { return v_[find_value(v)].tag; }

    /// Imports a ground-or-open core type. UVar/value-variable ids are mapped
    /// through `vars` (shared across calls so one signature imports coherently).
    NodeId import_type(const SessionType& u, std::map<unsigned, NodeId>& vars,
                       std::map<unsigned, NodeId>& value_vars);
    NodeId import_value(const ValueType& v, std::map<unsigned, NodeId>& value_vars);
    NodeId import_type(const SessionType& u);
    NodeId import_value(const ValueType& v);

    /// Reads a term back, folding cycles into Rec/Var. Unbound variables
    /// become UVar(node id) / value Var(node id).
    SessionType export_type(NodeId n, SourceLoc loc = {});
    ValueType export_value(NodeId v);
    /// Best-effort rendering for error messages; never throws.
    std::string describe(NodeId n);
    std::string describe_value(NodeId v);

    /// Copies the subgraph reachable from the roots, renewing unbound variables.
    struct Copier {
        std::map<NodeId, NodeId> sessions, values;
    };
    NodeId copy(NodeId n, Copier& c);
    NodeId copy_value(NodeId v, Copier& c);

    // Raised by unify on constructor clash; callers add context.
    struct Clash {
        NodeId a, b;
        bool value;
    };
    void unify(NodeId a, NodeId b);
    void unify_value(NodeId a, NodeId b);

    std::size_t size() const { return s_.size(); }

private:
    struct SNode {
        SessionKind kind = SessionKind::UVar;
        NodeId link = -1;
        NodeId value = -1;
        NodeId a = -1, b = -1;
        unsigned level = 0;
    };
    struct VNode {
        ValueKind kind = ValueKind::Var;
        NodeId link = -1;
        NodeId elem = -1;
        std::string tag;
    };
    bool occurs_value(NodeId var, NodeId v);

    std::vector<SNode> s_;
    std::vector<VNode> v_;
};

/// Deferred constraint store over a TypeGraph: duality, composition
/// (child ⊕ rest = state) and tagged-field projection.
class Solver {
public:
    explicit Solver(TypeGraph& g) : g_(g) {}

    /// Resolves the payload types of a tagged value type by name.
    using TagLookup = std::function<const std::vector<ValueType>*(const std::string&)>;
    void set_tag_lookup(TagLookup f) { tags_ = std::move(f); }

    void unify(NodeId a, NodeId b, SourceLoc loc, const std::string& context = {});
    void unify_value(NodeId a, NodeId b, SourceLoc loc, const std::string& context = {});
    void add_dual(NodeId a, NodeId b, SourceLoc loc);
    void add_comp(NodeId child, NodeId rest, NodeId state, SourceLoc loc);
    void add_field(NodeId tagged, unsigned index, NodeId out, SourceLoc loc);

    /// Fires every constraint that can fire; returns when none can.
    void propagate();
    /// propagate(), then default what is still open until nothing is pending:
    /// compositions (rest := End first, then child := End), then duality
    /// between two unbound variables (both End). An unresolved field
    /// projection raises AmbiguityError.
    void solve();

    std::size_t pending() const;

private:
    struct DualC {
        NodeId a, b;
        SourceLoc loc;
        bool expanded = false;
        bool dead = false;
    };
    struct CompC {
        NodeId child, rest, state;
        SourceLoc loc;
        bool done = false;
    };
    struct FieldC {
        NodeId tagged;
        unsigned index;
        NodeId out;
        SourceLoc loc;
        bool done = false;
    };
    void unify_lazy(NodeId a, NodeId b, SourceLoc loc, const std::function<std::string()>& context);
    bool step_duals();
    bool step_comps();
    bool step_fields();
    bool fire_comp(CompC& c);
    void expand_dual(DualC& d);

    TypeGraph& g_;
    TagLookup tags_;
    std::vector<DualC> duals_;
    std::vector<CompC> comps_;
    std::vector<FieldC> fields_;
};

} // namespace sessions

#endif // SESSIONS_SOLVER_HPP
