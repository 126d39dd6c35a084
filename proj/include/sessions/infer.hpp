#ifndef SESSIONS_INFER_HPP
#define SESSIONS_INFER_HPP

#include <map>
#include <string>
#include <vector>

#include "sessions/ast.hpp"
#include "sessions/core.hpp"
#include "sessions/solver.hpp"

namespace sessions {

enum class ResidualKind { EndedTail };

struct Residual {
    ResidualKind kind = ResidualKind::EndedTail;
    unsigned tail = 0;
    friend bool operator==(const Residual&, const Residual&) = default;
};

struct ChannelParam {
    std::string name;
    LevelExpr level;
};

struct ValueParam {
    std::string name;
    ValueType type;
};

/// Principal signature of a session: rows before and after, result type and
/// the residual constraints on the row tail.
struct SessionSignature {
    EnvRow pre, post;
    ValueType result = ValueType::unit();
    std::vector<Residual> residual;
    std::vector<ChannelParam> channel_params;
    std::vector<ValueParam> value_params;
};

/// One fork-time composition child ⊕ rest = state, read back after solving.
struct ForkComposition {
    std::string session;
    SourceLoc loc;
    SessionType child, rest, state;
};

struct InferenceResult {
    std::vector<std::string> order; // declaration order
    std::map<std::string, SessionSignature> signatures;
    /// offerN statement id -> tag received first in its first branch.
    std::map<unsigned, std::string> offer_tags;
    std::vector<ForkComposition> forks;

    const SessionSignature& at(const std::string& name) const { return signatures.at(name); }
};

/// Infers principal signatures of every session. Throws NameError (through
/// resolution) or one of the InferError subclasses.
InferenceResult infer_program(const Program& program);

/// Convenience: infers the program and returns one signature.
SessionSignature infer_session(const Program& program, const std::string& name);

/// The typing schema of one primitive statement as a signature over the
/// channels it mentions (fresh variables for every unconstrained part).
SessionSignature primitive_schema(const Stmt& stmt);

/// Reads a term back from the graph, turning cycles into Rec/Var and
/// reporting illegal cycles (OccursError) and ill-scoped levels (FoldError).
SessionType fold_and_default(TypeGraph& graph, NodeId node, SourceLoc loc = {});

/// A program is runnable from `entry` when the entry session takes no
/// channels and ends with every channel it created at End.
void check_runnable(const Program& program, const InferenceResult& result, const std::string& entry);

// Signature text formats.
std::string print_signature(const SessionSignature& sig);
/// Parses the pretty format back (used for expectation files).
SessionSignature parse_signature(std::string_view text);
/// Canonical text (variables renamed in order of first occurrence).
std::string canonical_signature(std::string_view text);
/// Structured (JSON) rendering of a whole inference result.
std::string structured_signatures(const InferenceResult& result);
/// Decodes the structured rendering of one session back into a signature.
SessionSignature signature_from_structured(const std::string& json_text, const std::string& name);

} // namespace sessions

#endif // SESSIONS_INFER_HPP
