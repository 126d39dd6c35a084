#ifndef SESSIONS_ORACLE_HPP
#define SESSIONS_ORACLE_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sessions/ast.hpp"
#include "sessions/core.hpp"

namespace sessions {

class OutsideFragment : public Error {
public:
    using Error::Error;
};

class ExprTypeError : public Error {
public:
    using Error::Error;
};

enum class ProcKind { Send, Recv, Sel1, Sel2, Offer, SendS, RecvS, Par, Inact, New, Io };

struct Process;
using ProcessPtr = std::shared_ptr<const Process>;

/// π-calculus term. `chan` is the subject, `name` the bound or passed name.
struct Process {
    ProcKind kind = ProcKind::Inact;
    std::string chan;
    std::string name;
    Pattern pattern; // Recv binder
    Expr expr;       // Send payload, printed expression
    IoKind io = IoKind::Print;
    ProcessPtr p, q; // continuation; q is the second branch / right component

    static ProcessPtr inact();
    static ProcessPtr send(std::string c, Expr e, ProcessPtr k);
    static ProcessPtr recv(std::string c, Pattern x, ProcessPtr k);
    static ProcessPtr sel(int which, std::string c, ProcessPtr k);
    static ProcessPtr offer(std::string c, ProcessPtr p1, ProcessPtr p2);
    static ProcessPtr send_s(std::string c, std::string d, ProcessPtr k);
    static ProcessPtr recv_s(std::string c, std::string d, ProcessPtr k);
    static ProcessPtr par(ProcessPtr p1, ProcessPtr p2);
    static ProcessPtr new_(std::string d, ProcessPtr k);
    static ProcessPtr print(Expr e, ProcessPtr k);
    static ProcessPtr readline(std::string x, ProcessPtr k);
};

bool operator==(const Process& a, const Process& b);

std::string print_process(const Process& p);

/// Free channel names.
std::vector<std::string> free_channels(const Process& p);

/// Number of components when nested Par nodes are flattened.
std::size_t parallel_width(const Process& p);

/// Continuation-passing translation of a session body; called sessions are
/// inlined with their local binders renamed apart.
ProcessPtr elaborate(const SessionDecl& decl, const Program& program);
ProcessPtr elaborate(const std::string& session, const Program& program);

using Sorting = std::map<std::string, ValueType>;
using SessionEnv = std::map<std::string, SessionType>;
using DataTable = std::map<std::string, std::vector<ValueType>>;

DataTable data_table(const Program& program);

ValueType check_expr(const Sorting& gamma, const Expr& e, const DataTable& data = {});

struct Derivation {
    std::string rule;
    std::string judgement; // ⊢ subject ▷ Δ
    SessionEnv env;
    std::vector<Derivation> premises;
};

std::string print_derivation(const Derivation& d);

struct CheckResult {
    bool ok = false;
    std::string reason; // first failing rule when !ok
    Derivation derivation;
};

struct CheckOptions {
    bool memo = true;
    /// Give a channel used by only one side of a parallel composition to that side.
    bool prune = true;
};

/// Typing judgement Γ ⊢ P ▷ Δ.
CheckResult check(const Sorting& gamma, const Process& p, const SessionEnv& delta, const DataTable& data = {},
                  CheckOptions options = {});

std::string print_env(const SessionEnv& delta);

} // namespace sessions

#endif // SESSIONS_ORACLE_HPP
