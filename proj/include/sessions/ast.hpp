#ifndef SESSIONS_AST_HPP
#define SESSIONS_AST_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sessions/core.hpp"
#include "sessions/lexer.hpp"

namespace sessions {

enum class ExprKind { Int, Bool, Str, Unit, List, Var, Add, Sub, Less, Equal, If, Construct, Project };

struct Expr {
    ExprKind kind = ExprKind::Unit;
    SourceLoc loc;
    std::int64_t int_value = 0;
    bool bool_value = false;
    std::string text;       // string literal, variable name, or constructor tag
    std::vector<Expr> args; // operands / list elements / constructor fields
    unsigned index = 0;     // projected field

    static Expr integer(std::int64_t v);
    static Expr boolean(bool v);
    static Expr string(std::string v);
    static Expr unit();
    static Expr variable(std::string name);
    static Expr binary(ExprKind k, Expr lhs, Expr rhs);
    static Expr construct(std::string tag, std::vector<Expr> fields = {});

    friend bool operator==(const Expr& a, const Expr& b);
};

/// Binder of a `recv`: plain name, `_`, or a constructor pattern `Tag(x, _)`.
struct Pattern {
    enum class Kind { Name, Wildcard, Tagged } kind = Kind::Wildcard;
    std::string name; // Name: the variable; Tagged: the tag
    std::vector<std::string> fields; // "_" for ignored fields

    friend bool operator==(const Pattern&, const Pattern&) = default;
};

enum class StmtKind {
    New,
    Send,
    Recv,
    Sel1,
    Sel2,
    Offer,
    Sel1N,
    Sel2N,
    OfferN,
    Throw,
    Catch,
    Fork,
    Io,
    Unwind,
    Recur1,
    Close,
    Connect,
    Return,
};

enum class IoKind { Print, ReadLine };

struct Stmt;
using Block = std::vector<Stmt>;

struct Stmt {
    StmtKind kind = StmtKind::Return;
    SourceLoc loc;
    unsigned id = 0; // unique within a program, assigned by the parser

    std::string chan;   // subject channel
    std::string chan2;  // channel passed by throw
    std::string bind;   // name bound by new/catch/connect/readline
    std::string target; // session called by fork/recur1, or service of connect
    Pattern pattern;    // recv binder
    Expr expr;          // send/print/return payload
    std::vector<Expr> args; // fork call arguments (channel args are Var exprs)
    IoKind io = IoKind::Print;
    unsigned level = 0; // unwind
    bool inline_fork = false;
    Block block1, block2; // offer branches; inline fork body in block1

    friend bool operator==(const Stmt& a, const Stmt& b);
};

struct Param {
    std::string name;
    std::optional<ValueType> type; // nullopt for channel parameters

    bool is_channel() const { return !type.has_value(); }
    friend bool operator==(const Param&, const Param&) = default;
};

struct SessionDecl {
    std::string name;
    std::vector<Param> params;
    Block body;
    SourceLoc loc;

    std::size_t channel_count() const;
    friend bool operator==(const SessionDecl& a, const SessionDecl& b);
};

struct DataDecl {
    std::string name;
    std::vector<ValueType> payload;
    friend bool operator==(const DataDecl&, const DataDecl&) = default;
};

struct ServiceDecl {
    std::string name;
    SessionType type;                  // the client's view of the protocol
    std::optional<std::string> server; // session serving connections, if any
    friend bool operator==(const ServiceDecl&, const ServiceDecl&) = default;
};

struct Program {
    std::vector<DataDecl> data_decls;
    std::vector<ServiceDecl> service_decls;
    std::vector<SessionDecl> sessions;
    std::string entry = "main";

    const SessionDecl* find_session(const std::string& name) const;
    const DataDecl* find_data(const std::string& name) const;
    const ServiceDecl* find_service(const std::string& name) const;

    friend bool operator==(const Program&, const Program&) = default;
};

} // namespace sessions

#endif // SESSIONS_AST_HPP
