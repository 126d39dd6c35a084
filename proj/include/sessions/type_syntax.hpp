#ifndef SESSIONS_TYPE_SYNTAX_HPP
#define SESSIONS_TYPE_SYNTAX_HPP

#include <map>
#include <string>
#include <string_view>

#include "sessions/core.hpp"
#include "sessions/lexer.hpp"

namespace sessions {

/// Assigns display names (a, b, ..., z, a1, ...) to unification variables in
/// first-occurrence order. Session and value variables share one sequence;
/// row tails are named ss, tt, ...
class VarNamer {
public:
    std::string session_var(unsigned id);
    std::string value_var(unsigned id);
    std::string tail(unsigned id);

private:
    std::string fresh();
    std::map<unsigned, std::string> session_, value_, tail_;
    unsigned count_ = 0;
};

std::string print_level(unsigned level, bool as_argument);
std::string print_value_type(const ValueType& v, VarNamer& names, bool as_argument = false);
std::string print_value_type(const ValueType& v);
std::string print_type(const SessionType& u, VarNamer& names, bool as_argument = false);
std::string print_type(const SessionType& u);
/// `ss :> u0 :> u1`, `Nil` for the empty closed row.
std::string print_row(const EnvRow& row, VarNamer& names);
std::string print_row(const EnvRow& row);

/// Maps display names back to variable ids while parsing. Ids are handed out
/// from `next_id` so several parses can share one numbering.
struct VarScope {
    std::map<std::string, unsigned> session, value, tail;
    unsigned next_id = 0;
};

/// Parses the type notation from a token stream (used by the program parser).
SessionType parse_type(TokenStream& ts, VarScope& scope);
ValueType parse_value_type(TokenStream& ts, VarScope& scope, bool as_argument = false);
EnvRow parse_row(TokenStream& ts, VarScope& scope);

SessionType parse_type(std::string_view text);
SessionType parse_type(std::string_view text, VarScope& scope);
ValueType parse_value_type(std::string_view text);
EnvRow parse_row(std::string_view text, VarScope& scope);

} // namespace sessions

#endif // SESSIONS_TYPE_SYNTAX_HPP
