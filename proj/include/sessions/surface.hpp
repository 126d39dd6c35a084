#ifndef SESSIONS_SURFACE_HPP
#define SESSIONS_SURFACE_HPP

#include <string>
#include <string_view>

#include "sessions/ast.hpp"

namespace sessions {

/// Unbound or duplicate names, arity mismatches and similar static errors.
class NameError : public Error {
public:
    NameError(SourceLoc loc, const std::string& message);
    SourceLoc loc() const { return loc_; }

private:
    SourceLoc loc_;
};

Program parse(std::string_view text);
Expr parse_expr(std::string_view text);

/// Checks that every referenced session, data constructor, service, channel
/// and variable is declared and bound, and that channel binders are distinct.
void resolve_names(const Program& program);

std::string print_program(const Program& program);
std::string print_expr(const Expr& e);
std::string print_block(const Block& block, int indent = 0);

} // namespace sessions

#endif // SESSIONS_SURFACE_HPP
