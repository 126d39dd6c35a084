#ifndef SESSIONS_LEXER_HPP
#define SESSIONS_LEXER_HPP

#include <string>
#include <string_view>
#include <vector>

#include "sessions/core.hpp"

namespace sessions {

struct SourceLoc {
    int line = 1;
    int column = 1;
};

class SyntaxError : public Error {
public:
    SyntaxError(SourceLoc loc, std::vector<std::string> expected, const std::string& found);

    SourceLoc loc() const { return loc_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    SourceLoc loc_;
    std::vector<std::string> expected_;
};

enum class TokenKind { Ident, Number, String, Punct, Eof };

struct Token {
    TokenKind kind = TokenKind::Eof;
    std::string text; // identifier, digits, unescaped string body, or punctuation
    SourceLoc loc;
};

/// Splits DSL / type text into tokens. `--` and `#` start line comments.
std::vector<Token> tokenize(std::string_view text);

/// Cursor over a token vector with the usual expect/accept helpers.
class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    const Token& peek(std::size_t ahead = 0) const;
    const Token& next();
    bool at_end() const { return peek().kind == TokenKind::Eof; }

    bool is_punct(std::string_view p, std::size_t ahead = 0) const;
    bool is_word(std::string_view w, std::size_t ahead = 0) const;
    bool accept_punct(std::string_view p);
    bool accept_word(std::string_view w);
    void expect_punct(std::string_view p);
    void expect_word(std::string_view w);
    std::string expect_ident(const char* what = "identifier");
    unsigned expect_number();

    [[noreturn]] void fail(std::vector<std::string> expected) const;

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

std::string describe(const Token& t);

} // namespace sessions

#endif // SESSIONS_LEXER_HPP
