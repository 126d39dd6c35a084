#include "sessions/lexer.hpp"

#include <cctype>
#include <sstream>

namespace sessions {

namespace {
std::string syntax_message(SourceLoc loc, const std::vector<std::string>& expected, const std::string& found) {
    std::ostringstream os;
    os << loc.line << ":" << loc.column << ": syntax error: expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) os << (i + 1 == expected.size() ? " or " : ", ");
        os << expected[i];
    }
    os << ", found " << found;
    return os.str();
}
} // namespace

SyntaxError::SyntaxError(SourceLoc loc, std::vector<std::string> expected, const std::string& found)
    : Error(syntax_message(loc, expected, found)), loc_(loc), expected_(std::move(expected)) {}

std::string describe(const Token& t) {
    switch (t.kind) {
    case TokenKind::Eof: return "end of input";
    case TokenKind::String: return "string \"" + t.text + "\"";
    default: return "'" + t.text + "'";
    }
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    SourceLoc loc;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++loc.line;
                loc.column = 1;
            } else {
                ++loc.column;
            }
        }
    };
    static const char* const multi[] = {"<-", ":>", "==", "::", "=>", "++"};
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#' || (c == '-' && i + 1 < text.size() && text[i + 1] == '-')) {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Token tok;
        tok.loc = loc;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                                       text[j] == '\''))
                ++j;
            tok.kind = TokenKind::Ident;
            tok.text = std::string(text.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            tok.kind = TokenKind::Number;
            tok.text = std::string(text.substr(i, j - i));
            advance(j - i);
        } else if (c == '"') {
            advance(1);
            std::string body;
            bool closed = false;
            while (i < text.size()) {
                const char d = text[i];
                if (d == '"') {
                    closed = true;
                    advance(1);
                    break;
                }
                if (d == '\\' && i + 1 < text.size()) {
                    const char e = text[i + 1];
                    body.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
                    advance(2);
                    continue;
                }
                if (d == '\n') break;
                body.push_back(d);
                advance(1);
            }
            if (!closed) throw SyntaxError(tok.loc, {"closing '\"'"}, "end of line");
            tok.kind = TokenKind::String;
            tok.text = std::move(body);
        } else {
            tok.kind = TokenKind::Punct;
            std::size_t len = 1;
            for (const char* m : multi) {
                if (text.substr(i, 2) == m) {
                    len = 2;
                    break;
                }
            }
            tok.text = std::string(text.substr(i, len));
            advance(len);
        }
        out.push_back(std::move(tok));
    }
    Token eof;
    eof.kind = TokenKind::Eof;
    eof.loc = loc;
    out.push_back(eof);
    return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
    const std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
}

const Token& TokenStream::next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
}

bool TokenStream::is_punct(std::string_view p, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Punct && t.text == p;
}

bool TokenStream::is_word(std::string_view w, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Ident && t.text == w;
}

bool TokenStream::accept_punct(std::string_view p) {
    if (!is_punct(p)) return false;
    next();
    return true;
}

bool TokenStream::accept_word(std::string_view w) {
    if (!is_word(w)) return false;
    next();
    return true;
}

void TokenStream::expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail({"'" + std::string(p) + "'"});
}

void TokenStream::expect_word(std::string_view w) {
    if (!accept_word(w)) fail({"'" + std::string(w) + "'"});
}

std::string TokenStream::expect_ident(const char* what) {
    if (peek().kind != TokenKind::Ident) fail({what});
    return next().text;
}

unsigned TokenStream::expect_number() {
    if (peek().kind != TokenKind::Number) fail({"natural number"});
    return static_cast<unsigned>(std::stoul(next().text));
}

void TokenStream::fail(std::vector<std::string> expected) const {
    throw SyntaxError(peek().loc, std::move(expected), describe(peek()));
}

} // namespace sessions
