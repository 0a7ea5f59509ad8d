#include "lexer.hpp"

#include "pml/errors.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace pml::hplp::detail {

namespace {

bool is_ident_char(char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
}

// Longest match first.
constexpr std::array<std::string_view, 14> kPunctuation{
    "::", ":-", "=<", ">=", "~", "<", ">", "+", "-", "*", "/", "(", ")", ",",
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (true) {
            skip_space_and_comments();
            Token tok;
            tok.line = line_;
            tok.column = column_;
            if (pos_ >= text_.size()) {
                tok.kind = TokenKind::end_of_input;
                tok.end_line = line_;
                tok.end_column = column_;
                tokens.push_back(tok);
                return tokens;
            }
            const char ch = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(ch))) {
                lex_number(tok);
            } else if (std::islower(static_cast<unsigned char>(ch))) {
                tok.kind = TokenKind::atom;
                tok.text = take_identifier();
            } else if (std::isupper(static_cast<unsigned char>(ch)) || ch == '_') {
                tok.kind = TokenKind::variable;
                tok.text = take_identifier();
            } else if (ch == '\'') {
                lex_quoted(tok);
            } else if (ch == '.') {
                advance(1);
                tok.kind = TokenKind::end_of_clause;
                tok.text = ".";
            } else if (ch == ';') {
                advance(1);
                tok.kind = TokenKind::punct;
                tok.text = ";";
            } else {
                lex_punct(tok);
            }
            tok.end_line = line_;
            tok.end_column = column_;
            tokens.push_back(std::move(tok));
        }
    }

private:
    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
            if (text_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
            ++pos_;
        }
    }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            const char ch = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(ch))) {
                advance(1);
            } else if (ch == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    advance(1);
                }
            } else {
                return;
            }
        }
    }

    std::string take_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) {
            advance(1);
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    void lex_number(Token& tok) {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                advance(1);
            }
        };
        digits();
        // A '.' only continues the number when a digit follows; otherwise it ends the clause.
        if (pos_ + 1 < text_.size() && text_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
            advance(1);
            digits();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) {
                ++look;
            }
            if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                advance(look - pos_);
                digits();
            }
        }
        tok.kind = TokenKind::number;
        tok.text = std::string(text_.substr(start, pos_ - start));
        const auto result = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.number);
        if (result.ec != std::errc{}) {
            throw ParseError(tok.line, tok.column, "malformed number '" + tok.text + "'");
        }
    }

    void lex_quoted(Token& tok) {
        advance(1);
        std::string value;
        while (true) {
            if (pos_ >= text_.size()) {
                throw ParseError(tok.line, tok.column, "unterminated quoted atom");
            }
            const char ch = text_[pos_];
            if (ch == '\'') {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
                    value += '\'';
                    advance(2);
                    continue;
                }
                advance(1);
                break;
            }
            value += ch;
            advance(1);
        }
        tok.kind = TokenKind::quoted_atom;
        tok.text = std::move(value);
    }

    void lex_punct(Token& tok) {
        for (const auto p : kPunctuation) {
            if (text_.substr(pos_, p.size()) == p) {
                tok.kind = TokenKind::punct;
                tok.text = std::string(p);
                advance(p.size());
                return;
            }
        }
        throw ParseError(line_, column_, std::string("unexpected character '") + text_[pos_] + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    return Lexer(text).run();
}

}  // namespace pml::hplp::detail
