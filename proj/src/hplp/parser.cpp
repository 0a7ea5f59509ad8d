#include "pml/hplp/parser.hpp"

#include "lexer.hpp"
#include "pml/errors.hpp"

#include <cmath>
#include <limits>

namespace pml::hplp {

namespace {

using detail::Token;
using detail::TokenKind;

// Tolerance for annotated disjunction weights written as decimals or rationals.
constexpr double kWeightSlack = 1e-9;

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    ParseResult run() {
        ParseResult result;
        while (peek().kind != TokenKind::end_of_input) {
            const std::size_t start = index_;
            try {
                const std::size_t line = peek().line;
                result.program.add(parse_statement(), line);
            } catch (const ParseError& e) {
                result.diagnostics.push_back({e.line(), e.column(), e.message()});
                recover(start);
            }
        }
        return result;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t i = std::min(index_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }

    const Token& take() {
        const Token& t = tokens_[index_];
        if (index_ + 1 < tokens_.size()) {
            ++index_;
        }
        return t;
    }

    bool at_punct(std::string_view p) const {
        return peek().kind == TokenKind::punct && peek().text == p;
    }

    bool at_atom(std::string_view name) const {
        return peek().kind == TokenKind::atom && peek().text == name;
    }

    [[noreturn]] void fail(const Token& at, const std::string& message) const {
        throw ParseError(at.line, at.column, message);
    }

    static std::string describe(const Token& t) {
        switch (t.kind) {
            case TokenKind::end_of_input: return "end of input";
            case TokenKind::end_of_clause: return "'.'";
            default: return "'" + t.text + "'";
        }
    }

    void expect_punct(std::string_view p) {
        if (!at_punct(p)) {
            fail(peek(), "expected '" + std::string(p) + "' but found " + describe(peek()));
        }
        take();
    }

    void expect_end_of_clause() {
        if (peek().kind == TokenKind::end_of_clause) {
            take();
            return;
        }
        const Token& prev = tokens_[index_ > 0 ? index_ - 1 : 0];
        if (peek().kind == TokenKind::end_of_input || peek().line > prev.end_line) {
            throw ParseError(prev.end_line, prev.end_column, "missing '.' at end of clause");
        }
        fail(peek(), "expected ',', ';' or '.' but found " + describe(peek()));
    }

    void recover(std::size_t start) {
        // Always make progress, then skip past the next clause terminator.
        if (index_ == start) {
            take();
        }
        while (peek().kind != TokenKind::end_of_input) {
            if (take().kind == TokenKind::end_of_clause) {
                return;
            }
        }
    }

    Statement parse_statement() {
        if (at_atom("query") && peek(1).kind == TokenKind::punct && peek(1).text == "(") {
            take();
            take();
            Term atom = parse_callable("query argument");
            expect_punct(")");
            expect_end_of_clause();
            return Query{std::move(atom)};
        }
        if (peek().kind == TokenKind::number) {
            return parse_weighted();
        }

        Term head = parse_callable("clause head");
        if (at_punct("~")) {
            take();
            DistFact fact{std::move(head), {}, {}};
            parse_distribution(fact);
            expect_end_of_clause();
            return fact;
        }
        Rule rule{std::move(head), {}, std::nullopt};
        if (at_punct(":-")) {
            take();
            rule.body = parse_body();
        }
        expect_end_of_clause();
        return rule;
    }

    Statement parse_weighted() {
        std::vector<std::pair<double, Term>> heads;
        while (true) {
            const Token& at = peek();
            const double w = parse_weight();
            if (w < 0.0 || w > 1.0) {
                fail(at, "probability " + format_number(w) + " is outside [0, 1]");
            }
            expect_punct("::");
            heads.emplace_back(w, parse_callable("probabilistic atom"));
            if (!at_punct(";")) {
                break;
            }
            take();
            if (peek().kind != TokenKind::number) {
                fail(peek(), "expected a probability for the next annotated disjunct");
            }
        }

        if (heads.size() == 1) {
            auto& [p, atom] = heads.front();
            if (at_punct(":-")) {
                take();
                Rule rule{std::move(atom), parse_body(), p};
                expect_end_of_clause();
                return rule;
            }
            expect_end_of_clause();
            return ProbFact{p, std::move(atom)};
        }

        double total = 0.0;
        for (const auto& h : heads) {
            total += h.first;
        }
        if (total > 1.0 + kWeightSlack) {
            fail(peek(), "annotated disjunction weights sum to " + format_number(total) + " > 1");
        }
        if (at_punct(":-")) {
            fail(peek(), "annotated disjunctions with a body are not supported");
        }
        expect_end_of_clause();
        return AnnotatedDisjunction{std::move(heads)};
    }

    // number | number '/' number | 'inf'
    double parse_unsigned_number(const char* what) {
        if (peek().kind == TokenKind::atom && peek().text == "inf") {
            take();
            return std::numeric_limits<double>::infinity();
        }
        if (peek().kind != TokenKind::number) {
            fail(peek(), std::string("expected ") + what + " but found " + describe(peek()));
        }
        double value = take().number;
        if (at_punct("/")) {
            take();
            if (peek().kind != TokenKind::number) {
                fail(peek(), "expected denominator after '/'");
            }
            const Token& den = take();
            if (den.number == 0.0) {
                fail(den, "division by zero in rational literal");
            }
            value /= den.number;
        }
        return value;
    }

    double parse_weight() { return parse_unsigned_number("a probability"); }

    void parse_distribution(DistFact& fact) {
        if (peek().kind != TokenKind::atom && peek().kind != TokenKind::quoted_atom) {
            fail(peek(), "expected a distribution family after '~'");
        }
        fact.family = take().text;
        expect_punct("(");
        if (!at_punct(")")) {
            while (true) {
                bool negative = false;
                if (at_punct("-")) {
                    take();
                    negative = true;
                }
                const double v = parse_unsigned_number("a numeric distribution parameter");
                fact.params.push_back(negative ? -v : v);
                if (!at_punct(",")) {
                    break;
                }
                take();
            }
        }
        expect_punct(")");
    }

    std::vector<Conjunction> parse_body() {
        std::vector<Conjunction> alternatives;
        alternatives.push_back(parse_conjunction());
        while (at_punct(";")) {
            take();
            alternatives.push_back(parse_conjunction());
        }
        return alternatives;
    }

    Conjunction parse_conjunction() {
        Conjunction literals;
        literals.push_back(parse_literal());
        while (at_punct(",")) {
            take();
            literals.push_back(parse_literal());
        }
        return literals;
    }

    std::optional<CompareOp> peek_compare() const {
        if (peek().kind != TokenKind::punct) {
            return std::nullopt;
        }
        const auto& t = peek().text;
        if (t == "<") return CompareOp::less;
        if (t == ">") return CompareOp::greater;
        if (t == "=<") return CompareOp::less_equal;
        if (t == ">=") return CompareOp::greater_equal;
        return std::nullopt;
    }

    Literal parse_literal() {
        const Token& start = peek();
        Term left = parse_expression();
        if (const auto op = peek_compare()) {
            take();
            return Literal::comparison(std::move(left), *op, parse_expression());
        }
        if (left.is_variable() && at_atom("is")) {
            take();
            return Literal::evaluation(std::move(left), parse_expression());
        }
        if (!left.is_callable()) {
            fail(start, "expected a goal, comparison or 'is' evaluation");
        }
        return Literal::call(std::move(left));
    }

    Term parse_expression() {
        Term left = parse_product();
        while (at_punct("+") || at_punct("-")) {
            std::string op = take().text;
            Term right = parse_product();
            left = Term::compound(std::move(op), {std::move(left), std::move(right)});
        }
        return left;
    }

    Term parse_product() {
        Term left = parse_unary();
        while (at_punct("*")) {
            take();
            Term right = parse_unary();
            left = Term::compound("*", {std::move(left), std::move(right)});
        }
        return left;
    }

    Term parse_unary() {
        if (at_punct("-")) {
            take();
            if (peek().kind == TokenKind::number) {
                return Term::number(-take().number);
            }
            return Term::compound("-", {parse_unary()});
        }
        return parse_primary();
    }

    Term parse_primary() {
        if (at_punct("(")) {
            take();
            Term inner = parse_expression();
            expect_punct(")");
            return inner;
        }
        return parse_simple_term("a term");
    }

    Term parse_simple_term(const char* what) {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::number:
                take();
                return Term::number(t.number);
            case TokenKind::variable:
                take();
                return Term::variable(t.text);
            case TokenKind::atom:
            case TokenKind::quoted_atom: {
                std::string name = take().text;
                if (!at_punct("(")) {
                    return Term::atom(std::move(name));
                }
                take();
                std::vector<Term> args;
                if (at_punct(")")) {
                    fail(peek(), "empty argument list");
                }
                while (true) {
                    args.push_back(parse_argument());
                    if (at_punct(",")) {
                        take();
                        continue;
                    }
                    expect_punct(")");
                    break;
                }
                return Term::compound(std::move(name), std::move(args));
            }
            default:
                fail(t, std::string("expected ") + what + " but found " + describe(t));
        }
    }

    Term parse_argument() {
        if (at_punct("-") && peek(1).kind == TokenKind::number) {
            take();
            return Term::number(-take().number);
        }
        return parse_simple_term("an argument");
    }

    Term parse_callable(const char* what) {
        const Token& start = peek();
        if (start.kind != TokenKind::atom && start.kind != TokenKind::quoted_atom) {
            fail(start, std::string("expected ") + what + " but found " + describe(start));
        }
        return parse_simple_term(what);
    }

    std::vector<Token> tokens_;
    std::size_t index_ = 0;
};

}  // namespace

ParseResult parse_with_diagnostics(std::string_view text) {
    std::vector<Token> tokens;
    try {
        tokens = detail::tokenize(text);
    } catch (const ParseError& e) {
        ParseResult result;
        result.diagnostics.push_back({e.line(), e.column(), e.message()});
        return result;
    }
    return Parser(std::move(tokens)).run();
}

MissionProgram parse_program(std::string_view text) {
    ParseResult result = parse_with_diagnostics(text);
    if (!result.ok()) {
        const auto& d = result.diagnostics.front();
        throw ParseError(d.line, d.column, d.message);
    }
    return std::move(result.program);
}

}  // namespace pml::hplp
