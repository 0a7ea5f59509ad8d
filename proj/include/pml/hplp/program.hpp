#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pml::hplp {

// Prolog-style term. Arithmetic is represented as compounds with functors
// "+", "-", "*" (binary) and "-" (unary).
struct Term {
    enum class Kind : unsigned char { variable, atom, number, compound };

    Kind kind = Kind::atom;
    std::string name;
    double value = 0.0;
    std::vector<Term> args;

    static Term variable(std::string name);
    static Term atom(std::string name);
    static Term number(double value);
    static Term compound(std::string functor, std::vector<Term> args);

    bool is_variable() const noexcept { return kind == Kind::variable; }
    bool is_number() const noexcept { return kind == Kind::number; }
    bool is_callable() const noexcept { return kind == Kind::atom || (kind == Kind::compound && !is_arithmetic()); }
    bool is_arithmetic() const noexcept;
    bool is_ground() const noexcept;
    std::size_t arity() const noexcept { return args.size(); }

    bool operator==(const Term&) const = default;
};

enum class CompareOp { less, greater, less_equal, greater_equal };

const char* to_string(CompareOp op);
bool compare(double lhs, CompareOp op, double rhs);

struct Literal {
    enum class Kind : unsigned char { call, compare, is };

    Kind kind = Kind::call;
    Term left;   // goal for call, bound variable for is
    CompareOp op = CompareOp::less;
    Term right;  // expression for compare and is

    static Literal call(Term goal);
    static Literal comparison(Term lhs, CompareOp op, Term rhs);
    static Literal evaluation(Term variable, Term expression);

    bool operator==(const Literal&) const = default;
};

using Conjunction = std::vector<Literal>;

struct ProbFact {
    double probability = 1.0;
    Term atom;
    bool operator==(const ProbFact&) const = default;
};

struct DistFact {
    Term atom;
    std::string family;
    std::vector<double> params;
    bool operator==(const DistFact&) const = default;
};

struct AnnotatedDisjunction {
    std::vector<std::pair<double, Term>> choices;
    bool operator==(const AnnotatedDisjunction&) const = default;
};

// `head.` is a rule with no alternatives. A disjunctive body is a list of
// alternative conjunctions; a probability makes the rule probabilistic.
struct Rule {
    Term head;
    std::vector<Conjunction> body;
    std::optional<double> probability;
    bool operator==(const Rule&) const = default;
};

struct Query {
    Term atom;
    bool operator==(const Query&) const = default;
};

using Statement = std::variant<ProbFact, DistFact, AnnotatedDisjunction, Rule, Query>;

struct MissionProgram {
    std::vector<Statement> statements;
    // Source line of each statement; 0 for generated statements.
    std::vector<std::size_t> lines;

    void add(Statement statement, std::size_t line = 0);
    std::vector<Term> queries() const;

    // Structural equality; source lines are ignored.
    bool operator==(const MissionProgram& other) const { return statements == other.statements; }
};

std::string to_string(const Term& term);
std::string to_string(const Literal& literal);
std::string to_string(const Statement& statement);
// Canonical text; parses back to a structurally equal program.
std::string to_string(const MissionProgram& program);

// Shortest decimal form that reads back to the same double ("inf" for infinity).
std::string format_number(double value);

}  // namespace pml::hplp
