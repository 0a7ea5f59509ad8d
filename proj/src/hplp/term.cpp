#include "pml/hplp/program.hpp"

namespace pml::hplp {

Term Term::variable(std::string name) {
    Term t;
    t.kind = Kind::variable;
    t.name = std::move(name);
    return t;
}

Term Term::atom(std::string name) {
    Term t;
    t.kind = Kind::atom;
    t.name = std::move(name);
    return t;
}

Term Term::number(double value) {
    Term t;
    t.kind = Kind::number;
    t.value = value;
    return t;
}

Term Term::compound(std::string functor, std::vector<Term> args) {
    if (args.empty()) {
        return atom(std::move(functor));
    }
    Term t;
    t.kind = Kind::compound;
    t.name = std::move(functor);
    t.args = std::move(args);
    return t;
}

bool Term::is_arithmetic() const noexcept {
    if (kind != Kind::compound) {
        return false;
    }
    if (args.size() == 2) {
        return name == "+" || name == "-" || name == "*";
    }
    return args.size() == 1 && name == "-";
}

bool Term::is_ground() const noexcept {
    if (kind == Kind::variable) {
        return false;
    }
    for (const auto& a : args) {
        if (!a.is_ground()) {
            return false;
        }
    }
    return true;
}

const char* to_string(CompareOp op) {
    switch (op) {
        case CompareOp::less: return "<";
        case CompareOp::greater: return ">";
        case CompareOp::less_equal: return "=<";
        case CompareOp::greater_equal: return ">=";
    }
    return "?";
}

bool compare(double lhs, CompareOp op, double rhs) {
    switch (op) {
        case CompareOp::less: return lhs < rhs;
        case CompareOp::greater: return lhs > rhs;
        case CompareOp::less_equal: return lhs <= rhs;
        case CompareOp::greater_equal: return lhs >= rhs;
    }
    return false;
}

Literal Literal::call(Term goal) {
    Literal l;
    l.kind = Kind::call;
    l.left = std::move(goal);
    return l;
}

Literal Literal::comparison(Term lhs, CompareOp op, Term rhs) {
    Literal l;
    l.kind = Kind::compare;
    l.left = std::move(lhs);
    l.op = op;
    l.right = std::move(rhs);
    return l;
}

Literal Literal::evaluation(Term variable, Term expression) {
    Literal l;
    l.kind = Kind::is;
    l.left = std::move(variable);
    l.right = std::move(expression);
    return l;
}

void MissionProgram::add(Statement statement, std::size_t line) {
    statements.push_back(std::move(statement));
    lines.push_back(line);
}

std::vector<Term> MissionProgram::queries() const {
    std::vector<Term> out;
    for (const auto& s : statements) {
        if (const auto* q = std::get_if<Query>(&s)) {
            out.push_back(q->atom);
        }
    }
    return out;
}

}  // namespace pml::hplp
