#include "pml/hplp/program.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace pml::hplp {

namespace {

bool is_plain_atom(const std::string& name) {
    if (name.empty() || !(name[0] >= 'a' && name[0] <= 'z')) {
        return false;
    }
    for (const char ch : name) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_';
        if (!ok) {
            return false;
        }
    }
    return name != "is" && name != "query";
}

std::string quote_atom(const std::string& name) {
    if (is_plain_atom(name)) {
        return name;
    }
    std::string out = "'";
    for (const char ch : name) {
        if (ch == '\'') {
            out += "''";
        } else {
            out += ch;
        }
    }
    out += '\'';
    return out;
}

void print_term(std::ostringstream& out, const Term& t);

void print_operand(std::ostringstream& out, const Term& t) {
    if (t.is_arithmetic()) {
        out << '(';
        print_term(out, t);
        out << ')';
    } else {
        print_term(out, t);
    }
}

void print_term(std::ostringstream& out, const Term& t) {
    switch (t.kind) {
        case Term::Kind::variable:
            out << t.name;
            return;
        case Term::Kind::atom:
            out << quote_atom(t.name);
            return;
        case Term::Kind::number:
            out << format_number(t.value);
            return;
        case Term::Kind::compound:
            break;
    }
    if (t.is_arithmetic()) {
        if (t.args.size() == 1) {
            out << "-(";
            print_term(out, t.args[0]);
            out << ')';
            return;
        }
        print_operand(out, t.args[0]);
        out << ' ' << t.name << ' ';
        print_operand(out, t.args[1]);
        return;
    }
    out << quote_atom(t.name) << '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i > 0) {
            out << ",";
        }
        print_term(out, t.args[i]);
    }
    out << ')';
}

void print_literal(std::ostringstream& out, const Literal& l) {
    switch (l.kind) {
        case Literal::Kind::call:
            print_term(out, l.left);
            return;
        case Literal::Kind::compare:
            print_term(out, l.left);
            out << ' ' << to_string(l.op) << ' ';
            print_term(out, l.right);
            return;
        case Literal::Kind::is:
            print_term(out, l.left);
            out << " is ";
            print_term(out, l.right);
            return;
    }
}

void print_body(std::ostringstream& out, const std::vector<Conjunction>& body) {
    for (std::size_t a = 0; a < body.size(); ++a) {
        if (a > 0) {
            out << "; ";
        }
        for (std::size_t i = 0; i < body[a].size(); ++i) {
            if (i > 0) {
                out << ", ";
            }
            print_literal(out, body[a][i]);
        }
    }
}

}  // namespace

std::string format_number(double value) {
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::string to_string(const Term& term) {
    std::ostringstream out;
    print_term(out, term);
    return out.str();
}

std::string to_string(const Literal& literal) {
    std::ostringstream out;
    print_literal(out, literal);
    return out.str();
}

std::string to_string(const Statement& statement) {
    std::ostringstream out;
    std::visit(
        [&out](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ProbFact>) {
                out << format_number(s.probability) << "::";
                print_term(out, s.atom);
            } else if constexpr (std::is_same_v<T, DistFact>) {
                print_term(out, s.atom);
                out << " ~ " << quote_atom(s.family) << '(';
                for (std::size_t i = 0; i < s.params.size(); ++i) {
                    if (i > 0) {
                        out << ", ";
                    }
                    out << format_number(s.params[i]);
                }
                out << ')';
            } else if constexpr (std::is_same_v<T, AnnotatedDisjunction>) {
                for (std::size_t i = 0; i < s.choices.size(); ++i) {
                    if (i > 0) {
                        out << "; ";
                    }
                    out << format_number(s.choices[i].first) << "::";
                    print_term(out, s.choices[i].second);
                }
            } else if constexpr (std::is_same_v<T, Rule>) {
                if (s.probability) {
                    out << format_number(*s.probability) << "::";
                }
                print_term(out, s.head);
                if (!s.body.empty()) {
                    out << " :- ";
                    print_body(out, s.body);
                }
            } else if constexpr (std::is_same_v<T, Query>) {
                out << "query(";
                print_term(out, s.atom);
                out << ')';
            }
        },
        statement);
    out << '.';
    return out.str();
}

std::string to_string(const MissionProgram& program) {
    std::string text;
    for (const auto& s : program.statements) {
        text += to_string(s);
        text += '\n';
    }
    return text;
}

}  // namespace pml::hplp
