#include "pml/errors.hpp"
#include "pml/hplp/inference.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pml::hplp {

namespace {

Term substitute(const Term& t, const Bindings& bindings) {
    if (t.kind == Term::Kind::variable) {
        for (const auto& [name, value] : bindings) {
            if (name == t.name) {
                return value;
            }
        }
        return t;
    }
    if (t.kind != Term::Kind::compound) {
        return t;
    }
    Term out = t;
    for (auto& a : out.args) {
        a = substitute(a, bindings);
    }
    return out;
}

Literal substitute(const Literal& l, const Bindings& bindings) {
    Literal out = l;
    out.left = substitute(l.left, bindings);
    out.right = substitute(l.right, bindings);
    return out;
}

Statement substitute(const Statement& s, const Bindings& bindings) {
    return std::visit(
        [&bindings](const auto& st) -> Statement {
            using T = std::decay_t<decltype(st)>;
            T out = st;
            if constexpr (std::is_same_v<T, ProbFact> || std::is_same_v<T, DistFact> || std::is_same_v<T, Query>) {
                out.atom = substitute(st.atom, bindings);
            } else if constexpr (std::is_same_v<T, AnnotatedDisjunction>) {
                for (auto& c : out.choices) {
                    c.second = substitute(c.second, bindings);
                }
            } else if constexpr (std::is_same_v<T, Rule>) {
                out.head = substitute(st.head, bindings);
                for (auto& conj : out.body) {
                    for (auto& lit : conj) {
                        lit = substitute(lit, bindings);
                    }
                }
            }
            return out;
        },
        s);
}

using RelationKey = std::pair<std::string, std::size_t>;

const RelationKey* match_relation(const Term& t, const CellRelations& relations) {
    if (t.kind != Term::Kind::compound) {
        return nullptr;
    }
    for (const auto& r : relations.relations) {
        if (r.first == t.name && r.second == t.args.size()) {
            return &r;
        }
    }
    return nullptr;
}

void collect_references(const Term& t, const CellRelations& relations,
                        std::map<RelationKey, std::set<std::string>>& out) {
    if (const auto* r = match_relation(t, relations)) {
        const Term& tag = t.args.back();
        if (tag.kind == Term::Kind::atom) {
            out[*r].insert(tag.name);
        }
        return;
    }
    for (const auto& a : t.args) {
        collect_references(a, relations, out);
    }
}

void collect_references(const Statement& s, const CellRelations& relations,
                        std::map<RelationKey, std::set<std::string>>& out) {
    if (const auto* rule = std::get_if<Rule>(&s)) {
        for (const auto& conj : rule->body) {
            for (const auto& lit : conj) {
                collect_references(lit.left, relations, out);
                collect_references(lit.right, relations, out);
            }
        }
    } else if (const auto* q = std::get_if<Query>(&s)) {
        collect_references(q->atom, relations, out);
    }
}

void collect_supplied(const Term& atom, const CellRelations& relations,
                      std::map<RelationKey, std::set<std::string>>& out) {
    if (const auto* r = match_relation(atom, relations)) {
        if (atom.args.back().kind == Term::Kind::atom) {
            out[*r].insert(atom.args.back().name);
        }
    }
}

}  // namespace

MissionProgram specialize(const MissionProgram& program, std::span<const Statement> cell_facts,
                          const Bindings& bindings, const CellRelations& relations) {
    std::map<RelationKey, std::set<std::string>> referenced;
    for (const auto& s : program.statements) {
        collect_references(s, relations, referenced);
    }
    std::map<RelationKey, std::set<std::string>> supplied;
    for (const auto& s : program.statements) {
        if (const auto* f = std::get_if<ProbFact>(&s)) {
            collect_supplied(f->atom, relations, supplied);
        } else if (const auto* d = std::get_if<DistFact>(&s)) {
            collect_supplied(d->atom, relations, supplied);
        }
    }
    for (const auto& s : cell_facts) {
        if (const auto* f = std::get_if<ProbFact>(&s)) {
            collect_supplied(f->atom, relations, supplied);
        } else if (const auto* d = std::get_if<DistFact>(&s)) {
            collect_supplied(d->atom, relations, supplied);
        }
    }

    std::string missing;
    for (const auto& [relation, tags] : referenced) {
        const auto it = supplied.find(relation);
        for (const auto& tag : tags) {
            if (it == supplied.end() || !it->second.contains(tag)) {
                if (!missing.empty()) {
                    missing += ", ";
                }
                missing += relation.first + "(" + tag + ")";
            }
        }
    }
    if (!missing.empty()) {
        throw UnknownAtomError("program references feature types absent from the clause database: " + missing);
    }

    MissionProgram out;
    out.statements.reserve(program.statements.size() + cell_facts.size());
    out.lines.reserve(program.statements.size() + cell_facts.size());
    for (std::size_t i = 0; i < program.statements.size(); ++i) {
        out.add(substitute(program.statements[i], bindings), i < program.lines.size() ? program.lines[i] : 0);
    }
    for (const auto& f : cell_facts) {
        out.add(f);
    }
    return out;
}

}  // namespace pml::hplp
