#include "pml/errors.hpp"
#include "pml/hplp/inference.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <unordered_set>

namespace pml::hplp {

void build_watch_lists(GroundProgram& g);

namespace {

struct Binding {
    std::string name;
    Term value;
    bool random = false;  // bound by `is` to an expression over sampled values
};

using Env = std::vector<Binding>;

const Binding* lookup(const Env& env, const std::string& name) {
    for (const auto& b : env) {
        if (b.name == name) {
            return &b;
        }
    }
    return nullptr;
}

std::string predicate_key(const Term& t) {
    return t.name + "/" + std::to_string(t.args.size());
}

std::optional<double> fold(const Term& t) {
    if (t.kind == Term::Kind::number) {
        return t.value;
    }
    if (!t.is_arithmetic()) {
        return std::nullopt;
    }
    if (t.args.size() == 1) {
        const auto v = fold(t.args[0]);
        return v ? std::optional<double>(-*v) : std::nullopt;
    }
    const auto a = fold(t.args[0]);
    const auto b = fold(t.args[1]);
    if (!a || !b) {
        return std::nullopt;
    }
    if (t.name == "+") return *a + *b;
    if (t.name == "-") return *a - *b;
    return *a * *b;
}

struct ClauseContext {
    std::size_t rule_index = 0;
    std::size_t alternative = 0;
    const Rule* rule = nullptr;
    std::size_t line = 0;

    std::string describe() const {
        std::string d = "rule '" + rule->head.name + "/" + std::to_string(rule->head.args.size()) + "'";
        if (line > 0) {
            d += " (line " + std::to_string(line) + ")";
        }
        return d;
    }
};

class Grounder {
public:
    Grounder(const MissionProgram& program, const GroundOptions& options) : program_(program), options_(options) {}

    GroundProgram run() {
        collect_facts();
        std::vector<ClauseContext> clauses;
        for (std::size_t i = 0; i < program_.statements.size(); ++i) {
            const auto* rule = std::get_if<Rule>(&program_.statements[i]);
            if (rule == nullptr) {
                continue;
            }
            const std::size_t line = i < program_.lines.size() ? program_.lines[i] : 0;
            if (rule->body.empty()) {
                ClauseContext ctx{i, 0, rule, line};
                add_fact_rule(ctx);
                continue;
            }
            for (std::size_t a = 0; a < rule->body.size(); ++a) {
                clauses.push_back({i, a, rule, line});
            }
        }

        bool changed = true;
        while (changed) {
            changed_ = false;
            for (const auto& c : clauses) {
                Env env;
                std::vector<AtomId> body;
                std::vector<std::uint32_t> constraints;
                solve(c, c.rule->body[c.alternative], 0, env, body, constraints);
            }
            changed = changed_;
        }

        for (const auto& s : program_.statements) {
            if (const auto* q = std::get_if<Query>(&s)) {
                if (!q->atom.is_ground()) {
                    throw EvaluationError("query '" + to_string(q->atom) + "' is not ground");
                }
                out_.queries.push_back(intern(q->atom));
            }
        }

        build_watch_lists(out_);
        return std::move(out_);
    }

private:
    AtomId intern(const Term& atom) {
        return intern_key(to_string(atom));
    }

    AtomId intern_key(const std::string& key) {
        const auto [it, inserted] = out_.atom_index.try_emplace(key, static_cast<AtomId>(out_.atom_names.size()));
        if (inserted) {
            if (out_.atom_names.size() >= options_.max_atoms) {
                throw CapacityError("grounding exceeded " + std::to_string(options_.max_atoms) + " atoms");
            }
            out_.atom_names.push_back(key);
            possible_flag_.push_back(0);
        }
        return it->second;
    }

    AtomId make_possible(const Term& atom) {
        const AtomId id = intern(atom);
        if (!possible_flag_[id]) {
            possible_flag_[id] = 1;
            possible_[predicate_key(atom)].push_back({atom, id});
            changed_ = true;
        }
        return id;
    }

    void collect_facts() {
        for (std::size_t i = 0; i < program_.statements.size(); ++i) {
            const auto& s = program_.statements[i];
            if (const auto* d = std::get_if<DistFact>(&s)) {
                if (!d->atom.is_ground()) {
                    throw EvaluationError("distributional fact '" + to_string(d->atom) + "' is not ground");
                }
                const std::string key = to_string(d->atom);
                if (real_index_.contains(key)) {
                    throw EvaluationError("distributional atom '" + key + "' is defined more than once");
                }
                real_index_[key] = static_cast<std::uint32_t>(out_.real_sources.size());
                out_.real_sources.push_back({key, d->family, d->params});
            } else if (const auto* f = std::get_if<ProbFact>(&s)) {
                if (!f->atom.is_ground()) {
                    throw EvaluationError("probabilistic fact '" + to_string(f->atom) + "' is not ground");
                }
                out_.bool_sources.push_back({f->probability, make_possible(f->atom)});
            } else if (const auto* ad = std::get_if<AnnotatedDisjunction>(&s)) {
                ChoiceGroup group;
                for (const auto& [w, atom] : ad->choices) {
                    if (!atom.is_ground()) {
                        throw EvaluationError("annotated disjunct '" + to_string(atom) + "' is not ground");
                    }
                    group.weights.push_back(w);
                    group.atoms.push_back(make_possible(atom));
                }
                out_.choice_groups.push_back(std::move(group));
            }
        }
    }

    void add_fact_rule(const ClauseContext& ctx) {
        const Term& head = ctx.rule->head;
        if (!head.is_ground()) {
            throw EvaluationError(ctx.describe() + ": fact head '" + to_string(head) + "' is not ground");
        }
        const AtomId id = make_possible(head);
        if (ctx.rule->probability) {
            out_.bool_sources.push_back({*ctx.rule->probability, id});
        } else {
            out_.certain.push_back(id);
        }
    }

    Term resolve(const Term& t, const Env& env, const ClauseContext& ctx, bool allow_random) const {
        if (t.kind == Term::Kind::variable) {
            const Binding* b = lookup(env, t.name);
            if (b == nullptr) {
                return t;
            }
            if (b->random && !allow_random) {
                throw EvaluationError(ctx.describe() + ": variable " + t.name +
                                      " holds a sampled value and cannot be used as an atom argument");
            }
            return b->value;
        }
        if (t.kind != Term::Kind::compound) {
            return t;
        }
        Term out = t;
        for (auto& a : out.args) {
            a = resolve(a, env, ctx, allow_random);
        }
        return out;
    }

    static bool unify(const Term& pattern, const Term& ground, Env& env) {
        switch (pattern.kind) {
            case Term::Kind::variable: {
                if (pattern.name == "_") {
                    return true;
                }
                if (const Binding* b = lookup(env, pattern.name)) {
                    return b->value == ground;
                }
                env.push_back({pattern.name, ground, false});
                return true;
            }
            case Term::Kind::atom:
                return ground.kind == Term::Kind::atom && ground.name == pattern.name;
            case Term::Kind::number:
                return ground.kind == Term::Kind::number && ground.value == pattern.value;
            case Term::Kind::compound:
                if (ground.kind != Term::Kind::compound || ground.name != pattern.name ||
                    ground.args.size() != pattern.args.size()) {
                    return false;
                }
                for (std::size_t i = 0; i < pattern.args.size(); ++i) {
                    if (!unify(pattern.args[i], ground.args[i], env)) {
                        return false;
                    }
                }
                return true;
        }
        return false;
    }

    // Expression with all variables resolved; throws on unbound variables.
    Term resolve_expression(const Term& t, const Env& env, const ClauseContext& ctx) const {
        Term e = resolve(t, env, ctx, true);
        require_bound(e, ctx);
        return e;
    }

    static void require_bound(const Term& t, const ClauseContext& ctx) {
        if (t.kind == Term::Kind::variable) {
            throw EvaluationError(ctx.describe() + ": unbound variable " + t.name + " in arithmetic");
        }
        for (const auto& a : t.args) {
            require_bound(a, ctx);
        }
    }

    void compile(const Term& t, std::vector<Instruction>& code, const ClauseContext& ctx) {
        if (t.kind == Term::Kind::number) {
            code.push_back({Instruction::Op::push_constant, t.value, 0});
            return;
        }
        if (t.is_arithmetic()) {
            for (const auto& a : t.args) {
                compile(a, code, ctx);
            }
            Instruction::Op op = Instruction::Op::negate;
            if (t.args.size() == 2) {
                op = t.name == "+" ? Instruction::Op::add
                     : t.name == "-" ? Instruction::Op::subtract
                                     : Instruction::Op::multiply;
            }
            code.push_back({op, 0.0, 0});
            return;
        }
        const std::string key = to_string(t);
        const auto it = real_index_.find(key);
        if (it == real_index_.end()) {
            throw UnknownAtomError(ctx.describe() + ": '" + key + "' is not a number or a distributional atom");
        }
        code.push_back({Instruction::Op::push_value, 0.0, it->second});
    }

    std::uint32_t intern_constraint(const Term& lhs, CompareOp op, const Term& rhs, const ClauseContext& ctx) {
        std::string text = to_string(lhs) + " " + to_string(op) + " " + to_string(rhs);
        if (const auto it = constraint_index_.find(text); it != constraint_index_.end()) {
            return it->second;
        }
        GroundConstraint c;
        compile(lhs, c.lhs, ctx);
        c.op = op;
        compile(rhs, c.rhs, ctx);
        c.text = text;
        const auto id = static_cast<std::uint32_t>(out_.constraints.size());
        out_.constraints.push_back(std::move(c));
        constraint_index_.emplace(std::move(text), id);
        return id;
    }

    void solve(const ClauseContext& ctx, const Conjunction& conj, std::size_t i, Env& env,
               std::vector<AtomId>& body, std::vector<std::uint32_t>& constraints) {
        if (i == conj.size()) {
            emit(ctx, env, body, constraints);
            return;
        }
        const Literal& lit = conj[i];
        switch (lit.kind) {
            case Literal::Kind::call: {
                const Term goal = resolve(lit.left, env, ctx, false);
                const auto table = possible_.find(predicate_key(goal));
                if (table == possible_.end()) {
                    return;
                }
                if (goal.is_ground()) {
                    const auto it = out_.atom_index.find(to_string(goal));
                    if (it != out_.atom_index.end() && possible_flag_[it->second]) {
                        body.push_back(it->second);
                        solve(ctx, conj, i + 1, env, body, constraints);
                        body.pop_back();
                    }
                    return;
                }
                const std::size_t count = table->second.size();
                for (std::size_t k = 0; k < count; ++k) {
                    const auto candidate = table->second[k];
                    const std::size_t mark = env.size();
                    if (unify(goal, candidate.first, env)) {
                        body.push_back(candidate.second);
                        solve(ctx, conj, i + 1, env, body, constraints);
                        body.pop_back();
                    }
                    env.resize(mark);
                }
                return;
            }
            case Literal::Kind::is: {
                if (!lit.left.is_variable()) {
                    throw EvaluationError(ctx.describe() + ": left side of 'is' must be a variable");
                }
                if (lookup(env, lit.left.name) != nullptr) {
                    throw EvaluationError(ctx.describe() + ": variable " + lit.left.name + " is already bound");
                }
                const Term expr = resolve_expression(lit.right, env, ctx);
                const auto folded = fold(expr);
                if (folded) {
                    env.push_back({lit.left.name, Term::number(*folded), false});
                } else {
                    // Validate references now so the error names this rule.
                    std::vector<Instruction> scratch;
                    compile(expr, scratch, ctx);
                    env.push_back({lit.left.name, expr, true});
                }
                solve(ctx, conj, i + 1, env, body, constraints);
                env.pop_back();
                return;
            }
            case Literal::Kind::compare: {
                const Term lhs = resolve_expression(lit.left, env, ctx);
                const Term rhs = resolve_expression(lit.right, env, ctx);
                const auto a = fold(lhs);
                const auto b = fold(rhs);
                if (a && b) {
                    if (compare(*a, lit.op, *b)) {
                        solve(ctx, conj, i + 1, env, body, constraints);
                    }
                    return;
                }
                constraints.push_back(intern_constraint(lhs, lit.op, rhs, ctx));
                solve(ctx, conj, i + 1, env, body, constraints);
                constraints.pop_back();
                return;
            }
        }
    }

    void emit(const ClauseContext& ctx, const Env& env, const std::vector<AtomId>& body,
              const std::vector<std::uint32_t>& constraints) {
        const Term head = resolve(ctx.rule->head, env, ctx, false);
        if (!head.is_ground()) {
            throw EvaluationError(ctx.describe() + ": head '" + to_string(head) +
                                  "' has variables not bound by the body");
        }
        GroundRule rule;
        rule.body = body;
        rule.constraints = constraints;

        std::string key = std::to_string(ctx.rule_index) + "|" + std::to_string(ctx.alternative) + "|";
        if (ctx.rule->probability) {
            // One switch per ground instance: the rule and its logical variable bindings.
            std::vector<std::string> parts;
            for (const auto& b : env) {
                if (!b.random) {
                    parts.push_back(b.name + "=" + to_string(b.value));
                }
            }
            std::sort(parts.begin(), parts.end());
            std::string switch_key = "$switch(" + std::to_string(ctx.rule_index) + ":" + to_string(head);
            for (const auto& p : parts) {
                switch_key += "," + p;
            }
            switch_key += ")";
            const auto [it, inserted] = switches_.try_emplace(switch_key, 0);
            if (inserted) {
                it->second = intern_key(switch_key);
                out_.bool_sources.push_back({*ctx.rule->probability, it->second});
            }
            rule.body.push_back(it->second);
        }

        rule.head = make_possible(head);
        key += std::to_string(rule.head);
        for (const auto a : rule.body) {
            key += "," + std::to_string(a);
        }
        key += "|";
        for (const auto c : rule.constraints) {
            key += "," + std::to_string(c);
        }
        if (instances_.insert(std::move(key)).second) {
            out_.rules.push_back(std::move(rule));
            changed_ = true;
        }
    }

    const MissionProgram& program_;
    GroundOptions options_;
    GroundProgram out_;
    std::vector<unsigned char> possible_flag_;
    std::unordered_map<std::string, std::vector<std::pair<Term, AtomId>>> possible_;
    std::unordered_map<std::string, std::uint32_t> real_index_;
    std::unordered_map<std::string, std::uint32_t> constraint_index_;
    std::unordered_map<std::string, AtomId> switches_;
    std::unordered_set<std::string> instances_;
    bool changed_ = false;
};

}  // namespace

void build_watch_lists(GroundProgram& g) {
    const std::size_t n = g.atom_names.size();
    g.watch_offsets.assign(n + 1, 0);
    for (const auto& r : g.rules) {
        for (const auto a : r.body) {
            ++g.watch_offsets[a + 1];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        g.watch_offsets[i + 1] += g.watch_offsets[i];
    }
    g.watch_rules.assign(g.watch_offsets[n], 0);
    std::vector<std::uint32_t> fill(g.watch_offsets.begin(), g.watch_offsets.end() - 1);
    for (std::uint32_t r = 0; r < g.rules.size(); ++r) {
        for (const auto a : g.rules[r].body) {
            g.watch_rules[fill[a]++] = r;
        }
    }
}

double ChoiceGroup::residual() const {
    double total = 0.0;
    for (const double w : weights) {
        total += w;
    }
    return std::max(0.0, 1.0 - total);
}

AtomId GroundProgram::find(const Term& atom) const {
    return find(to_string(atom));
}

AtomId GroundProgram::find(const std::string& key) const {
    const auto it = atom_index.find(key);
    return it == atom_index.end() ? npos : it->second;
}

namespace {

GroundProgram restrict_to_atoms(const GroundProgram& g, const std::vector<AtomId>& roots) {
    const std::size_t n = g.atom_names.size();
    std::vector<std::vector<std::uint32_t>> rules_by_head(n);
    for (std::uint32_t r = 0; r < g.rules.size(); ++r) {
        rules_by_head[g.rules[r].head].push_back(r);
    }

    std::vector<unsigned char> relevant(n, 0);
    std::vector<AtomId> stack;
    for (const auto q : roots) {
        if (q != GroundProgram::npos && !relevant[q]) {
            relevant[q] = 1;
            stack.push_back(q);
        }
    }
    std::vector<unsigned char> keep_rule(g.rules.size(), 0);
    while (!stack.empty()) {
        const AtomId a = stack.back();
        stack.pop_back();
        for (const auto r : rules_by_head[a]) {
            keep_rule[r] = 1;
            for (const auto b : g.rules[r].body) {
                if (!relevant[b]) {
                    relevant[b] = 1;
                    stack.push_back(b);
                }
            }
        }
    }

    GroundProgram out;
    out.atom_names = g.atom_names;
    out.atom_index = g.atom_index;
    out.queries = roots;
    for (const auto a : g.certain) {
        if (relevant[a]) {
            out.certain.push_back(a);
        }
    }
    for (const auto& s : g.bool_sources) {
        if (relevant[s.atom]) {
            out.bool_sources.push_back(s);
        }
    }
    for (const auto& group : g.choice_groups) {
        const bool used = std::any_of(group.atoms.begin(), group.atoms.end(), [&](AtomId a) { return relevant[a]; });
        if (used) {
            out.choice_groups.push_back(group);
        }
    }

    std::vector<std::uint32_t> constraint_map(g.constraints.size(), static_cast<std::uint32_t>(-1));
    std::vector<std::uint32_t> real_map(g.real_sources.size(), static_cast<std::uint32_t>(-1));
    auto remap_code = [&](std::vector<Instruction> code) {
        for (auto& ins : code) {
            if (ins.op == Instruction::Op::push_value) {
                auto& slot = real_map[ins.value];
                if (slot == static_cast<std::uint32_t>(-1)) {
                    slot = static_cast<std::uint32_t>(out.real_sources.size());
                    out.real_sources.push_back(g.real_sources[ins.value]);
                }
                ins.value = slot;
            }
        }
        return code;
    };
    for (std::uint32_t r = 0; r < g.rules.size(); ++r) {
        if (!keep_rule[r]) {
            continue;
        }
        GroundRule rule = g.rules[r];
        for (auto& c : rule.constraints) {
            auto& slot = constraint_map[c];
            if (slot == static_cast<std::uint32_t>(-1)) {
                slot = static_cast<std::uint32_t>(out.constraints.size());
                const auto& src = g.constraints[c];
                out.constraints.push_back({remap_code(src.lhs), src.op, remap_code(src.rhs), src.text});
            }
            c = slot;
        }
        out.rules.push_back(std::move(rule));
    }
    build_watch_lists(out);
    return out;
}

}  // namespace

GroundProgram restrict_to(const GroundProgram& program, AtomId query) {
    return restrict_to_atoms(program, {query});
}

GroundProgram ground(const MissionProgram& program, const GroundOptions& options) {
    GroundProgram full = Grounder(program, options).run();
    if (!options.prune_to_queries) {
        return full;
    }
    return restrict_to_atoms(full, full.queries);
}

}  // namespace pml::hplp
