#include "pml/errors.hpp"
#include "pml/hplp/inference.hpp"

#include <cmath>
#include <limits>

namespace pml::hplp {

namespace {

constexpr std::uint32_t kDisabled = std::numeric_limits<std::uint32_t>::max();

void validate_real_sources(const GroundProgram& g) {
    for (const auto& r : g.real_sources) {
        if (r.family != "normal") {
            throw ConfigurationError("unsupported distribution family '" + r.family + "' for '" + r.name + "'");
        }
        if (r.params.size() != 2) {
            throw ConfigurationError("normal distribution of '" + r.name + "' needs (mean, variance)");
        }
        if (!(r.params[1] >= 0.0)) {
            throw ConfigurationError("normal distribution of '" + r.name + "' has negative variance");
        }
    }
}

void sample_into(const GroundProgram& g, CounterRng& rng, PossibleWorld& world) {
    world.facts.resize(g.bool_sources.size());
    for (std::size_t i = 0; i < g.bool_sources.size(); ++i) {
        world.facts[i] = rng.uniform() < g.bool_sources[i].probability ? 1 : 0;
    }
    world.choices.resize(g.choice_groups.size());
    for (std::size_t i = 0; i < g.choice_groups.size(); ++i) {
        const auto& weights = g.choice_groups[i].weights;
        const double u = rng.uniform();
        double cumulative = 0.0;
        int chosen = -1;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            cumulative += weights[k];
            if (u < cumulative) {
                chosen = static_cast<int>(k);
                break;
            }
        }
        world.choices[i] = chosen;
    }
    world.values.resize(g.real_sources.size());
    for (std::size_t i = 0; i < g.real_sources.size(); ++i) {
        const auto& p = g.real_sources[i].params;
        world.values[i] = rng.normal(p[0], p[1]);
    }
}

class Evaluator {
public:
    bool run(const GroundProgram& g, const PossibleWorld& world, AtomId query) {
        if (query == GroundProgram::npos) {
            return false;
        }
        truth_.assign(g.atom_names.size(), 0);
        stack_.clear();
        auto set_true = [this](AtomId a) {
            if (!truth_[a]) {
                truth_[a] = 1;
                stack_.push_back(a);
            }
        };
        for (const auto a : g.certain) {
            set_true(a);
        }
        for (std::size_t i = 0; i < g.bool_sources.size(); ++i) {
            if (world.facts[i]) {
                set_true(g.bool_sources[i].atom);
            }
        }
        for (std::size_t i = 0; i < g.choice_groups.size(); ++i) {
            if (world.choices[i] >= 0) {
                set_true(g.choice_groups[i].atoms[static_cast<std::size_t>(world.choices[i])]);
            }
        }

        constraint_ok_.resize(g.constraints.size());
        for (std::size_t c = 0; c < g.constraints.size(); ++c) {
            const auto& gc = g.constraints[c];
            constraint_ok_[c] = compare(execute(gc.lhs, world), gc.op, execute(gc.rhs, world)) ? 1 : 0;
        }

        remaining_.resize(g.rules.size());
        for (std::size_t r = 0; r < g.rules.size(); ++r) {
            const auto& rule = g.rules[r];
            bool enabled = true;
            for (const auto c : rule.constraints) {
                if (!constraint_ok_[c]) {
                    enabled = false;
                    break;
                }
            }
            remaining_[r] = enabled ? static_cast<std::uint32_t>(rule.body.size()) : kDisabled;
            if (enabled && rule.body.empty()) {
                set_true(rule.head);
            }
        }

        while (!stack_.empty()) {
            if (truth_[query]) {
                return true;
            }
            const AtomId a = stack_.back();
            stack_.pop_back();
            for (std::uint32_t k = g.watch_offsets[a]; k < g.watch_offsets[a + 1]; ++k) {
                const std::uint32_t r = g.watch_rules[k];
                if (remaining_[r] != kDisabled && --remaining_[r] == 0) {
                    set_true(g.rules[r].head);
                }
            }
        }
        return truth_[query] != 0;
    }

private:
    double execute(const std::vector<Instruction>& code, const PossibleWorld& world) {
        values_.clear();
        for (const auto& ins : code) {
            switch (ins.op) {
                case Instruction::Op::push_constant:
                    values_.push_back(ins.constant);
                    break;
                case Instruction::Op::push_value:
                    values_.push_back(world.values[ins.value]);
                    break;
                case Instruction::Op::negate:
                    values_.back() = -values_.back();
                    break;
                default: {
                    const double b = values_.back();
                    values_.pop_back();
                    double& a = values_.back();
                    if (ins.op == Instruction::Op::add) {
                        a += b;
                    } else if (ins.op == Instruction::Op::subtract) {
                        a -= b;
                    } else {
                        a *= b;
                    }
                }
            }
        }
        return values_.back();
    }

    std::vector<unsigned char> truth_;
    std::vector<AtomId> stack_;
    std::vector<unsigned char> constraint_ok_;
    std::vector<std::uint32_t> remaining_;
    std::vector<double> values_;
};

AtomId require_query(const GroundProgram& program, const Term& query) {
    if (!query.is_ground()) {
        throw EvaluationError("query '" + to_string(query) + "' is not ground");
    }
    return program.find(query);
}

}  // namespace

PossibleWorld sample_world(const GroundProgram& program, CounterRng& rng) {
    validate_real_sources(program);
    PossibleWorld world;
    sample_into(program, rng, world);
    return world;
}

bool evaluate(const GroundProgram& program, const PossibleWorld& world, AtomId query) {
    if (world.facts.size() != program.bool_sources.size() || world.choices.size() != program.choice_groups.size() ||
        world.values.size() != program.real_sources.size()) {
        throw EvaluationError("world does not cover the random symbols of the program");
    }
    Evaluator evaluator;
    return evaluator.run(program, world, query);
}

bool evaluate(const GroundProgram& program, const PossibleWorld& world, const Term& query) {
    return evaluate(program, world, require_query(program, query));
}

double infer_sampling(const GroundProgram& program, const Term& query, const InferenceParams& params, StreamKey key) {
    if (params.sample_count == 0) {
        throw DomainError("inference needs at least one sample");
    }
    const AtomId q = require_query(program, query);
    if (q == GroundProgram::npos) {
        return 0.0;
    }
    const GroundProgram relevant = restrict_to(program, q);
    validate_real_sources(relevant);

    Evaluator evaluator;
    PossibleWorld world;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < params.sample_count; ++k) {
        CounterRng rng{params.seed, key.row, key.col, k};
        sample_into(relevant, rng, world);
        if (evaluator.run(relevant, world, q)) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(params.sample_count);
}

double infer_exact_discrete(const GroundProgram& program, const Term& query) {
    const AtomId q = require_query(program, query);
    if (q == GroundProgram::npos) {
        return 0.0;
    }
    const GroundProgram g = restrict_to(program, q);
    if (!g.real_sources.empty()) {
        throw UnsupportedProgramError("exact inference does not support distributional facts ('" +
                                      g.real_sources.front().name + "')");
    }

    std::vector<std::size_t> radix;
    std::vector<bool> has_residual;
    double log2_worlds = static_cast<double>(g.bool_sources.size());
    for (const auto& group : g.choice_groups) {
        const bool residual = group.residual() > 1e-12;
        has_residual.push_back(residual);
        radix.push_back(group.weights.size() + (residual ? 1 : 0));
        log2_worlds += std::log2(static_cast<double>(radix.back()));
    }
    if (log2_worlds > static_cast<double>(kMaxExactWorldsLog2) + 1e-9) {
        throw CapacityError("exact enumeration needs 2^" + std::to_string(log2_worlds) + " worlds (limit 2^" +
                            std::to_string(kMaxExactWorldsLog2) + ")");
    }

    PossibleWorld world;
    world.facts.assign(g.bool_sources.size(), 0);
    world.choices.assign(g.choice_groups.size(), 0);
    std::vector<std::size_t> digits(g.choice_groups.size(), 0);
    Evaluator evaluator;
    double total = 0.0;

    const std::uint64_t fact_worlds = std::uint64_t{1} << g.bool_sources.size();
    while (true) {
        double choice_weight = 1.0;
        for (std::size_t i = 0; i < digits.size(); ++i) {
            const auto& group = g.choice_groups[i];
            if (digits[i] < group.weights.size()) {
                world.choices[i] = static_cast<int>(digits[i]);
                choice_weight *= group.weights[digits[i]];
            } else {
                world.choices[i] = -1;
                choice_weight *= group.residual();
            }
        }
        if (choice_weight > 0.0) {
            for (std::uint64_t mask = 0; mask < fact_worlds; ++mask) {
                double weight = choice_weight;
                for (std::size_t i = 0; i < g.bool_sources.size(); ++i) {
                    const bool on = (mask >> i) & 1U;
                    world.facts[i] = on ? 1 : 0;
                    const double p = g.bool_sources[i].probability;
                    weight *= on ? p : 1.0 - p;
                }
                if (weight > 0.0 && evaluator.run(g, world, q)) {
                    total += weight;
                }
            }
        }
        std::size_t i = 0;
        while (i < digits.size() && ++digits[i] == radix[i]) {
            digits[i] = 0;
            ++i;
        }
        if (i == digits.size()) {
            break;
        }
    }
    return total;
}

double infer(const GroundProgram& program, const Term& query, const InferenceParams& params, StreamKey key) {
    switch (params.mode) {
        case InferenceMode::sampling:
            return infer_sampling(program, query, params, key);
        case InferenceMode::exact_discrete:
            return infer_exact_discrete(program, query);
    }
    return 0.0;
}

}  // namespace pml::hplp
