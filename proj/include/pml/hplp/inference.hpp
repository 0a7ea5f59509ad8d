#pragma once

#include "pml/hplp/program.hpp"
#include "pml/random.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pml::hplp {

// ---------------------------------------------------------------------------
// Specialization
// ---------------------------------------------------------------------------

// Variable name -> ground term. Applied to every clause of the program.
using Bindings = std::vector<std::pair<std::string, Term>>;

/**
 * Program relations whose facts come from the per-cell clause database.
 * References to one of these with a constant type argument (the last
 * argument) must be backed by a supplied fact for that type.
 */
struct CellRelations {
    std::vector<std::pair<std::string, std::size_t>> relations{{"distance", 3}, {"over", 3}};
};

/**
 * Binds the grid variables in every clause and appends the per-cell facts.
 *
 * Throws UnknownAtomError when the program references a cell relation type
 * (e.g. `distance(R, C, primary)`) for which no fact was supplied.
 */
MissionProgram specialize(const MissionProgram& program, std::span<const Statement> cell_facts,
                          const Bindings& bindings, const CellRelations& relations = {});

// ---------------------------------------------------------------------------
// Ground programs
// ---------------------------------------------------------------------------

using AtomId = std::uint32_t;

// Postfix arithmetic over sampled values.
struct Instruction {
    enum class Op : unsigned char { push_constant, push_value, add, subtract, multiply, negate };
    Op op = Op::push_constant;
    double constant = 0.0;
    std::uint32_t value = 0;
};

struct GroundConstraint {
    std::vector<Instruction> lhs;
    CompareOp op = CompareOp::less;
    std::vector<Instruction> rhs;
    std::string text;
};

struct GroundRule {
    AtomId head = 0;
    std::vector<AtomId> body;
    std::vector<std::uint32_t> constraints;
};

// Bernoulli source: a probabilistic fact or the switch of a probabilistic rule.
struct BoolSource {
    double probability = 1.0;
    AtomId atom = 0;
};

struct ChoiceGroup {
    std::vector<double> weights;
    std::vector<AtomId> atoms;
    double residual() const;
};

struct RealSource {
    std::string name;
    std::string family;
    std::vector<double> params;
};

/**
 * Propositional form of a specialized program: random sources, ground rule
 * instances and compiled comparison constraints. Evaluation of a world is a
 * linear-time Horn fixpoint over `rules`.
 */
struct GroundProgram {
    std::vector<std::string> atom_names;
    std::vector<AtomId> certain;
    std::vector<BoolSource> bool_sources;
    std::vector<ChoiceGroup> choice_groups;
    std::vector<RealSource> real_sources;
    std::vector<GroundConstraint> constraints;
    std::vector<GroundRule> rules;
    std::vector<AtomId> queries;

    // Body occurrence lists: rules watching each atom (CSR layout).
    std::vector<std::uint32_t> watch_offsets;
    std::vector<std::uint32_t> watch_rules;

    std::unordered_map<std::string, AtomId> atom_index;

    // Id of a ground atom, or npos when the atom has no support.
    static constexpr AtomId npos = static_cast<AtomId>(-1);
    AtomId find(const Term& atom) const;
    AtomId find(const std::string& key) const;
};

struct GroundOptions {
    // Drop rules and sources that cannot influence any query.
    bool prune_to_queries = true;
    std::size_t max_atoms = 1'000'000;
};

GroundProgram ground(const MissionProgram& program, const GroundOptions& options = {});

// Keeps only what `query` depends on.
GroundProgram restrict_to(const GroundProgram& program, AtomId query);

// ---------------------------------------------------------------------------
// Worlds and inference
// ---------------------------------------------------------------------------

struct PossibleWorld {
    std::vector<unsigned char> facts;  // per bool source
    std::vector<int> choices;          // per choice group; -1 selects no head
    std::vector<double> values;        // per real source
};

PossibleWorld sample_world(const GroundProgram& program, CounterRng& rng);

bool evaluate(const GroundProgram& program, const PossibleWorld& world, const Term& query);
bool evaluate(const GroundProgram& program, const PossibleWorld& world, AtomId query);

enum class InferenceMode { sampling, exact_discrete };

inline constexpr std::size_t kDefaultInferenceSamples = 2500;

struct InferenceParams {
    std::size_t sample_count = kDefaultInferenceSamples;
    std::uint64_t seed = 0;
    InferenceMode mode = InferenceMode::sampling;
};

// Identifies an independent family of world streams, e.g. one grid cell.
struct StreamKey {
    std::uint64_t row = 0;
    std::uint64_t col = 0;
};

// Fraction of sampled worlds in which `query` holds. World k draws from
// CounterRng{seed, row, col, k}, so the result does not depend on threads.
double infer_sampling(const GroundProgram& program, const Term& query, const InferenceParams& params,
                      StreamKey key = {});

inline constexpr std::size_t kMaxExactWorldsLog2 = 24;

// Enumerates every world of a discrete program.
double infer_exact_discrete(const GroundProgram& program, const Term& query);

double infer(const GroundProgram& program, const Term& query, const InferenceParams& params,
             StreamKey key = {});

}  // namespace pml::hplp
