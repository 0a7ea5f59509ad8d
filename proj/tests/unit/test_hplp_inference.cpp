#include "pml/errors.hpp"
#include "pml/hplp/inference.hpp"
#include "pml/hplp/parser.hpp"

#include "discrete_corpus.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

using namespace pml;
using namespace pml::hplp;
using test_support::discrete_corpus;
using test_support::enumerate;

namespace {

double phi(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double exact(const std::string& text) {
    const auto p = parse_program(text);
    return infer_exact_discrete(ground(p), p.queries().at(0));
}

double sampled(const std::string& text, std::size_t n, std::uint64_t seed, StreamKey key = {}) {
    const auto p = parse_program(text);
    return infer_sampling(ground(p), p.queries().at(0), {n, seed, InferenceMode::sampling}, key);
}

}  // namespace

TEST_SUITE("hplp.inference") {

TEST_CASE("discrete corpus: exact enumeration matches the oracle") {
    for (const auto& c : discrete_corpus()) {
        CAPTURE(c.name);
        const double oracle = enumerate(c.choices, c.holds);
        CHECK(exact(c.program) == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("discrete corpus: sampling agrees with the oracle") {
    const std::size_t n = 20000;
    for (const auto& c : discrete_corpus()) {
        CAPTURE(c.name);
        const double oracle = enumerate(c.choices, c.holds);
        const double tol = 5.0 * std::sqrt(oracle * (1.0 - oracle) / static_cast<double>(n)) + 1e-12;
        CHECK(std::abs(sampled(c.program, n, 11) - oracle) <= tol);
    }
}

TEST_CASE("headline values") {
    CHECK(exact(discrete_corpus()[0].program) == doctest::Approx(0.18));
    CHECK(exact(discrete_corpus()[5].program) == doctest::Approx(0.1));
}

TEST_CASE("Gaussian exceedance through a comparison") {
    const std::string base =
        "distance(r0, c0, building) ~ normal(20, 0.5).\n"
        "distance(r1, c0, building) ~ normal(19, 0.4).\n";
    const double p = sampled(base + "q :- distance(r0, c0, building) > 19. query(q).", 100000, 3);
    CHECK(p == doctest::Approx(phi(1.0 / std::sqrt(0.5))).epsilon(0.01));
    CHECK(phi(1.0 / std::sqrt(0.5)) == doctest::Approx(0.92135).epsilon(1e-4));
    CHECK(sampled(base + "q :- distance(r0, c0, building) > 30. query(q).", 100000, 3) < 1e-6);
    // Second parameter is the variance: P(D < 19 + sqrt(0.4)) = Phi(1).
    CHECK(sampled(base + "q :- distance(r1, c0, building) < 19.632455532. query(q).", 100000, 4) ==
          doctest::Approx(phi(1.0)).epsilon(0.01));
}

TEST_CASE("one sample per distributional atom per world") {
    // Both comparisons read the same draw: exactly one side holds.
    const std::string prog = "x ~ normal(0, 1). a :- x > 0. b :- x =< 0. q :- a, b. r :- a; b.";
    CHECK(sampled(prog + " query(q).", 5000, 1) == 0.0);
    CHECK(sampled(prog + " query(r).", 5000, 1) == 1.0);
}

TEST_CASE("arithmetic over sampled values") {
    const std::string prog =
        "b ~ normal(90, 5). o ~ normal(-0.2, 0.1). d ~ normal(100, 0).\n"
        "ok :- B is b, O is o, D is d, 0 < B + (2 * O * D).\n"
        "query(ok).";
    // B + 200 O ~ N(90 - 40, 5 + 40000 * 0.1)
    const double oracle = phi(50.0 / std::sqrt(5.0 + 4000.0));
    CHECK(sampled(prog, 100000, 9) == doctest::Approx(oracle).epsilon(0.01));
    CHECK(sampled("q :- 2 - -3 * 4 > 13.9, 2 - -3 * 4 < 14.1. query(q).", 10, 1) == 1.0);
}

TEST_CASE("cell program with an analytic oracle") {
    // The listing4.pl rules at one cell, operator distance fixed, other types Gaussian.
    const std::string rules =
        "registered.\n"
        "initial_charge ~ normal(90, 5).\n"
        "discharge ~ normal(-0.2, 0.1).\n"
        "weight ~ normal(2.0, 0.1).\n"
        "1/10::fog; 9/10::clear.\n"
        "vlos(R, C) :- fog, distance(R, C, operator) < 250; clear, distance(R, C, operator) < 500.\n"
        "open(R, C) :- registered, vlos(R, C), weight < 25.\n"
        "can_return(R, C) :- B is initial_charge, O is discharge, D is distance(R, C, operator),\n"
        "    0 < B + (2 * O * D).\n"
        "permit(R, C) :- over(R, C, park); distance(R, C, primary) < 15;\n"
        "    distance(R, C, secondary) < 10; distance(R, C, tertiary) < 5.\n"
        "landscape(R, C) :- permit(R, C), open(R, C), can_return(R, C).\n"
        "query(landscape(R, C)).\n";
    const std::string facts =
        "distance(r3, c4, operator) ~ normal(300, 0).\n"
        "0.25::over(r3, c4, park).\n"
        "distance(r3, c4, primary) ~ normal(20, 16).\n"
        "distance(r3, c4, secondary) ~ normal(12, 4).\n"
        "distance(r3, c4, tertiary) ~ normal(inf, 0).\n"
        "0::over(r3, c4, primary). 0::over(r3, c4, secondary). 0::over(r3, c4, tertiary).\n"
        "0::over(r3, c4, operator).\n";
    const auto program = parse_program(rules);
    const auto cell = parse_program(facts);
    const auto spec = specialize(program, cell.statements, {{"R", Term::atom("r3")}, {"C", Term::atom("c4")}});
    REQUIRE(spec.queries().size() == 1);
    CHECK(to_string(spec.queries()[0]) == "landscape(r3,c4)");

    const double permit = 1.0 - (1.0 - 0.25) * (1.0 - phi((15.0 - 20.0) / 4.0)) * (1.0 - phi((10.0 - 12.0) / 2.0));
    const double vlos = 0.9;                                        // 250 <= d < 500
    const double weight = phi((25.0 - 2.0) / std::sqrt(0.1));       // ~1
    const double ret = phi((90.0 - 0.4 * 300.0 + 0.0) / std::sqrt(5.0 + 4.0 * 300.0 * 300.0 * 0.1));
    const double oracle = permit * vlos * weight * ret;

    const auto g = ground(spec);
    const double p = infer(g, spec.queries()[0], {200000, 5, InferenceMode::sampling}, {3, 4});
    CHECK(p == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("sampling is reproducible and keyed by the stream") {
    const std::string prog = "0.5::a. 0.5::b. q :- a; b. query(q).";
    CHECK(sampled(prog, 1000, 1, {2, 3}) == sampled(prog, 1000, 1, {2, 3}));
    CHECK(sampled(prog, 1000, 1, {2, 3}) != sampled(prog, 1000, 1, {3, 2}));
    CHECK(sampled(prog, 1000, 1) != sampled(prog, 1000, 2));
}

TEST_CASE("mode dispatch and limits") {
    const auto p = parse_program("0.3::a. query(a).");
    const auto g = ground(p);
    CHECK(infer(g, p.queries()[0], {10, 0, InferenceMode::exact_discrete}) == doctest::Approx(0.3));
    CHECK_THROWS_AS(infer_sampling(g, p.queries()[0], {0, 0, InferenceMode::sampling}), DomainError);

    const auto c = parse_program("x ~ normal(0, 1). q :- x > 0. query(q).");
    CHECK_THROWS_AS(infer_exact_discrete(ground(c), c.queries()[0]), UnsupportedProgramError);

    std::string big;
    for (int i = 0; i < 25; ++i) {
        big += "0.5::f" + std::to_string(i) + ". q :- f" + std::to_string(i) + ".\n";
    }
    big += "query(q).";
    const auto b = parse_program(big);
    CHECK_THROWS_AS(infer_exact_discrete(ground(b), b.queries()[0]), CapacityError);
}

TEST_CASE("program errors") {
    const auto bad_family = parse_program("x ~ gamma(1, 2). q :- x > 0. query(q).");
    CHECK_THROWS_AS(infer_sampling(ground(bad_family), bad_family.queries()[0], {}), ConfigurationError);
    const auto bad_arity = parse_program("x ~ normal(1). q :- x > 0. query(q).");
    CHECK_THROWS_AS(infer_sampling(ground(bad_arity), bad_arity.queries()[0], {}), ConfigurationError);
    CHECK_THROWS_AS(ground(parse_program("q :- y > 0. query(q).")), UnknownAtomError);
    CHECK_THROWS_AS(ground(parse_program("q(X) :- X > 0. query(q(a)).")), EvaluationError);
    const auto p = parse_program("0.3::a. query(a).");
    CHECK_THROWS_AS(infer_sampling(ground(p), Term::compound("a", {Term::variable("X")}), {}), EvaluationError);

    const auto spec_prog = parse_program("q(R, C) :- distance(R, C, lake) < 3. query(q(R, C)).");
    CHECK_THROWS_AS(specialize(spec_prog, {}, {{"R", Term::atom("r0")}, {"C", Term::atom("c0")}}), UnknownAtomError);
}

}
