#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace pml {

/**
 * Counter-keyed random stream.
 *
 * The stream is a pure function of its key (e.g. seed, feature index,
 * sample index), so draws do not depend on iteration order or on which
 * worker thread evaluates a cell. Normal variates use Box-Muller on our
 * own uniforms, which keeps results bit-identical across standard
 * library implementations.
 */
class CounterRng {
public:
    CounterRng(std::initializer_list<std::uint64_t> key);

    std::uint64_t next_u64();
    // Uniform in [0, 1).
    double uniform();
    double normal();
    double normal(double mean, double variance);

private:
    std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_string(std::string_view text);

}  // namespace pml
