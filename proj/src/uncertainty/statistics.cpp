#include "pml/uncertainty.hpp"

#include "pml/errors.hpp"

namespace pml::uncertainty {

GaussianParams moment_match(std::span<const double> values) {
    if (values.empty()) {
        throw DomainError("moment matching needs at least one value");
    }
    // Identical samples (zero-error maps) give the exact value and variance 0.
    bool constant = true;
    for (const double v : values) {
        constant = constant && v == values.front();
    }
    if (constant) {
        return {values.front(), 0.0};
    }
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    const double n = static_cast<double>(values.size());
    const double mean = sum / n;
    if (values.size() == 1) {
        return {mean, 0.0};
    }
    double sq = 0.0;
    for (const double v : values) {
        const double d = v - mean;
        sq += d * d;
    }
    return {mean, sq / (n - 1.0)};
}

double occupancy_estimate(std::size_t hits, std::size_t sample_count) {
    if (sample_count == 0) {
        throw DomainError("occupancy needs at least one sample");
    }
    if (hits > sample_count) {
        throw DomainError("hit count exceeds sample count");
    }
    return static_cast<double>(hits) / static_cast<double>(sample_count);
}

}  // namespace pml::uncertainty
