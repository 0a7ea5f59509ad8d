#include "pml/uncertainty.hpp"

#include "pml/errors.hpp"

#include <cmath>

namespace pml::uncertainty {

namespace {

Vec2 sample_translation(const ErrorParams& p, CounterRng& rng) {
    // Cholesky factor of a PSD 2x2 covariance; zero pivots are allowed.
    const auto& c = p.translation_cov;
    const double l11 = std::sqrt(c.a11);
    const double l21 = l11 > 0.0 ? c.a21 / l11 : 0.0;
    const double l22 = std::sqrt(std::max(0.0, c.a22 - l21 * l21));
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    return {p.translation_mean.x + l11 * z1, p.translation_mean.y + l21 * z1 + l22 * z2};
}

}  // namespace

AffineSample sample_affine(const AffineErrorModel& model, const std::string& type_tag, CounterRng& rng) {
    const ErrorParams& p = model.params_for(type_tag);

    // Draw order is fixed: rotation, scale, shear, translation.
    const double theta = rng.normal() * p.rotation_sigma;
    const double scale = 1.0 + rng.normal() * p.scale_sigma;
    const double shear = rng.normal() * p.shear_sigma;

    const Mat2 rotation{std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta)};
    const Mat2 scaling = Mat2::diagonal(scale, scale);
    const Mat2 shearing{1.0, shear, 0.0, 1.0};

    AffineSample sample;
    sample.transform = rotation * scaling * shearing;
    sample.translation = sample_translation(p, rng);
    return sample;
}

geo::Geometry apply_affine(const geo::Geometry& g, const AffineSample& sample) {
    std::vector<geo::CartesianLocation> moved;
    moved.reserve(g.vertices().size());
    if (sample.transform == Mat2::identity()) {
        // c + (v - c) is not exact in floating point; keep pure translation exact.
        for (const auto& v : g.vertices()) {
            moved.push_back({v.east + sample.translation.x, v.north + sample.translation.y});
        }
        return g.with_vertices(std::move(moved));
    }
    const geo::CartesianLocation center = g.centroid();
    for (const auto& v : g.vertices()) {
        const Vec2 rel = sample.transform * Vec2{v.east - center.east, v.north - center.north};
        moved.push_back({center.east + rel.x + sample.translation.x,
                         center.north + rel.y + sample.translation.y});
    }
    return g.with_vertices(std::move(moved));
}

FeatureEnsemble generate_ensemble(const geo::TypedFeatureSet& source, const AffineErrorModel& model,
                                  std::size_t sample_count, std::uint64_t seed) {
    if (sample_count == 0) {
        throw DomainError("ensemble size must be at least 1");
    }
    geo::validate(source);
    // Resolve parameters up front so a missing entry fails even for empty sets.
    (void)model.params_for(source.type_tag);

    const std::uint64_t tag_key = hash_string(source.type_tag);
    FeatureEnsemble ensemble;
    ensemble.type_tag = source.type_tag;
    ensemble.samples.reserve(sample_count);
    for (std::size_t n = 0; n < sample_count; ++n) {
        geo::TypedFeatureSet sample;
        sample.type_tag = source.type_tag;
        sample.line_width = source.line_width;
        sample.features.reserve(source.features.size());
        for (std::size_t i = 0; i < source.features.size(); ++i) {
            CounterRng rng{seed, tag_key, i, n};
            const AffineSample affine = sample_affine(model, source.type_tag, rng);
            sample.features.push_back(apply_affine(source.features[i], affine));
        }
        ensemble.samples.push_back(std::move(sample));
    }
    return ensemble;
}

}  // namespace pml::uncertainty
