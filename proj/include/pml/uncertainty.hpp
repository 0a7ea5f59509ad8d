#pragma once

#include "pml/geo.hpp"
#include "pml/random.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pml::uncertainty {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Vec2&) const = default;
};

// Row-major 2x2 matrix.
struct Mat2 {
    double a11 = 1.0, a12 = 0.0;
    double a21 = 0.0, a22 = 1.0;

    static Mat2 identity() { return {}; }
    static Mat2 diagonal(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Vec2 operator*(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
    bool operator==(const Mat2&) const = default;
};

// Error parameters of one feature type.
struct ErrorParams {
    Vec2 translation_mean;                   // [m]
    Mat2 translation_cov = Mat2::diagonal(0.0, 0.0);  // [m^2]
    double rotation_sigma = 0.0;             // [rad]
    double scale_sigma = 0.0;
    double shear_sigma = 0.0;

    bool operator==(const ErrorParams&) const = default;
};

void validate(const ErrorParams& params);

/**
 * Per type tag generator parameters for random affine map errors.
 *
 * JSON form: {"default": {...}, "<type>": {"translation_mean": [x, y],
 * "translation_cov": [[a, b], [b, d]], "rotation_sigma": s,
 * "scale_sigma": s, "shear_sigma": s}}. Omitted fields are zero.
 */
class AffineErrorModel {
public:
    AffineErrorModel() = default;

    // Zero-error model: every sample reproduces the source map.
    static AffineErrorModel exact();
    // Isotropic Gaussian translation for every type.
    static AffineErrorModel gaussian_translation(double variance);

    static AffineErrorModel from_json(const nlohmann::json& document);
    nlohmann::json to_json() const;

    void set(const std::string& type_tag, ErrorParams params);
    void set_default(ErrorParams params);

    // Throws ConfigurationError when the tag is unknown and no default is set.
    const ErrorParams& params_for(const std::string& type_tag) const;

private:
    std::map<std::string, ErrorParams> entries_;
    std::optional<ErrorParams> default_;
};

struct AffineSample {
    Mat2 transform;
    Vec2 translation;
};

// Transform = Rotation(theta) * Scale(s) * Shear(h); translation ~ N(mean, cov).
AffineSample sample_affine(const AffineErrorModel& model, const std::string& type_tag, CounterRng& rng);

struct FeatureEnsemble {
    std::string type_tag;
    std::vector<geo::TypedFeatureSet> samples;

    std::size_t sample_count() const noexcept { return samples.size(); }
};

geo::Geometry apply_affine(const geo::Geometry& g, const AffineSample& sample);

FeatureEnsemble generate_ensemble(const geo::TypedFeatureSet& source, const AffineErrorModel& model,
                                  std::size_t sample_count, std::uint64_t seed);

struct GaussianParams {
    double mean = 0.0;
    double variance = 0.0;
    bool operator==(const GaussianParams&) const = default;
};

// Sample mean and Bessel-corrected variance (0 for a single value).
GaussianParams moment_match(std::span<const double> values);

double occupancy_estimate(std::size_t hits, std::size_t sample_count);

}  // namespace pml::uncertainty
