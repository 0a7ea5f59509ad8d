#include "pml/uncertainty.hpp"

#include "pml/errors.hpp"

#include <cmath>

namespace pml::uncertainty {

namespace {

ErrorParams params_from_json(const nlohmann::json& j, const std::string& tag) {
    ErrorParams p;
    try {
        if (j.contains("translation_mean")) {
            const auto& m = j.at("translation_mean");
            p.translation_mean = {m.at(0).get<double>(), m.at(1).get<double>()};
        }
        if (j.contains("translation_cov")) {
            const auto& c = j.at("translation_cov");
            p.translation_cov = {c.at(0).at(0).get<double>(), c.at(0).at(1).get<double>(),
                                 c.at(1).at(0).get<double>(), c.at(1).at(1).get<double>()};
        }
        p.rotation_sigma = j.value("rotation_sigma", 0.0);
        p.scale_sigma = j.value("scale_sigma", 0.0);
        p.shear_sigma = j.value("shear_sigma", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError("error model entry '" + tag + "': " + e.what());
    }
    try {
        validate(p);
    } catch (const ConfigurationError& e) {
        throw ConfigurationError("error model entry '" + tag + "': " + e.what());
    }
    return p;
}

nlohmann::json params_to_json(const ErrorParams& p) {
    return {
        {"translation_mean", {p.translation_mean.x, p.translation_mean.y}},
        {"translation_cov", {{p.translation_cov.a11, p.translation_cov.a12},
                             {p.translation_cov.a21, p.translation_cov.a22}}},
        {"rotation_sigma", p.rotation_sigma},
        {"scale_sigma", p.scale_sigma},
        {"shear_sigma", p.shear_sigma},
    };
}

}  // namespace

void validate(const ErrorParams& p) {
    const auto& c = p.translation_cov;
    const bool finite = std::isfinite(c.a11) && std::isfinite(c.a12) && std::isfinite(c.a21) &&
                        std::isfinite(c.a22) && std::isfinite(p.translation_mean.x) &&
                        std::isfinite(p.translation_mean.y);
    if (!finite) {
        throw ConfigurationError("error parameters must be finite");
    }
    if (c.a12 != c.a21) {
        throw ConfigurationError("translation covariance must be symmetric");
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(c.a11 * c.a22));
    if (c.a11 < 0.0 || c.a22 < 0.0 || c.a11 * c.a22 - c.a12 * c.a21 < -tol) {
        throw ConfigurationError("translation covariance must be positive semi-definite");
    }
    if (!(p.rotation_sigma >= 0.0) || !(p.scale_sigma >= 0.0) || !(p.shear_sigma >= 0.0)) {
        throw ConfigurationError("error standard deviations must be non-negative");
    }
}

AffineErrorModel AffineErrorModel::exact() {
    AffineErrorModel model;
    model.set_default(ErrorParams{});
    return model;
}

AffineErrorModel AffineErrorModel::gaussian_translation(double variance) {
    AffineErrorModel model;
    ErrorParams p;
    p.translation_cov = Mat2::diagonal(variance, variance);
    model.set_default(p);
    return model;
}

AffineErrorModel AffineErrorModel::from_json(const nlohmann::json& document) {
    if (!document.is_object()) {
        throw ConfigurationError("error model must be a JSON object keyed by type tag");
    }
    AffineErrorModel model;
    for (const auto& [tag, entry] : document.items()) {
        if (tag == "default") {
            model.set_default(params_from_json(entry, tag));
        } else {
            model.set(tag, params_from_json(entry, tag));
        }
    }
    return model;
}

nlohmann::json AffineErrorModel::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    if (default_) {
        j["default"] = params_to_json(*default_);
    }
    for (const auto& [tag, p] : entries_) {
        j[tag] = params_to_json(p);
    }
    return j;
}

void AffineErrorModel::set(const std::string& type_tag, ErrorParams params) {
    validate(params);
    entries_[type_tag] = params;
}

void AffineErrorModel::set_default(ErrorParams params) {
    validate(params);
    default_ = params;
}

const ErrorParams& AffineErrorModel::params_for(const std::string& type_tag) const {
    if (const auto it = entries_.find(type_tag); it != entries_.end()) {
        return it->second;
    }
    if (default_) {
        return *default_;
    }
    throw ConfigurationError("no error parameters for type '" + type_tag + "' and no default entry");
}

}  // namespace pml::uncertainty
