#include "pml/errors.hpp"
#include "pml/pcm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace pml::pcm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double nearest_distance(const geo::TypedFeatureSet& sample, geo::CartesianLocation p) {
    double best = kInf;
    for (const auto& f : sample.features) {
        best = std::min(best, geo::distance_to_geometry(p, f));
        if (best == 0.0) {
            break;
        }
    }
    return best;
}

bool any_covers(const geo::TypedFeatureSet& sample, geo::CartesianLocation p) {
    return std::any_of(sample.features.begin(), sample.features.end(),
                       [&](const geo::Geometry& g) { return geo::covers(p, g, sample.line_width); });
}

bool has_features(const uncertainty::FeatureEnsemble& ensemble) {
    return !ensemble.samples.empty() && !ensemble.samples.front().features.empty();
}

}  // namespace

std::vector<double> distance_samples(const uncertainty::FeatureEnsemble& ensemble, geo::CartesianLocation p) {
    std::vector<double> out;
    out.reserve(ensemble.samples.size());
    for (const auto& s : ensemble.samples) {
        out.push_back(nearest_distance(s, p));
    }
    return out;
}

DistanceRaster compute_distance_clauses(const uncertainty::FeatureEnsemble& ensemble, const GridSpec& grid) {
    validate(grid);
    if (ensemble.samples.empty()) {
        throw DomainError("ensemble for '" + ensemble.type_tag + "' has no samples");
    }
    DistanceRaster raster;
    if (!has_features(ensemble)) {
        raster.empty = true;
        raster.cells.assign(grid.cell_count(), {kInf, 0.0});
        return raster;
    }
    raster.cells.resize(grid.cell_count());
    std::vector<double> values(ensemble.samples.size());
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            const auto p = cell_center(grid, r, c);
            for (std::size_t n = 0; n < ensemble.samples.size(); ++n) {
                values[n] = nearest_distance(ensemble.samples[n], p);
            }
            raster.cells[grid.index(r, c)] = uncertainty::moment_match(values);
        }
    }
    return raster;
}

std::vector<double> compute_over_clauses(const uncertainty::FeatureEnsemble& ensemble, const GridSpec& grid) {
    validate(grid);
    if (ensemble.samples.empty()) {
        throw DomainError("ensemble for '" + ensemble.type_tag + "' has no samples");
    }
    std::vector<double> raster(grid.cell_count(), 0.0);
    if (!has_features(ensemble)) {
        return raster;
    }
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            const auto p = cell_center(grid, r, c);
            std::size_t hits = 0;
            for (const auto& s : ensemble.samples) {
                hits += any_covers(s, p) ? 1 : 0;
            }
            raster[grid.index(r, c)] = uncertainty::occupancy_estimate(hits, ensemble.samples.size());
        }
    }
    return raster;
}

double gaussian_exceedance(const uncertainty::GaussianParams& params, double threshold) {
    if (!(params.variance >= 0.0)) {
        throw DomainError("variance must be non-negative");
    }
    if (params.variance == 0.0 || std::isinf(params.mean)) {
        return params.mean > threshold ? 1.0 : 0.0;
    }
    const double z = (threshold - params.mean) / std::sqrt(2.0 * params.variance);
    return 0.5 * std::erfc(z);
}

DistributionalClauseDB build_clause_db(const ClauseDbRequest& request) {
    validate(request.grid);
    if (request.ensemble_size == 0) {
        throw DomainError("ensemble size must be at least 1");
    }
    DistributionalClauseDB db;
    db.grid = request.grid;
    db.ensemble_size = request.ensemble_size;

    std::set<std::string> seen;
    auto add = [&](const geo::TypedFeatureSet& set) {
        const auto ensemble =
            uncertainty::generate_ensemble(set, request.error_model, request.ensemble_size, request.seed);
        db.distance[set.type_tag] = compute_distance_clauses(ensemble, request.grid);
        db.over[set.type_tag] = compute_over_clauses(ensemble, request.grid);
    };
    for (const auto& set : request.feature_sets) {
        if (!seen.insert(set.type_tag).second) {
            throw ConfigurationError("feature type '" + set.type_tag + "' appears in more than one set");
        }
        add(set);
    }
    for (const auto& tag : request.declared_types) {
        if (seen.insert(tag).second) {
            add(geo::TypedFeatureSet{tag, {}, geo::kDefaultLineWidth});
        }
    }
    return db;
}

hplp::Term row_atom(std::size_t r) {
    return hplp::Term::atom("r" + std::to_string(r));
}

hplp::Term col_atom(std::size_t c) {
    return hplp::Term::atom("c" + std::to_string(c));
}

std::vector<hplp::Statement> emit_clauses(const DistributionalClauseDB& db, std::size_t r, std::size_t c) {
    if (r >= db.grid.rows || c >= db.grid.cols) {
        throw DomainError("cell index outside the clause database grid");
    }
    const std::size_t i = db.grid.index(r, c);
    const hplp::Term row = row_atom(r);
    const hplp::Term col = col_atom(c);
    std::vector<hplp::Statement> out;
    out.reserve(db.distance.size() + db.over.size());
    for (const auto& [tag, raster] : db.distance) {
        const auto& g = raster.cells[i];
        out.push_back(hplp::DistFact{hplp::Term::compound("distance", {row, col, hplp::Term::atom(tag)}),
                                     "normal",
                                     {g.mean, g.variance}});
    }
    for (const auto& [tag, raster] : db.over) {
        out.push_back(hplp::ProbFact{raster[i], hplp::Term::compound("over", {row, col, hplp::Term::atom(tag)})});
    }
    return out;
}

std::string emit_clauses_text(const DistributionalClauseDB& db, std::size_t r, std::size_t c) {
    std::string text;
    for (const auto& s : emit_clauses(db, r, c)) {
        text += hplp::to_string(s);
        text += '\n';
    }
    return text;
}

}  // namespace pml::pcm
