#pragma once

#include "pml/geo.hpp"
#include "pml/hplp/program.hpp"
#include "pml/uncertainty.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pml::pcm {

/**
 * Raster discretization of the navigation space: an extent of
 * width x height meters centered on `origin`, split into rows x cols cells.
 * Row 0 is the northernmost row.
 */
struct GridSpec {
    geo::PolarLocation origin;
    double width = 0.0;   // east-west extent [m]
    double height = 0.0;  // north-south extent [m]
    std::size_t rows = 1;
    std::size_t cols = 1;

    std::size_t cell_count() const noexcept { return rows * cols; }
    std::size_t index(std::size_t r, std::size_t c) const noexcept { return r * cols + c; }

    // Same extent and origin, different resolution.
    GridSpec with_resolution(std::size_t new_rows, std::size_t new_cols) const;
    bool same_extent(const GridSpec& other) const noexcept;

    bool operator==(const GridSpec&) const = default;
};

void validate(const GridSpec& grid);

geo::CartesianLocation cell_center(const GridSpec& grid, std::size_t r, std::size_t c);

nlohmann::json to_json(const GridSpec& grid);
GridSpec grid_from_json(const nlohmann::json& j);

// Per-cell distance distribution of one feature type. A type without any
// features has `empty` set and every cell holds (+inf, 0).
struct DistanceRaster {
    std::vector<uncertainty::GaussianParams> cells;
    bool empty = false;
};

struct DistributionalClauseDB {
    GridSpec grid;
    std::size_t ensemble_size = 0;
    std::map<std::string, DistanceRaster> distance;
    std::map<std::string, std::vector<double>> over;
};

DistanceRaster compute_distance_clauses(const uncertainty::FeatureEnsemble& ensemble, const GridSpec& grid);
std::vector<double> compute_over_clauses(const uncertainty::FeatureEnsemble& ensemble, const GridSpec& grid);

// Raw per-sample nearest distances at one location (diagnostics for the
// Gaussian modeling assumption).
std::vector<double> distance_samples(const uncertainty::FeatureEnsemble& ensemble, geo::CartesianLocation p);

// P(D > threshold) for D ~ N(mean, variance); a Dirac when variance is 0.
double gaussian_exceedance(const uncertainty::GaussianParams& params, double threshold);

// Inputs for building a clause database from typed map features.
struct ClauseDbRequest {
    std::vector<geo::TypedFeatureSet> feature_sets;
    // Types that must appear in the database even without features.
    std::vector<std::string> declared_types;
    uncertainty::AffineErrorModel error_model;
    std::size_t ensemble_size = 100;
    std::uint64_t seed = 0;
    GridSpec grid;
};

DistributionalClauseDB build_clause_db(const ClauseDbRequest& request);

// Grid constants used in emitted clauses: r<row> and c<col>.
hplp::Term row_atom(std::size_t r);
hplp::Term col_atom(std::size_t c);

// `distance(rR, cC, tag) ~ normal(mean, variance).` and `p::over(rR, cC, tag).`
// for every type in the database.
std::vector<hplp::Statement> emit_clauses(const DistributionalClauseDB& db, std::size_t r, std::size_t c);
std::string emit_clauses_text(const DistributionalClauseDB& db, std::size_t r, std::size_t c);

void validate(const DistributionalClauseDB& db);
nlohmann::json to_json(const DistributionalClauseDB& db);
DistributionalClauseDB clause_db_from_json(const nlohmann::json& j);

}  // namespace pml::pcm
