#pragma once

#include "pml/hplp/inference.hpp"
#include "pml/hplp/program.hpp"
#include "pml/pcm.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pml::landscape {

struct LandscapeMetadata {
    std::string program_hash;
    std::string clause_db_hash;
    std::uint64_t seed = 0;
    std::size_t ensemble_size = 0;
    std::size_t inference_samples = 0;
    std::string timestamp;  // ISO 8601, UTC

    bool operator==(const LandscapeMetadata&) const = default;
};

// Row-major raster of per-cell mission probabilities.
struct MissionLandscape {
    pcm::GridSpec grid;
    std::vector<double> values;
    LandscapeMetadata metadata;

    double at(std::size_t r, std::size_t c) const { return values.at(grid.index(r, c)); }

    // Constant raster, mostly for tests and synthetic inputs.
    static MissionLandscape filled(const pcm::GridSpec& grid, double value);
};

void validate(const MissionLandscape& l);

// Half-open index ranges [r0, r1) x [c0, c1). May be empty for tiny grids.
struct TileRange {
    std::size_t r0 = 0;
    std::size_t r1 = 0;
    std::size_t c0 = 0;
    std::size_t c1 = 0;

    bool empty() const noexcept { return r0 >= r1 || c0 >= c1; }
    std::size_t cell_count() const noexcept { return empty() ? 0 : (r1 - r0) * (c1 - c0); }
    bool operator==(const TileRange&) const = default;
};

struct TilingPlan {
    unsigned s = 0;
    std::vector<TileRange> tiles;
};

// 4^s tiles by recursive halving; odd extents split floor/ceil.
TilingPlan split(std::size_t rows, std::size_t cols, unsigned s);
TilingPlan split(const pcm::GridSpec& grid, unsigned s);

// A cell failed during compute_pml; the original exception is kept in `cause`.
class CellError : public std::runtime_error {
public:
    CellError(std::size_t row, std::size_t col, const std::string& message, std::exception_ptr cause)
        : std::runtime_error("cell (" + std::to_string(row) + ", " + std::to_string(col) + "): " + message),
          row_(row), col_(col), cause_(std::move(cause)) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }
    const std::exception_ptr& cause() const noexcept { return cause_; }

private:
    std::size_t row_;
    std::size_t col_;
    std::exception_ptr cause_;
};

class CancelledError : public std::runtime_error {
public:
    CancelledError() : std::runtime_error("landscape computation cancelled") {}
};

struct ComputeOptions {
    // 0 selects std::thread::hardware_concurrency().
    std::size_t worker_count = 0;
    const std::atomic<bool>* cancel = nullptr;
    // Called after each finished tile with (cells done, cells total); may run on any worker.
    std::function<void(std::size_t, std::size_t)> progress;
};

std::size_t resolve_worker_count(std::size_t requested);

// The query whose two arguments are the grid variables, e.g. landscape(R, C).
hplp::Term landscape_query(const hplp::MissionProgram& program);

// Probability of the landscape query at one cell, computed in isolation.
double infer_cell(const hplp::MissionProgram& program, const pcm::DistributionalClauseDB& db,
                  const hplp::InferenceParams& params, std::size_t r, std::size_t c);

MissionLandscape compute_pml(const hplp::MissionProgram& program, const pcm::DistributionalClauseDB& db,
                             const hplp::InferenceParams& params, const TilingPlan& plan,
                             const ComputeOptions& options = {});

MissionLandscape interpolate_bilinear(const MissionLandscape& src, const pcm::GridSpec& target);
double mse(const MissionLandscape& a, const MissionLandscape& b);

struct ValidityMask {
    pcm::GridSpec grid;
    std::vector<bool> mask;
    double threshold = 0.0;

    std::size_t count() const;
};

ValidityMask threshold_mask(const MissionLandscape& l, double threshold);

struct TimingRow {
    unsigned s = 0;
    std::size_t tiles = 0;
    double seconds = 0.0;
};

struct TimingReport {
    std::vector<TimingRow> rows;
    std::size_t worker_count = 0;
    std::string to_csv() const;
};

// Runs compute_pml once per tiling factor; throws std::logic_error when two
// tilings disagree on any cell.
TimingReport benchmark_tiling(const hplp::MissionProgram& program, const pcm::DistributionalClauseDB& db,
                              const hplp::InferenceParams& params, const std::vector<unsigned>& s_values,
                              std::size_t worker_count);

// File formats.
nlohmann::json to_json(const MissionLandscape& l);
MissionLandscape landscape_from_json(const nlohmann::json& j);
std::string to_csv(const MissionLandscape& l);

// Display rule: red for low, dark cyan for high, cells below `cutoff` transparent.
struct Rgba {
    std::uint8_t r, g, b, a;
    bool operator==(const Rgba&) const = default;
};
Rgba colormap(double value, double cutoff = 0.1);
void write_png(const MissionLandscape& l, const std::filesystem::path& path, std::size_t pixels_per_cell = 1);

std::string current_timestamp();

}  // namespace pml::landscape
