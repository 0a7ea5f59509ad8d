#include "pml/errors.hpp"
#include "pml/hash.hpp"
#include "pml/landscape.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

namespace pml::landscape {

namespace {

struct GridQuery {
    hplp::Term query;
    std::string row_var;
    std::string col_var;
};

GridQuery grid_query(const hplp::MissionProgram& program) {
    const hplp::Term q = landscape_query(program);
    return {q, q.args[0].name, q.args[1].name};
}

double infer_one(const hplp::MissionProgram& program, const GridQuery& gq, const pcm::DistributionalClauseDB& db,
                 const hplp::InferenceParams& params, std::size_t r, std::size_t c) {
    const hplp::Term row = pcm::row_atom(r);
    const hplp::Term col = pcm::col_atom(c);
    const auto facts = pcm::emit_clauses(db, r, c);
    const hplp::Bindings bindings{{gq.row_var, row}, {gq.col_var, col}};
    const auto specialized = hplp::specialize(program, facts, bindings);
    const auto ground = hplp::ground(specialized);
    const hplp::Term query = hplp::Term::compound(gq.query.name, {row, col});
    return hplp::infer(ground, query, params, {r, c});
}

void check_plan(const TilingPlan& plan, const pcm::GridSpec& grid) {
    std::size_t covered = 0;
    for (const auto& t : plan.tiles) {
        if (t.empty()) {
            continue;
        }
        if (t.r1 > grid.rows || t.c1 > grid.cols) {
            throw DomainError("tiling plan exceeds the grid");
        }
        covered += t.cell_count();
    }
    if (covered != grid.cell_count()) {
        throw DomainError("tiling plan does not cover the grid exactly");
    }
}

}  // namespace

MissionLandscape MissionLandscape::filled(const pcm::GridSpec& grid, double value) {
    pcm::validate(grid);
    MissionLandscape l;
    l.grid = grid;
    l.values.assign(grid.cell_count(), value);
    return l;
}

void validate(const MissionLandscape& l) {
    pcm::validate(l.grid);
    if (l.values.size() != l.grid.cell_count()) {
        throw DomainError("landscape has " + std::to_string(l.values.size()) + " values for a " +
                          std::to_string(l.grid.rows) + "x" + std::to_string(l.grid.cols) + " grid");
    }
    for (const double v : l.values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("landscape value outside [0, 1]");
        }
    }
}

std::size_t resolve_worker_count(std::size_t requested) {
    if (requested > 0) {
        return requested;
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

hplp::Term landscape_query(const hplp::MissionProgram& program) {
    for (const auto& q : program.queries()) {
        if (q.kind == hplp::Term::Kind::compound && q.args.size() == 2 &&
            q.args[0].kind == hplp::Term::Kind::variable && q.args[1].kind == hplp::Term::Kind::variable &&
            q.args[0].name != q.args[1].name && q.args[0].name != "_" && q.args[1].name != "_") {
            return q;
        }
    }
    throw ConfigurationError("program has no grid query of the form query(name(R, C))");
}

double infer_cell(const hplp::MissionProgram& program, const pcm::DistributionalClauseDB& db,
                  const hplp::InferenceParams& params, std::size_t r, std::size_t c) {
    return infer_one(program, grid_query(program), db, params, r, c);
}

MissionLandscape compute_pml(const hplp::MissionProgram& program, const pcm::DistributionalClauseDB& db,
                             const hplp::InferenceParams& params, const TilingPlan& plan,
                             const ComputeOptions& options) {
    pcm::validate(db);
    check_plan(plan, db.grid);
    const GridQuery gq = grid_query(program);

    MissionLandscape out;
    out.grid = db.grid;
    out.values.assign(db.grid.cell_count(), 0.0);
    out.metadata.program_hash = content_hash(hplp::to_string(program));
    out.metadata.clause_db_hash = content_hash(pcm::to_json(db).dump());
    out.metadata.seed = params.seed;
    out.metadata.ensemble_size = db.ensemble_size;
    out.metadata.inference_samples = params.mode == hplp::InferenceMode::sampling ? params.sample_count : 0;
    out.metadata.timestamp = current_timestamp();

    std::vector<const TileRange*> tiles;
    for (const auto& t : plan.tiles) {
        if (!t.empty()) {
            tiles.push_back(&t);
        }
    }

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::atomic<bool> stop{false};
    std::mutex error_mutex;
    std::exception_ptr error;
    const std::size_t total = db.grid.cell_count();

    auto fail = [&](std::exception_ptr e) {
        std::lock_guard lock(error_mutex);
        if (!error) {
            error = std::move(e);
        }
        stop = true;
    };

    auto worker = [&] {
        while (!stop) {
            const std::size_t k = next.fetch_add(1);
            if (k >= tiles.size()) {
                return;
            }
            const TileRange& t = *tiles[k];
            for (std::size_t r = t.r0; r < t.r1 && !stop; ++r) {
                if (options.cancel && options.cancel->load()) {
                    fail(std::make_exception_ptr(CancelledError{}));
                    return;
                }
                for (std::size_t c = t.c0; c < t.c1; ++c) {
                    try {
                        out.values[db.grid.index(r, c)] = infer_one(program, gq, db, params, r, c);
                    } catch (const std::exception& e) {
                        fail(std::make_exception_ptr(CellError(r, c, e.what(), std::current_exception())));
                        return;
                    }
                }
            }
            const std::size_t now = done.fetch_add(t.cell_count()) + t.cell_count();
            if (options.progress) {
                options.progress(now, total);
            }
        }
    };

    const std::size_t n_workers = std::min(resolve_worker_count(options.worker_count), tiles.size());
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (std::size_t i = 0; i < n_workers; ++i) {
            pool.emplace_back(worker);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

}  // namespace pml::landscape
