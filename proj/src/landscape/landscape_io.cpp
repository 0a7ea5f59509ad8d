#include "pml/errors.hpp"
#include "pml/landscape.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <memory>

namespace pml::landscape {

namespace {

void append_number(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

}  // namespace

std::string current_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json to_json(const MissionLandscape& l) {
    const auto& m = l.metadata;
    return {
        {"grid", pcm::to_json(l.grid)},
        {"values", l.values},
        {"metadata",
         {
             {"program_hash", m.program_hash},
             {"clause_db_hash", m.clause_db_hash},
             {"seed", m.seed},
             {"ensemble_size", m.ensemble_size},
             {"inference_samples", m.inference_samples},
             {"timestamp", m.timestamp},
         }},
    };
}

MissionLandscape landscape_from_json(const nlohmann::json& j) {
    MissionLandscape l;
    try {
        l.grid = pcm::grid_from_json(j.at("grid"));
        l.values = j.at("values").get<std::vector<double>>();
        if (j.contains("metadata")) {
            const auto& m = j.at("metadata");
            l.metadata.program_hash = m.value("program_hash", "");
            l.metadata.clause_db_hash = m.value("clause_db_hash", "");
            l.metadata.seed = m.value("seed", std::uint64_t{0});
            l.metadata.ensemble_size = m.value("ensemble_size", std::size_t{0});
            l.metadata.inference_samples = m.value("inference_samples", std::size_t{0});
            l.metadata.timestamp = m.value("timestamp", "");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("invalid landscape document: ") + e.what());
    }
    validate(l);
    return l;
}

std::string to_csv(const MissionLandscape& l) {
    validate(l);
    std::string out = "r,c,lat,lon,probability\n";
    for (std::size_t r = 0; r < l.grid.rows; ++r) {
        for (std::size_t c = 0; c < l.grid.cols; ++c) {
            const auto p = geo::unproject(pcm::cell_center(l.grid, r, c), l.grid.origin);
            out += std::to_string(r);
            out += ',';
            out += std::to_string(c);
            out += ',';
            append_number(out, p.latitude);
            out += ',';
            append_number(out, p.longitude);
            out += ',';
            append_number(out, l.at(r, c));
            out += '\n';
        }
    }
    return out;
}

Rgba colormap(double value, double cutoff) {
    if (value < cutoff) {
        return {0, 0, 0, 0};
    }
    const double t = std::clamp(value, 0.0, 1.0);
    // Linear ramp from red (255, 0, 0) to dark cyan (0, 139, 139).
    const auto ch = [t](double lo, double hi) { return static_cast<std::uint8_t>(std::lround(lo + t * (hi - lo))); };
    return {ch(255, 0), ch(0, 139), ch(0, 139), 200};
}

void write_png(const MissionLandscape& l, const std::filesystem::path& path, std::size_t pixels_per_cell) {
    validate(l);
    if (pixels_per_cell == 0) {
        throw DomainError("pixels per cell must be at least 1");
    }
    const std::size_t width = l.grid.cols * pixels_per_cell;
    const std::size_t height = l.grid.rows * pixels_per_cell;

    std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!file) {
        throw ConfigurationError("cannot open '" + path.string() + "' for writing");
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, nullptr);
        throw ConfigurationError("cannot initialize PNG writer");
    }
    std::vector<png_byte> row(width * 4);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw ConfigurationError("failed to write '" + path.string() + "'");
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t y = 0; y < height; ++y) {
        const std::size_t r = y / pixels_per_cell;
        for (std::size_t x = 0; x < width; ++x) {
            const Rgba px = colormap(l.at(r, x / pixels_per_cell));
            row[4 * x] = px.r;
            row[4 * x + 1] = px.g;
            row[4 * x + 2] = px.b;
            row[4 * x + 3] = px.a;
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace pml::landscape
