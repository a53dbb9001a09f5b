#pragma once
// Deployment profiler: sweeps tile size x batch size x model class, records
// img/s and pixels/s with their dispersion, scores each cell by transfer
// cost reduction per second, and picks the configuration to fly. A frozen
// synthetic cost model stands in for real hardware when determinism matters
// more than absolute numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oec/orbit.hpp"
#include "oec/stream.hpp"
#include "oec/tiler.hpp"
#include "oec/toy_codec.hpp"
#include "oec/util.hpp"

namespace oec {

// Bits per pixel of the uncompressed capture: bands x radiometric bits.
inline double raw_bpp(int bands, int radiometric_bits) {
    if (bands < 1 || radiometric_bits < 1)
        throw std::invalid_argument("raw_bpp: bands and bits must be >= 1");
    return static_cast<double>(bands) * static_cast<double>(radiometric_bits);
}

inline double raw_bpp(const SensorSpec& sensor) {
    sensor.validate();
    return raw_bpp(sensor.bands, sensor.radiometric_bits);
}

// Transfer cost reduction per second: how many fewer bits per second must be
// downlinked, given a codec that turns bpp_raw into bpp_codec at pps pixels/s.
inline double tcr_per_second(double pps, double bpp_raw, double bpp_codec) {
    if (!(pps >= 0) || !std::isfinite(pps))
        throw std::invalid_argument("tcr_per_second: pps must be finite and >= 0");
    if (!(bpp_codec >= 0) || !(bpp_codec < bpp_raw))
        throw std::invalid_argument("tcr_per_second: need 0 <= bpp_codec < bpp_raw");
    return pps * (bpp_raw - bpp_codec);
}

// Per-codec rate card: average coded bits per pixel by downstream task.
struct CodecProfile {
    std::string name;
    std::map<std::string, double> bpp_by_task;
    std::size_t encoder_params = 0;
    std::string source = "fixture"; // "fixture" (published) or "measured"

    double mean_bpp() const {
        if (bpp_by_task.empty())
            throw std::invalid_argument("CodecProfile: no per-task bpp entries");
        double s = 0;
        for (const auto& [task, v] : bpp_by_task) s += v;
        return s / static_cast<double>(bpp_by_task.size());
    }

    void validate(double bpp_raw) const {
        if (name.empty()) throw std::invalid_argument("CodecProfile: name is empty");
        if (bpp_by_task.empty())
            throw std::invalid_argument("CodecProfile: no per-task bpp entries");
        for (const auto& [task, v] : bpp_by_task)
            if (!(v > 0) || !(v < bpp_raw))
                throw std::invalid_argument("CodecProfile: bpp for '" + task +
                                            "' must sit in (0, bpp_raw)");
        if (source != "fixture" && source != "measured")
            throw std::invalid_argument("CodecProfile: source must be fixture or measured");
    }
};

struct ProfileCell {
    int tile_size = 0;
    int batch_size = 0;
    SizeClass size_class = SizeClass::S;
};

struct ProfileMeasurement {
    int tile_size = 0;
    int batch_size = 0;
    SizeClass size_class = SizeClass::S;
    double img_per_s = 0.0;
    double pixels_per_s = 0.0;
    double tcr_per_s = 0.0; // filled in by select_best once a codec is chosen
    int repeats = 0;
    double dispersion = 0.0; // coefficient of variation of per-repeat seconds
    bool ok = true;
    std::string error;
};

struct ProfileResult {
    std::vector<ProfileMeasurement> grid;
    std::size_t chosen = 0;
    std::string tie_break; // "none", "size_class", "batch_size" or "tile_size"
};

// tile {256,384,512,600,768} x batch {1,2,4,6,8} x class {S,M,L}; the optima
// reported for the reference hardware (600 px tiles, batches 4-8) sit inside.
inline std::vector<ProfileCell> default_grid() {
    std::vector<ProfileCell> g;
    for (SizeClass c : {SizeClass::S, SizeClass::M, SizeClass::L})
        for (int t : {256, 384, 512, 600, 768})
            for (int b : {1, 2, 4, 6, 8}) g.push_back({t, b, c});
    return g;
}

// Seconds one invocation (a batch of tile_size tiles) takes.
using CellRunner = std::function<double(const ProfileCell&)>;

// Frozen stand-in for real hardware: a fixed dispatch overhead, a per-tile
// overhead, and a compute term superlinear in tile area so that img/s and
// pixels/s peak at different tile sizes, as they do on real accelerators.
inline double synthetic_cell_seconds(const ProfileCell& cell) {
    const double w = cell.size_class == SizeClass::S   ? 1.0
                     : cell.size_class == SizeClass::M ? 1.8
                                                       : 3.0;
    const double t = static_cast<double>(cell.tile_size);
    const double area_term = 2.0e-9 * w * t * t * (1.0 + std::pow(t / 560.0, 4.0));
    return 0.008 + static_cast<double>(cell.batch_size) * (0.0015 + area_term);
}

inline CellRunner synthetic_cost_runner() {
    return [](const ProfileCell& cell) { return synthetic_cell_seconds(cell); };
}

// Measures the real toy codec on this machine: transform per batch, plus the
// entropy stage when full is set. Weights and noise batches are cached so
// only the work under test is timed.
inline CellRunner make_transform_runner(std::uint64_t seed, bool full = false) {
    struct State {
        std::map<SizeClass, EncoderWeights> weights;
        std::map<std::pair<int, int>, TileBatch> batches;
    };
    auto st = std::make_shared<State>();
    return [st, seed, full](const ProfileCell& cell) {
        auto wit = st->weights.find(cell.size_class);
        if (wit == st->weights.end())
            wit = st->weights.emplace(cell.size_class, init_weights(make_spec(cell.size_class, seed)))
                      .first;
        const EncoderWeights& w = wit->second;

        auto key = std::make_pair(cell.tile_size, cell.batch_size);
        auto bit = st->batches.find(key);
        if (bit == st->batches.end()) {
            TileBatch b;
            b.tile_size = cell.tile_size;
            pcg32 rng(seed ^ (static_cast<std::uint64_t>(cell.tile_size) << 20) ^
                      static_cast<std::uint64_t>(cell.batch_size));
            for (int k = 0; k < cell.batch_size; ++k) {
                ImageBuffer t(cell.tile_size, cell.tile_size, 3, 8);
                for (auto& v : t.data) v = static_cast<std::uint16_t>(rng.bounded(256));
                b.tiles.push_back(std::move(t));
                b.origin.push_back({0, 0, k});
                b.pad.push_back({0, 0});
            }
            bit = st->batches.emplace(key, std::move(b)).first;
        }

        const auto t0 = std::chrono::steady_clock::now();
        auto arts = encode_batch(bit->second, w);
        if (full)
            for (const auto& a : arts) (void)encode_artifacts(a, w);
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
}

// Runs every cell `repeats` times, discards the leading warmups, and reports
// mean rates with their coefficient of variation. A cell whose runner throws
// is recorded as failed and the sweep moves on.
inline std::vector<ProfileMeasurement> sweep(const std::vector<ProfileCell>& grid,
                                             const CellRunner& runner, int repeats = 10,
                                             int warmup = 2) {
    if (grid.empty()) throw std::invalid_argument("sweep: grid is empty");
    if (repeats < 1) throw std::invalid_argument("sweep: repeats must be >= 1");
    if (warmup < 0 || warmup >= repeats) warmup = repeats > 2 ? 2 : 0;

    std::vector<ProfileMeasurement> out;
    out.reserve(grid.size());
    for (const auto& cell : grid) {
        ProfileMeasurement m;
        m.tile_size = cell.tile_size;
        m.batch_size = cell.batch_size;
        m.size_class = cell.size_class;
        m.repeats = repeats;
        try {
            std::vector<double> secs;
            for (int k = 0; k < repeats; ++k) {
                double s = runner(cell);
                if (!(s > 0) || !std::isfinite(s))
                    throw std::runtime_error("runner returned a non-positive duration");
                if (k >= warmup) secs.push_back(s);
            }
            double mean = 0;
            for (double s : secs) mean += s;
            mean /= static_cast<double>(secs.size());
            double var = 0;
            for (double s : secs) var += (s - mean) * (s - mean);
            var /= static_cast<double>(secs.size());
            m.img_per_s = static_cast<double>(cell.batch_size) / mean;
            m.pixels_per_s = m.img_per_s * static_cast<double>(cell.tile_size) *
                             static_cast<double>(cell.tile_size);
            m.dispersion = std::sqrt(var) / mean;
        } catch (const std::exception& e) {
            m.ok = false;
            m.error = e.what();
        }
        out.push_back(std::move(m));
    }
    return out;
}

namespace prdetail {

inline int class_rank(SizeClass c) { return static_cast<int>(c); }

inline bool tcr_tied(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

// Smaller class, then smaller batch, then smaller tile.
inline bool prefer_on_tie(const ProfileMeasurement& a, const ProfileMeasurement& b) {
    if (class_rank(a.size_class) != class_rank(b.size_class))
        return class_rank(a.size_class) < class_rank(b.size_class);
    if (a.batch_size != b.batch_size) return a.batch_size < b.batch_size;
    return a.tile_size < b.tile_size;
}

} // namespace prdetail

// Scores every healthy measurement with its class's codec rate and returns
// the argmax of pps * (bpp_raw - bpp_codec); exact ties fall toward the
// smaller model class, then the smaller batch, then the smaller tile.
inline ProfileResult select_best(std::vector<ProfileMeasurement> measurements,
                                 const std::map<SizeClass, CodecProfile>& profiles,
                                 double bpp_raw) {
    if (measurements.empty()) throw std::invalid_argument("select_best: no measurements");
    if (profiles.empty()) throw std::invalid_argument("select_best: no codec profiles");
    for (const auto& [cls, p] : profiles) p.validate(bpp_raw);

    ProfileResult res;
    bool have = false;
    std::size_t best = 0;
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        auto& m = measurements[i];
        if (!m.ok) continue;
        auto it = profiles.find(m.size_class);
        if (it == profiles.end())
            throw std::invalid_argument("select_best: no codec profile for class " +
                                        std::string(to_string(m.size_class)));
        m.tcr_per_s = tcr_per_second(m.pixels_per_s, bpp_raw, it->second.mean_bpp());
        if (!have) {
            best = i;
            have = true;
            continue;
        }
        const auto& b = measurements[best];
        if (prdetail::tcr_tied(m.tcr_per_s, b.tcr_per_s)) {
            if (prdetail::prefer_on_tie(m, b)) best = i;
        } else if (m.tcr_per_s > b.tcr_per_s) {
            best = i;
        }
    }
    if (!have) throw std::invalid_argument("select_best: every measurement failed");

    res.tie_break = "none";
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        if (i == best || !measurements[i].ok) continue;
        if (!prdetail::tcr_tied(measurements[i].tcr_per_s, measurements[best].tcr_per_s)) continue;
        const auto& m = measurements[i];
        const auto& b = measurements[best];
        if (m.size_class != b.size_class)
            res.tie_break = "size_class";
        else if (m.batch_size != b.batch_size) {
            if (res.tie_break == "none") res.tie_break = "batch_size";
        } else if (m.tile_size != b.tile_size) {
            if (res.tie_break == "none") res.tie_break = "tile_size";
        }
    }
    res.grid = std::move(measurements);
    res.chosen = best;
    return res;
}

} // namespace oec
