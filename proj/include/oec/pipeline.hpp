#pragma once
// Three-stage encode pipeline: tiling -> transform -> entropy coding. Runs
// either strictly in order (the reference for bit-exactness) or overlapped,
// with one worker pool per stage joined by 2-slot hand-off channels so a
// fast producer can run at most one item ahead per slot. A synthetic-delay
// mode replaces the real work with configured sleeps so scheduling laws can
// be asserted deterministically on any machine.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "oec/stream.hpp"
#include "oec/tiler.hpp"
#include "oec/toy_codec.hpp"
#include "oec/util.hpp"

namespace oec {

struct pipeline_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PipelineMode { sequential, concurrent };

inline const char* to_string(PipelineMode m) {
    return m == PipelineMode::sequential ? "sequential" : "concurrent";
}

inline PipelineMode pipeline_mode_from(const std::string& s) {
    if (s == "seq" || s == "sequential") return PipelineMode::sequential;
    if (s == "conc" || s == "concurrent") return PipelineMode::concurrent;
    throw std::invalid_argument("unknown pipeline mode: " + s);
}

// Per-stage synthetic costs; when set, stages sleep for these durations
// instead of doing real work.
struct StageCosts {
    double tile_ms = 0.0;
    double transform_ms = 0.0;
    double entropy_ms = 0.0;
};

struct PipelineConfig {
    int tile_size = 600;
    int batch_size = 1;
    int group_len = 1;
    SizeClass size_class = SizeClass::S;
    std::uint64_t seed = 1;
    PipelineMode mode = PipelineMode::concurrent;
    int tiler_workers = 1;
    int transform_workers = 1;
    int entropy_workers = 1;
    double watchdog_s = 30.0; // per blocked hand-off, not per run
    std::optional<StageCosts> synthetic;

    void validate() const {
        if (tile_size < 1)
            throw std::invalid_argument("PipelineConfig: tile_size must be >= 1");
        if (batch_size < 1)
            throw std::invalid_argument("PipelineConfig: batch_size must be >= 1");
        if (group_len < 1)
            throw std::invalid_argument("PipelineConfig: group_len must be >= 1");
        if (tiler_workers < 1 || transform_workers < 1 || entropy_workers < 1)
            throw std::invalid_argument("PipelineConfig: worker counts must be >= 1");
        if (!(watchdog_s > 0))
            throw std::invalid_argument("PipelineConfig: watchdog_s must be > 0");
    }
};

inline const char* stage_name(int stage) {
    switch (stage) {
        case 0: return "tile";
        case 1: return "transform";
        case 2: return "entropy";
        default: return "?";
    }
}

// One stage visit by one item. enqueue_s stamps entry into the stage's input
// hand-off, dequeue_s the moment a worker took it, done_s the end of the
// stage's work; all relative to run start.
struct TraceRow {
    std::size_t item = 0;
    int stage = 0;
    double enqueue_s = 0.0;
    double dequeue_s = 0.0;
    double done_s = 0.0;
};

struct StageStats {
    double busy_s = 0.0;
    std::size_t items = 0;
};

struct EncodedTile {
    std::size_t item = 0;
    TileOrigin tile;
    std::vector<std::uint8_t> bytes;
};

struct PipelineReport {
    PipelineMode mode = PipelineMode::sequential;
    std::size_t items = 0;
    std::uint64_t pixels = 0;
    std::uint64_t bytes_emitted = 0;
    double wall_s = 0.0;
    double pps = 0.0;       // input pixels per wall-clock second
    double bpp_raw = 0.0;
    double bpp_codec = 0.0;
    double tcr_per_s = 0.0; // pps * (bpp_raw - bpp_codec)
    double degradation_vs_transform_only = 0.0; // filled by measure_interference
    std::array<StageStats, 3> stages{};
    std::vector<EncodedTile> outputs; // sorted by (item, row, col)
    std::vector<TraceRow> trace;      // sorted by (item, stage)
};

namespace pdetail {

struct source_item {
    std::size_t idx = 0;
    double enq = 0.0, deq = 0.0;
};
struct tiled_item {
    std::size_t idx = 0;
    TileBatch batch;
    std::uint64_t px = 0;
    double enq = 0.0, deq = 0.0;
};
struct coded_item {
    std::size_t idx = 0;
    std::vector<LatentArtifacts> arts;
    std::uint64_t px = 0;
    double enq = 0.0, deq = 0.0;
};
struct stream_item {
    std::size_t idx = 0;
    std::vector<EncodedTile> out;
    std::uint64_t px = 0;
    double enq = 0.0, deq = 0.0;
};

// Bounded blocking hand-off. T must expose .enq/.deq doubles, which are
// stamped under the lock at actual queue entry and exit so buffer occupancy
// can be reconstructed exactly from the trace.
template <typename T>
class handoff {
public:
    handoff(std::size_t cap, std::string name, std::function<double()> now, double watchdog_s)
        : cap_(cap), name_(std::move(name)), now_(std::move(now)), wd_(watchdog_s) {}

    // False when the channel was closed under us (shutdown), true on success.
    bool push(T v) {
        std::unique_lock lk(mu_);
        if (!cv_push_.wait_for(lk, secs(wd_), [&] { return closed_ || q_.size() < cap_; }))
            throw pipeline_error("watchdog: hand-off '" + name_ + "' stayed full");
        if (closed_) return false;
        v.enq = now_();
        q_.push_back(std::move(v));
        cv_pop_.notify_one();
        return true;
    }

    // nullopt when closed and drained.
    std::optional<T> pop() {
        std::unique_lock lk(mu_);
        if (!cv_pop_.wait_for(lk, secs(wd_), [&] { return closed_ || !q_.empty(); }))
            throw pipeline_error("watchdog: hand-off '" + name_ + "' starved");
        if (q_.empty()) return std::nullopt;
        T v = std::move(q_.front());
        q_.pop_front();
        v.deq = now_();
        cv_push_.notify_one();
        return v;
    }

    void close() {
        std::lock_guard lk(mu_);
        closed_ = true;
        cv_push_.notify_all();
        cv_pop_.notify_all();
    }

private:
    static std::chrono::duration<double> secs(double s) {
        return std::chrono::duration<double>(s);
    }

    std::mutex mu_;
    std::condition_variable cv_push_, cv_pop_;
    std::deque<T> q_;
    std::size_t cap_;
    std::string name_;
    std::function<double()> now_;
    double wd_;
    bool closed_ = false;
};

inline void sleep_ms(double ms) {
    if (ms > 0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
}

inline tiled_item stage_tile(const ImageBuffer& img, std::size_t idx, const PipelineConfig& cfg) {
    tiled_item t;
    t.idx = idx;
    if (cfg.synthetic) {
        sleep_ms(cfg.synthetic->tile_ms);
        t.px = static_cast<std::uint64_t>(cfg.tile_size) * static_cast<std::uint64_t>(cfg.tile_size);
        t.batch.tile_size = cfg.tile_size;
        return t;
    }
    TileBatch b = partition(img, cfg.tile_size, static_cast<int>(idx));
    // The interleaved group walk decides coding order; the cyclic tail wrap
    // must not code a tile twice.
    TileBatch g;
    g.tile_size = b.tile_size;
    g.group_len = cfg.group_len;
    std::vector<char> seen(b.tiles.size(), 0);
    for (const auto& grp : group_sequence(b, cfg.group_len))
        for (std::size_t k : grp) {
            if (seen[k]) continue;
            seen[k] = 1;
            g.tiles.push_back(std::move(b.tiles[k]));
            g.origin.push_back(b.origin[k]);
            g.pad.push_back(b.pad[k]);
        }
    t.batch = std::move(g);
    t.px = static_cast<std::uint64_t>(img.width) * static_cast<std::uint64_t>(img.height);
    return t;
}

inline coded_item stage_transform(tiled_item t, const EncoderWeights& w,
                                  const PipelineConfig& cfg) {
    coded_item c;
    c.idx = t.idx;
    c.px = t.px;
    if (cfg.synthetic) {
        sleep_ms(cfg.synthetic->transform_ms);
        return c;
    }
    c.arts = encode_batch(t.batch, w);
    return c;
}

inline stream_item stage_entropy(coded_item c, const EncoderWeights& w,
                                 const PipelineConfig& cfg) {
    stream_item s;
    s.idx = c.idx;
    s.px = c.px;
    if (cfg.synthetic) {
        sleep_ms(cfg.synthetic->entropy_ms);
        return s;
    }
    s.out.reserve(c.arts.size());
    for (const auto& a : c.arts)
        s.out.push_back({c.idx, a.tile, encode_artifacts(a, w)});
    return s;
}

inline EncoderWeights weights_for(const std::vector<ImageBuffer>& samples,
                                  const PipelineConfig& cfg) {
    if (cfg.synthetic || samples.empty()) return {};
    return init_weights(make_spec(cfg.size_class, cfg.seed, samples.front().channels));
}

inline void finalize(PipelineReport& r, const std::vector<ImageBuffer>& samples,
                     const PipelineConfig& cfg, double wall_s) {
    r.items = samples.size();
    r.wall_s = wall_s;
    for (const auto& row : r.trace) {
        auto s = static_cast<std::size_t>(row.stage);
        if (s < r.stages.size()) {
            r.stages[s].busy_s += row.done_s - row.dequeue_s;
            r.stages[s].items += 1;
        }
    }
    if (!cfg.synthetic) {
        std::uint64_t raw_bits = 0;
        for (const auto& img : samples)
            raw_bits += static_cast<std::uint64_t>(img.width) * img.height * img.channels *
                        img.bit_depth;
        r.bpp_raw = r.pixels ? static_cast<double>(raw_bits) / static_cast<double>(r.pixels) : 0.0;
        r.bpp_codec =
            r.pixels ? 8.0 * static_cast<double>(r.bytes_emitted) / static_cast<double>(r.pixels)
                     : 0.0;
    }
    r.pps = wall_s > 0 ? static_cast<double>(r.pixels) / wall_s : 0.0;
    r.tcr_per_s = r.pps * (r.bpp_raw - r.bpp_codec);
    std::sort(r.outputs.begin(), r.outputs.end(), [](const EncodedTile& a, const EncodedTile& b) {
        return std::tie(a.item, a.tile.row, a.tile.col) < std::tie(b.item, b.tile.row, b.tile.col);
    });
    std::sort(r.trace.begin(), r.trace.end(), [](const TraceRow& a, const TraceRow& b) {
        return std::tie(a.item, a.stage) < std::tie(b.item, b.stage);
    });
}

} // namespace pdetail

inline PipelineReport run_sequential(const std::vector<ImageBuffer>& samples,
                                     const PipelineConfig& cfg) {
    cfg.validate();
    PipelineReport r;
    r.mode = PipelineMode::sequential;
    EncoderWeights w = pdetail::weights_for(samples, cfg);
    const auto t0 = std::chrono::steady_clock::now();
    auto now = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    auto guard = [](int stage, std::size_t idx, auto fn) {
        try {
            return fn();
        } catch (const std::exception& e) {
            throw pipeline_error("stage " + std::string(stage_name(stage)) + " item " +
                                 std::to_string(idx) + ": " + e.what());
        }
    };

    for (std::size_t i = 0; i < samples.size(); ++i) {
        double a0 = now();
        auto tiled = guard(0, i, [&] { return pdetail::stage_tile(samples[i], i, cfg); });
        double a1 = now();
        r.trace.push_back({i, 0, a0, a0, a1});
        auto coded =
            guard(1, i, [&] { return pdetail::stage_transform(std::move(tiled), w, cfg); });
        double a2 = now();
        r.trace.push_back({i, 1, a1, a1, a2});
        auto streams =
            guard(2, i, [&] { return pdetail::stage_entropy(std::move(coded), w, cfg); });
        double a3 = now();
        r.trace.push_back({i, 2, a2, a2, a3});

        r.pixels += streams.px;
        for (auto& et : streams.out) {
            r.bytes_emitted += et.bytes.size();
            r.outputs.push_back(std::move(et));
        }
    }
    pdetail::finalize(r, samples, cfg, now());
    return r;
}

inline PipelineReport run_concurrent(const std::vector<ImageBuffer>& samples,
                                     const PipelineConfig& cfg) {
    cfg.validate();
    PipelineReport r;
    r.mode = PipelineMode::concurrent;
    const std::size_t n = samples.size();
    if (n == 0) return r;
    EncoderWeights w = pdetail::weights_for(samples, cfg);
    const auto t0 = std::chrono::steady_clock::now();
    std::function<double()> now = [t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    pdetail::handoff<pdetail::source_item> ch0(2, "input", now, cfg.watchdog_s);
    pdetail::handoff<pdetail::tiled_item> ch1(2, "tiles", now, cfg.watchdog_s);
    pdetail::handoff<pdetail::coded_item> ch2(2, "latents", now, cfg.watchdog_s);
    pdetail::handoff<pdetail::stream_item> ch3(2, "streams", now, cfg.watchdog_s);
    auto close_all = [&] {
        ch0.close();
        ch1.close();
        ch2.close();
        ch3.close();
    };

    std::mutex agg_mu;
    std::string err;
    std::atomic<bool> failed{false};
    auto fail = [&](const std::string& m) {
        {
            std::lock_guard lk(agg_mu);
            if (err.empty()) err = m;
        }
        failed = true;
        close_all();
    };
    auto add_row = [&](TraceRow row) {
        std::lock_guard lk(agg_mu);
        r.trace.push_back(row);
    };

    const int cap = env_thread_cap();
    auto pool_size = [cap](int req) { return cap > 0 ? std::min(req, cap) : req; };

    std::vector<std::thread> threads;
    std::atomic<int> live1{pool_size(cfg.tiler_workers)};
    std::atomic<int> live2{pool_size(cfg.transform_workers)};
    std::atomic<int> live3{pool_size(cfg.entropy_workers)};

    threads.emplace_back([&] {
        try {
            for (std::size_t i = 0; i < n; ++i) {
                pdetail::source_item s;
                s.idx = i;
                if (!ch0.push(std::move(s))) return; // shut down mid-feed
            }
            ch0.close();
        } catch (const std::exception& e) {
            fail(std::string("input feed: ") + e.what());
        }
    });

    auto spawn_pool = [&](int stage, std::atomic<int>& live, auto& in, auto& out, auto fn) {
        const int count = live.load();
        for (int k = 0; k < count; ++k)
            threads.emplace_back([&, stage, fn] {
                std::size_t cur = static_cast<std::size_t>(-1);
                try {
                    for (;;) {
                        auto item = in.pop();
                        if (!item) break;
                        cur = item->idx;
                        const double enq = item->enq;
                        const double deq = item->deq;
                        auto produced = fn(std::move(*item));
                        add_row({cur, stage, enq, deq, now()});
                        if (!out.push(std::move(produced))) break;
                    }
                } catch (const std::exception& e) {
                    const std::string which =
                        cur == static_cast<std::size_t>(-1) ? std::string("?")
                                                            : std::to_string(cur);
                    fail("stage " + std::string(stage_name(stage)) + " item " + which + ": " +
                         e.what());
                }
                if (--live == 0) out.close();
            });
    };

    spawn_pool(0, live1, ch0, ch1, [&](pdetail::source_item s) {
        return pdetail::stage_tile(samples[s.idx], s.idx, cfg);
    });
    spawn_pool(1, live2, ch1, ch2, [&](pdetail::tiled_item t) {
        return pdetail::stage_transform(std::move(t), w, cfg);
    });
    spawn_pool(2, live3, ch2, ch3, [&](pdetail::coded_item c) {
        return pdetail::stage_entropy(std::move(c), w, cfg);
    });

    std::size_t got = 0;
    try {
        while (got < n) {
            auto item = ch3.pop();
            if (!item) break;
            ++got;
            r.pixels += item->px;
            for (auto& et : item->out) {
                r.bytes_emitted += et.bytes.size();
                r.outputs.push_back(std::move(et));
            }
        }
    } catch (const std::exception& e) {
        fail(std::string("aggregate: ") + e.what());
    }
    if (got == n) close_all(); // release any worker parked on a full hand-off
    for (auto& th : threads) th.join();
    if (failed.load()) throw pipeline_error(err);
    if (got != n) throw pipeline_error("pipeline ended before all items arrived");
    pdetail::finalize(r, samples, cfg, now());
    return r;
}

inline PipelineReport run_pipeline(const std::vector<ImageBuffer>& samples,
                                   const PipelineConfig& cfg) {
    return cfg.mode == PipelineMode::sequential ? run_sequential(samples, cfg)
                                                : run_concurrent(samples, cfg);
}

// Fraction of transform-only throughput lost when the CPU-bound tiling and
// entropy stages run flat out next to it. Slightly negative values are
// measurement noise; large positives mean the stages fight for cores.
inline double measure_interference(const PipelineConfig& cfg, double duration_s) {
    cfg.validate();
    if (!(duration_s > 0))
        throw std::invalid_argument("measure_interference: duration_s must be > 0");

    EncoderWeights w;
    ImageBuffer probe(cfg.tile_size, cfg.tile_size, 3, 8);
    pcg32 rng(cfg.seed ^ 0x5eedf00dULL);
    for (auto& v : probe.data) v = static_cast<std::uint16_t>(rng.bounded(256));
    LatentArtifacts sample_arts;
    if (!cfg.synthetic) {
        w = init_weights(make_spec(cfg.size_class, cfg.seed, probe.channels));
        sample_arts = encode_tile(probe, w);
    }

    const double px = static_cast<double>(cfg.tile_size) * static_cast<double>(cfg.tile_size);
    auto transform_once = [&] {
        if (cfg.synthetic)
            pdetail::sleep_ms(cfg.synthetic->transform_ms);
        else
            (void)encode_tile(probe, w);
    };
    auto timed_pps = [&] {
        const auto t0 = std::chrono::steady_clock::now();
        std::size_t k = 0;
        double elapsed = 0.0;
        do {
            transform_once();
            ++k;
            elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        } while (elapsed < duration_s);
        return static_cast<double>(k) * px / elapsed;
    };

    const double base = timed_pps();

    std::atomic<bool> stop{false};
    std::vector<std::thread> aux;
    const int cap = env_thread_cap();
    auto pool_size = [cap](int req) { return cap > 0 ? std::min(req, cap) : req; };
    for (int k = 0; k < pool_size(cfg.tiler_workers); ++k)
        aux.emplace_back([&] {
            while (!stop.load(std::memory_order_relaxed)) {
                if (cfg.synthetic)
                    pdetail::sleep_ms(cfg.synthetic->tile_ms);
                else
                    (void)partition(probe, std::max(1, cfg.tile_size / 2));
            }
        });
    for (int k = 0; k < pool_size(cfg.entropy_workers); ++k)
        aux.emplace_back([&] {
            while (!stop.load(std::memory_order_relaxed)) {
                if (cfg.synthetic)
                    pdetail::sleep_ms(cfg.synthetic->entropy_ms);
                else
                    (void)encode_artifacts(sample_arts, w);
            }
        });

    const double loaded = timed_pps();
    stop = true;
    for (auto& th : aux) th.join();
    return 1.0 - loaded / base;
}

inline std::string trace_csv(const PipelineReport& r) {
    std::string s = "item,stage,enqueue_s,dequeue_s,done_s\n";
    char line[160];
    for (const auto& row : r.trace) {
        std::snprintf(line, sizeof line, "%zu,%s,%.6f,%.6f,%.6f\n", row.item,
                      stage_name(row.stage), row.enqueue_s, row.dequeue_s, row.done_s);
        s += line;
    }
    return s;
}

} // namespace oec
