// oec-bench: command-line front end over the encoder, profiler, pipeline
// executor and downlink simulator. Exit codes: 0 success, 1 operational
// failure, 2 configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oec/downlink.hpp"
#include "oec/fixtures.hpp"
#include "oec/pipeline.hpp"
#include "oec/png_io.hpp"
#include "oec/profiler.hpp"
#include "oec/report.hpp"
#include "oec/stream.hpp"

namespace fs = std::filesystem;
using namespace oec;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;

struct Global {
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    bool as_json = false;
};

// Collects everything a command writes, then drops a manifest beside it.
struct Emitter {
    RunManifest man;
    fs::path dir;

    Emitter(const std::string& command, const std::string& canonical, const Global& g)
        : dir(g.out_dir) {
        man.command = command;
        man.config_digest = RunManifest::digest_of(canonical);
        man.seed = g.seed;
        man.started_at = iso8601_utc(std::chrono::system_clock::now());
        fs::create_directories(dir);
    }

    void emit_bytes(const std::string& name, const std::vector<std::uint8_t>& bytes) {
        write_file((dir / name).string(), bytes);
        man.outputs.push_back(name);
    }
    void emit_text(const std::string& name, const std::string& text) {
        write_text_file((dir / name).string(), text);
        man.outputs.push_back(name);
    }
    void finish() {
        man.finished_at = iso8601_utc(std::chrono::system_clock::now());
        write_text_file((dir / "manifest.json").string(), man.to_json().dump(2) + "\n");
    }
};

ImageBuffer load_image(const std::string& path) {
    auto ext = fs::path(path).extension().string();
    if (ext == ".png") return read_png(path);
    if (ext == ".raw") return read_raw_planar(path);
    throw std::invalid_argument("unsupported image format (want .png or .raw): " + path);
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) {
        if (!s.empty()) s += ",";
        s += x;
    }
    return s;
}

// ---------------------------------------------------------------- encode

struct EncodeOpts {
    std::vector<std::string> inputs;
    int tile_size = 600;
    std::string size_class = "S";
    int group_len = 1;
};

int cmd_encode(const Global& g, const EncodeOpts& o) {
    const SizeClass cls = size_class_from_string(o.size_class);
    Emitter em("encode",
               "encode|seed=" + std::to_string(g.seed) + "|tile=" + std::to_string(o.tile_size) +
                   "|class=" + o.size_class + "|group=" + std::to_string(o.group_len) +
                   "|inputs=" + join(o.inputs),
               g);

    std::map<int, EncoderWeights> weights_by_channels;
    json files = json::array();
    std::uint64_t total_bytes = 0, total_pixels = 0;
    std::size_t total_tiles = 0;
    bool any_failed = false;

    for (std::size_t i = 0; i < o.inputs.size(); ++i) {
        const std::string& path = o.inputs[i];
        try {
            ImageBuffer img = load_image(path);
            auto wit = weights_by_channels.find(img.channels);
            if (wit == weights_by_channels.end())
                wit = weights_by_channels
                          .emplace(img.channels,
                                   init_weights(make_spec(cls, g.seed, img.channels)))
                          .first;
            TileBatch batch = partition(img, o.tile_size, static_cast<int>(i));
            batch.group_len = o.group_len;
            auto arts = encode_batch(batch, wit->second);

            const std::string stem = fs::path(path).stem().string();
            std::uint64_t file_bytes = 0;
            for (const auto& a : arts) {
                const std::string base =
                    stem + "_r" + std::to_string(a.tile.row) + "_c" + std::to_string(a.tile.col);
                em.emit_bytes(base + ".lat", serialize_artifacts(a));
                auto fenc = encode_artifacts(a, wit->second);
                file_bytes += fenc.size();
                em.emit_bytes(base + ".fenc", std::move(fenc));
            }
            const std::uint64_t px =
                static_cast<std::uint64_t>(img.width) * static_cast<std::uint64_t>(img.height);
            total_bytes += file_bytes;
            total_pixels += px;
            total_tiles += arts.size();
            files.push_back({{"input", path},
                             {"tiles", arts.size()},
                             {"bytes", file_bytes},
                             {"bpp", bpp(file_bytes, px)},
                             {"ok", true}});
        } catch (const std::exception& e) {
            any_failed = true;
            std::fprintf(stderr, "encode: %s: %s\n", path.c_str(), e.what());
            files.push_back({{"input", path}, {"ok", false}, {"error", e.what()}});
        }
    }
    em.finish();

    json summary{{"schema", schema_block("encode_summary")},
                 {"files", files},
                 {"tiles", total_tiles},
                 {"total_bytes", total_bytes},
                 {"bpp", total_pixels ? bpp(total_bytes, total_pixels) : 0.0},
                 {"ok", !any_failed}};
    if (g.as_json)
        std::printf("%s\n", summary.dump(2).c_str());
    else
        std::printf("encoded %zu tile(s) from %zu input(s): %llu bytes, %.4f bpp\n", total_tiles,
                    o.inputs.size(), static_cast<unsigned long long>(total_bytes),
                    total_pixels ? bpp(total_bytes, total_pixels) : 0.0);
    return any_failed ? exit_failure : exit_ok;
}

// ---------------------------------------------------------------- verify

struct VerifyOpts {
    std::vector<std::string> fenc;
    std::vector<std::string> lat;
};

// First differing main-latent index, or -1 when only metadata differs.
long first_diff(const LatentArtifacts& a, const LatentArtifacts& b) {
    const std::size_t n = std::min(a.y_hat.data.size(), b.y_hat.data.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a.y_hat.data[i] != b.y_hat.data[i]) return static_cast<long>(i);
    return -1;
}

int cmd_verify(const Global& g, const VerifyOpts& o) {
    if (o.fenc.size() != o.lat.size())
        throw std::invalid_argument("verify: " + std::to_string(o.fenc.size()) +
                                    " stream(s) but " + std::to_string(o.lat.size()) +
                                    " artifact file(s)");
    json results = json::array();
    bool all_ok = true;
    for (std::size_t i = 0; i < o.fenc.size(); ++i) {
        json row{{"fenc", o.fenc[i]}, {"lat", o.lat[i]}};
        try {
            auto want = load_artifacts(o.lat[i]);
            auto got = decode_stream(read_file(o.fenc[i]));
            if (got == want) {
                row["ok"] = true;
            } else {
                all_ok = false;
                row["ok"] = false;
                row["tile"] = {{"image_id", want.tile.image_id},
                               {"row", want.tile.row},
                               {"col", want.tile.col}};
                row["first_diff_index"] = first_diff(got, want);
                std::fprintf(stderr, "verify: %s: mismatch at tile (%d,%d,%d), index %ld\n",
                             o.fenc[i].c_str(), want.tile.image_id, want.tile.row, want.tile.col,
                             first_diff(got, want));
            }
        } catch (const std::exception& e) {
            all_ok = false;
            row["ok"] = false;
            row["error"] = e.what();
            std::fprintf(stderr, "verify: %s: %s\n", o.fenc[i].c_str(), e.what());
        }
        results.push_back(row);
    }
    if (g.as_json)
        std::printf("%s\n", json{{"schema", schema_block("verify_result")},
                                 {"pairs", results},
                                 {"ok", all_ok}}
                                .dump(2)
                                .c_str());
    else
        std::printf("verify: %zu pair(s), %s\n", o.fenc.size(), all_ok ? "all match" : "MISMATCH");
    return all_ok ? exit_ok : exit_failure;
}

// ---------------------------------------------------------------- profile

struct ProfileOpts {
    std::string grid_file;
    std::string codec = "fool";
    std::string runner = "synthetic";
    int repeats = 10;
    double bpp_raw = 24.0;
};

std::vector<ProfileCell> parse_grid_file(const std::string& path) {
    json doc = json::parse(read_text_file(path));
    if (!doc.is_array()) throw std::invalid_argument("grid file must be a JSON array of cells");
    std::vector<ProfileCell> cells;
    for (const auto& c : doc)
        cells.push_back({c.at("tile_size").get<int>(), c.at("batch_size").get<int>(),
                         size_class_from_string(c.at("size_class").get<std::string>())});
    return cells;
}

std::map<SizeClass, CodecProfile> parse_codec_profiles(const std::string& spec_str) {
    if (fs::exists(spec_str)) {
        json doc = json::parse(read_text_file(spec_str));
        require_schema(doc, "codec_profiles");
        std::map<SizeClass, CodecProfile> out;
        for (const auto& p : doc.at("profiles")) {
            CodecProfile cp;
            cp.name = p.at("name").get<std::string>();
            cp.encoder_params = p.value("encoder_params", 0ull);
            cp.source = p.value("source", "fixture");
            for (const auto& [task, v] : p.at("bpp_by_task").items())
                cp.bpp_by_task[task] = v.get<double>();
            out[size_class_from_string(p.at("size_class").get<std::string>())] = cp;
        }
        return out;
    }
    return fixtures::codec_family(spec_str);
}

int cmd_profile(const Global& g, const ProfileOpts& o) {
    auto grid = o.grid_file.empty() ? default_grid() : parse_grid_file(o.grid_file);
    auto profiles = parse_codec_profiles(o.codec);
    CellRunner runner;
    if (o.runner == "synthetic")
        runner = synthetic_cost_runner();
    else if (o.runner == "transform")
        runner = make_transform_runner(g.seed, false);
    else if (o.runner == "full")
        runner = make_transform_runner(g.seed, true);
    else
        throw std::invalid_argument("unknown runner (want synthetic|transform|full): " + o.runner);

    Emitter em("profile",
               "profile|seed=" + std::to_string(g.seed) + "|grid=" + o.grid_file +
                   "|codec=" + o.codec + "|runner=" + o.runner +
                   "|repeats=" + std::to_string(o.repeats) +
                   "|bpp_raw=" + std::to_string(o.bpp_raw),
               g);
    auto measurements = sweep(grid, runner, o.repeats);
    auto result = select_best(measurements, profiles, o.bpp_raw);

    em.emit_text("profile_grid.csv", profile_grid_csv(result.grid));
    json doc = to_json(result);
    em.emit_text("profile_result.json", doc.dump(2) + "\n");
    em.finish();

    const auto& c = result.grid[result.chosen];
    if (g.as_json)
        std::printf("%s\n", doc.dump(2).c_str());
    else
        std::printf("profiled %zu cell(s); best: tile %d, batch %d, class %s -> %.6g TCR/s\n",
                    result.grid.size(), c.tile_size, c.batch_size, to_string(c.size_class),
                    c.tcr_per_s);
    return exit_ok;
}

// ---------------------------------------------------------------- pipeline run

struct PipelineOpts {
    std::string mode = "conc";
    int tile_size = 600;
    int batch_size = 1;
    std::string size_class = "S";
    int group_len = 1;
    std::vector<std::string> images;
    int synthetic_images = 0;
    int image_size = 256;
    bool trace = false;
    std::vector<double> stage_cost_ms;
};

int cmd_pipeline_run(const Global& g, const PipelineOpts& o) {
    PipelineConfig cfg;
    cfg.mode = pipeline_mode_from(o.mode);
    cfg.tile_size = o.tile_size;
    cfg.batch_size = o.batch_size;
    cfg.group_len = o.group_len;
    cfg.size_class = size_class_from_string(o.size_class);
    cfg.seed = g.seed;
    if (!o.stage_cost_ms.empty()) {
        if (o.stage_cost_ms.size() != 3)
            throw std::invalid_argument("--stage-cost-ms wants exactly three values");
        cfg.synthetic = StageCosts{o.stage_cost_ms[0], o.stage_cost_ms[1], o.stage_cost_ms[2]};
    }

    std::vector<ImageBuffer> samples;
    if (!o.images.empty()) {
        for (const auto& p : o.images) samples.push_back(load_image(p));
    } else if (o.synthetic_images > 0) {
        for (int i = 0; i < o.synthetic_images; ++i) {
            ImageBuffer img(o.image_size, o.image_size, 3, 8);
            pcg32 rng(g.seed ^ static_cast<std::uint64_t>(i + 1));
            for (auto& v : img.data) v = static_cast<std::uint16_t>(rng.bounded(256));
            samples.push_back(std::move(img));
        }
    } else {
        throw std::invalid_argument("pipeline run: give --images or --synthetic-images");
    }

    Emitter em("pipeline run",
               "pipeline|seed=" + std::to_string(g.seed) + "|mode=" + o.mode +
                   "|tile=" + std::to_string(o.tile_size) + "|batch=" +
                   std::to_string(o.batch_size) + "|class=" + o.size_class + "|group=" +
                   std::to_string(o.group_len) + "|images=" + join(o.images) +
                   "|synthetic=" + std::to_string(o.synthetic_images) + "|image_size=" +
                   std::to_string(o.image_size),
               g);
    PipelineReport report = run_pipeline(samples, cfg);

    for (const auto& et : report.outputs)
        em.emit_bytes("item" + std::to_string(et.item) + "_r" + std::to_string(et.tile.row) +
                          "_c" + std::to_string(et.tile.col) + ".fenc",
                      et.bytes);
    json doc = to_json(report, o.trace);
    em.emit_text("pipeline_report.json", doc.dump(2) + "\n");
    if (o.trace) em.emit_text("trace.csv", trace_csv(report));
    em.finish();

    if (g.as_json)
        std::printf("%s\n", doc.dump(2).c_str());
    else
        std::printf("pipeline %s: %zu item(s), %llu px, %.3f s, %.4g px/s, %llu bytes\n",
                    to_string(report.mode), report.items,
                    static_cast<unsigned long long>(report.pixels), report.wall_s, report.pps,
                    static_cast<unsigned long long>(report.bytes_emitted));
    return exit_ok;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    std::string mission;
};

MissionProfile parse_mission(const std::string& spec_str) {
    if (!fs::exists(spec_str)) return fixtures::mission(spec_str);
    json doc = json::parse(read_text_file(spec_str));
    require_schema(doc, "mission_profile");
    MissionProfile m;
    m.link = fixtures::link(doc.at("link").get<std::string>());
    m.sensor = fixtures::sensor(doc.at("sensor").get<std::string>());
    m.codec = fixtures::codec_profile(
        doc.at("codec_family").get<std::string>(),
        size_class_from_string(doc.at("size_class").get<std::string>()));
    m.device = fixtures::device(doc.at("device").get<std::string>());
    m.inter_pass_s = doc.at("inter_pass_s").get<double>();
    if (doc.contains("capture_volume_override_bytes"))
        m.capture_volume_override_bytes = doc["capture_volume_override_bytes"].get<double>();
    if (doc.contains("calibrated_pps"))
        m.device.calibrated_pps = doc["calibrated_pps"].get<double>();
    if (doc.contains("transmit_power_w"))
        m.device.transmit_power_w = doc["transmit_power_w"].get<double>();
    return m;
}

int cmd_simulate(const Global& g, const SimulateOpts& o) {
    MissionProfile m = parse_mission(o.mission);
    Emitter em("simulate", "simulate|seed=" + std::to_string(g.seed) + "|mission=" + o.mission,
               g);
    PassReport r = simulate_pass(m);
    json doc = to_json(r);
    em.emit_text("pass_report.json", doc.dump(2) + "\n");

    // bar-chart data: every shipped link x codec pairing at this sensor's raw rate
    const double braw = raw_bpp(m.sensor);
    std::vector<VolumeRow> rows;
    for (const auto& l : fixtures::links())
        for (const auto& [fam, classes] : fixtures::codec_families())
            for (const auto& [cls, p] : classes) {
                VolumeRow row;
                row.link = l.name;
                row.codec = p.name;
                row.v_link_bytes = link_capacity_bytes(l);
                row.raw_equivalent_bytes = downlinkable_raw_equivalent(l, braw, p.mean_bpp());
                row.gain = row.raw_equivalent_bytes / row.v_link_bytes;
                rows.push_back(row);
            }
    em.emit_text("volumes.csv", volume_csv(rows));
    em.finish();

    if (g.as_json)
        std::printf("%s\n", doc.dump(2).c_str());
    else
        std::printf("pass: %.4g raw-equivalent bytes (gain %.2fx)%s, compute %.1f J, transmit "
                    "%.1f J\n",
                    r.raw_equivalent_bytes, r.gain_factor, r.saturation ? ", saturated" : "",
                    r.compute_energy_j, r.transmit_energy_j);
    return exit_ok;
}

// ---------------------------------------------------------------- fixtures list

int cmd_fixtures_list(const Global& g) {
    auto all = fixtures::list_all();
    if (g.as_json) {
        json arr = json::array();
        for (const auto& f : all)
            arr.push_back({{"kind", f.kind}, {"name", f.name}, {"summary", f.summary}});
        std::printf("%s\n",
                    json{{"schema", schema_block("fixtures_list")}, {"fixtures", arr}}
                        .dump(2)
                        .c_str());
    } else {
        for (const auto& f : all)
            std::printf("%-8s %-20s %s\n", f.kind.c_str(), f.name.c_str(), f.summary.c_str());
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge-encoding bench: tile/encode imagery, profile configurations, run the "
                 "three-stage pipeline, and simulate downlink passes"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a TOML/INI file");

    Global g;
    app.add_option("--seed", g.seed, "Deterministic seed for weights and synthetic data")
        ->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Directory for emitted files")
        ->capture_default_str();
    app.add_flag("--json", g.as_json, "Machine-readable stdout");

    EncodeOpts eo;
    auto* enc = app.add_subcommand("encode", "Tile images and encode them to .lat/.fenc");
    enc->fallthrough();
    enc->add_option("inputs", eo.inputs, "Input images (.png or planar .raw)")
        ->required()
        ->expected(-1);
    enc->add_option("--tile-size", eo.tile_size)->capture_default_str();
    enc->add_option("--class", eo.size_class, "Encoder size class S|M|L")->capture_default_str();
    enc->add_option("--group-len", eo.group_len)->capture_default_str();

    VerifyOpts vo;
    auto* ver = app.add_subcommand("verify", "Decode .fenc streams and compare with .lat");
    ver->fallthrough();
    ver->add_option("fenc", vo.fenc, "Encoded streams")->required()->expected(-1);
    ver->add_option("--lat", vo.lat, "Matching artifact files")->required();

    ProfileOpts po;
    auto* prof = app.add_subcommand("profile", "Sweep tile x batch x class and pick a config");
    prof->fallthrough();
    prof->add_option("--grid", po.grid_file, "JSON grid file (default: built-in grid)");
    prof->add_option("--codec", po.codec, "Codec family fixture or codec_profiles JSON file")
        ->capture_default_str();
    prof->add_option("--runner", po.runner, "synthetic|transform|full")->capture_default_str();
    prof->add_option("--repeats", po.repeats)->capture_default_str();
    prof->add_option("--bpp-raw", po.bpp_raw)->capture_default_str();

    PipelineOpts plo;
    auto* pipe = app.add_subcommand("pipeline", "Three-stage executor");
    pipe->fallthrough();
    pipe->require_subcommand(1);
    auto* prun = pipe->add_subcommand("run", "Run the tiling/transform/entropy pipeline");
    prun->fallthrough();
    prun->add_option("--mode", plo.mode, "seq|conc")->capture_default_str();
    prun->add_option("--tile", plo.tile_size)->capture_default_str();
    prun->add_option("--batch", plo.batch_size)->capture_default_str();
    prun->add_option("--class", plo.size_class)->capture_default_str();
    prun->add_option("--group-len", plo.group_len)->capture_default_str();
    prun->add_option("--images", plo.images, "Input images");
    prun->add_option("--synthetic-images", plo.synthetic_images,
                     "Generate this many noise images instead");
    prun->add_option("--image-size", plo.image_size)->capture_default_str();
    prun->add_flag("--trace", plo.trace, "Also write trace.csv");
    prun->add_option("--stage-cost-ms", plo.stage_cost_ms,
                     "Three per-stage synthetic costs (ms); replaces real work")
        ->expected(3);

    SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "Simulate one downlink pass");
    sim->fallthrough();
    sim->add_option("--mission", so.mission, "Mission fixture name or mission_profile JSON file")
        ->required();

    auto* fx = app.add_subcommand("fixtures", "Fixture catalog");
    fx->fallthrough();
    fx->require_subcommand(1);
    auto* fxl = fx->add_subcommand("list", "List shipped fixtures");
    fxl->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (*enc) return cmd_encode(g, eo);
        if (*ver) return cmd_verify(g, vo);
        if (*prof) return cmd_profile(g, po);
        if (*pipe && *prun) return cmd_pipeline_run(g, plo);
        if (*sim) return cmd_simulate(g, so);
        if (*fx && *fxl) return cmd_fixtures_list(g);
    } catch (const json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_failure;
    }
    return exit_config;
}
