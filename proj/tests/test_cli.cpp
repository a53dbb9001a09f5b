// End-to-end smoke tests for the oec-bench binary. The test runner exports
// OEC_BENCH_BIN; each case shells out and checks exit codes plus emitted files.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "oec/image.hpp"
#include "oec/report.hpp"
#include "oec/util.hpp"

namespace fs = std::filesystem;
using namespace oec;
using json = nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

const std::string& bench_bin() {
    static const std::string bin = [] {
        const char* p = std::getenv("OEC_BENCH_BIN");
        REQUIRE(p != nullptr);
        return std::string(p);
    }();
    return bin;
}

fs::path scratch_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "oec_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run(const std::string& args) {
    static int counter = 0;
    const fs::path log = scratch_dir() / ("run" + std::to_string(counter++) + ".log");
    const std::string cmd = bench_bin() + " " + args + " > " + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.output = read_text_file(log.string());
    return r;
}

std::string make_raw_image(const std::string& name, int h, int w, std::uint64_t seed) {
    ImageBuffer img(h, w, 3, 8);
    pcg32 rng(seed);
    for (auto& v : img.data) v = static_cast<std::uint16_t>(rng.bounded(256));
    const fs::path p = scratch_dir() / name;
    write_raw_planar(img, p.string());
    return p.string();
}

} // namespace

TEST_CASE("fixtures list prints the shipped catalog", "[cli]") {
    auto r = run("fixtures list");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("worldview-3") != std::string::npos);
    CHECK(r.output.find("orin-nano") != std::string::npos);
    CHECK(r.output.find("fool-s") != std::string::npos);

    auto rj = run("--json fixtures list");
    CHECK(rj.exit_code == 0);
    auto doc = json::parse(rj.output);
    CHECK(doc.at("schema").at("name") == "fixtures_list");
    CHECK(doc.at("fixtures").size() >= 12);
}

TEST_CASE("help exits zero and bad usage exits two", "[cli]") {
    CHECK(run("--help").exit_code == 0);
    CHECK(run("encode --help").exit_code == 0);
    CHECK(run("frobnicate").exit_code == 2);
    CHECK(run("verify a.fenc --lat").exit_code == 2);         // missing option value
    CHECK(run("simulate --mission no-such-thing").exit_code == 2);
    CHECK(run("").exit_code == 2);                            // subcommand required
}

TEST_CASE("encode then verify round-trips through the filesystem", "[cli]") {
    const std::string img = make_raw_image("rt.raw", 96, 96, 11);
    const fs::path out = scratch_dir() / "rt_out";

    auto enc = run("encode " + img + " --tile-size 64 --out-dir " + out.string());
    REQUIRE(enc.exit_code == 0);
    for (const char* stem : {"rt_r0_c0", "rt_r0_c1", "rt_r1_c0", "rt_r1_c1"}) {
        CHECK(fs::exists(out / (std::string(stem) + ".lat")));
        CHECK(fs::exists(out / (std::string(stem) + ".fenc")));
    }

    auto man = json::parse(read_text_file((out / "manifest.json").string()));
    CHECK(man.at("schema").at("name") == "run_manifest");
    CHECK(man.at("command") == "encode");
    CHECK(man.at("outputs").size() == 8);

    auto ver = run("verify " + (out / "rt_r0_c0.fenc").string() + " " +
                   (out / "rt_r1_c1.fenc").string() + " --lat " +
                   (out / "rt_r0_c0.lat").string() + " " + (out / "rt_r1_c1.lat").string());
    CHECK(ver.exit_code == 0);

    // pairing streams with the wrong artifacts is an operational failure
    auto cross = run("verify " + (out / "rt_r0_c0.fenc").string() + " --lat " +
                     (out / "rt_r0_c1.lat").string());
    CHECK(cross.exit_code == 1);

    // flipping a payload byte must not verify
    auto bytes = read_file((out / "rt_r0_c0.fenc").string());
    bytes[bytes.size() / 2] ^= 0x5A;
    write_file((out / "bad.fenc").string(), bytes);
    auto bad = run("verify " + (out / "bad.fenc").string() + " --lat " +
                   (out / "rt_r0_c0.lat").string());
    CHECK(bad.exit_code == 1);
}

TEST_CASE("encode keeps going past an unreadable input", "[cli]") {
    const std::string good = make_raw_image("keep.raw", 64, 64, 12);
    const fs::path out = scratch_dir() / "keep_out";
    auto r = run("encode " + (scratch_dir() / "missing.raw").string() + " " + good +
                 " --tile-size 64 --out-dir " + out.string());
    CHECK(r.exit_code == 1); // failure reported...
    CHECK(fs::exists(out / "keep_r0_c0.fenc")); // ...but the good input was still encoded
}

TEST_CASE("profile emits the grid table and a chosen config", "[cli]") {
    const fs::path out = scratch_dir() / "prof_out";
    const fs::path grid = scratch_dir() / "grid.json";
    write_text_file(grid.string(),
                    R"([{"tile_size":256,"batch_size":1,"size_class":"S"},
                        {"tile_size":600,"batch_size":8,"size_class":"S"}])");

    auto r = run("profile --runner synthetic --repeats 3 --grid " + grid.string() +
                 " --out-dir " + out.string());
    REQUIRE(r.exit_code == 0);

    auto csv = read_text_file((out / "profile_grid.csv").string());
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3); // header + 2 cells
    CHECK(csv.rfind("tile_size,batch_size,size_class,", 0) == 0);

    auto doc = json::parse(read_text_file((out / "profile_result.json").string()));
    CHECK(doc.at("schema").at("name") == "profile_result");
    CHECK(doc.at("grid").size() == 2);
    // the bigger tile wins on throughput-rate under the synthetic cost model
    CHECK(doc.at("chosen_config").at("tile_size") == 600);
    CHECK(run("profile --runner warp9").exit_code == 2);
}

TEST_CASE("pipeline run writes streams, a report and a trace", "[cli]") {
    const fs::path out = scratch_dir() / "pipe_out";
    auto r = run("--seed 3 pipeline run --synthetic-images 2 --image-size 96 --tile 64 "
                 "--mode conc --trace --out-dir " + out.string());
    REQUIRE(r.exit_code == 0);

    auto doc = json::parse(read_text_file((out / "pipeline_report.json").string()));
    CHECK(doc.at("schema").at("name") == "pipeline_report");
    CHECK(doc.at("mode") == "concurrent");
    CHECK(doc.at("items") == 2); // an item is one input image
    for (int item : {0, 1})
        for (const char* rc : {"r0_c0", "r0_c1", "r1_c0", "r1_c1"})
            CHECK(fs::exists(out / ("item" + std::to_string(item) + "_" + rc + ".fenc")));

    auto trace = read_text_file((out / "trace.csv").string());
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 7); // header + 2 items x 3 stages
    CHECK(run("pipeline run --tile 64").exit_code == 2); // no input source given
}

TEST_CASE("simulate reports a pass and the volume table", "[cli]") {
    const fs::path out = scratch_dir() / "sim_out";
    auto r = run("simulate --mission wv3-fool-s --out-dir " + out.string());
    REQUIRE(r.exit_code == 0);

    auto doc = json::parse(read_text_file((out / "pass_report.json").string()));
    CHECK(doc.at("schema").at("name") == "pass_report");
    CHECK(doc.at("gain_factor").get<double>() > 1.0);
    CHECK(doc.at("raw_equivalent_bytes").get<double>() > 9.0e11);

    auto csv = read_text_file((out / "volumes.csv").string());
    // 4 links x 6 codec profiles plus the header
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 25);
    CHECK(csv.find("worldview-3") != std::string::npos);

    // mission composed from a JSON file instead of a fixture name
    const fs::path mj = scratch_dir() / "mission.json";
    write_text_file(mj.string(), json{{"schema", schema_block("mission_profile")},
                                      {"link", "dove"},
                                      {"sensor", "rgb-smallsat"},
                                      {"codec_family", "fool"},
                                      {"size_class", "S"},
                                      {"device", "tx2"},
                                      {"inter_pass_s", 5400.0},
                                      {"capture_volume_override_bytes", 1.0e13}}
                                     .dump());
    auto rj = run("--json simulate --mission " + mj.string() + " --out-dir " +
                  (scratch_dir() / "sim_out2").string());
    CHECK(rj.exit_code == 0);
    CHECK(json::parse(rj.output).at("schema").at("name") == "pass_report");
}

TEST_CASE("config file feeds global options", "[cli]") {
    const fs::path cfg = scratch_dir() / "bench.toml";
    const fs::path out = scratch_dir() / "cfg_out";
    write_text_file(cfg.string(), "seed=42\nout-dir=\"" + out.string() + "\"\n");
    auto r = run("--config " + cfg.string() +
                 " pipeline run --synthetic-images 1 --image-size 64 --tile 64 --mode seq");
    REQUIRE(r.exit_code == 0);
    auto man = json::parse(read_text_file((out / "manifest.json").string()));
    CHECK(man.at("seed") == 42);
}
