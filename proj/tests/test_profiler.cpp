#include <catch2/catch_amalgamated.hpp>

#include "oec/profiler.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

using namespace oec;
using Catch::Matchers::WithinRel;

namespace {

// Mean coded rates by class for the two codec families under comparison,
// and per-device pixel throughputs recovered from the published score table
// (score / (24 - bpp)); the replay must reproduce the published choices.
const std::map<SizeClass, CodecProfile> fool_rates = {
    {SizeClass::S, {"fool-s", {{"mean", 0.2303}}, 364992, "fixture"}},
    {SizeClass::M, {"fool-m", {{"mean", 0.2045}}, 674416, "fixture"}},
    {SizeClass::L, {"fool-l", {{"mean", 0.180833333}}, 1145712, "fixture"}},
};
const std::map<SizeClass, CodecProfile> bsvbi_rates = {
    {SizeClass::S, {"bsvbi-s", {{"mean", 0.388333333}}, 0, "fixture"}},
    {SizeClass::M, {"bsvbi-m", {{"mean", 0.3693}}, 0, "fixture"}},
    {SizeClass::L, {"bsvbi-l", {{"mean", 0.350466667}}, 0, "fixture"}},
};

ProfileMeasurement meas(SizeClass c, double pps) {
    ProfileMeasurement m;
    m.tile_size = 600;
    m.batch_size = 8;
    m.size_class = c;
    m.img_per_s = pps / (600.0 * 600.0);
    m.pixels_per_s = pps;
    m.repeats = 10;
    return m;
}

} // namespace

TEST_CASE("raw bits per pixel", "[profiler]") {
    CHECK(raw_bpp(3, 8) == 24.0);
    CHECK(raw_bpp(4, 12) == 48.0);
    CHECK(raw_bpp(1, 16) == 16.0);
    CHECK_THROWS_AS(raw_bpp(0, 8), std::invalid_argument);

    SensorSpec s;
    s.name = "rgb";
    s.orbit_altitude_m = 500e3;
    s.capture_rate_hz = 1.0;
    s.spatial_res_h_m = 3.0;
    s.spatial_res_w_m = 3.0;
    s.bands = 3;
    s.radiometric_bits = 8;
    s.fov_deg = 2.0;
    CHECK(raw_bpp(s) == 24.0);
}

TEST_CASE("transfer cost reduction per second", "[profiler]") {
    CHECK(tcr_per_second(1e6, 24.0, 0.0) == 2.4e7);
    // published device row, throughput recovered by inverting the score
    CHECK_THAT(tcr_per_second(5.63154e7, 24.0, 0.2303), WithinRel(1.3386e9, 1e-3));
    // linear in pps
    CHECK(tcr_per_second(2e6, 24.0, 0.5) == 2.0 * tcr_per_second(1e6, 24.0, 0.5));
    CHECK_THROWS_AS(tcr_per_second(1e6, 24.0, 24.0), std::invalid_argument);
    CHECK_THROWS_AS(tcr_per_second(1e6, 24.0, 25.0), std::invalid_argument);
    CHECK_THROWS_AS(tcr_per_second(-1.0, 24.0, 1.0), std::invalid_argument);
}

TEST_CASE("synthetic cost model separates the two throughput optima", "[profiler]") {
    auto ms = sweep(default_grid(), synthetic_cost_runner(), 3, 1);
    REQUIRE(ms.size() == 75);

    std::size_t best_img = 0, best_pps = 0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        REQUIRE(ms[i].ok);
        CHECK(ms[i].dispersion == 0.0); // deterministic model, zero spread
        CHECK(ms[i].pixels_per_s ==
              Catch::Approx(ms[i].img_per_s * ms[i].tile_size * ms[i].tile_size));
        if (ms[i].img_per_s > ms[best_img].img_per_s) best_img = i;
        if (ms[i].pixels_per_s > ms[best_pps].pixels_per_s) best_pps = i;
    }
    // img/s rewards small tiles; pixel throughput peaks at a larger tile
    CHECK(ms[best_img].tile_size == 256);
    CHECK(ms[best_pps].tile_size == 600);
    CHECK(ms[best_img].tile_size < ms[best_pps].tile_size);
    CHECK(ms[best_img].size_class == SizeClass::S);
    CHECK(ms[best_pps].size_class == SizeClass::S);
    CHECK(ms[best_img].batch_size == 8);
    CHECK(ms[best_pps].batch_size == 8);
}

TEST_CASE("a failing cell does not abort the sweep", "[profiler]") {
    std::vector<ProfileCell> grid = {{256, 1, SizeClass::S},
                                     {384, 1, SizeClass::S},
                                     {512, 1, SizeClass::S}};
    auto runner = [](const ProfileCell& c) -> double {
        if (c.tile_size == 384) throw std::runtime_error("device fell over");
        return 0.01;
    };
    auto ms = sweep(grid, runner, 4, 1);
    REQUIRE(ms.size() == 3);
    CHECK(ms[0].ok);
    CHECK_FALSE(ms[1].ok);
    CHECK(ms[1].error == "device fell over");
    CHECK(ms[2].ok);
    CHECK(ms[0].img_per_s == Catch::Approx(100.0));
}

TEST_CASE("real transform runner produces plausible rates", "[profiler]") {
    std::vector<ProfileCell> grid = {{64, 1, SizeClass::S}, {64, 2, SizeClass::S}};
    auto ms = sweep(grid, make_transform_runner(33), 4, 1);
    for (const auto& m : ms) {
        REQUIRE(m.ok);
        CHECK(m.img_per_s > 0.0);
        CHECK(m.pixels_per_s == Catch::Approx(m.img_per_s * 64.0 * 64.0));
        CHECK(m.dispersion >= 0.0);
    }
}

TEST_CASE("published throughputs replay to the published choices", "[profiler]") {
    struct Device {
        const char* name;
        double fool_l, fool_m, fool_s;
        double bsvbi_l, bsvbi_m, bsvbi_s;
    };
    // pps recovered from the published per-device scores
    const Device devices[] = {
        {"orin-nano", 3.14008e7, 3.22305e7, 5.63154e7, 2.59705e7, 3.06821e7, 2.96121e7},
        {"xavier-nx", 3.16787e7, 3.43191e7, 5.64668e7, 2.53734e7, 3.11954e7, 2.99513e7},
        {"tx2", 9.94829e6, 1.17951e7, 1.71441e7, 7.55237e6, 1.26860e7, 1.13579e7},
    };

    for (const auto& d : devices) {
        INFO(d.name);
        std::vector<ProfileMeasurement> fool = {meas(SizeClass::L, d.fool_l),
                                                meas(SizeClass::M, d.fool_m),
                                                meas(SizeClass::S, d.fool_s)};
        auto rf = select_best(fool, fool_rates, 24.0);
        CHECK(rf.grid[rf.chosen].size_class == SizeClass::S);
        CHECK(rf.tie_break == "none");

        std::vector<ProfileMeasurement> bsvbi = {meas(SizeClass::L, d.bsvbi_l),
                                                 meas(SizeClass::M, d.bsvbi_m),
                                                 meas(SizeClass::S, d.bsvbi_s)};
        auto rb = select_best(bsvbi, bsvbi_rates, 24.0);
        CHECK(rb.grid[rb.chosen].size_class == SizeClass::M);
    }

    // the winning cell's score matches the published table entry
    std::vector<ProfileMeasurement> orin = {meas(SizeClass::L, 3.14008e7),
                                            meas(SizeClass::M, 3.22305e7),
                                            meas(SizeClass::S, 5.63154e7)};
    auto r = select_best(orin, fool_rates, 24.0);
    CHECK_THAT(r.grid[r.chosen].tcr_per_s, WithinRel(1.3386e9, 1e-3));
}

TEST_CASE("selection is invariant under benign rescalings", "[profiler]") {
    std::vector<ProfileMeasurement> base = {meas(SizeClass::L, 3.14008e7),
                                            meas(SizeClass::M, 3.22305e7),
                                            meas(SizeClass::S, 5.63154e7)};
    auto r0 = select_best(base, fool_rates, 24.0);

    auto scaled = base;
    for (auto& m : scaled) {
        m.pixels_per_s *= 3.7;
        m.img_per_s *= 3.7;
    }
    auto r1 = select_best(scaled, fool_rates, 24.0);
    CHECK(r1.chosen == r0.chosen);

    auto shifted = fool_rates;
    for (auto& [cls, p] : shifted)
        for (auto& [task, v] : p.bpp_by_task) v += 0.001; // below the smallest bpp gap
    auto r2 = select_best(base, shifted, 24.0);
    CHECK(r2.chosen == r0.chosen);
}

TEST_CASE("exact score ties fall toward the smaller configuration", "[profiler]") {
    // same score for S and M by construction: pps = X / (24 - bpp)
    const double x = 1.0e9;
    std::vector<ProfileMeasurement> tied = {meas(SizeClass::M, x / (24.0 - 0.2045)),
                                            meas(SizeClass::S, x / (24.0 - 0.2303))};
    auto r = select_best(tied, fool_rates, 24.0);
    CHECK(r.grid[r.chosen].size_class == SizeClass::S);
    CHECK(r.tie_break == "size_class");

    auto a = meas(SizeClass::S, 1e7);
    auto b = meas(SizeClass::S, 1e7);
    a.batch_size = 4;
    b.batch_size = 2;
    auto r2 = select_best({a, b}, fool_rates, 24.0);
    CHECK(r2.grid[r2.chosen].batch_size == 2);
    CHECK(r2.tie_break == "batch_size");

    // failed cells never win
    auto c = meas(SizeClass::S, 9e9);
    c.ok = false;
    auto r3 = select_best({c, a}, fool_rates, 24.0);
    CHECK(r3.grid[r3.chosen].batch_size == 4);
}

TEST_CASE("codec profiles are validated", "[profiler]") {
    CodecProfile p{"x", {{"seg", 0.5}}, 10, "fixture"};
    CHECK_NOTHROW(p.validate(24.0));
    CHECK(p.mean_bpp() == 0.5);

    CodecProfile two{"x", {{"a", 0.2}, {"b", 0.4}}, 10, "measured"};
    CHECK(two.mean_bpp() == Catch::Approx(0.3));

    CodecProfile bad = p;
    bad.bpp_by_task["seg"] = 24.0;
    CHECK_THROWS_AS(bad.validate(24.0), std::invalid_argument);
    bad.bpp_by_task["seg"] = 0.0;
    CHECK_THROWS_AS(bad.validate(24.0), std::invalid_argument);
    CodecProfile odd = p;
    odd.source = "rumor";
    CHECK_THROWS_AS(odd.validate(24.0), std::invalid_argument);
}
