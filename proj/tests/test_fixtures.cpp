#include <catch2/catch_amalgamated.hpp>

#include "oec/fixtures.hpp"

#include <set>

using namespace oec;
using Catch::Matchers::WithinRel;

TEST_CASE("link fixtures carry their published per-pass volumes", "[fixtures]") {
    CHECK(link_capacity_bytes(fixtures::link("worldview-3")) == 90e9);
    CHECK(link_capacity_bytes(fixtures::link("dove")) == 12.0e9);
    CHECK(link_capacity_bytes(fixtures::link("sentinel-2")) == 40.0e9);
    CHECK(link_capacity_bytes(fixtures::link("landsat-8")) == 39.6e9);
    for (const auto& l : fixtures::links()) CHECK_NOTHROW(l.validate());
    CHECK_THROWS_AS(fixtures::link("iridium"), std::invalid_argument);
}

TEST_CASE("codec rate cards average to the published means", "[fixtures]") {
    auto fool = fixtures::codec_family("fool");
    auto bsvbi = fixtures::codec_family("bsvbi");
    REQUIRE(fool.size() == 3);
    REQUIRE(bsvbi.size() == 3);
    CHECK_THAT(fool.at(SizeClass::S).mean_bpp(), WithinRel(0.2303, 1e-9));
    CHECK_THAT(fool.at(SizeClass::M).mean_bpp(), WithinRel(0.2045, 1e-9));
    CHECK_THAT(fool.at(SizeClass::L).mean_bpp(), WithinRel(0.180833333333, 1e-9));
    CHECK_THAT(bsvbi.at(SizeClass::S).mean_bpp(), WithinRel(0.388333333333, 1e-9));
    CHECK_THAT(bsvbi.at(SizeClass::M).mean_bpp(), WithinRel(0.3693, 1e-9));
    CHECK_THAT(bsvbi.at(SizeClass::L).mean_bpp(), WithinRel(0.350466666667, 1e-9));
    for (const auto& [fam, classes] : fixtures::codec_families())
        for (const auto& [cls, p] : classes) CHECK_NOTHROW(p.validate(24.0));
    CHECK_THROWS_AS(fixtures::codec_family("jpeg2000"), std::invalid_argument);

    // every small-class mean buys at least the headline 100x on 24 bpp raw
    for (auto cls : {SizeClass::S, SizeClass::M, SizeClass::L})
        CHECK(24.0 / fool.at(cls).mean_bpp() > 100.0);
}

TEST_CASE("device fixtures match the recovered calibrations", "[fixtures]") {
    for (const auto& d : fixtures::devices()) CHECK_NOTHROW(d.validate());
    CHECK_THAT(fixtures::device("orin-nano").calibrated_pps, WithinRel(5.63154e7, 1e-4));
    CHECK_THAT(fixtures::device("xavier-nx").calibrated_pps, WithinRel(5.64668e7, 1e-4));
    CHECK_THAT(fixtures::device("tx2").calibrated_pps, WithinRel(1.71441e7, 1e-4));
    CHECK(fixtures::device("orin-nano").compute_power_w == 15.0);
    CHECK_THROWS_AS(fixtures::device("raspberry-pi"), std::invalid_argument);
}

TEST_CASE("mission fixtures simulate out of the box", "[fixtures]") {
    for (const auto& [name, m] : fixtures::missions()) {
        INFO(name);
        CHECK_NOTHROW(m.validate());
        auto r = simulate_pass(m);
        CHECK(r.raw_equivalent_bytes > 0.0);
        CHECK(r.gain_factor >= 1.0);
        auto r2 = simulate_pass(m);
        CHECK(r.raw_equivalent_bytes == r2.raw_equivalent_bytes);
    }
    CHECK_THROWS_AS(fixtures::mission("apollo"), std::invalid_argument);
}

TEST_CASE("the fixture catalog is complete and unambiguous", "[fixtures]") {
    auto all = fixtures::list_all();
    CHECK(all.size() >= 15);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& f : all) {
        CHECK(!f.summary.empty());
        CHECK(seen.insert({f.kind, f.name}).second); // kind+name unique
    }
    std::set<std::string> kinds;
    for (const auto& f : all) kinds.insert(f.kind);
    CHECK(kinds == std::set<std::string>{"codec", "device", "link", "mission", "sensor"});
}
