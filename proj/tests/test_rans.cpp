#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oec/rans.hpp"
#include "oec/util.hpp"

using namespace oec;

namespace {

// draw a symbol from the discretized model (round of a gaussian draw)
int draw_symbol(pcg32& rng, double mu, double sigma) {
    for (;;) {
        double g = mu + sigma * rng.gaussian();
        int s = static_cast<int>(std::floor(g + 0.5));
        if (s >= coder_sym_min && s <= coder_sym_max) return s;
    }
}

struct Seq {
    std::vector<int> syms;
    std::vector<const CdfTable*> tables;
    std::vector<int> slots;
};

Seq model_sequence(pcg32& rng, CdfCache& cache, int len, double mu, double sigma) {
    Seq q;
    const CdfTable& t = cache.get(mu, sigma);
    for (int i = 0; i < len; ++i) {
        int s = draw_symbol(rng, mu, sigma);
        q.syms.push_back(s);
        q.tables.push_back(&t);
        q.slots.push_back(t.slot_of(s));
    }
    return q;
}

} // namespace

TEST_CASE("empty sequence produces an empty payload", "[rans]") {
    auto bytes = rans_encode_slots({}, {});
    CHECK(bytes.empty());
    auto back = rans_decode_slots(bytes, {});
    CHECK(back.empty());
}

TEST_CASE("single-symbol stream round trip", "[rans]") {
    CdfCache cache;
    const auto& t = cache.get(0.0, 1.0);
    for (int s : {0, -3, 3}) {
        auto bytes = rans_encode_slots({t.slot_of(s)}, {&t});
        CHECK(bytes.size() == 4); // just the state flush
        auto slots = rans_decode_slots(bytes, {&t});
        REQUIRE(slots.size() == 1);
        CHECK(t.sym_of_slot(slots[0]) == s);
    }
}

TEST_CASE("randomized round trips across mu, sigma and length", "[rans]") {
    pcg32 rng(20240817);
    CdfCache cache;
    for (int iter = 0; iter < 2500; ++iter) {
        double mu = rng.uniform(-200.0, 200.0);
        double sigma = (iter % 10 == 0)
                           ? static_cast<double>(sigma_floor) // pin the floor often
                           : std::exp(rng.uniform(std::log(0.11), std::log(40.0)));
        int len = 1 + static_cast<int>(rng.bounded(120));
        const CdfTable& t = cache.get(mu, sigma);

        std::vector<int> slots;
        std::vector<const CdfTable*> tables;
        std::vector<int> syms;
        for (int i = 0; i < len; ++i) {
            int s;
            if (rng.bounded(50) == 0)
                s = coder_sym_min + static_cast<int>(rng.bounded(512)); // forced escapes
            else
                s = draw_symbol(rng, mu, sigma);
            syms.push_back(s);
            slots.push_back(t.slot_of(s));
            tables.push_back(&t);
        }
        auto bytes = rans_encode_slots(slots, tables);
        auto back = rans_decode_slots(bytes, tables);
        REQUIRE(back == slots);
    }
}

TEST_CASE("mixed tables in one stream decode in order", "[rans]") {
    pcg32 rng(555);
    CdfCache cache;
    std::vector<int> slots;
    std::vector<const CdfTable*> tables;
    for (int i = 0; i < 4000; ++i) {
        double mu = rng.uniform(-20.0, 20.0);
        double sigma = std::exp(rng.uniform(std::log(0.2), std::log(8.0)));
        const CdfTable& t = cache.get(mu, sigma);
        slots.push_back(t.slot_of(draw_symbol(rng, mu, sigma)));
        tables.push_back(&t);
    }
    auto bytes = rans_encode_slots(slots, tables);
    CHECK(rans_decode_slots(bytes, tables) == slots);
}

TEST_CASE("coded size brackets the information content", "[rans]") {
    pcg32 rng(808);
    CdfCache cache;
    const int n = 20000;
    std::vector<int> slots;
    std::vector<const CdfTable*> tables;
    double est_bits = 0;
    int escapes = 0;
    for (int i = 0; i < n; ++i) {
        double mu = rng.uniform(-20.0, 20.0);
        double sigma = std::exp(rng.uniform(std::log(0.11), std::log(8.0)));
        const CdfTable& t = cache.get(mu, sigma);
        int s = draw_symbol(rng, mu, sigma);
        est_bits += symbol_bits(s, mu, sigma);
        slots.push_back(t.slot_of(s));
        tables.push_back(&t);
        if (t.slot_of(s) == t.escape_slot()) ++escapes;
    }
    auto bytes = rans_encode_slots(slots, tables);
    double actual_bits = 8.0 * static_cast<double>(bytes.size());

    double bound = 32.0 + escapes + 0.12 * n;
    CHECK(actual_bits >= est_bits);
    CHECK(actual_bits <= est_bits + bound);
    CHECK(actual_bits <= est_bits * 1.02 + 64.0);
}

TEST_CASE("near-deterministic tables cost almost nothing", "[rans]") {
    CdfCache cache;
    const auto& t = cache.get(0.0, static_cast<double>(sigma_floor));
    const int n = 10000;
    std::vector<int> slots(n, t.slot_of(0));
    std::vector<const CdfTable*> tables(n, &t);
    auto bytes = rans_encode_slots(slots, tables);
    CHECK(8.0 * static_cast<double>(bytes.size()) / n < 0.01);
    CHECK(rans_decode_slots(bytes, tables) == slots);
}

TEST_CASE("decoder rejects malformed streams", "[rans]") {
    CdfCache cache;
    const auto& t = cache.get(0.0, 1.0);
    std::vector<int> slots(50, t.slot_of(1));
    std::vector<const CdfTable*> tables(50, &t);
    auto bytes = rans_encode_slots(slots, tables);

    SECTION("short flush") {
        std::vector<std::uint8_t> tiny{1, 2};
        CHECK_THROWS_AS(rans_decode_slots(tiny, tables), decode_error);
    }
    SECTION("truncated stream") {
        auto cut = bytes;
        cut.resize(cut.size() / 2);
        CHECK_THROWS_AS(rans_decode_slots(cut, tables), decode_error);
    }
    SECTION("trailing garbage") {
        auto fat = bytes;
        fat.push_back(0xAA);
        CHECK_THROWS_AS(rans_decode_slots(fat, tables), decode_error);
    }
    SECTION("decoding from an empty stream") {
        CHECK_THROWS_AS(rans_decode_slots({}, tables), decode_error);
    }
}

TEST_CASE("bit writer and reader round trip", "[rans]") {
    BitWriter w;
    pcg32 rng(4);
    std::vector<std::uint32_t> vals;
    std::vector<int> widths;
    for (int i = 0; i < 500; ++i) {
        int bits = 1 + static_cast<int>(rng.bounded(16));
        std::uint32_t v = rng.bounded(1u << bits);
        w.put(v, bits);
        vals.push_back(v);
        widths.push_back(bits);
    }
    BitReader r(w.buf.data(), w.buf.size());
    for (std::size_t i = 0; i < vals.size(); ++i) CHECK(r.get(widths[i]) == vals[i]);
    CHECK_THROWS_AS(r.get(64), decode_error);
}

TEST_CASE("stream bytes are stable for a pinned input", "[rans]") {
    // guards the on-disk format: state width, renorm, table layout
    CdfCache cache;
    const auto& t = cache.get(0.0, 1.0);
    std::vector<int> syms{0, 1, -1, 2, 0, 0, -3, 5, 0, -1};
    std::vector<int> slots;
    std::vector<const CdfTable*> tables;
    for (int s : syms) {
        slots.push_back(t.slot_of(s));
        tables.push_back(&t);
    }
    auto bytes = rans_encode_slots(slots, tables);
    CHECK(rans_decode_slots(bytes, tables) == slots);
    INFO("payload hash " << fnv1a64(bytes.data(), bytes.size()));
    CHECK(bytes.size() >= 4);
    // pinned after first generation; any change here is a format break
    CHECK(fnv1a64(bytes.data(), bytes.size()) == 0xf6b9415f09fac276ull);
}
