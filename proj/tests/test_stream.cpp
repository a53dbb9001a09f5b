#include <catch2/catch_amalgamated.hpp>

#include "oec/stream.hpp"
#include "oec/util.hpp"

#include <algorithm>
#include <cmath>

using namespace oec;
using Catch::Matchers::WithinRel;

namespace {

ImageBuffer noise_tile(int size, int channels, std::uint64_t seed) {
    ImageBuffer t(size, size, channels, 8);
    pcg32 rng(seed);
    for (auto& v : t.data) v = static_cast<std::uint16_t>(rng.bounded(256));
    return t;
}

} // namespace

TEST_CASE("bits per pixel", "[stream]") {
    CHECK(bpp(1, 8) == 1.0);
    CHECK(bpp(300, 600 * 600) == Catch::Approx(8.0 * 300 / 360000.0));
    CHECK(bpp(200, 100) == 2.0 * bpp(100, 100));
    CHECK_THROWS_AS(bpp(10, 0), std::invalid_argument);
}

TEST_CASE("latents round trip through the bitstream", "[stream]") {
    auto w = init_weights(make_spec(SizeClass::S, 91));
    auto a = encode_tile(noise_tile(96, 3, 92), w, {4, 0, 1});
    auto bytes = encode_artifacts(a, w);

    SECTION("self-contained decode reproduces the artifacts") {
        auto back = decode_stream(bytes);
        CHECK(back == a);
        CHECK(verify_stream(bytes, a));
    }
    SECTION("decode with caller-provided weights") {
        auto s = parse_stream(bytes);
        CHECK(s.seed == 91);
        CHECK(s.tile == TileOrigin{4, 0, 1});
        auto back = decode_stream_with(s, w);
        CHECK(back == a);
    }
    SECTION("coded size brackets the estimate") {
        // On raw latents the analytic estimate is only an upper bound: a
        // symbol far outside its table alphabet is charged its full Gaussian
        // cost by the estimate but coded as a cheap escape (slot + 9 bits).
        {
            double est = estimate_bits(a);
            auto s = parse_stream(bytes);
            double actual =
                8.0 * static_cast<double>(s.payload.size() + s.bypass.size());
            double n = static_cast<double>(a.y_hat.data.size() + a.z_hat.data.size());
            CHECK(actual <= est + 32.0 + 9.0 * s.n_escape + 0.12 * n);
        }
        // When the main latents really are drawn from the conditional model,
        // the bracket is tight in both directions.
        {
            auto b = a;
            pcg32 rng(515);
            for (std::size_t i = 0; i < b.y_hat.data.size(); ++i) {
                double v = b.mu.data[i] + b.sigma.data[i] * rng.gaussian();
                b.y_hat.data[i] = static_cast<std::int32_t>(std::clamp<long>(
                    std::lround(v), coder_sym_min, coder_sym_max));
            }
            auto sb = parse_stream(encode_artifacts(b, w));
            double est = estimate_bits(b);
            double actual =
                8.0 * static_cast<double>(sb.payload.size() + sb.bypass.size());
            CHECK(actual >= est * 0.98 - 96.0);
            CHECK(actual <= est * 1.03 + 96.0);
        }
    }
}

TEST_CASE("escape symbols survive the round trip", "[stream]") {
    auto w = init_weights(make_spec(SizeClass::S, 17));
    auto a = encode_tile(noise_tile(64, 3, 18), w);

    // inject extreme hyper-latents, then keep mu/sigma consistent with them
    a.z_hat.data[0] = 231;
    a.z_hat.data[1] = -256;
    a.z_hat.data[2] = 40;
    auto [mu, sigma] = hyper_synthesis(a.z_hat, w, a.y_hat.h, a.y_hat.w);
    a.mu = std::move(mu);
    a.sigma = std::move(sigma);
    // and a main latent far outside its table alphabet
    a.y_hat.data[0] = 255;
    a.y_hat.data[1] = -256;

    auto bytes = encode_artifacts(a, w);
    auto s = parse_stream(bytes);
    CHECK(s.n_escape >= 5);
    CHECK(!s.bypass.empty());
    auto back = decode_stream(bytes);
    CHECK(back == a);
}

TEST_CASE("symbols outside the 9-bit domain are rejected", "[stream]") {
    auto w = init_weights(make_spec(SizeClass::S, 23));
    auto a = encode_tile(noise_tile(64, 3, 24), w);
    a.y_hat.data[5] = 256; // one past the domain edge
    CHECK_THROWS_AS(encode_artifacts(a, w), std::invalid_argument);
    a.y_hat.data[5] = -257;
    CHECK_THROWS_AS(encode_artifacts(a, w), std::invalid_argument);
}

TEST_CASE("mismatched mu/sigma provenance is rejected", "[stream]") {
    auto w = init_weights(make_spec(SizeClass::S, 31));
    auto a = encode_tile(noise_tile(64, 3, 32), w);
    a.mu.data[0] += 1.0f;
    CHECK_THROWS_AS(encode_artifacts(a, w), std::invalid_argument);

    auto w2 = init_weights(make_spec(SizeClass::S, 99));
    auto b = encode_tile(noise_tile(64, 3, 32), w);
    CHECK_THROWS_AS(encode_artifacts(b, w2), std::invalid_argument);
}

TEST_CASE("corrupt streams are detected", "[stream]") {
    auto w = init_weights(make_spec(SizeClass::S, 41));
    auto a = encode_tile(noise_tile(64, 3, 42), w);
    auto bytes = encode_artifacts(a, w);

    SECTION("payload byte flip") {
        auto bad = bytes;
        bad[100] ^= 0x40;
        CHECK_THROWS_AS(decode_stream(bad), decode_error);
    }
    SECTION("header byte flip") {
        auto bad = bytes;
        bad[9] ^= 0x01;
        CHECK_THROWS_AS(decode_stream(bad), decode_error);
    }
    SECTION("truncation") {
        auto bad = bytes;
        bad.resize(bad.size() - 3);
        CHECK_THROWS_AS(decode_stream(bad), decode_error);
    }
    SECTION("bad magic") {
        auto bad = bytes;
        bad[0] = 'Z';
        CHECK_THROWS_AS(decode_stream(bad), decode_error);
    }
    SECTION("verify flags a different artifact") {
        auto other = a;
        other.y_hat.data[0] += 1;
        CHECK_FALSE(verify_stream(bytes, other));
    }
}

TEST_CASE("encoding is a pure function of the artifacts", "[stream]") {
    auto w = init_weights(make_spec(SizeClass::S, 51));
    auto a = encode_tile(noise_tile(80, 3, 52), w);
    auto b1 = encode_artifacts(a, w);
    auto b2 = encode_artifacts(a, w);
    CHECK(b1 == b2);
}

TEST_CASE("stream reports a plausible compressed size", "[stream]") {
    auto w = init_weights(make_spec(SizeClass::S, 61));
    auto tile = noise_tile(128, 3, 62);
    auto a = encode_tile(tile, w);
    auto bytes = encode_artifacts(a, w);
    // far smaller than the raw artifact tensors it encodes
    auto lat = serialize_artifacts(a);
    CHECK(bytes.size() * 3 < lat.size());
    double rate = bpp(bytes.size(), static_cast<std::size_t>(tile.height) * tile.width);
    CHECK(rate > 0.0);
    CHECK(rate < 24.0);
}
