#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

namespace oec {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Corrupt or inconsistent serialized data (bad magic, CRC mismatch,
// truncated payload, coder desync).
struct decode_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::uint32_t crc32_of(const void* data, std::size_t n) {
    auto c = ::crc32(0L, Z_NULL, 0);
    return static_cast<std::uint32_t>(
        ::crc32(c, static_cast<const Bytef*>(data), static_cast<uInt>(n)));
}

inline std::uint32_t crc32_of(const std::vector<std::uint8_t>& v) {
    return crc32_of(v.data(), v.size());
}

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
    auto p = static_cast<const std::uint8_t*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

// Thread cap from OEC_BENCH_THREADS; 0 means "no cap set".
inline unsigned env_thread_cap() {
    const char* s = std::getenv("OEC_BENCH_THREADS");
    if (!s || !*s) return 0;
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || v < 1) return 0;
    return static_cast<unsigned>(v);
}

// ---- little-endian serialization -------------------------------------

struct byte_writer {
    std::vector<std::uint8_t> buf;

    void u8(std::uint8_t v) { buf.push_back(v); }
    void u16(std::uint16_t v) {
        buf.push_back(static_cast<std::uint8_t>(v));
        buf.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i16(std::int16_t v) { u16(static_cast<std::uint16_t>(v)); }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void bytes(const void* p, std::size_t n) {
        auto q = static_cast<const std::uint8_t*>(p);
        buf.insert(buf.end(), q, q + n);
    }
};

struct byte_reader {
    const std::uint8_t* p;
    std::size_t n;
    std::size_t pos = 0;

    byte_reader(const std::uint8_t* data, std::size_t size) : p(data), n(size) {}
    explicit byte_reader(const std::vector<std::uint8_t>& v) : p(v.data()), n(v.size()) {}

    void need(std::size_t k) const {
        if (pos + k > n) throw decode_error("truncated data");
    }
    std::uint8_t u8() { need(1); return p[pos++]; }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(p[pos] | (p[pos + 1] << 8));
        pos += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    std::int16_t i16() { return static_cast<std::int16_t>(u16()); }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    float f32() {
        std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    void bytes(void* out, std::size_t k) {
        need(k);
        std::memcpy(out, p + pos, k);
        pos += k;
    }
    std::size_t remaining() const { return n - pos; }
};

inline std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open " + path);
    f.seekg(0, std::ios::end);
    auto len = f.tellg();
    f.seekg(0);
    std::vector<std::uint8_t> v(static_cast<std::size_t>(len));
    if (len > 0) f.read(reinterpret_cast<char*>(v.data()), len);
    if (!f) throw io_error("short read on " + path);
    return v;
}

inline void write_file(const std::string& path, const void* data, std::size_t n) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot create " + path);
    f.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!f) throw io_error("short write on " + path);
}

inline void write_file(const std::string& path, const std::vector<std::uint8_t>& v) {
    write_file(path, v.data(), v.size());
}

inline std::string read_text_file(const std::string& path) {
    auto v = read_file(path);
    return std::string(v.begin(), v.end());
}

inline void write_text_file(const std::string& path, const std::string& s) {
    write_file(path, s.data(), s.size());
}

// Deterministic 64-bit PCG (PCG32 output, 64-bit state); used anywhere we
// need a seedable stream so results are identical across platforms.
struct pcg32 {
    std::uint64_t state = 0x853c49e6748fea9bull;
    std::uint64_t inc = 0xda3e39cb94b95bdbull;

    pcg32() = default;
    pcg32(std::uint64_t seed, std::uint64_t seq = 0x2f) {
        state = 0;
        inc = (seq << 1u) | 1u;
        next();
        state += seed;
        next();
    }
    std::uint32_t next() {
        std::uint64_t old = state;
        state = old * 6364136223846793005ull + inc;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32 - rot) & 31));
    }
    // Uniform in [0,1).
    double uniform() { return next() * (1.0 / 4294967296.0); }
    // Uniform in [lo,hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint32_t bounded(std::uint32_t bound) {
        // Lemire-style rejection keeps the draw unbiased.
        std::uint64_t m = static_cast<std::uint64_t>(next()) * bound;
        auto lo = static_cast<std::uint32_t>(m);
        if (lo < bound) {
            std::uint32_t t = (0u - bound) % bound;
            while (lo < t) {
                m = static_cast<std::uint64_t>(next()) * bound;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }
    double gaussian() {
        // Box-Muller; one draw discarded for determinism of call counts.
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 1e-12);
        double u2 = uniform();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }
};

} // namespace oec
