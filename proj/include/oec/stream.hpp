#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oec/gaussian.hpp"
#include "oec/rans.hpp"
#include "oec/toy_codec.hpp"
#include "oec/util.hpp"
#include "oec/version.hpp"

namespace oec {

inline double bpp(std::size_t stream_bytes, std::size_t pixel_count) {
    if (pixel_count == 0) throw std::invalid_argument("bpp: zero pixels");
    return 8.0 * static_cast<double>(stream_bytes) / static_cast<double>(pixel_count);
}

// Parsed .fenc header. On the wire (all LE):
//   magic "FENC" | version u16 | flags u16 | seed u64
//   size_class u8 | in_channels u8 | reserved u16
//   image_id i32 | tile_row i32 | tile_col i32 | tile_size i32
//   y c,h,w u16x3 | z c,h,w u16x3
//   sym_min i16 | sym_max i16 | sigma_z f32 | n_escape u32
//   payload_len u32 | bypass_len u32
//   payload_crc u32 (over payload||bypass) | header_crc u32
// followed by the rANS payload, then the raw-bit bypass section.
struct EncodedStream {
    std::uint64_t seed = 0;
    SizeClass size_class = SizeClass::S;
    int in_channels = 3;
    TileOrigin tile;
    int tile_size = 0;
    int y_c = 0, y_h = 0, y_w = 0;
    int z_c = 0, z_h = 0, z_w = 0;
    int sym_min = coder_sym_min;
    int sym_max = coder_sym_max;
    float sigma_z = static_cast<float>(default_sigma_z);
    std::uint32_t n_escape = 0;
    std::vector<std::uint8_t> payload;
    std::vector<std::uint8_t> bypass;
};

namespace detail {

inline constexpr char fenc_magic[4] = {'F', 'E', 'N', 'C'};
inline constexpr std::size_t fenc_header_size = 76;

inline std::uint8_t size_class_code(SizeClass c) {
    return static_cast<std::uint8_t>(c == SizeClass::S ? 0 : (c == SizeClass::M ? 1 : 2));
}
inline SizeClass size_class_from_code(std::uint8_t v) {
    if (v > 2) throw decode_error("bad size class code");
    return v == 0 ? SizeClass::S : (v == 1 ? SizeClass::M : SizeClass::L);
}

// Encode one symbol: in-alphabet symbols go through the table; everything
// else takes the escape slot plus 9 raw bits. The coder domain is the
// 9-bit two's complement range; anything outside it cannot round trip and
// is rejected.
inline void push_symbol(RansEncoder& enc, BitWriter& bypass, std::uint32_t& n_escape,
                        int sym, const CdfTable& t) {
    if (sym < coder_sym_min || sym > coder_sym_max)
        throw std::invalid_argument("encode: symbol outside the 9-bit coder domain");
    const int slot = t.slot_of(sym);
    enc.push(slot, t);
    if (slot == t.escape_slot()) {
        bypass.put(static_cast<std::uint32_t>(sym - coder_sym_min), 9);
        ++n_escape;
    }
}

inline int pull_symbol(RansDecoder& dec, BitReader& bypass, const CdfTable& t) {
    const int slot = dec.decode_slot(t);
    if (slot == t.escape_slot())
        return static_cast<int>(bypass.get(9)) + coder_sym_min;
    return t.sym_of_slot(slot);
}

} // namespace detail

inline std::vector<std::uint8_t> serialize_stream(const EncodedStream& s) {
    byte_writer w;
    w.bytes(detail::fenc_magic, 4);
    w.u16(static_cast<std::uint16_t>(format_version));
    w.u16(0);
    w.u64(s.seed);
    w.u8(detail::size_class_code(s.size_class));
    w.u8(static_cast<std::uint8_t>(s.in_channels));
    w.u16(0);
    w.i32(s.tile.image_id);
    w.i32(s.tile.row);
    w.i32(s.tile.col);
    w.i32(s.tile_size);
    w.u16(static_cast<std::uint16_t>(s.y_c));
    w.u16(static_cast<std::uint16_t>(s.y_h));
    w.u16(static_cast<std::uint16_t>(s.y_w));
    w.u16(static_cast<std::uint16_t>(s.z_c));
    w.u16(static_cast<std::uint16_t>(s.z_h));
    w.u16(static_cast<std::uint16_t>(s.z_w));
    w.i16(static_cast<std::int16_t>(s.sym_min));
    w.i16(static_cast<std::int16_t>(s.sym_max));
    w.f32(s.sigma_z);
    w.u32(s.n_escape);
    w.u32(static_cast<std::uint32_t>(s.payload.size()));
    w.u32(static_cast<std::uint32_t>(s.bypass.size()));
    std::uint32_t pc = ::crc32(0L, Z_NULL, 0);
    pc = ::crc32(pc, s.payload.data(), static_cast<uInt>(s.payload.size()));
    pc = ::crc32(pc, s.bypass.data(), static_cast<uInt>(s.bypass.size()));
    w.u32(static_cast<std::uint32_t>(pc));
    w.u32(crc32_of(w.buf));
    w.bytes(s.payload.data(), s.payload.size());
    w.bytes(s.bypass.data(), s.bypass.size());
    return std::move(w.buf);
}

inline EncodedStream parse_stream(const std::vector<std::uint8_t>& buf) {
    if (buf.size() < detail::fenc_header_size) throw decode_error("stream too short");
    {
        byte_reader hc(buf.data() + detail::fenc_header_size - 4, 4);
        if (hc.u32() != crc32_of(buf.data(), detail::fenc_header_size - 4))
            throw decode_error("stream header checksum mismatch");
    }
    byte_reader r(buf.data(), detail::fenc_header_size - 4);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, detail::fenc_magic, 4) != 0)
        throw decode_error("bad stream magic");
    if (r.u16() != format_version) throw decode_error("unsupported stream version");
    r.u16();

    EncodedStream s;
    s.seed = r.u64();
    s.size_class = detail::size_class_from_code(r.u8());
    s.in_channels = r.u8();
    r.u16();
    s.tile.image_id = r.i32();
    s.tile.row = r.i32();
    s.tile.col = r.i32();
    s.tile_size = r.i32();
    s.y_c = r.u16();
    s.y_h = r.u16();
    s.y_w = r.u16();
    s.z_c = r.u16();
    s.z_h = r.u16();
    s.z_w = r.u16();
    s.sym_min = r.i16();
    s.sym_max = r.i16();
    s.sigma_z = r.f32();
    s.n_escape = r.u32();
    const std::uint32_t payload_len = r.u32();
    const std::uint32_t bypass_len = r.u32();
    const std::uint32_t payload_crc = r.u32();

    if (buf.size() != detail::fenc_header_size + payload_len + bypass_len)
        throw decode_error("stream length disagrees with header");
    s.payload.assign(buf.begin() + detail::fenc_header_size,
                     buf.begin() + detail::fenc_header_size + payload_len);
    s.bypass.assign(buf.begin() + detail::fenc_header_size + payload_len, buf.end());
    std::uint32_t pc = ::crc32(0L, Z_NULL, 0);
    pc = ::crc32(pc, s.payload.data(), static_cast<uInt>(s.payload.size()));
    pc = ::crc32(pc, s.bypass.data(), static_cast<uInt>(s.bypass.size()));
    if (static_cast<std::uint32_t>(pc) != payload_crc)
        throw decode_error("stream payload checksum mismatch");
    if (s.sym_min != coder_sym_min || s.sym_max != coder_sym_max)
        throw decode_error("unsupported symbol domain");
    if (s.y_c < 1 || s.y_h < 1 || s.y_w < 1 || s.z_c < 1 || s.z_h < 1 || s.z_w < 1)
        throw decode_error("stream dims must be positive");
    return s;
}

// Entropy-code a tile's latents. The hyper latent is folded in first so the
// decoder can regenerate (mu, sigma) = h_s(z_hat) before it meets y; the
// tables the y symbols use are recomputed here from z_hat for the same
// reason, and must agree with the artifacts' own mu/sigma.
inline std::vector<std::uint8_t> encode_artifacts(const LatentArtifacts& a,
                                                  const EncoderWeights& w,
                                                  double sigma_z = default_sigma_z) {
    a.validate();
    if (w.spec.seed != a.seed)
        throw std::invalid_argument("encode_artifacts: weight seed disagrees with artifacts");
    if (a.y_hat.c != w.spec.latent_channels || a.z_hat.c != w.spec.hyper_channels)
        throw std::invalid_argument("encode_artifacts: channel counts disagree with weights");
    auto [mu, sigma] = hyper_synthesis(a.z_hat, w, a.y_hat.h, a.y_hat.w);
    if (!(mu == a.mu) || !(sigma == a.sigma))
        throw std::invalid_argument(
            "encode_artifacts: artifacts mu/sigma were not produced by these weights");

    CdfCache cache;
    const CdfTable& zt = cache.get(0.0, sigma_z);
    RansEncoder enc;
    BitWriter bypass;
    std::uint32_t n_escape = 0;
    for (auto v : a.z_hat.data)
        detail::push_symbol(enc, bypass, n_escape, v, zt);
    for (std::size_t i = 0; i < a.y_hat.data.size(); ++i) {
        const CdfTable& t = cache.get(a.mu.data[i], a.sigma.data[i]);
        detail::push_symbol(enc, bypass, n_escape, a.y_hat.data[i], t);
    }

    EncodedStream s;
    s.seed = a.seed;
    s.size_class = w.spec.size_class;
    s.in_channels = w.spec.in_channels;
    s.tile = a.tile;
    s.tile_size = a.tile_size;
    s.y_c = a.y_hat.c;
    s.y_h = a.y_hat.h;
    s.y_w = a.y_hat.w;
    s.z_c = a.z_hat.c;
    s.z_h = a.z_hat.h;
    s.z_w = a.z_hat.w;
    s.sigma_z = static_cast<float>(sigma_z);
    s.n_escape = n_escape;
    s.payload = enc.finish();
    s.bypass = std::move(bypass.buf);
    return serialize_stream(s);
}

// Full self-contained decode: weights are regenerated from the recorded
// (seed, size class, input channels).
inline LatentArtifacts decode_stream_with(const EncodedStream& s, const EncoderWeights& w) {
    if (w.spec.seed != s.seed || w.spec.size_class != s.size_class ||
        w.spec.in_channels != s.in_channels)
        throw std::invalid_argument("decode_stream_with: weights disagree with header");
    if (s.y_c != w.spec.latent_channels || s.z_c != w.spec.hyper_channels)
        throw decode_error("stream channel counts disagree with weights");

    CdfCache cache;
    RansDecoder dec(s.payload.data(), s.payload.size());
    BitReader bypass(s.bypass.data(), s.bypass.size());

    LatentArtifacts a;
    a.seed = s.seed;
    a.tile = s.tile;
    a.tile_size = s.tile_size;
    a.z_hat = ITensor3(s.z_c, s.z_h, s.z_w);
    const CdfTable& zt = cache.get(0.0, s.sigma_z);
    for (auto& v : a.z_hat.data) v = detail::pull_symbol(dec, bypass, zt);

    auto [mu, sigma] = hyper_synthesis(a.z_hat, w, s.y_h, s.y_w);
    a.mu = std::move(mu);
    a.sigma = std::move(sigma);

    a.y_hat = ITensor3(s.y_c, s.y_h, s.y_w);
    for (std::size_t i = 0; i < a.y_hat.data.size(); ++i) {
        const CdfTable& t = cache.get(a.mu.data[i], a.sigma.data[i]);
        a.y_hat.data[i] = detail::pull_symbol(dec, bypass, t);
    }
    dec.finish();
    if ((bypass.bitpos + 7) / 8 != s.bypass.size())
        throw decode_error("bypass section length mismatch");
    a.validate();
    return a;
}

inline LatentArtifacts decode_stream(const std::vector<std::uint8_t>& bytes) {
    EncodedStream s = parse_stream(bytes);
    auto w = init_weights(make_spec(s.size_class, s.seed, s.in_channels));
    return decode_stream_with(s, w);
}

// Re-decode and compare against the original artifacts.
inline bool verify_stream(const std::vector<std::uint8_t>& bytes, const LatentArtifacts& want) {
    return decode_stream(bytes) == want;
}

} // namespace oec
