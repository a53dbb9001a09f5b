#pragma once

#include <cstdint>
#include <string>

#include "oec/tensor.hpp"
#include "oec/tiler.hpp"
#include "oec/util.hpp"
#include "oec/version.hpp"

namespace oec {

inline constexpr float sigma_floor = 0.11f;

// Everything a downstream entropy-coding stage needs, with enough
// provenance to place the tile back into its source image.
struct LatentArtifacts {
    ITensor3 y_hat;
    ITensor3 z_hat;
    Tensor3 mu;
    Tensor3 sigma;
    std::uint64_t seed = 0;
    TileOrigin tile;
    int tile_size = 0;

    void validate() const {
        if (!mu.same_shape(sigma) || mu.c != y_hat.c || mu.h != y_hat.h || mu.w != y_hat.w)
            throw std::invalid_argument("LatentArtifacts: mu/sigma must be shaped like y_hat");
        // hyper latent is the y grid downsampled 4x (ceiling at ragged edges)
        if (z_hat.h != (y_hat.h + 3) / 4 || z_hat.w != (y_hat.w + 3) / 4)
            throw std::invalid_argument("LatentArtifacts: z dims must be ceil(y dims / 4)");
        for (float s : sigma.data)
            if (!(s >= sigma_floor))
                throw std::invalid_argument("LatentArtifacts: sigma below floor");
    }

    bool operator==(const LatentArtifacts& o) const {
        return y_hat == o.y_hat && z_hat == o.z_hat && mu == o.mu && sigma == o.sigma &&
               seed == o.seed && tile == o.tile && tile_size == o.tile_size;
    }
};

// ---- .lat container --------------------------------------------------
// LE, magic "FOLA", fixed header, raw tensors, CRC32 trailer over the
// whole prefix. File size is exactly header + payload + 4.

namespace detail {
inline constexpr char lat_magic[4] = {'F', 'O', 'L', 'A'};
}

inline std::vector<std::uint8_t> serialize_artifacts(const LatentArtifacts& a) {
    a.validate();
    byte_writer w;
    w.bytes(detail::lat_magic, 4);
    w.u16(static_cast<std::uint16_t>(format_version));
    w.u16(0); // flags, reserved
    w.u64(a.seed);
    w.i32(a.tile.image_id);
    w.i32(a.tile.row);
    w.i32(a.tile.col);
    w.i32(a.tile_size);
    w.u16(static_cast<std::uint16_t>(a.y_hat.c));
    w.u16(static_cast<std::uint16_t>(a.y_hat.h));
    w.u16(static_cast<std::uint16_t>(a.y_hat.w));
    w.u16(static_cast<std::uint16_t>(a.z_hat.c));
    w.u16(static_cast<std::uint16_t>(a.z_hat.h));
    w.u16(static_cast<std::uint16_t>(a.z_hat.w));
    for (auto v : a.y_hat.data) w.i32(v);
    for (auto v : a.z_hat.data) w.i32(v);
    for (auto v : a.mu.data) w.f32(v);
    for (auto v : a.sigma.data) w.f32(v);
    w.u32(crc32_of(w.buf));
    return std::move(w.buf);
}

inline LatentArtifacts deserialize_artifacts(const std::vector<std::uint8_t>& buf) {
    if (buf.size() < 4 + 2 + 2 + 8 + 16 + 12 + 4)
        throw decode_error("artifact file too short");
    std::uint32_t stored;
    {
        byte_reader tail(buf.data() + buf.size() - 4, 4);
        stored = tail.u32();
    }
    if (stored != crc32_of(buf.data(), buf.size() - 4))
        throw decode_error("artifact checksum mismatch");

    byte_reader r(buf.data(), buf.size() - 4);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, detail::lat_magic, 4) != 0)
        throw decode_error("bad artifact magic");
    if (r.u16() != format_version) throw decode_error("unsupported artifact version");
    r.u16(); // flags

    LatentArtifacts a;
    a.seed = r.u64();
    a.tile.image_id = r.i32();
    a.tile.row = r.i32();
    a.tile.col = r.i32();
    a.tile_size = r.i32();
    int cy = r.u16(), yh = r.u16(), yw = r.u16();
    int cz = r.u16(), zh = r.u16(), zw = r.u16();
    if (cy < 1 || yh < 1 || yw < 1 || cz < 1 || zh < 1 || zw < 1)
        throw decode_error("artifact dims must be positive");
    a.y_hat = ITensor3(cy, yh, yw);
    a.z_hat = ITensor3(cz, zh, zw);
    a.mu = Tensor3(cy, yh, yw);
    a.sigma = Tensor3(cy, yh, yw);
    for (auto& v : a.y_hat.data) v = r.i32();
    for (auto& v : a.z_hat.data) v = r.i32();
    for (auto& v : a.mu.data) v = r.f32();
    for (auto& v : a.sigma.data) v = r.f32();
    if (r.remaining() != 0) throw decode_error("trailing bytes in artifact file");
    a.validate();
    return a;
}

inline std::size_t persist_artifacts(const LatentArtifacts& a, const std::string& path) {
    auto buf = serialize_artifacts(a);
    write_file(path, buf);
    return buf.size();
}

inline LatentArtifacts load_artifacts(const std::string& path) {
    return deserialize_artifacts(read_file(path));
}

} // namespace oec
