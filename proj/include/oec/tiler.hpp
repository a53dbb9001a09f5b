#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "oec/image.hpp"

namespace oec {

inline constexpr int default_max_tile_size = 4096;

struct TileOrigin {
    int image_id = 0;
    int row = 0; // tile-grid coordinates, not pixels
    int col = 0;
    bool operator==(const TileOrigin&) const = default;
};

struct TilePad {
    int bottom = 0;
    int right = 0;
    bool operator==(const TilePad&) const = default;
};

// Square tiles in row-major partitioning order plus enough provenance to
// invert the partition.
struct TileBatch {
    std::vector<ImageBuffer> tiles;
    std::vector<TileOrigin> origin;
    std::vector<TilePad> pad;
    int tile_size = 0;
    int group_len = 1;

    void validate() const {
        if (tiles.size() != origin.size() || tiles.size() != pad.size())
            throw std::invalid_argument("TileBatch: parallel arrays disagree");
        if (group_len < 1)
            throw std::invalid_argument("TileBatch: group_len must be >= 1");
        for (const auto& t : tiles) {
            t.validate();
            if (t.height != tile_size || t.width != tile_size)
                throw std::invalid_argument("TileBatch: tiles must be tile_size square");
        }
    }
};

inline TileBatch partition(const ImageBuffer& image, int tile_size, int image_id = 0,
                           int max_tile_size = default_max_tile_size) {
    image.validate();
    if (tile_size < 1)
        throw std::invalid_argument("partition: tile_size must be >= 1");
    if (tile_size > max_tile_size)
        throw std::invalid_argument("partition: tile_size exceeds maximum");

    const int rows = (image.height + tile_size - 1) / tile_size;
    const int cols = (image.width + tile_size - 1) / tile_size;

    TileBatch b;
    b.tile_size = tile_size;
    b.tiles.reserve(static_cast<std::size_t>(rows) * cols);
    for (int tr = 0; tr < rows; ++tr)
        for (int tc = 0; tc < cols; ++tc) {
            ImageBuffer t(tile_size, tile_size, image.channels, image.bit_depth);
            const int r0 = tr * tile_size, c0 = tc * tile_size;
            const int vh = std::min(tile_size, image.height - r0);
            const int vw = std::min(tile_size, image.width - c0);
            for (int r = 0; r < vh; ++r)
                for (int c = 0; c < vw; ++c)
                    for (int ch = 0; ch < image.channels; ++ch)
                        t.at(r, c, ch) = image.at(r0 + r, c0 + c, ch);
            // remaining samples stay zero (value-initialized)
            b.tiles.push_back(std::move(t));
            b.origin.push_back({image_id, tr, tc});
            b.pad.push_back({tile_size - vh, tile_size - vw});
        }
    return b;
}

// Consecutive runs of group_len tile indices in partitioning order. A short
// final run is completed by wrapping around to the batch start (cyclic fill
// keeps inference deterministic).
inline std::vector<std::vector<std::size_t>> group_sequence(const TileBatch& batch,
                                                            int group_len) {
    if (group_len < 1)
        throw std::invalid_argument("group_sequence: group_len must be >= 1");
    batch.validate();
    const std::size_t n = batch.tiles.size();
    std::vector<std::vector<std::size_t>> groups;
    if (n == 0) return groups;
    const std::size_t g = static_cast<std::size_t>(group_len);
    for (std::size_t start = 0; start < n; start += g) {
        std::vector<std::size_t> grp;
        grp.reserve(g);
        for (std::size_t k = start; k < start + g; ++k) grp.push_back(k % n);
        groups.push_back(std::move(grp));
    }
    return groups;
}

inline ImageBuffer reassemble(const TileBatch& batch, int height, int width) {
    batch.validate();
    if (height < 1 || width < 1)
        throw std::invalid_argument("reassemble: dims must be >= 1");
    if (batch.tiles.empty())
        throw std::invalid_argument("reassemble: empty batch");

    const int ts = batch.tile_size;
    const int rows = (height + ts - 1) / ts;
    const int cols = (width + ts - 1) / ts;
    if (batch.tiles.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("reassemble: tile count disagrees with dims");

    ImageBuffer out(height, width, batch.tiles[0].channels, batch.tiles[0].bit_depth);
    for (std::size_t i = 0; i < batch.tiles.size(); ++i) {
        const auto& t = batch.tiles[i];
        const auto& o = batch.origin[i];
        if (o.row >= rows || o.col >= cols)
            throw std::invalid_argument("reassemble: tile origin outside grid");
        const int r0 = o.row * ts, c0 = o.col * ts;
        const int vh = std::min(ts, height - r0);
        const int vw = std::min(ts, width - c0);
        for (int r = 0; r < vh; ++r)
            for (int c = 0; c < vw; ++c)
                for (int ch = 0; ch < out.channels; ++ch)
                    out.at(r0 + r, c0 + c, ch) = t.at(r, c, ch);
    }
    return out;
}

} // namespace oec
