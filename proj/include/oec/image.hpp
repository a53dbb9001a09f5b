#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oec/util.hpp"

namespace oec {

// Interleaved row-major sample buffer. Samples are held as uint16 whatever
// the declared depth; depth {8,12,16} bounds the legal sample range.
struct ImageBuffer {
    int height = 0;
    int width = 0;
    int channels = 0;
    int bit_depth = 8;
    std::vector<std::uint16_t> data;

    ImageBuffer() = default;
    ImageBuffer(int h, int w, int c, int depth = 8)
        : height(h), width(w), channels(c), bit_depth(depth),
          data(static_cast<std::size_t>(h) * w * c, 0) {}

    std::uint16_t& at(int r, int c, int ch) {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    std::uint16_t at(int r, int c, int ch) const {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }

    std::uint16_t max_sample_value() const {
        return static_cast<std::uint16_t>((1u << bit_depth) - 1u);
    }

    void validate() const {
        if (height < 1 || width < 1 || channels < 1)
            throw std::invalid_argument("ImageBuffer: dims must be >= 1");
        if (bit_depth != 8 && bit_depth != 12 && bit_depth != 16)
            throw std::invalid_argument("ImageBuffer: bit_depth must be 8, 12 or 16");
        if (data.size() != static_cast<std::size_t>(height) * width * channels)
            throw std::invalid_argument("ImageBuffer: data length != h*w*c");
    }

    bool operator==(const ImageBuffer& o) const {
        return height == o.height && width == o.width && channels == o.channels &&
               bit_depth == o.bit_depth && data == o.data;
    }
};

// ---- raw planar container (band-sequential samples + JSON sidecar) ----
//
// <path>      : channel 0 plane, then channel 1, ... ; u8 when depth == 8,
//               else u16 little-endian
// <path>.json : {"height","width","channels","bit_depth"}

inline void write_raw_planar(const ImageBuffer& img, const std::string& path) {
    img.validate();
    std::vector<std::uint8_t> out;
    const std::size_t plane = static_cast<std::size_t>(img.height) * img.width;
    out.reserve(plane * img.channels * (img.bit_depth == 8 ? 1 : 2));
    for (int ch = 0; ch < img.channels; ++ch)
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c) {
                std::uint16_t v = img.at(r, c, ch);
                out.push_back(static_cast<std::uint8_t>(v & 0xFF));
                if (img.bit_depth != 8)
                    out.push_back(static_cast<std::uint8_t>(v >> 8));
            }
    write_file(path, out);

    nlohmann::json j;
    j["height"] = img.height;
    j["width"] = img.width;
    j["channels"] = img.channels;
    j["bit_depth"] = img.bit_depth;
    write_text_file(path + ".json", j.dump(2) + "\n");
}

inline ImageBuffer read_raw_planar(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path + ".json"));
    } catch (const nlohmann::json::exception& e) {
        throw decode_error(std::string("bad raw sidecar: ") + e.what());
    }
    ImageBuffer img(j.at("height").get<int>(), j.at("width").get<int>(),
                    j.at("channels").get<int>(), j.at("bit_depth").get<int>());
    img.validate();

    auto raw = read_file(path);
    const std::size_t plane = static_cast<std::size_t>(img.height) * img.width;
    const std::size_t bytes_per = img.bit_depth == 8 ? 1 : 2;
    if (raw.size() != plane * img.channels * bytes_per)
        throw decode_error("raw plane size disagrees with sidecar dims");

    std::size_t pos = 0;
    for (int ch = 0; ch < img.channels; ++ch)
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c) {
                std::uint16_t v = raw[pos++];
                if (bytes_per == 2) v |= static_cast<std::uint16_t>(raw[pos++]) << 8;
                img.at(r, c, ch) = v;
            }
    return img;
}

} // namespace oec
