#pragma once

#include <cstdio>
#include <csetjmp>
#include <memory>
#include <string>

#include <png.h>

#include "oec/image.hpp"
#include "oec/util.hpp"

namespace oec {

// PNG carries 8- or 16-bit samples, 1..4 channels. 12-bit buffers are
// widened to 16-bit files; the raw planar container keeps exact depth.

inline ImageBuffer read_png(const std::string& path) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "rb"),
                                                       &std::fclose);
    if (!fp) throw io_error("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw io_error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw io_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw decode_error("png decode failed: " + path);
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int depth = png_get_bit_depth(png, info);
    int color = png_get_color_type(png, info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (depth == 16) png_set_swap(png); // file is big-endian; we want host LE
    png_read_update_info(png, info);

    depth = png_get_bit_depth(png, info);
    int channels = png_get_channels(png, info);

    ImageBuffer img(static_cast<int>(h), static_cast<int>(w), channels,
                    depth == 16 ? 16 : 8);
    std::size_t stride = png_get_rowbytes(png, info);
    std::vector<std::uint8_t> row(stride);
    for (png_uint_32 r = 0; r < h; ++r) {
        png_read_row(png, row.data(), nullptr);
        for (png_uint_32 c = 0; c < w; ++c)
            for (int ch = 0; ch < channels; ++ch) {
                std::size_t i = (static_cast<std::size_t>(c) * channels + ch);
                std::uint16_t v;
                if (depth == 16)
                    v = static_cast<std::uint16_t>(row[2 * i] | (row[2 * i + 1] << 8));
                else
                    v = row[i];
                img.at(static_cast<int>(r), static_cast<int>(c), ch) = v;
            }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

inline void write_png(const ImageBuffer& img, const std::string& path) {
    img.validate();
    if (img.channels > 4)
        throw io_error("write_png: at most 4 channels");

    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"),
                                                       &std::fclose);
    if (!fp) throw io_error("cannot create " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw io_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw io_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw io_error("png encode failed: " + path);
    }

    int color = PNG_COLOR_TYPE_GRAY;
    if (img.channels == 2) color = PNG_COLOR_TYPE_GRAY_ALPHA;
    else if (img.channels == 3) color = PNG_COLOR_TYPE_RGB;
    else if (img.channels == 4) color = PNG_COLOR_TYPE_RGB_ALPHA;
    int file_depth = img.bit_depth == 8 ? 8 : 16;

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), file_depth, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (file_depth == 16) png_set_swap(png);

    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * img.channels *
                                  (file_depth / 8));
    for (int r = 0; r < img.height; ++r) {
        std::size_t o = 0;
        for (int c = 0; c < img.width; ++c)
            for (int ch = 0; ch < img.channels; ++ch) {
                std::uint16_t v = img.at(r, c, ch);
                row[o++] = static_cast<std::uint8_t>(v & 0xFF);
                if (file_depth == 16) row[o++] = static_cast<std::uint8_t>(v >> 8);
            }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace oec
