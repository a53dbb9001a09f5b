#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oec/artifacts.hpp"
#include "oec/image.hpp"
#include "oec/tensor.hpp"
#include "oec/tiler.hpp"
#include "oec/util.hpp"

namespace oec {

enum class SizeClass { S, M, L };

inline const char* to_string(SizeClass c) {
    switch (c) {
        case SizeClass::S: return "S";
        case SizeClass::M: return "M";
        case SizeClass::L: return "L";
    }
    return "?";
}

inline SizeClass size_class_from_string(const std::string& s) {
    if (s == "S" || s == "s") return SizeClass::S;
    if (s == "M" || s == "m") return SizeClass::M;
    if (s == "L" || s == "l") return SizeClass::L;
    throw std::invalid_argument("unknown size class: " + s);
}

// Encoder-side parameter budget each class is tuned to (within 10%).
inline double size_class_target_params(SizeClass c) {
    switch (c) {
        case SizeClass::S: return 0.35e6;
        case SizeClass::M: return 0.69e6;
        case SizeClass::L: return 1.19e6;
    }
    return 0;
}

struct ToyEncoderSpec {
    SizeClass size_class = SizeClass::S;
    std::array<int, 4> widths{32, 48, 72, 96}; // per-stage channels of g_a
    int hyper_width = 48;                      // hidden width of h_a / h_s
    int latent_channels = 48;                  // C_y
    int hyper_channels = 32;                   // C_z
    int in_channels = 3;
    int downsample_factor = 16;                // g_a; h_a adds another 4
    std::uint64_t seed = 0;

    void validate() const;
};

// 3x3 conv weights: k laid out [cout][cin][ky][kx].
struct ConvLayer {
    int cin = 0, cout = 0, stride = 1;
    std::vector<float> k;
    std::vector<float> b;
};

inline std::size_t conv_param_count(int cin, int cout) {
    return static_cast<std::size_t>(cout) * (9 * static_cast<std::size_t>(cin) + 1);
}

// g_a: four (stride-2 + refine) pairs then a 1-stride projection to C_y.
// h_a: two stride-2 layers then a projection to C_z.
// h_s mirrors h_a with nearest-neighbor upsampling (not counted below:
// parameter targets describe the g_a + h_a encoder side).
inline std::size_t encoder_param_count(const ToyEncoderSpec& s) {
    const auto& w = s.widths;
    std::size_t ga = conv_param_count(s.in_channels, w[0]) + conv_param_count(w[0], w[0]) +
                     conv_param_count(w[0], w[1]) + conv_param_count(w[1], w[1]) +
                     conv_param_count(w[1], w[2]) + conv_param_count(w[2], w[2]) +
                     conv_param_count(w[2], w[3]) + conv_param_count(w[3], w[3]) +
                     conv_param_count(w[3], s.latent_channels);
    std::size_t ha = conv_param_count(s.latent_channels, s.hyper_width) +
                     conv_param_count(s.hyper_width, s.hyper_width) +
                     conv_param_count(s.hyper_width, s.hyper_channels);
    return ga + ha;
}

inline void ToyEncoderSpec::validate() const {
    for (int w : widths)
        if (w < 1) throw std::invalid_argument("ToyEncoderSpec: widths must be positive");
    if (hyper_width < 1 || latent_channels < 1 || hyper_channels < 1 || in_channels < 1)
        throw std::invalid_argument("ToyEncoderSpec: channel counts must be positive");
    if (downsample_factor != 16)
        throw std::invalid_argument("ToyEncoderSpec: downsample_factor is fixed at 16");
    double target = size_class_target_params(size_class);
    double count = static_cast<double>(encoder_param_count(*this));
    if (std::abs(count - target) / target > 0.10)
        throw std::invalid_argument("ToyEncoderSpec: parameter count misses class target");
}

inline ToyEncoderSpec make_spec(SizeClass cls, std::uint64_t seed, int in_channels = 3) {
    ToyEncoderSpec s;
    s.size_class = cls;
    s.seed = seed;
    s.in_channels = in_channels;
    switch (cls) {
        case SizeClass::S:
            s.widths = {32, 48, 72, 96};
            s.hyper_width = 48;
            break;
        case SizeClass::M:
            s.widths = {48, 72, 96, 128};
            s.hyper_width = 80;
            break;
        case SizeClass::L:
            s.widths = {64, 96, 128, 176};
            s.hyper_width = 96;
            break;
    }
    s.validate();
    return s;
}

struct EncoderWeights {
    ToyEncoderSpec spec;
    std::vector<ConvLayer> ga;
    std::vector<ConvLayer> ha;
    std::vector<ConvLayer> hs;
};

namespace detail {

inline ConvLayer make_layer(pcg32& rng, int cin, int cout, int stride, float gain) {
    ConvLayer L;
    L.cin = cin;
    L.cout = cout;
    L.stride = stride;
    L.k.resize(static_cast<std::size_t>(cout) * cin * 9);
    L.b.resize(static_cast<std::size_t>(cout));
    // He-uniform limit over the 3x3 fan-in keeps activations O(1) deep in
    // the stack; heads widen it via gain.
    float limit = gain * std::sqrt(6.0f / (9.0f * static_cast<float>(cin)));
    for (auto& v : L.k) v = static_cast<float>(rng.uniform(-limit, limit));
    for (auto& v : L.b) v = static_cast<float>(rng.uniform(-0.05, 0.05));
    return L;
}

} // namespace detail

inline EncoderWeights init_weights(const ToyEncoderSpec& spec) {
    spec.validate();
    EncoderWeights w;
    w.spec = spec;
    pcg32 rng(spec.seed, 0x0ec);
    const auto& ws = spec.widths;

    w.ga.push_back(detail::make_layer(rng, spec.in_channels, ws[0], 2, 1.0f));
    w.ga.push_back(detail::make_layer(rng, ws[0], ws[0], 1, 1.0f));
    w.ga.push_back(detail::make_layer(rng, ws[0], ws[1], 2, 1.0f));
    w.ga.push_back(detail::make_layer(rng, ws[1], ws[1], 1, 1.0f));
    w.ga.push_back(detail::make_layer(rng, ws[1], ws[2], 2, 1.0f));
    w.ga.push_back(detail::make_layer(rng, ws[2], ws[2], 1, 1.0f));
    w.ga.push_back(detail::make_layer(rng, ws[2], ws[3], 2, 1.0f));
    w.ga.push_back(detail::make_layer(rng, ws[3], ws[3], 1, 1.0f));
    w.ga.push_back(detail::make_layer(rng, ws[3], spec.latent_channels, 1, 4.0f));

    w.ha.push_back(detail::make_layer(rng, spec.latent_channels, spec.hyper_width, 2, 1.0f));
    w.ha.push_back(detail::make_layer(rng, spec.hyper_width, spec.hyper_width, 2, 1.0f));
    w.ha.push_back(detail::make_layer(rng, spec.hyper_width, spec.hyper_channels, 1, 1.0f));

    w.hs.push_back(detail::make_layer(rng, spec.hyper_channels, spec.hyper_width, 1, 1.0f));
    w.hs.push_back(detail::make_layer(rng, spec.hyper_width, spec.hyper_width, 1, 1.0f));
    w.hs.push_back(detail::make_layer(rng, spec.hyper_width, 2 * spec.latent_channels, 1, 1.0f));

    // Untrained mu cannot actually predict y, so keep it small, and start
    // sigma near the observed latent spread instead of the 0.11 floor —
    // otherwise the entropy model charges enormous deviations and the
    // coded size decouples from the estimate.
    ConvLayer& head = w.hs.back();
    const int cy = spec.latent_channels;
    for (int oc = 0; oc < 2 * cy; ++oc) {
        const float scale = oc < cy ? 0.25f : 0.5f;
        for (std::size_t i = 0; i < static_cast<std::size_t>(head.cin) * 9; ++i)
            head.k[static_cast<std::size_t>(oc) * head.cin * 9 + i] *= scale;
        if (oc >= cy)
            head.b[static_cast<std::size_t>(oc)] = static_cast<float>(rng.uniform(1.5, 2.5));
    }
    return w;
}

// 3x3 convolution, zero pad 1; output dims are ceil(in/stride).
inline Tensor3 conv2d(const Tensor3& in, const ConvLayer& L) {
    if (in.c != L.cin) throw std::invalid_argument("conv2d: channel count mismatch");
    const int oh = (in.h + L.stride - 1) / L.stride;
    const int ow = (in.w + L.stride - 1) / L.stride;
    Tensor3 out(L.cout, oh, ow);
    for (int oc = 0; oc < L.cout; ++oc) {
        float* op = out.plane(oc);
        const float bias = L.b[static_cast<std::size_t>(oc)];
        for (int i = 0; i < oh * ow; ++i) op[i] = bias;
        for (int ic = 0; ic < L.cin; ++ic) {
            const float* ip = in.plane(ic);
            const float* kk = L.k.data() + (static_cast<std::size_t>(oc) * L.cin + ic) * 9;
            for (int oy = 0; oy < oh; ++oy) {
                const int iy0 = oy * L.stride - 1;
                float* orow = op + static_cast<std::size_t>(oy) * ow;
                for (int ky = 0; ky < 3; ++ky) {
                    const int iy = iy0 + ky;
                    if (iy < 0 || iy >= in.h) continue;
                    const float* irow = ip + static_cast<std::size_t>(iy) * in.w;
                    const float k0 = kk[ky * 3], k1 = kk[ky * 3 + 1], k2 = kk[ky * 3 + 2];
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix0 = ox * L.stride - 1;
                        float acc = 0.0f;
                        if (ix0 >= 0) acc += k0 * irow[ix0];
                        if (ix0 + 1 < in.w) acc += k1 * irow[ix0 + 1];
                        if (ix0 + 2 < in.w) acc += k2 * irow[ix0 + 2];
                        orow[ox] += acc;
                    }
                }
            }
        }
    }
    return out;
}

inline void relu_inplace(Tensor3& t) {
    for (auto& v : t.data)
        if (v < 0.0f) v = 0.0f;
}

inline Tensor3 upsample2x(const Tensor3& in) {
    Tensor3 out(in.c, in.h * 2, in.w * 2);
    for (int c = 0; c < in.c; ++c) {
        const float* ip = in.plane(c);
        float* op = out.plane(c);
        for (int y = 0; y < out.h; ++y) {
            const float* irow = ip + static_cast<std::size_t>(y / 2) * in.w;
            float* orow = op + static_cast<std::size_t>(y) * out.w;
            for (int x = 0; x < out.w; ++x) orow[x] = irow[x / 2];
        }
    }
    return out;
}

// Samples normalized to [0, 1] by declared depth; an all-zero tile maps to
// the zero tensor, so its latent is exactly the network's bias response.
inline Tensor3 tile_to_tensor(const ImageBuffer& tile) {
    tile.validate();
    Tensor3 t(tile.channels, tile.height, tile.width);
    const float inv = 1.0f / static_cast<float>(tile.max_sample_value());
    for (int ch = 0; ch < tile.channels; ++ch) {
        float* p = t.plane(ch);
        for (int r = 0; r < tile.height; ++r)
            for (int c = 0; c < tile.width; ++c)
                p[static_cast<std::size_t>(r) * tile.width + c] = inv * tile.at(r, c, ch);
    }
    return t;
}

namespace detail {
inline Tensor3 pad_to_multiple(const Tensor3& in, int m) {
    const int h = ((in.h + m - 1) / m) * m;
    const int w = ((in.w + m - 1) / m) * m;
    if (h == in.h && w == in.w) return in;
    Tensor3 out(in.c, h, w);
    for (int c = 0; c < in.c; ++c)
        for (int r = 0; r < in.h; ++r)
            std::memcpy(out.plane(c) + static_cast<std::size_t>(r) * w,
                        in.plane(c) + static_cast<std::size_t>(r) * in.w,
                        sizeof(float) * static_cast<std::size_t>(in.w));
    return out;
}
} // namespace detail

// y = g_a(x): input zero-padded to a multiple of 16, spatial dims divided
// by 16, channels = C_y.
inline Tensor3 analysis_transform(const Tensor3& x, const EncoderWeights& w) {
    if (x.c != w.spec.in_channels)
        throw std::invalid_argument("analysis_transform: channel count mismatch");
    Tensor3 t = detail::pad_to_multiple(x, w.spec.downsample_factor);
    for (std::size_t i = 0; i < w.ga.size(); ++i) {
        t = conv2d(t, w.ga[i]);
        if (i + 1 < w.ga.size()) relu_inplace(t);
    }
    return t;
}

// Per-tile latents in batch order.
inline std::vector<Tensor3> analysis_transform(const TileBatch& tiles,
                                               const EncoderWeights& w) {
    tiles.validate();
    std::vector<Tensor3> out;
    out.reserve(tiles.tiles.size());
    for (const auto& t : tiles.tiles) out.push_back(analysis_transform(tile_to_tensor(t), w));
    return out;
}

// z = h_a(y): spatial dims divided by 4 (ceiling on ragged grids).
inline Tensor3 hyper_analysis(const Tensor3& y, const EncoderWeights& w) {
    if (y.c != w.spec.latent_channels)
        throw std::invalid_argument("hyper_analysis: expected C_y input channels");
    Tensor3 t = y;
    for (std::size_t i = 0; i < w.ha.size(); ++i) {
        t = conv2d(t, w.ha[i]);
        if (i + 1 < w.ha.size()) relu_inplace(t);
    }
    return t;
}

inline float softplus(float x) {
    return x > 0.0f ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// (mu, sigma) = h_s(z_hat), cropped to the y grid; sigma is softplus-mapped
// then floored at 0.11 so no CDF table degenerates.
inline std::pair<Tensor3, Tensor3> hyper_synthesis(const ITensor3& z_hat,
                                                   const EncoderWeights& w, int y_h,
                                                   int y_w) {
    if (z_hat.c != w.spec.hyper_channels)
        throw std::invalid_argument("hyper_synthesis: expected C_z input channels");
    if (y_h > 4 * z_hat.h || y_w > 4 * z_hat.w)
        throw std::invalid_argument("hyper_synthesis: y grid larger than 4x the z grid");
    Tensor3 t(z_hat.c, z_hat.h, z_hat.w);
    for (std::size_t i = 0; i < z_hat.data.size(); ++i)
        t.data[i] = static_cast<float>(z_hat.data[i]);

    t = conv2d(upsample2x(t), w.hs[0]);
    relu_inplace(t);
    t = conv2d(upsample2x(t), w.hs[1]);
    relu_inplace(t);
    t = conv2d(t, w.hs[2]);

    const int cy = w.spec.latent_channels;
    Tensor3 mu(cy, y_h, y_w), sigma(cy, y_h, y_w);
    for (int c = 0; c < cy; ++c)
        for (int r = 0; r < y_h; ++r)
            for (int x = 0; x < y_w; ++x) {
                mu.at(c, r, x) = t.at(c, r, x);
                sigma.at(c, r, x) = std::max(softplus(t.at(c + cy, r, x)), sigma_floor);
            }
    return {std::move(mu), std::move(sigma)};
}

// Full deterministic encode of one tile:
//   y_hat = Q(g_a(x)), z_hat = Q(h_a(y)), (mu, sigma) = h_s(z_hat).
inline LatentArtifacts encode_tile(const ImageBuffer& tile, const EncoderWeights& w,
                                   TileOrigin origin = {}) {
    Tensor3 x = tile_to_tensor(tile);
    Tensor3 y = analysis_transform(x, w);
    Tensor3 z = hyper_analysis(y, w);
    LatentArtifacts a;
    a.y_hat = quantize(y);
    a.z_hat = quantize(z);
    auto [mu, sigma] = hyper_synthesis(a.z_hat, w, y.h, y.w);
    a.mu = std::move(mu);
    a.sigma = std::move(sigma);
    a.seed = w.spec.seed;
    a.tile = origin;
    a.tile_size = tile.height;
    a.validate();
    return a;
}

inline std::vector<LatentArtifacts> encode_batch(const TileBatch& tiles,
                                                 const EncoderWeights& w) {
    tiles.validate();
    std::vector<LatentArtifacts> out;
    out.reserve(tiles.tiles.size());
    for (std::size_t i = 0; i < tiles.tiles.size(); ++i)
        out.push_back(encode_tile(tiles.tiles[i], w, tiles.origin[i]));
    return out;
}

} // namespace oec
