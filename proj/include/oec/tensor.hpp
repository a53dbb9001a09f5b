#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oec {

// Planar C x H x W tensor, channel-major.
template <typename T>
struct Tensor3T {
    int c = 0, h = 0, w = 0;
    std::vector<T> data;

    Tensor3T() = default;
    Tensor3T(int c_, int h_, int w_)
        : c(c_), h(h_), w(w_),
          data(static_cast<std::size_t>(c_) * h_ * w_, T(0)) {
        if (c_ < 1 || h_ < 1 || w_ < 1)
            throw std::invalid_argument("Tensor3: dims must be >= 1");
    }

    std::size_t size() const { return data.size(); }
    T& at(int ci, int ri, int wi) {
        return data[(static_cast<std::size_t>(ci) * h + ri) * w + wi];
    }
    T at(int ci, int ri, int wi) const {
        return data[(static_cast<std::size_t>(ci) * h + ri) * w + wi];
    }
    T* plane(int ci) { return data.data() + static_cast<std::size_t>(ci) * h * w; }
    const T* plane(int ci) const {
        return data.data() + static_cast<std::size_t>(ci) * h * w;
    }

    bool same_shape(const Tensor3T& o) const { return c == o.c && h == o.h && w == o.w; }
    bool operator==(const Tensor3T& o) const {
        return same_shape(o) && data == o.data;
    }
};

using Tensor3 = Tensor3T<float>;
using ITensor3 = Tensor3T<std::int32_t>;

// Elementwise round-half-to-even; rejects non-finite input.
inline ITensor3 quantize(const Tensor3& v) {
    ITensor3 out(v.c, v.h, v.w);
    for (std::size_t i = 0; i < v.data.size(); ++i) {
        float x = v.data[i];
        if (!std::isfinite(x))
            throw std::invalid_argument("quantize: non-finite input");
        // nearbyint under the default FE_TONEAREST mode is half-to-even
        out.data[i] = static_cast<std::int32_t>(std::nearbyint(x));
    }
    return out;
}

} // namespace oec
