#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "oec/artifacts.hpp"

namespace oec {

// Coder symbol domain: 9-bit two's complement. Symbols outside it cannot
// be bypass-coded and are rejected up front.
inline constexpr int coder_sym_min = -256;
inline constexpr int coder_sym_max = 255;

// Hyper-latent prior: fixed zero-mean Gaussian (stands in for a trained
// factorized prior; keeps the two-level structure).
inline constexpr double default_sigma_z = 2.0;

namespace detail {
inline constexpr double inv_sqrt2 = 0.70710678118654752440084436210485;
// sigma arrives as a float clamped at 0.11f; compare against that exact
// value widened, or a true 0.11 double would reject it.
inline constexpr double sigma_floor_d = static_cast<double>(sigma_floor);
} // namespace detail

// P(symbol) under a Gaussian(mu, sigma) convolved with unit uniform:
// Phi((s+1/2-mu)/sigma) - Phi((s-1/2-mu)/sigma). erfc keeps the tails
// accurate where the erf difference would cancel.
inline double gaussian_likelihood(int symbol, double mu, double sigma) {
    if (!(sigma >= detail::sigma_floor_d))
        throw std::invalid_argument("gaussian_likelihood: sigma below floor");
    const double a = (static_cast<double>(symbol) - 0.5 - mu) / sigma;
    const double b = (static_cast<double>(symbol) + 0.5 - mu) / sigma;
    double p;
    if (a > 0)
        p = 0.5 * (std::erfc(a * detail::inv_sqrt2) - std::erfc(b * detail::inv_sqrt2));
    else if (b < 0)
        p = 0.5 * (std::erfc(-b * detail::inv_sqrt2) - std::erfc(-a * detail::inv_sqrt2));
    else
        p = 0.5 * (std::erf(b * detail::inv_sqrt2) - std::erf(a * detail::inv_sqrt2));
    // underflow guard: the true value is positive for all finite inputs
    return std::max(p, 1e-300);
}

inline double symbol_bits(int symbol, double mu, double sigma) {
    return -std::log2(gaussian_likelihood(symbol, mu, sigma));
}

// Model cross-entropy of the main latent under its per-element Gaussian.
inline double estimate_bits_y(const ITensor3& y, const Tensor3& mu, const Tensor3& sigma) {
    if (mu.c != y.c || mu.h != y.h || mu.w != y.w || !mu.same_shape(sigma))
        throw std::invalid_argument("estimate_bits_y: shape mismatch");
    double bits = 0;
    for (std::size_t i = 0; i < y.data.size(); ++i)
        bits += symbol_bits(y.data[i], mu.data[i], sigma.data[i]);
    return bits;
}

inline double estimate_bits_z(const ITensor3& z, double sigma_z = default_sigma_z) {
    double bits = 0;
    for (auto v : z.data) bits += symbol_bits(v, 0.0, sigma_z);
    return bits;
}

inline double estimate_bits(const LatentArtifacts& a, double sigma_z = default_sigma_z) {
    a.validate();
    return estimate_bits_y(a.y_hat, a.mu, a.sigma) + estimate_bits_z(a.z_hat, sigma_z);
}

// Both coder sides rebuild tables from the persisted f32 mu/sigma, so the
// inputs are snapped to 1/64 steps first: any float that survives the .lat
// round trip then yields bit-identical tables. sigma rounds up to keep the
// 0.11 floor effective (0.11 -> 0.125).
inline double quantize_mu(double mu) { return std::nearbyint(mu * 64.0) / 64.0; }
inline double quantize_sigma(double sigma) { return std::ceil(sigma * 64.0) / 64.0; }

struct CdfTable {
    static constexpr int precision_bits = 16;
    static constexpr std::uint32_t total = 1u << precision_bits;

    int min_sym = 0; // inclusive alphabet bounds
    int max_sym = 0;
    // cum.size() == slot_count()+1; cum[0] == 0; cum.back() == total;
    // strictly increasing (every slot holds >= 1 count). Last slot escapes.
    std::vector<std::uint32_t> cum;

    int slot_count() const { return static_cast<int>(cum.size()) - 1; }
    int escape_slot() const { return slot_count() - 1; }

    int slot_of(int sym) const {
        if (sym < min_sym || sym > max_sym) return escape_slot();
        return sym - min_sym;
    }
    int sym_of_slot(int slot) const { return min_sym + slot; }
    std::uint32_t start(int slot) const { return cum[static_cast<std::size_t>(slot)]; }
    std::uint32_t freq(int slot) const {
        return cum[static_cast<std::size_t>(slot) + 1] - cum[static_cast<std::size_t>(slot)];
    }
    // slot containing cumulative offset cf in [0, total)
    int slot_from_cum(std::uint32_t cf) const {
        auto it = std::upper_bound(cum.begin(), cum.end(), cf);
        return static_cast<int>(it - cum.begin()) - 1;
    }

    void check() const {
        if (cum.size() < 3 || cum.front() != 0 || cum.back() != total)
            throw std::invalid_argument("CdfTable: bad cumulative bounds");
        for (std::size_t i = 1; i < cum.size(); ++i)
            if (cum[i] <= cum[i - 1])
                throw std::invalid_argument("CdfTable: cumulative must strictly increase");
        if (max_sym - min_sym + 2 != slot_count())
            throw std::invalid_argument("CdfTable: alphabet/slot mismatch");
    }
};

// Discretize the Gaussian onto [mu-8sigma, mu+8sigma] clamped to
// [-255, 255], 16-bit counts, every in-range slot >= 1, escape slot last.
inline CdfTable build_cdf(double mu, double sigma) {
    if (!(sigma >= detail::sigma_floor_d))
        throw std::invalid_argument("build_cdf: sigma below floor");
    const double mq = quantize_mu(mu);
    const double sq = quantize_sigma(sigma);

    auto clamp_sym = [](double v) {
        return std::max(-255.0, std::min(255.0, v));
    };
    const int lo = static_cast<int>(clamp_sym(std::floor(mq - 8.0 * sq)));
    const int hi = static_cast<int>(clamp_sym(std::ceil(mq + 8.0 * sq)));

    const int n = hi - lo + 1; // in-range slots; +1 escape below
    std::vector<double> mass(static_cast<std::size_t>(n) + 1);
    double in_range = 0;
    for (int s = lo; s <= hi; ++s) {
        double m = gaussian_likelihood(s, mq, sq);
        mass[static_cast<std::size_t>(s - lo)] = m;
        in_range += m;
    }
    mass.back() = std::max(0.0, 1.0 - in_range); // escape takes the tail mass

    std::vector<std::uint32_t> counts(mass.size());
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        auto c = static_cast<std::uint32_t>(
            std::max<long long>(1, std::llround(mass[i] * CdfTable::total)));
        counts[i] = c;
        sum += c;
    }
    // Deterministic rebalance to an exact 2^16 total: push the difference
    // into the largest slots, never draining any slot below 1.
    std::int64_t diff = static_cast<std::int64_t>(CdfTable::total) - sum;
    while (diff != 0) {
        std::size_t j = 0;
        for (std::size_t i = 1; i < counts.size(); ++i)
            if (counts[i] > counts[j]) j = i;
        if (diff > 0) {
            counts[j] += static_cast<std::uint32_t>(diff);
            diff = 0;
        } else {
            auto take = std::min<std::int64_t>(-diff, counts[j] - 1);
            if (take <= 0)
                throw std::logic_error("build_cdf: cannot normalize counts");
            counts[j] -= static_cast<std::uint32_t>(take);
            diff += take;
        }
    }

    CdfTable t;
    t.min_sym = lo;
    t.max_sym = hi;
    t.cum.resize(counts.size() + 1);
    t.cum[0] = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t.cum[i + 1] = t.cum[i] + counts[i];
    t.check();
    return t;
}

// Per-(mu, sigma) tables repeat heavily within a tile once quantized to
// 1/64 steps; memoize on the quantized grid.
struct CdfCache {
    std::unordered_map<std::uint64_t, CdfTable> map;

    const CdfTable& get(double mu, double sigma) {
        const auto mk = static_cast<std::int64_t>(std::llround(quantize_mu(mu) * 64.0));
        const auto sk = static_cast<std::int64_t>(std::llround(quantize_sigma(sigma) * 64.0));
        const std::uint64_t key =
            (static_cast<std::uint64_t>(static_cast<std::uint32_t>(mk)) << 32) |
            static_cast<std::uint32_t>(sk);
        auto it = map.find(key);
        if (it != map.end()) return it->second;
        return map.emplace(key, build_cdf(mu, sigma)).first->second;
    }
};

} // namespace oec
