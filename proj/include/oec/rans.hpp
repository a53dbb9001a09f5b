#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "oec/gaussian.hpp"
#include "oec/util.hpp"

namespace oec {

// Range-ANS, 32-bit state, byte renormalization, 16-bit frequencies.
// Encoding is LIFO: symbols are folded in reverse and the byte buffer is
// reversed once at flush, so the decoder streams forward.
inline constexpr std::uint32_t rans_lower_bound = 1u << 23;

struct RansEncoder {
    // (slot, table) jobs in stream order; folded back-to-front at finish.
    // Table pointers must stay valid until finish() (CdfCache is node-based
    // and never invalidates them).
    std::vector<std::pair<int, const CdfTable*>> items;

    void push(int slot, const CdfTable& t) { items.emplace_back(slot, &t); }

    std::vector<std::uint8_t> finish() const {
        if (items.empty()) return {};
        std::vector<std::uint8_t> out;
        out.reserve(items.size() + 16);
        std::uint32_t x = rans_lower_bound;
        for (auto it = items.rbegin(); it != items.rend(); ++it) {
            const CdfTable& t = *it->second;
            const std::uint32_t f = t.freq(it->first);
            const std::uint32_t s = t.start(it->first);
            const std::uint32_t x_max = ((rans_lower_bound >> 16) << 8) * f;
            while (x >= x_max) {
                out.push_back(static_cast<std::uint8_t>(x & 0xFF));
                x >>= 8;
            }
            x = ((x / f) << 16) + (x % f) + s;
        }
        for (int i = 0; i < 4; ++i) {
            out.push_back(static_cast<std::uint8_t>(x & 0xFF));
            x >>= 8;
        }
        std::reverse(out.begin(), out.end());
        return out;
    }
};

struct RansDecoder {
    const std::uint8_t* p;
    std::size_t n;
    std::size_t pos = 0;
    std::uint32_t x = 0;

    RansDecoder(const std::uint8_t* data, std::size_t len) : p(data), n(len) {
        if (n == 0) return; // empty stream: no symbols may be decoded
        if (n < 4) throw decode_error("rans: stream shorter than the state flush");
        x = (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
            (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
        pos = 4;
    }

    int decode_slot(const CdfTable& t) {
        if (n == 0) throw decode_error("rans: decode from empty stream");
        const std::uint32_t cf = x & 0xFFFF;
        const int slot = t.slot_from_cum(cf);
        x = t.freq(slot) * (x >> 16) + cf - t.start(slot);
        while (x < rans_lower_bound) {
            if (pos >= n) throw decode_error("rans: stream exhausted mid-symbol");
            x = (x << 8) | p[pos++];
        }
        return slot;
    }

    // After the declared symbol count the state must be back at the
    // encoder's seed value with no bytes left over.
    void finish() const {
        if (n == 0) return;
        if (x != rans_lower_bound) throw decode_error("rans: final state mismatch");
        if (pos != n) throw decode_error("rans: trailing bytes in stream");
    }
};

inline std::vector<std::uint8_t> rans_encode_slots(
    const std::vector<int>& slots, const std::vector<const CdfTable*>& tables) {
    if (slots.size() != tables.size())
        throw std::invalid_argument("rans_encode_slots: slots/tables misaligned");
    RansEncoder enc;
    for (std::size_t i = 0; i < slots.size(); ++i) enc.push(slots[i], *tables[i]);
    return enc.finish();
}

inline std::vector<int> rans_decode_slots(const std::vector<std::uint8_t>& bytes,
                                          const std::vector<const CdfTable*>& tables) {
    RansDecoder dec(bytes.data(), bytes.size());
    std::vector<int> out;
    out.reserve(tables.size());
    for (const auto* t : tables) out.push_back(dec.decode_slot(*t));
    dec.finish();
    return out;
}

// ---- raw-bit bypass section (escape payloads), LSB-first packing ------

struct BitWriter {
    std::vector<std::uint8_t> buf;
    int fill = 0; // bits used in the last byte

    void put(std::uint32_t v, int bits) {
        for (int i = 0; i < bits; ++i) {
            if (fill == 0) buf.push_back(0);
            if ((v >> i) & 1u)
                buf.back() |= static_cast<std::uint8_t>(1u << fill);
            fill = (fill + 1) & 7;
        }
    }
};

struct BitReader {
    const std::uint8_t* p;
    std::size_t n;
    std::size_t bitpos = 0;

    BitReader(const std::uint8_t* data, std::size_t len) : p(data), n(len) {}

    std::uint32_t get(int bits) {
        std::uint32_t v = 0;
        for (int i = 0; i < bits; ++i) {
            if (bitpos >= 8 * n) throw decode_error("bypass: bit stream exhausted");
            if ((p[bitpos >> 3] >> (bitpos & 7)) & 1u) v |= 1u << i;
            ++bitpos;
        }
        return v;
    }
};

} // namespace oec
