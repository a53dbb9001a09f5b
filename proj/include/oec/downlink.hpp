#pragma once
// Downlink pass simulation: how much raw-equivalent sensor data a pass can
// move once an on-board codec shrinks it, when the link saturates, and what
// the compression buys in compute/transmit energy terms. Pure arithmetic
// over mission profiles; deterministic by construction.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "oec/orbit.hpp"
#include "oec/profiler.hpp"

namespace oec {

struct DeviceProfile {
    std::string name;
    double compute_power_w = 0;  // draw while encoding
    double transmit_power_w = 0; // radio draw while downlinking
    double calibrated_pps = 0;   // pixels/s of the chosen pipeline config
    double power_cap_w = 0;

    void validate() const {
        auto bad = [](double v) { return !std::isfinite(v) || v <= 0; };
        if (bad(compute_power_w) || bad(transmit_power_w) || bad(power_cap_w))
            throw std::invalid_argument("DeviceProfile: powers must be finite and positive");
        if (bad(calibrated_pps))
            throw std::invalid_argument("DeviceProfile: calibrated_pps must be positive");
        if (compute_power_w > power_cap_w)
            throw std::invalid_argument("DeviceProfile: compute power exceeds the cap");
    }
};

struct MissionProfile {
    LinkSpec link;
    SensorSpec sensor;
    CodecProfile codec;
    DeviceProfile device;
    double inter_pass_s = 0; // processing window before the downlink segment
    // When set, replaces the orbit-derived captured volume per pass; models
    // the assumption that there is always enough data to process.
    std::optional<double> capture_volume_override_bytes;

    void validate() const {
        link.validate();
        sensor.validate();
        device.validate();
        codec.validate(raw_bpp(sensor));
        if (!std::isfinite(inter_pass_s) || inter_pass_s < 0)
            throw std::invalid_argument("MissionProfile: inter_pass_s must be >= 0");
        if (capture_volume_override_bytes &&
            !(*capture_volume_override_bytes > 0))
            throw std::invalid_argument("MissionProfile: capture volume override must be > 0");
    }
};

struct PassReport {
    double raw_equivalent_bytes = 0;     // sensor bytes represented by this pass
    double encoded_bytes_transmitted = 0;
    double raw_bytes_transmitted = 0;    // leftover capacity spent on raw data
    bool saturation = false;             // encoded output alone fills the link
    bool deadline_met = false;           // everything captured got processed
    double compute_energy_j = 0;
    double transmit_energy_j = 0;
    double gain_factor = 0;              // raw-equivalent vs bent-pipe volume
};

// Raw-equivalent bytes one pass can represent when the link carries encoded
// data at bpp_codec instead of raw pixels at bpp_raw.
inline double downlinkable_raw_equivalent(const LinkSpec& link, double bpp_raw,
                                          double bpp_codec) {
    if (!(bpp_codec > 0) || !(bpp_codec <= bpp_raw))
        throw std::invalid_argument(
            "downlinkable_raw_equivalent: need 0 < bpp_codec <= bpp_raw");
    return link_capacity_bytes(link) * bpp_raw / bpp_codec;
}

// One pass: encode for inter_pass_s, fill the link with encoded data first,
// and spend any leftover capacity on raw captures. The computational
// deadline is reported, never enforced.
inline PassReport simulate_pass(const MissionProfile& m) {
    m.validate();
    const double bpp_raw_v = raw_bpp(m.sensor);
    const double bpp_codec = m.codec.mean_bpp();
    const double bytes_per_px = bpp_raw_v / 8.0;
    const double v_link = link_capacity_bytes(m.link);
    const double captured = m.capture_volume_override_bytes
                                ? *m.capture_volume_override_bytes
                                : volume_per_pass_bytes({m.sensor});

    PassReport r;
    const double processable =
        m.device.calibrated_pps * m.inter_pass_s * bytes_per_px;
    const double processed_raw = std::min(captured, processable);
    const double encoded = processed_raw * bpp_codec / bpp_raw_v;

    r.encoded_bytes_transmitted = std::min(encoded, v_link);
    const double leftover_capacity = v_link - r.encoded_bytes_transmitted;
    const double unprocessed_raw = captured - processed_raw;
    r.raw_bytes_transmitted = std::min(leftover_capacity, unprocessed_raw);

    r.raw_equivalent_bytes =
        r.encoded_bytes_transmitted * bpp_raw_v / bpp_codec + r.raw_bytes_transmitted;
    r.saturation = encoded >= v_link;
    r.deadline_met = processed_raw >= captured;

    r.compute_energy_j =
        m.device.compute_power_w * processed_raw / (bytes_per_px * m.device.calibrated_pps);
    const double sent = r.encoded_bytes_transmitted + r.raw_bytes_transmitted;
    r.transmit_energy_j = m.device.transmit_power_w * sent * 8.0 / (m.link.rate_mbps * 1e6);

    const double bent_pipe = std::min(v_link, captured);
    r.gain_factor = bent_pipe > 0 ? r.raw_equivalent_bytes / bent_pipe : 0.0;
    return r;
}

// Joules of compute needed to double a pass's raw-equivalent volume: encode
// raw captures worth 2x the bent-pipe pass (their coded form then rides the
// same link). Purely the encode-side energy; the codec profile is checked
// for sanity but its rate does not enter the formula.
inline double energy_to_double(const DeviceProfile& device, const LinkSpec& link,
                               const CodecProfile& codec, double bpp_raw) {
    device.validate();
    codec.validate(bpp_raw);
    const double bytes_per_px = bpp_raw / 8.0;
    const double raw_target = 2.0 * link_capacity_bytes(link);
    const double pixels = raw_target / bytes_per_px;
    return device.compute_power_w * pixels / device.calibrated_pps;
}

// Joules of radio time saved by sending the pass's raw-equivalent volume in
// encoded form instead of raw: power x the transmission time difference.
inline double transmission_savings(const DeviceProfile& device, const LinkSpec& link,
                                   const CodecProfile& codec, double bpp_raw) {
    device.validate();
    codec.validate(bpp_raw);
    const double v_link = link_capacity_bytes(link);
    const double raw_equiv = downlinkable_raw_equivalent(link, bpp_raw, codec.mean_bpp());
    return device.transmit_power_w * (raw_equiv - v_link) * 8.0 / (link.rate_mbps * 1e6);
}

} // namespace oec
