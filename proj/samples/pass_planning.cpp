// Pass planning with the shipped fixtures: how much raw-equivalent imagery
// each link can represent per pass once the payload downlinks encoded data,
// and what one concrete pass costs in energy.

#include <cstdio>

#include "oec/downlink.hpp"
#include "oec/fixtures.hpp"

using namespace oec;

int main() {
    const SensorSpec sensor = fixtures::sensor("rgb-smallsat");
    const double bpp_raw = raw_bpp(sensor);
    const CodecProfile codec = fixtures::codec_profile("fool", SizeClass::S);

    std::printf("sensor %s: %.0f bpp raw; codec %s: %.4f bpp\n", sensor.name.c_str(), bpp_raw,
                codec.name.c_str(), codec.mean_bpp());
    std::printf("%-14s %14s %20s %8s\n", "link", "bent-pipe (GB)", "raw-equivalent (GB)", "gain");
    for (const auto& link : fixtures::links()) {
        const double v = link_capacity_bytes(link);
        const double req = downlinkable_raw_equivalent(link, bpp_raw, codec.mean_bpp());
        std::printf("%-14s %14.1f %20.1f %7.1fx\n", link.name.c_str(), v / 1e9, req / 1e9,
                    req / v);
    }

    // one concrete pass: WorldView-3 class link, Orin-class edge device
    MissionProfile m = fixtures::mission("wv3-fool-s");
    PassReport r = simulate_pass(m);
    std::printf("\n%s pass on %s:\n", m.link.name.c_str(), m.device.name.c_str());
    std::printf("  encoded bytes sent      %12.3e\n", r.encoded_bytes_transmitted);
    std::printf("  raw bytes sent          %12.3e\n", r.raw_bytes_transmitted);
    std::printf("  raw-equivalent total    %12.3e (%.1fx bent pipe)\n", r.raw_equivalent_bytes,
                r.gain_factor);
    std::printf("  compute / transmit      %10.1f J / %.1f J\n", r.compute_energy_j,
                r.transmit_energy_j);

    // doubling effective downlink by encoding instead of raising radio power
    const double e = energy_to_double(m.device, m.link, m.codec, raw_bpp(m.sensor));
    std::printf("  energy to double a %.0f GB pass by encoding: %.1f J\n",
                link_capacity_bytes(m.link) / 1e9, e);
    return 0;
}
