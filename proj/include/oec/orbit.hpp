#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oec {

// Standard gravitational parameter and mean Earth radius. The 22.52 deg
// separation check below is sensitive to these at the 0.01 deg level.
inline constexpr double earth_mu_m3s2 = 3.986004418e14;
inline constexpr double earth_radius_m = 6.371e6;
inline constexpr double pi = 3.141592653589793238462643383279502884;

inline double deg2rad(double d) { return d * (pi / 180.0); }
inline double rad2deg(double r) { return r * (180.0 / pi); }

struct SensorSpec {
    std::string name;
    double orbit_altitude_m = 0;
    double capture_rate_hz = 0;
    double spatial_res_h_m = 0;   // ground sample distance, along-track
    double spatial_res_w_m = 0;   // across-track
    int bands = 0;
    int radiometric_bits = 0;
    double fov_deg = 0;           // full field of view

    void validate() const {
        auto bad = [](double v) { return !std::isfinite(v) || v <= 0; };
        if (bad(orbit_altitude_m) || bad(capture_rate_hz) || bad(spatial_res_h_m) ||
            bad(spatial_res_w_m) || bad(fov_deg))
            throw std::invalid_argument("SensorSpec: fields must be finite and positive");
        if (fov_deg >= 90.0)
            throw std::invalid_argument("SensorSpec: fov_deg must be in (0, 90)");
        if (bands < 1 || bands > 16)
            throw std::invalid_argument("SensorSpec: bands must be in [1, 16]");
        if (radiometric_bits < 1 || radiometric_bits > 32)
            throw std::invalid_argument("SensorSpec: radiometric_bits must be in [1, 32]");
    }
};

struct LinkSpec {
    std::string name;
    double rate_mbps = 0;
    double pass_duration_s = 0;
    // Mission-published per-pass volume; authoritative when present (the
    // published figures do not always equal rate x duration).
    std::optional<double> data_per_pass_override_bytes;

    void validate() const {
        if (!std::isfinite(rate_mbps) || rate_mbps <= 0)
            throw std::invalid_argument("LinkSpec: rate_mbps must be positive");
        if (!std::isfinite(pass_duration_s) || pass_duration_s <= 0)
            throw std::invalid_argument("LinkSpec: pass_duration_s must be positive");
        if (data_per_pass_override_bytes && *data_per_pass_override_bytes <= 0)
            throw std::invalid_argument("LinkSpec: override must be positive");
    }
};

// Footprint pixels per capture times bands times bit depth. fov enters as
// the half-angle tan^2(fov/2).
inline double capture_volume_bits(const SensorSpec& s) {
    s.validate();
    double t = std::tan(deg2rad(s.fov_deg / 2.0));
    double pixels = (s.orbit_altitude_m * s.orbit_altitude_m * t * t) /
                    (s.spatial_res_h_m * s.spatial_res_w_m);
    return pixels * static_cast<double>(s.bands) * static_cast<double>(s.radiometric_bits);
}

inline double orbit_period_s(double orbit_altitude_m) {
    if (!std::isfinite(orbit_altitude_m) || orbit_altitude_m < 0)
        throw std::invalid_argument("orbit_period_s: altitude must be >= 0");
    double a = orbit_altitude_m + earth_radius_m;
    return 2.0 * pi * std::sqrt(a * a * a / earth_mu_m3s2);
}

// Minimum angular separation (deg) between satellites sharing a ground
// station at elevation mask theta, from the horizon-geometry triangle.
inline double min_separation_angle_deg(double orbit_altitude_m, double min_elevation_deg) {
    if (!std::isfinite(orbit_altitude_m) || orbit_altitude_m <= 0)
        throw std::invalid_argument("min_separation_angle_deg: altitude must be > 0");
    if (!std::isfinite(min_elevation_deg) || min_elevation_deg < 0 || min_elevation_deg >= 90)
        throw std::invalid_argument("min_separation_angle_deg: elevation must be in [0, 90)");
    double theta = min_elevation_deg;
    double arg = earth_radius_m * std::sin(deg2rad(90.0 + theta)) /
                 (orbit_altitude_m + earth_radius_m);
    if (arg < -1.0 || arg > 1.0)
        throw std::invalid_argument("min_separation_angle_deg: arcsin argument out of range");
    double beta = 2.0 * (180.0 - (theta + 90.0) - rad2deg(std::asin(arg)));
    return beta;
}

// Largest constellation whose members never contend for the same pass.
// Nearest integer, not floor: published separation angles are rounded, and
// floor would turn 360/22.52 = 15.98 into 15 where 16 is meant.
inline int max_nonsharing_size(double beta_star_deg) {
    if (!std::isfinite(beta_star_deg) || beta_star_deg <= 0 || beta_star_deg > 360)
        throw std::invalid_argument("max_nonsharing_size: beta* must be in (0, 360]");
    int c = static_cast<int>(std::lround(360.0 / beta_star_deg));
    return c < 1 ? 1 : c;
}

// Bytes captured by a pass-interval group over one orbit:
// sum_i T_orbit(i) * rate(i) * capture_bits(i) / 8.
inline double volume_per_pass_bytes(const std::vector<SensorSpec>& group) {
    if (group.empty())
        throw std::invalid_argument("volume_per_pass_bytes: group must be non-empty");
    double bits = 0;
    for (const auto& s : group)
        bits += orbit_period_s(s.orbit_altitude_m) * s.capture_rate_hz * capture_volume_bits(s);
    return bits / 8.0;
}

inline double link_capacity_bytes(const LinkSpec& link) {
    link.validate();
    if (link.data_per_pass_override_bytes) return *link.data_per_pass_override_bytes;
    return link.rate_mbps * 1e6 * link.pass_duration_s / 8.0;
}

struct Constellation {
    std::vector<SensorSpec> satellites;
    LinkSpec link;
    double min_elevation_deg = 0;
    // satellite index -> pass-interval index; one entry per satellite, so
    // the induced groups are automatically a partition.
    std::vector<int> interval_assignment;

    void validate() const {
        link.validate();
        if (!std::isfinite(min_elevation_deg) || min_elevation_deg < 0 || min_elevation_deg >= 90)
            throw std::invalid_argument("Constellation: min_elevation_deg must be in [0, 90)");
        if (interval_assignment.size() != satellites.size())
            throw std::invalid_argument("Constellation: one interval per satellite required");
        for (int g : interval_assignment)
            if (g < 0) throw std::invalid_argument("Constellation: interval index must be >= 0");
        for (const auto& s : satellites) s.validate();
    }

    // Satellite indices per interval, indexed by interval id.
    std::vector<std::vector<std::size_t>> groups() const {
        validate();
        int max_g = -1;
        for (int g : interval_assignment) max_g = std::max(max_g, g);
        std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(max_g + 1));
        for (std::size_t i = 0; i < interval_assignment.size(); ++i)
            out[static_cast<std::size_t>(interval_assignment[i])].push_back(i);
        return out;
    }
};

} // namespace oec
