#pragma once
// Report emission: schema-versioned JSON documents and CSV tables for the
// CLI, plus the run manifest that makes every invocation reproducible. JSON
// carries structure, CSV carries plot data; nothing here draws anything.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <string>
#include <vector>

#include <json.hpp>

#include "oec/downlink.hpp"
#include "oec/pipeline.hpp"
#include "oec/profiler.hpp"
#include "oec/util.hpp"
#include "oec/version.hpp"

namespace oec {

using json = nlohmann::json;

inline constexpr int report_schema_version = 1;

inline json schema_block(const std::string& name) {
    return json{{"name", name}, {"version", report_schema_version}};
}

// Throws decode_error unless doc carries the expected schema block.
inline void require_schema(const json& doc, const std::string& name) {
    if (!doc.contains("schema") || !doc["schema"].is_object())
        throw decode_error("document lacks a schema block");
    const auto& s = doc["schema"];
    if (s.value("name", "") != name)
        throw decode_error("expected schema '" + name + "', found '" +
                           s.value("name", "") + "'");
    if (s.value("version", -1) != report_schema_version)
        throw decode_error("unsupported schema version for '" + name + "'");
}

inline std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// What a command ran with and what it left behind. The config hash covers
// the effective option set, so equal hashes + equal seeds mean replaying the
// command must reproduce the same bytes.
struct RunManifest {
    std::string command;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;

    static std::string digest_of(const std::string& canonical_config) {
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(
                          fnv1a64(canonical_config.data(), canonical_config.size())));
        return buf;
    }

    json to_json() const {
        return json{{"schema", schema_block("run_manifest")},
                    {"command", command},
                    {"config_digest", config_digest},
                    {"seed", seed},
                    {"started_at", started_at},
                    {"finished_at", finished_at},
                    {"tool_version", version_string},
                    {"format_version", format_version},
                    {"outputs", outputs}};
    }
};

inline json to_json(const TraceRow& r) {
    return json{{"item", r.item},
                {"stage", stage_name(r.stage)},
                {"enqueue_s", r.enqueue_s},
                {"dequeue_s", r.dequeue_s},
                {"done_s", r.done_s}};
}

inline json to_json(const PipelineReport& r, bool with_trace = false) {
    json stages = json::array();
    for (std::size_t i = 0; i < r.stages.size(); ++i)
        stages.push_back({{"stage", stage_name(static_cast<int>(i))},
                          {"busy_s", r.stages[i].busy_s},
                          {"items", r.stages[i].items}});
    json outputs = json::array();
    for (const auto& et : r.outputs)
        outputs.push_back({{"item", et.item},
                           {"image_id", et.tile.image_id},
                           {"row", et.tile.row},
                           {"col", et.tile.col},
                           {"bytes", et.bytes.size()}});
    json doc{{"schema", schema_block("pipeline_report")},
             {"mode", to_string(r.mode)},
             {"items", r.items},
             {"pixels", r.pixels},
             {"bytes_emitted", r.bytes_emitted},
             {"wall_s", r.wall_s},
             {"pixels_per_s", r.pps},
             {"bpp_raw", r.bpp_raw},
             {"bpp_codec", r.bpp_codec},
             {"tcr_per_s", r.tcr_per_s},
             {"degradation_vs_transform_only", r.degradation_vs_transform_only},
             {"stages", stages},
             {"outputs", outputs}};
    if (with_trace) {
        json rows = json::array();
        for (const auto& row : r.trace) rows.push_back(to_json(row));
        doc["trace"] = rows;
    }
    return doc;
}

inline json to_json(const ProfileMeasurement& m) {
    return json{{"tile_size", m.tile_size},
                {"batch_size", m.batch_size},
                {"size_class", to_string(m.size_class)},
                {"img_per_s", m.img_per_s},
                {"pixels_per_s", m.pixels_per_s},
                {"tcr_per_s", m.tcr_per_s},
                {"repeats", m.repeats},
                {"dispersion", m.dispersion},
                {"ok", m.ok},
                {"error", m.error}};
}

inline json to_json(const ProfileResult& r) {
    json grid = json::array();
    for (const auto& m : r.grid) grid.push_back(to_json(m));
    const auto& c = r.grid[r.chosen];
    return json{{"schema", schema_block("profile_result")},
                {"grid", grid},
                {"chosen", r.chosen},
                {"tie_break", r.tie_break},
                {"chosen_config",
                 {{"tile_size", c.tile_size},
                  {"batch_size", c.batch_size},
                  {"size_class", to_string(c.size_class)},
                  {"tcr_per_s", c.tcr_per_s}}}};
}

inline json to_json(const PassReport& r) {
    return json{{"schema", schema_block("pass_report")},
                {"raw_equivalent_bytes", r.raw_equivalent_bytes},
                {"encoded_bytes_transmitted", r.encoded_bytes_transmitted},
                {"raw_bytes_transmitted", r.raw_bytes_transmitted},
                {"saturation", r.saturation},
                {"deadline_met", r.deadline_met},
                {"compute_energy_j", r.compute_energy_j},
                {"transmit_energy_j", r.transmit_energy_j},
                {"gain_factor", r.gain_factor}};
}

// CSV tables. Columns are pinned by docs/schemas.md; emit them in exactly
// this order.

inline std::string profile_grid_csv(const std::vector<ProfileMeasurement>& grid) {
    std::string s =
        "tile_size,batch_size,size_class,img_per_s,pixels_per_s,tcr_per_s,repeats,"
        "dispersion,ok,error\n";
    char line[320];
    for (const auto& m : grid) {
        std::snprintf(line, sizeof line, "%d,%d,%s,%.9g,%.9g,%.9g,%d,%.9g,%d,%s\n",
                      m.tile_size, m.batch_size, to_string(m.size_class), m.img_per_s,
                      m.pixels_per_s, m.tcr_per_s, m.repeats, m.dispersion, m.ok ? 1 : 0,
                      m.error.c_str());
        s += line;
    }
    return s;
}

// One row per link x codec: the raw-equivalent volume each pairing can move
// per pass (bar-chart data).
struct VolumeRow {
    std::string link;
    std::string codec;
    double v_link_bytes = 0;
    double raw_equivalent_bytes = 0;
    double gain = 0;
};

inline std::string volume_csv(const std::vector<VolumeRow>& rows) {
    std::string s = "link,codec,v_link_bytes,raw_equivalent_bytes,gain\n";
    char line[256];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%s,%s,%.9g,%.9g,%.9g\n", r.link.c_str(),
                      r.codec.c_str(), r.v_link_bytes, r.raw_equivalent_bytes, r.gain);
        s += line;
    }
    return s;
}

} // namespace oec
