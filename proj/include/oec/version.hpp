#pragma once

#define OEC_VERSION_MAJOR 0
#define OEC_VERSION_MINOR 3
#define OEC_VERSION_PATCH 0

namespace oec {

inline constexpr const char* version_string = "0.3.0";

// Bumped when any on-disk layout (.lat/.fenc containers, report CSV/JSON
// columns) changes incompatibly.
inline constexpr unsigned format_version = 1;

} // namespace oec
