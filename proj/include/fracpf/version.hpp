#pragma once

namespace fracpf {

inline constexpr const char* version_string = "0.1.0";
inline constexpr int snapshot_format_version = 1;
inline constexpr int manifest_format_version = 1;

}  // namespace fracpf
