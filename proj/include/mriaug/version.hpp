#pragma once

#include <string_view>

#include "mriaug/config.hpp"

namespace mriaug {

inline constexpr int version_major = 0;
inline constexpr int version_minor = 1;
inline constexpr int version_patch = 0;
inline constexpr std::string_view version_string = "0.1.0";

inline constexpr int schema_version() { return config_schema_version; }

} // namespace mriaug
