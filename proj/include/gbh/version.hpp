#pragma once

namespace gbh {

inline constexpr const char* version = "1.0.0";
inline constexpr int report_schema_version = 1;

}  // namespace gbh
