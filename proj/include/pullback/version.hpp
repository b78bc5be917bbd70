#pragma once

namespace pullback {

inline constexpr const char* kToolkitName = "pullback-lab";
inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace pullback
