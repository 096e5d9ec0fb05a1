#pragma once

namespace dlambda {

inline constexpr const char* kToolName = "dlambda";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

} // namespace dlambda
