#pragma once

namespace gasfc {

inline constexpr const char* kToolkitVersion = "1.0.0";

// Bumped whenever the report CSV layout or the model JSON blob changes.
inline constexpr int kReportFormatVersion = 1;
inline constexpr int kModelFormatVersion = 1;

}  // namespace gasfc
