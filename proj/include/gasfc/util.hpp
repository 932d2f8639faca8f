#pragma once

#include <charconv>
#include <string>

namespace gasfc {

/// Shortest decimal representation that round-trips to the same double.
/// Used for every CSV we emit, so persisted forecasts re-load bit-exact.
inline std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

}  // namespace gasfc
