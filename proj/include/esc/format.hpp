#pragma once

// Locale-independent number formatting for CSV and report output.

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace esc {

/// Shortest round-trip representation; "nan", "inf", "-inf" for non-finite.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) return "nan";
    return {buf, res.ptr};
}

/// Fixed number of significant digits, for human-facing tables.
inline std::string format_general(double v, int precision) {
    if (!std::isfinite(v)) return format_double(v);
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
    if (res.ec != std::errc{}) return "nan";
    return {buf, res.ptr};
}

}  // namespace esc
