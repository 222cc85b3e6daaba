#pragma once

#include <charconv>
#include <compare>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "logfolio/errors.hpp"

namespace logfolio {

using Series = std::vector<double>;

// Calendar date, ISO-8601 (YYYY-MM-DD), no time zone. Ordering is
// lexicographic, which coincides with chronological order for this format.
struct Date {
    std::string iso;

    friend auto operator<=>(const Date&, const Date&) = default;

    static std::optional<Date> try_parse(std::string_view text) {
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
        for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
            if (text[i] < '0' || text[i] > '9') return std::nullopt;
        }
        const int month = (text[5] - '0') * 10 + (text[6] - '0');
        const int day = (text[8] - '0') * 10 + (text[9] - '0');
        if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
        return Date{std::string(text)};
    }

    static Date parse(std::string_view text) {
        auto d = try_parse(text);
        if (!d) throw ParseError("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
        return *d;
    }
};

// Market instrument code. Codes are opaque identifiers kept verbatim:
// "000042" and "42" are different instruments.
struct InstrumentId {
    std::string code;

    friend auto operator<=>(const InstrumentId&, const InstrumentId&) = default;
};

// Shortest decimal text that parses back to the identical double.
inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

// Fixed 12-significant-digit form used by all CLI outputs.
inline std::string format_g12(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return std::string(buf);
}

// Round to 12 significant digits (the precision report files carry).
inline double round_sig12(double value) {
    return std::strtod(format_g12(value).c_str(), nullptr);
}

inline std::optional<double> parse_double(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return value;
}

}  // namespace logfolio
