#include "availd/core/time.hpp"

#include <cctype>
#include <cstdio>

#include "availd/core/error.hpp"

namespace availd {

namespace {

bool read_digits(std::string_view text, std::size_t& pos, std::size_t count, int& out) {
    if (pos + count > text.size()) return false;
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const char c = text[pos + i];
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        value = value * 10 + (c - '0');
    }
    pos += count;
    out = value;
    return true;
}

bool expect(std::string_view text, std::size_t& pos, char c) {
    if (pos >= text.size() || text[pos] != c) return false;
    ++pos;
    return true;
}

[[noreturn]] void malformed(std::string_view text) {
    throw ValidationError("malformed RFC3339 timestamp '" + std::string(text) + "'");
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
    using namespace std::chrono;
    std::size_t pos = 0;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!read_digits(text, pos, 4, y) || !expect(text, pos, '-') || !read_digits(text, pos, 2, mo) ||
        !expect(text, pos, '-') || !read_digits(text, pos, 2, d)) {
        malformed(text);
    }
    if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ')) malformed(text);
    ++pos;
    if (!read_digits(text, pos, 2, h) || !expect(text, pos, ':') || !read_digits(text, pos, 2, mi) ||
        !expect(text, pos, ':') || !read_digits(text, pos, 2, s)) {
        malformed(text);
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        const std::size_t begin = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == begin) malformed(text);
    }
    int offset_seconds = 0;
    if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
        ++pos;
    } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        const int sign = text[pos] == '-' ? -1 : 1;
        ++pos;
        int oh = 0, om = 0;
        if (!read_digits(text, pos, 2, oh) || !expect(text, pos, ':') || !read_digits(text, pos, 2, om)) {
            malformed(text);
        }
        if (oh > 23 || om > 59) malformed(text);
        offset_seconds = sign * (oh * 3600 + om * 60);
    } else {
        malformed(text);
    }
    if (pos != text.size()) malformed(text);
    if (h > 23 || mi > 59 || s > 60) malformed(text);

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) malformed(text);
    const sys_days days{ymd};
    // Leap seconds collapse onto the following second.
    return Timestamp{days} + hours{h} + minutes{mi} + Seconds{s} - Seconds{offset_seconds};
}

std::string format_rfc3339(Timestamp at) {
    using namespace std::chrono;
    const sys_days days = floor<std::chrono::days>(at);
    const year_month_day ymd{days};
    const auto rest = at - days;
    const auto h = duration_cast<hours>(rest);
    const auto m = duration_cast<minutes>(rest - h);
    const auto s = rest - h - m;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(h.count()), static_cast<int>(m.count()), static_cast<int>(s.count()));
    return buf;
}

Timestamp start_of_day(Timestamp at) {
    return Timestamp{std::chrono::floor<std::chrono::days>(at)};
}

Timestamp start_of_year(Timestamp at) {
    using namespace std::chrono;
    const year_month_day ymd{floor<days>(at)};
    return Timestamp{sys_days{ymd.year() / January / 1}};
}

}  // namespace availd
