#include "jitdp/text.hpp"

namespace jitdp::text {

CodePoint decode_utf8(std::string_view s, std::size_t pos) {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
    const unsigned char b0 = byte(pos);
    if (b0 < 0x80) {
        return {b0, 1, true};
    }
    auto continuation = [&](std::size_t i) {
        return i < s.size() && (byte(i) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && continuation(pos + 1)) {
        char32_t cp = (char32_t(b0 & 0x1F) << 6) | (byte(pos + 1) & 0x3F);
        if (cp >= 0x80) return {cp, 2, true};
    } else if ((b0 & 0xF0) == 0xE0 && continuation(pos + 1) && continuation(pos + 2)) {
        char32_t cp = (char32_t(b0 & 0x0F) << 12) | (char32_t(byte(pos + 1) & 0x3F) << 6) |
                      (byte(pos + 2) & 0x3F);
        if (cp >= 0x800 && !(cp >= 0xD800 && cp <= 0xDFFF)) return {cp, 3, true};
    } else if ((b0 & 0xF8) == 0xF0 && continuation(pos + 1) && continuation(pos + 2) &&
               continuation(pos + 3)) {
        char32_t cp = (char32_t(b0 & 0x07) << 18) | (char32_t(byte(pos + 1) & 0x3F) << 12) |
                      (char32_t(byte(pos + 2) & 0x3F) << 6) | (byte(pos + 3) & 0x3F);
        if (cp >= 0x10000 && cp <= 0x10FFFF) return {cp, 4, true};
    }
    // Invalid sequence: surface the raw byte so callers can treat it as content.
    return {b0, 1, false};
}

bool is_unicode_space(char32_t cp) {
    switch (cp) {
        case 0x0009:
        case 0x000A:
        case 0x000B:
        case 0x000C:
        case 0x000D:
        case 0x0020:
        case 0x0085:
        case 0x00A0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_blank(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size()) {
        const CodePoint cp = decode_utf8(line, i);
        if (!cp.valid || !is_unicode_space(cp.value)) return false;
        i += static_cast<std::size_t>(cp.length);
    }
    return true;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    std::size_t start = 0;
    bool in_token = false;
    while (i < line.size()) {
        const CodePoint cp = decode_utf8(line, i);
        const bool ws = cp.valid && is_unicode_space(cp.value);
        if (ws) {
            if (in_token) {
                out.push_back(line.substr(start, i - start));
                in_token = false;
            }
        } else if (!in_token) {
            start = i;
            in_token = true;
        }
        i += static_cast<std::size_t>(cp.length);
    }
    if (in_token) out.push_back(line.substr(start));
    return out;
}

} // namespace jitdp::text
