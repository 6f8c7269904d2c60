#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace jitdp::text {

// One decoded UTF-8 code point. `valid` is false for stray continuation
// bytes or truncated sequences; those are consumed one byte at a time.
struct CodePoint {
    char32_t value = 0;
    int length = 1;
    bool valid = false;
};

CodePoint decode_utf8(std::string_view s, std::size_t pos);

// Unicode White_Space property (the code points git-hosted source actually
// contains: ASCII whitespace, NEL, NBSP, the general-punctuation spaces,
// line/paragraph separators, and the ideographic space).
bool is_unicode_space(char32_t cp);

// True when the line is empty after trimming Unicode whitespace.
bool is_blank(std::string_view line);

// Split on runs of Unicode whitespace. Views into the input.
std::vector<std::string_view> split_whitespace(std::string_view line);

} // namespace jitdp::text
