#include "jitdp/analysis.hpp"

#include <array>
#include <cctype>

#include "jitdp/text.hpp"

namespace jitdp {

namespace {

bool is_ascii_alnum(char32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

bool is_ascii_lower(char32_t cp) {
    return cp >= 'a' && cp <= 'z';
}

bool is_ascii_upper(char32_t cp) {
    return cp >= 'A' && cp <= 'Z';
}

// Word characters for camel-case subtoken runs: ASCII alphanumerics plus any
// non-ASCII non-whitespace code point (keeps non-English identifiers whole).
bool is_word_cp(const text::CodePoint& cp) {
    if (!cp.valid) return true;
    if (cp.value < 0x80) return is_ascii_alnum(cp.value);
    return !text::is_unicode_space(cp.value);
}

// Identifier characters for the code tokenizer: word characters plus _ and $.
bool is_ident_cp(const text::CodePoint& cp) {
    if (cp.valid && (cp.value == '_' || cp.value == '$')) return true;
    return is_word_cp(cp);
}

// Adjacent operator characters that fuse into one token.
bool fuses(char a, char b) {
    static constexpr std::array<const char*, 16> kPairs = {
        "!=", "==", "<=", ">=", "&&", "||", "->", "::",
        "++", "--", "+=", "-=", "*=", "/=", "<<", ">>",
    };
    for (const char* p : kPairs) {
        if (p[0] == a && p[1] == b) return true;
    }
    return false;
}

// Subtokens of a raw whitespace token: split on non-word characters and at
// every lower-to-upper case transition.
std::vector<std::string_view> subtokens(std::string_view raw) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    std::size_t start = 0;
    bool in_run = false;
    char32_t prev_cp = 0;
    while (i < raw.size()) {
        const text::CodePoint cp = text::decode_utf8(raw, i);
        if (is_word_cp(cp)) {
            if (in_run && is_ascii_lower(prev_cp) && is_ascii_upper(cp.value)) {
                out.push_back(raw.substr(start, i - start));
                start = i;
            } else if (!in_run) {
                start = i;
                in_run = true;
            }
            prev_cp = cp.valid ? cp.value : 0;
        } else if (in_run) {
            out.push_back(raw.substr(start, i - start));
            in_run = false;
        }
        i += static_cast<std::size_t>(cp.length);
    }
    if (in_run) out.push_back(raw.substr(start));
    return out;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

} // namespace

std::vector<Token> analyze_camelcase(std::string_view line) {
    std::vector<Token> out;
    for (const std::string_view raw : text::split_whitespace(line)) {
        out.push_back(Token{std::string(raw), out.size()});
        for (const std::string_view sub : subtokens(raw)) {
            if (sub != raw) out.push_back(Token{std::string(sub), out.size()});
        }
    }
    return out;
}

std::vector<Token> code_tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const text::CodePoint cp = text::decode_utf8(line, i);
        const std::size_t len = static_cast<std::size_t>(cp.length);
        if (cp.valid && text::is_unicode_space(cp.value)) {
            i += len;
            continue;
        }
        if (is_ident_cp(cp)) {
            const std::size_t start = i;
            while (i < line.size()) {
                const text::CodePoint next = text::decode_utf8(line, i);
                if ((next.valid && text::is_unicode_space(next.value)) || !is_ident_cp(next)) break;
                i += static_cast<std::size_t>(next.length);
            }
            out.push_back(Token{std::string(line.substr(start, i - start)), out.size()});
            continue;
        }
        // Punctuation: one character, or two when they form an operator.
        if (cp.valid && cp.value < 0x80 && i + 1 < line.size() &&
            fuses(line[i], line[i + 1])) {
            out.push_back(Token{std::string(line.substr(i, 2)), out.size()});
            i += 2;
            continue;
        }
        out.push_back(Token{std::string(line.substr(i, len)), out.size()});
        i += len;
    }
    return out;
}

std::vector<Token> analyze_shingle(std::string_view line) {
    const std::vector<Token> tokens = code_tokenize(line);
    std::vector<Token> out;
    if (tokens.size() < kShingleSize) return out;
    std::vector<std::string> lowered;
    lowered.reserve(tokens.size());
    for (const Token& t : tokens) lowered.push_back(ascii_lower(t.text));
    for (std::size_t i = 0; i + kShingleSize <= lowered.size(); ++i) {
        std::string joined;
        for (std::size_t j = 0; j < kShingleSize; ++j) joined += lowered[i + j];
        out.push_back(Token{std::move(joined), out.size()});
    }
    return out;
}

std::vector<Token> analyze(AnalyzerKind kind, std::string_view line) {
    return kind == AnalyzerKind::CamelCase ? analyze_camelcase(line) : analyze_shingle(line);
}

} // namespace jitdp
