#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace jitdp {

struct Token {
    std::string text;
    std::size_t position = 0; // 0-based ordinal in the stream
};

enum class AnalyzerKind { CamelCase, Shingle };

inline constexpr std::size_t kShingleSize = 4;

/// Whitespace-tokenizes the line, then for each raw token emits the token
/// verbatim followed by its subtokens (split on non-alphanumeric characters
/// and at lower-to-upper case transitions). Subtokens equal to their raw
/// token are suppressed. Case is preserved.
///
///   "if(tbl != null && !isExternal(tbl))"
///     -> [if(tbl, if, tbl, !=, null, &&, !isExternal(tbl)), is, External, tbl]
std::vector<Token> analyze_camelcase(std::string_view line);

/// Language-generic code tokenizer: maximal runs of identifier characters
/// ([A-Za-z0-9_$] plus non-ASCII) are single tokens; punctuation is one
/// token per character except common two-character operators, which fuse.
std::vector<Token> code_tokenize(std::string_view line);

/// Lowercases the code_tokenize stream and emits every contiguous window
/// of 4 tokens joined without separator. n tokens yield max(0, n-3)
/// shingles.
std::vector<Token> analyze_shingle(std::string_view line);

std::vector<Token> analyze(AnalyzerKind kind, std::string_view line);

} // namespace jitdp
