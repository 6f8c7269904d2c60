#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace jitdp {

class LineRankError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BuggyToken {
    std::string term;
    double weight = 0.0;
};

/// The highest-weight terms of a buggy match's score explanation, sorted by
/// weight descending (ties by term).
struct BuggyTokenSet {
    std::vector<BuggyToken> tokens;
    std::uint32_t source_doc_id = 0;
};

struct CommitLine {
    std::string file_path;
    std::string text;
};

struct RankedLine {
    std::string file_path;
    std::string line_text;
    std::size_t position = 0;         // 1-based position within the commit's added lines
    std::size_t occurrence_count = 0; // distinct buggy tokens present (or repetitions, see options)
    std::size_t rank = 0;             // 1-based
};

struct LineRankOptions {
    bool count_repetitions = false; // count total occurrences instead of distinct presence
};

/// Keeps the top_m highest-contribution terms; ties at the cutoff break
/// lexicographically by term. Throws LineRankError on an empty explanation.
BuggyTokenSet extract_buggy_tokens(const std::map<std::string, double>& explanation,
                                   std::size_t top_m, std::uint32_t source_doc_id);

/// Merges several explanations keeping the maximum contribution per term;
/// used by the union-of-buggy-matches extraction mode.
std::map<std::string, double> merge_explanations(
    std::span<const std::map<std::string, double>> explanations);

/// Counts, per line, the buggy tokens occurring in the union of that line's
/// camel-case and shingle analyses, and ranks lines by count descending.
/// The sort is stable: equal-count lines keep input order.
std::vector<RankedLine> rank_lines(std::span<const CommitLine> commit_lines,
                                   const BuggyTokenSet& tokens,
                                   const LineRankOptions& opts = {});

} // namespace jitdp
