#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "jitdp/corpus.hpp"

namespace jitdp {

class IndexError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Field : int { CamelCase = 0, Shingle = 1 };

inline constexpr int kFieldCount = 2;
inline constexpr std::array<Field, kFieldCount> kAllFields{Field::CamelCase, Field::Shingle};

const char* to_string(Field f);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct Posting {
    std::uint32_t doc_id = 0;
    std::uint32_t term_frequency = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

struct QueryTerm {
    std::string term;
    Field field = Field::CamelCase;
};

struct MltOptions {
    std::size_t top_k = 10;            // hits returned per probe change
    std::size_t max_query_terms = 25;  // per field
    std::uint32_t min_term_freq = 1;   // probe-side term frequency floor
    std::uint32_t min_doc_freq = 1;    // corpus-side document frequency floor
};

struct SearchHit {
    std::uint32_t doc_id = 0;
    double relevance_score = 0.0;
    Label label = Label::Clean;
    std::string commit_hash;
    std::string file_path;
    std::map<std::string, double> term_contributions; // sums to relevance_score
};

/// A hit from a commit-level query plus the index of the probe change that
/// produced its (maximal) score.
struct CommitSearchHit {
    SearchHit hit;
    std::size_t probe_change = 0;
};

/// Doc-store entry for one indexed change.
struct DocEntry {
    std::string commit_hash;
    std::string file_path;
    Label label = Label::Clean;
    std::int64_t author_ts = 0;
    std::uint32_t added_line_count = 0;
    std::array<std::uint64_t, kFieldCount> field_length{0, 0};

    friend bool operator==(const DocEntry&, const DocEntry&) = default;
};

/// Online inverted index over analyzed change documents with BM25 scoring.
///
/// Two fields are maintained over lines_added: the camel-case analysis and
/// the 4-gram shingle analysis. Documents become visible to queries as soon
/// as add_document returns. Thread model: single writer, any number of
/// concurrent readers.
class InvertedIndex {
public:
    explicit InvertedIndex(Bm25Params params = {});
    InvertedIndex(InvertedIndex&& other) noexcept;
    InvertedIndex& operator=(InvertedIndex&& other) noexcept;

    /// Analyzes the preprocessed change and inserts it. Returns the dense
    /// doc_id assigned (0, 1, 2, ... in insertion order).
    std::uint32_t add_document(const Change& change, std::int64_t author_ts);
    std::uint32_t add_document(const CorpusDocument& doc);

    /// Bulk construction; equivalent to adding the documents in order.
    static InvertedIndex build(std::span<const CorpusDocument> docs, Bm25Params params = {});

    std::size_t doc_count() const;
    std::uint64_t total_tokens(Field f) const;
    double avg_field_length(Field f) const;
    std::uint32_t doc_frequency(Field f, std::string_view term) const;
    DocEntry doc(std::uint32_t doc_id) const;
    Bm25Params params() const;

    /// Smoothed IDF, never negative: ln(1 + (N - df + 0.5) / (df + 0.5)).
    double idf(std::uint32_t df) const;

    /// Sum over the query terms of the BM25 term score against doc_id.
    /// Terms absent from the document contribute 0. Throws std::out_of_range
    /// for an unknown doc_id.
    double bm25_score(std::span<const QueryTerm> terms, std::uint32_t doc_id) const;

    /// More-like-this query: analyzes the probe's lines_added with both
    /// analyzers, keeps the top max_query_terms terms per field ranked by
    /// probe-tf x idf, scores every document matching at least one query
    /// term, and returns the top_k hits sorted by score descending.
    std::vector<SearchHit> mlt_query(const Change& probe, const MltOptions& opts = {}) const;

    /// Runs mlt_query for every change of the commit and merges the results
    /// into one candidate set: hits for the same indexed document are
    /// deduplicated keeping the maximum score. Sorted by score descending.
    std::vector<CommitSearchHit> mlt_query_commit(const Commit& probe,
                                                  const MltOptions& opts = {}) const;

    /// Per-term score contributions of doc_id for this probe's query; the
    /// values sum to the corresponding SearchHit's relevance_score. Throws
    /// IndexError when the document shares no query term with the probe.
    std::map<std::string, double> explain(const Change& probe, std::uint32_t doc_id,
                                          const MltOptions& opts = {}) const;

    /// Sorted (term, postings) view of one field, for tests and snapshots.
    std::vector<std::pair<std::string, std::vector<Posting>>> postings_snapshot(Field f) const;

    // Single-file snapshot with a versioned header. Loading reproduces
    // query results bit-exactly.
    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

private:
    struct SelectedTerm {
        std::string term;
        Field field;
        double idf;
    };

    std::uint32_t add_document_locked(const Change& change, std::int64_t author_ts);
    std::vector<SelectedTerm> select_query_terms_locked(const Change& probe,
                                                        const MltOptions& opts) const;
    double term_doc_score_locked(const SelectedTerm& term, std::uint32_t doc_id) const;
    std::uint32_t tf_locked(Field f, const std::string& term, std::uint32_t doc_id) const;
    double avgdl_locked(Field f) const;
    std::vector<SearchHit> mlt_query_locked(const Change& probe, const MltOptions& opts) const;

    Bm25Params params_;
    std::vector<DocEntry> docs_;
    std::array<std::unordered_map<std::string, std::vector<Posting>>, kFieldCount> postings_;
    std::array<std::uint64_t, kFieldCount> total_tokens_{0, 0};
    mutable std::shared_mutex mutex_;
};

} // namespace jitdp
