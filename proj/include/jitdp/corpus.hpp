#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace jitdp {

enum class Label : std::uint8_t { Clean = 0, Buggy = 1 };

const char* to_string(Label label);
Label label_from_string(std::string_view s);

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DiffParseError : public std::runtime_error {
public:
    DiffParseError(const std::string& what, std::size_t byte_offset);
    std::size_t byte_offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Modifications one commit makes to a single file. Line lists hold the
/// payload text only (no diff markers); after preprocessing they contain
/// no blank lines.
struct Change {
    std::string commit_hash;
    std::string file_path;
    std::vector<std::string> lines_added;
    std::vector<std::string> lines_deleted;
    Label label = Label::Clean;
};

struct Commit {
    std::string hash;
    std::int64_t author_ts = 0;
    Label label = Label::Clean;
    std::vector<Change> changes;
    std::int64_t la = 0; // total added lines across changes

    // Propagates the label into every change and recomputes la.
    static Commit make(std::string hash, std::int64_t author_ts, Label label,
                       std::vector<Change> changes);
};

/// A contiguous block of added/deleted lines inside one file's diff.
/// Line numbers are 1-based: added lines carry new-file numbers, deleted
/// lines carry old-file numbers; strictly increasing within each list.
struct Hunk {
    std::vector<std::pair<std::int64_t, std::string>> added;
    std::vector<std::pair<std::int64_t, std::string>> deleted;
};

struct FileDiff {
    std::string file_path;
    std::vector<Hunk> hunks;
};

/// One file-level change of one commit; the unit of indexing and querying.
struct CorpusDocument {
    std::string commit_hash;
    std::string file_path;
    std::vector<std::string> lines_added;
    std::vector<std::string> lines_deleted;
    Label label = Label::Clean;
    std::int64_t author_ts = 0;
};

/// Parses unified-diff text (git or plain `diff -u` output) into per-file
/// hunk lists. Context lines are discarded. Binary files, renames, and
/// copies are skipped with a warning on stderr. Throws DiffParseError with
/// the byte offset of the offending line on malformed hunk headers or
/// truncated hunks.
std::vector<FileDiff> parse_unified_diff(std::string_view diff_text);

/// Removes blank lines (empty after trimming Unicode whitespace) from both
/// line lists, preserving relative order. Idempotent.
Change preprocess_change(Change change);

// Corpus file: newline-delimited JSON records, one per CorpusDocument.
// Unknown extra fields are ignored; a missing required field or a bad
// label raises CorpusError naming the record number and field.
std::vector<CorpusDocument> read_corpus_records(std::istream& in);
void write_corpus_records(std::span<const CorpusDocument> docs, std::ostream& out);
std::vector<CorpusDocument> load_corpus(const std::filesystem::path& path);
void write_corpus(std::span<const CorpusDocument> docs, const std::filesystem::path& path);

CorpusDocument to_document(const Change& change, std::int64_t author_ts);
Change to_change(const CorpusDocument& doc);
std::vector<CorpusDocument> commit_documents(const Commit& commit);

/// Groups file-level documents into commits ordered by (author_ts, first
/// appearance). Documents of one commit must agree on label and timestamp.
std::vector<Commit> group_into_commits(std::span<const CorpusDocument> docs);

/// Header-less CSV `commit_hash,label`. Bad label values raise CorpusError.
std::map<std::string, Label> load_label_file(const std::filesystem::path& path);

/// FNV-1a 64 over the serialized records; used by run manifests.
std::uint64_t corpus_digest(std::span<const CorpusDocument> docs);

} // namespace jitdp
