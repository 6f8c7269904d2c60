#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jitdp/corpus.hpp"

namespace jitdp {

class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RepoSource {
    std::filesystem::path repo_path;
    std::string branch = "HEAD";
    std::optional<std::int64_t> since_ts; // inclusive author-timestamp bounds
    std::optional<std::int64_t> until_ts;
};

/// (hash, author_ts) pairs sorted ascending by author_ts; ties keep the
/// history tool's topological order. An empty repository yields an empty
/// list. Throws IngestError (carrying git's stderr) when the repository is
/// missing or git fails.
std::vector<std::pair<std::string, std::int64_t>> enumerate_commits(const RepoSource& source);

/// Extracts one commit: changes come from the diff against the first parent
/// (root commits diff against the empty tree), preprocessed. The label is
/// left clean. Binary files and renames contribute no changes.
Commit extract_commit(const RepoSource& source, const std::string& hash);

/// Commits named buggy in the label map become buggy; all others clean.
/// Label entries for unknown hashes are ignored with a warning on stderr.
void attach_labels(std::vector<Commit>& commits, const std::map<std::string, Label>& labels);
void attach_labels(std::vector<Commit>& commits, const std::filesystem::path& label_file);

/// enumerate + extract + label in one pass, in timestamp order.
std::vector<Commit> ingest_repository(const RepoSource& source,
                                      const std::map<std::string, Label>& labels);

} // namespace jitdp
