#include "jitdp/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "jitdp/text.hpp"

namespace jitdp {

using nlohmann::json;

const char* to_string(Label label) {
    return label == Label::Buggy ? "buggy" : "clean";
}

Label label_from_string(std::string_view s) {
    if (s == "buggy") return Label::Buggy;
    if (s == "clean") return Label::Clean;
    throw CorpusError("invalid label value \"" + std::string(s) + "\" (expected buggy or clean)");
}

DiffParseError::DiffParseError(const std::string& what, std::size_t byte_offset)
    : std::runtime_error(what + " at byte offset " + std::to_string(byte_offset)),
      offset_(byte_offset) {}

Commit Commit::make(std::string hash, std::int64_t author_ts, Label label,
                    std::vector<Change> changes) {
    Commit c;
    c.hash = std::move(hash);
    c.author_ts = author_ts;
    c.label = label;
    c.changes = std::move(changes);
    c.la = 0;
    for (auto& change : c.changes) {
        change.commit_hash = c.hash;
        change.label = label;
        c.la += static_cast<std::int64_t>(change.lines_added.size());
    }
    return c;
}

// ---------------------------------------------------------------------------
// Unified-diff parsing
// ---------------------------------------------------------------------------

namespace {

struct LineCursor {
    std::string_view text;
    std::size_t pos = 0;

    bool done() const { return pos >= text.size(); }
    std::size_t offset() const { return pos; }

    // Returns the next line without its terminator (a trailing \r is kept:
    // diff payload may legitimately contain it, headers never do).
    std::string_view next() {
        const std::size_t start = pos;
        const std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            pos = text.size();
            return text.substr(start);
        }
        pos = nl + 1;
        return text.substr(start, nl - start);
    }

    std::string_view peek() const {
        LineCursor copy = *this;
        return copy.next();
    }
};

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

// Unquotes a C-style quoted git path ("\t", "\\", "\"", octal escapes).
std::string unquote_git_path(std::string_view s) {
    if (s.size() < 2 || s.front() != '"') return std::string(s);
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        char c = s[i];
        if (c != '\\') {
            out.push_back(c);
            continue;
        }
        ++i;
        if (i + 1 > s.size()) break;
        char e = s[i];
        switch (e) {
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            case 'r': out.push_back('\r'); break;
            case '\\': out.push_back('\\'); break;
            case '"': out.push_back('"'); break;
            default:
                if (e >= '0' && e <= '7') {
                    int v = 0;
                    std::size_t j = i;
                    while (j < s.size() && j < i + 3 && s[j] >= '0' && s[j] <= '7') {
                        v = v * 8 + (s[j] - '0');
                        ++j;
                    }
                    i = j - 1;
                    out.push_back(static_cast<char>(v));
                } else {
                    out.push_back(e);
                }
        }
    }
    return out;
}

// Parses the path from a "--- " / "+++ " header payload. Strips the git
// a/ b/ prefixes and a plain-diff "\ttimestamp" suffix.
std::string parse_header_path(std::string_view payload) {
    payload = strip_cr(payload);
    std::string path;
    if (!payload.empty() && payload.front() == '"') {
        path = unquote_git_path(payload);
    } else {
        const std::size_t tab = payload.find('\t');
        path = std::string(payload.substr(0, tab));
    }
    if (path == "/dev/null") return path;
    if (path.size() > 2 && (path[0] == 'a' || path[0] == 'b') && path[1] == '/') {
        path.erase(0, 2);
    }
    return path;
}

bool parse_uint(std::string_view s, std::size_t& i, std::int64_t& value) {
    if (i >= s.size() || s[i] < '0' || s[i] > '9') return false;
    value = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
        value = value * 10 + (s[i] - '0');
        ++i;
    }
    return true;
}

struct HunkHeader {
    std::int64_t old_start = 0, old_count = 0;
    std::int64_t new_start = 0, new_count = 0;
};

// "@@ -l[,n] +l[,n] @@ ..." -> header; counts default to 1 when omitted.
bool parse_hunk_header(std::string_view line, HunkHeader& h) {
    line = strip_cr(line);
    std::size_t i = 0;
    auto expect = [&](std::string_view lit) {
        if (line.substr(i, lit.size()) != lit) return false;
        i += lit.size();
        return true;
    };
    if (!expect("@@ -")) return false;
    if (!parse_uint(line, i, h.old_start)) return false;
    h.old_count = 1;
    if (i < line.size() && line[i] == ',') {
        ++i;
        if (!parse_uint(line, i, h.old_count)) return false;
    }
    if (!expect(" +")) return false;
    if (!parse_uint(line, i, h.new_start)) return false;
    h.new_count = 1;
    if (i < line.size() && line[i] == ',') {
        ++i;
        if (!parse_uint(line, i, h.new_count)) return false;
    }
    if (!expect(" @@")) return false;
    return true; // anything after the closing @@ is a section heading
}

struct FileSection {
    std::string old_path;
    std::string new_path;
    std::string fallback_path; // from the "diff --git" line
    bool binary = false;
    bool renamed = false;
    std::vector<Hunk> hunks;
    bool active = false;
};

void flush_section(FileSection& section, std::vector<FileDiff>& out) {
    if (!section.active) return;
    std::string path = section.new_path;
    if (path.empty() || path == "/dev/null") path = section.old_path;
    if (path.empty() || path == "/dev/null") path = section.fallback_path;

    if (section.binary) {
        std::cerr << "warning: skipping binary file in diff: " << path << "\n";
    } else if (section.renamed) {
        std::cerr << "warning: skipping renamed/copied file in diff: " << path << "\n";
    } else if (!section.hunks.empty()) {
        out.push_back(FileDiff{std::move(path), std::move(section.hunks)});
    }
    section = FileSection{};
}

// Extracts "b/..." from a `diff --git a/X b/Y` line; best effort, only used
// when the ---/+++ headers are absent (binary or rename sections).
std::string fallback_from_git_line(std::string_view payload) {
    payload = strip_cr(payload);
    const std::size_t b = payload.rfind(" b/");
    if (b == std::string_view::npos) return std::string(payload);
    return std::string(payload.substr(b + 3));
}

} // namespace

std::vector<FileDiff> parse_unified_diff(std::string_view diff_text) {
    std::vector<FileDiff> out;
    LineCursor cursor{diff_text};
    FileSection section;

    while (!cursor.done()) {
        const std::size_t line_offset = cursor.offset();
        const std::string_view raw = cursor.next();
        const std::string_view line = raw; // markers are ASCII, \r handled per use

        if (line.starts_with("diff --git ")) {
            flush_section(section, out);
            section.active = true;
            section.fallback_path = fallback_from_git_line(line.substr(11));
            continue;
        }
        if (line.starts_with("--- ")) {
            // Plain `diff -u` output has no "diff --git" prologue; a new
            // "--- " after parsed hunks starts the next file.
            if (!section.active || !section.hunks.empty()) {
                flush_section(section, out);
                section.active = true;
            }
            section.old_path = parse_header_path(line.substr(4));
            continue;
        }
        if (!section.active) continue; // prologue/commit-message noise

        if (line.starts_with("+++ ")) {
            section.new_path = parse_header_path(line.substr(4));
            continue;
        }
        if (line.starts_with("rename from ") || line.starts_with("rename to ") ||
            line.starts_with("copy from ") || line.starts_with("copy to ")) {
            section.renamed = true;
            continue;
        }
        if (line.starts_with("Binary files ") || line.starts_with("GIT binary patch")) {
            section.binary = true;
            continue;
        }
        if (line.starts_with("@@")) {
            HunkHeader header;
            if (!parse_hunk_header(line, header)) {
                throw DiffParseError("malformed hunk header", line_offset);
            }
            Hunk hunk;
            std::int64_t old_line = header.old_start;
            std::int64_t new_line = header.new_start;
            std::int64_t old_rem = header.old_count;
            std::int64_t new_rem = header.new_count;
            while (old_rem > 0 || new_rem > 0) {
                if (cursor.done()) {
                    throw DiffParseError("truncated hunk", diff_text.size());
                }
                const std::size_t body_offset = cursor.offset();
                const std::string_view body = cursor.next();
                if (body.starts_with('\\')) continue; // "\ No newline at end of file"
                const char marker = body.empty() ? ' ' : body[0];
                const std::string_view payload = body.empty() ? body : body.substr(1);
                if (marker == ' ') {
                    if (old_rem <= 0 || new_rem <= 0) {
                        throw DiffParseError("hunk body disagrees with header counts",
                                             body_offset);
                    }
                    ++old_line, ++new_line;
                    --old_rem, --new_rem;
                } else if (marker == '+') {
                    if (new_rem <= 0) {
                        throw DiffParseError("hunk body disagrees with header counts",
                                             body_offset);
                    }
                    hunk.added.emplace_back(new_line, std::string(payload));
                    ++new_line, --new_rem;
                } else if (marker == '-') {
                    if (old_rem <= 0) {
                        throw DiffParseError("hunk body disagrees with header counts",
                                             body_offset);
                    }
                    hunk.deleted.emplace_back(old_line, std::string(payload));
                    ++old_line, --old_rem;
                } else {
                    throw DiffParseError("unexpected line inside hunk", body_offset);
                }
            }
            if (!hunk.added.empty() || !hunk.deleted.empty()) {
                section.hunks.push_back(std::move(hunk));
            }
            continue;
        }
        // index/mode/similarity lines and other metadata: ignore.
    }
    flush_section(section, out);
    return out;
}

Change preprocess_change(Change change) {
    auto drop_blank = [](std::vector<std::string>& lines) {
        std::erase_if(lines, [](const std::string& l) { return text::is_blank(l); });
    };
    drop_blank(change.lines_added);
    drop_blank(change.lines_deleted);
    return change;
}

// ---------------------------------------------------------------------------
// Corpus file I/O
// ---------------------------------------------------------------------------

namespace {

json document_to_json(const CorpusDocument& doc) {
    json j;
    j["commit_hash"] = doc.commit_hash;
    j["file_path"] = doc.file_path;
    j["lines_added"] = doc.lines_added;
    j["lines_deleted"] = doc.lines_deleted;
    j["label"] = to_string(doc.label);
    j["author_ts"] = doc.author_ts;
    return j;
}

[[noreturn]] void record_error(std::size_t record, const std::string& msg) {
    throw CorpusError("corpus record " + std::to_string(record) + ": " + msg);
}

CorpusDocument document_from_json(const json& j, std::size_t record) {
    if (!j.is_object()) record_error(record, "expected a JSON object");
    auto require = [&](const char* field) -> const json& {
        auto it = j.find(field);
        if (it == j.end()) record_error(record, std::string("missing field \"") + field + "\"");
        return *it;
    };
    CorpusDocument doc;
    const json& hash = require("commit_hash");
    if (!hash.is_string()) record_error(record, "field \"commit_hash\" must be a string");
    doc.commit_hash = hash.get<std::string>();

    const json& path = require("file_path");
    if (!path.is_string()) record_error(record, "field \"file_path\" must be a string");
    doc.file_path = path.get<std::string>();

    auto read_lines = [&](const char* field, std::vector<std::string>& into) {
        const json& arr = require(field);
        if (!arr.is_array()) record_error(record, std::string("field \"") + field + "\" must be an array of strings");
        into.reserve(arr.size());
        for (const auto& item : arr) {
            if (!item.is_string()) record_error(record, std::string("field \"") + field + "\" must be an array of strings");
            into.push_back(item.get<std::string>());
        }
    };
    read_lines("lines_added", doc.lines_added);
    read_lines("lines_deleted", doc.lines_deleted);

    const json& label = require("label");
    if (!label.is_string()) record_error(record, "field \"label\" must be a string");
    try {
        doc.label = label_from_string(label.get<std::string>());
    } catch (const CorpusError& e) {
        record_error(record, e.what());
    }

    const json& ts = require("author_ts");
    if (!ts.is_number_integer()) record_error(record, "field \"author_ts\" must be an integer");
    doc.author_ts = ts.get<std::int64_t>();
    return doc;
}

} // namespace

std::vector<CorpusDocument> read_corpus_records(std::istream& in) {
    std::vector<CorpusDocument> docs;
    std::string line;
    std::size_t record = 0;
    while (std::getline(in, line)) {
        ++record;
        if (line.empty() || text::is_blank(line)) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) record_error(record, "invalid JSON");
        docs.push_back(document_from_json(j, record));
    }
    return docs;
}

void write_corpus_records(std::span<const CorpusDocument> docs, std::ostream& out) {
    for (const auto& doc : docs) {
        out << document_to_json(doc).dump() << '\n';
    }
}

std::vector<CorpusDocument> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open corpus file: " + path.string());
    return read_corpus_records(in);
}

void write_corpus(std::span<const CorpusDocument> docs, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw CorpusError("cannot open corpus file for writing: " + path.string());
    write_corpus_records(docs, out);
    out.flush();
    if (!out) throw CorpusError("failed writing corpus file: " + path.string());
}

CorpusDocument to_document(const Change& change, std::int64_t author_ts) {
    return CorpusDocument{change.commit_hash, change.file_path, change.lines_added,
                          change.lines_deleted, change.label,  author_ts};
}

Change to_change(const CorpusDocument& doc) {
    return Change{doc.commit_hash, doc.file_path, doc.lines_added, doc.lines_deleted, doc.label};
}

std::vector<CorpusDocument> commit_documents(const Commit& commit) {
    std::vector<CorpusDocument> docs;
    docs.reserve(commit.changes.size());
    for (const auto& change : commit.changes) {
        docs.push_back(to_document(change, commit.author_ts));
    }
    return docs;
}

std::vector<Commit> group_into_commits(std::span<const CorpusDocument> docs) {
    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return docs[a].author_ts < docs[b].author_ts;
    });

    std::vector<Commit> commits;
    std::unordered_map<std::string, std::size_t> by_hash;
    std::unordered_set<std::string> seen_change;
    for (const std::size_t i : order) {
        const CorpusDocument& doc = docs[i];
        if (!seen_change.insert(doc.commit_hash + "\x1f" + doc.file_path).second) {
            throw CorpusError("duplicate document for commit " + doc.commit_hash + " file " +
                              doc.file_path);
        }
        auto [it, inserted] = by_hash.emplace(doc.commit_hash, commits.size());
        if (inserted) {
            Commit c;
            c.hash = doc.commit_hash;
            c.author_ts = doc.author_ts;
            c.label = doc.label;
            commits.push_back(std::move(c));
        }
        Commit& commit = commits[it->second];
        if (commit.author_ts != doc.author_ts) {
            throw CorpusError("commit " + doc.commit_hash + " has inconsistent author_ts");
        }
        if (commit.label != doc.label) {
            throw CorpusError("commit " + doc.commit_hash + " has inconsistent labels");
        }
        commit.changes.push_back(to_change(doc));
        commit.la += static_cast<std::int64_t>(doc.lines_added.size());
    }
    return commits;
}

std::map<std::string, Label> load_label_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open label file: " + path.string());
    std::map<std::string, Label> labels;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || text::is_blank(line)) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw CorpusError("label file line " + std::to_string(number) +
                              ": expected \"commit_hash,label\"");
        }
        const std::string hash = line.substr(0, comma);
        std::string value = line.substr(comma + 1);
        try {
            labels[hash] = label_from_string(value);
        } catch (const CorpusError& e) {
            throw CorpusError("label file line " + std::to_string(number) + ": " + e.what());
        }
    }
    return labels;
}

std::uint64_t corpus_digest(std::span<const CorpusDocument> docs) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto mix = [&](std::string_view s) {
        for (const char c : s) {
            hash ^= static_cast<unsigned char>(c);
            hash *= 0x100000001b3ULL;
        }
    };
    std::ostringstream buffer;
    write_corpus_records(docs, buffer);
    mix(buffer.str());
    return hash;
}

} // namespace jitdp
