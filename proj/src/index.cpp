#include "jitdp/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "jitdp/analysis.hpp"

namespace jitdp {

const char* to_string(Field f) {
    return f == Field::CamelCase ? "camelcase" : "shingle";
}

namespace {

std::vector<Token> analyze_field(Field f, const std::vector<std::string>& lines) {
    std::vector<Token> tokens;
    for (const std::string& line : lines) {
        std::vector<Token> t = analyze(
            f == Field::CamelCase ? AnalyzerKind::CamelCase : AnalyzerKind::Shingle, line);
        tokens.insert(tokens.end(), std::make_move_iterator(t.begin()),
                      std::make_move_iterator(t.end()));
    }
    return tokens;
}

std::unordered_map<std::string, std::uint32_t> term_frequencies(std::vector<Token> tokens) {
    std::unordered_map<std::string, std::uint32_t> tf;
    for (Token& t : tokens) ++tf[std::move(t.text)];
    return tf;
}

} // namespace

InvertedIndex::InvertedIndex(Bm25Params params) : params_(params) {}

InvertedIndex::InvertedIndex(InvertedIndex&& other) noexcept {
    std::unique_lock lock(other.mutex_);
    params_ = other.params_;
    docs_ = std::move(other.docs_);
    postings_ = std::move(other.postings_);
    total_tokens_ = other.total_tokens_;
}

InvertedIndex& InvertedIndex::operator=(InvertedIndex&& other) noexcept {
    if (this != &other) {
        std::scoped_lock lock(mutex_, other.mutex_);
        params_ = other.params_;
        docs_ = std::move(other.docs_);
        postings_ = std::move(other.postings_);
        total_tokens_ = other.total_tokens_;
    }
    return *this;
}

std::uint32_t InvertedIndex::add_document(const Change& change, std::int64_t author_ts) {
    std::unique_lock lock(mutex_);
    return add_document_locked(change, author_ts);
}

std::uint32_t InvertedIndex::add_document(const CorpusDocument& doc) {
    return add_document(to_change(doc), doc.author_ts);
}

std::uint32_t InvertedIndex::add_document_locked(const Change& change, std::int64_t author_ts) {
    const auto doc_id = static_cast<std::uint32_t>(docs_.size());
    DocEntry entry;
    entry.commit_hash = change.commit_hash;
    entry.file_path = change.file_path;
    entry.label = change.label;
    entry.author_ts = author_ts;
    entry.added_line_count = static_cast<std::uint32_t>(change.lines_added.size());
    for (const Field f : kAllFields) {
        const int fi = static_cast<int>(f);
        std::vector<Token> tokens = analyze_field(f, change.lines_added);
        entry.field_length[fi] = tokens.size();
        total_tokens_[fi] += tokens.size();
        for (auto& [term, tf] : term_frequencies(std::move(tokens))) {
            postings_[fi][term].push_back(Posting{doc_id, tf});
        }
    }
    docs_.push_back(std::move(entry));
    return doc_id;
}

InvertedIndex InvertedIndex::build(std::span<const CorpusDocument> docs, Bm25Params params) {
    InvertedIndex idx(params);
    // Bulk path: accumulate (term, doc, tf) triples per field, then install
    // postings sorted by term with doc ids already in insertion order.
    struct Triple {
        std::string term;
        std::uint32_t doc_id;
        std::uint32_t tf;
    };
    std::array<std::vector<Triple>, kFieldCount> triples;
    idx.docs_.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const CorpusDocument& doc = docs[i];
        const auto doc_id = static_cast<std::uint32_t>(i);
        DocEntry entry;
        entry.commit_hash = doc.commit_hash;
        entry.file_path = doc.file_path;
        entry.label = doc.label;
        entry.author_ts = doc.author_ts;
        entry.added_line_count = static_cast<std::uint32_t>(doc.lines_added.size());
        for (const Field f : kAllFields) {
            const int fi = static_cast<int>(f);
            std::vector<Token> tokens = analyze_field(f, doc.lines_added);
            entry.field_length[fi] = tokens.size();
            idx.total_tokens_[fi] += tokens.size();
            for (auto& [term, tf] : term_frequencies(std::move(tokens))) {
                triples[fi].push_back(Triple{term, doc_id, tf});
            }
        }
        idx.docs_.push_back(std::move(entry));
    }
    for (const Field f : kAllFields) {
        const int fi = static_cast<int>(f);
        auto& list = triples[fi];
        std::sort(list.begin(), list.end(), [](const Triple& a, const Triple& b) {
            if (a.term != b.term) return a.term < b.term;
            return a.doc_id < b.doc_id;
        });
        for (auto& t : list) {
            idx.postings_[fi][t.term].push_back(Posting{t.doc_id, t.tf});
        }
    }
    return idx;
}

std::size_t InvertedIndex::doc_count() const {
    std::shared_lock lock(mutex_);
    return docs_.size();
}

std::uint64_t InvertedIndex::total_tokens(Field f) const {
    std::shared_lock lock(mutex_);
    return total_tokens_[static_cast<int>(f)];
}

double InvertedIndex::avg_field_length(Field f) const {
    std::shared_lock lock(mutex_);
    return avgdl_locked(f);
}

double InvertedIndex::avgdl_locked(Field f) const {
    if (docs_.empty()) return 0.0;
    return static_cast<double>(total_tokens_[static_cast<int>(f)]) /
           static_cast<double>(docs_.size());
}

std::uint32_t InvertedIndex::doc_frequency(Field f, std::string_view term) const {
    std::shared_lock lock(mutex_);
    const auto& field = postings_[static_cast<int>(f)];
    const auto it = field.find(std::string(term));
    return it == field.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
}

DocEntry InvertedIndex::doc(std::uint32_t doc_id) const {
    std::shared_lock lock(mutex_);
    if (doc_id >= docs_.size()) {
        throw std::out_of_range("doc_id " + std::to_string(doc_id) + " out of range");
    }
    return docs_[doc_id];
}

Bm25Params InvertedIndex::params() const {
    return params_;
}

double InvertedIndex::idf(std::uint32_t df) const {
    std::shared_lock lock(mutex_);
    const double n = static_cast<double>(docs_.size());
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

std::uint32_t InvertedIndex::tf_locked(Field f, const std::string& term,
                                       std::uint32_t doc_id) const {
    const auto& field = postings_[static_cast<int>(f)];
    const auto it = field.find(term);
    if (it == field.end()) return 0;
    const auto& list = it->second;
    const auto pos = std::lower_bound(list.begin(), list.end(), doc_id,
                                      [](const Posting& p, std::uint32_t id) {
                                          return p.doc_id < id;
                                      });
    if (pos == list.end() || pos->doc_id != doc_id) return 0;
    return pos->term_frequency;
}

double InvertedIndex::term_doc_score_locked(const SelectedTerm& term,
                                            std::uint32_t doc_id) const {
    const std::uint32_t tf = tf_locked(term.field, term.term, doc_id);
    if (tf == 0) return 0.0;
    const double len = static_cast<double>(docs_[doc_id].field_length[static_cast<int>(term.field)]);
    const double avgdl = avgdl_locked(term.field);
    const double norm = params_.k1 * (1.0 - params_.b + params_.b * len / avgdl);
    return term.idf * (tf * (params_.k1 + 1.0)) / (tf + norm);
}

double InvertedIndex::bm25_score(std::span<const QueryTerm> terms, std::uint32_t doc_id) const {
    std::shared_lock lock(mutex_);
    if (doc_id >= docs_.size()) {
        throw std::out_of_range("doc_id " + std::to_string(doc_id) + " out of range");
    }
    const double n = static_cast<double>(docs_.size());
    double score = 0.0;
    for (const QueryTerm& qt : terms) {
        const auto& field = postings_[static_cast<int>(qt.field)];
        const auto it = field.find(qt.term);
        const std::uint32_t df = it == field.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
        const double term_idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        score += term_doc_score_locked(SelectedTerm{qt.term, qt.field, term_idf}, doc_id);
    }
    return score;
}

std::vector<InvertedIndex::SelectedTerm> InvertedIndex::select_query_terms_locked(
    const Change& probe, const MltOptions& opts) const {
    std::vector<SelectedTerm> selected;
    const double n = static_cast<double>(docs_.size());
    for (const Field f : kAllFields) {
        const int fi = static_cast<int>(f);
        struct Candidate {
            std::string term;
            double weight;
            double idf;
        };
        std::vector<Candidate> candidates;
        for (auto& [term, tf] : term_frequencies(analyze_field(f, probe.lines_added))) {
            if (tf < opts.min_term_freq) continue;
            const auto it = postings_[fi].find(term);
            const std::uint32_t df =
                it == postings_[fi].end() ? 0 : static_cast<std::uint32_t>(it->second.size());
            if (df < opts.min_doc_freq) continue;
            const double term_idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
            candidates.push_back(Candidate{term, tf * term_idf, term_idf});
        }
        std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
            if (a.weight != b.weight) return a.weight > b.weight;
            return a.term < b.term;
        });
        if (candidates.size() > opts.max_query_terms) candidates.resize(opts.max_query_terms);
        for (auto& c : candidates) {
            selected.push_back(SelectedTerm{std::move(c.term), f, c.idf});
        }
    }
    return selected;
}

std::vector<SearchHit> InvertedIndex::mlt_query(const Change& probe, const MltOptions& opts) const {
    std::shared_lock lock(mutex_);
    return mlt_query_locked(probe, opts);
}

std::vector<SearchHit> InvertedIndex::mlt_query_locked(const Change& probe,
                                                       const MltOptions& opts) const {
    const std::vector<SelectedTerm> terms = select_query_terms_locked(probe, opts);
    if (terms.empty()) return {};

    // Term-at-a-time accumulation over the candidate documents.
    std::unordered_map<std::uint32_t, double> scores;
    for (const SelectedTerm& term : terms) {
        const auto& list = postings_[static_cast<int>(term.field)].at(term.term);
        for (const Posting& p : list) {
            scores[p.doc_id] += term_doc_score_locked(term, p.doc_id);
        }
    }

    std::vector<std::pair<std::uint32_t, double>> ranked(scores.begin(), scores.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > opts.top_k) ranked.resize(opts.top_k);

    std::vector<SearchHit> hits;
    hits.reserve(ranked.size());
    for (const auto& [doc_id, score] : ranked) {
        SearchHit hit;
        hit.doc_id = doc_id;
        hit.label = docs_[doc_id].label;
        hit.commit_hash = docs_[doc_id].commit_hash;
        hit.file_path = docs_[doc_id].file_path;
        // Recompute per term in the same order as the accumulation pass so
        // the contribution sum reproduces the score bit-for-bit.
        double total = 0.0;
        for (const SelectedTerm& term : terms) {
            const double c = term_doc_score_locked(term, doc_id);
            if (c != 0.0) {
                hit.term_contributions[term.term] += c;
                total += c;
            }
        }
        hit.relevance_score = total;
        hits.push_back(std::move(hit));
    }
    return hits;
}

std::vector<CommitSearchHit> InvertedIndex::mlt_query_commit(const Commit& probe,
                                                             const MltOptions& opts) const {
    std::shared_lock lock(mutex_);
    std::unordered_map<std::uint32_t, std::size_t> best; // doc_id -> slot in out
    std::vector<CommitSearchHit> out;
    for (std::size_t change_idx = 0; change_idx < probe.changes.size(); ++change_idx) {
        for (SearchHit& hit : mlt_query_locked(probe.changes[change_idx], opts)) {
            const auto [it, inserted] = best.emplace(hit.doc_id, out.size());
            if (inserted) {
                out.push_back(CommitSearchHit{std::move(hit), change_idx});
            } else if (hit.relevance_score > out[it->second].hit.relevance_score) {
                out[it->second] = CommitSearchHit{std::move(hit), change_idx};
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const CommitSearchHit& a, const CommitSearchHit& b) {
        if (a.hit.relevance_score != b.hit.relevance_score) {
            return a.hit.relevance_score > b.hit.relevance_score;
        }
        return a.hit.doc_id < b.hit.doc_id;
    });
    return out;
}

std::map<std::string, double> InvertedIndex::explain(const Change& probe, std::uint32_t doc_id,
                                                     const MltOptions& opts) const {
    std::shared_lock lock(mutex_);
    if (doc_id >= docs_.size()) {
        throw std::out_of_range("doc_id " + std::to_string(doc_id) + " out of range");
    }
    std::map<std::string, double> contributions;
    for (const SelectedTerm& term : select_query_terms_locked(probe, opts)) {
        const double c = term_doc_score_locked(term, doc_id);
        if (c != 0.0) contributions[term.term] += c;
    }
    if (contributions.empty()) {
        throw IndexError("document " + std::to_string(doc_id) +
                         " shares no query term with the probe");
    }
    return contributions;
}

std::vector<std::pair<std::string, std::vector<Posting>>> InvertedIndex::postings_snapshot(
    Field f) const {
    std::shared_lock lock(mutex_);
    std::vector<std::pair<std::string, std::vector<Posting>>> out(
        postings_[static_cast<int>(f)].begin(), postings_[static_cast<int>(f)].end());
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

// ---------------------------------------------------------------------------
// Snapshot format: little-endian, versioned magic, postings sorted by term.
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'J', 'D', 'P', 'I', 'D', 'X', '0', '1'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void u8(std::uint8_t v) { raw(&v, 1); }
    void u32(std::uint32_t v) {
        unsigned char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        raw(b, 4);
    }
    void u64(std::uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        raw(b, 8);
    }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        u64(bits);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
    void raw(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::uint8_t u8() {
        std::uint8_t v;
        raw(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        unsigned char b[4];
        raw(b, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        unsigned char b[8];
        raw(b, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
    std::string str() {
        const std::uint32_t n = u32();
        if (n > (1u << 28)) throw IndexError("corrupt snapshot: string length out of range");
        std::string s(n, '\0');
        raw(s.data(), n);
        return s;
    }
    void raw(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (!in_) throw IndexError("corrupt snapshot: unexpected end of file");
    }

private:
    std::istream& in_;
};

} // namespace

void InvertedIndex::save(const std::filesystem::path& path) const {
    std::shared_lock lock(mutex_);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IndexError("cannot open snapshot for writing: " + path.string());
    Writer w(out);
    w.raw(kMagic, sizeof(kMagic));
    w.u32(kVersion);
    w.f64(params_.k1);
    w.f64(params_.b);
    w.u64(docs_.size());
    for (const DocEntry& d : docs_) {
        w.str(d.commit_hash);
        w.str(d.file_path);
        w.u8(static_cast<std::uint8_t>(d.label));
        w.i64(d.author_ts);
        w.u32(d.added_line_count);
        for (const Field f : kAllFields) w.u64(d.field_length[static_cast<int>(f)]);
    }
    for (const Field f : kAllFields) {
        const int fi = static_cast<int>(f);
        w.u64(total_tokens_[fi]);
        std::vector<const std::pair<const std::string, std::vector<Posting>>*> terms;
        terms.reserve(postings_[fi].size());
        for (const auto& entry : postings_[fi]) terms.push_back(&entry);
        std::sort(terms.begin(), terms.end(),
                  [](const auto* a, const auto* b) { return a->first < b->first; });
        w.u64(terms.size());
        for (const auto* entry : terms) {
            w.str(entry->first);
            w.u64(entry->second.size());
            for (const Posting& p : entry->second) {
                w.u32(p.doc_id);
                w.u32(p.term_frequency);
            }
        }
    }
    out.flush();
    if (!out) throw IndexError("failed writing snapshot: " + path.string());
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IndexError("cannot open snapshot: " + path.string());
    Reader r(in);
    char magic[8];
    r.raw(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, 6) != 0) {
        throw IndexError("corrupt snapshot header: " + path.string());
    }
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw IndexError("snapshot version mismatch: " + path.string());
    }
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw IndexError("snapshot version mismatch: found " + std::to_string(version) +
                         ", expected " + std::to_string(kVersion));
    }
    InvertedIndex idx;
    idx.params_.k1 = r.f64();
    idx.params_.b = r.f64();
    const std::uint64_t doc_count = r.u64();
    idx.docs_.reserve(doc_count);
    for (std::uint64_t i = 0; i < doc_count; ++i) {
        DocEntry d;
        d.commit_hash = r.str();
        d.file_path = r.str();
        const std::uint8_t label = r.u8();
        if (label > 1) throw IndexError("corrupt snapshot: bad label");
        d.label = static_cast<Label>(label);
        d.author_ts = r.i64();
        d.added_line_count = r.u32();
        for (const Field f : kAllFields) d.field_length[static_cast<int>(f)] = r.u64();
        idx.docs_.push_back(std::move(d));
    }
    for (const Field f : kAllFields) {
        const int fi = static_cast<int>(f);
        const std::uint64_t stored_total = r.u64();
        const std::uint64_t term_count = r.u64();
        std::uint64_t check_total = 0;
        for (std::uint64_t t = 0; t < term_count; ++t) {
            std::string term = r.str();
            const std::uint64_t postings = r.u64();
            std::vector<Posting> list;
            list.reserve(postings);
            std::uint32_t prev = 0;
            for (std::uint64_t p = 0; p < postings; ++p) {
                Posting posting{r.u32(), r.u32()};
                if (posting.doc_id >= doc_count || posting.term_frequency == 0 ||
                    (p > 0 && posting.doc_id <= prev)) {
                    throw IndexError("corrupt snapshot: invalid posting list");
                }
                prev = posting.doc_id;
                list.push_back(posting);
            }
            idx.postings_[fi].emplace(std::move(term), std::move(list));
        }
        for (const DocEntry& d : idx.docs_) check_total += d.field_length[fi];
        if (check_total != stored_total) {
            throw IndexError("corrupt snapshot: token totals disagree");
        }
        idx.total_tokens_[fi] = stored_total;
    }
    return idx;
}

} // namespace jitdp
