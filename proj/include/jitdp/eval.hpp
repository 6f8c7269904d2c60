#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jitdp/classify.hpp"
#include "jitdp/corpus.hpp"
#include "jitdp/index.hpp"

namespace jitdp {

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One evaluation period. Ranges are half-open on Unix-second timestamps:
/// train [train_start, train_end), gap [train_end, gap_end),
/// test [gap_end, test_end).
struct PeriodSplit {
    int period_index = 0;
    std::int64_t train_start = 0;
    std::int64_t train_end = 0;
    std::int64_t gap_end = 0;
    std::int64_t test_end = 0;
};

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct ScoredLabel {
    double confidence = 0.0;
    Label truth = Label::Clean;
};

struct CommitMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double far = 0.0;
    double d2h = 0.0;
    std::optional<double> auc; // absent for single-class score sets
};

/// A ranked line paired with its true label.
struct LabeledRankedLine {
    std::size_t rank = 0; // 1-based, as produced by rank_lines
    bool buggy = false;
};

struct LineMetrics {
    double top_k_accuracy = 0.0;
    double recall_at_20pct_loc = 0.0;
    double effort_at_20pct_recall = 0.0;
    std::size_t ifa = 0; // clean lines ranked above the first buggy line
};

enum class EvalMode { Increasing, Constant };

const char* to_string(EvalMode mode);

/// Ground-truth buggy lines: commit hash -> 1-based positions within the
/// commit's flattened added lines. Lines not listed are clean.
struct LineTruth {
    std::map<std::string, std::set<std::size_t>> buggy_positions;
};

struct MetricReport {
    int period_index = 0;
    std::int64_t train_start = 0, train_end = 0, gap_end = 0, test_end = 0;
    std::size_t train_commits = 0, test_commits = 0;
    std::size_t train_buggy = 0, test_buggy = 0;
    ConfusionCounts counts;
    CommitMetrics commit;
    // Medians over evaluated commits; absent when no commit had line truth.
    std::optional<double> top_k_accuracy;
    std::optional<double> recall_at_20pct_loc;
    std::optional<double> effort_at_20pct_recall;
    std::optional<std::size_t> ifa;
    std::size_t line_eval_commits = 0;
    std::optional<double> tuned_t_score;
    std::optional<double> tuned_t_auc;
    std::optional<LaModel> la_model;
};

struct EvalConfig {
    EvalMode mode = EvalMode::Increasing;
    int window_days = 180;
    int gap_days = 0;
    ClassifierConfig classifier;
    MltOptions mlt;
    std::size_t line_top_k = 10;
    std::size_t buggy_token_top_m = 20;
    int threads = 1;
    // Invoked after each period is evaluated, with the training index used
    // for it; lets callers audit online/batch equivalence.
    std::function<void(const PeriodSplit&, const InvertedIndex&)> on_period;
};

/// Consecutive windows of window_days from the first commit; each window
/// with at least one commit and at least one training commit before its gap
/// becomes a test period. Corpus must be sorted by author_ts ascending.
/// Throws EvalError when the corpus spans fewer than window+gap days or no
/// evaluable period exists.
std::vector<PeriodSplit> split_periods(std::span<const Commit> corpus, int window_days,
                                       int gap_days);

/// Confusion-derived rates plus pair-counting AUC (ties count one half).
CommitMetrics commit_metrics(const ConfusionCounts& counts, std::span<const ScoredLabel> scores);

/// Ranking metrics over one commit's ranked lines. lines must be in rank
/// order (rank 1 first) and non-empty; k >= 1.
LineMetrics line_metrics(std::span<const LabeledRankedLine> lines, std::size_t k);

/// Chronological online evaluation: per period, builds (or extends) the
/// index from training changes, tunes T_score when the threshold classifier
/// is active without an explicit value, classifies every test commit, ranks
/// lines of predicted-buggy commits with line truth, and emits one report.
/// No test commit or any later commit enters the index before it is
/// classified.
std::vector<MetricReport> run_evaluation(std::span<const Commit> corpus, const EvalConfig& cfg,
                                         const LineTruth* line_truth = nullptr);

/// Median across periods of every metric; absent values are skipped.
/// IFA uses the lower median to stay integral.
struct MedianSummary {
    std::optional<double> precision, recall, f1, far, d2h, auc;
    std::optional<double> top_k_accuracy, recall_at_20pct_loc, effort_at_20pct_recall;
    std::optional<std::size_t> ifa;
};

MedianSummary summarize(std::span<const MetricReport> reports);

// Machine-readable emission (External Interfaces of this module).
void write_reports_csv(std::span<const MetricReport> reports, std::ostream& out);
std::string report_to_json(const MetricReport& report);   // one JSON object
std::string summary_to_json(const MedianSummary& summary); // one JSON object

} // namespace jitdp
