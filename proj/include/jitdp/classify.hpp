#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "jitdp/corpus.hpp"
#include "jitdp/index.hpp"

namespace jitdp {

class ClassifyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A retrieved past change. Lists handed to classifiers are sorted by
/// relevance_score descending. probe_change records which change of the
/// probe commit produced the (maximal) score.
struct CandidateMatch {
    double relevance_score = 0.0;
    Label label = Label::Clean;
    std::uint32_t doc_id = 0;
    std::string commit_hash;
    std::size_t probe_change = 0;
};

struct Prediction {
    Label verdict = Label::Clean;
    double confidence = 0.0; // in [0, 1]
    std::vector<CandidateMatch> supporting_matches;
};

struct ThresholdConfig {
    double t_score = 0.0;
};

struct TunedThreshold {
    ThresholdConfig config;
    double validation_auc = 0.0;
};

/// Logistic model over the lines-added feature:
/// P(buggy | la) = sigmoid(weight * x + intercept), x = ln(1+la) when
/// log_transform else la.
struct LaModel {
    double weight = 0.0;
    double intercept = 0.0;
    bool log_transform = true;
};

struct LaExample {
    std::int64_t la = 0;
    Label label = Label::Clean;
};

struct LaTrainOptions {
    bool log_transform = true;
    double l2_lambda = 1e-4;
    double gradient_tolerance = 1e-8;
    std::size_t max_iterations = 10000;
};

struct ValidationQuery {
    std::vector<CandidateMatch> matches; // sorted by score descending
    Label true_label = Label::Clean;
};

/// Majority label among the top min(k, |matches|) matches; ties at even k
/// go to buggy. Confidence is the buggy fraction among those matches; an
/// empty list yields clean with confidence 0.
Prediction knn_classify(std::span<const CandidateMatch> matches, std::size_t k);

/// Buggy iff the highest-scoring buggy match scores strictly above t_score.
/// That match is the sole support when one exists.
Prediction threshold_classify(std::span<const CandidateMatch> matches,
                              const ThresholdConfig& cfg);

/// Sweeps the distinct top-buggy-match scores (plus 0 and +inf sentinels)
/// and returns the threshold maximizing validation AUC of the induced
/// binary classifier; ties break toward the larger threshold. An infinite
/// winner is reported as the largest observed score (same classifier).
/// Throws ClassifyError on a single-class validation set.
TunedThreshold tune_threshold(std::span<const ValidationQuery> validation);

/// Fits the la logistic model by damped Newton iterations on the
/// L2-regularized log-likelihood. Throws std::invalid_argument on empty
/// training data.
LaModel train_la(std::span<const LaExample> training, const LaTrainOptions& opts = {});

Prediction la_classify(const LaModel& model, std::int64_t la);

/// Soft vote: buggy iff the mean member confidence is >= 0.5; confidence is
/// that mean; supports are the union of member supports. Requires at least
/// two members.
Prediction ensemble_classify(std::span<const Prediction> predictions);

// --- commit-level pipeline -------------------------------------------------

struct ClassifierConfig {
    bool use_knn = true;
    std::size_t knn_k = 3;
    bool use_threshold = false;
    std::optional<double> t_score; // nullopt: tune on training data
    bool use_la = true;
    bool la_log_transform = true;
};

struct CommitPrediction {
    Prediction final;
    std::vector<std::string> member_names;
    std::vector<Prediction> members;
    std::vector<CandidateMatch> candidates;
};

/// Merged, score-sorted candidate set for one probe commit (all per-change
/// query results deduplicated per indexed document). Hits on
/// exclude_commit_hash are dropped; tuning uses this to leave the probe's
/// own indexed changes out.
std::vector<CandidateMatch> collect_candidates(const InvertedIndex& index, const Commit& probe,
                                               const MltOptions& opts,
                                               std::string_view exclude_commit_hash = {});

/// Runs the enabled member classifiers over the probe's candidate set and
/// combines them (ensemble when two or more members are active). The
/// threshold member is active only when a ThresholdConfig is supplied, the
/// la member only when a trained model is supplied.
CommitPrediction predict_commit(const InvertedIndex& index, const Commit& probe,
                                const ClassifierConfig& cfg, const MltOptions& mlt,
                                const std::optional<LaModel>& la_model,
                                const std::optional<ThresholdConfig>& threshold);

} // namespace jitdp
