#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracerec/corpus.hpp"

namespace tracerec {

/// TREC cut levels.
inline constexpr std::array<std::size_t, 6> kDefaultCuts{5, 10, 15, 30, 100, 200};
/// TREC interpolation points 0.0, 0.1, ..., 1.0.
inline constexpr std::array<double, 11> kRecallLevels{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

using Ranking = std::vector<std::string>;
using IdSet = std::set<std::string>;

struct PrecisionRecall {
    double precision = 0.0;
    std::optional<double> recall;  // undefined when nothing is relevant
    bool empty_retrieval = false;
};

PrecisionRecall precision_recall(const IdSet& retrieved, const IdSet& relevant);

/// (1+β²)pr / (β²p + r), 0 when p = r = 0.
double f_measure(double precision, double recall, double beta = 1.0);

struct CutResult {
    std::size_t k = 0;
    double precision = 0.0;
    double recall = 0.0;
    friend bool operator==(const CutResult&, const CutResult&) = default;
};

/// precision@k divides by k even when the ranking is shorter. `cuts` must be
/// positive and ascending; `relevant` non-empty.
std::vector<CutResult> precision_at_cuts(std::span<const std::string> ranking, const IdSet& relevant,
                                         std::span<const std::size_t> cuts);

struct PRPoint {
    double recall_level = 0.0;
    double precision = 0.0;
    friend bool operator==(const PRPoint&, const PRPoint&) = default;
};

/// Interpolated precision: at level ℓ, the best precision at any rank whose
/// recall is at least ℓ (0 if no rank reaches ℓ).
std::vector<PRPoint> interpolated_curve(std::span<const std::string> ranking, const IdSet& relevant,
                                        std::span<const double> levels = kRecallLevels);

/// Mean of the precision values at the ranks of retrieved relevant items,
/// divided by |relevant| so that missed items count as zero.
double average_precision(std::span<const std::string> ranking, const IdSet& relevant);

double mean_average_precision(std::span<const double> average_precisions);

/// DCG@k / IDCG@k with discount log₂(i+1). Items absent from `gains` have
/// gain 0. Throws ValidationError if no gain is positive.
double ndcg(std::span<const std::string> ranking, const std::map<std::string, double>& gains, std::size_t k);

enum class Quality { unacceptable, acceptable, good, excellent };

std::string_view to_string(Quality q);

struct QualityThreshold {
    double min_recall = 0.0;
    double min_precision = 0.0;
    friend bool operator==(const QualityThreshold&, const QualityThreshold&) = default;
};

/// Acceptable / Good / Excellent operating regions. Thresholds must lie in
/// [0, 1] and be nested (each tier at least as strict as the one below).
struct QualityConfig {
    QualityThreshold acceptable;
    QualityThreshold good;
    QualityThreshold excellent;

    void validate() const;
    friend bool operator==(const QualityConfig&, const QualityConfig&) = default;
};

Quality classify_quality(double recall, double precision, const QualityConfig& config);

struct SourceMetrics {
    std::string source_id;
    std::size_t retrieved = 0;
    std::size_t relevant = 0;
    std::size_t hits = 0;
    bool empty_retrieval = false;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double average_precision = 0.0;
    std::vector<CutResult> cuts;
    std::vector<double> ndcg;  // one per cut
    std::vector<PRPoint> curve;
    std::optional<Quality> quality;
};

struct MacroMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double map = 0.0;
    std::vector<CutResult> cuts;
    std::vector<double> ndcg;
    std::vector<PRPoint> curve;
    std::optional<Quality> quality;
};

struct MetricsReport {
    std::string run_tag;
    std::string gold_fingerprint;
    std::size_t n_targets = 0;  // candidate targets per the run tag, 0 if unknown
    std::vector<std::size_t> cuts;
    std::vector<SourceMetrics> sources;         // sources with >= 1 gold link, ascending id
    std::vector<std::string> excluded_sources;  // run sources without gold links
    MacroMetrics macro;
    std::optional<QualityConfig> quality_config;
};

/// Evaluates every source that has gold links or candidate links. Sources
/// with gold links but no candidates count as empty retrievals; sources
/// without gold links are listed as excluded and left out of the averages.
MetricsReport evaluate(const RunFile& run, const GoldStandard& gold,
                       std::span<const std::size_t> cuts = kDefaultCuts,
                       const std::optional<QualityConfig>& quality = std::nullopt);

/// Parses "5,10,15" into ascending, positive, distinct cut levels.
std::vector<std::size_t> parse_cuts(std::string_view text);

}  // namespace tracerec
