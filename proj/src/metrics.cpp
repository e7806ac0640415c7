#include "tracerec/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "tracerec/diagnostics.hpp"
#include "tracerec/error.hpp"
#include "tracerec/recovery.hpp"

namespace tracerec {

namespace {

// Guards recall-level comparisons against 0.1-step rounding (3·0.1 > 0.3).
constexpr double kLevelSlack = 1e-9;

void require_relevant(const IdSet& relevant, std::string_view what) {
    if (relevant.empty()) throw ValidationError(std::string(what) + " is undefined without relevant items");
}

}  // namespace

PrecisionRecall precision_recall(const IdSet& retrieved, const IdSet& relevant) {
    std::size_t hits = 0;
    for (const auto& id : retrieved) hits += relevant.count(id);
    PrecisionRecall out;
    out.empty_retrieval = retrieved.empty();
    out.precision = retrieved.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(retrieved.size());
    if (!relevant.empty()) out.recall = static_cast<double>(hits) / static_cast<double>(relevant.size());
    return out;
}

double f_measure(double precision, double recall, double beta) {
    const double b2 = beta * beta;
    const double denominator = b2 * precision + recall;
    if (denominator == 0.0) return 0.0;
    return (1.0 + b2) * precision * recall / denominator;
}

std::vector<CutResult> precision_at_cuts(std::span<const std::string> ranking, const IdSet& relevant,
                                         std::span<const std::size_t> cuts) {
    require_relevant(relevant, "precision at cut");
    std::vector<CutResult> out;
    out.reserve(cuts.size());
    std::size_t hits = 0;
    std::size_t position = 0;
    std::size_t previous = 0;
    for (auto k : cuts) {
        if (k == 0 || k <= previous) throw ValidationError("cut levels must be positive and strictly ascending");
        previous = k;
        while (position < k && position < ranking.size()) hits += relevant.count(ranking[position++]);
        out.push_back({k, static_cast<double>(hits) / static_cast<double>(k),
                       static_cast<double>(hits) / static_cast<double>(relevant.size())});
    }
    return out;
}

std::vector<PRPoint> interpolated_curve(std::span<const std::string> ranking, const IdSet& relevant,
                                        std::span<const double> levels) {
    require_relevant(relevant, "interpolated precision");
    const auto r = static_cast<double>(relevant.size());
    // best[i]: max precision at rank >= i+1; hits_at[i]: hits within the first i+1.
    std::vector<std::size_t> hits_at(ranking.size());
    std::vector<double> best(ranking.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        hits += relevant.count(ranking[i]);
        hits_at[i] = hits;
        best[i] = static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    for (std::size_t i = ranking.size(); i-- > 1;) best[i - 1] = std::max(best[i - 1], best[i]);

    std::vector<PRPoint> curve;
    curve.reserve(levels.size());
    for (double level : levels) {
        double p = 0.0;
        // Recall is non-decreasing in rank: the first rank reaching the level
        // carries the maximum over all later ranks.
        for (std::size_t i = 0; i < ranking.size(); ++i) {
            if (static_cast<double>(hits_at[i]) + kLevelSlack >= level * r) {
                p = best[i];
                break;
            }
        }
        curve.push_back({level, p});
    }
    return curve;
}

double average_precision(std::span<const std::string> ranking, const IdSet& relevant) {
    require_relevant(relevant, "average precision");
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        if (relevant.count(ranking[i])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

double mean_average_precision(std::span<const double> average_precisions) {
    if (average_precisions.empty()) return 0.0;
    double sum = 0.0;
    for (double ap : average_precisions) sum += ap;
    return sum / static_cast<double>(average_precisions.size());
}

double ndcg(std::span<const std::string> ranking, const std::map<std::string, double>& gains, std::size_t k) {
    if (k == 0) throw ValidationError("NDCG cut must be positive");
    std::vector<double> ideal;
    for (const auto& [id, g] : gains) {
        if (g < 0.0 || !std::isfinite(g)) throw ValidationError("NDCG gains must be finite and non-negative");
        if (g > 0.0) ideal.push_back(g);
    }
    if (ideal.empty()) throw ValidationError("NDCG is undefined when every gain is zero");
    std::sort(ideal.begin(), ideal.end(), std::greater<>());

    double dcg = 0.0;
    for (std::size_t i = 0; i < k && i < ranking.size(); ++i) {
        auto it = gains.find(ranking[i]);
        if (it != gains.end()) dcg += it->second / std::log2(static_cast<double>(i) + 2.0);
    }
    double idcg = 0.0;
    for (std::size_t i = 0; i < k && i < ideal.size(); ++i) idcg += ideal[i] / std::log2(static_cast<double>(i) + 2.0);
    return dcg / idcg;
}

std::string_view to_string(Quality q) {
    switch (q) {
        case Quality::unacceptable: return "unacceptable";
        case Quality::acceptable: return "acceptable";
        case Quality::good: return "good";
        case Quality::excellent: return "excellent";
    }
    return "?";
}

void QualityConfig::validate() const {
    for (const auto* t : {&acceptable, &good, &excellent}) {
        if (!(t->min_recall >= 0.0 && t->min_recall <= 1.0 && t->min_precision >= 0.0 && t->min_precision <= 1.0)) {
            throw ValidationError("quality thresholds must lie in [0, 1]");
        }
    }
    const bool nested = good.min_recall >= acceptable.min_recall && good.min_precision >= acceptable.min_precision &&
                        excellent.min_recall >= good.min_recall && excellent.min_precision >= good.min_precision;
    if (!nested) throw ValidationError("quality tiers must be nested: excellent >= good >= acceptable");
}

Quality classify_quality(double recall, double precision, const QualityConfig& config) {
    config.validate();
    auto meets = [&](const QualityThreshold& t) { return recall >= t.min_recall && precision >= t.min_precision; };
    if (meets(config.excellent)) return Quality::excellent;
    if (meets(config.good)) return Quality::good;
    if (meets(config.acceptable)) return Quality::acceptable;
    return Quality::unacceptable;
}

MetricsReport evaluate(const RunFile& run, const GoldStandard& gold, std::span<const std::size_t> cuts,
                       const std::optional<QualityConfig>& quality) {
    if (quality) quality->validate();
    MetricsReport report;
    report.run_tag = run.tag;
    report.gold_fingerprint = gold.fingerprint();
    report.cuts.assign(cuts.begin(), cuts.end());
    if (auto n = tag_value(run.tag, "ntargets"); !n.empty()) {
        std::from_chars(n.data(), n.data() + n.size(), report.n_targets);
    }
    report.quality_config = quality;

    IdSet all_sources;
    for (const auto& [source, entries] : run.entries) all_sources.insert(source);
    for (auto& source : gold.sources()) all_sources.insert(std::move(source));

    static const std::vector<RunEntry> kNoEntries;
    std::vector<double> aps;
    for (const auto& source : all_sources) {
        const auto& relevant = gold.relevant_for(source);
        if (relevant.empty()) {
            report.excluded_sources.push_back(source);
            continue;
        }
        auto it = run.entries.find(source);
        const auto& entries = it == run.entries.end() ? kNoEntries : it->second;
        Ranking ranking;
        ranking.reserve(entries.size());
        for (const auto& e : entries) ranking.push_back(e.target_id);

        SourceMetrics m;
        m.source_id = source;
        m.retrieved = ranking.size();
        m.relevant = relevant.size();
        const auto pr = precision_recall(IdSet(ranking.begin(), ranking.end()), relevant);
        m.empty_retrieval = pr.empty_retrieval;
        m.precision = pr.precision;
        m.recall = *pr.recall;
        m.hits = static_cast<std::size_t>(std::lround(m.recall * static_cast<double>(m.relevant)));
        m.f1 = f_measure(m.precision, m.recall);
        m.average_precision = average_precision(ranking, relevant);
        m.cuts = precision_at_cuts(ranking, relevant, cuts);
        std::map<std::string, double> gains;
        for (const auto& id : relevant) gains.emplace(id, 1.0);
        for (auto k : cuts) m.ndcg.push_back(ndcg(ranking, gains, k));
        m.curve = interpolated_curve(ranking, relevant);
        if (quality) m.quality = classify_quality(m.recall, m.precision, *quality);
        if (m.empty_retrieval) warn("source '" + source + "' has gold links but no candidate links");
        aps.push_back(m.average_precision);
        report.sources.push_back(std::move(m));
    }

    auto& macro = report.macro;
    macro.cuts.resize(cuts.size());
    macro.ndcg.assign(cuts.size(), 0.0);
    macro.curve.resize(kRecallLevels.size());
    for (std::size_t i = 0; i < cuts.size(); ++i) macro.cuts[i].k = cuts[i];
    for (std::size_t i = 0; i < kRecallLevels.size(); ++i) macro.curve[i].recall_level = kRecallLevels[i];
    const auto n = static_cast<double>(report.sources.size());
    if (!report.sources.empty()) {
        // Sum first, divide once: n identical values average to exactly that value.
        for (const auto& m : report.sources) {
            macro.precision += m.precision;
            macro.recall += m.recall;
            macro.f1 += m.f1;
            for (std::size_t i = 0; i < cuts.size(); ++i) {
                macro.cuts[i].precision += m.cuts[i].precision;
                macro.cuts[i].recall += m.cuts[i].recall;
                macro.ndcg[i] += m.ndcg[i];
            }
            for (std::size_t i = 0; i < kRecallLevels.size(); ++i) macro.curve[i].precision += m.curve[i].precision;
        }
        macro.precision /= n;
        macro.recall /= n;
        macro.f1 /= n;
        for (std::size_t i = 0; i < cuts.size(); ++i) {
            macro.cuts[i].precision /= n;
            macro.cuts[i].recall /= n;
            macro.ndcg[i] /= n;
        }
        for (auto& point : macro.curve) point.precision /= n;
        macro.map = mean_average_precision(aps);
    } else {
        warn("no evaluated source has gold links; macro averages are 0");
    }
    if (quality) macro.quality = classify_quality(macro.recall, macro.precision, *quality);
    return report;
}

std::vector<std::size_t> parse_cuts(std::string_view text) {
    std::vector<std::size_t> cuts;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        auto item = text.substr(start, end - start);
        std::size_t k = 0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), k);
        if (ec != std::errc{} || p != item.data() + item.size() || k == 0) {
            throw ValidationError("invalid cut list '" + std::string(text) + "'");
        }
        if (!cuts.empty() && k <= cuts.back()) throw ValidationError("cut levels must be strictly ascending");
        cuts.push_back(k);
        start = end + 1;
    }
    return cuts;
}

}  // namespace tracerec
