#include "tracerec/report.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "tracerec/error.hpp"

namespace tracerec {

namespace {

using json = nlohmann::ordered_json;

json real(double x) {
    if (!std::isfinite(x)) return nullptr;
    if (std::abs(x) >= 1e12) return x;
    return quantize_score(x);
}

json optional_real(const std::optional<double>& x) { return x ? real(*x) : json(nullptr); }

json quality_json(const std::optional<Quality>& q) { return q ? json(std::string(to_string(*q))) : json(nullptr); }

json cuts_json(const std::vector<CutResult>& cuts) {
    json out = json::array();
    for (const auto& c : cuts) out.push_back({{"k", c.k}, {"precision", real(c.precision)}, {"recall", real(c.recall)}});
    return out;
}

json ndcg_json(const std::vector<std::size_t>& cuts, const std::vector<double>& values) {
    json out = json::array();
    for (std::size_t i = 0; i < values.size(); ++i) out.push_back({{"k", cuts.at(i)}, {"value", real(values[i])}});
    return out;
}

json curve_json(const std::vector<PRPoint>& curve) {
    json out = json::array();
    for (const auto& p : curve) out.push_back({{"recall_level", real(p.recall_level)}, {"precision", real(p.precision)}});
    return out;
}

json threshold_json(const QualityThreshold& t) {
    return {{"min_recall", real(t.min_recall)}, {"min_precision", real(t.min_precision)}};
}

json quality_config_json(const QualityConfig& c) {
    return {{"acceptable", threshold_json(c.acceptable)}, {"good", threshold_json(c.good)},
            {"excellent", threshold_json(c.excellent)}};
}

json summary_json(const CountSummary& s) {
    return {{"min", s.min}, {"median", real(s.median)}, {"max", s.max}, {"total", s.total}};
}

json profile_json(const CorpusProfile& p) {
    json kinds = json::object();
    for (const auto& [kind, count] : p.kind_counts) kinds[kind] = count;
    json histogram = json::array();
    for (const auto& [links, sources] : p.links_per_source) histogram.push_back({{"links", links}, {"sources", sources}});
    return {{"name", p.name},
            {"context", p.context},
            {"artifact_count", p.artifact_count},
            {"kind_counts", kinds},
            {"tokens_before", summary_json(p.tokens_before)},
            {"tokens_after", summary_json(p.tokens_after)},
            {"vocabulary_unstemmed", p.vocabulary_unstemmed},
            {"vocabulary_stemmed", p.vocabulary_stemmed},
            {"gold_links", p.gold_links},
            {"linked_sources", p.linked_sources},
            {"links_per_source", histogram},
            {"preprocessing", p.preprocessing}};
}

json metrics_json(const MetricsReport& r) {
    json sources = json::array();
    for (const auto& s : r.sources) {
        sources.push_back({{"source_id", s.source_id},
                           {"retrieved", s.retrieved},
                           {"relevant", s.relevant},
                           {"hits", s.hits},
                           {"empty_retrieval", s.empty_retrieval},
                           {"precision", real(s.precision)},
                           {"recall", real(s.recall)},
                           {"f1", real(s.f1)},
                           {"average_precision", real(s.average_precision)},
                           {"cuts", cuts_json(s.cuts)},
                           {"ndcg", ndcg_json(r.cuts, s.ndcg)},
                           {"curve", curve_json(s.curve)},
                           {"quality", quality_json(s.quality)}});
    }
    const auto& m = r.macro;
    json macro = {{"precision", real(m.precision)},
                  {"recall", real(m.recall)},
                  {"f1", real(m.f1)},
                  {"map", real(m.map)},
                  {"cuts", cuts_json(m.cuts)},
                  {"ndcg", ndcg_json(r.cuts, m.ndcg)},
                  {"curve", curve_json(m.curve)},
                  {"quality", quality_json(m.quality)}};
    return {{"run_tag", r.run_tag},
            {"gold_fingerprint", r.gold_fingerprint},
            {"n_targets", r.n_targets},
            {"cuts", r.cuts},
            {"quality_config", r.quality_config ? quality_config_json(*r.quality_config) : json(nullptr)},
            {"macro", macro},
            {"sources", sources},
            {"excluded_sources", r.excluded_sources}};
}

json equivalence_json(const EquivalenceResult& e) {
    return {{"n", e.n},
            {"mean", real(e.mean)},
            {"sd", real(e.sd)},
            {"delta", real(e.delta)},
            {"alpha", real(e.alpha)},
            {"df", real(e.df)},
            {"t_lower", real(e.t_lower)},
            {"t_upper", real(e.t_upper)},
            {"p_lower", real(e.p_lower)},
            {"p_upper", real(e.p_upper)},
            {"ci_low", real(e.ci_low)},
            {"ci_high", real(e.ci_high)},
            {"confidence", real(1.0 - 2.0 * e.alpha)},
            {"verdict", e.equivalent ? "equivalent" : "not shown equivalent"},
            {"cohens_d", optional_real(e.cohens_d)}};
}

json monte_carlo_json(const MonteCarloResult& mc) {
    return {{"p_value", real(mc.p_value)},
            {"mean", real(mc.mean)},
            {"sd", real(mc.sd)},
            {"replications", mc.replications},
            {"seed", mc.seed}};
}

json comparison_json(const ComparisonReport& c) {
    json rows = json::array();
    for (std::size_t i = 0; i < c.sources.size(); ++i) {
        rows.push_back({{"source_id", c.sources[i]},
                        {"a", real(c.values_a[i])},
                        {"b", real(c.values_b[i])},
                        {"difference", real(c.differences[i])}});
    }
    return {{"metric", c.metric},
            {"run_a", c.run_a},
            {"run_b", c.run_b},
            {"gold_fingerprint", c.gold_fingerprint},
            {"equivalence", equivalence_json(c.equivalence)},
            {"signs", {{"wins", c.signs.wins}, {"ties", c.signs.ties}, {"losses", c.signs.losses}}},
            {"permutation", c.permutation ? monte_carlo_json(*c.permutation) : json(nullptr)},
            {"paired_values", rows}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Reading side: tolerant of key order, strict about presence and types.

double read_real(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nan("");
    return v.get<double>();
}

QualityThreshold read_threshold(const nlohmann::json& j, const char* tier) {
    if (!j.contains(tier) || !j[tier].is_object()) {
        throw ValidationError(std::string("quality config is missing tier '") + tier + "'");
    }
    const auto& t = j[tier];
    for (const auto& [key, value] : t.items()) {
        if (key != "min_recall" && key != "min_precision") {
            throw ValidationError("unknown quality threshold field '" + key + "'");
        }
        if (!value.is_number()) throw ValidationError("quality threshold '" + key + "' must be a number");
    }
    if (!t.contains("min_recall") || !t.contains("min_precision")) {
        throw ValidationError(std::string("quality tier '") + tier + "' needs min_recall and min_precision");
    }
    return {t["min_recall"].get<double>(), t["min_precision"].get<double>()};
}

QualityConfig read_quality_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("quality config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key != "acceptable" && key != "good" && key != "excellent" && key != "note") {
            throw ValidationError("unknown quality config field '" + key + "'");
        }
    }
    QualityConfig c{read_threshold(j, "acceptable"), read_threshold(j, "good"), read_threshold(j, "excellent")};
    c.validate();
    return c;
}

std::optional<Quality> read_quality(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    const auto name = j.get<std::string>();
    for (auto q : {Quality::unacceptable, Quality::acceptable, Quality::good, Quality::excellent}) {
        if (to_string(q) == name) return q;
    }
    throw ValidationError("unknown quality tier '" + name + "'");
}

std::vector<CutResult> read_cuts(const nlohmann::json& j) {
    std::vector<CutResult> out;
    for (const auto& c : j) out.push_back({c.at("k").get<std::size_t>(), read_real(c, "precision"), read_real(c, "recall")});
    return out;
}

std::vector<double> read_ndcg(const nlohmann::json& j) {
    std::vector<double> out;
    for (const auto& c : j) out.push_back(read_real(c, "value"));
    return out;
}

std::vector<PRPoint> read_curve(const nlohmann::json& j) {
    std::vector<PRPoint> out;
    for (const auto& p : j) out.push_back({read_real(p, "recall_level"), read_real(p, "precision")});
    return out;
}

}  // namespace

std::string profile_to_json(const CorpusProfile& profile) { return dump(profile_json(profile)); }

std::string metrics_to_json(const MetricsReport& report) { return dump(metrics_json(report)); }

MetricsReport parse_metrics_report(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("metrics report is not valid JSON: ") + e.what());
    }
    try {
        MetricsReport r;
        r.run_tag = j.at("run_tag").get<std::string>();
        r.gold_fingerprint = j.at("gold_fingerprint").get<std::string>();
        r.n_targets = j.at("n_targets").get<std::size_t>();
        r.cuts = j.at("cuts").get<std::vector<std::size_t>>();
        if (!j.at("quality_config").is_null()) r.quality_config = read_quality_config(j["quality_config"]);
        for (const auto& s : j.at("sources")) {
            SourceMetrics m;
            m.source_id = s.at("source_id").get<std::string>();
            m.retrieved = s.at("retrieved").get<std::size_t>();
            m.relevant = s.at("relevant").get<std::size_t>();
            m.hits = s.at("hits").get<std::size_t>();
            m.empty_retrieval = s.at("empty_retrieval").get<bool>();
            m.precision = read_real(s, "precision");
            m.recall = read_real(s, "recall");
            m.f1 = read_real(s, "f1");
            m.average_precision = read_real(s, "average_precision");
            m.cuts = read_cuts(s.at("cuts"));
            m.ndcg = read_ndcg(s.at("ndcg"));
            m.curve = read_curve(s.at("curve"));
            m.quality = read_quality(s.at("quality"));
            if (m.cuts.size() != r.cuts.size() || m.ndcg.size() != r.cuts.size()) {
                throw ValidationError("metrics report source '" + m.source_id + "' does not match the cut levels");
            }
            r.sources.push_back(std::move(m));
        }
        const auto& macro = j.at("macro");
        r.macro.precision = read_real(macro, "precision");
        r.macro.recall = read_real(macro, "recall");
        r.macro.f1 = read_real(macro, "f1");
        r.macro.map = read_real(macro, "map");
        r.macro.cuts = read_cuts(macro.at("cuts"));
        r.macro.ndcg = read_ndcg(macro.at("ndcg"));
        r.macro.curve = read_curve(macro.at("curve"));
        r.macro.quality = read_quality(macro.at("quality"));
        r.excluded_sources = j.at("excluded_sources").get<std::vector<std::string>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed metrics report: ") + e.what());
    }
}

QualityConfig parse_quality_config(std::string_view json_text) {
    try {
        return read_quality_config(nlohmann::json::parse(json_text));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed quality config: ") + e.what());
    }
}

std::string comparison_to_json(const ComparisonReport& report) { return dump(comparison_json(report)); }

std::string emit_pr_plot_data(const MetricsReport& report) {
    std::string out = "# interpolated precision at fixed recall levels (macro average)\n";
    out += "recall_level\tinterpolated_precision\n";
    char buf[96];
    for (const auto& p : report.macro.curve) {
        std::snprintf(buf, sizeof buf, "%.1f\t%s\n", p.recall_level, format_score(p.precision).c_str());
        out += buf;
    }
    out += "\n# precision and recall at cut levels (macro average)\n";
    out += "k\tprecision\trecall\n";
    for (const auto& c : report.macro.cuts) {
        out += std::to_string(c.k) + "\t" + format_score(c.precision) + "\t" + format_score(c.recall) + "\n";
    }
    return out;
}

std::map<std::string, std::string> parse_tag(std::string_view tag) {
    std::map<std::string, std::string> fields;
    std::size_t start = 0;
    while (start < tag.size()) {
        auto end = tag.find(';', start);
        if (end == std::string_view::npos) end = tag.size();
        const auto field = tag.substr(start, end - start);
        const auto eq = field.find('=');
        if (eq != std::string_view::npos) fields.emplace(field.substr(0, eq), field.substr(eq + 1));
        start = end + 1;
    }
    return fields;
}

std::string experiment_to_json(const ExperimentReport& report) {
    json chance = json::array();
    for (const auto& c : report.chance) {
        chance.push_back({{"source_id", c.source_id},
                          {"n", c.baseline.n},
                          {"relevant", c.baseline.relevant},
                          {"retrieved", c.baseline.retrieved},
                          {"expected_hits", real(c.baseline.expected_hits)},
                          {"expected_precision", real(c.baseline.expected_precision)},
                          {"observed_hits", c.observed_hits},
                          {"p_value", real(c.p_value)}});
    }
    json configuration = json::object();
    for (const auto& [key, value] : report.configuration) configuration[key] = value;
    json j = {{"tool", report.tool},
              {"context", report.context},
              {"inputs",
               {{"manifest_fingerprint", report.manifest_fingerprint},
                {"gold_fingerprint", report.gold_fingerprint},
                {"run_tag", report.run_tag}}},
              {"configuration", configuration},
              {"corpus", profile_json(report.profile)},
              {"metrics", metrics_json(report.metrics)},
              {"chance_baselines", chance},
              {"comparison", report.comparison ? comparison_json(*report.comparison) : json(nullptr)}};
    return dump(j);
}

}  // namespace tracerec
