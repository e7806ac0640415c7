#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracerec/corpus.hpp"
#include "tracerec/metrics.hpp"
#include "tracerec/stats.hpp"

namespace tracerec {

// All JSON writers round reals to 6 decimals; non-finite reals become null.

std::string profile_to_json(const CorpusProfile& profile);

std::string metrics_to_json(const MetricsReport& report);
/// Inverse of metrics_to_json (values keep their 6-decimal rounding).
MetricsReport parse_metrics_report(std::string_view json_text);

/// {"acceptable": {"min_recall": r, "min_precision": p}, "good": ..., "excellent": ...}
QualityConfig parse_quality_config(std::string_view json_text);

std::string comparison_to_json(const ComparisonReport& report);

/// Plain-text tables of the macro 11-point curve and the cut-level table.
std::string emit_pr_plot_data(const MetricsReport& report);

struct SourceChance {
    std::string source_id;
    ChanceBaseline baseline;
    std::size_t observed_hits = 0;
    double p_value = 1.0;
};

/// Everything needed to reproduce and interpret one evaluation.
struct ExperimentReport {
    std::string tool;
    std::string context;
    std::string manifest_fingerprint;
    std::string gold_fingerprint;
    std::string run_tag;
    std::map<std::string, std::string> configuration;  // run tag fields
    CorpusProfile profile;
    MetricsReport metrics;
    std::vector<SourceChance> chance;
    std::optional<ComparisonReport> comparison;
};

/// Splits "key=value;..." into a map.
std::map<std::string, std::string> parse_tag(std::string_view tag);

std::string experiment_to_json(const ExperimentReport& report);

}  // namespace tracerec
