#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tracerec/corpus.hpp"
#include "tracerec/models.hpp"
#include "tracerec/textprep.hpp"

namespace tracerec {

/// How much of each ranked list becomes candidate links.
struct Cutoff {
    enum class Kind { all, top_k, threshold };

    Kind kind = Kind::all;
    std::size_t k = 0;
    double threshold = 0.0;

    static Cutoff keep_all() { return {}; }
    static Cutoff top_k(std::size_t k);
    static Cutoff at_least(double threshold);

    /// "all", "topk:K" or "th:TAU" (the CLI syntax).
    [[nodiscard]] std::string describe() const;
    friend bool operator==(const Cutoff&, const Cutoff&) = default;
};

Cutoff parse_cutoff(std::string_view text);

/// top_k keeps the first k items, threshold keeps scores >= τ.
ScoredList apply_cutoff(ScoredList list, const Cutoff& cutoff);

struct RecoveryConfig {
    std::vector<std::string> source_kinds;
    std::vector<std::string> target_kinds;
    ModelConfig model;
    Cutoff cutoff;
    PrepConfig prep;
};

/// Scores every selected source against every selected target (minus the
/// source itself), quantizes scores to the run-file precision, re-sorts,
/// applies the cutoff and assigns ranks. Sources with no surviving
/// candidates do not appear in the run.
///
/// The run tag records the model, cutoff, filters, preprocessing, a corpus
/// fingerprint and a hash of all of these ("cfg=").
RunFile recover(const ArtifactSet& set, const RecoveryConfig& config);

/// Value of `key` in a run tag ("key=value;..."), empty if absent.
std::string tag_value(std::string_view tag, std::string_view key);

}  // namespace tracerec
