#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tracerec {

class Preprocessor;

/// A traceable unit of text, e.g. a requirement or a test case.
struct Artifact {
    std::string id;
    std::string kind;
    std::string text;

    friend bool operator==(const Artifact&, const Artifact&) = default;
};

/// Ordered collection of artifacts with unique ids. Iteration follows
/// manifest order. Ids are compared as raw bytes.
class ArtifactSet {
  public:
    ArtifactSet() = default;
    /// Throws ValidationError on an empty or duplicate id.
    ArtifactSet(std::string name, std::vector<Artifact> artifacts);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] std::span<const Artifact> artifacts() const { return artifacts_; }
    [[nodiscard]] std::size_t size() const { return artifacts_.size(); }
    [[nodiscard]] bool empty() const { return artifacts_.empty(); }
    [[nodiscard]] auto begin() const { return artifacts_.begin(); }
    [[nodiscard]] auto end() const { return artifacts_.end(); }

    [[nodiscard]] const Artifact* find(std::string_view id) const;
    [[nodiscard]] bool contains(std::string_view id) const { return find(id) != nullptr; }

    /// Subset whose kind is one of `kinds`, in the original order.
    [[nodiscard]] ArtifactSet select(std::span<const std::string> kinds) const;

    /// Content fingerprint over ids, kinds and texts (order-sensitive).
    [[nodiscard]] std::string fingerprint() const;

    friend bool operator==(const ArtifactSet& a, const ArtifactSet& b) {
        return a.name_ == b.name_ && a.artifacts_ == b.artifacts_;
    }

  private:
    std::string name_;
    std::vector<Artifact> artifacts_;
    std::unordered_map<std::string, std::size_t> positions_;
};

struct ManifestOptions {
    bool allow_empty_text = false;
};

/// Reads a JSON manifest. Relative `path` entries resolve against the
/// manifest's directory.
ArtifactSet load_manifest(const std::filesystem::path& path, const ManifestOptions& options = {});
ArtifactSet parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir,
                           const ManifestOptions& options = {});
/// Serializes with inline texts; output is deterministic.
std::string format_manifest(const ArtifactSet& set);

struct TraceLink {
    std::string source_id;
    std::string target_id;

    friend auto operator<=>(const TraceLink&, const TraceLink&) = default;
};

/// The answer set of true trace links.
class GoldStandard {
  public:
    GoldStandard() = default;
    /// Throws ValidationError on a duplicate pair.
    explicit GoldStandard(std::vector<TraceLink> links);

    [[nodiscard]] std::span<const TraceLink> links() const { return links_; }
    [[nodiscard]] std::size_t size() const { return links_.size(); }
    [[nodiscard]] bool empty() const { return links_.empty(); }
    [[nodiscard]] bool contains(std::string_view source, std::string_view target) const;
    /// Targets linked to `source`; empty if the source has no links.
    [[nodiscard]] const std::set<std::string>& relevant_for(std::string_view source) const;
    /// Source ids with at least one link, ascending bytewise.
    [[nodiscard]] std::vector<std::string> sources() const;
    /// Order-independent fingerprint of the link set.
    [[nodiscard]] std::string fingerprint() const;

  private:
    std::vector<TraceLink> links_;
    std::map<std::string, std::set<std::string>, std::less<>> by_source_;
};

/// Throws ValidationError naming the first link whose ids do not resolve in `set`.
void validate(const ArtifactSet& set, const GoldStandard& gold);

GoldStandard parse_gold(std::string_view csv_text);
/// Reads a gold standard without checking ids against a corpus.
GoldStandard read_gold(const std::filesystem::path& path);
/// Reads and validates against `set`.
GoldStandard load_gold(const std::filesystem::path& path, const ArtifactSet& set);
std::string format_gold(const GoldStandard& gold);

struct RunEntry {
    std::string target_id;
    std::size_t rank = 0;
    double score = 0.0;

    friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

/// Ranked candidate links per source. Sources iterate in bytewise order.
struct RunFile {
    std::string tag;
    std::map<std::string, std::vector<RunEntry>> entries;

    friend bool operator==(const RunFile&, const RunFile&) = default;
};

/// Checks ranks 1..n, non-increasing scores, and ascending target ids among ties.
void validate_run(const RunFile& run);

/// Fixed six decimals, round-half-even on the exact binary value.
std::string format_score(double score);
/// The double nearest to format_score(score).
double quantize_score(double score);

std::string format_run(const RunFile& run);
RunFile parse_run(std::string_view csv_text);
void write_run(const RunFile& run, const std::filesystem::path& path);
RunFile read_run(const std::filesystem::path& path);

struct CountSummary {
    std::size_t min = 0;
    double median = 0.0;
    std::size_t max = 0;
    std::size_t total = 0;
};

/// Descriptive statistics of a corpus and its gold standard.
struct CorpusProfile {
    std::string name;
    std::size_t artifact_count = 0;
    std::map<std::string, std::size_t> kind_counts;
    CountSummary tokens_before;  // after tokenization
    CountSummary tokens_after;   // after stop-word removal and stemming
    std::size_t vocabulary_unstemmed = 0;
    std::size_t vocabulary_stemmed = 0;
    std::size_t gold_links = 0;
    std::size_t linked_sources = 0;
    /// links per source -> number of sources with that many links
    std::map<std::size_t, std::size_t> links_per_source;
    std::string preprocessing;
    std::string context;
};

CorpusProfile characterize(const ArtifactSet& set, const GoldStandard& gold, const Preprocessor& prep,
                           std::string context = {});

}  // namespace tracerec
