#include "tracerec/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include "json.hpp"
#include <unordered_set>

#include "csv.hpp"
#include "tracerec/diagnostics.hpp"
#include "tracerec/error.hpp"
#include "tracerec/hash.hpp"
#include "tracerec/io.hpp"
#include "tracerec/textprep.hpp"

namespace tracerec {

namespace {

using nlohmann::json;

constexpr std::string_view kGoldHeader = "source_id,target_id";
constexpr std::string_view kRunHeader = "source_id,target_id,rank,score,tag";

std::string squote(std::string_view s) { return "'" + std::string(s) + "'"; }

}  // namespace

// --- ArtifactSet -----------------------------------------------------------

ArtifactSet::ArtifactSet(std::string name, std::vector<Artifact> artifacts)
    : name_(std::move(name)), artifacts_(std::move(artifacts)) {
    positions_.reserve(artifacts_.size());
    for (std::size_t i = 0; i < artifacts_.size(); ++i) {
        const auto& id = artifacts_[i].id;
        if (id.empty()) throw ValidationError("artifact #" + std::to_string(i + 1) + " has an empty id");
        if (!positions_.emplace(id, i).second) throw ValidationError("duplicate artifact id " + squote(id));
    }
}

const Artifact* ArtifactSet::find(std::string_view id) const {
    auto it = positions_.find(std::string(id));
    return it == positions_.end() ? nullptr : &artifacts_[it->second];
}

ArtifactSet ArtifactSet::select(std::span<const std::string> kinds) const {
    std::vector<Artifact> picked;
    for (const auto& a : artifacts_) {
        if (std::find(kinds.begin(), kinds.end(), a.kind) != kinds.end()) picked.push_back(a);
    }
    return ArtifactSet(name_, std::move(picked));
}

std::string ArtifactSet::fingerprint() const {
    // Length-prefixed fields keep the encoding unambiguous.
    std::string buffer;
    auto put = [&buffer](std::string_view s) {
        buffer += std::to_string(s.size());
        buffer.push_back(':');
        buffer += s;
    };
    for (const auto& a : artifacts_) {
        put(a.id);
        put(a.kind);
        put(a.text);
    }
    return short_hash(buffer);
}

// --- manifest ----------------------------------------------------------------

ArtifactSet parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir,
                           const ManifestOptions& options) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed manifest: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("malformed manifest: top level must be an object");
    if (!doc.contains("name") || !doc["name"].is_string()) {
        throw ValidationError("malformed manifest: missing string field 'name'");
    }
    if (!doc.contains("artifacts") || !doc["artifacts"].is_array()) {
        throw ValidationError("malformed manifest: missing array field 'artifacts'");
    }

    std::vector<Artifact> artifacts;
    std::unordered_set<std::string> seen;
    std::size_t position = 0;
    for (const auto& entry : doc["artifacts"]) {
        ++position;
        const auto where = "manifest artifact #" + std::to_string(position);
        if (!entry.is_object()) throw ValidationError(where + " is not an object");
        for (const auto& [key, value] : entry.items()) {
            if (key != "id" && key != "kind" && key != "text" && key != "path") {
                throw ValidationError(where + " has unknown field " + squote(key));
            }
            if (!value.is_string()) throw ValidationError(where + " field " + squote(key) + " must be a string");
        }
        if (!entry.contains("id") || !entry.contains("kind")) {
            throw ValidationError(where + " needs both 'id' and 'kind'");
        }
        Artifact a{entry["id"].get<std::string>(), entry["kind"].get<std::string>(), {}};
        if (a.id.empty()) throw ValidationError(where + " has an empty id");
        if (!seen.insert(a.id).second) throw ValidationError("duplicate artifact id " + squote(a.id));

        const bool inline_text = entry.contains("text");
        const bool by_path = entry.contains("path");
        if (inline_text == by_path) {
            throw ValidationError("artifact " + squote(a.id) + " needs exactly one of 'text' or 'path'");
        }
        if (inline_text) {
            a.text = entry["text"].get<std::string>();
        } else {
            const auto rel = std::filesystem::path(entry["path"].get<std::string>());
            try {
                a.text = read_text_file(base_dir / rel);
            } catch (const IoError&) {
                throw IoError("artifact " + squote(a.id) + ": cannot read text file '" + (base_dir / rel).string() + "'");
            }
        }
        if (a.text.empty() && !options.allow_empty_text) {
            throw ValidationError("artifact " + squote(a.id) + " has empty text (enable allow-empty to accept)");
        }
        artifacts.push_back(std::move(a));
    }
    return ArtifactSet(doc["name"].get<std::string>(), std::move(artifacts));
}

ArtifactSet load_manifest(const std::filesystem::path& path, const ManifestOptions& options) {
    const auto text = read_text_file(path);
    return parse_manifest(text, path.parent_path(), options);
}

std::string format_manifest(const ArtifactSet& set) {
    json artifacts = json::array();
    for (const auto& a : set) artifacts.push_back({{"id", a.id}, {"kind", a.kind}, {"text", a.text}});
    json doc = {{"name", set.name()}, {"artifacts", std::move(artifacts)}};
    return doc.dump(2) + "\n";
}

// --- gold standard -------------------------------------------------------------

GoldStandard::GoldStandard(std::vector<TraceLink> links) : links_(std::move(links)) {
    for (const auto& link : links_) {
        if (!by_source_[link.source_id].insert(link.target_id).second) {
            throw ValidationError("duplicate gold link (" + link.source_id + "," + link.target_id + ")");
        }
    }
}

bool GoldStandard::contains(std::string_view source, std::string_view target) const {
    auto it = by_source_.find(source);
    return it != by_source_.end() && it->second.count(std::string(target)) > 0;
}

const std::set<std::string>& GoldStandard::relevant_for(std::string_view source) const {
    static const std::set<std::string> kNone;
    auto it = by_source_.find(source);
    return it == by_source_.end() ? kNone : it->second;
}

std::vector<std::string> GoldStandard::sources() const {
    std::vector<std::string> out;
    out.reserve(by_source_.size());
    for (const auto& [source, targets] : by_source_) out.push_back(source);
    return out;
}

std::string GoldStandard::fingerprint() const {
    std::string buffer;
    for (const auto& [source, targets] : by_source_) {
        for (const auto& target : targets) {
            buffer += std::to_string(source.size()) + ":" + source;
            buffer += std::to_string(target.size()) + ":" + target;
        }
    }
    return short_hash(buffer);
}

void validate(const ArtifactSet& set, const GoldStandard& gold) {
    for (const auto& link : gold.links()) {
        if (!set.contains(link.source_id) || !set.contains(link.target_id)) {
            throw ValidationError("gold link (" + link.source_id + "," + link.target_id +
                                  ") references an id absent from the corpus");
        }
    }
}

GoldStandard parse_gold(std::string_view csv_text) {
    const auto rows = csv::lines(csv_text);
    if (rows.empty() || rows.front() != kGoldHeader) {
        throw ValidationError("malformed gold standard: header must be exactly '" + std::string(kGoldHeader) + "'");
    }
    std::vector<TraceLink> links;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto where = "gold standard line " + std::to_string(i + 1);
        std::vector<std::string> fields;
        try {
            fields = csv::split(rows[i]);
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            throw ValidationError("malformed row at " + where);
        }
        links.push_back({std::move(fields[0]), std::move(fields[1])});
    }
    if (links.empty()) warn("gold standard contains no links");
    return GoldStandard(std::move(links));
}

GoldStandard read_gold(const std::filesystem::path& path) { return parse_gold(read_text_file(path)); }

GoldStandard load_gold(const std::filesystem::path& path, const ArtifactSet& set) {
    auto gold = read_gold(path);
    validate(set, gold);
    return gold;
}

std::string format_gold(const GoldStandard& gold) {
    std::string out(kGoldHeader);
    out.push_back('\n');
    for (const auto& link : gold.links()) {
        out += csv::escape(link.source_id) + "," + csv::escape(link.target_id) + "\n";
    }
    return out;
}

// --- run files -------------------------------------------------------------------

std::string format_score(double score) {
    if (!std::isfinite(score)) throw ValidationError("non-finite score");
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, score, std::chars_format::fixed, 6);
    if (ec != std::errc{}) throw ValidationError("score out of range");
    std::string out(buf, end);
    if (out == "-0.000000") out.erase(0, 1);
    return out;
}

double quantize_score(double score) {
    const auto text = format_score(score);
    double value = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), value);
    return value;
}

void validate_run(const RunFile& run) {
    for (const auto& [source, list] : run.entries) {
        std::unordered_set<std::string> targets;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& e = list[i];
            if (e.rank != i + 1) {
                throw ValidationError("non-consecutive rank " + std::to_string(e.rank) + " for source " + squote(source));
            }
            if (!std::isfinite(e.score)) throw ValidationError("non-finite score for source " + squote(source));
            if (!targets.insert(e.target_id).second) {
                throw ValidationError("duplicate target " + squote(e.target_id) + " for source " + squote(source));
            }
            if (i == 0) continue;
            const auto& prev = list[i - 1];
            if (e.score > prev.score) {
                throw ValidationError("increasing score at rank " + std::to_string(e.rank) + " for source " + squote(source));
            }
            if (e.score == prev.score && !(prev.target_id < e.target_id)) {
                throw ValidationError("tied scores not ordered by target id at rank " + std::to_string(e.rank) +
                                      " for source " + squote(source));
            }
        }
    }
}

std::string format_run(const RunFile& run) {
    validate_run(run);
    std::string out(kRunHeader);
    out.push_back('\n');
    const auto tag = csv::escape(run.tag);
    for (const auto& [source, list] : run.entries) {
        const auto src = csv::escape(source);
        for (const auto& e : list) {
            out += src;
            out += ',';
            out += csv::escape(e.target_id);
            out += ',';
            out += std::to_string(e.rank);
            out += ',';
            out += format_score(e.score);
            out += ',';
            out += tag;
            out += '\n';
        }
    }
    return out;
}

RunFile parse_run(std::string_view csv_text) {
    const auto rows = csv::lines(csv_text);
    if (rows.empty() || rows.front() != kRunHeader) {
        throw ValidationError("malformed run file: header must be exactly '" + std::string(kRunHeader) + "'");
    }
    RunFile run;
    bool have_tag = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto where = "run file line " + std::to_string(i + 1);
        std::vector<std::string> fields;
        try {
            fields = csv::split(rows[i]);
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
        if (fields.size() != 5 || fields[0].empty() || fields[1].empty()) {
            throw ValidationError("malformed row at " + where);
        }
        RunEntry entry{fields[1], 0, 0.0};
        const auto& rank = fields[2];
        auto [rp, rec] = std::from_chars(rank.data(), rank.data() + rank.size(), entry.rank);
        if (rec != std::errc{} || rp != rank.data() + rank.size() || entry.rank == 0) {
            throw ValidationError("invalid rank at " + where);
        }
        const auto& score = fields[3];
        auto [sp, sec] = std::from_chars(score.data(), score.data() + score.size(), entry.score);
        if (sec != std::errc{} || sp != score.data() + score.size() || !std::isfinite(entry.score)) {
            throw ValidationError("invalid score at " + where);
        }
        if (!have_tag) {
            run.tag = fields[4];
            have_tag = true;
        } else if (fields[4] != run.tag) {
            throw ValidationError("inconsistent tag at " + where);
        }
        run.entries[fields[0]].push_back(std::move(entry));
    }
    validate_run(run);
    return run;
}

void write_run(const RunFile& run, const std::filesystem::path& path) { write_file_atomic(path, format_run(run)); }

RunFile read_run(const std::filesystem::path& path) { return parse_run(read_text_file(path)); }

// --- characterization ----------------------------------------------------------------

namespace {

CountSummary summarize(std::vector<std::size_t> counts) {
    CountSummary s;
    if (counts.empty()) return s;
    std::sort(counts.begin(), counts.end());
    s.min = counts.front();
    s.max = counts.back();
    const auto n = counts.size();
    s.median = n % 2 == 1 ? static_cast<double>(counts[n / 2])
                          : (static_cast<double>(counts[n / 2 - 1]) + static_cast<double>(counts[n / 2])) / 2.0;
    for (auto c : counts) s.total += c;
    return s;
}

}  // namespace

CorpusProfile characterize(const ArtifactSet& set, const GoldStandard& gold, const Preprocessor& prep,
                           std::string context) {
    CorpusProfile p;
    p.name = set.name();
    p.artifact_count = set.size();
    p.preprocessing = prep.describe();
    p.context = std::move(context);

    std::vector<std::size_t> before;
    std::vector<std::size_t> after;
    std::unordered_set<std::string> unstemmed;
    std::unordered_set<std::string> stemmed;
    for (const auto& a : set) {
        ++p.kind_counts[a.kind];
        auto tokens = prep.tokens(a.text);
        before.push_back(tokens.size());
        auto kept = prep.filter(std::move(tokens));
        unstemmed.insert(kept.begin(), kept.end());
        auto terms = prep.stem(std::move(kept));
        after.push_back(terms.size());
        stemmed.insert(terms.begin(), terms.end());
    }
    p.tokens_before = summarize(std::move(before));
    p.tokens_after = summarize(std::move(after));
    p.vocabulary_unstemmed = unstemmed.size();
    p.vocabulary_stemmed = stemmed.size();

    p.gold_links = gold.size();
    for (const auto& source : gold.sources()) {
        ++p.linked_sources;
        ++p.links_per_source[gold.relevant_for(source).size()];
    }
    return p;
}

}  // namespace tracerec
