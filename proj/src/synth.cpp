#include "tracerec/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

#include "embedded.hpp"
#include "json.hpp"
#include "tracerec/error.hpp"
#include "tracerec/io.hpp"
#include "tracerec/stats.hpp"

namespace tracerec {

namespace {

constexpr std::size_t kSyntheticTokenLimit = 1000000;  // "t" + 6 digits

std::vector<std::string_view> word_pool() {
    std::vector<std::string_view> words;
    const auto text = embedded::wordlist();
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        if (end > start) words.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return words;
}

std::string make_id(char prefix, std::size_t i, std::size_t count) {
    const auto width = std::max<std::size_t>(4, std::to_string(count).size());
    auto digits = std::to_string(i + 1);
    return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

}  // namespace

void SynthSpec::validate() const {
    if (n_sources == 0) throw ValidationError("synthetic spec needs n_sources >= 1");
    if (n_sources > n_targets) throw ValidationError("synthetic spec needs n_sources <= n_targets");
    if (shared == 0) throw ValidationError("synthetic spec needs shared >= 1");
    if (tokens_per_artifact < shared) throw ValidationError("tokens_per_artifact must be at least shared");
    if (tokens_per_artifact > shared && background_vocabulary == 0) {
        throw ValidationError("background_vocabulary must be positive when artifacts have unplanted slots");
    }
    if (!(noise_overlap >= 0.0 && noise_overlap <= 1.0)) throw ValidationError("noise_overlap must lie in [0, 1]");
    if (source_kind.empty() || target_kind.empty()) throw ValidationError("artifact kinds must be non-empty");
    if (source_kind == target_kind) throw ValidationError("source_kind and target_kind must differ");

    const std::size_t needed = 2 * background_vocabulary + shared * n_sources;
    const std::size_t available = natural_words ? word_pool().size() : kSyntheticTokenLimit;
    if (needed > available) {
        throw ValidationError("synthetic spec is infeasible: needs " + std::to_string(needed) +
                              " distinct tokens but only " + std::to_string(available) + " are available");
    }
}

SynthSpec parse_synth_spec(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("synthetic spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("synthetic spec must be a JSON object");
    static const std::vector<std::string> kKnown{"n_sources",    "n_targets",           "shared",
                                                 "background_vocabulary", "tokens_per_artifact", "noise_overlap",
                                                 "seed",         "natural_words",       "source_kind",
                                                 "target_kind"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
            throw ValidationError("unknown synthetic spec field '" + key + "'");
        }
    }
    for (const char* key : {"n_sources", "n_targets", "shared", "seed"}) {
        if (!j.contains(key)) throw ValidationError(std::string("synthetic spec is missing '") + key + "'");
    }
    SynthSpec spec;
    try {
        auto count = [&](const char* key, std::size_t& field) {
            if (!j.contains(key)) return;
            if (!j[key].is_number_unsigned()) throw ValidationError(std::string("'") + key + "' must be a non-negative integer");
            field = j[key].get<std::size_t>();
        };
        count("n_sources", spec.n_sources);
        count("n_targets", spec.n_targets);
        count("shared", spec.shared);
        count("background_vocabulary", spec.background_vocabulary);
        count("tokens_per_artifact", spec.tokens_per_artifact);
        if (!j["seed"].is_number_unsigned()) throw ValidationError("'seed' must be a non-negative integer");
        spec.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("noise_overlap")) {
            if (!j["noise_overlap"].is_number()) throw ValidationError("'noise_overlap' must be a number");
            spec.noise_overlap = j["noise_overlap"].get<double>();
        }
        if (j.contains("natural_words")) spec.natural_words = j["natural_words"].get<bool>();
        if (j.contains("source_kind")) spec.source_kind = j["source_kind"].get<std::string>();
        if (j.contains("target_kind")) spec.target_kind = j["target_kind"].get<std::string>();
    } catch (const nlohmann::json::type_error& e) {
        throw ValidationError(std::string("synthetic spec has a field of the wrong type: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string format_synth_spec(const SynthSpec& spec) {
    nlohmann::ordered_json j;
    j["n_sources"] = spec.n_sources;
    j["n_targets"] = spec.n_targets;
    j["shared"] = spec.shared;
    j["background_vocabulary"] = spec.background_vocabulary;
    j["tokens_per_artifact"] = spec.tokens_per_artifact;
    j["noise_overlap"] = spec.noise_overlap;
    j["seed"] = spec.seed;
    j["natural_words"] = spec.natural_words;
    j["source_kind"] = spec.source_kind;
    j["target_kind"] = spec.target_kind;
    return j.dump(2) + "\n";
}

SyntheticCorpus gen_synthetic(const SynthSpec& spec) {
    spec.validate();
    const auto background = spec.background_vocabulary;
    const auto words = spec.natural_words ? word_pool() : std::vector<std::string_view>{};
    auto token = [&](std::size_t index) {
        if (spec.natural_words) return std::string(words[index]);
        char buf[16];
        std::snprintf(buf, sizeof buf, "t%06zu", index);
        return std::string(buf);
    };
    auto planted = [&](std::size_t pair, std::size_t s) { return 2 * background + pair * spec.shared + s; };

    Rng rng(spec.seed);
    auto render = [&](std::vector<std::size_t> slots) {
        for (std::size_t i = slots.size(); i > 1; --i) {
            std::swap(slots[i - 1], slots[static_cast<std::size_t>(rng.below(i))]);
        }
        std::string text;
        for (auto index : slots) {
            if (!text.empty()) text += ' ';
            text += token(index);
        }
        return text;
    };

    std::vector<Artifact> artifacts;
    std::vector<TraceLink> links;
    artifacts.reserve(spec.n_sources + spec.n_targets);
    for (std::size_t i = 0; i < spec.n_sources; ++i) {
        std::vector<std::size_t> slots;
        for (std::size_t s = 0; s < spec.shared; ++s) slots.push_back(planted(i, s));
        while (slots.size() < spec.tokens_per_artifact) {
            // Draw a uniform real in [0, 1) from the top 53 bits.
            const double u = static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
            const auto offset = static_cast<std::size_t>(rng.below(background));
            slots.push_back(u < spec.noise_overlap ? offset : background + offset);
        }
        artifacts.push_back({make_id('S', i, spec.n_sources), spec.source_kind, render(std::move(slots))});
    }
    for (std::size_t j = 0; j < spec.n_targets; ++j) {
        std::vector<std::size_t> slots;
        if (j < spec.n_sources) {
            for (std::size_t s = 0; s < spec.shared; ++s) slots.push_back(planted(j, s));
        }
        while (slots.size() < spec.tokens_per_artifact) slots.push_back(static_cast<std::size_t>(rng.below(background)));
        artifacts.push_back({make_id('T', j, spec.n_targets), spec.target_kind, render(std::move(slots))});
    }
    for (std::size_t i = 0; i < spec.n_sources; ++i) {
        links.push_back({make_id('S', i, spec.n_sources), make_id('T', i, spec.n_targets)});
    }
    return {ArtifactSet("synthetic-seed" + std::to_string(spec.seed), std::move(artifacts)),
            GoldStandard(std::move(links))};
}

void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
    write_file_atomic(dir / "manifest.json", format_manifest(corpus.artifacts));
    write_file_atomic(dir / "gold.csv", format_gold(corpus.gold));
}

}  // namespace tracerec
