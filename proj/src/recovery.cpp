#include "tracerec/recovery.hpp"

#include <charconv>
#include <cmath>

#include "tracerec/error.hpp"
#include "tracerec/hash.hpp"

namespace tracerec {

namespace {

std::string join(const std::vector<std::string>& items, char sep) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out.push_back(sep);
        out += item;
    }
    return out;
}

std::string shortest(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

}  // namespace

Cutoff Cutoff::top_k(std::size_t k) {
    if (k == 0) throw ValidationError("top-k cutoff needs k >= 1");
    return {Kind::top_k, k, 0.0};
}

Cutoff Cutoff::at_least(double threshold) {
    if (!std::isfinite(threshold)) throw ValidationError("threshold cutoff needs a finite value");
    return {Kind::threshold, 0, threshold};
}

std::string Cutoff::describe() const {
    switch (kind) {
        case Kind::all: return "all";
        case Kind::top_k: return "topk:" + std::to_string(k);
        case Kind::threshold: return "th:" + shortest(threshold);
    }
    return "?";
}

Cutoff parse_cutoff(std::string_view text) {
    if (text == "all") return Cutoff::keep_all();
    auto bad = [&] { return ValidationError("invalid cutoff '" + std::string(text) + "' (expected all, topk:K or th:TAU)"); };
    if (text.starts_with("topk:")) {
        auto digits = text.substr(5);
        std::size_t k = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (ec != std::errc{} || p != digits.data() + digits.size() || k == 0) throw bad();
        return Cutoff::top_k(k);
    }
    if (text.starts_with("th:")) {
        auto number = text.substr(3);
        double tau = 0.0;
        auto [p, ec] = std::from_chars(number.data(), number.data() + number.size(), tau);
        if (ec != std::errc{} || p != number.data() + number.size() || !std::isfinite(tau)) throw bad();
        return Cutoff::at_least(tau);
    }
    throw bad();
}

ScoredList apply_cutoff(ScoredList list, const Cutoff& cutoff) {
    switch (cutoff.kind) {
        case Cutoff::Kind::all:
            break;
        case Cutoff::Kind::top_k:
            if (list.size() > cutoff.k) list.resize(cutoff.k);
            break;
        case Cutoff::Kind::threshold:
            std::erase_if(list, [&](const ScoredTarget& t) { return t.score < cutoff.threshold; });
            break;
    }
    return list;
}

std::string tag_value(std::string_view tag, std::string_view key) {
    std::size_t start = 0;
    while (start <= tag.size()) {
        auto end = tag.find(';', start);
        if (end == std::string_view::npos) end = tag.size();
        auto field = tag.substr(start, end - start);
        if (field.size() > key.size() && field.starts_with(key) && field[key.size()] == '=') {
            return std::string(field.substr(key.size() + 1));
        }
        start = end + 1;
    }
    return {};
}

RunFile recover(const ArtifactSet& set, const RecoveryConfig& config) {
    if (config.source_kinds.empty() || config.target_kinds.empty()) {
        throw ValidationError("recovery needs at least one source kind and one target kind");
    }
    const auto sources = set.select(config.source_kinds);
    const auto targets = set.select(config.target_kinds);
    if (sources.empty()) throw ValidationError("source filter '" + join(config.source_kinds, ',') + "' selects no artifacts");
    if (targets.empty()) throw ValidationError("target filter '" + join(config.target_kinds, ',') + "' selects no artifacts");

    const Preprocessor prep(config.prep);
    auto collection = index_targets(targets, prep);
    const auto index = build_index(collection, config.model);

    std::string tag = config.model.describe();
    if (const auto* lsi = std::get_if<LsiIndex>(&index)) tag += ";k_eff=" + std::to_string(lsi->k);
    tag += ";cutoff=" + config.cutoff.describe();
    tag += ";sources=" + join(config.source_kinds, '+');
    tag += ";targets=" + join(config.target_kinds, '+');
    tag += ";ntargets=" + std::to_string(targets.size());
    tag += ";" + prep.describe();
    tag += ";corpus=" + set.fingerprint();
    tag += ";cfg=" + short_hash(tag);

    RunFile run;
    run.tag = std::move(tag);
    for (const auto& source : sources) {
        auto list = score(index, count_terms(prep.terms(source.text), collection->dictionary), source.id);
        std::erase_if(list, [&](const ScoredTarget& t) { return t.target_id == source.id; });

        std::vector<std::string> ids;
        std::vector<double> scores;
        ids.reserve(list.size());
        scores.reserve(list.size());
        for (auto& t : list) {
            ids.push_back(std::move(t.target_id));
            scores.push_back(quantize_score(t.score));
        }
        list = apply_cutoff(rank_targets(ids, scores), config.cutoff);
        if (list.empty()) continue;

        auto& entries = run.entries[source.id];
        entries.reserve(list.size());
        for (std::size_t i = 0; i < list.size(); ++i) {
            entries.push_back({std::move(list[i].target_id), i + 1, list[i].score});
        }
    }
    return run;
}

}  // namespace tracerec
