#include "tracerec/textprep.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <map>

#include "embedded.hpp"
#include "tracerec/corpus.hpp"
#include "tracerec/error.hpp"
#include "tracerec/hash.hpp"
#include "tracerec/io.hpp"

namespace tracerec {

// --- stop lists --------------------------------------------------------------

StopList parse_stoplist(std::string_view content) {
    StopList out;
    std::size_t start = 0;
    while (start <= content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        auto line = content.substr(start, end - start);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (!line.empty()) out.emplace(line);
        start = end + 1;
    }
    return out;
}

const StopList& default_stoplist() {
    static const StopList list = parse_stoplist(embedded::stoplist());
    return list;
}

StopList load_stoplist(const std::filesystem::path& path) { return parse_stoplist(read_text_file(path)); }

// --- tokenization ----------------------------------------------------------------

std::vector<std::string> tokenize(std::string_view text, std::size_t min_length, bool drop_numeric) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t code_points = 0;
    bool all_digits = true;

    auto flush = [&] {
        if (code_points > 0 && code_points >= min_length && !(drop_numeric && all_digits)) {
            tokens.push_back(current);
        }
        current.clear();
        code_points = 0;
        all_digits = true;
    };

    const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
    const auto length = static_cast<std::int32_t>(text.size());
    std::int32_t i = 0;
    while (i < length) {
        UChar32 c = 0;
        U8_NEXT(bytes, i, length, c);
        const bool digit = c >= 0 && u_isdigit(c);
        if (c < 0 || !(digit || u_isalpha(c))) {
            flush();
            continue;
        }
        const UChar32 lower = u_tolower(c);
        char buf[U8_MAX_LENGTH];
        std::int32_t n = 0;
        U8_APPEND_UNSAFE(buf, n, lower);
        current.append(buf, static_cast<std::size_t>(n));
        ++code_points;
        all_digits = all_digits && digit;
    }
    flush();
    return tokens;
}

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const StopList& stoplist) {
    if (stoplist.empty()) return tokens;
    std::erase_if(tokens, [&](const std::string& t) { return stoplist.count(t) > 0; });
    return tokens;
}

// --- pipeline ------------------------------------------------------------------------

Preprocessor::Preprocessor(PrepConfig config) : config_(std::move(config)), stoplist_(&default_stoplist()) {
    if (config_.min_token_length == 0) throw ValidationError("minimum token length must be at least 1");
    if (!config_.stoplist_path.empty()) {
        owned_ = load_stoplist(config_.stoplist_path);
        stoplist_ = &owned_;
        // Identify a custom list by content so the description is path-independent.
        std::vector<std::string> words(owned_.begin(), owned_.end());
        std::sort(words.begin(), words.end());
        std::string joined;
        for (const auto& w : words) joined += w + "\n";
        stoplist_label_ = "custom:" + short_hash(joined);
    } else {
        stoplist_label_ = "default";
    }
}

std::vector<std::string> Preprocessor::tokens(std::string_view text) const {
    return tokenize(text, config_.min_token_length, config_.drop_numeric);
}

std::vector<std::string> Preprocessor::filter(std::vector<std::string> tokens) const {
    if (!config_.remove_stopwords) return tokens;
    return remove_stopwords(std::move(tokens), *stoplist_);
}

std::vector<std::string> Preprocessor::stem(std::vector<std::string> tokens) const {
    if (config_.stem) {
        for (auto& t : tokens) t = porter_stem(t);
    }
    return tokens;
}

std::vector<std::string> Preprocessor::terms(std::string_view text) const { return stem(filter(tokens(text))); }

std::string Preprocessor::describe() const {
    std::string out = "minlen=" + std::to_string(config_.min_token_length);
    out += config_.drop_numeric ? ";numeric=drop" : ";numeric=keep";
    out += ";stop=" + (config_.remove_stopwords ? stoplist_label_ : std::string("off"));
    out += config_.stem ? ";stem=porter" : ";stem=off";
    return out;
}

// --- dictionary and vectors ------------------------------------------------------------

TermDictionary TermDictionary::from_documents(std::span<const std::vector<std::string>> documents) {
    std::map<std::string, std::uint32_t> df;
    for (const auto& doc : documents) {
        std::vector<std::string> distinct(doc.begin(), doc.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (auto& t : distinct) ++df[std::move(t)];
    }
    TermDictionary dict;
    dict.documents_ = documents.size();
    dict.terms_.reserve(df.size());
    dict.df_.reserve(df.size());
    for (auto& [term, count] : df) {
        dict.lookup_.emplace(term, static_cast<TermIndex>(dict.terms_.size()));
        dict.terms_.push_back(term);
        dict.df_.push_back(count);
    }
    return dict;
}

std::optional<TermIndex> TermDictionary::find(std::string_view term) const {
    auto it = lookup_.find(std::string(term));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

TermDictionary build_dictionary(const ArtifactSet& set, const Preprocessor& prep) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(set.size());
    for (const auto& a : set) docs.push_back(prep.terms(a.text));
    return TermDictionary::from_documents(docs);
}

TermCountVector count_terms(std::span<const std::string> terms, const TermDictionary& dict) {
    std::map<TermIndex, std::uint32_t> counts;
    for (const auto& t : terms) {
        if (auto idx = dict.find(t)) ++counts[*idx];
    }
    TermCountVector out;
    out.reserve(counts.size());
    for (const auto& [idx, c] : counts) out.push_back({idx, c});
    return out;
}

TermCountVector vectorize(const Artifact& artifact, const TermDictionary& dict, const Preprocessor& prep) {
    return count_terms(prep.terms(artifact.text), dict);
}

}  // namespace tracerec
