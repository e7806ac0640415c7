#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace tracerec {

class ArtifactSet;
struct Artifact;

/// Preprocessing knobs. Two runs with equal configs produce identical terms.
struct PrepConfig {
    std::size_t min_token_length = 2;
    bool drop_numeric = true;
    bool remove_stopwords = true;
    bool stem = true;
    /// Stop list file, one lowercase word per line. Empty selects the bundled English list.
    std::filesystem::path stoplist_path;

    friend bool operator==(const PrepConfig&, const PrepConfig&) = default;
};

using StopList = std::unordered_set<std::string>;

/// The bundled English stop list (data/stopwords_en.txt, compiled in).
const StopList& default_stoplist();
StopList load_stoplist(const std::filesystem::path& path);
StopList parse_stoplist(std::string_view content);

/// Splits UTF-8 text into maximal runs of Unicode letters and decimal digits,
/// applies simple lowercase mapping, and drops tokens shorter than
/// `min_length` code points and (optionally) tokens made only of digits.
/// Invalid UTF-8 sequences act as separators.
std::vector<std::string> tokenize(std::string_view text, std::size_t min_length = 2,
                                  bool drop_numeric = true);

/// Order-preserving filter.
std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const StopList& stoplist);

/// Classic Porter stemmer, as in Martin Porter's reference C implementation.
/// Tokens that are not entirely lowercase ASCII letters are returned unchanged.
std::string porter_stem(std::string_view token);

/// The configured tokenize -> stop-word removal -> stemming pipeline.
class Preprocessor {
  public:
    Preprocessor() : Preprocessor(PrepConfig{}) {}
    explicit Preprocessor(PrepConfig config);

    [[nodiscard]] const PrepConfig& config() const { return config_; }
    [[nodiscard]] const StopList& stoplist() const { return *stoplist_; }

    [[nodiscard]] std::vector<std::string> tokens(std::string_view text) const;
    [[nodiscard]] std::vector<std::string> filter(std::vector<std::string> tokens) const;
    [[nodiscard]] std::vector<std::string> stem(std::vector<std::string> tokens) const;
    /// Full pipeline.
    [[nodiscard]] std::vector<std::string> terms(std::string_view text) const;

    /// Canonical one-line description, e.g. "minlen=2;numeric=drop;stop=default;stem=porter".
    [[nodiscard]] std::string describe() const;

  private:
    PrepConfig config_;
    StopList owned_;
    const StopList* stoplist_;
    std::string stoplist_label_;
};

using TermIndex = std::uint32_t;

struct TermCount {
    TermIndex term;
    std::uint32_t count;
    friend bool operator==(const TermCount&, const TermCount&) = default;
};

/// Sparse bag of words: indices strictly increasing, counts >= 1.
using TermCountVector = std::vector<TermCount>;

/// Vocabulary of a document collection with document frequencies.
/// Terms are sorted bytewise and indexed densely from 0.
class TermDictionary {
  public:
    TermDictionary() = default;

    /// One entry per document, each the document's preprocessed terms.
    static TermDictionary from_documents(std::span<const std::vector<std::string>> documents);

    [[nodiscard]] std::size_t size() const { return terms_.size(); }
    [[nodiscard]] std::size_t document_count() const { return documents_; }
    [[nodiscard]] const std::string& term(TermIndex index) const { return terms_.at(index); }
    [[nodiscard]] std::uint32_t df(TermIndex index) const { return df_.at(index); }
    [[nodiscard]] std::optional<TermIndex> find(std::string_view term) const;
    [[nodiscard]] std::span<const std::string> terms() const { return terms_; }

  private:
    std::vector<std::string> terms_;
    std::vector<std::uint32_t> df_;
    std::size_t documents_ = 0;
    std::unordered_map<std::string, TermIndex> lookup_;
};

TermDictionary build_dictionary(const ArtifactSet& set, const Preprocessor& prep);

/// Counts the dictionary terms of an already preprocessed token list.
TermCountVector count_terms(std::span<const std::string> terms, const TermDictionary& dict);

TermCountVector vectorize(const Artifact& artifact, const TermDictionary& dict, const Preprocessor& prep);

}  // namespace tracerec
