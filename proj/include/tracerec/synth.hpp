#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "tracerec/corpus.hpp"

namespace tracerec {

/// Parameters of a synthetic corpus with planted trace links.
///
/// Source i is linked to target i and shares `shared` planted tokens with it
/// that occur nowhere else. Targets fill their remaining slots from a
/// background vocabulary; targets past n_sources are decoys. Each remaining
/// source slot draws from the background vocabulary with probability
/// `noise_overlap`, otherwise from a filler vocabulary that no target uses.
struct SynthSpec {
    std::size_t n_sources = 0;
    std::size_t n_targets = 0;
    std::size_t shared = 1;
    std::size_t background_vocabulary = 2000;
    std::size_t tokens_per_artifact = 40;
    double noise_overlap = 0.0;
    std::uint64_t seed = 0;
    bool natural_words = false;  // dictionary words instead of "t000123"
    std::string source_kind = "requirement";
    std::string target_kind = "test";

    /// Throws ValidationError naming the violated constraint.
    void validate() const;
    friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

/// JSON object with the field names above; n_sources, n_targets, shared and
/// seed are required.
SynthSpec parse_synth_spec(std::string_view json_text);
std::string format_synth_spec(const SynthSpec& spec);

struct SyntheticCorpus {
    ArtifactSet artifacts;
    GoldStandard gold;
};

SyntheticCorpus gen_synthetic(const SynthSpec& spec);

/// Writes manifest.json and gold.csv into `dir`, creating it if needed.
void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

}  // namespace tracerec
