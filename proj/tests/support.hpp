#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <unistd.h>
#include <string>
#include <vector>

#include "tracerec/corpus.hpp"

namespace testing {

inline std::filesystem::path source_dir() { return TRACEREC_SOURCE_DIR; }

// Small generator for property tests. Fixed seeds only.
class Gen {
  public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
    std::size_t between(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
    }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal(double mean, double sd) { return std::normal_distribution<double>(mean, sd)(engine_); }
    bool chance(double p) { return real(0.0, 1.0) < p; }

    /// Words "w00".."w{vocab-1}", so preprocessing keeps them intact.
    std::string word(std::size_t vocab) {
        auto i = index(vocab);
        return "w" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    }

    std::string text(std::size_t vocab, std::size_t min_len, std::size_t max_len) {
        std::string out;
        const auto n = between(min_len, max_len);
        for (std::size_t i = 0; i < n; ++i) {
            if (!out.empty()) out += ' ';
            out += word(vocab);
        }
        return out;
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

/// Random corpus of `docs` targets (kind "t") over `vocab` words.
inline tracerec::ArtifactSet random_corpus(Gen& g, std::size_t docs, std::size_t vocab) {
    std::vector<tracerec::Artifact> artifacts;
    for (std::size_t i = 0; i < docs; ++i) {
        artifacts.push_back({"D" + std::to_string(100 + i), "t", g.text(vocab, 1, 12)});
    }
    return tracerec::ArtifactSet("random", std::move(artifacts));
}

class TempDir {
  public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("tracerec-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

}  // namespace testing
