#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tracerec/svd.hpp"
#include "tracerec/textprep.hpp"

namespace tracerec {

class ArtifactSet;

struct WeightedTerm {
    TermIndex term;
    double weight;
    friend bool operator==(const WeightedTerm&, const WeightedTerm&) = default;
};

/// Sparse real vector, indices strictly increasing.
using SparseVector = std::vector<WeightedTerm>;

/// Sublinear TF-IDF: (1 + ln tf) · ln(N / df). Requires tf >= 1 and 1 <= df <= N.
double tfidf_weight(std::uint32_t tf, std::uint32_t df, std::size_t n);

/// Cosine similarity; 0 when either vector has zero norm.
double cosine(const SparseVector& q, const SparseVector& d);
double cosine(const Eigen::VectorXd& q, const Eigen::VectorXd& d);

struct ScoredTarget {
    std::string target_id;
    double score;
    friend bool operator==(const ScoredTarget&, const ScoredTarget&) = default;
};

/// All targets, by descending score then ascending target id.
using ScoredList = std::vector<ScoredTarget>;

ScoredList rank_targets(std::span<const std::string> ids, std::span<const double> scores);

/// The searchable side of a recovery task: target ids, their term counts and
/// the vocabulary statistics of the target sub-collection.
struct TargetCollection {
    std::vector<std::string> ids;
    std::vector<TermCountVector> vectors;
    TermDictionary dictionary;

    [[nodiscard]] std::size_t size() const { return ids.size(); }
};

std::shared_ptr<const TargetCollection> index_targets(const ArtifactSet& targets, const Preprocessor& prep);

/// TF-IDF weights of a count vector, using the collection's df and N.
SparseVector tfidf_vector(const TermCountVector& counts, const TermDictionary& dict);

// --- vector space model ----------------------------------------------------------

struct VsmIndex {
    std::shared_ptr<const TargetCollection> targets;
    std::vector<SparseVector> weights;
    std::vector<double> norms;
};

VsmIndex build_vsm(std::shared_ptr<const TargetCollection> targets);
ScoredList vsm_score(const VsmIndex& index, const TermCountVector& query, std::string_view query_label = {});

// --- latent semantic indexing ---------------------------------------------------------

constexpr std::size_t kDefaultLsiRank = 200;

struct LsiIndex {
    std::shared_ptr<const TargetCollection> targets;
    std::size_t k = 0;
    Eigen::MatrixXd u;               // V × k
    Eigen::VectorXd singular_values; // k
    Eigen::MatrixXd documents;       // k × n, column d is U_kᵀ a_d
};

/// TF-IDF term-document matrix (V × n) of the targets.
Eigen::SparseMatrix<double> term_document_matrix(const TargetCollection& targets);

/// `k` defaults to min(200, numerical rank). A request above the numerical
/// rank is clamped with a warning.
LsiIndex build_lsi(std::shared_ptr<const TargetCollection> targets, std::optional<std::size_t> k = std::nullopt,
                   const SvdOptions& options = {});

/// Σ_k⁻¹ U_kᵀ q.
Eigen::VectorXd lsi_fold_in(const SparseVector& query, const Eigen::MatrixXd& u, const Eigen::VectorXd& singular_values);

/// Cosine between U_kᵀq and U_kᵀa_d, which equals the cosine of the folded-in
/// vectors rescaled by Σ_k.
ScoredList lsi_score(const LsiIndex& index, const TermCountVector& query, std::string_view query_label = {});

// --- query likelihood language model --------------------------------------------------

constexpr double kDefaultLambda = 0.1;

struct LmIndex {
    std::shared_ptr<const TargetCollection> targets;
    std::vector<std::uint64_t> lengths;
    std::vector<double> collection;  // p(w|C), indexed by term
    double lambda = kDefaultLambda;
};

/// Jelinek-Mercer smoothed unigram models. λ must lie in (0, 1).
LmIndex build_lm(std::shared_ptr<const TargetCollection> targets, double lambda = kDefaultLambda);
/// Same, with a caller-supplied collection model.
LmIndex build_lm(std::shared_ptr<const TargetCollection> targets, double lambda, std::vector<double> collection);

/// p(w|θ_d) = (1-λ)·tf/|d| + λ·p(w|C). An empty document falls back to p(w|C).
double lm_probability(const LmIndex& index, std::size_t document, TermIndex term);

/// Mean log-probability of the query terms that occur in the collection.
ScoredList lm_score(const LmIndex& index, const TermCountVector& query, std::string_view query_label = {});

// --- binary independence model -------------------------------------------------------------

struct BimIndex {
    std::shared_ptr<const TargetCollection> targets;
};

BimIndex build_bim(std::shared_ptr<const TargetCollection> targets);

/// RSJ presence weight without relevance information: ln((N - df + 0.5) / (df + 0.5)).
double bim_weight(std::uint32_t df, std::size_t n);

ScoredList bim_score(const BimIndex& index, const TermCountVector& query, std::string_view query_label = {});

// --- model selection -------------------------------------------------------------------------

enum class ModelKind { vsm, lsi, lm, bim };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct ModelConfig {
    ModelKind kind = ModelKind::vsm;
    std::optional<std::size_t> lsi_k;
    double lambda = kDefaultLambda;

    /// e.g. "model=lsi;k=50" or "model=lm;lambda=0.1".
    [[nodiscard]] std::string describe() const;
    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

using AnyIndex = std::variant<VsmIndex, LsiIndex, LmIndex, BimIndex>;

AnyIndex build_index(std::shared_ptr<const TargetCollection> targets, const ModelConfig& config);
ScoredList score(const AnyIndex& index, const TermCountVector& query, std::string_view query_label = {});

}  // namespace tracerec
