#include "tracerec/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "tracerec/corpus.hpp"
#include "tracerec/diagnostics.hpp"
#include "tracerec/error.hpp"

namespace tracerec {

namespace {

std::string label_of(std::string_view query_label) {
    return query_label.empty() ? std::string("query") : "query '" + std::string(query_label) + "'";
}

std::uint32_t count_of(const TermCountVector& doc, TermIndex term) {
    auto it = std::lower_bound(doc.begin(), doc.end(), term, [](const TermCount& c, TermIndex t) { return c.term < t; });
    return it != doc.end() && it->term == term ? it->count : 0;
}

std::string shortest(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

}  // namespace

double tfidf_weight(std::uint32_t tf, std::uint32_t df, std::size_t n) {
    if (tf == 0 || df == 0 || df > n) throw ValidationError("tfidf_weight requires tf >= 1 and 1 <= df <= N");
    return (1.0 + std::log(static_cast<double>(tf))) * std::log(static_cast<double>(n) / static_cast<double>(df));
}

double cosine(const SparseVector& q, const SparseVector& d) {
    double dot = 0.0;
    double qq = 0.0;
    double dd = 0.0;
    for (const auto& w : q) qq += w.weight * w.weight;
    for (const auto& w : d) dd += w.weight * w.weight;
    auto qi = q.begin();
    auto di = d.begin();
    while (qi != q.end() && di != d.end()) {
        if (qi->term < di->term) {
            ++qi;
        } else if (di->term < qi->term) {
            ++di;
        } else {
            dot += qi->weight * di->weight;
            ++qi;
            ++di;
        }
    }
    if (qq == 0.0 || dd == 0.0) return 0.0;
    return dot / (std::sqrt(qq) * std::sqrt(dd));
}

double cosine(const Eigen::VectorXd& q, const Eigen::VectorXd& d) {
    const double qn = q.norm();
    const double dn = d.norm();
    if (qn == 0.0 || dn == 0.0) return 0.0;
    return q.dot(d) / (qn * dn);
}

ScoredList rank_targets(std::span<const std::string> ids, std::span<const double> scores) {
    if (ids.size() != scores.size()) throw ValidationError("rank_targets: ids and scores differ in length");
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return ids[a] < ids[b];
    });
    ScoredList out;
    out.reserve(order.size());
    for (auto i : order) out.push_back({ids[i], scores[i]});
    return out;
}

std::shared_ptr<const TargetCollection> index_targets(const ArtifactSet& targets, const Preprocessor& prep) {
    auto collection = std::make_shared<TargetCollection>();
    std::vector<std::vector<std::string>> terms;
    terms.reserve(targets.size());
    for (const auto& a : targets) {
        collection->ids.push_back(a.id);
        terms.push_back(prep.terms(a.text));
    }
    collection->dictionary = TermDictionary::from_documents(terms);
    collection->vectors.reserve(terms.size());
    for (const auto& t : terms) collection->vectors.push_back(count_terms(t, collection->dictionary));
    return collection;
}

SparseVector tfidf_vector(const TermCountVector& counts, const TermDictionary& dict) {
    SparseVector out;
    out.reserve(counts.size());
    for (const auto& c : counts) {
        out.push_back({c.term, tfidf_weight(c.count, dict.df(c.term), dict.document_count())});
    }
    return out;
}

// --- VSM ----------------------------------------------------------------------------------

VsmIndex build_vsm(std::shared_ptr<const TargetCollection> targets) {
    VsmIndex index;
    index.weights.reserve(targets->size());
    index.norms.reserve(targets->size());
    for (const auto& v : targets->vectors) {
        auto w = tfidf_vector(v, targets->dictionary);
        double norm2 = 0.0;
        for (const auto& t : w) norm2 += t.weight * t.weight;
        index.norms.push_back(std::sqrt(norm2));
        index.weights.push_back(std::move(w));
    }
    index.targets = std::move(targets);
    return index;
}

ScoredList vsm_score(const VsmIndex& index, const TermCountVector& query, std::string_view query_label) {
    const auto q = tfidf_vector(query, index.targets->dictionary);
    double qnorm2 = 0.0;
    for (const auto& t : q) qnorm2 += t.weight * t.weight;
    std::vector<double> scores(index.targets->size(), 0.0);
    if (qnorm2 == 0.0) {
        warn(label_of(query_label) + " has an empty TF-IDF vector; all scores are 0");
    } else {
        for (std::size_t d = 0; d < scores.size(); ++d) scores[d] = cosine(q, index.weights[d]);
    }
    return rank_targets(index.targets->ids, scores);
}

// --- LSI -------------------------------------------------------------------------------------

Eigen::SparseMatrix<double> term_document_matrix(const TargetCollection& targets) {
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t d = 0; d < targets.size(); ++d) {
        for (const auto& w : tfidf_vector(targets.vectors[d], targets.dictionary)) {
            if (w.weight != 0.0) {
                entries.emplace_back(static_cast<Eigen::Index>(w.term), static_cast<Eigen::Index>(d), w.weight);
            }
        }
    }
    Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(targets.dictionary.size()),
                                  static_cast<Eigen::Index>(targets.size()));
    a.setFromTriplets(entries.begin(), entries.end());
    return a;
}

namespace {
constexpr double kLatentZero = 1e-12;  // relative to the norm before projection
}  // namespace

LsiIndex build_lsi(std::shared_ptr<const TargetCollection> targets, std::optional<std::size_t> k,
                   const SvdOptions& options) {
    const auto a = term_document_matrix(*targets);
    const auto limit = static_cast<std::size_t>(std::min(a.rows(), a.cols()));
    if (limit == 0 || a.nonZeros() == 0) {
        throw ValidationError("LSI needs a target collection with at least one weighted term");
    }
    if (k && *k == 0) throw ValidationError("LSI rank k must be at least 1");
    std::size_t requested = k.value_or(kDefaultLsiRank);
    if (requested > limit) {
        if (k) {
            warn("LSI rank k=" + std::to_string(requested) + " exceeds min(terms, targets)=" + std::to_string(limit) +
                 "; using " + std::to_string(limit));
        }
        requested = limit;
    }
    auto svd = truncated_svd(a, requested, options);

    LsiIndex index;
    index.k = static_cast<std::size_t>(svd.singular_values.size());
    index.u = std::move(svd.u);
    index.singular_values = std::move(svd.singular_values);
    index.documents = index.u.transpose() * a;
    // Projections at roundoff level carry no direction; make them exact zeros.
    for (Eigen::Index d = 0; d < index.documents.cols(); ++d) {
        if (index.documents.col(d).norm() <= kLatentZero * a.col(d).norm()) index.documents.col(d).setZero();
    }
    index.targets = std::move(targets);
    return index;
}

Eigen::VectorXd lsi_fold_in(const SparseVector& query, const Eigen::MatrixXd& u, const Eigen::VectorXd& singular_values) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(u.cols());
    for (const auto& w : query) z += w.weight * u.row(static_cast<Eigen::Index>(w.term)).transpose();
    return z.cwiseQuotient(singular_values);
}

ScoredList lsi_score(const LsiIndex& index, const TermCountVector& query, std::string_view query_label) {
    const auto q = tfidf_vector(query, index.targets->dictionary);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index.k));
    for (const auto& w : q) z += w.weight * index.u.row(static_cast<Eigen::Index>(w.term)).transpose();
    double q_norm = 0.0;
    for (const auto& w : q) q_norm += w.weight * w.weight;
    std::vector<double> scores(index.targets->size(), 0.0);
    if (z.norm() <= kLatentZero * std::sqrt(q_norm)) {
        warn(label_of(query_label) + " projects to the zero vector in the latent space; all scores are 0");
    } else {
        for (std::size_t d = 0; d < scores.size(); ++d) {
            scores[d] = cosine(z, Eigen::VectorXd(index.documents.col(static_cast<Eigen::Index>(d))));
        }
    }
    return rank_targets(index.targets->ids, scores);
}

// --- LM --------------------------------------------------------------------------------------

LmIndex build_lm(std::shared_ptr<const TargetCollection> targets, double lambda) {
    std::vector<double> collection(targets->dictionary.size(), 0.0);
    double total = 0.0;
    for (const auto& v : targets->vectors) {
        for (const auto& c : v) {
            collection[c.term] += c.count;
            total += c.count;
        }
    }
    if (total > 0.0) {
        for (auto& p : collection) p /= total;
    }
    return build_lm(std::move(targets), lambda, std::move(collection));
}

LmIndex build_lm(std::shared_ptr<const TargetCollection> targets, double lambda, std::vector<double> collection) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("LM smoothing lambda must lie in (0, 1)");
    if (collection.size() != targets->dictionary.size()) {
        throw ValidationError("collection model size does not match the dictionary");
    }
    for (double p : collection) {
        if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("collection probabilities must be positive");
    }
    LmIndex index;
    index.lengths.reserve(targets->size());
    for (const auto& v : targets->vectors) {
        std::uint64_t length = 0;
        for (const auto& c : v) length += c.count;
        index.lengths.push_back(length);
    }
    index.collection = std::move(collection);
    index.lambda = lambda;
    index.targets = std::move(targets);
    return index;
}

double lm_probability(const LmIndex& index, std::size_t document, TermIndex term) {
    const double background = index.collection.at(term);
    const auto length = index.lengths.at(document);
    if (length == 0) return background;
    const double tf = count_of(index.targets->vectors[document], term);
    return (1.0 - index.lambda) * tf / static_cast<double>(length) + index.lambda * background;
}

ScoredList lm_score(const LmIndex& index, const TermCountVector& query, std::string_view query_label) {
    std::uint64_t query_length = 0;
    for (const auto& c : query) query_length += c.count;
    std::vector<double> scores(index.targets->size(), 0.0);
    if (query_length == 0) {
        warn(label_of(query_label) + " has no terms from the collection; all scores are 0");
    } else {
        for (std::size_t d = 0; d < scores.size(); ++d) {
            double sum = 0.0;
            for (const auto& c : query) sum += c.count * std::log(lm_probability(index, d, c.term));
            scores[d] = sum / static_cast<double>(query_length);
        }
    }
    return rank_targets(index.targets->ids, scores);
}

// --- BIM -------------------------------------------------------------------------------------

BimIndex build_bim(std::shared_ptr<const TargetCollection> targets) { return BimIndex{std::move(targets)}; }

double bim_weight(std::uint32_t df, std::size_t n) {
    const double nd = static_cast<double>(n);
    const double dfd = static_cast<double>(df);
    return std::log((nd - dfd + 0.5) / (dfd + 0.5));
}

ScoredList bim_score(const BimIndex& index, const TermCountVector& query, std::string_view) {
    const auto& dict = index.targets->dictionary;
    std::vector<double> scores(index.targets->size(), 0.0);
    for (std::size_t d = 0; d < scores.size(); ++d) {
        const auto& doc = index.targets->vectors[d];
        double sum = 0.0;
        for (const auto& c : query) {
            if (count_of(doc, c.term) > 0) sum += bim_weight(dict.df(c.term), dict.document_count());
        }
        scores[d] = sum;
    }
    return rank_targets(index.targets->ids, scores);
}

// --- selection ------------------------------------------------------------------------------

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::vsm: return "vsm";
        case ModelKind::lsi: return "lsi";
        case ModelKind::lm: return "lm";
        case ModelKind::bim: return "bim";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "vsm") return ModelKind::vsm;
    if (name == "lsi") return ModelKind::lsi;
    if (name == "lm") return ModelKind::lm;
    if (name == "bim") return ModelKind::bim;
    throw ValidationError("unknown model '" + std::string(name) + "' (expected vsm, lsi, lm or bim)");
}

std::string ModelConfig::describe() const {
    std::string out = "model=" + std::string(to_string(kind));
    if (kind == ModelKind::lsi) out += ";k=" + (lsi_k ? std::to_string(*lsi_k) : std::string("auto"));
    if (kind == ModelKind::lm) out += ";lambda=" + shortest(lambda);
    return out;
}

AnyIndex build_index(std::shared_ptr<const TargetCollection> targets, const ModelConfig& config) {
    switch (config.kind) {
        case ModelKind::vsm: return build_vsm(std::move(targets));
        case ModelKind::lsi: return build_lsi(std::move(targets), config.lsi_k);
        case ModelKind::lm: return build_lm(std::move(targets), config.lambda);
        case ModelKind::bim: return build_bim(std::move(targets));
    }
    throw ValidationError("unknown model kind");
}

ScoredList score(const AnyIndex& index, const TermCountVector& query, std::string_view query_label) {
    return std::visit(
        [&](const auto& idx) -> ScoredList {
            using T = std::decay_t<decltype(idx)>;
            if constexpr (std::is_same_v<T, VsmIndex>) return vsm_score(idx, query, query_label);
            else if constexpr (std::is_same_v<T, LsiIndex>) return lsi_score(idx, query, query_label);
            else if constexpr (std::is_same_v<T, LmIndex>) return lm_score(idx, query, query_label);
            else return bim_score(idx, query, query_label);
        },
        index);
}

}  // namespace tracerec
