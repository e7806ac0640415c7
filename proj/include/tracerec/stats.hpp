#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracerec/metrics.hpp"

namespace tracerec {

/// Probability of x hits when k of N targets are drawn without replacement
/// and R of them are relevant. 0 outside the support. Throws
/// ValidationError unless R <= N and k <= N.
double hypergeom_pmf(std::size_t n, std::size_t relevant, std::size_t retrieved, std::size_t x);

/// Retrieval accuracy expected by chance.
struct ChanceBaseline {
    std::size_t n = 0;
    std::size_t relevant = 0;
    std::size_t retrieved = 0;
    double expected_hits = 0.0;
    double expected_precision = 0.0;
    std::size_t min_hits = 0;
    std::size_t max_hits = 0;
    std::vector<double> pmf;  // pmf[i] = P(X = min_hits + i)
};

ChanceBaseline chance_baseline(std::size_t n, std::size_t relevant, std::size_t retrieved);

/// Upper tail P(X >= observed). Throws ValidationError if observed exceeds min(k, R).
double chance_pvalue(std::size_t n, std::size_t relevant, std::size_t retrieved, std::size_t observed);

/// Seeded generator: the 64-bit Mersenne Twister (its output sequence is
/// fixed by the C++ standard) plus rejection sampling for bounded integers,
/// so draws are identical on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform on [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);
    bool coin() { return (engine_() >> 63) != 0; }
    std::uint64_t next() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

/// Statistic over the indices of one simulated retrieval (k distinct values
/// in [0, N)).
using HitsFn = std::function<double(std::span<const std::size_t> selected)>;

/// Counts selected indices below `relevant`, i.e. treats targets 0..R-1 as relevant.
HitsFn count_hits(std::size_t relevant);

struct MonteCarloResult {
    double p_value = 1.0;
    double mean = 0.0;  // of the simulated statistic
    double sd = 0.0;    // sample sd, n-1 denominator
    std::size_t replications = 0;
    std::uint64_t seed = 0;
};

/// Draws m uniform k-subsets by partial Fisher-Yates shuffle and returns
/// (1 + #{sim >= observed}) / (m + 1). m must be at least 100. An empty
/// hits_fn means count_hits(R).
MonteCarloResult monte_carlo_pvalue(const HitsFn& hits_fn, std::size_t n, std::size_t relevant, std::size_t retrieved,
                                    double observed, std::size_t m, std::uint64_t seed);

/// Two-sided sign-flip permutation test of a zero mean paired difference,
/// with the same add-one estimator.
MonteCarloResult paired_permutation_pvalue(std::span<const double> differences, std::size_t m, std::uint64_t seed);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double df);
double student_t_quantile(double p, double df);

struct EquivalenceResult {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double delta = 0.0;
    double alpha = 0.0;
    double df = 0.0;
    double t_lower = 0.0;  // against H0: mu <= -delta
    double t_upper = 0.0;  // against H0: mu >= delta
    double p_lower = 1.0;
    double p_upper = 1.0;
    double ci_low = 0.0;  // (1 - 2 alpha) interval
    double ci_high = 0.0;
    bool equivalent = false;
    std::optional<double> cohens_d;
};

/// Paired TOST on the differences. With sd = 0 the result is equivalent iff
/// |mean| < delta. Throws ValidationError for n < 2, non-finite values,
/// delta <= 0 or alpha outside (0, 0.5).
EquivalenceResult tost_paired(std::span<const double> differences, double delta, double alpha);

/// mean / sd with the n-1 denominator; nullopt when sd is 0.
std::optional<double> cohens_d_paired(std::span<const double> differences);

struct SignSummary {
    std::size_t wins = 0;  // a > b
    std::size_t ties = 0;
    std::size_t losses = 0;
};

struct ComparisonReport {
    std::string metric;
    std::string run_a;
    std::string run_b;
    std::string gold_fingerprint;
    std::vector<std::string> sources;
    std::vector<double> values_a;
    std::vector<double> values_b;
    std::vector<double> differences;  // a - b
    EquivalenceResult equivalence;
    SignSummary signs;
    std::optional<MonteCarloResult> permutation;
};

/// Value of `metric` for one source: ap, precision, recall, f1,
/// precision@K, recall@K or ndcg@K (K among the report's cuts).
double metric_value(const MetricsReport& report, const SourceMetrics& source, std::string_view metric);

/// Pairs per-source values of two reports over the same gold standard and
/// source set, then runs TOST and the effect size. Throws ValidationError on
/// mismatched gold, corpus or sources.
ComparisonReport compare_runs(const MetricsReport& a, const MetricsReport& b, std::string_view metric, double delta,
                              double alpha);

}  // namespace tracerec
