#include "tracerec/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "tracerec/diagnostics.hpp"
#include "tracerec/error.hpp"
#include "tracerec/recovery.hpp"

namespace tracerec {

namespace {

double log_choose(std::size_t n, std::size_t k) {
    const auto dn = static_cast<double>(n);
    const auto dk = static_cast<double>(k);
    return std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0);
}

void check_hypergeom(std::size_t n, std::size_t relevant, std::size_t retrieved) {
    if (relevant > n || retrieved > n) {
        throw ValidationError("hypergeometric parameters need R <= N and k <= N (N=" + std::to_string(n) +
                              ", R=" + std::to_string(relevant) + ", k=" + std::to_string(retrieved) + ")");
    }
}

std::size_t support_min(std::size_t n, std::size_t relevant, std::size_t retrieved) {
    return retrieved + relevant > n ? retrieved + relevant - n : 0;
}

double mean_of(std::span<const double> xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double sd_of(std::span<const double> xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

void check_differences(std::span<const double> differences) {
    if (differences.size() < 2) throw ValidationError("paired analysis needs at least 2 differences");
    for (double d : differences) {
        if (!std::isfinite(d)) throw ValidationError("paired differences must be finite");
    }
}

// Continued fraction for I_x(a, b), modified Lentz. Converges fast for
// x < (a + 1) / (a + b + 2).
double beta_fraction(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-16;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double dm = m;
        double num = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
        d = 1.0 + num * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + num / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        num = -(a + dm) * (a + b + dm) * x / ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
        d = 1.0 + num * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + num / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double step = d * c;
        h *= step;
        if (std::abs(step - 1.0) < kEps) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

}  // namespace

double hypergeom_pmf(std::size_t n, std::size_t relevant, std::size_t retrieved, std::size_t x) {
    check_hypergeom(n, relevant, retrieved);
    if (x < support_min(n, relevant, retrieved) || x > std::min(retrieved, relevant)) return 0.0;
    return std::exp(log_choose(relevant, x) + log_choose(n - relevant, retrieved - x) - log_choose(n, retrieved));
}

ChanceBaseline chance_baseline(std::size_t n, std::size_t relevant, std::size_t retrieved) {
    check_hypergeom(n, relevant, retrieved);
    if (n == 0) throw ValidationError("chance baseline needs at least one candidate target");
    ChanceBaseline b;
    b.n = n;
    b.relevant = relevant;
    b.retrieved = retrieved;
    b.expected_hits = static_cast<double>(retrieved) * static_cast<double>(relevant) / static_cast<double>(n);
    b.expected_precision = static_cast<double>(relevant) / static_cast<double>(n);
    b.min_hits = support_min(n, relevant, retrieved);
    b.max_hits = std::min(retrieved, relevant);
    for (auto x = b.min_hits; x <= b.max_hits; ++x) b.pmf.push_back(hypergeom_pmf(n, relevant, retrieved, x));
    return b;
}

double chance_pvalue(std::size_t n, std::size_t relevant, std::size_t retrieved, std::size_t observed) {
    check_hypergeom(n, relevant, retrieved);
    const auto top = std::min(retrieved, relevant);
    if (observed > top) {
        throw ValidationError("observed hits " + std::to_string(observed) + " exceed min(k, R) = " + std::to_string(top));
    }
    if (observed <= support_min(n, relevant, retrieved)) return 1.0;
    double p = 0.0;
    for (auto x = observed; x <= top; ++x) p += hypergeom_pmf(n, relevant, retrieved, x);
    return std::min(p, 1.0);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw ValidationError("random bound must be positive");
    // Reject the first 2^64 mod bound values so the remainder is unbiased.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = engine_();
        if (r >= threshold) return r % bound;
    }
}

HitsFn count_hits(std::size_t relevant) {
    return [relevant](std::span<const std::size_t> selected) {
        return static_cast<double>(std::count_if(selected.begin(), selected.end(),
                                                 [relevant](std::size_t i) { return i < relevant; }));
    };
}

MonteCarloResult monte_carlo_pvalue(const HitsFn& hits_fn, std::size_t n, std::size_t relevant, std::size_t retrieved,
                                    double observed, std::size_t m, std::uint64_t seed) {
    check_hypergeom(n, relevant, retrieved);
    if (m < 100) throw ValidationError("Monte Carlo needs at least 100 replications");
    const HitsFn statistic = hits_fn ? hits_fn : count_hits(relevant);

    Rng rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> sims;
    sims.reserve(m);
    std::size_t at_least = 0;
    for (std::size_t r = 0; r < m; ++r) {
        // Any starting permutation yields a uniform k-subset, so the array
        // is not reset between replications.
        for (std::size_t i = 0; i < retrieved; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(n - i));
            std::swap(order[i], order[j]);
        }
        const double s = statistic(std::span<const std::size_t>(order.data(), retrieved));
        if (s >= observed) ++at_least;
        sims.push_back(s);
    }
    MonteCarloResult out;
    out.p_value = static_cast<double>(1 + at_least) / static_cast<double>(m + 1);
    out.mean = mean_of(sims);
    out.sd = sd_of(sims, out.mean);
    out.replications = m;
    out.seed = seed;
    return out;
}

MonteCarloResult paired_permutation_pvalue(std::span<const double> differences, std::size_t m, std::uint64_t seed) {
    check_differences(differences);
    if (m < 100) throw ValidationError("Monte Carlo needs at least 100 replications");
    const double observed = std::abs(mean_of(differences));
    // Relative slack so that sign patterns reproducing |mean| up to rounding count.
    const double slack = 1e-12 * std::max(1.0, observed);
    Rng rng(seed);
    std::vector<double> sims;
    sims.reserve(m);
    std::size_t at_least = 0;
    for (std::size_t r = 0; r < m; ++r) {
        double sum = 0.0;
        for (double d : differences) sum += rng.coin() ? d : -d;
        const double s = std::abs(sum / static_cast<double>(differences.size()));
        if (s + slack >= observed) ++at_least;
        sims.push_back(s);
    }
    MonteCarloResult out;
    out.p_value = static_cast<double>(1 + at_least) / static_cast<double>(m + 1);
    out.mean = mean_of(sims);
    out.sd = sd_of(sims, out.mean);
    out.replications = m;
    out.seed = seed;
    return out;
}

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("incomplete beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("incomplete beta needs 0 <= x <= 1");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
    return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw ValidationError("t distribution needs df > 0");
    if (std::isnan(t)) throw ValidationError("t statistic is NaN");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    if (t == 0.0) return 0.5;
    const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
    return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("t quantile needs 0 < p < 1");
    if (p == 0.5) return 0.0;
    double lo = -1.0;
    double hi = 1.0;
    while (student_t_cdf(lo, df) > p) lo *= 2.0;
    while (student_t_cdf(hi, df) < p) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, df) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

EquivalenceResult tost_paired(std::span<const double> differences, double delta, double alpha) {
    check_differences(differences);
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("equivalence margin delta must be > 0");
    if (!(alpha > 0.0 && alpha < 0.5)) throw ValidationError("alpha must lie in (0, 0.5)");

    EquivalenceResult r;
    r.n = differences.size();
    r.delta = delta;
    r.alpha = alpha;
    r.df = static_cast<double>(r.n - 1);
    r.mean = mean_of(differences);
    r.sd = sd_of(differences, r.mean);
    r.cohens_d = cohens_d_paired(differences);

    if (r.sd == 0.0) {
        const bool above = r.mean > -delta;
        const bool below = r.mean < delta;
        r.t_lower = above ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        r.t_upper = below ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        r.p_lower = above ? 0.0 : 1.0;
        r.p_upper = below ? 0.0 : 1.0;
        r.ci_low = r.ci_high = r.mean;
    } else {
        const double se = r.sd / std::sqrt(static_cast<double>(r.n));
        r.t_lower = (r.mean + delta) / se;
        r.t_upper = (r.mean - delta) / se;
        r.p_lower = student_t_cdf(-r.t_lower, r.df);
        r.p_upper = student_t_cdf(r.t_upper, r.df);
        const double q = student_t_quantile(1.0 - alpha, r.df);
        r.ci_low = r.mean - q * se;
        r.ci_high = r.mean + q * se;
    }
    r.equivalent = r.p_lower < alpha && r.p_upper < alpha;
    return r;
}

std::optional<double> cohens_d_paired(std::span<const double> differences) {
    check_differences(differences);
    const double mean = mean_of(differences);
    const double sd = sd_of(differences, mean);
    if (sd == 0.0) return std::nullopt;
    return mean / sd;
}

double metric_value(const MetricsReport& report, const SourceMetrics& source, std::string_view metric) {
    if (metric == "ap") return source.average_precision;
    if (metric == "precision") return source.precision;
    if (metric == "recall") return source.recall;
    if (metric == "f1") return source.f1;
    const auto at = metric.find('@');
    if (at != std::string_view::npos) {
        const auto name = metric.substr(0, at);
        const auto digits = metric.substr(at + 1);
        std::size_t k = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (ec == std::errc{} && p == digits.data() + digits.size()) {
            const auto it = std::find(report.cuts.begin(), report.cuts.end(), k);
            if (it == report.cuts.end()) {
                throw ValidationError("cut " + std::to_string(k) + " is not among the report's cut levels");
            }
            const auto i = static_cast<std::size_t>(it - report.cuts.begin());
            if (name == "precision") return source.cuts.at(i).precision;
            if (name == "recall") return source.cuts.at(i).recall;
            if (name == "ndcg") return source.ndcg.at(i);
        }
    }
    throw ValidationError("unknown metric '" + std::string(metric) +
                          "' (expected ap, precision, recall, f1, precision@K, recall@K or ndcg@K)");
}

ComparisonReport compare_runs(const MetricsReport& a, const MetricsReport& b, std::string_view metric, double delta,
                              double alpha) {
    if (a.gold_fingerprint != b.gold_fingerprint) {
        throw ValidationError("reports were evaluated against different gold standards");
    }
    const auto corpus_a = tag_value(a.run_tag, "corpus");
    const auto corpus_b = tag_value(b.run_tag, "corpus");
    if (!corpus_a.empty() && !corpus_b.empty() && corpus_a != corpus_b) {
        throw ValidationError("reports come from runs over different corpora");
    }
    const bool same_sources =
        a.sources.size() == b.sources.size() &&
        std::equal(a.sources.begin(), a.sources.end(), b.sources.begin(),
                   [](const SourceMetrics& x, const SourceMetrics& y) { return x.source_id == y.source_id; });
    if (!same_sources) throw ValidationError("reports cover different source sets");

    ComparisonReport out;
    out.metric = std::string(metric);
    out.run_a = a.run_tag;
    out.run_b = b.run_tag;
    out.gold_fingerprint = a.gold_fingerprint;
    for (std::size_t i = 0; i < a.sources.size(); ++i) {
        const double va = metric_value(a, a.sources[i], metric);
        const double vb = metric_value(b, b.sources[i], metric);
        out.sources.push_back(a.sources[i].source_id);
        out.values_a.push_back(va);
        out.values_b.push_back(vb);
        out.differences.push_back(va - vb);
        if (va > vb) {
            ++out.signs.wins;
        } else if (va < vb) {
            ++out.signs.losses;
        } else {
            ++out.signs.ties;
        }
    }
    out.equivalence = tost_paired(out.differences, delta, alpha);
    return out;
}

}  // namespace tracerec
