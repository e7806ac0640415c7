#include <doctest.h>

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "support.hpp"
#include "tracerec/error.hpp"
#include "tracerec/stats.hpp"

using namespace tracerec;

namespace {

// Student t CDF at 50 digits (tests/oracles/t_oracle.py), rounded to 17.
struct TPoint {
    double t, df, cdf;
};
const TPoint kTPoints[] = {
    {-3, 1, 0.10241638234956673},  {-1, 1, 0.25},
    {-0.5, 1, 0.35241638234956673}, {0.3, 1, 0.59277357907774234},
    {1.699, 1, 0.83066510916140772}, {2.5, 1, 0.8788810584091566},
    {8, 1, 0.96041657583943446},    {-3, 2, 0.047732983133354566},
    {-1, 2, 0.21132486540518712},   {-0.5, 2, 0.33333333333333333},
    {0.3, 2, 0.6037571695799112},   {1.699, 2, 0.88429076102190687},
    {2.5, 2, 0.9351941398892446},   {8, 2, 0.99236596391733093},
    {-3, 5, 0.015049623948731287},  {-1, 5, 0.18160873382456131},
    {-0.5, 5, 0.3191494358204645},  {0.3, 5, 0.61187547886836277},
    {1.699, 5, 0.92496493615728288}, {2.5, 5, 0.97275495032881188},
    {8, 5, 0.99975354666971378},    {-3, 29, 0.0027495960669517031},
    {-1, 29, 0.16279099400809677},  {-0.5, 29, 0.31042404209689068},
    {0.3, 29, 0.61684145333551613}, {1.699, 29, 0.94998789781463689},
    {2.5, 29, 0.99083732783078696}, {8, 29, 0.99999999599371218},
    {-3, 100, 0.0017039576716647248}, {-1, 100, 0.15986207789206168},
    {-0.5, 100, 0.30908678291544329}, {0.3, 100, 0.61760005984984826},
    {1.699, 100, 0.9537858560914548}, {2.5, 100, 0.99297710543796141},
    {8, 100, 0.99999999999886357},
};

/// Rescales `z` to exactly the requested sample mean and sd.
std::vector<double> with_moments(std::vector<double> z, double mean, double sd) {
    const double n = static_cast<double>(z.size());
    const double m = std::accumulate(z.begin(), z.end(), 0.0) / n;
    double ss = 0;
    for (double x : z) ss += (x - m) * (x - m);
    const double s = std::sqrt(ss / (n - 1));
    for (double& x : z) x = mean + sd * (x - m) / s;
    return z;
}

void check_consistency(const EquivalenceResult& r) {
    const bool by_p = r.p_lower < r.alpha && r.p_upper < r.alpha;
    const bool by_ci = r.ci_low > -r.delta && r.ci_high < r.delta;
    CHECK(r.equivalent == by_p);
    CHECK(r.equivalent == by_ci);
}

}  // namespace

TEST_CASE("hypergeom_pmf") {
    CHECK(std::abs(hypergeom_pmf(10, 3, 5, 0) - 21.0 / 252.0) <= 1e-14);
    CHECK(std::abs(hypergeom_pmf(10, 3, 5, 3) - 21.0 / 252.0) <= 1e-14);
    CHECK(std::abs(hypergeom_pmf(10, 3, 10, 3) - 1.0) <= 1e-14);
    CHECK(hypergeom_pmf(10, 3, 10, 2) == 0.0);
    CHECK(hypergeom_pmf(10, 3, 5, 4) == 0.0);
    CHECK(hypergeom_pmf(10, 8, 5, 2) == 0.0);  // below max(0, k + R - N) = 3
    CHECK_THROWS_AS(hypergeom_pmf(5, 6, 1, 0), ValidationError);
}

TEST_CASE("chance_baseline normalization and mean for all N up to 200") {
    std::size_t checked = 0;
    for (std::size_t n = 1; n <= 200; n += (n < 30 ? 1 : 7)) {
        for (std::size_t r = 0; r <= n; r += 1 + n / 9) {
            for (std::size_t k = 0; k <= n; k += 1 + n / 11) {
                const auto b = chance_baseline(n, r, k);
                double sum = 0.0;
                double mean = 0.0;
                for (std::size_t i = 0; i < b.pmf.size(); ++i) {
                    sum += b.pmf[i];
                    mean += static_cast<double>(b.min_hits + i) * b.pmf[i];
                }
                CHECK(std::abs(sum - 1.0) <= 1e-12);
                CHECK(std::abs(mean - b.expected_hits) <= 1e-10);
                CHECK(b.min_hits == (k + r > n ? k + r - n : 0));
                CHECK(b.max_hits == std::min(k, r));
                ++checked;
            }
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("chance_pvalue") {
    CHECK(chance_pvalue(10, 3, 5, 0) == 1.0);
    CHECK(std::abs(chance_pvalue(10, 3, 5, 3) - 21.0 / 252.0) <= 1e-14);
    CHECK(std::abs(chance_pvalue(10, 3, 5, 2) - (105.0 + 21.0) / 252.0) <= 1e-14);
    CHECK_THROWS_AS(chance_pvalue(10, 3, 5, 4), ValidationError);
}

TEST_CASE("Rng is reproducible and bounded") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.below(7);
        CHECK(x == b.below(7));
        CHECK(x < 7);
    }
    // The engine is std::mt19937_64, whose 10000th output the standard fixes.
    Rng c(5489);
    std::uint64_t last = 0;
    for (int i = 0; i < 10000; ++i) last = c.next();
    CHECK(last == 9981545732273789042ULL);
    CHECK_THROWS_AS(a.below(0), ValidationError);
}

TEST_CASE("monte_carlo_pvalue") {
    const auto r = monte_carlo_pvalue({}, 10, 3, 5, 1.0, 10000, 7);
    CHECK(std::abs(r.mean - 1.5) <= 3.0 * r.sd / std::sqrt(10000.0));
    const auto again = monte_carlo_pvalue({}, 10, 3, 5, 1.0, 10000, 7);
    CHECK(again.p_value == r.p_value);
    CHECK(again.mean == r.mean);
    // below the minimum attainable statistic every draw counts
    CHECK(monte_carlo_pvalue({}, 10, 3, 5, -1.0, 500, 1).p_value == 1.0);
    // the estimator never reaches 0
    CHECK(monte_carlo_pvalue({}, 10, 3, 5, 4.0, 500, 1).p_value == doctest::Approx(1.0 / 501.0));
    CHECK_THROWS_AS(monte_carlo_pvalue({}, 10, 3, 5, 1.0, 99, 1), ValidationError);

    // custom statistic: sum of selected indices
    const HitsFn sum = [](std::span<const std::size_t> s) {
        return static_cast<double>(std::accumulate(s.begin(), s.end(), std::size_t{0}));
    };
    const auto rs = monte_carlo_pvalue(sum, 6, 0, 2, 0.0, 2000, 3);
    CHECK(std::abs(rs.mean - 5.0) <= 3.0 * rs.sd / std::sqrt(2000.0));
}

TEST_CASE("paired_permutation_pvalue") {
    const std::vector<double> zero{0.0, 0.0, 0.0};
    CHECK(paired_permutation_pvalue(zero, 200, 1).p_value == 1.0);
    const std::vector<double> shifted{0.3, 0.4, 0.35, 0.5, 0.45, 0.3, 0.42, 0.38, 0.33, 0.41};
    const auto r = paired_permutation_pvalue(shifted, 2000, 9);
    CHECK(r.p_value < 0.01);  // exact value 2 / 1024
    CHECK(r.p_value == paired_permutation_pvalue(shifted, 2000, 9).p_value);
}

TEST_CASE("incomplete beta against closed forms") {
    // I_x(1, b) = 1 - (1 - x)^b and I_x(a, 1) = x^a
    for (double x : {0.01, 0.2, 0.5, 0.77, 0.99}) {
        CHECK(std::abs(incomplete_beta(1.0, 3.5, x) - (1.0 - std::pow(1.0 - x, 3.5))) <= 1e-14);
        CHECK(std::abs(incomplete_beta(2.5, 1.0, x) - std::pow(x, 2.5)) <= 1e-14);
    }
    CHECK(incomplete_beta(2, 3, 0.0) == 0.0);
    CHECK(incomplete_beta(2, 3, 1.0) == 1.0);
    CHECK_THROWS_AS(incomplete_beta(0, 1, 0.5), ValidationError);
}

TEST_CASE("student t CDF matches high-precision values") {
    for (const auto& p : kTPoints) CHECK_MESSAGE(std::abs(student_t_cdf(p.t, p.df) - p.cdf) <= 1e-13, p.t << " " << p.df);
    CHECK(std::abs(student_t_cdf(0.0, 7) - 0.5) <= 1e-12);
}

TEST_CASE("student t CDF agrees with Boost.Math and is monotone") {
    testing::Gen g(17);
    for (int i = 0; i < 2000; ++i) {
        const double df = g.chance(0.5) ? static_cast<double>(g.between(1, 200)) : g.real(0.5, 60.0);
        const double t = g.real(-12.0, 12.0);
        boost::math::students_t dist(df);
        CHECK(std::abs(student_t_cdf(t, df) - boost::math::cdf(dist, t)) <= 1e-12);
        CHECK(student_t_cdf(t, df) <= student_t_cdf(t + g.real(0.0, 1.0), df));
    }
}

TEST_CASE("student t quantiles") {
    CHECK(std::abs(student_t_quantile(0.95, 29) - 1.6991270265334978) <= 1e-12);
    CHECK(std::abs(student_t_quantile(0.975, 10) - 2.2281388519862747) <= 1e-12);
    CHECK(std::abs(student_t_quantile(0.9, 3) - 1.6377443536962101) <= 1e-12);
    CHECK(std::abs(student_t_quantile(0.99, 60) - 2.3901194726249133) <= 1e-12);
    CHECK(std::abs(student_t_quantile(0.05, 29) + 1.6991270265334978) <= 1e-12);
    CHECK(std::abs(student_t_quantile(0.95, 29) - 1.699) <= 1e-3);
}

TEST_CASE("tost_paired") {
    SUBCASE("all zero differences are equivalent") {
        const std::vector<double> d(5, 0.0);
        const auto r = tost_paired(d, 0.05, 0.05);
        CHECK(r.equivalent);
        CHECK_FALSE(r.cohens_d.has_value());
        check_consistency(r);
    }
    SUBCASE("constant differences beyond the margin are not") {
        const std::vector<double> d(4, 0.07);
        const auto r = tost_paired(d, 0.05, 0.05);
        CHECK_FALSE(r.equivalent);
        check_consistency(r);
    }
    SUBCASE("mean beyond the margin") {
        testing::Gen g(1);
        std::vector<double> z;
        for (int i = 0; i < 20; ++i) z.push_back(g.normal(0, 1));
        const auto r = tost_paired(with_moments(z, 0.10, 0.005), 0.05, 0.05);
        CHECK_FALSE(r.equivalent);
        CHECK(r.ci_low > 0.05);
        check_consistency(r);
    }
    SUBCASE("n=30, mean 0.01, sd 0.02 matches the high-precision oracle") {
        testing::Gen g(2);
        std::vector<double> z;
        for (int i = 0; i < 30; ++i) z.push_back(g.normal(0, 1));
        const auto r = tost_paired(with_moments(z, 0.01, 0.02), 0.05, 0.05);
        CHECK(r.equivalent);
        CHECK(std::abs(r.p_lower / 1.5637507306929812e-16 - 1.0) <= 1e-6);
        CHECK(std::abs(r.p_upper / 4.0106435701133081e-12 - 1.0) <= 1e-6);
        check_consistency(r);
    }
    SUBCASE("a closer case: n=12, mean 0.02, sd 0.05") {
        testing::Gen g(3);
        std::vector<double> z;
        for (int i = 0; i < 12; ++i) z.push_back(g.normal(0, 1));
        const auto r = tost_paired(with_moments(z, 0.02, 0.05), 0.05, 0.05);
        CHECK(std::abs(r.p_lower - 0.00025548613363349024) <= 1e-9);
        CHECK(std::abs(r.p_upper - 0.030931203211517216) <= 1e-9);
        CHECK(r.equivalent);
        CHECK_FALSE(tost_paired(with_moments(z, 0.02, 0.05), 0.05, 0.025).equivalent);
    }
    SUBCASE("input checks") {
        const std::vector<double> one{0.1};
        const std::vector<double> two{0.1, 0.2};
        const std::vector<double> bad{0.1, NAN};
        CHECK_THROWS_AS(tost_paired(one, 0.05, 0.05), ValidationError);
        CHECK_THROWS_AS(tost_paired(bad, 0.05, 0.05), ValidationError);
        CHECK_THROWS_AS(tost_paired(two, 0.0, 0.05), ValidationError);
        CHECK_THROWS_AS(tost_paired(two, 0.05, 0.5), ValidationError);
        CHECK_THROWS_AS(tost_paired(two, 0.05, 0.0), ValidationError);
    }
}

TEST_CASE("tost verdict, p-values and interval agree on random inputs") {
    testing::Gen g(1234);
    std::size_t equivalent = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto n = g.between(2, 60);
        const double mean = g.real(-0.1, 0.1);
        const double sd = g.chance(0.05) ? 0.0 : g.real(0.001, 0.2);
        std::vector<double> d;
        for (std::size_t j = 0; j < n; ++j) d.push_back(g.normal(mean, sd));
        const auto r = tost_paired(d, g.real(0.01, 0.1), g.real(0.01, 0.2));
        check_consistency(r);
        equivalent += r.equivalent;
    }
    CHECK(equivalent > 50);
    CHECK(equivalent < 950);
}

TEST_CASE("cohens_d_paired") {
    const std::vector<double> same{1, 1, 1};
    const std::vector<double> sym{-1, 1};
    const std::vector<double> ramp{0, 0.1, 0.2};
    CHECK_FALSE(cohens_d_paired(same).has_value());
    CHECK(*cohens_d_paired(sym) == 0.0);
    CHECK(std::abs(*cohens_d_paired(ramp) - 1.0) <= 1e-12);
}

TEST_CASE("compare_runs") {
    MetricsReport a;
    a.run_tag = "model=vsm;corpus=abc";
    a.gold_fingerprint = "g";
    a.cuts = {5};
    for (int i = 0; i < 6; ++i) {
        SourceMetrics m;
        m.source_id = "S" + std::to_string(i);
        m.average_precision = 0.1 * i;
        m.cuts = {{5, 0.2, 0.5 + 0.05 * i}};
        m.ndcg = {0.3};
        a.sources.push_back(m);
    }
    SUBCASE("a report against itself is equivalent") {
        const auto r = compare_runs(a, a, "ap", 0.05, 0.05);
        CHECK(r.equivalence.equivalent);
        CHECK_FALSE(r.equivalence.cohens_d.has_value());
        CHECK(r.signs.ties == 6);
    }
    SUBCASE("values and signs") {
        auto b = a;
        b.run_tag = "model=lsi;corpus=abc";
        b.sources[0].average_precision = 0.2;
        b.sources[1].average_precision = 0.0;
        const auto r = compare_runs(a, b, "ap", 0.05, 0.05);
        CHECK(r.signs.wins == 1);
        CHECK(r.signs.losses == 1);
        CHECK(r.signs.ties == 4);
        const auto direct = tost_paired(r.differences, 0.05, 0.05);
        CHECK(direct.equivalent == r.equivalence.equivalent);
        CHECK(direct.p_upper == r.equivalence.p_upper);
        CHECK(compare_runs(a, b, "recall@5", 0.05, 0.05).values_a[1] == 0.55);
    }
    SUBCASE("mismatches") {
        auto b = a;
        b.sources.pop_back();
        CHECK_THROWS_AS(compare_runs(a, b, "ap", 0.05, 0.05), ValidationError);
        b = a;
        for (auto& s : b.sources) s.source_id += "x";
        CHECK_THROWS_AS(compare_runs(a, b, "ap", 0.05, 0.05), ValidationError);
        b = a;
        b.gold_fingerprint = "other";
        CHECK_THROWS_AS(compare_runs(a, b, "ap", 0.05, 0.05), ValidationError);
        b = a;
        b.run_tag = "model=vsm;corpus=zzz";
        CHECK_THROWS_AS(compare_runs(a, b, "ap", 0.05, 0.05), ValidationError);
        CHECK_THROWS_AS(compare_runs(a, a, "precision@7", 0.05, 0.05), ValidationError);
        CHECK_THROWS_AS(compare_runs(a, a, "bogus", 0.05, 0.05), ValidationError);
    }
}
