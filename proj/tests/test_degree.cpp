#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "fountain/degree.hpp"
#include "support/stats.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using fountain::DegreePmf;
using fountain::RobustSolitonParams;
using fountain::Rng;
using fountain::TailMode;

namespace {

// The ten raptor terms, restated here by hand as the reference.
const std::vector<std::pair<std::uint32_t, double>> kRaptorTerms = {
    {1, 0.007969}, {2, 0.493570}, {3, 0.166220}, {4, 0.072646}, {5, 0.082558},
    {8, 0.056058}, {9, 0.037229}, {19, 0.055590}, {65, 0.025023}, {66, 0.003135}};
constexpr double kRaptorRawSum = 0.999998;
constexpr double kTailRawMass = 0.498459; // terms of degree >= 3

double pmf_sum(const DegreePmf& pmf) {
    double s = 0.0;
    for (double p : pmf.probs)
        s += p;
    return s;
}

// Chi-square goodness of fit of n samples drawn from pmf, against pmf.
double sampling_pvalue(const DegreePmf& pmf, std::uint64_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::map<std::uint32_t, std::size_t> index;
    for (std::size_t i = 0; i < pmf.degrees.size(); ++i)
        index[pmf.degrees[i]] = i;
    std::vector<std::uint64_t> counts(pmf.degrees.size(), 0);
    for (std::uint64_t i = 0; i < n; ++i)
        ++counts[index.at(pmf.sample(rng))];
    return stats::chi_square_gof(counts, pmf.probs, n);
}

} // namespace

TEST_CASE("ideal soliton") {
    {
        const DegreePmf pmf = fountain::ideal_soliton(1);
        REQUIRE(pmf.degrees == std::vector<std::uint32_t>{1});
        REQUIRE(pmf.probs[0] == 1.0);
    }
    {
        const DegreePmf pmf = fountain::ideal_soliton(3);
        REQUIRE_THAT(pmf.prob_of(1), WithinAbs(1.0 / 3.0, 1e-15));
        REQUIRE_THAT(pmf.prob_of(2), WithinAbs(0.5, 1e-15));
        REQUIRE_THAT(pmf.prob_of(3), WithinAbs(1.0 / 6.0, 1e-15));
    }
    {
        const DegreePmf pmf = fountain::ideal_soliton(100);
        REQUIRE(pmf.prob_of(2) == 0.5);
        REQUIRE_THAT(pmf_sum(pmf), WithinAbs(1.0, 1e-12)); // telescoping
    }
    CHECK_THROWS_AS(fountain::ideal_soliton(0), std::invalid_argument);
}

TEST_CASE("robust soliton derived parameters") {
    const RobustSolitonParams a(100, 0.05, 0.01);
    REQUIRE_THAT(a.S, WithinRel(0.05 * std::log(100.0 / 0.01) * 10.0, 1e-12));
    REQUIRE_THAT(a.S, WithinAbs(4.6051702, 1e-6));
    REQUIRE(a.spike == 22); // round(100 / 4.60517...) = round(21.715)

    const RobustSolitonParams b(100, 0.05, 0.001);
    REQUIRE_THAT(b.S, WithinAbs(5.7564627, 1e-6));
    REQUIRE(b.spike == 17);

    CHECK_THROWS_AS(RobustSolitonParams(1, 0.05, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(RobustSolitonParams(100, 0.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(RobustSolitonParams(100, 0.05, 1.5), std::invalid_argument);

    // Extreme c pushes K/S below 2; the spike clamps instead of failing.
    const RobustSolitonParams c(100, 10.0, 0.01);
    REQUIRE(c.spike == 2);
}

TEST_CASE("robust soliton tau term") {
    const RobustSolitonParams params(100, 0.05, 0.01);
    const std::vector<double> tau = fountain::robust_soliton_tau(params);
    REQUIRE(tau.size() == 101);
    REQUIRE_THAT(tau[1], WithinAbs(0.046052, 1e-6)); // S/K
    REQUIRE_THAT(tau[1], WithinRel(params.S / 100.0, 1e-12));
    for (std::uint32_t d = 2; d < params.spike; ++d)
        REQUIRE_THAT(tau[d], WithinRel(params.S / 100.0 / d, 1e-12));
    REQUIRE_THAT(tau[params.spike],
                 WithinRel(params.S / 100.0 * std::log(params.S / 0.01), 1e-12));
    for (std::uint32_t d = params.spike + 1; d <= 100; ++d)
        REQUIRE(tau[d] == 0.0);
}

TEST_CASE("robust soliton normalization") {
    for (double delta : {0.01, 0.001}) {
        const RobustSolitonParams params(100, 0.05, delta);
        const DegreePmf pmf = fountain::robust_soliton(params);
        REQUIRE_THAT(pmf_sum(pmf), WithinAbs(1.0, 1e-9));

        // beta recomputed by independent summation: 1 + sum tau (rho sums to 1).
        const std::vector<double> tau = fountain::robust_soliton_tau(params);
        double tau_sum = 0.0;
        for (double t : tau)
            tau_sum += t;
        const double beta = 1.0 + tau_sum;
        for (std::uint32_t d = 1; d <= 100; ++d) {
            const double rho = (d == 1) ? 0.01 : 1.0 / (static_cast<double>(d) * (d - 1));
            REQUIRE_THAT(pmf.prob_of(d) * beta, WithinRel(rho + tau[d], 1e-9));
        }

        // The spike is visible: mass at the spike dwarfs its neighbour above.
        REQUIRE(pmf.prob_of(params.spike) > 10.0 * pmf.prob_of(params.spike + 1));
    }
}

TEST_CASE("raptor distribution") {
    double raw = 0.0;
    for (const auto& t : kRaptorTerms)
        raw += t.second;
    REQUIRE_THAT(raw, WithinAbs(kRaptorRawSum, 1e-12));

    const DegreePmf pmf = fountain::raptor_omega(100);
    REQUIRE(pmf.degrees.size() == 10);
    for (const auto& t : kRaptorTerms)
        REQUIRE_THAT(pmf.prob_of(t.first) * kRaptorRawSum, WithinAbs(t.second, 1e-12));
    REQUIRE_THAT(pmf_sum(pmf), WithinAbs(1.0, 1e-12));

    CHECK_NOTHROW(fountain::raptor_omega(66));
    CHECK_THROWS_AS(fountain::raptor_omega(65), std::invalid_argument);
}

TEST_CASE("randomized-tail distribution, per-symbol marginal") {
    Rng rng(1);
    for (std::uint32_t q : {4u, 8u, 16u, 32u}) {
        const DegreePmf pmf = fountain::novel_omega(q, 100, TailMode::PerSymbol, rng);
        INFO("q=" << q);
        REQUIRE(pmf.degrees.size() == q); // {1..q} full support
        REQUIRE_THAT(pmf.prob_of(1) * kRaptorRawSum, WithinAbs(0.007969, 1e-12));
        REQUIRE_THAT(pmf.prob_of(2) * kRaptorRawSum, WithinAbs(0.493570, 1e-12));
        REQUIRE_THAT((pmf.prob_of(1) + pmf.prob_of(2)) * kRaptorRawSum,
                     WithinAbs(0.501539, 1e-9));
        const double share = kTailRawMass / (q - 2);
        for (std::uint32_t d = 3; d <= q; ++d)
            REQUIRE_THAT(pmf.prob_of(d) * kRaptorRawSum, WithinAbs(share, 1e-12));
    }
    // The q=4 example: each tail degree carries 0.498459/2 of raw mass.
    const DegreePmf p4 = fountain::novel_omega(4, 100, TailMode::PerSymbol, rng);
    REQUIRE_THAT(p4.prob_of(3) * kRaptorRawSum, WithinAbs(0.2492295, 1e-9));
    REQUIRE_THAT(p4.prob_of(4) * kRaptorRawSum, WithinAbs(0.2492295, 1e-9));

    CHECK_THROWS_AS(fountain::novel_omega(3, 100, TailMode::PerSymbol, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(fountain::novel_omega(8, 7, TailMode::PerSymbol, rng),
                    std::invalid_argument);
}

TEST_CASE("randomized-tail distribution, per-session realizations") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng r1(seed), r2(seed);
        const DegreePmf pmf = fountain::novel_omega(32, 100, TailMode::PerSession, r1);

        // Reproduce the eight draws independently and merge by hand.
        const fountain::NovelTailRealization real = fountain::draw_novel_tail(32, r2);
        REQUIRE(real.assignments.size() == 8);
        std::map<std::uint32_t, double> merged = {{1, 0.007969}, {2, 0.493570}};
        for (const auto& a : real.assignments) {
            REQUIRE(a.first >= 3);
            REQUIRE(a.first <= 32);
            merged[a.first] += a.second;
        }
        REQUIRE(pmf.degrees.size() == merged.size());
        double tail_raw = 0.0;
        for (const auto& [degree, coeff] : merged) {
            REQUIRE_THAT(pmf.prob_of(degree) * kRaptorRawSum, WithinAbs(coeff, 1e-12));
            if (degree >= 3)
                tail_raw += coeff;
        }
        REQUIRE_THAT(tail_raw, WithinAbs(kTailRawMass, 1e-9)); // merging keeps mass

        // Identical seeds produce identical generator states afterwards.
        REQUIRE(r1.next_u64() == r2.next_u64());
    }
}

TEST_CASE("per-symbol marginal matches the redraw process empirically") {
    // Draw a fresh tail realization per sample, sample once from it, and
    // compare the aggregate against the closed-form marginal.
    const std::uint32_t q = 8;
    Rng rng(99);
    const DegreePmf marginal = fountain::novel_omega(q, 100, TailMode::PerSymbol, rng);
    const std::uint64_t n = 200000;
    std::vector<std::uint64_t> counts(q, 0);
    for (std::uint64_t i = 0; i < n; ++i) {
        Rng trial(fountain::seed_mix({4242, i}));
        const DegreePmf once = fountain::novel_omega(q, 100, TailMode::PerSession, trial);
        ++counts[once.sample(trial) - 1];
    }
    std::vector<double> probs(q);
    for (std::uint32_t d = 1; d <= q; ++d)
        probs[d - 1] = marginal.prob_of(d);
    REQUIRE(stats::chi_square_gof(counts, probs, n) > 0.001);
}

TEST_CASE("sampling matches each distribution (chi-square)") {
    Rng one(3);
    for (int i = 0; i < 100; ++i)
        REQUIRE(fountain::ideal_soliton(1).sample(one) == 1);

    Rng setup(5);
    const std::vector<std::pair<const char*, DegreePmf>> cases = {
        {"ideal", fountain::ideal_soliton(100)},
        {"robust", fountain::robust_soliton(RobustSolitonParams(100, 0.05, 0.01))},
        {"raptor", fountain::raptor_omega(100)},
        {"novel", fountain::novel_omega(8, 100, TailMode::PerSymbol, setup)},
    };
    std::uint64_t seed = 1000;
    for (const auto& [name, pmf] : cases) {
        INFO(name);
        REQUIRE(sampling_pvalue(pmf, 1000000, seed++) > 0.001);
    }
}

TEST_CASE("raptor sampling frequency of degree 2") {
    const DegreePmf pmf = fountain::raptor_omega(100);
    Rng rng(77);
    const std::uint64_t n = 1000000;
    std::uint64_t twos = 0;
    for (std::uint64_t i = 0; i < n; ++i)
        twos += pmf.sample(rng) == 2;
    const double p = 0.493570 / kRaptorRawSum;
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
    REQUIRE_THAT(static_cast<double>(twos) / n, WithinAbs(p, 3 * sigma));
}

TEST_CASE("robust soliton sampling frequency of the spike") {
    const RobustSolitonParams params(100, 0.05, 0.01);
    const DegreePmf pmf = fountain::robust_soliton(params);
    Rng rng(78);
    const std::uint64_t n = 1000000;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n; ++i)
        hits += pmf.sample(rng) == params.spike;
    const double p = pmf.prob_of(params.spike);
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
    REQUIRE_THAT(static_cast<double>(hits) / n, WithinAbs(p, 3 * sigma));
}
