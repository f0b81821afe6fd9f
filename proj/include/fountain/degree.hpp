// degree.hpp -- output-degree distributions for the fountain encoders:
// ideal soliton, robust soliton, the ten-term raptor distribution, and the
// half-fixed/half-random variant that reassigns the raptor tail to degrees
// drawn uniformly from {3..q}.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fountain/rng.hpp"

namespace fountain {

struct DegreePmf {
    std::uint32_t K = 0;
    std::vector<std::uint32_t> degrees; // strictly increasing, within [1, K]
    std::vector<double> probs;          // same length, each in (0,1], sum 1
    std::vector<double> cdf;            // prefix sums of probs

    // Validates the invariants and builds the sampling CDF.
    void finalize() {
        if (K < 1)
            throw std::invalid_argument("degree PMF needs K >= 1");
        if (degrees.empty() || degrees.size() != probs.size())
            throw std::invalid_argument("degree PMF malformed");
        double sum = 0.0;
        cdf.clear();
        cdf.reserve(probs.size());
        for (std::size_t i = 0; i < degrees.size(); ++i) {
            if (degrees[i] < 1 || degrees[i] > K)
                throw std::invalid_argument("degree " + std::to_string(degrees[i]) +
                                            " outside [1, K]");
            if (i > 0 && degrees[i] <= degrees[i - 1])
                throw std::invalid_argument("degrees not strictly increasing");
            if (!(probs[i] > 0.0) || probs[i] > 1.0)
                throw std::invalid_argument("probability out of (0, 1]");
            sum += probs[i];
            cdf.push_back(sum);
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("probabilities sum to " + std::to_string(sum));
    }

    // Inverse-CDF draw over the sorted support.
    std::uint32_t sample(Rng& rng) const {
        const double u = rng.next_double();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end())
            --it; // u landed beyond the last prefix sum (rounding)
        return degrees[static_cast<std::size_t>(it - cdf.begin())];
    }

    double prob_of(std::uint32_t degree) const {
        auto it = std::lower_bound(degrees.begin(), degrees.end(), degree);
        if (it == degrees.end() || *it != degree)
            return 0.0;
        return probs[static_cast<std::size_t>(it - degrees.begin())];
    }
};

// rho(1) = 1/K, rho(d) = 1/(d(d-1)); telescopes to exactly 1.
inline DegreePmf ideal_soliton(std::uint32_t K) {
    if (K < 1)
        throw std::invalid_argument("ideal soliton needs K >= 1");
    DegreePmf pmf;
    pmf.K = K;
    pmf.degrees.resize(K);
    pmf.probs.resize(K);
    for (std::uint32_t d = 1; d <= K; ++d) {
        pmf.degrees[d - 1] = d;
        pmf.probs[d - 1] = (d == 1) ? 1.0 / K : 1.0 / (static_cast<double>(d) * (d - 1));
    }
    pmf.finalize();
    return pmf;
}

struct RobustSolitonParams {
    std::uint32_t K;
    double c;
    double delta;
    double S;            // c * ln(K/delta) * sqrt(K)
    std::uint32_t spike; // round(K/S) clamped into [2, K]

    RobustSolitonParams(std::uint32_t K_, double c_, double delta_)
        : K(K_), c(c_), delta(delta_) {
        if (K < 2)
            throw std::invalid_argument("robust soliton needs K >= 2");
        if (!(c > 0.0))
            throw std::invalid_argument("robust soliton needs c > 0");
        if (!(delta > 0.0) || !(delta < 1.0))
            throw std::invalid_argument("robust soliton needs delta in (0, 1)");
        S = c * std::log(static_cast<double>(K) / delta) * std::sqrt(static_cast<double>(K));
        if (!(S > 0.0))
            throw std::invalid_argument("robust soliton derived S <= 0");
        const double raw = std::round(static_cast<double>(K) / S);
        spike = static_cast<std::uint32_t>(
            std::min<double>(K, std::max(2.0, raw)));
    }
};

// The unnormalized spike term, indexed by degree (entry 0 unused):
// tau(d) = (S/K)/d for d < spike, tau(spike) = (S/K) ln(S/delta), else 0.
inline std::vector<double> robust_soliton_tau(const RobustSolitonParams& params) {
    std::vector<double> tau(params.K + 1, 0.0);
    const double s_over_k = params.S / params.K;
    for (std::uint32_t d = 1; d < params.spike; ++d)
        tau[d] = s_over_k / d;
    tau[params.spike] = s_over_k * std::log(params.S / params.delta);
    return tau;
}

// mu(d) = (rho(d) + tau(d)) / beta with beta the raw sum.
inline DegreePmf robust_soliton(const RobustSolitonParams& params) {
    const DegreePmf rho = ideal_soliton(params.K);
    const std::vector<double> tau = robust_soliton_tau(params);
    double beta = 0.0;
    for (std::uint32_t d = 1; d <= params.K; ++d)
        beta += rho.probs[d - 1] + tau[d];
    DegreePmf pmf;
    pmf.K = params.K;
    pmf.degrees.resize(params.K);
    pmf.probs.resize(params.K);
    for (std::uint32_t d = 1; d <= params.K; ++d) {
        pmf.degrees[d - 1] = d;
        pmf.probs[d - 1] = (rho.probs[d - 1] + tau[d]) / beta;
    }
    pmf.finalize();
    return pmf;
}

namespace degreedetail {

// The ten fixed (degree, coefficient) terms of the raptor distribution.
// The printed coefficients sum to 0.999998; constructors renormalize.
inline const std::vector<std::pair<std::uint32_t, double>>& raptor_terms() {
    static const std::vector<std::pair<std::uint32_t, double>> terms = {
        {1, 0.007969}, {2, 0.493570}, {3, 0.166220}, {4, 0.072646},
        {5, 0.082558}, {8, 0.056058}, {9, 0.037229}, {19, 0.055590},
        {65, 0.025023}, {66, 0.003135}};
    return terms;
}

inline DegreePmf pmf_from_terms(std::uint32_t K,
                                std::vector<std::pair<std::uint32_t, double>> terms) {
    std::sort(terms.begin(), terms.end());
    double raw = 0.0;
    for (const auto& t : terms)
        raw += t.second;
    DegreePmf pmf;
    pmf.K = K;
    for (const auto& t : terms) {
        pmf.degrees.push_back(t.first);
        pmf.probs.push_back(t.second / raw);
    }
    pmf.finalize();
    return pmf;
}

} // namespace degreedetail

inline DegreePmf raptor_omega(std::uint32_t K) {
    if (K < 66)
        throw std::invalid_argument("raptor distribution needs K >= 66 (largest "
                                    "support degree)");
    return degreedetail::pmf_from_terms(K, degreedetail::raptor_terms());
}

// When the tail is randomized: per-symbol redraws the eight assignments for
// every encoded symbol; per-session draws them once per code instance.
enum class TailMode { PerSymbol, PerSession };

inline const char* tail_mode_name(TailMode mode) {
    return mode == TailMode::PerSymbol ? "per-symbol" : "per-session";
}

// One realization of the randomized tail: the eight raptor coefficients of
// degree >= 3 paired with degrees drawn uniformly from {3..q}.
struct NovelTailRealization {
    std::vector<std::pair<std::uint32_t, double>> assignments; // (degree, coeff)
};

inline NovelTailRealization draw_novel_tail(std::uint32_t q, Rng& rng) {
    if (q < 4)
        throw std::invalid_argument("randomized tail needs q >= 4");
    NovelTailRealization real;
    for (const auto& term : degreedetail::raptor_terms()) {
        if (term.first < 3)
            continue;
        const std::uint32_t degree = 3 + static_cast<std::uint32_t>(rng.next_below(q - 2));
        real.assignments.emplace_back(degree, term.second);
    }
    return real;
}

// Degrees 1 and 2 keep their fixed coefficients; the eight tail coefficients
// land on degrees in {3..q}. Per-symbol mode returns the marginal law of the
// redraw process (tail mass uniform over {3..q}), which is what sampling a
// fresh realization for every symbol produces in distribution. Per-session
// mode consumes eight draws from rng and merges collisions by summing.
inline DegreePmf novel_omega(std::uint32_t q, std::uint32_t K, TailMode mode, Rng& rng) {
    if (q < 4)
        throw std::invalid_argument("randomized-tail distribution needs q >= 4");
    if (K < q)
        throw std::invalid_argument("randomized-tail distribution needs K >= q");
    std::vector<std::pair<std::uint32_t, double>> terms;
    double tail_total = 0.0;
    for (const auto& term : degreedetail::raptor_terms()) {
        if (term.first < 3)
            terms.push_back(term);
        else
            tail_total += term.second;
    }
    if (mode == TailMode::PerSymbol) {
        const double share = tail_total / (q - 2);
        for (std::uint32_t d = 3; d <= q; ++d)
            terms.emplace_back(d, share);
    } else {
        const NovelTailRealization real = draw_novel_tail(q, rng);
        std::vector<double> mass(q + 1, 0.0);
        for (const auto& a : real.assignments)
            mass[a.first] += a.second;
        for (std::uint32_t d = 3; d <= q; ++d)
            if (mass[d] > 0.0)
                terms.emplace_back(d, mass[d]);
    }
    return degreedetail::pmf_from_terms(K, std::move(terms));
}

} // namespace fountain
