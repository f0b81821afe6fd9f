// analytic.hpp -- closed-form failure probability of the random linear
// fountain over GF(q): an n x K matrix of iid uniform field elements fails
// to reach rank K with probability
//
//   F(K, n, q) = 1 - prod_{k=1..K} (1 - q^-(n-k+1)),   F = 1 when n < K.
//
// Computed as -expm1(sum log1p(-q^-e)) so values far below 1e-12 keep full
// relative accuracy instead of rounding to zero.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fountain {

namespace analyticdetail {

// q^-e with e >= 1, exact to <= 1 ulp: an integer power while it fits,
// exp/log otherwise.
inline double inv_power(std::uint32_t q, std::int64_t e) {
    const double bits = static_cast<double>(e) * std::log2(static_cast<double>(q));
    if (bits <= 62.0) {
        std::uint64_t p = 1;
        for (std::int64_t i = 0; i < e; ++i)
            p *= q;
        return 1.0 / static_cast<double>(p);
    }
    return std::exp(-static_cast<double>(e) * std::log(static_cast<double>(q)));
}

} // namespace analyticdetail

inline double failure_rate(std::uint32_t K, std::int64_t n, std::uint32_t q) {
    if (K < 1)
        throw std::invalid_argument("failure_rate needs K >= 1");
    if (q < 2)
        throw std::invalid_argument("failure_rate needs q >= 2");
    if (n < static_cast<std::int64_t>(K))
        return 1.0; // rank n < K is certain
    double log_success = 0.0;
    for (std::uint32_t k = 1; k <= K; ++k)
        log_success += std::log1p(-analyticdetail::inv_power(q, n - k + 1));
    return -std::expm1(log_success);
}

struct OverheadPoint {
    std::uint32_t K = 0;
    std::int64_t n = 0;
    double epsilon = 0.0; // derived: n/K - 1
    double F = 0.0;
};

// Tabulates the failure rate over an overhead grid, mapping each epsilon to
// the integer received count n = round(K(1+epsilon)).
inline std::vector<OverheadPoint> failure_curve(std::uint32_t K, std::uint32_t q,
                                                const std::vector<double>& eps_grid) {
    std::vector<OverheadPoint> out;
    out.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        OverheadPoint pt;
        pt.K = K;
        pt.n = std::llround(static_cast<double>(K) * (1.0 + eps));
        pt.epsilon = static_cast<double>(pt.n) / K - 1.0;
        pt.F = failure_rate(K, pt.n, q);
        out.push_back(pt);
    }
    return out;
}

} // namespace fountain
