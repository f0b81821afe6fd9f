// decode.hpp -- the three decoders. BP peeling resolves residual degree-1
// check nodes and substitutes; Gaussian elimination row-reduces the dense
// system over GF(q); the square-replace variant keeps a K x K matrix, each
// extra symbol overwriting a uniformly-random row before one final GE pass.
//
// Rows are stored flat, the K coefficients directly followed by the payload,
// so an elimination step is one row_submul over the combined span.

#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fountain/codec.hpp"
#include "fountain/gf.hpp"

namespace fountain {

enum class DecodeStatus { Success, BpStall, Singular };

inline const char* decode_status_name(DecodeStatus s) {
    switch (s) {
    case DecodeStatus::Success: return "success";
    case DecodeStatus::BpStall: return "bp-stall";
    default: return "singular";
    }
}

struct DecodeReport {
    DecodeStatus status = DecodeStatus::Singular;
    std::vector<std::vector<Elem>> recovered; // K symbols, filled on success
    std::uint32_t resolved_count = 0;         // BP: symbols fixed; GE: rank
    std::uint32_t peel_rounds = 0;
    std::uint32_t pivot_count = 0;

    bool success() const { return status == DecodeStatus::Success; }
};

struct LinearSystem {
    std::uint32_t K = 0;
    std::size_t symbol_len = 0;
    std::size_t n_rows = 0;
    const Field* field = nullptr;
    std::vector<Elem> data; // n_rows * (K + symbol_len), payload after coeffs

    std::size_t row_len() const { return K + symbol_len; }
    Elem* row(std::size_t i) { return data.data() + i * row_len(); }
    const Elem* row(std::size_t i) const { return data.data() + i * row_len(); }

    static LinearSystem from_symbols(const std::vector<EncodedSymbol>& symbols,
                                     std::uint32_t K, const Field& field) {
        if (symbols.empty())
            throw std::invalid_argument("linear system needs at least one row");
        LinearSystem sys;
        sys.K = K;
        sys.symbol_len = symbols[0].payload.size();
        sys.n_rows = symbols.size();
        sys.field = &field;
        sys.data.assign(sys.n_rows * sys.row_len(), 0);
        for (std::size_t i = 0; i < symbols.size(); ++i)
            sys.set_row(i, symbols[i]);
        return sys;
    }

    void set_row(std::size_t i, const EncodedSymbol& sym) {
        validate_symbol(sym, K, field->q());
        if (sym.payload.size() != symbol_len)
            throw std::invalid_argument("linear system: payload length mismatch");
        Elem* r = row(i);
        std::fill(r, r + row_len(), 0);
        for (std::size_t t = 0; t < sym.indices.size(); ++t)
            r[sym.indices[t]] = sym.coefficients[t];
        std::copy(sym.payload.begin(), sym.payload.end(), r + K);
    }
};

// Which of the candidate rows becomes the pivot. The verdict is a rank
// property and cannot depend on this; a test holds the decoder to that.
enum class PivotRule { FirstNonzero, LastNonzero };

inline DecodeReport ge_decode(LinearSystem system, PivotRule rule = PivotRule::FirstNonzero) {
    const Field& f = *system.field;
    const std::uint32_t K = system.K;
    const std::size_t n = system.n_rows;
    const std::size_t len = system.row_len();
    DecodeReport report;

    std::size_t r = 0; // next pivot row
    for (std::uint32_t col = 0; col < K && r < n; ++col) {
        std::size_t pivot = n;
        for (std::size_t i = r; i < n; ++i) {
            if (system.row(i)[col] != 0) {
                pivot = i;
                if (rule == PivotRule::FirstNonzero)
                    break;
            }
        }
        if (pivot == n)
            continue;
        if (pivot != r)
            for (std::size_t j = col; j < len; ++j)
                std::swap(system.row(r)[j], system.row(pivot)[j]);
        const Elem pv = system.row(r)[col];
        for (std::size_t i = r + 1; i < n; ++i) {
            Elem* ri = system.row(i);
            if (ri[col] == 0)
                continue;
            const Elem factor = f.div(ri[col], pv);
            f.row_submul(ri + col, system.row(r) + col, len - col, factor);
        }
        ++r;
        ++report.pivot_count;
    }

    report.resolved_count = static_cast<std::uint32_t>(r);
    if (r < K) {
        report.status = DecodeStatus::Singular;
        return report;
    }

    // Full rank: every column pivoted in order, so row i holds pivot i.
    // Back-substitute payload-wide.
    report.status = DecodeStatus::Success;
    report.recovered.assign(K, std::vector<Elem>(system.symbol_len));
    for (std::uint32_t col = K; col-- > 0;) {
        const Elem* rc = system.row(col);
        std::vector<Elem> acc(rc + K, rc + len);
        for (std::uint32_t c = col + 1; c < K; ++c) {
            const Elem w = rc[c];
            if (w == 0)
                continue;
            for (std::size_t j = 0; j < system.symbol_len; ++j)
                acc[j] = f.sub(acc[j], f.mul(w, report.recovered[c][j]));
        }
        const Elem pv = rc[col];
        for (std::size_t j = 0; j < system.symbol_len; ++j)
            acc[j] = f.div(acc[j], pv);
        report.recovered[col] = std::move(acc);
    }
    return report;
}

// Peeling: repeatedly take a check node of residual degree 1, divide out its
// coefficient, substitute the resolved symbol everywhere it appears.
inline DecodeReport bp_decode(const std::vector<EncodedSymbol>& symbols, std::uint32_t K,
                              const Field& field) {
    struct Check {
        std::vector<std::pair<std::uint32_t, Elem>> terms;
        std::vector<Elem> payload;
    };
    std::vector<Check> checks(symbols.size());
    std::vector<std::vector<std::size_t>> by_source(K);
    std::size_t symbol_len = symbols.empty() ? 0 : symbols[0].payload.size();
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        validate_symbol(symbols[i], K, field.q());
        if (symbols[i].payload.size() != symbol_len)
            throw std::invalid_argument("bp: payload length mismatch");
        for (std::size_t t = 0; t < symbols[i].indices.size(); ++t) {
            checks[i].terms.emplace_back(symbols[i].indices[t], symbols[i].coefficients[t]);
            by_source[symbols[i].indices[t]].push_back(i);
        }
        checks[i].payload = symbols[i].payload;
    }

    DecodeReport report;
    std::vector<char> resolved(K, 0);
    std::vector<std::vector<Elem>> value(K);
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < checks.size(); ++i)
        if (checks[i].terms.size() == 1)
            ready.push_back(i);

    std::uint32_t done = 0;
    while (!ready.empty()) {
        const std::size_t ci = ready.front();
        ready.pop_front();
        if (checks[ci].terms.size() != 1)
            continue; // shrank to 0 since being queued
        ++report.peel_rounds;
        const auto [k, coeff] = checks[ci].terms[0];
        checks[ci].terms.clear();
        if (resolved[k])
            continue; // a duplicate degree-1 check for the same symbol
        value[k].resize(symbol_len);
        for (std::size_t j = 0; j < symbol_len; ++j)
            value[k][j] = field.div(checks[ci].payload[j], coeff);
        resolved[k] = 1;
        ++done;
        for (std::size_t other : by_source[k]) {
            if (other == ci)
                continue;
            auto& terms = checks[other].terms;
            for (std::size_t t = 0; t < terms.size(); ++t) {
                if (terms[t].first != k)
                    continue;
                const Elem w = terms[t].second;
                for (std::size_t j = 0; j < symbol_len; ++j)
                    checks[other].payload[j] =
                        field.sub(checks[other].payload[j], field.mul(w, value[k][j]));
                terms.erase(terms.begin() + static_cast<std::ptrdiff_t>(t));
                break;
            }
            if (terms.size() == 1)
                ready.push_back(other);
        }
    }

    report.resolved_count = done;
    if (done == K) {
        report.status = DecodeStatus::Success;
        report.recovered = std::move(value);
    } else {
        report.status = DecodeStatus::BpStall;
    }
    return report;
}

// The square-matrix protocol: the first K symbols fill a K x K system, every
// later symbol overwrites a uniformly-random row (any row, including ones
// already replaced), and a single GE pass decodes the final matrix. This is
// a simulation shortcut, not the information-optimal rectangular decode.
inline DecodeReport ge_square_replace(const std::vector<EncodedSymbol>& symbols,
                                      std::uint32_t K, const Field& field, Rng& rng,
                                      PivotRule rule = PivotRule::FirstNonzero) {
    if (symbols.size() < K)
        throw std::invalid_argument("square-replace needs n >= K (got n=" +
                                    std::to_string(symbols.size()) +
                                    ", K=" + std::to_string(K) + ")");
    std::vector<EncodedSymbol> window(symbols.begin(), symbols.begin() + K);
    LinearSystem sys = LinearSystem::from_symbols(window, K, field);
    for (std::size_t i = K; i < symbols.size(); ++i) {
        const auto slot = static_cast<std::size_t>(rng.next_below(K));
        sys.set_row(slot, symbols[i]);
    }
    return ge_decode(std::move(sys), rule);
}

struct ConsistencyVerdict {
    bool consistent = false;
    DecodeReport bp;
    DecodeReport ge;
};

// BP success must imply GE success with identical output (the converse is
// never asserted; GE is strictly stronger).
inline ConsistencyVerdict bp_implies_ge(const std::vector<EncodedSymbol>& symbols,
                                        std::uint32_t K, const Field& field) {
    ConsistencyVerdict v;
    v.bp = bp_decode(symbols, K, field);
    v.ge = ge_decode(LinearSystem::from_symbols(symbols, K, field));
    if (!v.bp.success())
        v.consistent = true;
    else
        v.consistent = v.ge.success() && v.bp.recovered == v.ge.recovered;
    return v;
}

} // namespace fountain
