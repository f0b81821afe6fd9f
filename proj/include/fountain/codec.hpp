// codec.hpp -- fountain encoders over GF(q). The LT encoder draws a degree
// from a supplied PMF, picks that many distinct source symbols, and attaches
// uniform nonzero coefficients; the random-linear encoder emits dense rows
// with coefficients uniform over the whole field, zero included. Packets are
// self-describing (indices and coefficients travel with the payload).

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fountain/degree.hpp"
#include "fountain/gf.hpp"
#include "fountain/rng.hpp"

namespace fountain {

struct SourceBlock {
    std::uint32_t K = 0;
    std::size_t symbol_len = 1;
    std::vector<std::vector<Elem>> symbols; // K rows, each symbol_len long

    // Deterministic pseudo-random fill; the content never affects decode
    // verdicts but makes every successful decode a roundtrip check.
    static SourceBlock random(std::uint32_t K, std::size_t symbol_len, const Field& field,
                              Rng& rng) {
        if (K < 1 || symbol_len < 1)
            throw std::invalid_argument("source block needs K >= 1 and symbol_len >= 1");
        SourceBlock block;
        block.K = K;
        block.symbol_len = symbol_len;
        block.symbols.assign(K, std::vector<Elem>(symbol_len));
        for (auto& symbol : block.symbols)
            for (auto& e : symbol)
                e = field.random_element(rng);
        return block;
    }
};

struct EncodedSymbol {
    std::uint32_t degree = 0;
    std::vector<std::uint32_t> indices; // strictly increasing, |indices| = degree
    std::vector<Elem> coefficients;     // parallel to indices
    std::vector<Elem> payload;
};

// Elementwise sum of coefficient * symbol over GF(q).
inline std::vector<Elem> combine(const Field& field, const std::vector<Elem>& coefficients,
                                 const std::vector<std::span<const Elem>>& symbols) {
    if (coefficients.size() != symbols.size())
        throw std::invalid_argument("combine: " + std::to_string(coefficients.size()) +
                                    " coefficients for " + std::to_string(symbols.size()) +
                                    " symbols");
    if (symbols.empty())
        return {};
    const std::size_t len = symbols[0].size();
    std::vector<Elem> out(len, 0);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (symbols[i].size() != len)
            throw std::invalid_argument("combine: symbol length mismatch");
        for (std::size_t j = 0; j < len; ++j)
            out[j] = field.add(out[j], field.mul(coefficients[i], symbols[i][j]));
    }
    return out;
}

namespace codecdetail {

// Floyd's algorithm: a uniform d-subset of {0..K-1}, then sorted.
inline std::vector<std::uint32_t> sample_indices(std::uint32_t K, std::uint32_t d, Rng& rng) {
    std::vector<std::uint32_t> picked;
    picked.reserve(d);
    for (std::uint32_t j = K - d; j < K; ++j) {
        const auto t = static_cast<std::uint32_t>(rng.next_below(j + 1));
        if (std::find(picked.begin(), picked.end(), t) != picked.end())
            picked.push_back(j);
        else
            picked.push_back(t);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

} // namespace codecdetail

// One LT packet. Generator consumption order is fixed (degree draw, index
// draws, coefficient draws) and part of the reproducibility contract.
inline EncodedSymbol encode_lt(const SourceBlock& block, const DegreePmf& pmf,
                               const Field& field, Rng& rng) {
    EncodedSymbol sym;
    sym.degree = pmf.sample(rng);
    if (sym.degree > block.K)
        throw std::invalid_argument("degree " + std::to_string(sym.degree) +
                                    " exceeds block size " + std::to_string(block.K));
    sym.indices = codecdetail::sample_indices(block.K, sym.degree, rng);
    sym.coefficients.resize(sym.degree);
    for (auto& c : sym.coefficients)
        c = field.random_nonzero(rng);
    std::vector<std::span<const Elem>> parts;
    parts.reserve(sym.degree);
    for (std::uint32_t idx : sym.indices)
        parts.emplace_back(block.symbols[idx]);
    sym.payload = combine(field, sym.coefficients, parts);
    return sym;
}

// One dense random-linear packet: all K positions, coefficients uniform over
// the whole field including zero.
inline EncodedSymbol encode_random_linear(const SourceBlock& block, const Field& field,
                                          Rng& rng) {
    EncodedSymbol sym;
    sym.degree = block.K;
    sym.indices.resize(block.K);
    sym.coefficients.resize(block.K);
    for (std::uint32_t k = 0; k < block.K; ++k) {
        sym.indices[k] = k;
        sym.coefficients[k] = field.random_element(rng);
    }
    std::vector<std::span<const Elem>> parts;
    parts.reserve(block.K);
    for (const auto& s : block.symbols)
        parts.emplace_back(s);
    sym.payload = combine(field, sym.coefficients, parts);
    return sym;
}

// Structural checks against a given block size and field order.
inline void validate_symbol(const EncodedSymbol& sym, std::uint32_t K, std::uint32_t q) {
    if (sym.degree < 1 || sym.indices.size() != sym.degree ||
        sym.coefficients.size() != sym.degree)
        throw std::invalid_argument("symbol: degree/index/coefficient size mismatch");
    for (std::size_t i = 0; i < sym.indices.size(); ++i) {
        if (sym.indices[i] >= K)
            throw std::invalid_argument("symbol: index " + std::to_string(sym.indices[i]) +
                                        " out of range for K=" + std::to_string(K));
        if (i > 0 && sym.indices[i] <= sym.indices[i - 1])
            throw std::invalid_argument("symbol: indices not strictly increasing");
        if (sym.coefficients[i] >= q)
            throw std::invalid_argument("symbol: coefficient out of field range");
    }
}

// Text form: `degree | indices... | coefficients... | payload...`, unsigned
// integers, one symbol per line.
inline std::string to_line(const EncodedSymbol& sym) {
    std::ostringstream out;
    out << sym.degree << " |";
    for (std::uint32_t i : sym.indices)
        out << ' ' << i;
    out << " |";
    for (Elem c : sym.coefficients)
        out << ' ' << c;
    out << " |";
    for (Elem e : sym.payload)
        out << ' ' << e;
    return out.str();
}

inline EncodedSymbol parse_line(const std::string& line) {
    std::vector<std::vector<std::uint64_t>> groups(1);
    std::istringstream in(line);
    std::string token;
    while (in >> token) {
        if (token == "|") {
            groups.emplace_back();
            continue;
        }
        std::size_t pos = 0;
        std::uint64_t value = 0;
        try {
            value = std::stoull(token, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("symbol line: bad token '" + token + "'");
        }
        if (pos != token.size())
            throw std::invalid_argument("symbol line: bad token '" + token + "'");
        groups.back().push_back(value);
    }
    if (groups.size() != 4)
        throw std::invalid_argument("symbol line: expected 4 '|'-separated groups, got " +
                                    std::to_string(groups.size()));
    if (groups[0].size() != 1)
        throw std::invalid_argument("symbol line: degree group must hold one integer");
    EncodedSymbol sym;
    sym.degree = static_cast<std::uint32_t>(groups[0][0]);
    for (std::uint64_t v : groups[1])
        sym.indices.push_back(static_cast<std::uint32_t>(v));
    for (std::uint64_t v : groups[2])
        sym.coefficients.push_back(static_cast<Elem>(v));
    for (std::uint64_t v : groups[3])
        sym.payload.push_back(static_cast<Elem>(v));
    if (sym.indices.size() != sym.degree || sym.coefficients.size() != sym.degree)
        throw std::invalid_argument("symbol line: group sizes disagree with degree");
    for (std::size_t i = 1; i < sym.indices.size(); ++i)
        if (sym.indices[i] <= sym.indices[i - 1])
            throw std::invalid_argument("symbol line: indices not strictly increasing");
    return sym;
}

} // namespace fountain
