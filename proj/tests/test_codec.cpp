#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "fountain/codec.hpp"
#include "support/stats.hpp"

using fountain::DegreePmf;
using fountain::Elem;
using fountain::EncodedSymbol;
using fountain::Field;
using fountain::Rng;
using fountain::SourceBlock;

namespace {

DegreePmf fixed_degree(std::uint32_t K, std::uint32_t d) {
    DegreePmf pmf;
    pmf.K = K;
    pmf.degrees = {d};
    pmf.probs = {1.0};
    pmf.finalize();
    return pmf;
}

std::vector<std::span<const Elem>> as_spans(const std::vector<std::vector<Elem>>& v) {
    std::vector<std::span<const Elem>> out;
    for (const auto& s : v)
        out.emplace_back(s);
    return out;
}

} // namespace

TEST_CASE("combine basics") {
    Field f4(4);
    const std::vector<std::vector<Elem>> symbols = {{1, 2}, {3, 0}};

    REQUIRE(fountain::combine(f4, {0, 0}, as_spans(symbols)) ==
            std::vector<Elem>{0, 0});
    REQUIRE(fountain::combine(f4, {2, 0}, as_spans(symbols)) ==
            std::vector<Elem>{f4.mul(2, 1), f4.mul(2, 2)});

    // The worked GF(4) case: 2*1 + 3*1 = 2 + 3 = 1.
    const std::vector<std::vector<Elem>> ones = {{1}, {1}};
    REQUIRE(fountain::combine(f4, {2, 3}, as_spans(ones)) == std::vector<Elem>{1});

    CHECK_THROWS_AS(fountain::combine(f4, {1}, as_spans(symbols)), std::invalid_argument);
    const std::vector<std::vector<Elem>> ragged = {{1, 2}, {3}};
    CHECK_THROWS_AS(fountain::combine(f4, {1, 1}, as_spans(ragged)), std::invalid_argument);
}

TEST_CASE("combine is linear in the symbols") {
    Rng rng(11);
    for (std::uint32_t q : {2u, 4u, 9u, 32u}) {
        Field f(q);
        for (int rep = 0; rep < 50; ++rep) {
            const std::size_t d = 3, len = 5;
            std::vector<Elem> coeffs(d);
            std::vector<std::vector<Elem>> s(d, std::vector<Elem>(len)),
                t(d, std::vector<Elem>(len)), st(d, std::vector<Elem>(len));
            for (std::size_t i = 0; i < d; ++i) {
                coeffs[i] = f.random_element(rng);
                for (std::size_t j = 0; j < len; ++j) {
                    s[i][j] = f.random_element(rng);
                    t[i][j] = f.random_element(rng);
                    st[i][j] = f.add(s[i][j], t[i][j]);
                }
            }
            const auto lhs = fountain::combine(f, coeffs, as_spans(st));
            const auto cs = fountain::combine(f, coeffs, as_spans(s));
            const auto ct = fountain::combine(f, coeffs, as_spans(t));
            for (std::size_t j = 0; j < len; ++j)
                REQUIRE(lhs[j] == f.add(cs[j], ct[j]));
        }
    }
}

TEST_CASE("LT symbols satisfy their structural invariants") {
    Rng rng(21);
    for (std::uint32_t q : {2u, 4u, 8u, 32u}) {
        Field f(q);
        SourceBlock block = SourceBlock::random(40, 3, f, rng);
        const DegreePmf pmf = fountain::ideal_soliton(40);
        for (int i = 0; i < 500; ++i) {
            const EncodedSymbol sym = fountain::encode_lt(block, pmf, f, rng);
            REQUIRE_NOTHROW(fountain::validate_symbol(sym, 40, q));
            REQUIRE(sym.payload.size() == 3);
            for (Elem c : sym.coefficients)
                REQUIRE(c != 0);
        }
    }
}

TEST_CASE("degree-1 symbols reproduce a source symbol") {
    Rng rng(31);
    Field f2(2);
    SourceBlock block = SourceBlock::random(10, 4, f2, rng);
    const DegreePmf pmf = fixed_degree(10, 1);
    for (int i = 0; i < 50; ++i) {
        const EncodedSymbol sym = fountain::encode_lt(block, pmf, f2, rng);
        REQUIRE(sym.degree == 1);
        REQUIRE(sym.coefficients[0] == 1); // q=2: the only nonzero value
        REQUIRE(sym.payload == block.symbols[sym.indices[0]]);
    }
}

TEST_CASE("binary degree-2 symbols are XOR combinations") {
    Rng rng(41);
    Field f2(2);
    SourceBlock block = SourceBlock::random(8, 6, f2, rng);
    const DegreePmf pmf = fixed_degree(8, 2);
    for (int i = 0; i < 50; ++i) {
        const EncodedSymbol sym = fountain::encode_lt(block, pmf, f2, rng);
        const auto& a = block.symbols[sym.indices[0]];
        const auto& b = block.symbols[sym.indices[1]];
        for (std::size_t j = 0; j < 6; ++j)
            REQUIRE(sym.payload[j] == (a[j] ^ b[j]));
    }
}

TEST_CASE("encode stream degree frequencies match the PMF") {
    Rng rng(51);
    Field f(8);
    SourceBlock block = SourceBlock::random(100, 1, f, rng);
    const DegreePmf pmf =
        fountain::robust_soliton(fountain::RobustSolitonParams(100, 0.05, 0.01));
    const std::uint64_t n = 200000;
    std::vector<std::uint64_t> counts(pmf.degrees.size(), 0);
    for (std::uint64_t i = 0; i < n; ++i) {
        const EncodedSymbol sym = fountain::encode_lt(block, pmf, f, rng);
        ++counts[sym.degree - 1]; // support is 1..K contiguous
    }
    REQUIRE(stats::chi_square_gof(counts, pmf.probs, n) > 0.001);
}

TEST_CASE("conditioned on degree, index subsets are uniform") {
    Rng rng(61);
    Field f(4);
    SourceBlock block = SourceBlock::random(6, 1, f, rng);
    const DegreePmf pmf = fixed_degree(6, 3);
    std::map<std::array<std::uint32_t, 3>, std::uint64_t> counts;
    const std::uint64_t n = 100000;
    for (std::uint64_t i = 0; i < n; ++i) {
        const EncodedSymbol sym = fountain::encode_lt(block, pmf, f, rng);
        counts[{sym.indices[0], sym.indices[1], sym.indices[2]}]++;
    }
    REQUIRE(counts.size() == 20); // C(6,3): every subset appeared
    std::vector<std::uint64_t> flat;
    for (const auto& [subset, c] : counts)
        flat.push_back(c);
    const std::vector<double> probs(20, 1.0 / 20.0);
    REQUIRE(stats::chi_square_gof(flat, probs, n) > 0.001);
}

TEST_CASE("random-linear rows are dense and uniform") {
    Rng rng(71);
    for (std::uint32_t q : {2u, 4u, 8u}) {
        Field f(q);
        SourceBlock block = SourceBlock::random(12, 1, f, rng);
        std::vector<std::uint64_t> value_counts(q, 0);
        const int rows = 20000;
        for (int i = 0; i < rows; ++i) {
            const EncodedSymbol sym = fountain::encode_random_linear(block, f, rng);
            REQUIRE(sym.degree == 12);
            REQUIRE(sym.indices.size() == 12);
            for (std::uint32_t k = 0; k < 12; ++k)
                REQUIRE(sym.indices[k] == k);
            for (Elem c : sym.coefficients)
                ++value_counts[c];
        }
        const std::vector<double> uniform(q, 1.0 / q);
        REQUIRE(stats::chi_square_gof(value_counts, uniform,
                                      static_cast<std::uint64_t>(rows) * 12) > 0.001);
    }
}

TEST_CASE("an all-zero coefficient draw yields an all-zero payload") {
    Field f2(2);
    Rng block_rng(81);
    SourceBlock block = SourceBlock::random(2, 3, f2, block_rng);
    bool found = false;
    for (std::uint64_t seed = 0; seed < 200 && !found; ++seed) {
        Rng rng(seed);
        const EncodedSymbol sym = fountain::encode_random_linear(block, f2, rng);
        if (sym.coefficients == std::vector<Elem>{0, 0}) {
            REQUIRE(sym.payload == std::vector<Elem>{0, 0, 0});
            found = true;
        }
    }
    REQUIRE(found); // probability 1/4 per seed; 200 seeds cannot all miss
}

TEST_CASE("encoding is deterministic in the seed") {
    Field f(16);
    Rng block_rng(91);
    SourceBlock block = SourceBlock::random(50, 2, f, block_rng);
    const DegreePmf pmf = fountain::ideal_soliton(50);
    Rng r1(1234), r2(1234), r3(4321);
    bool any_difference = false;
    for (int i = 0; i < 100; ++i) {
        const EncodedSymbol a = fountain::encode_lt(block, pmf, f, r1);
        const EncodedSymbol b = fountain::encode_lt(block, pmf, f, r2);
        const EncodedSymbol c = fountain::encode_lt(block, pmf, f, r3);
        REQUIRE(fountain::to_line(a) == fountain::to_line(b));
        any_difference = any_difference || fountain::to_line(a) != fountain::to_line(c);
    }
    REQUIRE(any_difference);
}

TEST_CASE("symbol text serialization") {
    EncodedSymbol sym;
    sym.degree = 2;
    sym.indices = {0, 3};
    sym.coefficients = {1, 2};
    sym.payload = {3};
    REQUIRE(fountain::to_line(sym) == "2 | 0 3 | 1 2 | 3");

    Rng rng(101);
    for (std::uint32_t q : {2u, 4u, 32u}) {
        Field f(q);
        SourceBlock block = SourceBlock::random(20, 3, f, rng);
        const DegreePmf pmf = fountain::ideal_soliton(20);
        for (int i = 0; i < 100; ++i) {
            const EncodedSymbol a = fountain::encode_lt(block, pmf, f, rng);
            const EncodedSymbol b = fountain::parse_line(fountain::to_line(a));
            REQUIRE(a.degree == b.degree);
            REQUIRE(a.indices == b.indices);
            REQUIRE(a.coefficients == b.coefficients);
            REQUIRE(a.payload == b.payload);
        }
    }

    CHECK_THROWS_AS(fountain::parse_line(""), std::invalid_argument);
    CHECK_THROWS_AS(fountain::parse_line("1 | 0 | 1"), std::invalid_argument);
    CHECK_THROWS_AS(fountain::parse_line("x | 0 | 1 | 2"), std::invalid_argument);
    CHECK_THROWS_AS(fountain::parse_line("2 | 0 | 1 2 | 3"), std::invalid_argument);
    CHECK_THROWS_AS(fountain::parse_line("2 | 3 0 | 1 1 | 0"), std::invalid_argument);
    CHECK_THROWS_AS(fountain::parse_line("2 | 0 0 | 1 1 | 0"), std::invalid_argument);
}

TEST_CASE("structural validation catches malformed symbols") {
    EncodedSymbol sym;
    sym.degree = 2;
    sym.indices = {0, 5};
    sym.coefficients = {1, 3};
    sym.payload = {0};
    REQUIRE_NOTHROW(fountain::validate_symbol(sym, 10, 4));
    CHECK_THROWS_AS(fountain::validate_symbol(sym, 5, 4), std::invalid_argument);
    CHECK_THROWS_AS(fountain::validate_symbol(sym, 10, 2), std::invalid_argument);
    sym.indices = {5, 0};
    CHECK_THROWS_AS(fountain::validate_symbol(sym, 10, 4), std::invalid_argument);
}
