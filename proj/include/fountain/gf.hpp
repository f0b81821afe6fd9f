// gf.hpp -- exact arithmetic over finite fields GF(q), q = p^m.
//
// Elements are integers in [0, q-1], read as the base-p digit vector of a
// polynomial residue (for m = 1 this is plain mod-p arithmetic). Extension
// fields are reduced by a fixed modulus polynomial: the lexicographically
// least monic irreducible of degree m over GF(p), least significant
// coefficient first. For the fields used throughout this project that is
//
//   GF(4):  x^2 + x + 1
//   GF(8):  x^3 + x + 1
//   GF(16): x^4 + x + 1
//   GF(32): x^5 + x^2 + 1
//
// These moduli are part of the documented contract and never change between
// versions; all element values are bit-reproducible.
//
// Multiplication and inversion run on log/antilog tables over a generator
// of the multiplicative group. The tables are checked against a direct
// polynomial-reduction oracle in the test suite.

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fountain/rng.hpp"

namespace fountain {

using Elem = std::uint32_t;

namespace gfdetail {

// Little-endian base-p digits of value, at least min_len long.
inline std::vector<std::uint32_t> digits_of(std::uint64_t value, std::uint32_t p,
                                            std::size_t min_len = 0) {
    std::vector<std::uint32_t> d;
    while (value != 0) {
        d.push_back(static_cast<std::uint32_t>(value % p));
        value /= p;
    }
    while (d.size() < min_len)
        d.push_back(0);
    return d;
}

inline std::uint64_t value_of(const std::vector<std::uint32_t>& digits, std::uint32_t p) {
    std::uint64_t v = 0;
    for (std::size_t i = digits.size(); i-- > 0;)
        v = v * p + digits[i];
    return v;
}

inline void trim(std::vector<std::uint32_t>& poly) {
    while (!poly.empty() && poly.back() == 0)
        poly.pop_back();
}

// Remainder of a mod b over GF(p); b must be nonzero. Coefficients are
// little-endian. Uses Fermat inversion for the leading coefficient of b.
inline std::vector<std::uint32_t> poly_mod(std::vector<std::uint32_t> a,
                                           const std::vector<std::uint32_t>& b,
                                           std::uint32_t p) {
    trim(a);
    std::uint32_t lead = b.back();
    std::uint32_t lead_inv = 1;
    for (std::uint32_t e = 0; e + 2 < p; ++e)
        lead_inv = static_cast<std::uint32_t>((static_cast<std::uint64_t>(lead_inv) * lead) % p);
    while (a.size() >= b.size()) {
        const std::uint32_t factor =
            static_cast<std::uint32_t>((static_cast<std::uint64_t>(a.back()) * lead_inv) % p);
        const std::size_t shift = a.size() - b.size();
        if (factor != 0) {
            for (std::size_t i = 0; i < b.size(); ++i) {
                std::uint64_t sub = (static_cast<std::uint64_t>(b[i]) * factor) % p;
                a[i + shift] = static_cast<std::uint32_t>((a[i + shift] + p - sub) % p);
            }
        } else {
            a.pop_back();
            continue;
        }
        trim(a);
    }
    return a;
}

inline std::vector<std::uint32_t> poly_mul(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b,
                                           std::uint32_t p) {
    if (a.empty() || b.empty())
        return {};
    std::vector<std::uint64_t> acc(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            acc[i + j] += static_cast<std::uint64_t>(a[i]) * b[j];
    std::vector<std::uint32_t> out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i)
        out[i] = static_cast<std::uint32_t>(acc[i] % p);
    trim(out);
    return out;
}

// Trial division by every monic polynomial of degree 1..deg(f)/2.
inline bool poly_irreducible(const std::vector<std::uint32_t>& f, std::uint32_t p) {
    const std::size_t m = f.size() - 1;
    for (std::size_t d = 1; 2 * d <= m; ++d) {
        std::uint64_t count = 1;
        for (std::size_t i = 0; i < d; ++i)
            count *= p;
        for (std::uint64_t low = 0; low < count; ++low) {
            std::vector<std::uint32_t> g = digits_of(low, p, d);
            g.push_back(1); // monic
            if (poly_mod(f, g, p).empty())
                return false;
        }
    }
    return true;
}

} // namespace gfdetail

class Field {
public:
    // Builds GF(q). Rejects q that is not a prime power or is out of the
    // supported range [2, 2^16].
    explicit Field(std::uint32_t q) : q_(q) {
        if (q < 2 || q > 65536)
            throw std::invalid_argument("field order q=" + std::to_string(q) +
                                        " out of supported range [2, 65536]");
        factor_prime_power();
        if (m_ > 1)
            find_modulus();
        build_tables();
    }

    std::uint32_t q() const { return q_; }
    std::uint32_t p() const { return p_; }
    std::uint32_t m() const { return m_; }
    bool char_two() const { return p_ == 2; }

    // Modulus coefficients, little endian, degree m (monic). Empty for m = 1.
    const std::vector<std::uint32_t>& modulus() const { return modulus_; }

    std::string modulus_string() const {
        if (m_ == 1)
            return "none";
        std::string s;
        for (std::size_t i = modulus_.size(); i-- > 0;) {
            if (modulus_[i] == 0)
                continue;
            if (!s.empty())
                s += "+";
            if (i == 0) {
                s += std::to_string(modulus_[i]);
            } else {
                if (modulus_[i] != 1)
                    s += std::to_string(modulus_[i]);
                s += (i == 1) ? "x" : "x^" + std::to_string(i);
            }
        }
        return s;
    }

    Elem add(Elem a, Elem b) const {
        check(a);
        check(b);
        if (p_ == 2)
            return a ^ b;
        if (m_ == 1)
            return (a + b) % p_;
        return digitwise(a, b, /*subtract=*/false);
    }

    Elem neg(Elem a) const {
        check(a);
        if (p_ == 2)
            return a;
        if (m_ == 1)
            return (p_ - a) % p_;
        Elem out = 0, place = 1;
        for (std::uint32_t i = 0; i < m_; ++i) {
            const Elem da = a % p_;
            a /= p_;
            out += ((p_ - da) % p_) * place;
            place *= p_;
        }
        return out;
    }

    Elem sub(Elem a, Elem b) const {
        check(a);
        check(b);
        if (p_ == 2)
            return a ^ b;
        if (m_ == 1)
            return (a + p_ - b) % p_;
        return digitwise(a, b, /*subtract=*/true);
    }

    Elem mul(Elem a, Elem b) const {
        check(a);
        check(b);
        if (a == 0 || b == 0)
            return 0;
        return alog_[log_[a] + log_[b]];
    }

    Elem inv(Elem a) const {
        check(a);
        if (a == 0)
            throw std::domain_error("inverse of zero in GF(" + std::to_string(q_) + ")");
        return alog_[q_ - 1 - log_[a]];
    }

    Elem div(Elem a, Elem b) const {
        check(a);
        check(b);
        if (b == 0)
            throw std::domain_error("division by zero in GF(" + std::to_string(q_) + ")");
        if (a == 0)
            return 0;
        return alog_[log_[a] + (q_ - 1) - log_[b]];
    }

    Elem pow(Elem a, std::uint64_t e) const {
        check(a);
        if (e == 0)
            return 1;
        if (a == 0)
            return 0;
        const std::uint64_t idx =
            (static_cast<std::uint64_t>(log_[a]) * (e % (q_ - 1))) % (q_ - 1);
        return alog_[idx];
    }

    // dst[i] <- dst[i] - factor * src[i] for i in [0, n). The elimination
    // kernel of the GE decoder; characteristic-2 fields take a branch-light
    // table path.
    void row_submul(Elem* dst, const Elem* src, std::size_t n, Elem factor) const {
        if (factor == 0)
            return;
        if (p_ == 2) {
            const Elem lf = log_[factor];
            const Elem* lg = log_.data();
            const Elem* al = alog_.data();
            for (std::size_t i = 0; i < n; ++i) {
                const Elem s = src[i];
                if (s != 0)
                    dst[i] ^= al[lf + lg[s]];
            }
        } else {
            for (std::size_t i = 0; i < n; ++i)
                dst[i] = sub(dst[i], mul(factor, src[i]));
        }
    }

    Elem random_element(Rng& rng) const { return static_cast<Elem>(rng.next_below(q_)); }

    Elem random_nonzero(Rng& rng) const {
        return static_cast<Elem>(1 + rng.next_below(q_ - 1));
    }

private:
    void check(Elem a) const {
#ifndef NDEBUG
        if (a >= q_)
            throw std::domain_error("element out of range for GF(" + std::to_string(q_) + ")");
#else
        (void)a;
#endif
    }

    Elem digitwise(Elem a, Elem b, bool subtract) const {
        Elem out = 0, place = 1;
        for (std::uint32_t i = 0; i < m_; ++i) {
            const Elem da = a % p_, db = b % p_;
            a /= p_;
            b /= p_;
            const Elem d = subtract ? (da + p_ - db) % p_ : (da + db) % p_;
            out += d * place;
            place *= p_;
        }
        return out;
    }

    void factor_prime_power() {
        for (std::uint32_t cand = 2; cand * cand <= q_; ++cand) {
            if (q_ % cand == 0) {
                std::uint32_t rest = q_;
                std::uint32_t degree = 0;
                while (rest % cand == 0) {
                    rest /= cand;
                    ++degree;
                }
                if (rest != 1)
                    throw std::invalid_argument("q=" + std::to_string(q_) +
                                                " is not a prime power");
                p_ = cand;
                m_ = degree;
                return;
            }
        }
        p_ = q_; // q itself prime
        m_ = 1;
    }

    // Smallest monic irreducible of degree m over GF(p) by integer encoding
    // (constant coefficient least significant).
    void find_modulus() {
        std::uint64_t pm = 1;
        for (std::uint32_t i = 0; i < m_; ++i)
            pm *= p_;
        for (std::uint64_t low = 0; low < pm; ++low) {
            std::vector<std::uint32_t> f = gfdetail::digits_of(low, p_, m_);
            f.push_back(1);
            if (gfdetail::poly_irreducible(f, p_)) {
                modulus_ = f;
                return;
            }
        }
        throw std::logic_error("no irreducible modulus found"); // unreachable
    }

    Elem poly_mul_mod(Elem a, Elem b) const {
        if (m_ == 1)
            return static_cast<Elem>((static_cast<std::uint64_t>(a) * b) % p_);
        auto prod = gfdetail::poly_mul(gfdetail::digits_of(a, p_), gfdetail::digits_of(b, p_), p_);
        auto rem = gfdetail::poly_mod(std::move(prod), modulus_, p_);
        return static_cast<Elem>(gfdetail::value_of(rem, p_));
    }

    void build_tables() {
        // Find the smallest generator of the multiplicative group, then lay
        // out antilog over a doubled index range so mul never needs a mod.
        Elem generator = 1;
        for (Elem cand = (q_ == 2) ? 1 : 2; cand < q_; ++cand) {
            std::uint32_t order = 1;
            Elem x = cand;
            while (x != 1) {
                x = poly_mul_mod(x, cand);
                ++order;
            }
            if (order == q_ - 1) {
                generator = cand;
                break;
            }
        }
        log_.assign(q_, 0);
        alog_.assign(2 * (q_ - 1), 1);
        Elem x = 1;
        for (std::uint32_t i = 0; i < q_ - 1; ++i) {
            alog_[i] = x;
            log_[x] = i;
            x = poly_mul_mod(x, generator);
        }
        for (std::uint32_t i = q_ - 1; i < 2 * (q_ - 1); ++i)
            alog_[i] = alog_[i - (q_ - 1)];
    }

    std::uint32_t q_ = 0, p_ = 0, m_ = 0;
    std::vector<std::uint32_t> modulus_;
    std::vector<Elem> log_, alog_;
};

} // namespace fountain
