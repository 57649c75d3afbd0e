#ifndef BIQ2_FIELDS_HPP
#define BIQ2_FIELDS_HPP

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "biq2/arith.hpp"

namespace biq2 {

/// Product of squarefree radicands modulo squares.
inline u64 radicand_mul(u64 a, u64 b) {
    u64 g = std::gcd(a, b);
    return (a / g) * (b / g);
}

/// The quadratic subfield radicands of Q(sqrt g1, ..., sqrt gn): the nontrivial
/// part of the group generated by the gi under radicand_mul.
inline std::vector<u64> subfield_radicands(const std::vector<u64>& gens) {
    std::set<u64> span{1};
    for (u64 g : gens) {
        std::set<u64> next = span;
        for (u64 s : span) next.insert(radicand_mul(s, squarefree_part(g)));
        span = next;
    }
    span.erase(1);
    return {span.begin(), span.end()};
}

/// Exact element of a real multiquadratic field: sum of coef[m]*sqrt(m) over
/// squarefree radicands m, with m = 1 the rational part.
struct MqElem {
    std::map<u64, mpq_class> c;

    static MqElem rational(const mpq_class& q) {
        MqElem e;
        if (q != 0) e.c[1] = q;
        return e;
    }

    static MqElem sqrt_of(u64 m) {
        MqElem e;
        e.c[m] = 1;
        return e;
    }

    bool is_zero() const { return c.empty(); }

    bool is_rational() const { return c.empty() || (c.size() == 1 && c.begin()->first == 1); }

    void add_term(u64 m, const mpq_class& q) {
        if (q == 0) return;
        auto it = c.find(m);
        if (it == c.end()) {
            c.emplace(m, q);
        } else {
            it->second += q;
            if (it->second == 0) c.erase(it);
        }
    }

    MqElem operator+(const MqElem& o) const {
        MqElem r = *this;
        for (auto& [m, q] : o.c) r.add_term(m, q);
        return r;
    }

    MqElem operator-(const MqElem& o) const {
        MqElem r = *this;
        for (auto& [m, q] : o.c) r.add_term(m, -q);
        return r;
    }

    MqElem operator*(const MqElem& o) const {
        MqElem r;
        for (auto& [m1, q1] : c)
            for (auto& [m2, q2] : o.c) {
                u64 g = std::gcd(m1, m2);
                r.add_term(radicand_mul(m1, m2), q1 * q2 * mpq_class((unsigned long)g));
            }
        return r;
    }

    MqElem operator*(const mpq_class& q) const {
        MqElem r;
        for (auto& [m, v] : c) r.add_term(m, v * q);
        return r;
    }

    bool operator==(const MqElem& o) const { return c == o.c; }

    /// Automorphism sending sqrt(p) -> -sqrt(p) for the primes in flip.
    MqElem conj(const std::set<u64>& flip) const {
        MqElem r;
        for (auto& [m, q] : c) {
            int sign = 1;
            for (u64 p : flip)
                if (m % p == 0) sign = -sign;
            r.add_term(m, sign > 0 ? q : -q);
        }
        return r;
    }

    std::set<u64> support() const {
        std::set<u64> s;
        for (auto& [m, q] : c)
            if (m != 1) s.insert(m);
        return s;
    }
};

inline bool sqrt_exact_mpq(const mpq_class& q, mpq_class& out) {
    if (q < 0) return false;
    mpz_class n = q.get_num(), d = q.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return false;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    out = mpq_class(rn) / mpq_class(rd);
    return true;
}

/// Invert a nonzero element of span(gens) by multiplying through by conjugates.
inline std::optional<MqElem> invert_in_span(const MqElem& d, const std::vector<u64>& gens) {
    if (d.is_zero()) return std::nullopt;
    std::set<u64> ps;
    for (u64 g : gens)
        for (u64 p : factor_squarefree(g)) ps.insert(p);
    MqElem num = MqElem::rational(1), den = d;
    for (u64 p : ps) {
        if (den.is_rational()) break;
        MqElem cj = den.conj({p});
        num = num * cj;
        den = den * cj;
    }
    if (!den.is_rational() || den.is_zero()) return std::nullopt;
    return num * (1 / den.c.begin()->second);
}

/// Exact square root of x inside Q(sqrt gens[0], ..., sqrt gens[k-1]);
/// nullopt if x is not a square there (or not even an element).
/// Recursive over relative quadratic subextensions: with K = k(sqrt g) and
/// xi = u + v sqrt(g), xi^2 = A + B sqrt(g) forces u^2 = (A ± sqrt(A^2 - g B^2))/2.
inline std::optional<MqElem> sqrt_in_span(const MqElem& x, const std::vector<u64>& gens) {
    if (x.is_zero()) return MqElem{};
    if (gens.empty()) {
        if (!x.is_rational()) return std::nullopt;
        mpq_class r;
        if (!sqrt_exact_mpq(x.c.begin()->second, r)) return std::nullopt;
        return MqElem::rational(r);
    }

    u64 g = squarefree_part(gens.back());
    std::vector<u64> rest(gens.begin(), gens.end() - 1);
    std::set<u64> rest_span;
    {
        auto v = subfield_radicands(rest);
        rest_span = {v.begin(), v.end()};
        rest_span.insert(1);
    }

    // x = A + B sqrt(g), A and B in span(rest):
    // sqrt(m) = sqrt(m2) sqrt(g) / gcd(m2, g) with m2 = radicand_mul(m, g).
    MqElem A, B;
    for (auto& [m, q] : x.c) {
        if (rest_span.count(m) || m == 1) {
            A.add_term(m, q);
        } else {
            u64 m2 = radicand_mul(m, g);
            if (m2 != 1 && !rest_span.count(m2)) return std::nullopt;
            B.add_term(m2, q / mpq_class((unsigned long)std::gcd(m2, g)));
        }
    }

    if (B.is_zero()) {
        if (auto r = sqrt_in_span(A, rest)) return r;
        if (auto r = sqrt_in_span(A * mpq_class(1, (unsigned long)g), rest))
            return *r * MqElem::sqrt_of(g);
        return std::nullopt;
    }

    MqElem delta = A * A - B * B * mpq_class((unsigned long)g);
    auto sd = sqrt_in_span(delta, rest);
    if (!sd) return std::nullopt;
    for (int sign : {1, -1}) {
        MqElem u2 = (A + *sd * mpq_class(sign)) * mpq_class(1, 2);
        auto u = sqrt_in_span(u2, rest);
        if (!u || u->is_zero()) continue;
        auto uinv = invert_in_span(*u, rest);
        if (!uinv) continue;
        MqElem v = B * *uinv * mpq_class(1, 2);
        MqElem xi = *u + v * MqElem::sqrt_of(g);
        if (xi * xi == x) return xi;
    }
    return std::nullopt;
}

inline bool is_square_in_field(const MqElem& x, const std::vector<u64>& gens) {
    return sqrt_in_span(x, gens).has_value();
}

}  // namespace biq2

#endif
