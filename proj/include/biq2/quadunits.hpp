#ifndef BIQ2_QUADUNITS_HPP
#define BIQ2_QUADUNITS_HPP

#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "biq2/arith.hpp"
#include "biq2/fields.hpp"

namespace biq2 {

/// Fundamental unit (x + y sqrt d)/sigma of Q(sqrt d), minimal > 1.
/// x^2 - d y^2 = norm * sigma^2.
struct FundamentalUnit {
    u64 d = 0;
    mpz_class x, y;
    int sigma = 1;  // 2 only when d == 1 (mod 4) and the minimal unit is half-integral
    int norm = 1;

    bool pell_holds() const {
        return x * x - mpz_class((unsigned long)d) * y * y == norm * sigma * sigma;
    }

    MqElem as_elem() const {
        MqElem e = MqElem::rational(mpq_class(x) / sigma);
        e.add_term(d, mpq_class(y) / sigma);
        return e;
    }
};

/// Minimal integral Pell solution via the continued fraction of sqrt(d).
inline FundamentalUnit pell_min_integral(u64 d) {
    u64 a0 = isqrt_u64(d);
    if (a0 * a0 == d || d <= 1) throw std::invalid_argument("pell: d must be a nonsquare > 1");
    mpz_class h0 = 1, h1 = a0, k0 = 0, k1 = 1;
    u64 m = 0, q = 1, a = a0;
    int len = 0;
    while (true) {
        m = a * q - m;
        q = (d - m * m) / q;
        a = (a0 + m) / q;
        ++len;
        if (q == 1) break;
        mpz_class h2 = a * h1 + h0, k2 = a * k1 + k0;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    }
    FundamentalUnit u;
    u.d = d;
    u.x = h1;
    u.y = k1;
    u.sigma = 1;
    u.norm = (len % 2 == 0) ? 1 : -1;
    return u;
}

/// Fundamental unit of the maximal order. For d == 1 (mod 4) the half-integral
/// unit, when it exists, is the cube root of the Z[sqrt d] unit:
/// ((u + v sqrt d)/2)^3 = x + y sqrt d gives u^3 - 3nu = 2x.
inline FundamentalUnit fundamental_unit_uncached(u64 d) {
    if (d <= 1 || !is_squarefree(d)) throw std::invalid_argument("fundamental_unit: need squarefree d > 1");
    FundamentalUnit z = pell_min_integral(d);
    if (d % 4 != 1) return z;
    mpz_class rhs = 2 * z.x;
    mpz_class u;
    mpz_root(u.get_mpz_t(), rhs.get_mpz_t(), 3);
    for (mpz_class cand = u - 1; cand <= u + 1; ++cand) {
        if (cand <= 0) continue;
        if (cand * cand * cand - 3 * z.norm * cand != rhs) continue;
        mpz_class v2 = (cand * cand - 4 * z.norm);
        if (v2 % (long)d != 0) continue;
        v2 /= (long)d;
        if (!mpz_perfect_square_p(v2.get_mpz_t())) continue;
        mpz_class v;
        mpz_sqrt(v.get_mpz_t(), v2.get_mpz_t());
        if (cand % 2 == 0 || v % 2 == 0) continue;  // not genuinely half-integral
        FundamentalUnit h;
        h.d = d;
        h.x = cand;
        h.y = v;
        h.sigma = 2;
        h.norm = z.norm;
        return h;
    }
    return z;
}

namespace detail {
inline std::map<u64, FundamentalUnit>& unit_memo() {
    static std::map<u64, FundamentalUnit> m;
    return m;
}
inline std::shared_mutex& unit_memo_mutex() {
    static std::shared_mutex mu;
    return mu;
}
}  // namespace detail

inline const FundamentalUnit& fundamental_unit(u64 d) {
    {
        std::shared_lock lk(detail::unit_memo_mutex());
        auto it = detail::unit_memo().find(d);
        if (it != detail::unit_memo().end()) return it->second;
    }
    FundamentalUnit u = fundamental_unit_uncached(d);
    std::unique_lock lk(detail::unit_memo_mutex());
    return detail::unit_memo().emplace(d, std::move(u)).first->second;
}

/// Decomposition sqrt(eps_d) or sqrt(2 eps_d) = (b1 sqrt(m1) + b2 sqrt(m2))/sigma_prime.
/// pattern records which divisor of a -/+ sigma is the perfect square, as in the
/// source identities ("r(a-1)", "s(x-1)", ...).
struct SquareRootProfile {
    u64 d = 0;
    std::string pattern;
    u64 m1 = 1, m2 = 1;
    mpz_class b1, b2;
    bool scaled = false;   // true: identity is for 2*eps_d
    int sigma_prime = 1;   // denominator of the decomposition
    int gamma = 0;         // sign exponent: m1 b1^2 - m2 b2^2 = (-1)^gamma * k * sigma_prime^2

    /// sqrt(k*eps) as an exact field element.
    MqElem as_elem() const {
        MqElem e;
        e.add_term(m1 == 1 ? 1 : m1, mpq_class(b1) / sigma_prime);
        e.add_term(m2 == 1 ? 1 : m2, mpq_class(b2) / sigma_prime);
        return e;
    }

    bool expansion_holds(const FundamentalUnit& u) const {
        MqElem lhs = as_elem() * as_elem();
        MqElem rhs = u.as_elem() * mpq_class(scaled ? 2 : 1);
        return lhs == rhs;
    }
};

/// All decompositions of sqrt(k*eps_d) over splittings d = m1*m2, k in {1,2}.
/// Requires N(eps_d) = +1 (otherwise a-1, a+1 do not factor over d).
inline std::vector<SquareRootProfile> sqrt_profile_search(const FundamentalUnit& u) {
    std::vector<SquareRootProfile> found;
    if (u.norm != 1) return found;
    auto primes = factor_squarefree(u.d);
    size_t np = primes.size();
    for (size_t mask = 0; mask < (size_t(1) << np); ++mask) {
        u64 m1 = 1;
        for (size_t i = 0; i < np; ++i)
            if (mask & (size_t(1) << i)) m1 *= primes[i];
        u64 m2 = u.d / m1;
        for (int k : {1, 2})
            for (int sp : {1, 2})
                for (int sgn : {1, -1}) {
                    // m1 b1^2 = (k sp^2 / (2 sigma)) (a + sgn*sigma)
                    mpz_class n1 = k * sp * sp * (u.x + sgn * u.sigma);
                    mpz_class n2 = k * sp * sp * (u.x - sgn * u.sigma);
                    mpz_class d1 = 2 * u.sigma * (long)m1;
                    mpz_class d2 = 2 * u.sigma * (long)m2;
                    if (n1 % d1 != 0 || n2 % d2 != 0) continue;
                    mpz_class t1 = n1 / d1, t2 = n2 / d2;
                    if (t1 < 0 || t2 < 0) continue;
                    if (!mpz_perfect_square_p(t1.get_mpz_t()) || !mpz_perfect_square_p(t2.get_mpz_t()))
                        continue;
                    SquareRootProfile pr;
                    pr.d = u.d;
                    pr.m1 = m1;
                    pr.m2 = m2;
                    mpz_sqrt(pr.b1.get_mpz_t(), t1.get_mpz_t());
                    mpz_sqrt(pr.b2.get_mpz_t(), t2.get_mpz_t());
                    pr.scaled = (k == 2);
                    pr.sigma_prime = sp;
                    mpz_class diff = (long)m1 * pr.b1 * pr.b1 - (long)m2 * pr.b2 * pr.b2;
                    if (diff != k * sp * sp && diff != -k * sp * sp) continue;
                    pr.gamma = diff > 0 ? 0 : 1;
                    if (!pr.expansion_holds(u)) continue;
                    // label by the divisor pairing with a - sigma: "m(a-1)" means
                    // m*(a-1) is a perfect square (k=2), "2m(a-1)" likewise (k=1)
                    u64 mlo = (sgn < 0) ? m1 : m2;
                    pr.pattern = (k == 1 ? "2*" : "") + std::to_string(mlo) + "(a-1)";
                    found.push_back(std::move(pr));
                }
    }
    // drop (m1,m2)/(m2,m1) duplicates
    std::vector<SquareRootProfile> uniq;
    for (auto& p : found) {
        bool dup = false;
        for (auto& q : uniq)
            if (q.m1 == p.m2 && q.m2 == p.m1 && q.b1 == p.b2 && q.b2 == p.b1 &&
                q.scaled == p.scaled && q.sigma_prime == p.sigma_prime)
                dup = true;
        if (!dup) uniq.push_back(p);
    }
    return uniq;
}

/// Field shapes with a cataloged square-root decomposition.
enum class UnitShape {
    Q,         // d = q, q == 3 (mod 4): sqrt(2 eps_q) = x + y sqrt(q)
    TwoQ,      // d = 2q: sqrt(2 eps_2q) = a + b sqrt(2q)
    Q1Q2,      // d = q1 q2, q1 == q2 == 3 (mod 4): sqrt(eps) = b1 sqrt(q1) + b2 sqrt(q2)
    TwoQ1Q2,   // d = 2 q1 q2: pattern depends on q1 mod 8
    QR77,      // d = qr, q == r == 7 (mod 8), (r/q) = 1
    TwoQR77,   // d = 2qr, q == r == 7 (mod 8): one of (x+1), r(x+1), 2r(x+1)
    QRS,       // d = qrs under the three-prime hypotheses: one of 2q(a-1), r(a-1), s(a-1)
    TwoQRS,    // d = 2qrs under the same hypotheses: s(x-1)
};

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Candidate (k, m1, scaled-by-sign) systems per shape; prime order follows the
/// shape's parameter list.
inline std::optional<SquareRootProfile> match_profile(
    const std::vector<SquareRootProfile>& all, int k, u64 m1, u64 m2) {
    for (auto& p : all) {
        bool scaled = (k == 2);
        if (p.scaled != scaled) continue;
        if ((p.m1 == m1 && p.m2 == m2) || (p.m1 == m2 && p.m2 == m1)) {
            SquareRootProfile q = p;
            if (q.m1 != m1) {
                std::swap(q.m1, q.m2);
                std::swap(q.b1, q.b2);
                q.gamma ^= 1;
            }
            return q;
        }
    }
    return std::nullopt;
}

/// The cataloged decomposition for a shape; throws ShapeError("no pattern") /
/// ShapeError("ambiguous") per the exactly-one contract.
inline SquareRootProfile unit_sqrt_profile(UnitShape shape, const std::vector<u64>& primes) {
    auto need = [&](size_t n) {
        if (primes.size() != n) throw ShapeError("unit_sqrt_profile: wrong prime count for shape");
    };
    u64 d = 1;
    std::vector<std::pair<int, std::pair<u64, u64>>> candidates;  // (k, (m1, m2))
    switch (shape) {
        case UnitShape::Q: {
            need(1);
            u64 q = primes[0];
            if (q % 4 != 3) throw ShapeError("shape Q needs q == 3 (mod 4)");
            d = q;
            candidates = {{2, {1, q}}};
            break;
        }
        case UnitShape::TwoQ: {
            need(1);
            u64 q = primes[0];
            if (q % 4 != 3) throw ShapeError("shape TwoQ needs q == 3 (mod 4)");
            d = 2 * q;
            candidates = {{2, {1, 2 * q}}};
            break;
        }
        case UnitShape::Q1Q2: {
            need(2);
            u64 q1 = primes[0], q2 = primes[1];
            if (q1 % 4 != 3 || q2 % 4 != 3) throw ShapeError("shape Q1Q2 needs both == 3 (mod 4)");
            d = q1 * q2;
            candidates = {{1, {q1, q2}}};
            break;
        }
        case UnitShape::TwoQ1Q2: {
            need(2);
            u64 q1 = primes[0], q2 = primes[1];
            d = 2 * q1 * q2;
            if (q1 % 8 == 3)
                candidates = {{2, {1, d}}};
            else
                candidates = {{2, {2 * q1, q2}}};
            break;
        }
        case UnitShape::QR77: {
            need(2);
            u64 q = primes[0], r = primes[1];
            if (q % 8 != 7 || r % 8 != 7) throw ShapeError("shape QR77 needs q == r == 7 (mod 8)");
            d = q * r;
            candidates = {{1, {r, q}}};
            break;
        }
        case UnitShape::TwoQR77: {
            need(2);
            u64 q = primes[0], r = primes[1];
            d = 2 * q * r;
            candidates = {{2, {1, d}}, {2, {r, 2 * q}}, {2, {2 * r, q}}};
            break;
        }
        case UnitShape::QRS: {
            need(3);
            u64 q = primes[0], r = primes[1], s = primes[2];
            d = q * r * s;
            candidates = {{1, {q, r * s}}, {2, {r, q * s}}, {2, {s, q * r}}};
            break;
        }
        case UnitShape::TwoQRS: {
            need(3);
            u64 q = primes[0], r = primes[1], s = primes[2];
            d = 2 * q * r * s;
            candidates = {{2, {s, 2 * q * r}}};
            break;
        }
    }
    const FundamentalUnit& u = fundamental_unit(d);
    if (u.norm != 1) throw ShapeError("unit_sqrt_profile: shape requires N(eps) = +1");
    auto all = sqrt_profile_search(u);
    std::vector<SquareRootProfile> hits;
    for (auto& [k, ms] : candidates)
        if (auto p = match_profile(all, k, ms.first, ms.second)) hits.push_back(*p);
    if (hits.empty()) throw ShapeError("no pattern");
    if (hits.size() > 1) throw ShapeError("ambiguous");
    return hits[0];
}

/// True iff both profile radicands lie among the field's quadratic subfield
/// radicands (then sqrt(eps) or sqrt(2 eps) lies in the field).
inline bool sqrt_unit_in_field(const SquareRootProfile& p, const std::vector<u64>& field_gens) {
    auto subs = subfield_radicands(field_gens);
    std::set<u64> s(subs.begin(), subs.end());
    for (u64 m : {p.m1, p.m2})
        if (m != 1 && !s.count(m)) return false;
    return true;
}

}  // namespace biq2

#endif
