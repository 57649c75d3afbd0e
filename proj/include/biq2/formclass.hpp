#ifndef BIQ2_FORMCLASS_HPP
#define BIQ2_FORMCLASS_HPP

#include <atomic>
#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "biq2/arith.hpp"
#include "biq2/quadunits.hpp"

namespace biq2 {

/// Integer binary quadratic form a x^2 + b xy + c y^2.
struct QuadForm {
    i64 a = 0, b = 0, c = 0;

    i64 disc() const { return b * b - 4 * a * c; }
    bool operator==(const QuadForm& o) const { return a == o.a && b == o.b && c == o.c; }
    bool operator<(const QuadForm& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        return c < o.c;
    }
    bool primitive() const { return std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c)) == 1; }
};

struct QuadFormHash {
    size_t operator()(const QuadForm& f) const {
        size_t h = std::hash<i64>()(f.a);
        h = h * 1000003u ^ std::hash<i64>()(f.b);
        h = h * 1000003u ^ std::hash<i64>()(f.c);
        return h;
    }
};

inline bool is_fundamental_discriminant(i64 D) {
    if (D <= 0) return false;
    if (D % 4 == 1) return is_squarefree((u64)D);
    if (D % 4 == 0) {
        i64 d = D / 4;
        return (d % 4 == 2 || d % 4 == 3) && is_squarefree((u64)d);
    }
    return false;
}

/// Gauss reduction state for indefinite forms (D > 0 nonsquare):
/// reduced iff 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b.
inline bool is_reduced_indef(const QuadForm& f, i64 D, i64 sqD) {
    if (f.b <= 0 || f.b > sqD) return false;
    i64 t = 2 * std::abs(f.a);
    return (t - f.b) * (t - f.b) < D && D < (t + f.b) * (t + f.b);
}

/// One rho step: (a,b,c) -> (c, r, (r^2 - D)/(4c)), r = -b mod 2|c| in the
/// standard window.
inline QuadForm rho_indef(const QuadForm& f, i64 D, i64 sqD) {
    i64 cabs = std::abs(f.c);
    i64 r = ((-f.b) % (2 * cabs) + 2 * cabs) % (2 * cabs);
    i64 lo = (cabs > sqD) ? -cabs + 1 : sqD - 2 * cabs + 1;
    // shift r into [lo, lo + 2|c|)
    r += 2 * cabs * ((lo - r) / (2 * cabs));
    while (r < lo) r += 2 * cabs;
    while (r >= lo + 2 * cabs) r -= 2 * cabs;
    i64 c2 = (i64)(((__int128)r * r - D) / (4 * f.c));
    return {f.c, r, c2};
}

inline QuadForm reduce_indef(QuadForm f, i64 D, i64 sqD) {
    int guard = 0;
    while (!is_reduced_indef(f, D, sqD)) {
        f = rho_indef(f, D, sqD);
        if (++guard > 100000) throw std::logic_error("reduce_indef: no convergence");
    }
    return f;
}

/// Narrow (form) class group data for one positive fundamental discriminant.
struct FormClassGroup {
    i64 D = 0;
    i64 sqD = 0;
    std::vector<QuadForm> reps;                              // canonical rep per class
    std::unordered_map<QuadForm, int, QuadFormHash> class_of;  // reduced form -> class index
    int principal = -1;
    int neg_principal = -1;  // class of (-1, s0, .) ; equals principal iff N(eps) = -1

    int h_plus() const { return (int)reps.size(); }

    int id_of(QuadForm f) const {
        auto it = class_of.find(reduce_indef(f, D, sqD));
        if (it == class_of.end()) throw std::logic_error("class lookup failed");
        return it->second;
    }

    /// Dirichlet composition after transforming g to a first coefficient
    /// coprime to f's.
    int compose(int i, int j) const {
        const QuadForm& f = reps[i];
        QuadForm g = reps[j];
        // find coprime represented value of g: a2' = g(x,y), gcd(x,y)=1
        QuadForm g2{};
        bool found = false;
        for (int x = 0; x <= 24 && !found; ++x)
            for (int y = -24; y <= 24 && !found; ++y) {
                if (std::gcd(std::abs(x), std::abs(y)) != 1) continue;
                i64 val = g.a * x * x + g.b * x * y + g.c * y * y;
                if (val == 0 || std::gcd(std::abs(val), std::abs(f.a)) != 1) continue;
                // complete (x,y) to SL2: (x u; y v), x v - y u = 1
                i64 u, v;
                {
                    i64 g0, uu, vv;
                    // solve x*vv - y*uu = 1 via xgcd(x, y)
                    g0 = std::gcd(std::abs(x), std::abs(y));
                    (void)g0;
                    // extended gcd
                    i64 s0 = 0, s1 = 1, t0 = 1, t1 = 0, r0 = y, r1 = x;
                    while (r0 != 0) {
                        i64 q = r1 / r0;
                        std::tie(r1, r0) = std::make_tuple(r0, r1 - q * r0);
                        std::tie(t1, t0) = std::make_tuple(t0, t1 - q * t0);
                        std::tie(s1, s0) = std::make_tuple(s0, s1 - q * s0);
                    }
                    // r1 = gcd = t1*x + s1*y = ±1
                    i64 gg = t1 * x + s1 * y;
                    if (gg != 1 && gg != -1) continue;
                    if (gg == 1) { v = t1; u = -s1; }
                    else { v = -t1; u = s1; }
                }
                // g2 = g applied to matrix (x u; y v)
                i64 a2 = val;
                i64 b2 = 2 * (g.a * x * u + g.c * y * v) + g.b * (x * v + y * u);
                i64 c2 = g.a * u * u + g.b * u * v + g.c * v * v;
                g2 = {a2, b2, c2};
                found = true;
            }
        if (!found) throw std::logic_error("compose: no coprime represented value");
        // CRT: B = f.b (mod 2 f.a), B = g2.b (mod 2 g2.a)
        i64 a1 = f.a, b1 = f.b, a2 = g2.a, b2 = g2.b;
        i64 mod = std::abs(a2);
        i64 diff = (b2 - b1) / 2;
        // t = a1^{-1} * diff mod a2
        i64 inv = 0;
        {
            i64 t0 = 0, t1 = 1, r0 = mod, r1 = ((a1 % mod) + mod) % mod;
            while (r1 != 0) {
                i64 q = r0 / r1;
                std::tie(r0, r1) = std::make_tuple(r1, r0 - q * r1);
                std::tie(t0, t1) = std::make_tuple(t1, t0 - q * t1);
            }
            if (r0 != 1 && r0 != -1) throw std::logic_error("compose: not coprime");
            inv = (r0 == 1) ? t0 : -t0;
        }
        i64 t = (i64)((__int128)(((inv % mod) + mod) % mod) * (((diff % mod) + mod) % mod) % mod);
        i64 A = a1 * a2;
        i64 B = b1 + 2 * a1 * t;
        B %= 2 * A;
        __int128 num = (__int128)B * B - D;
        if (num % (4 * (__int128)A) != 0) throw std::logic_error("compose: misaligned B");
        i64 C = (i64)(num / (4 * A));
        return id_of({A, B, C});
    }

    int square(int i) const { return compose(i, i); }

    int pow(int i, u64 e) const {
        int acc = principal, base = i;
        while (e) {
            if (e & 1) acc = compose(acc, base);
            if (e > 1) base = square(base);
            e >>= 1;
        }
        return acc;
    }
};

/// Enumerate all primitive reduced forms of discriminant D and partition into
/// rho-cycles.
inline FormClassGroup build_form_class_group(i64 D) {
    if (!is_fundamental_discriminant(D))
        throw std::invalid_argument("build_form_class_group: D must be a fundamental discriminant > 0");
    FormClassGroup G;
    G.D = D;
    G.sqD = (i64)isqrt_u64((u64)D);
    std::vector<QuadForm> all;
    for (i64 b = (D % 2 == 0) ? 2 : 1; b <= G.sqD; b += 2) {
        i64 M4 = D - b * b;
        if (M4 % 4 != 0) continue;
        i64 M = M4 / 4;  // = -a*c = |a||c|, a*c < 0
        i64 lo = (G.sqD - b) / 2;
        i64 hi = (G.sqD + b) / 2 + 1;
        for (i64 aa = std::max<i64>(1, lo); aa <= hi; ++aa) {
            i64 t = 2 * aa;
            if (!((t - b) * (t - b) < D && D < (t + b) * (t + b))) continue;
            if (M % aa != 0) continue;
            i64 other = M / aa;
            QuadForm f1{aa, b, -other}, f2{-aa, b, other};
            if (f1.primitive()) all.push_back(f1);
            if (f2.primitive()) all.push_back(f2);
        }
    }
    for (auto& f : all) {
        if (G.class_of.count(f)) continue;
        int id = (int)G.reps.size();
        QuadForm best = f, cur = f;
        int guard = 0;
        do {
            G.class_of[cur] = id;
            if (cur < best) best = cur;
            cur = rho_indef(cur, D, G.sqD);
            if (++guard > 5000000) throw std::logic_error("cycle walk too long");
        } while (!(cur == f));
        G.reps.push_back(best);
    }
    // normalize reps to the canonical (minimal) form and index them
    i64 s0 = ((D % 2) + 2) % 2;
    G.principal = G.id_of({1, s0, (i64)(((__int128)s0 * s0 - D) / 4)});
    G.neg_principal = G.id_of({-1, s0, (i64)((D - (__int128)s0 * s0) / 4)});
    return G;
}

/// Number of cycles of reduced indefinite forms = narrow class number h+(D).
inline u64 narrow_class_number(i64 D) { return build_form_class_group(D).h_plus(); }

/// 2-part data of the class group of Q(sqrt d).
struct ClassGroup2 {
    u64 d = 0;
    int m = 0;                         // wide |A(d)| = 2^m
    int m_narrow = 0;                  // narrow 2-part exponent
    std::vector<int> invariant_factors;  // wide 2-Sylow, exponents of 2, descending
    int two_rank = 0;                  // wide
    int four_rank = 0;                 // wide
    int two_rank_narrow = 0;           // = (#prime discriminant divisors) - 1 (genus theory)
    bool norm_minus_one = false;       // N(eps_d) = -1
};

namespace detail {

/// Invariant factors (exponents of 2, descending) of an abelian 2-group given
/// its elements and a squaring map, via the rank sequence |T^{2^k}|.
template <typename Sq>
inline std::vector<int> two_group_exponents(std::vector<int> elems, Sq&& sq) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    std::vector<int> sizes;  // log2 |T^{2^k}|
    std::vector<int> cur = elems;
    while (true) {
        int lg = 0;
        while ((size_t(1) << lg) < cur.size()) ++lg;
        if ((size_t(1) << lg) != cur.size())
            throw std::logic_error("two_group_exponents: non power of two order");
        sizes.push_back(lg);
        if (cur.size() == 1) break;
        std::vector<int> nxt;
        nxt.reserve(cur.size());
        for (int x : cur) nxt.push_back(sq(x));
        std::sort(nxt.begin(), nxt.end());
        nxt.erase(std::unique(nxt.begin(), nxt.end()), nxt.end());
        cur = std::move(nxt);
    }
    std::vector<int> exps;  // lambda_k = #factors with exponent > k
    for (size_t k = 0; k + 1 < sizes.size(); ++k) {
        int lam = sizes[k] - sizes[k + 1];
        // lam factors have exponent >= k+1
        while ((int)exps.size() < lam) exps.push_back(0);
        for (int i = 0; i < lam; ++i) exps[i] = (int)k + 1;
    }
    std::sort(exps.rbegin(), exps.rend());
    return exps;
}

inline std::atomic<u64>& disc_cap() {
    static std::atomic<u64> cap{1000000};
    return cap;
}

inline std::map<u64, ClassGroup2>& h2_memo() {
    static std::map<u64, ClassGroup2> m;
    return m;
}
inline std::shared_mutex& h2_memo_mutex() {
    static std::shared_mutex mu;
    return mu;
}

}  // namespace detail

inline void set_disc_cap(u64 cap) { detail::disc_cap().store(cap); }
inline u64 get_disc_cap() { return detail::disc_cap().load(); }

inline ClassGroup2 h2_wide_uncached(u64 d) {
    if (d <= 1 || !is_squarefree(d)) throw std::invalid_argument("h2_wide: need squarefree d > 1");
    i64 D = (d % 4 == 1) ? (i64)d : 4 * (i64)d;
    if ((u64)D > detail::disc_cap().load())
        throw std::invalid_argument("h2_wide: discriminant above configured cap");
    FormClassGroup G = build_form_class_group(D);

    u64 h = G.h_plus();
    int a = 0;
    while (h % 2 == 0) { h /= 2; ++a; }
    u64 odd = h;

    // narrow 2-Sylow = image of the odd-power map
    std::vector<int> sylow;
    sylow.reserve(size_t(1) << a);
    for (int i = 0; i < G.h_plus(); ++i) sylow.push_back(G.pow(i, odd));
    std::sort(sylow.begin(), sylow.end());
    sylow.erase(std::unique(sylow.begin(), sylow.end()), sylow.end());

    ClassGroup2 out;
    out.d = d;
    out.m_narrow = a;
    out.norm_minus_one = (G.neg_principal == G.principal);

    auto narrow_exps = detail::two_group_exponents(sylow, [&](int x) { return G.square(x); });
    out.two_rank_narrow = (int)narrow_exps.size();

    int R = G.neg_principal;
    if (R == G.principal) {
        out.m = a;
        out.invariant_factors = narrow_exps;
    } else {
        // wide group = narrow / <R>; represent orbits by min(x, x*R)
        auto orb = [&](int x) { return std::min(x, G.compose(x, R)); };
        std::vector<int> q;
        for (int x : sylow) q.push_back(orb(x));
        out.invariant_factors =
            detail::two_group_exponents(q, [&](int x) { return orb(G.square(x)); });
        out.m = a - 1;
    }
    out.two_rank = (int)out.invariant_factors.size();
    out.four_rank = (int)std::count_if(out.invariant_factors.begin(), out.invariant_factors.end(),
                                       [](int e) { return e >= 2; });
    int check = 0;
    for (int e : out.invariant_factors) check += e;
    if (check != out.m) throw std::logic_error("h2_wide: invariant factor exponents disagree");
    return out;
}

inline const ClassGroup2& h2_wide(u64 d) {
    {
        std::shared_lock lk(detail::h2_memo_mutex());
        auto it = detail::h2_memo().find(d);
        if (it != detail::h2_memo().end()) return it->second;
    }
    ClassGroup2 g = h2_wide_uncached(d);
    std::unique_lock lk(detail::h2_memo_mutex());
    return detail::h2_memo().emplace(d, std::move(g)).first->second;
}

/// Conner–Hurrelbrink parity list: h(d) odd iff d in {2} or {p == 1 mod 4} or
/// {q, 2q, q1q2 : q's == 3 mod 4 prime}.
inline bool quad_odd_list(u64 d) {
    if (d == 2) return true;
    auto fs = factor_squarefree(d);
    if (fs.size() == 1 && d % 4 == 1) return true;                      // p == 1 mod 4
    if (fs.size() == 1 && d % 4 == 3) return true;                      // q
    if (fs.size() == 2 && fs[0] == 2 && fs[1] % 4 == 3) return true;    // 2q
    if (fs.size() == 2 && fs[0] % 4 == 3 && fs[1] % 4 == 3) return true;  // q1 q2
    return false;
}

/// Regression hook: does the computed parity match the list?
inline bool parity_table_check(u64 d) { return (h2_wide(d).m == 0) == quad_odd_list(d); }

}  // namespace biq2

#endif
