#ifndef BIQ2_ARITH_HPP
#define BIQ2_ARITH_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace biq2 {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i64 = std::int64_t;

inline u64 mulmod(u64 a, u64 b, u64 m) { return (u128)a * b % m; }

inline u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

/// Deterministic Miller-Rabin, valid for all n < 2^64.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

inline u64 isqrt_u64(u64 n) {
    if (n == 0) return 0;
    u64 r = (u64)std::sqrt((double)n);
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n && (r + 1) != 0) ++r;
    return r;
}

/// k with k^2 = n, or nullopt.
inline std::optional<u64> sqrt_exact(u64 n) {
    u64 r = isqrt_u64(n);
    if (r * r == n) return r;
    return std::nullopt;
}

/// Jacobi symbol (a/n) for odd n >= 1.
inline int jacobi(i64 a, i64 n) {
    if (n <= 0 || n % 2 == 0) throw std::invalid_argument("jacobi: n must be odd positive");
    a %= n;
    if (a < 0) a += n;
    int t = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            i64 r = n % 8;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) t = -t;
        a %= n;
    }
    return n == 1 ? t : 0;
}

/// Rational quartic residue symbol (a/p)_4 for p == 1 (mod 4), defined when (a/p) = +1.
inline int quartic_residue(i64 a, u64 p) {
    if (p % 4 != 1) throw std::invalid_argument("quartic_residue: p must be 1 mod 4");
    i64 am = a % (i64)p;
    if (am < 0) am += (i64)p;
    if (am == 0 || jacobi(am, (i64)p) != 1)
        throw std::invalid_argument("quartic_residue: a must be a nonzero quadratic residue mod p");
    u64 v = powmod((u64)am, (p - 1) / 4, p);
    if (v == 1) return 1;
    if (v == p - 1) return -1;
    throw std::logic_error("quartic_residue: unexpected power value");
}

/// (p/2)_4 = (-1)^((p-1)/8) for p == 1 (mod 8), the usual convention.
inline int quartic_residue_of_prime_mod2(u64 p) {
    if (p % 8 != 1) throw std::invalid_argument("(p/2)_4 needs p == 1 mod 8");
    return ((p - 1) / 8) % 2 == 0 ? 1 : -1;
}

/// Quadratic character of eps_p at the two primes of Q(sqrt p) above r, p = 2 or p == 1 (mod 4),
/// (p/r) = +1. Ordering follows the paper's normalization: the first value is the canonical one.
struct ScholzPair {
    int at_R;
    int at_Rprime;
};

inline ScholzPair scholz_pair(u64 p, u64 r) {
    if (!(p == 2 || p % 4 == 1)) throw std::invalid_argument("scholz_pair: p must be 2 or 1 mod 4");
    if (r % 2 == 0 || !is_prime(r)) throw std::invalid_argument("scholz_pair: r must be an odd prime");
    if (jacobi((i64)p, (i64)r) != 1) throw std::invalid_argument("scholz_pair: needs (p/r) = +1");
    if ((p == 2 && r % 8 == 1) || (p % 4 == 1 && r % 4 == 1)) {
        int v;
        if (p == 2) {
            v = quartic_residue(2, r) * quartic_residue_of_prime_mod2(r);
        } else {
            v = quartic_residue((i64)p, r) * quartic_residue((i64)r, p);
        }
        return {v, v};
    }
    // p == 1 mod 4 with r == 3 mod 4, or p == 2 with r == 7 mod 8
    return {1, -1};
}

/// Search spec for primes p == residue (mod 8) in [lower, upper] with Legendre constraints.
struct CongruenceSpec {
    u64 residue = 1;  // odd residue mod 8
    std::vector<std::pair<i64, int>> symbol_constraints;  // (base, required jacobi(base/p))
    u64 lower = 3;
    u64 upper = 0;
};

inline std::vector<u64> find_primes(const CongruenceSpec& spec) {
    if (spec.residue % 2 == 0 || spec.residue >= 8)
        throw std::invalid_argument("find_primes: residue must be odd and < 8");
    std::vector<u64> out;
    u64 start = spec.lower < 3 ? 3 : spec.lower;
    for (u64 p = start | 1; p <= spec.upper; p += 2) {
        if (p % 8 != spec.residue) continue;
        if (!is_prime(p)) continue;
        bool ok = true;
        for (auto& [base, want] : spec.symbol_constraints) {
            if (base % (i64)p == 0 || jacobi(base, (i64)p) != want) { ok = false; break; }
        }
        if (ok) out.push_back(p);
    }
    return out;
}

/// Primes in [lo, hi], ascending.
inline std::vector<u64> primes_below(u64 hi, u64 lo = 2) {
    std::vector<u64> out;
    for (u64 p = lo; p <= hi; ++p)
        if (is_prime(p)) out.push_back(p);
    return out;
}

/// Squarefree part and squarefree test by trial division (desk scale).
inline bool is_squarefree(u64 n) {
    if (n == 0) return false;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return false;
        }
    }
    return true;
}

inline std::vector<u64> factor_squarefree(u64 n) {
    std::vector<u64> fs;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            fs.push_back(p);
            n /= p;
            if (n % p == 0) throw std::invalid_argument("factor_squarefree: not squarefree");
        }
    }
    if (n > 1) fs.push_back(n);
    return fs;
}

inline u64 squarefree_part(u64 n) {
    u64 r = 1;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) { n /= p; ++e; }
            if (e % 2) r *= p;
        }
    }
    return r * n;
}

}  // namespace biq2

#endif
