#ifndef BIQ2_GENUS2RANK_HPP
#define BIQ2_GENUS2RANK_HPP

#include <optional>
#include <string>
#include <vector>

#include "biq2/arith.hpp"
#include "biq2/formclass.hpp"
#include "biq2/quadunits.hpp"

namespace biq2 {

/// Base field of the relative quadratic extension whose ambiguous class rank
/// is computed. Level 0: quadratic bases; level 1: the degree-4 bases
/// Q(sqrt2, sqrt q) (forms A and B) and Q(sqrt2, sqrt q1q2) (form C).
enum class BaseKind { A0, B0, C0, A1, C1 };

struct RelQuadExt {
    BaseKind base = BaseKind::A0;
    u64 q = 0;                  // A0/B0/A1
    u64 q1 = 0, q2 = 0;         // C0/C1
    std::vector<u64> m_primes;  // primes of the second radicand, coprime to the base
    u64 delta = 1;              // divisor of d absorbed into the base square class

    u64 base_sym_modulus() const {
        switch (base) {
            case BaseKind::A0: case BaseKind::A1: return q;
            case BaseKind::B0: return 2 * q;
            default: return q1 * q2;
        }
    }
    bool level1() const { return base == BaseKind::A1 || base == BaseKind::C1; }
};

struct SymbolMatrix {
    std::vector<std::string> rows;      // unit generator labels
    std::vector<u64> col_prime;         // rational prime under each column
    std::vector<std::vector<int>> entries;  // entries[row][col] in {-1,+1}, 0 = not directly computable
    bool has_difficult = false;         // some entry is 0
    bool has_L_prime = false;           // p == 1 (mod 8) totally split: outside the catalog
};

struct UnitGenerator {
    std::string label;
    std::optional<SquareRootProfile> profile;  // for the sqrt-type generators
};

inline int leg(i64 a, u64 p) { return jacobi(a, (i64)p); }

/// Unit generators of the base field, per the paper's fundamental systems.
inline std::vector<UnitGenerator> unit_generators(const RelQuadExt& e) {
    std::vector<UnitGenerator> g;
    g.push_back({"-1", std::nullopt});
    switch (e.base) {
        case BaseKind::A0:
            g.push_back({"eps_" + std::to_string(e.q), std::nullopt});
            break;
        case BaseKind::B0:
            g.push_back({"eps_" + std::to_string(2 * e.q), std::nullopt});
            break;
        case BaseKind::C0:
            g.push_back({"eps_" + std::to_string(e.q1 * e.q2), std::nullopt});
            break;
        case BaseKind::A1:
            g.push_back({"eps_2", std::nullopt});
            g.push_back({"sqrt_eps_" + std::to_string(e.q),
                         unit_sqrt_profile(UnitShape::Q, {e.q})});
            g.push_back({"sqrt_eps_" + std::to_string(2 * e.q),
                         unit_sqrt_profile(UnitShape::TwoQ, {e.q})});
            break;
        case BaseKind::C1:
            g.push_back({"eps_2", std::nullopt});
            g.push_back({"eps_" + std::to_string(e.q1 * e.q2), std::nullopt});
            if (e.q1 % 8 == 3)
                g.push_back({"sqrt_eps_" + std::to_string(2 * e.q1 * e.q2),
                             unit_sqrt_profile(UnitShape::TwoQ1Q2, {e.q1, e.q2})});
            else
                g.push_back({"sqrt_eps_" + std::to_string(2 * e.q1 * e.q2) + "*eps_" +
                                 std::to_string(e.q1 * e.q2),
                             std::nullopt});
            break;
    }
    return g;
}

/// Number of primes of the base ramified in the extension.
inline int ramified_count(const RelQuadExt& e) {
    int t = 0;
    if (!e.level1()) {
        u64 f = e.base_sym_modulus();
        for (u64 p : e.m_primes) t += (leg((i64)f, p) == 1) ? 2 : 1;
    } else {
        u64 f = e.base == BaseKind::A1 ? e.q : e.q1 * e.q2;
        for (u64 p : e.m_primes) {
            bool tot = (p % 8 == 1 || p % 8 == 7) && leg((i64)f, p) == 1;
            t += tot ? 4 : 2;
        }
    }
    return t;
}

/// Norm residue symbol matrix over the ramified primes, per the V/Y-form rules
/// and the explicit tables of the rank lemmas' proofs. Entries of the
/// sqrt-generators at a totally split p == 7 (mod 8) are left 0 (the
/// documented hard case, resolved indirectly).
inline SymbolMatrix symbol_matrix(const RelQuadExt& e) {
    SymbolMatrix M;
    for (auto& g : unit_generators(e)) M.rows.push_back(g.label);
    auto push_col = [&](u64 p, std::vector<int> col, int copies) {
        for (int i = 0; i < copies; ++i) {
            M.col_prime.push_back(p);
            for (size_t r = 0; r < col.size(); ++r) M.entries[r].push_back(col[r]);
        }
    };
    M.entries.assign(M.rows.size(), {});

    if (!e.level1()) {
        u64 f = e.base_sym_modulus();
        // symbol of the fundamental unit at a split prime: eps = u^2 / w with
        // w = 2 for the q and 2q shapes, w = q1 for q1q2
        for (u64 p : e.m_primes) {
            if (leg((i64)f, p) != 1) {
                push_col(p, {1, 1}, 1);  // inert: residue field F_{p^2}, norms are trivial
            } else {
                int eps_sym = (e.base == BaseKind::C0) ? leg((i64)e.q1, p) : leg(2, p);
                push_col(p, {leg(-1, p), eps_sym}, 2);
            }
        }
        return M;
    }

    if (e.base == BaseKind::A1) {
        int gamma = (e.q % 8 == 3) ? 1 : 0;
        for (u64 p : e.m_primes) {
            int m8 = (int)(p % 8);
            int sq = leg((i64)e.q, p);
            if (m8 == 3 || m8 == 5) {
                int x, y;
                int pow_g1 = (gamma + 1) % 2 ? leg(-1, p) : 1;  // ((-1)^(gamma+1)/p)
                int m2sym = leg(-2, p);
                if (sq == -1) { x = pow_g1; y = m2sym; }
                else { x = m2sym; y = pow_g1; }
                push_col(p, {1, leg(-1, p), x, y}, 2);
            } else if (sq == -1) {  // p == 7 or 1 (mod 8), not totally split
                int z = gamma ? leg(-1, p) : 1;  // ((-1)^gamma/p)
                push_col(p, {1, 1, z, z}, 2);
            } else if (m8 == 7) {   // totally split: the hard case
                M.has_difficult = true;
                push_col(p, {-1, 1, 0, 0}, 2);
                push_col(p, {-1, -1, 0, 0}, 2);
            } else {                // p == 1 (mod 8), (q/p) = 1: the L shape
                M.has_L_prime = true;
                int v = scholz_pair(2, p).at_R;
                push_col(p, {1, v, 0, 0}, 4);
            }
        }
        return M;
    }

    // C1 base
    u64 q1 = e.q1, q2 = e.q2;
    int gamma = (leg((i64)q2, q1) == -1 && q1 % 8 == 7) ? 0 : 1;
    u64 omega = q1 % 8 == 7 ? q1 : 2;
    for (u64 p : e.m_primes) {
        int m8 = (int)(p % 8);
        int s12 = leg((i64)(q1 * q2), p);
        if (m8 == 3 || m8 == 5) {
            int h;
            if (s12 == -1)
                h = leg(gamma ? -(i64)omega : (i64)omega, p);  // ((-1)^g omega / p)
            else
                h = q1 % 8 == 7 ? leg(gamma ? -(i64)q1 : (i64)q1, p) : 1;
            push_col(p, {1, leg(-1, p), 1, h}, 2);
        } else if (s12 == -1) {
            int h = q1 % 8 == 7 ? 1 : leg(-1, p);
            push_col(p, {1, 1, 1, h}, 2);
        } else if (m8 == 7) {
            M.has_difficult = true;
            int eq = leg((i64)q1, p);
            push_col(p, {-1, 1, eq, 0}, 2);
            push_col(p, {-1, -1, eq, 0}, 2);
        } else {
            M.has_L_prime = true;
            int v = scholz_pair(2, p).at_R;
            push_col(p, {1, v, leg((i64)q1, p), 0}, 4);
        }
    }
    return M;
}

inline int gf2_rank(const SymbolMatrix& M) {
    std::vector<std::vector<int>> rows;
    for (auto& r : M.entries) {
        std::vector<int> bits;
        for (int v : r) bits.push_back(v == -1 ? 1 : 0);
        rows.push_back(bits);
    }
    int rank = 0;
    size_t ncols = M.col_prime.size();
    for (size_t c = 0; c < ncols && rank < (int)rows.size(); ++c) {
        int piv = -1;
        for (int r = rank; r < (int)rows.size(); ++r)
            if (rows[r][c]) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(rows[piv], rows[rank]);
        for (int r = 0; r < (int)rows.size(); ++r)
            if (r != rank && rows[r][c])
                for (size_t k = 0; k < ncols; ++k) rows[r][k] ^= rows[rank][k];
        ++rank;
    }
    return rank;
}

enum class RankMethod { DirectSymbols, IndirectH2, Table };

struct RankResult {
    int t = 0;
    int e = -1;           // -1 when not computed (table method)
    int rank_lo = 0;
    int rank_hi = 0;
    RankMethod method = RankMethod::DirectSymbols;
    bool exact() const { return rank_lo == rank_hi; }
};

struct UnsupportedShape : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// e from the unit-norm index: GF(2) rank of the symbol matrix when all
/// entries are direct; for a single hard prime the auxiliary-field route
/// (h2(2qr) = 2 iff q == 3 (mod 8), and its q1-analogue) decides e in {2,3}.
inline std::optional<std::pair<int, RankMethod>> e_index(const RelQuadExt& e,
                                                         const SymbolMatrix& M) {
    if (M.has_L_prime) throw UnsupportedShape("L-type prime at level 1");
    if (!M.has_difficult) return std::make_pair(gf2_rank(M), RankMethod::DirectSymbols);
    if (e.m_primes.size() == 1) {
        u64 p = e.m_primes[0];
        u64 aux = 2 * (e.base == BaseKind::A1 ? e.q : e.q1) * p;
        int v2 = h2_wide(aux).m;
        if (v2 < 1) throw std::logic_error("e_index: auxiliary h2(2qr) is odd");
        return std::make_pair(v2 == 1 ? 3 : 2, RankMethod::IndirectH2);
    }
    return std::nullopt;  // multi-prime with a hard prime: table route
}

/// Per-generator symbol at one ramified prime; "indirect" (nullopt) in the
/// documented hard case.
inline std::optional<int> norm_residue_symbol(const RelQuadExt& e, const std::string& unit_label,
                                              u64 p) {
    SymbolMatrix M = symbol_matrix(e);
    for (size_t r = 0; r < M.rows.size(); ++r) {
        if (M.rows[r] != unit_label) continue;
        for (size_t c = 0; c < M.col_prime.size(); ++c) {
            if (M.col_prime[c] != p) continue;
            if (M.entries[r][c] == 0) return std::nullopt;
            return M.entries[r][c];
        }
        throw std::invalid_argument("norm_residue_symbol: p is not ramified here");
    }
    throw std::invalid_argument("norm_residue_symbol: unknown unit generator");
}

// ---------------------------------------------------------------------------
// Encoded rank tables from the lemmas (cross-check for the formula, and the
// resolution route for multi-prime shapes containing a hard prime).
// ---------------------------------------------------------------------------

struct RankInterval {
    int lo, hi;
    bool exact() const { return lo == hi; }
};

namespace tables {

struct PrimeData {
    int m8;    // p mod 8
    int sym;   // Legendre symbol of the base radicand at p
    int sq1;   // (q1/p), form C only
    int sm1;   // (-1/p)
};

inline bool pair_is(int a, int b, int x, int y) { return (a == x && b == y) || (a == y && b == x); }

/// Level 0, forms A and B (identical structure; B reads symbols for 2q).
/// Form B's both-split rank-1 condition follows form A's list; see ledger.
inline std::optional<RankInterval> level0_AB(int /*q8*/, std::vector<PrimeData> ps) {
    int n = (int)ps.size();
    int t = 0;
    for (auto& p : ps) t += p.sym == 1 ? 2 : 1;
    if (n == 1) {
        bool one = ps[0].sym == 1 && ps[0].m8 == 1;
        return RankInterval{one ? 1 : 0, one ? 1 : 0};
    }
    if (n == 2) {
        auto &r = ps[0], &s = ps[1];
        if (r.sym == 1 && s.sym == 1 && r.m8 == 1 && s.m8 == 1) return RankInterval{3, 3};
        bool rank1 = false;
        if (r.sym == -1 && s.sym == -1) rank1 = true;  // C1
        for (auto& [a, b] : {std::pair{r, s}, std::pair{s, r}}) {
            if (a.sym == -1 && b.sym == 1 && b.m8 != 1) rank1 = true;  // C2
        }
        if (r.sym == 1 && s.sym == 1 &&
            (pair_is(r.m8, s.m8, 7, 3) || pair_is(r.m8, s.m8, 7, 5) || pair_is(r.m8, s.m8, 3, 5)))
            rank1 = true;  // C3
        return RankInterval{rank1 ? 1 : 2, rank1 ? 1 : 2};
    }
    if (n == 3) {
        int plus = 0;
        for (auto& p : ps) plus += p.sym == 1;
        bool rank2 = false;
        if (plus == 0) rank2 = true;  // C3
        if (plus == 1) {              // C2
            for (auto& p : ps)
                if (p.sym == 1 && p.m8 != 1) rank2 = true;
        }
        if (plus == 2) {  // C1
            std::vector<int> cls;
            for (auto& p : ps)
                if (p.sym == 1) cls.push_back(p.m8);
            if (pair_is(cls[0], cls[1], 3, 5) || pair_is(cls[0], cls[1], 3, 7)) rank2 = true;
        }
        if (rank2) return RankInterval{2, 2};
        return RankInterval{3, t - 1};
    }
    return RankInterval{3, t - 1};
}

/// Level 0, form C.
inline std::optional<RankInterval> level0_C(std::vector<PrimeData> ps) {
    int n = (int)ps.size();
    int t = 0;
    for (auto& p : ps) t += p.sym == 1 ? 2 : 1;
    auto triv = [](const PrimeData& p) { return p.sm1 == 1 && p.sq1 == 1; };  // zero column
    if (n == 1) {
        bool one = ps[0].sym == 1 && triv(ps[0]);
        return RankInterval{one ? 1 : 0, one ? 1 : 0};
    }
    if (n == 2) {
        auto &r = ps[0], &s = ps[1];
        if (r.sym == 1 && s.sym == 1 && triv(r) && triv(s)) return RankInterval{3, 3};
        bool rank1 = false;
        if (r.sym == -1 && s.sym == -1) rank1 = true;
        for (auto& [a, b] : {std::pair{r, s}, std::pair{s, r}})
            if (a.sym == -1 && b.sym == 1 && !triv(b)) rank1 = true;
        if (r.sym == 1 && s.sym == 1) {
            bool i1 = r.sq1 == -1 || s.sq1 == -1;
            bool i2 = r.sm1 == -1 || s.sm1 == -1;
            bool i3 = r.sq1 * r.sm1 == -1 || s.sq1 * s.sm1 == -1;
            if (i1 && i2 && i3) rank1 = true;
        }
        return RankInterval{rank1 ? 1 : 2, rank1 ? 1 : 2};
    }
    if (n == 3) {
        int plus = 0;
        for (auto& p : ps) plus += p.sym == 1;
        bool rank2 = false;
        if (plus == 0) rank2 = true;
        if (plus == 1)
            for (auto& p : ps)
                if (p.sym == 1 && !triv(p)) rank2 = true;
        if (rank2) return RankInterval{2, 2};
        return RankInterval{3, t - 1};
    }
    return RankInterval{3, t - 1};
}

/// Level 1, base Q(sqrt2, sqrt q), single prime.
inline RankInterval level1_A_single(int q8, const PrimeData& p) {
    bool zero = (p.m8 == 3 || p.m8 == 5) || (p.m8 == 7 && q8 == 3);
    return {zero ? 0 : 1, zero ? 0 : 1};
}

/// Level 1, base Q(sqrt2, sqrt q), two primes. Values from the two-prime
/// rank lemma; the only unresolved cell is both-split (7,7), reported {3,4}.
inline std::optional<RankInterval> level1_A_pair(int q8, PrimeData r, PrimeData s) {
    auto R = [](int v) { return RankInterval{v, v}; };
    if (r.sym == -1 && s.sym == -1) {
        if (pair_is(r.m8, s.m8, 5, 3)) return R(1);
        if ((pair_is(r.m8, s.m8, 3, 7) || pair_is(r.m8, s.m8, 5, 7))) return R(q8 == 3 ? 1 : 2);
        if (r.m8 == 3 && s.m8 == 3) return R(2);
        if (r.m8 == 5 && s.m8 == 5) return R(2);
        if (pair_is(r.m8, s.m8, 3, 1) || pair_is(r.m8, s.m8, 5, 1)) return R(2);
        if (r.m8 == 7 && s.m8 == 7) return R(q8 == 3 ? 2 : 3);
        if (pair_is(r.m8, s.m8, 7, 1)) return R(q8 == 3 ? 2 : 3);
        if (r.m8 == 1 && s.m8 == 1) return R(3);
        return std::nullopt;
    }
    if (r.sym * s.sym == -1) {
        if (r.sym == 1) std::swap(r, s);  // convention: r carries (q/r) = -1
        int a = r.m8, b = s.m8;           // s == 1 (mod 8) would be the L shape
        if (a == 5 && (b == 5 || b == 3)) return R(1);
        if (a == 3 && b == 3) return R(q8 == 7 ? 1 : 2);
        if (a == 3 && b == 5) return R(1);
        if (a == 7 && (b == 3 || b == 5)) return R(q8 == 3 ? 1 : 2);
        if ((a == 3 || a == 5) && b == 7) return R(q8 == 3 ? 1 : 2);
        if (a == 7 && b == 7) return R(q8 == 3 ? 2 : 3);
        if (a == 1 && b == 7) return R(q8 == 3 ? 2 : 3);
        if (a == 1 && (b == 3 || b == 5)) return R(2);
        return std::nullopt;
    }
    // both split
    if (pair_is(r.m8, s.m8, 7, 3) || pair_is(r.m8, s.m8, 7, 5)) return R(q8 == 3 ? 1 : 2);
    if (pair_is(r.m8, s.m8, 3, 5)) return R(1);
    if ((r.m8 == 3 && s.m8 == 3) || (r.m8 == 5 && s.m8 == 5)) return R(2);
    if (r.m8 == 7 && s.m8 == 7) return RankInterval{3, 4};
    return std::nullopt;
}

/// Level 1, base Q(sqrt2, sqrt q), three primes (the three-prime lemma).
inline std::optional<RankInterval> level1_A_triple(int q8, std::vector<PrimeData> ps) {
    auto R = [](int v) { return RankInterval{v, v}; };
    std::vector<int> plus_cls, minus_cls;
    for (auto& p : ps) (p.sym == 1 ? plus_cls : minus_cls).push_back(p.m8);
    std::sort(plus_cls.begin(), plus_cls.end());
    std::sort(minus_cls.begin(), minus_cls.end());
    if (plus_cls.size() == 2) {
        int tcl = minus_cls[0];
        if (plus_cls == std::vector<int>{3, 5}) {  // item 1
            bool two = tcl == 5 || (tcl == 3 && q8 == 7) || (tcl == 7 && q8 == 3);
            return R(two ? 2 : 3);
        }
        if (plus_cls == std::vector<int>{3, 7}) {  // item 2
            bool four = (tcl == 1 || tcl == 7) && q8 == 7;
            return R(four ? 4 : 3);
        }
        return std::nullopt;
    }
    if (plus_cls.size() == 1) {
        int a = minus_cls[0], b = minus_cls[1];
        if (plus_cls[0] == 7) {  // item 3
            if ((a == 1 && b == 1 && q8 == 7) || (a == 7 && b == 7 && q8 == 7)) return R(5);
            if (q8 == 3 && (pair_is(a, b, 3, 3) || pair_is(a, b, 5, 5) || pair_is(a, b, 3, 5) ||
                            pair_is(a, b, 7, 5) || pair_is(a, b, 1, 5) || pair_is(a, b, 7, 3) ||
                            pair_is(a, b, 1, 3)))
                return R(3);
            return R(4);
        }
        if (plus_cls[0] == 5) {  // item 4
            if (pair_is(a, b, 3, 5) || (pair_is(a, b, 7, 3) && q8 == 3)) return R(2);
            if (pair_is(a, b, 1, 1) || (pair_is(a, b, 7, 1) && q8 == 7) ||
                (pair_is(a, b, 7, 7) && q8 == 7))
                return R(4);
            return R(3);
        }
        if (plus_cls[0] == 3) {  // item 5
            if ((pair_is(a, b, 3, 5) && q8 == 7) || (pair_is(a, b, 5, 7) && q8 == 3)) return R(2);
            if (pair_is(a, b, 1, 1) || (pair_is(a, b, 7, 7) && q8 == 7) ||
                (pair_is(a, b, 7, 1) && q8 == 7) || (pair_is(a, b, 3, 3) && q8 == 3))
                return R(4);
            return R(3);
        }
        return std::nullopt;
    }
    if (plus_cls.empty()) {  // item 6
        if (minus_cls == std::vector<int>{3, 5, 7} && q8 == 3) return R(2);
        return RankInterval{3, 5};
    }
    return std::nullopt;
}

/// Level 1, base Q(sqrt2, sqrt q1q2), single prime.
inline RankInterval level1_C_single(int q18, const PrimeData& p) {
    bool zero = p.m8 == 3 || (p.m8 == 5 && q18 == 7 && p.sq1 == -1) ||
                (p.m8 == 5 && q18 == 3 && p.sym == -1) || (p.m8 == 7 && q18 == 3);
    return {zero ? 0 : 1, zero ? 0 : 1};
}

/// Level 1, base Q(sqrt2, sqrt q1q2), two primes.
inline std::optional<RankInterval> level1_C_pair(int q18, PrimeData r, PrimeData s) {
    auto R = [](int v) { return RankInterval{v, v}; };
    auto ordered = [&](auto&& fn) -> std::optional<RankInterval> {
        if (auto v = fn(r, s)) return v;
        if (auto v = fn(s, r)) return v;
        return std::nullopt;
    };
    if (r.sym == -1 && s.sym == -1) {
        return ordered([&](PrimeData a, PrimeData b) -> std::optional<RankInterval> {
            if (a.m8 == 5 && b.m8 == 3)
                return R(q18 == 3 || (q18 == 7 && a.sq1 == -1) ? 1 : 2);
            if (a.m8 == 3 && b.m8 == 3) return R(q18 == 7 && a.sq1 != b.sq1 ? 1 : 2);
            if (a.m8 == 3 && b.m8 == 7) return R(q18 == 3 ? 1 : 2);
            if (a.m8 == 5 && b.m8 == 5)
                return R(q18 == 3 || (q18 == 7 && (a.sq1 == -1 || b.sq1 == -1)) ? 2 : 3);
            if (a.m8 == 5 && b.m8 == 7) return R(q18 == 3 || (q18 == 7 && a.sq1 == -1) ? 2 : 3);
            if (a.m8 == 5 && b.m8 == 1) return R(q18 == 3 || (q18 == 7 && a.sq1 == -1) ? 2 : 3);
            if (a.m8 == 3 && b.m8 == 1) return R(2);
            if (a.m8 == 7 && (b.m8 == 7 || b.m8 == 1)) return R(q18 == 3 ? 2 : 3);
            if (a.m8 == 1 && b.m8 == 1) return R(3);
            return std::nullopt;
        });
    }
    if (r.sym * s.sym == -1) {
        if (r.sym == 1) std::swap(r, s);  // r carries (q1q2/r) = -1
        int a = r.m8, b = s.m8;
        if ((a == 7 || a == 1) && b == 7) return R(q18 == 3 ? 2 : 3);
        if (a == 5 && b == 5) return R(q18 == 3 || (q18 == 7 && (r.sq1 == -1 || s.sq1 == -1)) ? 2 : 3);
        if (a == 3 && b == 3) return R(q18 == 7 && r.sq1 != s.sq1 ? 1 : 2);
        if (a == 3 && b == 5) return R(q18 == 7 && s.sq1 == -1 ? 1 : 2);
        if (a == 5 && b == 3) return R(q18 == 3 || (q18 == 7 && r.sq1 == -1) ? 1 : 2);
        if (a == 1 && b == 5) return R(q18 == 7 && s.sq1 == -1 ? 2 : 3);
        if (a == 1 && b == 3) return R(2);
        return std::nullopt;  // (7, 3or5): outside the lemma's lists
    }
    // both split over q1q2
    return ordered([&](PrimeData a, PrimeData b) -> std::optional<RankInterval> {
        if (a.m8 == 7 && b.m8 == 5) return R(q18 == 3 || (q18 == 7 && b.sq1 == -1) ? 2 : 3);
        if (a.m8 == 7 && b.m8 == 3) return R(q18 == 3 || (q18 == 7 && a.sq1 != b.sq1) ? 2 : 3);
        if (a.m8 == 3 && b.m8 == 3) return R(q18 == 7 && a.sq1 != b.sq1 ? 1 : 2);
        if (a.m8 == 5 && b.m8 == 5) return R(q18 == 7 && (a.sq1 == -1 || b.sq1 == -1) ? 2 : 3);
        if (a.m8 == 5 && b.m8 == 3) return R(q18 == 7 && a.sq1 == -1 ? 1 : 2);
        if (a.m8 == 7 && b.m8 == 7) return RankInterval{3, 6};
        return std::nullopt;
    });
}

}  // namespace tables

/// The lemma-table value for the extension, when the shape is covered.
inline std::optional<RankInterval> lemma_table(const RelQuadExt& e) {
    std::vector<tables::PrimeData> ps;
    u64 f = e.base == BaseKind::A1 ? e.q : e.base_sym_modulus();
    if (e.base == BaseKind::C0 || e.base == BaseKind::C1) f = e.q1 * e.q2;
    for (u64 p : e.m_primes) {
        tables::PrimeData d;
        d.m8 = (int)(p % 8);
        d.sym = leg((i64)f, p);
        d.sq1 = (e.q1 != 0) ? leg((i64)e.q1, p) : 0;
        d.sm1 = leg(-1, p);
        ps.push_back(d);
    }
    int q8 = (int)((e.base == BaseKind::C0 || e.base == BaseKind::C1 ? e.q1 : e.q) % 8);
    switch (e.base) {
        case BaseKind::A0: return tables::level0_AB(q8, ps);
        case BaseKind::B0: return tables::level0_AB(q8, ps);
        case BaseKind::C0: return tables::level0_C(ps);
        case BaseKind::A1: {
            if (ps.size() == 1) return tables::level1_A_single(q8, ps[0]);
            if (ps.size() == 2) return tables::level1_A_pair(q8, ps[0], ps[1]);
            if (ps.size() == 3) return tables::level1_A_triple(q8, ps);
            return std::nullopt;
        }
        case BaseKind::C1: {
            if (ps.size() == 1) return tables::level1_C_single(q8, ps[0]);
            if (ps.size() == 2) return tables::level1_C_pair(q8, ps[0], ps[1]);
            if (ps.size() == 3) {
                int plus = 0;
                for (auto& d : ps) plus += d.sym == 1;
                if (plus == 0 || (plus == 1)) return RankInterval{3, 5};
                return std::nullopt;
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

/// Bounds on e from the rows that are fully computed (the sqrt rows at a hard
/// prime are dropped; each dropped row can raise e by at most one).
inline std::pair<int, int> e_bounds_partial(const SymbolMatrix& M) {
    SymbolMatrix known = M;
    known.entries.clear();
    known.rows.clear();
    int dropped = 0;
    for (size_t r = 0; r < M.rows.size(); ++r) {
        bool full = true;
        for (int v : M.entries[r])
            if (v == 0) full = false;
        if (full) {
            known.rows.push_back(M.rows[r]);
            known.entries.push_back(M.entries[r]);
        } else {
            ++dropped;
        }
    }
    int lo = gf2_rank(known);
    return {lo, std::min<int>((int)M.rows.size(), lo + dropped)};
}

/// rg(A(K)) = t - 1 - e. When a lemma table covers the shape the two routes
/// are compared and a mismatch is a hard error. Multi-prime shapes containing
/// a hard prime get the table value intersected with partial-matrix bounds.
inline RankResult rank_A(const RelQuadExt& ext) {
    SymbolMatrix M = symbol_matrix(ext);
    int t = (int)M.col_prime.size();
    if (t != ramified_count(ext)) throw std::logic_error("rank_A: t mismatch");
    auto tab = lemma_table(ext);
    RankResult r;
    r.t = t;
    if (M.has_L_prime) {
        // outside the catalog (the excluded L shape); only a table bound may exist
        if (!tab) throw UnsupportedShape("rank_A: L-type prime at level 1");
        r.method = RankMethod::Table;
        r.rank_lo = tab->lo;
        r.rank_hi = tab->hi;
        return r;
    }
    auto ev = e_index(ext, M);
    if (ev) {
        r.e = ev->first;
        r.method = ev->second;
        int rank = t - 1 - r.e;
        if (rank < 0) throw std::logic_error("rank_A: negative rank");
        r.rank_lo = r.rank_hi = rank;
        if (tab && (rank < tab->lo || rank > tab->hi))
            throw std::logic_error("rank_A: formula disagrees with the lemma table (base " +
                                   std::to_string(ext.base_sym_modulus()) + ")");
        return r;
    }
    auto [elo, ehi] = e_bounds_partial(M);
    int lo = std::max(0, t - 1 - ehi), hi = t - 1 - elo;
    if (tab) {
        lo = std::max(lo, tab->lo);
        hi = std::min(hi, tab->hi);
        if (lo > hi) throw std::logic_error("rank_A: table and partial bounds are disjoint");
        r.method = RankMethod::Table;
    } else {
        r.method = RankMethod::DirectSymbols;
    }
    r.rank_lo = lo;
    r.rank_hi = hi;
    return r;
}

}  // namespace biq2

#endif
