#ifndef BIQ2_MULTIQUAD_HPP
#define BIQ2_MULTIQUAD_HPP

#include <bit>
#include <optional>
#include <string>
#include <vector>

#include "biq2/classify.hpp"
#include "biq2/fields.hpp"
#include "biq2/formclass.hpp"
#include "biq2/quadunits.hpp"

namespace biq2 {

/// Kuroda data for one multiquadratic field (degree 4 or 8).
struct KurodaInput {
    std::vector<u64> gens;           // radicand generators (2 or 3)
    std::vector<u64> subfields;      // 3 or 7 quadratic subfield radicands
    int v = 0;                       // 2 for degree 4, 9 for degree 8 (real fields)
    int log2_q = 0;                  // unit index q(k) = 2^log2_q
    std::vector<int> h2_exponents;   // v2(h2) per subfield
};

/// [E_k : <-1, units>] as a power of two, by iterated exact square-root
/// closure inside the field spanned by field_gens. Returns the exponent.
inline int unit_index_2part(const std::vector<u64>& field_gens, std::vector<MqElem> units) {
    int found = 0;
    bool progress = true;
    while (progress) {
        progress = false;
        size_t k = units.size();
        for (size_t mask = 1; mask < (size_t(1) << k) && !progress; ++mask) {
            MqElem u = MqElem::rational(1);
            for (size_t i = 0; i < k; ++i)
                if (mask & (size_t(1) << i)) u = u * units[i];
            for (int sgn : {1, -1}) {
                auto sq = sqrt_in_span(sgn == 1 ? u : u * mpq_class(-1), field_gens);
                if (!sq) continue;
                size_t i0 = 0;
                while (!(mask & (size_t(1) << i0))) ++i0;
                units[i0] = *sq;
                ++found;
                progress = true;
                break;
            }
        }
    }
    return found;
}

/// q(k) = [E_k : prod E_{k_i}] over the quadratic subfields, as a power of 2.
/// Degree 4 runs the generic closure; degree 8 only on request (oracle) or via
/// the cataloged triquadratic shape.
inline u64 wada_q_index_generic(const std::vector<u64>& gens) {
    auto subs = subfield_radicands(gens);
    if (subs.size() != 3 && subs.size() != 7)
        throw std::invalid_argument("wada_q_index: need a degree 4 or 8 field");
    std::vector<MqElem> units;
    for (u64 m : subs) units.push_back(fundamental_unit(m).as_elem());
    return u64(1) << unit_index_2part(gens, units);
}

/// The triquadratic catalog shape Q(sqrt2, sqrt qr, sqrt s):
/// under q == r == 3 (mod 8), s == 7 (mod 8), (q/r) = (q/s) = -1, (s/r) = +1
/// and s(a-1) not a square, q = 2^5.
struct TriquadShape {
    u64 q = 0, r = 0, s = 0;
    bool hypotheses_hold = false;
    std::string failed;
};

inline TriquadShape check_triquad_hypotheses(u64 q, u64 r, u64 s) {
    TriquadShape t{q, r, s, false, ""};
    auto fail = [&](const std::string& why) {
        t.failed = why;
        return t;
    };
    if (!(is_prime(q) && is_prime(r) && is_prime(s))) return fail("not primes");
    if (q % 8 != 3 || r % 8 != 3) return fail("q,r must be 3 mod 8");
    if (s % 8 != 7) return fail("s must be 7 mod 8");
    if (jacobi((i64)q, (i64)r) != -1) return fail("(q/r) != -1");
    if (jacobi((i64)q, (i64)s) != -1) return fail("(q/s) != -1");
    if (jacobi((i64)s, (i64)r) != 1) return fail("(s/r) != +1");
    auto prof = unit_sqrt_profile(UnitShape::QRS, {q, r, s});
    if (prof.pattern == std::to_string(s) + "(a-1)") return fail("s(a-1) is a square");
    t.hypotheses_hold = true;
    return t;
}

inline u64 wada_q_index(const std::vector<u64>& gens) {
    auto subs = subfield_radicands(gens);
    if (subs.size() == 3) return wada_q_index_generic(gens);
    if (subs.size() == 7) {
        // try the catalog: {2, s, 2s, qr, 2qr, qrs, 2qrs}
        std::vector<u64> odd_primes;
        bool has2 = false;
        for (u64 m : subs) {
            if (m == 2) has2 = true;
            if (m % 2 == 1 && is_prime(m)) odd_primes.push_back(m);
        }
        if (has2 && odd_primes.size() == 1) {
            u64 s = odd_primes[0];
            for (u64 m : subs) {
                if (m % 2 == 0 || m == s || m % s == 0) continue;
                auto f = factor_squarefree(m);
                if (f.size() != 2) continue;
                for (int swap = 0; swap < 2; ++swap) {
                    u64 q = swap ? f[1] : f[0], r = swap ? f[0] : f[1];
                    auto chk = check_triquad_hypotheses(q, r, s);
                    if (chk.hypotheses_hold) return 32;
                }
            }
        }
        return wada_q_index_generic(gens);
    }
    throw std::invalid_argument("wada_q_index: need a degree 4 or 8 field");
}

/// v2 of the 2-class number by Kuroda's formula; throws when the formula does
/// not produce a nonnegative integral exponent (a q-index defect).
inline int kuroda_h2_exponent(const std::vector<u64>& gens, std::optional<int> log2_q = {}) {
    auto subs = subfield_radicands(gens);
    int v;
    if (subs.size() == 3) v = 2;
    else if (subs.size() == 7) v = 9;
    else throw std::invalid_argument("kuroda_h2: need degree 4 or 8");
    KurodaInput in;
    in.gens = gens;
    in.subfields = subs;
    in.v = v;
    in.log2_q = log2_q ? *log2_q : (int)std::countr_zero(wada_q_index(gens));
    int total = in.log2_q - v;
    std::string diag;
    for (u64 m : subs) {
        int e = h2_wide(m).m;
        in.h2_exponents.push_back(e);
        total += e;
        diag += " h2(" + std::to_string(m) + ")=2^" + std::to_string(e);
    }
    if (total < 0)
        throw std::logic_error("kuroda_h2: negative exponent (q=2^" +
                               std::to_string(in.log2_q) + "," + diag + ")");
    return total;
}

inline mpz_class kuroda_h2(const std::vector<u64>& gens, std::optional<int> log2_q = {}) {
    mpz_class r = 1;
    r <<= kuroda_h2_exponent(gens, log2_q);
    return r;
}

struct IwasawaInvariants {
    int lambda = 0;
    int mu = 0;
    i64 nu = 0;
};

/// h_ell(k_n) = ell^(lambda n + mu ell^n + nu).
inline mpz_class iwasawa_hn(const IwasawaInvariants& inv, u64 ell, u64 n) {
    mpz_class en = inv.lambda * mpz_class((unsigned long)n) + inv.nu;
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), ell, n);
    en += inv.mu * p;
    if (en < 0) throw std::invalid_argument("iwasawa_hn: negative exponent");
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), mpz_class((unsigned long)ell).get_mpz_t(), en.get_ui());
    return r;
}

enum class GroupKind { Trivial, Cyclic, TwoByCyclic };

struct StructureResult {
    GroupKind kind = GroupKind::Trivial;
    int exponent = 0;  // |group| = 2^exponent (TwoByCyclic: Z/2 x Z/2^(exponent-1))
    int m = 0;         // h2(qrs) = 2^m where applicable
    IwasawaInvariants invariants;

    std::string describe() const {
        switch (kind) {
            case GroupKind::Trivial: return "0";
            case GroupKind::Cyclic: return "Z/" + std::to_string(1u << exponent);
            default:
                return "Z/2 x Z/" + std::to_string(1u << (exponent - 1));
        }
    }
};

struct StructureFamily {
    std::string name;  // "trivial", "z2", "cyclic_2m1", "two_by_2m2"
    u64 q = 0, r = 0, s = 0;
};

/// Structure of A(K_infty) for the cataloged families; nullopt with the failed
/// hypothesis named otherwise.
inline std::optional<StructureResult> iwasawa_structure(const BiquadField& K,
                                                        std::string* why = nullptr,
                                                        StructureFamily* fam = nullptr) {
    auto pres = abc_presentations(K);
    auto note = [&](const std::string& s) {
        if (why) *why = s;
        return std::nullopt;
    };

    for (auto& m : pres) {
        if (m.tag != QOForm::A || m.m_primes.size() != 2 || m.delta != 1) continue;
        u64 q = m.q;
        for (int sw = 0; sw < 2; ++sw) {
            u64 r = m.m_primes[sw], s = m.m_primes[1 - sw];
            // family: cyclic of order 2^(m-1)
            if (q % 8 == 3 && r % 8 == 3 && s % 8 == 7 && jacobi((i64)q, (i64)r) == -1 &&
                jacobi((i64)q, (i64)s) == -1 && jacobi((i64)s, (i64)r) == 1) {
                auto prof = unit_sqrt_profile(UnitShape::QRS, {q, r, s});
                if (prof.pattern == std::to_string(s) + "(a-1)")
                    return note("s(a-1) is a square");
                int me = h2_wide(q * r * s).m;
                StructureResult out;
                out.kind = me >= 2 ? GroupKind::Cyclic : GroupKind::Trivial;
                out.exponent = me >= 2 ? me - 1 : 0;
                out.m = me;
                out.invariants = {0, 0, me - 1};
                if (fam) *fam = {"cyclic_2m1", q, r, s};
                return out;
            }
            // family: Z/2 x Z/2^(m-2)
            if (q % 8 == 7 && r % 8 == 3 && s % 8 == 3 && jacobi((i64)q, (i64)r) == 1 &&
                jacobi((i64)q, (i64)s) == 1) {
                auto prof = unit_sqrt_profile(UnitShape::QRS, {q, r, s});
                if (prof.pattern == "2*" + std::to_string(q) + "(a-1)")
                    return note("q(a-1) is a square");
                int me = h2_wide(q * r * s).m;
                if (me < 3) return note("h2(qrs) too small for the family");
                StructureResult out;
                out.kind = GroupKind::TwoByCyclic;
                out.exponent = me - 1;  // order 2^(m-1): Z/2 x Z/2^(m-2)
                out.m = me;
                out.invariants = {0, 0, me - 1};
                if (fam) *fam = {"two_by_2m2", q, r, s};
                return out;
            }
        }
        // family: A(K_infty) = Z/2 for q,r,s == 3 (mod 4)
        u64 q8 = q % 8;
        for (int sw = 0; sw < 2; ++sw) {
            u64 r = m.m_primes[sw], s = m.m_primes[1 - sw];
            if (q % 4 != 3 || r % 4 != 3 || s % 4 != 3) continue;
            int qr = jacobi((i64)q, (i64)r), qs = jacobi((i64)q, (i64)s);
            int sr = jacobi((i64)s, (i64)r);
            bool hit = false;
            if (r % 8 == 3 && q8 == 3 && s % 8 == 7 && qs == -1 && qr == -1 && sr == -1) hit = true;
            if (r % 8 == 3 && s % 8 == 3 && q8 == 7 && qr == -1 && qs == 1) hit = true;
            if (s % 8 == 3 && q8 == 3 && r % 8 == 7 && qr == -1 && qs == 1 && jacobi((i64)r, (i64)s) == -1)
                hit = true;
            if (r % 8 == 3 && q8 == 3 && s % 8 == 7 && qr == -1 && qs == 1 && jacobi((i64)r, (i64)s) == -1)
                hit = true;
            if (s % 8 == 3 && q8 == 3 && r % 8 == 7 && qs == 1 && qr == 1 && jacobi((i64)r, (i64)s) == 1)
                hit = true;
            if (hit) {
                StructureResult out;
                out.kind = GroupKind::Cyclic;
                out.exponent = 1;
                out.invariants = {0, 0, 1};
                if (fam) *fam = {"z2", q, r, s};
                return out;
            }
        }
    }
    // trivial family: any rank-0 theorem item
    try {
        auto cp = main_theorem_case(K);
        if (cp && cp->predicted_rank_infty == 0) {
            StructureResult out;
            out.kind = GroupKind::Trivial;
            out.invariants = {0, 0, 0};
            if (fam) *fam = {"trivial", 0, 0, 0};
            return out;
        }
    } catch (const std::exception&) {
    }
    return note("no structure family applies");
}

/// A(L_infty) for L = Q(sqrt qrs) under the second family's hypotheses:
/// Z/2 x Z/2^(m-1), nu = m.
inline std::optional<StructureResult> iwasawa_structure_qrs(u64 q, u64 r, u64 s,
                                                            std::string* why = nullptr) {
    auto note = [&](const std::string& msg) {
        if (why) *why = msg;
        return std::nullopt;
    };
    if (!(q % 8 == 7 && r % 8 == 3 && s % 8 == 3)) return note("congruences fail");
    if (jacobi((i64)q, (i64)r) != 1 || jacobi((i64)q, (i64)s) != 1) return note("symbols fail");
    auto prof = unit_sqrt_profile(UnitShape::QRS, {q, r, s});
    if (prof.pattern == "2*" + std::to_string(q) + "(a-1)") return note("q(a-1) is a square");
    int me = h2_wide(q * r * s).m;
    if (me < 2) return note("h2(qrs) too small");
    StructureResult out;
    out.kind = GroupKind::TwoByCyclic;
    out.exponent = me;  // order 2^m: Z/2 x Z/2^(m-1)
    out.m = me;
    out.invariants = {0, 0, me};
    return out;
}

/// h2(K) = h2(K_1)? Under the cyclic-family hypotheses h2(K_1) comes from the
/// triquadratic identity; otherwise the generic octic unit index is used.
inline bool fukuda_h2_stable(const BiquadField& K) {
    auto pres = abc_presentations(K);
    if (pres.empty()) throw UnsupportedShape("fukuda_h2_stable: unsupported field");
    int h2K = kuroda_h2_exponent({K.d1, K.d2});
    for (auto& m : pres) {
        if (m.tag != QOForm::A || m.m_primes.size() != 2 || m.delta != 1) continue;
        for (int sw = 0; sw < 2; ++sw) {
            u64 r = m.m_primes[sw], s = m.m_primes[1 - sw];
            auto chk = check_triquad_hypotheses(m.q, r, s);
            if (chk.hypotheses_hold) {
                int h2K1 = h2_wide(m.q * r * s).m - 1;  // triquadratic identity chain
                return h2K == h2K1;
            }
        }
    }
    int h2K1 = kuroda_h2_exponent({2, K.d1, K.d2});
    return h2K == h2K1;
}

}  // namespace biq2

#endif
