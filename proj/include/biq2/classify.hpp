#ifndef BIQ2_CLASSIFY_HPP
#define BIQ2_CLASSIFY_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "biq2/arith.hpp"
#include "biq2/genus2rank.hpp"

namespace biq2 {

/// Real biquadratic field Q(sqrt d1, sqrt d2), canonicalized to its three
/// quadratic subfield radicands.
struct BiquadField {
    u64 d1 = 0, d2 = 0;
    std::array<u64, 3> radicands{};  // sorted

    BiquadField(u64 a, u64 b) : d1(a), d2(b) {
        a = squarefree_part(a);
        b = squarefree_part(b);
        if (a == b || a <= 1 || b <= 1)
            throw std::invalid_argument("BiquadField: need distinct squarefree radicands > 1");
        radicands = {a, b, radicand_mul(a, b)};
        std::sort(radicands.begin(), radicands.end());
    }

    bool operator==(const BiquadField& o) const { return radicands == o.radicands; }
    bool operator<(const BiquadField& o) const { return radicands < o.radicands; }
};

/// h(d) odd per the quadratic parity list.
inline bool quad_odd(u64 d) { return quad_odd_list(d); }

/// h(K) odd per the biquadratic parity list (five radicand patterns).
inline bool biquad_odd(const BiquadField& K) {
    auto& R = K.radicands;
    std::array<std::vector<u64>, 3> F;
    for (int i = 0; i < 3; ++i) F[i] = factor_squarefree(R[i]);
    auto is_prime_rad = [&](int i) { return F[i].size() == 1; };
    auto cls = [&](int i, u64 mod) { return R[i] % mod; };

    // generator pair candidates: each unordered pair of radicands generates K
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            u64 A = R[i], B = R[j];
            auto &FA = F[i], &FB = F[j];
            // 1) Q(sqrt2, sqrt q) / Q(sqrt q1, sqrt q2)
            if (A == 2 && is_prime_rad(j) && B % 4 == 3) return true;
            if (is_prime_rad(i) && is_prime_rad(j) && A % 4 == 3 && B % 4 == 3) return true;
            // 2) Q(sqrt q, sqrt p) / Q(sqrt 2q, sqrt p), (p/q) = -1 or p == 5 (mod 8)
            if (is_prime_rad(j) && B % 4 == 1) {
                u64 p = B;
                bool two_q = (A % 2 == 0 && FA.size() == 2 && FA[1] % 4 == 3);
                bool plain_q = (is_prime_rad(i) && A % 4 == 3);
                if (plain_q || two_q) {
                    u64 q = plain_q ? A : FA[1];
                    if (jacobi((i64)p, (i64)q) == -1 || p % 8 == 5) return true;
                }
            }
            // 3) Q(sqrt2, sqrt q1q2), a q == 3 (mod 8)
            if (A == 2 && FB.size() == 2 && FB[0] % 4 == 3 && FB[1] % 4 == 3 &&
                (FB[0] % 8 == 3 || FB[1] % 8 == 3))
                return true;
            // 4) Q(sqrt p, sqrt q1q2), (q1/p) = -1 or (q2/p) = -1
            if (is_prime_rad(i) && A % 4 == 1 && FB.size() == 2 && FB[0] % 4 == 3 &&
                FB[1] % 4 == 3) {
                if (jacobi((i64)FB[0], (i64)A) == -1 || jacobi((i64)FB[1], (i64)A) == -1)
                    return true;
            }
            // 5) Q(sqrt p1, sqrt p2)
            if (is_prime_rad(i) && is_prime_rad(j) && cls(i, 4) == 1 && cls(j, 4) == 1) {
                if (jacobi((i64)A, (i64)B) == -1) return true;
                if (jacobi((i64)A, (i64)B) == 1 &&
                    quartic_residue((i64)A, B) != quartic_residue((i64)B, A))
                    return true;
            }
        }
    return false;
}

enum class QOForm { A, B, C, D, E, F, None };

inline const char* qo_form_name(QOForm f) {
    switch (f) {
        case QOForm::A: return "A";
        case QOForm::B: return "B";
        case QOForm::C: return "C";
        case QOForm::D: return "D";
        case QOForm::E: return "E";
        case QOForm::F: return "F";
        default: return "none";
    }
}

/// A matched catalog presentation of the field, with roles resolved.
struct FormMatch {
    QOForm tag = QOForm::None;
    u64 q = 0;            // A, B
    u64 q1 = 0, q2 = 0;   // C (and D/E roles where detected)
    u64 d = 0;            // the catalog's second radicand
    u64 delta = 1;        // gcd(d, base odd part)
    std::vector<u64> m_primes;  // primes of d / delta
};

/// All form-A/B/C presentations of K (the supported catalog entries).
inline std::vector<FormMatch> abc_presentations(const BiquadField& K) {
    std::vector<FormMatch> out;
    auto& R = K.radicands;
    int evens = 0;
    for (u64 r : R) evens += (r % 2 == 0);

    if (evens == 0) {
        for (int i = 0; i < 3; ++i) {
            auto Fi = factor_squarefree(R[i]);
            // form A: q prime == 3 (mod 4), d odd coprime to q
            if (Fi.size() == 1 && R[i] % 4 == 3) {
                for (int j = 0; j < 3; ++j) {
                    if (j == i || R[j] % R[i] == 0) continue;
                    FormMatch m;
                    m.tag = QOForm::A;
                    m.q = R[i];
                    m.d = R[j];
                    m.delta = 1;
                    m.m_primes = factor_squarefree(R[j]);
                    out.push_back(m);
                }
            }
            // form C: q1 q2, q2 == 3 (mod 8); d == 1 (mod 4), q1q2 does not divide d
            if (Fi.size() == 2 && Fi[0] % 4 == 3 && Fi[1] % 4 == 3 &&
                (Fi[0] % 8 == 3 || Fi[1] % 8 == 3)) {
                u64 qa = Fi[0], qb = Fi[1];
                u64 q2 = (qa % 8 == 3 && qb % 8 == 3) ? std::min(qa, qb)
                         : (qa % 8 == 3)              ? qa
                                                      : qb;
                u64 q1 = qa == q2 ? qb : qa;
                for (int j = 0; j < 3; ++j) {
                    if (j == i || R[j] % 4 != 1 || R[j] % R[i] == 0) continue;
                    u64 delta = std::gcd(R[j], R[i]);
                    FormMatch m;
                    m.tag = QOForm::C;
                    m.q1 = q1;
                    m.q2 = q2;
                    m.d = R[j];
                    m.delta = delta;
                    m.m_primes = factor_squarefree(R[j] / delta);
                    out.push_back(m);
                }
            }
        }
    } else if (evens == 2) {
        // form B: Q(sqrt 2q, sqrt d), d == 1 (mod 4)
        for (int i = 0; i < 3; ++i) {
            if (R[i] % 2) continue;
            u64 half = R[i] / 2;
            if (!is_prime(half) || half % 4 != 3) continue;
            for (int j = 0; j < 3; ++j) {
                if (R[j] % 2 == 0 || R[j] % 4 != 1) continue;
                u64 delta = std::gcd(R[j], half);
                FormMatch m;
                m.tag = QOForm::B;
                m.q = half;
                m.d = R[j];
                m.delta = delta;
                m.m_primes = factor_squarefree(R[j] / delta);
                out.push_back(m);
            }
        }
    }
    // dedupe identical role assignments
    std::sort(out.begin(), out.end(), [](const FormMatch& a, const FormMatch& b) {
        return std::tie(a.tag, a.q, a.q1, a.q2, a.d) < std::tie(b.tag, b.q, b.q1, b.q2, b.d);
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const FormMatch& a, const FormMatch& b) {
                              return std::tie(a.tag, a.q, a.q1, a.q2, a.d) ==
                                     std::tie(b.tag, b.q, b.q1, b.q2, b.d);
                          }),
              out.end());
    return out;
}

/// Catalog form of K (A/B/C supported; D/E/F recognized, unsupported downstream).
inline FormMatch qo_form(const BiquadField& K) {
    auto abc = abc_presentations(K);
    if (!abc.empty()) return abc.front();

    auto& R = K.radicands;
    int evens = 0;
    for (u64 r : R) evens += (r % 2 == 0);
    // D/E: Q(sqrt q1q2, sqrt d) or Q(sqrt q1q2, sqrt 2d), d == 3 (mod 4)
    for (int i = 0; i < 3; ++i) {
        if (R[i] % 2 == 0) continue;
        auto Fi = factor_squarefree(R[i]);
        if (Fi.size() != 2 || Fi[0] % 4 != 3 || Fi[1] % 4 != 3) continue;
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            u64 dj = R[j] % 2 == 0 ? R[j] / 2 : R[j];
            if (dj % 4 != 3 || dj % R[i] == 0) continue;
            bool has7 = Fi[0] % 8 == 7 || Fi[1] % 8 == 7;
            FormMatch m;
            m.tag = has7 ? QOForm::D : QOForm::E;
            m.q1 = std::max(Fi[0], Fi[1]);
            m.q2 = std::min(Fi[0], Fi[1]);
            if (has7) {
                m.q1 = Fi[0] % 8 == 7 ? Fi[0] : Fi[1];
                m.q2 = Fi[0] % 8 == 7 ? Fi[1] : Fi[0];
                if (m.q2 % 8 != 3) continue;  // form D needs q2 == 3 (mod 8)
            }
            m.d = R[j];
            return m;
        }
    }
    // F: Q(sqrt p, sqrt d), p == 1 (mod 4) prime
    for (int i = 0; i < 3; ++i) {
        if (R[i] % 2 == 0 || !is_prime(R[i]) || R[i] % 4 != 1) continue;
        u64 p = R[i];
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            u64 d = R[j];
            auto Fj = factor_squarefree(d);
            bool ok = false;
            if (Fj.size() == 2 && Fj[0] % 4 == 3 && Fj[1] % 4 == 3) {
                ok = jacobi((i64)Fj[0], (i64)p) == -1 || jacobi((i64)Fj[1], (i64)p) == -1 ||
                     Fj[0] % 8 == 3 || Fj[1] % 8 == 3;
            } else if (Fj.size() == 1 && d % 4 == 3) {
                ok = jacobi((i64)p, (i64)d) == -1 || p % 8 == 5;
            } else if (Fj.size() == 1 && d % 4 == 1 && d != p) {
                ok = jacobi((i64)p, (i64)d) == -1 ||
                     (jacobi((i64)p, (i64)d) == 1 &&
                      quartic_residue((i64)p, d) != quartic_residue((i64)d, p));
            }
            if (ok) {
                FormMatch m;
                m.tag = QOForm::F;
                m.q = p;
                m.d = d;
                return m;
            }
        }
    }
    return FormMatch{};
}

/// The excluded L shape: Q(sqrt delta0, sqrt r) or Q(sqrt delta0, sqrt rs),
/// delta0 in {q, q1q2}, r == 1 (mod 8), (delta0/r) = +1.
inline bool is_L_type(const BiquadField& K) {
    for (auto& m : abc_presentations(K)) {
        if (m.tag == QOForm::B) continue;
        u64 delta0 = m.tag == QOForm::A ? m.q : m.q1 * m.q2;
        if (m.delta != 1 || m.m_primes.size() > 2) continue;
        for (u64 r : m.m_primes)
            if (r % 8 == 1 && jacobi((i64)delta0, (i64)r) == 1) return true;
    }
    return false;
}

/// Level-1 obstruction of the same kind: a prime of the reduced radicand that
/// is == 1 (mod 8) and splits in the base. The rank lemmas exclude these.
inline bool has_L_prime(const FormMatch& m) {
    u64 mod = m.tag == QOForm::C ? m.q1 * m.q2 : m.q;
    for (u64 p : m.m_primes)
        if (p % 8 == 1 && jacobi((i64)mod, (i64)p) == 1) return true;
    return false;
}

inline RelQuadExt level0_ext(const FormMatch& m) {
    RelQuadExt e;
    e.base = m.tag == QOForm::A ? BaseKind::A0 : m.tag == QOForm::B ? BaseKind::B0 : BaseKind::C0;
    e.q = m.q;
    e.q1 = m.q1;
    e.q2 = m.q2;
    e.m_primes = m.m_primes;
    e.delta = m.delta;
    return e;
}

inline RelQuadExt level1_ext(const FormMatch& m) {
    RelQuadExt e;
    e.base = m.tag == QOForm::C ? BaseKind::C1 : BaseKind::A1;
    e.q = m.q;
    e.q1 = m.q1;
    e.q2 = m.q2;
    e.m_primes = m.m_primes;
    e.delta = m.delta;
    return e;
}

struct IwasawaTriple {
    int lambda = 0, mu = 0;
    i64 nu = 0;
};

struct CasePrediction {
    int case_id = 0;
    std::string condition_label;
    int predicted_rank_infty = 0;
    std::map<std::string, u64> roles;
    std::optional<IwasawaTriple> iwasawa;  // filled for the rank-0 items
};

struct LExcluded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace theorem {

/// Context handed to an item predicate: roles already assigned.
struct Ctx {
    int q8 = 0;                 // q mod 8 (forms A and B), q1 mod 8 for C
    int q14 = 0;                // q1 mod 4 (form C)
    std::vector<int> cl;        // r,s,t mod 8 in role order
    std::vector<int> sym;       // (q/p) or (q1q2/p) in role order
    std::vector<int> sq1;       // (q1/p) in role order (form C)
};

struct Item {
    int id;
    QOForm form;
    int nprimes;
    bool d_has_base_prime;  // B items with d = q r s ... (delta = q)
    int rank;
    std::vector<std::pair<std::string, bool (*)(const Ctx&)>> conds;
};

inline const std::vector<Item>& items() {
    using C = const Ctx&;
    static const std::vector<Item> v = {
        // ---- form A ----
        {1, QOForm::A, 1, false, 0, {
            {"C1", +[](C c) { return c.cl[0] == 3 || c.cl[0] == 5; }},
            {"C2", +[](C c) { return c.cl[0] == 7 && c.q8 == 3; }}}},
        {2, QOForm::A, 2, false, 1, {
            {"C1", +[](C c) { return c.sym[0] == -1 && c.sym[1] == -1 && c.cl[0] == 5 && c.cl[1] == 3; }},
            {"C2", +[](C c) { return c.sym[0] == -1 && c.sym[1] == -1 &&
                                     (c.cl[0] == 3 || c.cl[0] == 5) && c.cl[1] == 7 && c.q8 == 3; }}}},
        {3, QOForm::A, 2, false, 1, {
            {"C1", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 5 &&
                                     (c.cl[1] == 5 || c.cl[1] == 3); }},
            {"C2", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 3 &&
                                     c.cl[1] == 3 && c.q8 == 7; }},
            {"C3", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 3 && c.cl[1] == 5; }},
            {"C4", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 7 &&
                                     (c.cl[1] == 3 || c.cl[1] == 5) && c.q8 == 3; }},
            {"C5", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 &&
                                     (c.cl[0] == 3 || c.cl[0] == 5) && c.cl[1] == 7 && c.q8 == 3; }}}},
        {4, QOForm::A, 2, false, 1, {
            {"C1", +[](C c) { return c.sym[0] == 1 && c.sym[1] == 1 && c.cl[0] == 7 &&
                                     (c.cl[1] == 3 || c.cl[1] == 5) && c.q8 == 3; }},
            {"C2", +[](C c) { return c.sym[0] == 1 && c.sym[1] == 1 && c.cl[0] == 3 && c.cl[1] == 5; }}}},
        {5, QOForm::A, 2, false, 2, {
            {"C1", +[](C c) { return c.sym[0] == 1 && c.sym[1] == 1 &&
                                     ((c.cl[0] == 3 && c.cl[1] == 3) || (c.cl[0] == 5 && c.cl[1] == 5)); }}}},
        {6, QOForm::A, 3, false, 2, {
            {"C1", +[](C c) { return c.cl[0] == 3 && c.cl[1] == 5 && c.sym[0] == 1 && c.sym[1] == 1 &&
                                     c.sym[2] == -1 && c.cl[2] == 5; }},
            {"C2", +[](C c) { return c.cl[0] == 3 && c.cl[1] == 5 && c.sym[0] == 1 && c.sym[1] == 1 &&
                                     c.sym[2] == -1 && c.cl[2] == 3 && c.q8 == 7; }},
            {"C3", +[](C c) { return c.cl[0] == 3 && c.cl[1] == 5 && c.sym[0] == 1 && c.sym[1] == 1 &&
                                     c.sym[2] == -1 && c.cl[2] == 7 && c.q8 == 3; }}}},
        {7, QOForm::A, 3, false, 2, {
            {"C1", +[](C c) { return c.cl[0] == 5 && c.sym[0] == 1 && c.sym[1] == -1 && c.sym[2] == -1 &&
                                     c.cl[1] == 3 && c.cl[2] == 5; }},
            {"C2", +[](C c) { return c.cl[0] == 5 && c.sym[0] == 1 && c.sym[1] == -1 && c.sym[2] == -1 &&
                                     c.cl[1] == 7 && c.cl[2] == 3 && c.q8 == 3; }}}},
        {8, QOForm::A, 3, false, 2, {
            {"C1", +[](C c) { return c.cl[0] == 3 && c.sym[0] == 1 && c.sym[1] == -1 && c.sym[2] == -1 &&
                                     c.cl[1] == 3 && c.cl[2] == 5 && c.q8 == 7; }},
            {"C2", +[](C c) { return c.cl[0] == 3 && c.sym[0] == 1 && c.sym[1] == -1 && c.sym[2] == -1 &&
                                     c.cl[1] == 5 && c.cl[2] == 7 && c.q8 == 3; }}}},
        {9, QOForm::A, 3, false, 2, {
            {"C1", +[](C c) { return c.q8 == 3 && c.cl[0] == 3 && c.cl[1] == 5 && c.cl[2] == 7 &&
                                     c.sym[0] == -1 && c.sym[1] == -1 && c.sym[2] == -1; }}}},
        // ---- form B, d coprime to q ----
        {10, QOForm::B, 1, false, 0, {
            {"C1", +[](C c) { return c.cl[0] == 5; }}}},
        {11, QOForm::B, 2, false, 1, {
            {"C1", +[](C c) { return c.q8 == 3 && c.cl[0] == 3 && c.cl[1] == 7 && c.sym[0] == -1 &&
                                     c.sym[1] == -1; }}}},
        {12, QOForm::B, 2, false, 1, {
            {"C1", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 5 && c.cl[1] == 5; }},
            {"C2", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 3 && c.cl[1] == 3 &&
                                     c.q8 == 7; }},
            {"C3", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 7 && c.cl[1] == 3 &&
                                     c.q8 == 3; }},
            {"C4", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 3 && c.cl[1] == 7 &&
                                     c.q8 == 3; }}}},
        {13, QOForm::B, 2, false, 1, {
            {"C1", +[](C c) { return c.q8 == 3 && c.cl[0] == 7 && c.cl[1] == 3 && c.sym[0] == 1 &&
                                     c.sym[1] == 1; }}}},
        {14, QOForm::B, 2, false, 2, {
            {"C1", +[](C c) { return c.sym[0] == -1 && c.sym[1] == -1 &&
                                     ((c.cl[0] == 3 && c.cl[1] == 3) || (c.cl[0] == 5 && c.cl[1] == 5)); }}}},
        {15, QOForm::B, 3, false, 2, {
            {"C1", +[](C c) { return c.cl[0] == 3 && c.cl[1] == 5 && c.cl[2] == 3 && c.q8 == 7 &&
                                     c.sym[0] == -1 && c.sym[1] == -1 && c.sym[2] == 1; }},
            {"C2", +[](C c) { return c.cl[0] == 3 && c.cl[1] == 5 && c.cl[2] == 7 && c.q8 == 3 &&
                                     c.sym[0] == -1 && c.sym[1] == -1 && c.sym[2] == -1; }}}},
        {16, QOForm::B, 3, false, 2, {
            {"C1", +[](C c) { return c.cl[0] == 3 && c.cl[1] == 3 && c.cl[2] == 5 && c.q8 == 7 &&
                                     c.sym[0] == -1 && c.sym[1] == 1 && c.sym[2] == 1; }},
            {"C2", +[](C c) { return c.cl[0] == 3 && c.cl[1] == 7 && c.cl[2] == 5 && c.q8 == 3 &&
                                     c.sym[0] == -1 && c.sym[1] == -1 && c.sym[2] == 1; }},
            {"C3", +[](C c) { return c.cl[0] == 5 && c.cl[1] == 7 && c.cl[2] == 3 && c.q8 == 3 &&
                                     c.sym[0] == -1 && c.sym[1] == -1 && c.sym[2] == 1; }},
            {"C4", +[](C c) { return c.cl[0] == 3 && c.cl[1] == 7 && c.cl[2] == 5 && c.q8 == 3 &&
                                     c.sym[0] == 1 && c.sym[1] == -1 && c.sym[2] == 1; }}}},
        // ---- form B, d = q * (coprime part) ----
        {17, QOForm::B, 1, true, 0, {
            {"C1", +[](C c) { return c.cl[0] == 3; }},
            {"C2", +[](C c) { return c.cl[0] == 7 && c.q8 == 3; }}}},
        {18, QOForm::B, 2, true, 1, {
            {"C1", +[](C c) { return c.sym[0] == -1 && c.sym[1] == -1 && c.cl[0] == 5 && c.cl[1] == 3; }},
            {"C2", +[](C c) { return c.sym[0] == -1 && c.sym[1] == -1 && c.cl[0] == 5 && c.cl[1] == 7 &&
                                     c.q8 == 3; }}}},
        {19, QOForm::B, 2, true, 1, {
            {"C1", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 5 && c.cl[1] == 3; }},
            {"C2", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 3 && c.cl[1] == 5; }},
            {"C3", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 7 && c.cl[1] == 5 &&
                                     c.q8 == 3; }},
            {"C4", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 5 && c.cl[1] == 7 &&
                                     c.q8 == 3; }}}},
        {20, QOForm::B, 2, true, 1, {
            {"C1", +[](C c) { return c.sym[0] == 1 && c.sym[1] == 1 && c.cl[0] == 7 && c.cl[1] == 5 &&
                                     c.q8 == 3; }},
            {"C2", +[](C c) { return c.sym[0] == 1 && c.sym[1] == 1 && c.cl[0] == 3 && c.cl[1] == 5; }}}},
        {21, QOForm::B, 3, true, 2, {
            {"C1", +[](C c) { return c.cl[0] == 3 && c.cl[1] == 5 && c.cl[2] == 5 && c.sym[0] == -1 &&
                                     c.sym[1] == -1 && c.sym[2] == 1; }}}},
        {22, QOForm::B, 3, true, 2, {
            {"C1", +[](C c) { return c.cl[0] == 5 && c.cl[1] == 3 && c.cl[2] == 5 && c.sym[0] == -1 &&
                                     c.sym[1] == 1 && c.sym[2] == 1; }}}},
        // ---- form C ----
        {23, QOForm::C, 1, false, 0, {
            {"C1", +[](C c) { return c.cl[0] == 3; }},
            {"C2", +[](C c) { return c.cl[0] == 5 && c.q8 == 3 && c.sym[0] == -1; }},
            {"C3", +[](C c) { return c.cl[0] == 5 && c.q8 == 7 && c.sq1[0] == -1; }},
            {"C4", +[](C c) { return c.cl[0] == 7 && c.q8 == 3; }}}},
        {24, QOForm::C, 1, false, 1, {
            {"C1", +[](C c) { return c.cl[0] == 5 && c.sym[0] == 1 && c.sq1[0] == 1; }}}},
        {25, QOForm::C, 2, false, 1, {
            {"C1", +[](C c) { return c.sym[0] == -1 && c.sym[1] == -1 && c.cl[0] == 5 && c.cl[1] == 3 &&
                                     (c.q8 == 3 || (c.q8 == 7 && c.sq1[0] == -1)); }},
            {"C2", +[](C c) { return c.sym[0] == -1 && c.sym[1] == -1 && c.cl[0] == 3 && c.cl[1] == 3 &&
                                     c.q8 == 7 && c.sq1[0] != c.sq1[1]; }},
            {"C3", +[](C c) { return c.sym[0] == -1 && c.sym[1] == -1 && c.cl[0] == 3 && c.cl[1] == 7 &&
                                     c.q8 == 3; }}}},
        {26, QOForm::C, 2, false, 1, {
            {"C1", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 3 && c.cl[1] == 3 &&
                                     c.q8 == 7 && c.sq1[0] != c.sq1[1]; }},
            {"C2", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 3 && c.cl[1] == 5 &&
                                     c.q8 == 7 && c.sq1[1] == -1; }},
            {"C3", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 5 && c.cl[1] == 3 &&
                                     (c.q8 == 3 || (c.q8 == 7 && c.sq1[0] == -1)); }}}},
        {27, QOForm::C, 2, false, 1, {
            {"C1", +[](C c) { return c.sym[0] == 1 && c.sym[1] == 1 && c.cl[0] == 3 && c.cl[1] == 3 &&
                                     c.q8 == 7 && c.sq1[0] != c.sq1[1]; }},
            {"C2", +[](C c) { return c.sym[0] == 1 && c.sym[1] == 1 && c.cl[0] == 5 && c.cl[1] == 3 &&
                                     c.q8 == 7 && c.sq1[0] == -1; }}}},
        {28, QOForm::C, 2, false, 2, {
            {"C1", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 5 && c.cl[1] == 5 &&
                                     ((c.q8 == 3 && c.sq1[1] == 1) ||
                                      (c.q8 == 7 && c.sq1[0] == -1 && c.sq1[1] == 1)); }},
            {"C2", +[](C c) { return c.sym[0] == -1 && c.sym[1] == 1 && c.cl[0] == 3 && c.cl[1] == 5 &&
                                     c.sq1[1] == 1; }}}},
        {29, QOForm::C, 2, false, 2, {
            {"C1", +[](C c) { return c.sym[0] == 1 && c.sym[1] == 1 && c.cl[0] == 7 && c.cl[1] == 5 &&
                                     c.q8 == 3 && c.sq1[1] == 1; }},
            {"C2", +[](C c) { return c.sym[0] == 1 && c.sym[1] == 1 && c.cl[0] == 7 && c.cl[1] == 3 &&
                                     c.q8 == 3 && c.sq1[0] == c.sq1[1]; }},
            {"C3", +[](C c) { return c.sym[0] == 1 && c.sym[1] == 1 && c.cl[0] == 3 && c.cl[1] == 3 &&
                                     c.q14 == 3 && c.sq1[0] == c.sq1[1]; }},
            {"C4", +[](C c) { return c.sym[0] == 1 && c.sym[1] == 1 && c.cl[0] == 5 && c.cl[1] == 5 &&
                                     c.q8 == 7 && (c.sq1[0] == -1 || c.sq1[1] == -1); }},
            {"C5", +[](C c) { return c.sym[0] == 1 && c.sym[1] == 1 && c.cl[0] == 5 && c.cl[1] == 3 &&
                                     c.q14 == 3 && c.sq1[0] == 1; }}}},
    };
    return v;
}

inline const char* role_name(size_t i) {
    static const char* names[] = {"r", "s", "t"};
    return names[i];
}

}  // namespace theorem

/// The matched Main Theorem item for K (form A/B/C, K != L), trying every
/// catalog presentation and every permutation of the free primes. Returns
/// nullopt when no item applies (the theorem then asserts the ranks differ or
/// exceed 2). Throws on D/E/F and the excluded L shape.
inline std::optional<CasePrediction> main_theorem_case(const BiquadField& K) {
    auto pres = abc_presentations(K);
    if (pres.empty()) {
        auto f = qo_form(K);
        if (f.tag == QOForm::None) throw UnsupportedShape("main_theorem_case: not a catalog form");
        throw UnsupportedShape(std::string("main_theorem_case: unsupported form ") +
                               qo_form_name(f.tag));
    }
    if (is_L_type(K)) throw LExcluded("main_theorem_case: K is of the excluded L shape");

    std::vector<CasePrediction> matches;
    for (auto& m : pres) {
        u64 mod = m.tag == QOForm::C ? m.q1 * m.q2 : m.q;
        std::vector<u64> perm = m.m_primes;
        std::sort(perm.begin(), perm.end());
        do {
            theorem::Ctx c;
            c.q8 = (int)((m.tag == QOForm::C ? m.q1 : m.q) % 8);
            c.q14 = (int)((m.tag == QOForm::C ? m.q1 : m.q) % 4);
            for (u64 p : perm) {
                c.cl.push_back((int)(p % 8));
                c.sym.push_back(jacobi((i64)mod, (i64)p));
                c.sq1.push_back(m.q1 ? jacobi((i64)m.q1, (i64)p) : 0);
            }
            for (auto& it : theorem::items()) {
                if (it.form != m.tag || it.nprimes != (int)perm.size()) continue;
                if (it.form == QOForm::B && it.d_has_base_prime != (m.delta != 1)) continue;
                for (auto& [label, pred] : it.conds) {
                    if (!pred(c)) continue;
                    CasePrediction cp;
                    cp.case_id = it.id;
                    cp.condition_label = label;
                    cp.predicted_rank_infty = it.rank;
                    if (m.tag == QOForm::C) {
                        cp.roles["q1"] = m.q1;
                        cp.roles["q2"] = m.q2;
                    } else {
                        cp.roles["q"] = m.q;
                    }
                    if (m.delta != 1) cp.roles["delta"] = m.delta;
                    for (size_t i = 0; i < perm.size(); ++i)
                        cp.roles[theorem::role_name(i)] = perm[i];
                    if (it.rank == 0) cp.iwasawa = IwasawaTriple{0, 0, 0};
                    matches.push_back(cp);
                }
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    if (matches.empty()) return std::nullopt;
    std::sort(matches.begin(), matches.end(), [](const CasePrediction& a, const CasePrediction& b) {
        return std::tie(a.case_id, a.condition_label) < std::tie(b.case_id, b.condition_label);
    });
    for (auto& cp : matches)
        if (cp.predicted_rank_infty != matches[0].predicted_rank_infty)
            throw std::logic_error("main_theorem_case: conflicting predictions across items");
    return matches[0];
}

enum class Stability { Stable, NotStable, Indeterminate };

/// rg(A(K)) = rg(A(K_1))? Decided from the two rank computations; bounded
/// results decide only when the intervals are disjoint.
inline Stability stabilization_check(const BiquadField& K) {
    auto pres = abc_presentations(K);
    if (pres.empty()) throw UnsupportedShape("stabilization_check: not a supported form");
    auto& m = pres.front();
    RankResult r0 = rank_A(level0_ext(m));
    RankResult r1 = rank_A(level1_ext(m));
    if (r0.exact() && r1.exact())
        return r0.rank_lo == r1.rank_lo ? Stability::Stable : Stability::NotStable;
    if (r0.rank_hi < r1.rank_lo || r1.rank_hi < r0.rank_lo) return Stability::NotStable;
    return Stability::Indeterminate;
}

}  // namespace biq2

#endif
