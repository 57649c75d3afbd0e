#ifndef BIQ2_REPORT_HPP
#define BIQ2_REPORT_HPP

#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "biq2/classify.hpp"
#include "biq2/multiquad.hpp"

namespace biq2 {

using ordered_json = nlohmann::ordered_json;

struct CaseTuple {
    int case_id = 0;
    std::string cond;
    u64 q = 0, q1 = 0, q2 = 0, r = 0, s = 0, t = 0, delta = 1;

    bool operator<(const CaseTuple& o) const {
        return std::tie(case_id, q, q1, q2, r, s, t, cond) <
               std::tie(o.case_id, o.q, o.q1, o.q2, o.r, o.s, o.t, o.cond);
    }
    bool operator==(const CaseTuple& o) const {
        return std::tie(case_id, q, q1, q2, r, s, t, delta, cond) ==
               std::tie(o.case_id, o.q, o.q1, o.q2, o.r, o.s, o.t, o.delta, o.cond);
    }
};

inline BiquadField field_of(const CaseTuple& tp) {
    const theorem::Item* item = nullptr;
    for (auto& it : theorem::items())
        if (it.id == tp.case_id) item = &it;
    if (!item) throw std::invalid_argument("field_of: unknown case id");
    u64 prod = 1;
    for (u64 p : {tp.r, tp.s, tp.t})
        if (p) prod *= p;
    switch (item->form) {
        case QOForm::A: return BiquadField(tp.q, prod);
        case QOForm::B: return BiquadField(2 * tp.q, item->d_has_base_prime ? tp.q * prod : prod);
        default: {
            u64 d = prod;
            if (d % 4 != 1) d *= tp.q1;  // delta in {q1, q2}; q1 fixes the parity
            return BiquadField(tp.q1 * tp.q2, d);
        }
    }
}

/// All prime tuples below the bound satisfying one of the case's conditions,
/// ascending, one row per (roles, first matching condition).
inline std::vector<CaseTuple> cli_search(int case_id, u64 bound) {
    const theorem::Item* item = nullptr;
    for (auto& it : theorem::items())
        if (it.id == case_id) item = &it;
    if (!item) throw std::invalid_argument("cli_search: case id must be in 1..29");
    std::vector<CaseTuple> out;
    auto odd_primes = primes_below(bound >= 1 ? bound - 1 : 0, 3);

    std::vector<std::pair<u64, u64>> bases;  // (q, 0) or (q1, q2)
    if (item->form == QOForm::C) {
        for (u64 a : odd_primes)
            for (u64 b : odd_primes) {
                if (a == b || a % 4 != 3 || b % 8 != 3) continue;
                // role q2 == 3 (mod 8); if both are, q2 is the smaller
                if (a % 8 == 3 && b % 8 == 3 && b > a) continue;
                bases.push_back({a, b});
            }
    } else {
        for (u64 q : odd_primes)
            if (q % 4 == 3) bases.push_back({q, 0});
    }

    int n = item->nprimes;
    for (auto& [qa, qb] : bases) {
        u64 mod = item->form == QOForm::C ? qa * qb : qa;
        std::vector<u64> pool;
        for (u64 p : odd_primes)
            if (p != qa && p != qb) pool.push_back(p);
        std::vector<int> idx(n, 0);
        // ordered tuples of distinct pool primes (roles are order-sensitive)
        std::function<void(int, std::vector<u64>&)> rec = [&](int k, std::vector<u64>& acc) {
            if (k == n) {
                theorem::Ctx c;
                c.q8 = (int)(qa % 8);
                c.q14 = (int)(qa % 4);
                for (u64 p : acc) {
                    c.cl.push_back((int)(p % 8));
                    c.sym.push_back(jacobi((i64)mod, (i64)p));
                    c.sq1.push_back(qb ? jacobi((i64)qa, (i64)p) : 0);
                }
                for (auto& [label, pred] : item->conds) {
                    if (!pred(c)) continue;
                    CaseTuple tp;
                    tp.case_id = case_id;
                    tp.cond = label;
                    if (item->form == QOForm::C) { tp.q1 = qa; tp.q2 = qb; }
                    else tp.q = qa;
                    tp.r = acc.size() > 0 ? acc[0] : 0;
                    tp.s = acc.size() > 1 ? acc[1] : 0;
                    tp.t = acc.size() > 2 ? acc[2] : 0;
                    if (item->form == QOForm::B && item->d_has_base_prime) tp.delta = qa;
                    if (item->form == QOForm::C) {
                        u64 prod = 1;
                        for (u64 p : acc) prod *= p;
                        tp.delta = prod % 4 == 1 ? 1 : qa;
                    }
                    out.push_back(tp);
                    break;
                }
                return;
            }
            for (u64 p : pool) {
                bool used = false;
                for (u64 x : acc)
                    if (x == p) used = true;
                if (used) continue;
                acc.push_back(p);
                rec(k + 1, acc);
                acc.pop_back();
            }
        };
        std::vector<u64> acc;
        rec(0, acc);
    }
    // one row per field: drop role-permutations of the same tuple set
    std::sort(out.begin(), out.end());
    std::vector<CaseTuple> uniq;
    std::set<std::tuple<u64, u64, u64, std::multiset<u64>>> seen;
    for (auto& tp : out) {
        std::multiset<u64> ms;
        for (u64 p : {tp.r, tp.s, tp.t})
            if (p) ms.insert(p);
        auto key = std::make_tuple(tp.q, tp.q1, tp.q2, ms);
        if (seen.count(key)) continue;
        seen.insert(key);
        uniq.push_back(tp);
    }
    return uniq;
}

struct VerifyRow {
    CaseTuple tuple;
    int pred_rank = -1;
    std::string rank0, rank1, stable, h2_K, h2_K1, group, error;
    bool agree = false;
};

struct VerificationReport {
    int schema_version = 1;
    ordered_json config;
    std::vector<VerifyRow> rows;
    int agreed = 0, disagreed = 0, errors = 0;
    long long runtime_ms = 0;
};

inline std::string rank_str(const RankResult& r) {
    if (r.exact()) return std::to_string(r.rank_lo);
    return std::to_string(r.rank_lo) + ".." + std::to_string(r.rank_hi);
}

/// Evaluate one tuple: classification, both ranks, stabilization, and (when
/// the subfield discriminants are under the cap) the Kuroda h2 of K.
inline VerifyRow verify_tuple(const CaseTuple& tp, bool with_structure = false) {
    VerifyRow row;
    row.tuple = tp;
    try {
        const theorem::Item* item = nullptr;
        for (auto& it : theorem::items())
            if (it.id == tp.case_id) item = &it;
        row.pred_rank = item->rank;
        BiquadField K = field_of(tp);
        auto cp = main_theorem_case(K);
        if (!cp) {
            row.error = "classifier: no item matched";
            return row;
        }
        if (cp->predicted_rank_infty != item->rank) {
            row.error = "classifier predicts a different rank";
            return row;
        }
        auto pres = abc_presentations(K);
        RankResult r0 = rank_A(level0_ext(pres.front()));
        RankResult r1 = rank_A(level1_ext(pres.front()));
        row.rank0 = rank_str(r0);
        row.rank1 = rank_str(r1);
        Stability st = stabilization_check(K);
        row.stable = st == Stability::Stable ? "yes" : st == Stability::NotStable ? "no" : "indet";
        row.agree = st == Stability::Stable && r0.exact() && r1.exact() &&
                    r0.rank_lo == item->rank && r1.rank_lo == item->rank;
        bool caps_ok = true;
        for (u64 m : subfield_radicands({K.d1, K.d2})) {
            u64 D = m % 4 == 1 ? m : 4 * m;
            if (D > get_disc_cap()) caps_ok = false;
        }
        if (caps_ok) row.h2_K = "2^" + std::to_string(kuroda_h2_exponent({K.d1, K.d2}));
        if (with_structure) {
            std::string why;
            if (auto st2 = iwasawa_structure(K, &why)) row.group = st2->describe();
        }
    } catch (const std::exception& ex) {
        row.error = ex.what();
    }
    return row;
}

/// Run a case campaign; per-tuple errors become rows, never aborts.
inline VerificationReport cli_verify(int case_id, u64 bound, int workers = 1,
                                     bool with_structure = false) {
    auto t0 = std::chrono::steady_clock::now();
    VerificationReport rep;
    rep.config = {{"case", case_id}, {"bound", bound}, {"workers", workers},
                  {"disc_cap", get_disc_cap()}};
    auto tuples = cli_search(case_id, bound);
    rep.rows.resize(tuples.size());
    std::atomic<size_t> next{0};
    auto work = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= tuples.size()) break;
            rep.rows[i] = verify_tuple(tuples[i], with_structure);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    std::sort(rep.rows.begin(), rep.rows.end(),
              [](const VerifyRow& a, const VerifyRow& b) { return a.tuple < b.tuple; });
    for (auto& r : rep.rows) {
        if (!r.error.empty()) ++rep.errors;
        else if (r.agree) ++rep.agreed;
        else ++rep.disagreed;
    }
    rep.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return rep;
}

inline ordered_json to_json(const VerificationReport& rep) {
    ordered_json j;
    j["schema_version"] = rep.schema_version;
    j["config"] = rep.config;
    j["rows"] = ordered_json::array();
    for (auto& r : rep.rows) {
        ordered_json row;
        row["case_id"] = r.tuple.case_id;
        row["q"] = r.tuple.q;
        row["q1"] = r.tuple.q1;
        row["q2"] = r.tuple.q2;
        row["r"] = r.tuple.r;
        row["s"] = r.tuple.s;
        row["t"] = r.tuple.t;
        row["delta"] = r.tuple.delta;
        row["cond"] = r.tuple.cond;
        row["pred_rank"] = r.pred_rank;
        row["rank0"] = r.rank0;
        row["rank1"] = r.rank1;
        row["stable"] = r.stable;
        row["h2_K"] = r.h2_K;
        row["h2_K1"] = r.h2_K1;
        row["group"] = r.group;
        row["agree"] = r.agree;
        if (!r.error.empty()) row["error"] = r.error;
        j["rows"].push_back(row);
    }
    j["summary"] = {{"tuples", rep.rows.size()},
                    {"agreed", rep.agreed},
                    {"disagreed", rep.disagreed},
                    {"errors", rep.errors}};
    j["runtime_ms"] = rep.runtime_ms;
    return j;
}

inline VerificationReport report_from_json(const ordered_json& j) {
    VerificationReport rep;
    rep.schema_version = j.at("schema_version").get<int>();
    rep.config = j.at("config");
    for (auto& row : j.at("rows")) {
        VerifyRow r;
        r.tuple.case_id = row.at("case_id").get<int>();
        r.tuple.q = row.at("q").get<u64>();
        r.tuple.q1 = row.at("q1").get<u64>();
        r.tuple.q2 = row.at("q2").get<u64>();
        r.tuple.r = row.at("r").get<u64>();
        r.tuple.s = row.at("s").get<u64>();
        r.tuple.t = row.at("t").get<u64>();
        r.tuple.delta = row.at("delta").get<u64>();
        r.tuple.cond = row.at("cond").get<std::string>();
        r.pred_rank = row.at("pred_rank").get<int>();
        r.rank0 = row.at("rank0").get<std::string>();
        r.rank1 = row.at("rank1").get<std::string>();
        r.stable = row.at("stable").get<std::string>();
        r.h2_K = row.at("h2_K").get<std::string>();
        r.h2_K1 = row.at("h2_K1").get<std::string>();
        r.group = row.at("group").get<std::string>();
        r.agree = row.at("agree").get<bool>();
        if (row.contains("error")) r.error = row.at("error").get<std::string>();
        rep.rows.push_back(r);
    }
    rep.agreed = j.at("summary").at("agreed").get<int>();
    rep.disagreed = j.at("summary").at("disagreed").get<int>();
    rep.errors = j.at("summary").at("errors").get<int>();
    rep.runtime_ms = j.at("runtime_ms").get<long long>();
    return rep;
}

inline std::string to_csv(const VerificationReport& rep) {
    std::ostringstream os;
    os << "case_id,q,q1,q2,r,s,t,delta,cond,pred_rank,rank0,rank1,stable,h2_K,h2_K1,group,agree\n";
    auto cell = [](u64 v) { return v ? std::to_string(v) : std::string(); };
    for (auto& r : rep.rows) {
        os << r.tuple.case_id << ',' << cell(r.tuple.q) << ',' << cell(r.tuple.q1) << ','
           << cell(r.tuple.q2) << ',' << cell(r.tuple.r) << ',' << cell(r.tuple.s) << ','
           << cell(r.tuple.t) << ',' << r.tuple.delta << ',' << r.tuple.cond << ','
           << r.pred_rank << ',' << r.rank0 << ',' << r.rank1 << ',' << r.stable << ','
           << r.h2_K << ',' << r.h2_K1 << ',' << r.group << ',' << (r.agree ? "true" : "false")
           << '\n';
    }
    return os.str();
}

/// Structure-family campaign rows (the cyclic 2^(m-1) and Z/2 x Z/2^(m-2)
/// families and the quadratic corollary field).
struct StructureRow {
    u64 q = 0, r = 0, s = 0;
    std::string family;
    std::string group;
    int m = 0;
    i64 nu = 0;
    std::string h2_K, h2_K1;
    std::vector<int> qrs_factors;  // wide 2-Sylow of Q(sqrt qrs)
    bool agree = false;
    std::string error;
};

inline std::vector<StructureRow> structure_campaign(const std::string& family, u64 bound) {
    std::vector<StructureRow> rows;
    auto primes = primes_below(bound >= 1 ? bound - 1 : 0, 3);
    for (u64 q : primes)
        for (u64 r : primes)
            for (u64 s : primes) {
                if (q == r || q == s || r == s) continue;
                StructureRow row;
                row.q = q;
                row.r = r;
                row.s = s;
                row.family = family;
                try {
                    if (family == "cyclic") {
                        auto chk = check_triquad_hypotheses(q, r, s);
                        if (!chk.hypotheses_hold) continue;
                        BiquadField K(q, r * s);
                        std::string why;
                        auto st = iwasawa_structure(K, &why);
                        if (!st) throw std::logic_error("structure absent: " + why);
                        row.group = st->describe();
                        row.m = st->m;
                        row.nu = st->invariants.nu;
                        int h2K = kuroda_h2_exponent({q, r * s});
                        row.h2_K = "2^" + std::to_string(h2K);
                        bool fuk = fukuda_h2_stable(K);
                        row.h2_K1 = fuk ? row.h2_K : "differs";
                        row.agree = st->kind == GroupKind::Cyclic && st->exponent == st->m - 1 &&
                                    h2K == st->m - 1 && fuk;
                    } else if (family == "two_by") {
                        if (!(q % 8 == 7 && r % 8 == 3 && s % 8 == 3)) continue;
                        if (jacobi((i64)q, (i64)r) != 1 || jacobi((i64)q, (i64)s) != 1) continue;
                        std::string why;
                        auto stL = iwasawa_structure_qrs(q, r, s, &why);
                        if (!stL) continue;  // side condition (q(a-1) square) filtered here
                        row.group = stL->describe();
                        row.m = stL->m;
                        row.nu = stL->invariants.nu;
                        auto& cg = h2_wide(q * r * s);
                        row.qrs_factors = cg.invariant_factors;
                        row.agree = cg.two_rank == 2 && cg.four_rank == 1 &&
                                    cg.invariant_factors == std::vector<int>{stL->m - 1, 1};
                    } else {
                        throw std::invalid_argument("unknown family: " + family);
                    }
                } catch (const std::exception& ex) {
                    row.error = ex.what();
                }
                if (!row.group.empty() || !row.error.empty()) rows.push_back(row);
            }
    return rows;
}

}  // namespace biq2

#endif
