#include <catch2/catch_amalgamated.hpp>

#include "biq2/quadunits.hpp"

using namespace biq2;

namespace {

// Brute-force minimality oracle: smallest y > 0 with x^2 - d y^2 = +-sigma^2,
// scanning y directly (maximal order when d == 1 mod 4).
std::optional<FundamentalUnit> brute_unit(u64 d, u64 ymax) {
    for (u64 y = 1; y <= ymax; ++y) {
        for (int sigma : {1, 2}) {
            if (sigma == 2 && d % 4 != 1) continue;
            for (int n : {-1, 1}) {
                mpz_class x2 = mpz_class((unsigned long)d) * y * y + n * sigma * sigma;
                if (x2 <= 0 || !mpz_perfect_square_p(x2.get_mpz_t())) continue;
                mpz_class x;
                mpz_sqrt(x.get_mpz_t(), x2.get_mpz_t());
                if (sigma == 2 && (x % 2 == 0 || y % 2 == 0)) continue;
                FundamentalUnit u;
                u.d = d;
                u.x = x;
                u.y = y;
                u.sigma = sigma;
                u.norm = n;
                return u;
            }
        }
    }
    return std::nullopt;
}

double approx(const FundamentalUnit& u) {
    return (mpz_get_d(u.x.get_mpz_t()) + mpz_get_d(u.y.get_mpz_t()) * std::sqrt((double)u.d)) /
           u.sigma;
}

}  // namespace

TEST_CASE("fundamental unit examples") {
    auto u2 = fundamental_unit(2);
    CHECK(u2.x == 1);
    CHECK(u2.y == 1);
    CHECK(u2.sigma == 1);
    CHECK(u2.norm == -1);

    auto u5 = fundamental_unit(5);
    CHECK(u5.x == 1);
    CHECK(u5.y == 1);
    CHECK(u5.sigma == 2);
    CHECK(u5.norm == -1);

    auto u399 = fundamental_unit(399);
    CHECK(u399.x == 20);
    CHECK(u399.y == 1);
    CHECK(u399.sigma == 1);
    CHECK(u399.norm == 1);

    CHECK_THROWS(fundamental_unit(12));
    CHECK_THROWS(fundamental_unit(1));
}

TEST_CASE("Pell identity holds for all squarefree d <= 2000") {
    for (u64 d = 2; d <= 2000; ++d) {
        if (!is_squarefree(d)) continue;
        const auto& u = fundamental_unit(d);
        CHECK(u.pell_holds());
        CHECK(u.y > 0);
        if (u.sigma == 2) CHECK(d % 4 == 1);
    }
}

TEST_CASE("minimality vs brute force for d <= 500") {
    for (u64 d = 2; d <= 500; ++d) {
        if (!is_squarefree(d)) continue;
        const auto& u = fundamental_unit(d);
        auto b = brute_unit(d, u.y.get_ui());
        REQUIRE(b.has_value());
        CHECK(approx(*b) <= approx(u) * (1 + 1e-9));
        CHECK(b->x == u.x);
        CHECK(b->y == u.y);
        CHECK(b->sigma == u.sigma);
        CHECK(b->norm == u.norm);
    }
}

TEST_CASE("norm is +1 whenever d has a prime factor == 3 (mod 4)") {
    for (u64 d = 2; d <= 2000; ++d) {
        if (!is_squarefree(d)) continue;
        bool has3 = false;
        for (u64 p : factor_squarefree(d))
            if (p % 4 == 3) has3 = true;
        if (has3) CHECK(fundamental_unit(d).norm == 1);
    }
}

TEST_CASE("profile examples from the catalog") {
    // d = 399 = 3*19*7: a = 20, 19*(a-1) = 361 = 19^2
    auto p399 = unit_sqrt_profile(UnitShape::QRS, {3, 19, 7});
    CHECK(p399.pattern == "19(a-1)");
    CHECK(p399.scaled);
    CHECK(p399.m1 == 19);
    CHECK(p399.m2 == 21);
    CHECK(p399.b1 == 1);
    CHECK(p399.b2 == 1);
    CHECK(p399.expansion_holds(fundamental_unit(399)));

    // q = 7: sqrt(2 eps_7) = 3 + sqrt7, gamma = 0
    auto p7 = unit_sqrt_profile(UnitShape::Q, {7});
    CHECK(p7.scaled);
    CHECK(p7.m1 == 1);
    CHECK(p7.m2 == 7);
    CHECK(p7.b1 == 3);
    CHECK(p7.b2 == 1);
    CHECK(p7.gamma == 0);

    // q = 3: sqrt(2 eps_3) = 1 + sqrt3, gamma = 1
    auto p3 = unit_sqrt_profile(UnitShape::Q, {3});
    CHECK(p3.b1 == 1);
    CHECK(p3.b2 == 1);
    CHECK(p3.gamma == 1);
}

TEST_CASE("gamma tracks q mod 8 for the q and 2q shapes") {
    for (u64 q : primes_below(200, 3)) {
        if (q % 4 != 3) continue;
        CHECK(unit_sqrt_profile(UnitShape::Q, {q}).gamma == (q % 8 == 3 ? 1 : 0));
        CHECK(unit_sqrt_profile(UnitShape::TwoQ, {q}).gamma == (q % 8 == 3 ? 1 : 0));
    }
}

TEST_CASE("half-integral unit decomposition (q1 q2 shape)") {
    auto p21 = unit_sqrt_profile(UnitShape::Q1Q2, {3, 7});
    CHECK(p21.sigma_prime == 2);
    CHECK(p21.m1 == 3);
    CHECK(p21.m2 == 7);
    CHECK_FALSE(p21.scaled);
    CHECK(p21.expansion_holds(fundamental_unit(21)));
}

TEST_CASE("7 mod 8 pair shapes") {
    // q = 7, r = 23: (23/7) = (2/7) = +1
    auto p = unit_sqrt_profile(UnitShape::QR77, {7, 23});
    CHECK_FALSE(p.scaled);
    CHECK(p.m1 == 23);
    CHECK(p.m2 == 7);
    CHECK(p.expansion_holds(fundamental_unit(161)));
    auto p2 = unit_sqrt_profile(UnitShape::TwoQR77, {7, 23});
    CHECK(p2.scaled);
    CHECK(p2.expansion_holds(fundamental_unit(322)));
}

TEST_CASE("profile expansion for every search hit, d <= 600") {
    for (u64 d = 3; d <= 600; ++d) {
        if (!is_squarefree(d)) continue;
        const auto& u = fundamental_unit(d);
        if (u.norm != 1) continue;
        for (auto& p : sqrt_profile_search(u)) CHECK(p.expansion_holds(u));
    }
}

TEST_CASE("sqrt_unit_in_field") {
    auto p399 = unit_sqrt_profile(UnitShape::QRS, {3, 19, 7});
    CHECK(sqrt_unit_in_field(p399, {2, 21, 19}));   // {19, 21} both subfields
    CHECK(sqrt_unit_in_field(p399, {19, 21}));      // sqrt(2 eps) itself lives here
    CHECK_FALSE(sqrt_unit_in_field(p399, {19, 5}));

    auto p3 = unit_sqrt_profile(UnitShape::Q, {3});  // radicands {1, 3}
    CHECK_FALSE(sqrt_unit_in_field(p3, {5, 3}));     // needs sqrt2 for the scaling
    CHECK(sqrt_unit_in_field(p3, {3, 7}));           // sqrt(2 eps_3) = 1 + sqrt3 in any field with sqrt3
}

TEST_CASE("TwoQRS shape: s(x-1) is the unique pattern") {
    // (q,r,s) = (3,19,7): d = 798
    auto p = unit_sqrt_profile(UnitShape::TwoQRS, {3, 19, 7});
    CHECK(p.m1 == 7);
    CHECK(p.m2 == 114);
    CHECK(p.scaled);
    CHECK(p.expansion_holds(fundamental_unit(798)));
}
