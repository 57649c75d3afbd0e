#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "biq2/fields.hpp"
#include "biq2/quadunits.hpp"

using namespace biq2;

TEST_CASE("radicand span") {
    auto s = subfield_radicands({6, 345});
    CHECK(s == std::vector<u64>{6, 230, 345});
    auto t = subfield_radicands({2, 21, 19});
    CHECK(t == std::vector<u64>{2, 19, 21, 38, 42, 399, 798});
}

TEST_CASE("MqElem algebra") {
    MqElem a = MqElem::sqrt_of(19) + MqElem::sqrt_of(21);
    MqElem sq = a * a;
    MqElem expect = MqElem::rational(40) + MqElem::sqrt_of(399) * mpq_class(2);
    CHECK(sq == expect);

    MqElem c = a.conj({19});
    CHECK(c == MqElem::sqrt_of(21) - MqElem::sqrt_of(19));
    CHECK((a * c) == MqElem::rational(2));  // 21 - 19
}

TEST_CASE("sqrt_in_span rational base cases") {
    CHECK(sqrt_in_span(MqElem::rational(mpq_class(9, 4)), {}).has_value());
    CHECK_FALSE(sqrt_in_span(MqElem::rational(2), {}).has_value());
    CHECK_FALSE(sqrt_in_span(MqElem::rational(-1), {6}).has_value());
    auto r = sqrt_in_span(MqElem::rational(6), {6});
    REQUIRE(r.has_value());
    CHECK(*r * *r == MqElem::rational(6));
}

TEST_CASE("sqrt_in_span recovers constructed squares") {
    std::mt19937_64 rng(99);
    std::vector<std::vector<u64>> fields = {{6, 345}, {3, 7}, {2, 21, 19}, {5, 13}};
    for (auto& gens : fields) {
        auto subs = subfield_radicands(gens);
        for (int iter = 0; iter < 12; ++iter) {
            MqElem x = MqElem::rational((long)(rng() % 7) - 3);
            for (u64 m : subs)
                if (rng() % 2) x = x + MqElem::sqrt_of(m) * mpq_class((long)(rng() % 5) - 2, 2);
            MqElem sq = x * x;
            auto r = sqrt_in_span(sq, gens);
            REQUIRE(r.has_value());
            CHECK(*r * *r == sq);
        }
    }
}

TEST_CASE("sqrt_in_span rejects non-squares and non-members") {
    // sqrt(2) is not in Q(sqrt3, sqrt5)
    CHECK_FALSE(sqrt_in_span(MqElem::rational(2), {3, 5}).has_value());
    MqElem x = MqElem::rational(3) + MqElem::sqrt_of(6);
    CHECK_FALSE(sqrt_in_span(x, {6, 345}).has_value());
    // an element supported outside the field
    CHECK_FALSE(sqrt_in_span(MqElem::sqrt_of(7) * MqElem::sqrt_of(7) + MqElem::sqrt_of(11), {3, 5})
                    .has_value());
}

TEST_CASE("unit products: frozen oracle for Q(sqrt6, sqrt345)") {
    // Only eps_345 * eps_230 is a square among the seven unit products
    // (verified independently by exact symbolic solve).
    MqElem e6 = fundamental_unit(6).as_elem();
    MqElem e345 = fundamental_unit(345).as_elem();
    MqElem e230 = fundamental_unit(230).as_elem();
    std::vector<u64> K{6, 345};
    int count = 0;
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b)
            for (int c = 0; c <= 1; ++c) {
                if (!(a | b | c)) continue;
                MqElem u = MqElem::rational(1);
                if (a) u = u * e6;
                if (b) u = u * e345;
                if (c) u = u * e230;
                if (is_square_in_field(u, K)) {
                    ++count;
                    CHECK((a == 0 && b == 1 && c == 1));
                }
            }
    CHECK(count == 1);
}

TEST_CASE("invert_in_span") {
    MqElem x = MqElem::rational(3) + MqElem::sqrt_of(6) + MqElem::sqrt_of(345) * mpq_class(1, 2);
    auto inv = invert_in_span(x, {6, 345});
    REQUIRE(inv.has_value());
    CHECK(x * *inv == MqElem::rational(1));
}
