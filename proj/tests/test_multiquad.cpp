#include <catch2/catch_amalgamated.hpp>
#include "biq2/biq2.hpp"
TEST_CASE("placeholder") { CHECK(true); }
