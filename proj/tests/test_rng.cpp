#include <cmath>

#include "doctest.h"
#include "veilaudit/rng.hpp"

using namespace veilaudit;

TEST_SUITE("rng") {

TEST_CASE("identical seeds give identical streams") {
    SeededRng a(42, "x"), b(42, "x");
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(a.bytes(333) == b.bytes(333));
    CHECK(a.scalar() == b.scalar());
}

TEST_CASE("seed and label changes decorrelate streams") {
    SeededRng a(42, "x"), b(43, "x"), c(42, "y");
    CHECK(a.next_u64() != b.next_u64());
    SeededRng a2(42, "x");
    a2.next_u64();
    CHECK(a2.next_u64() != c.next_u64());
}

TEST_CASE("fork is deterministic and independent of parent consumption order") {
    SeededRng parent(7, "p");
    SeededRng f1 = parent.fork("child");
    parent.bytes(1000);  // consuming the parent must not change the child
    SeededRng f2 = parent.fork("child");
    for (int i = 0; i < 20; ++i) CHECK(f1.next_u64() == f2.next_u64());
    SeededRng other = parent.fork("other");
    CHECK(f1.next_u64() != other.next_u64());
}

TEST_CASE("uniform stays in bounds without visible bias") {
    SeededRng rng(9, "uniform");
    std::array<std::uint64_t, 10> counts{};
    for (int i = 0; i < 100000; ++i) {
        std::uint64_t v = rng.uniform(10);
        REQUIRE(v < 10);
        ++counts[v];
    }
    for (auto c : counts) {  // ~5 sigma band around 10000
        CHECK(c > 9500);
        CHECK(c < 10500);
    }
    CHECK(rng.uniform(1) == 0);
}

TEST_CASE("uniform_real in [0,1) with sane mean") {
    SeededRng rng(10, "real");
    double sum = 0;
    for (int i = 0; i < 100000; ++i) {
        double v = rng.uniform_real();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        sum += v;
    }
    CHECK(std::abs(sum / 100000 - 0.5) < 0.01);
}

TEST_CASE("bernoulli at the edges and in the middle") {
    SeededRng rng(11, "bern");
    for (int i = 0; i < 100; ++i) CHECK(rng.bernoulli(1.0));
    for (int i = 0; i < 100; ++i) CHECK_FALSE(rng.bernoulli(0.0));
    int hits = 0;
    for (int i = 0; i < 100000; ++i) hits += rng.bernoulli(0.25);
    CHECK(std::abs(hits / 100000.0 - 0.25) < 0.01);
}

TEST_CASE("nonzero_scalar never returns zero") {
    SeededRng rng(12, "nz");
    for (int i = 0; i < 1000; ++i) CHECK_FALSE(rng.nonzero_scalar().is_zero());
}

}  // TEST_SUITE
