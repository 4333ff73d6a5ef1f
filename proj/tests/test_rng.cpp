#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "tvcsim/rng.hpp"

using namespace tvcsim;

TEST_SUITE("rng") {

TEST_CASE("stream seeds are a pure function of (master, case, name)") {
    CHECK(derive_stream_seed(7, 3, "gyro") == derive_stream_seed(7, 3, "gyro"));
    CHECK(derive_stream_seed(7, 3, "gyro") != derive_stream_seed(7, 3, "attitude"));
    CHECK(derive_stream_seed(7, 3, "gyro") != derive_stream_seed(7, 4, "gyro"));
    CHECK(derive_stream_seed(7, 3, "gyro") != derive_stream_seed(8, 3, "gyro"));
}

TEST_CASE("seed derivation spreads over cases without collisions") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t c = 0; c < 256; ++c)
        seen.insert(derive_stream_seed(0, c, "gyro"));
    CHECK(seen.size() == 256);
}

TEST_CASE("uniform samples stay inside the open unit interval") {
    GaussianStream g(123);
    for (int i = 0; i < 10000; ++i) {
        const double u = g.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("identical seeds replay identical sequences") {
    GaussianStream a(99), b(99);
    for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("normal stream has unit moments") {
    GaussianStream g(2024);
    const int n = 200000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        const double x = g.next();
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}

} // TEST_SUITE
