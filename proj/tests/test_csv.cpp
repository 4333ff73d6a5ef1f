#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "tvcsim/csv.hpp"

using namespace tvcsim;

namespace {
std::string temp_path(const char* name) {
    return std::string("/tmp/tvcsim_test_") + name + ".csv";
}
} // namespace

TEST_SUITE("csv") {

TEST_CASE("format_full round-trips finite doubles exactly") {
    const double values[] = {0.1,    1.0 / 3.0, 6.02e23, 1e-308, -0.0,
                             12345.6789, 3.5355339059327378, -2.5e-7};
    for (double v : values) CHECK(parse_field(format_full(v)) == v);
}

TEST_CASE("non-finite values use the inf/nan literals") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(format_full(inf) == "inf");
    CHECK(format_full(-inf) == "-inf");
    CHECK(format_full(std::nan("")) == "nan");
    CHECK(parse_field("inf") == inf);
    CHECK(parse_field("-inf") == -inf);
    CHECK(std::isnan(parse_field("nan")));
    CHECK_THROWS(parse_field("not-a-number"));
    CHECK_THROWS(parse_field(""));
}

TEST_CASE("writer and reader round-trip a table bitwise") {
    const std::string path = temp_path("roundtrip");
    {
        CsvWriter w(path, {"a", "b"});
        w.row({0.1, -2.5e-7});
        w.row({1.0 / 3.0, 6.02e23});
    }
    CsvTable t = read_csv(path);
    REQUIRE(t.header.size() == 2);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.column("a") == 0);
    CHECK(t.column("b") == 1);
    CHECK_THROWS(t.column("missing"));
    CHECK(t.rows[0][0] == 0.1);
    CHECK(t.rows[0][1] == -2.5e-7);
    CHECK(t.rows[1][0] == 1.0 / 3.0);
    CHECK(t.rows[1][1] == 6.02e23);
    std::remove(path.c_str());
}

TEST_CASE("row width must match the header") {
    const std::string path = temp_path("width");
    CsvWriter w(path, {"a", "b", "c"});
    CHECK_THROWS(w.row({1.0, 2.0}));
    w.close();
    std::remove(path.c_str());
}

} // TEST_SUITE
