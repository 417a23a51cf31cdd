#include "wbqa/rng.hpp"
#include "wbqa/util.hpp"

#include <doctest.h>

#include <set>

using namespace wbqa;

TEST_CASE("trim / fold strip whitespace and case") {
    CHECK(trim("  a b \t\n") == "a b");
    CHECK(trim("") == "");
    CHECK(trim("   ") == "");
    CHECK(fold("  Population, Total ") == "population, total");
    CHECK(upper("gha") == "GHA");
    CHECK(lower("GHA") == "gha");
}

TEST_CASE("tokenize splits into lowercased alphanumeric runs") {
    CHECK(tokenize("Rail lines (total route-km)") ==
          std::vector<std::string>{"rail", "lines", "total", "route", "km"});
    CHECK(tokenize("Agricultural land (sq. km)") ==
          std::vector<std::string>{"agricultural", "land", "sq", "km"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("--- ***") == std::vector<std::string>{});
    CHECK(tokenize("CO2 emissions") == std::vector<std::string>{"co2", "emissions"});
}

TEST_CASE("join concatenates with separator") {
    CHECK(join({"a", "b", "c"}, ", ") == "a, b, c");
    CHECK(join({}, ", ") == "");
    CHECK(join({"solo"}, "|") == "solo");
}

TEST_CASE("edit_distance is a folded levenshtein") {
    CHECK(edit_distance("kitten", "sitting") == 3);
    CHECK(edit_distance("Ghana", "ghana") == 0);
    CHECK(edit_distance("", "abc") == 3);
    CHECK(edit_distance("abc", "abc") == 0);
}

TEST_CASE("approx_eq honors relative and absolute tolerance") {
    CHECK(approx_eq(1.0, 1.0 + 1e-12, 1e-9, 1e-12));
    CHECK_FALSE(approx_eq(1.0, 1.001, 1e-9, 1e-12));
    CHECK(approx_eq(0.0, 1e-13, 1e-9, 1e-12));
    CHECK_FALSE(approx_eq(0.0, 1e-6, 1e-9, 1e-12));
    CHECK(approx_eq(1e15, 1e15 * (1 + 1e-10), 1e-9, 1e-12));
}

TEST_CASE("number_value renders integral doubles as integers") {
    CHECK(number_value(5.0).dump() == "5");
    CHECK(number_value(-3.0).dump() == "-3");
    CHECK(number_value(2.5).is_number_float());
    CHECK(render_number(5.0) == "5");
    CHECK(render_number(2.5).find('.') != std::string::npos);
}

TEST_CASE("coerce_number accepts numbers and numeric strings") {
    double v = 0;
    CHECK(coerce_number(json(3), v));
    CHECK(v == 3.0);
    CHECK(coerce_number(json(2.5), v));
    CHECK(v == 2.5);
    CHECK(coerce_number(json("4.25"), v));
    CHECK(v == 4.25);
    CHECK(coerce_number(json("  7 "), v));
    CHECK(v == 7.0);
    CHECK_FALSE(coerce_number(json("not a number"), v));
    CHECK_FALSE(coerce_number(json(nullptr), v));
    CHECK_FALSE(coerce_number(json::array(), v));
}

TEST_CASE("semantic_eq is tolerant where the file formats require it") {
    SUBCASE("numbers within relative tolerance") {
        CHECK(semantic_eq(json(1.0), json(1.0 + 1e-12)));
        CHECK_FALSE(semantic_eq(json(1.0), json(1.01)));
        CHECK(semantic_eq(json(5), json(5.0)));
    }
    SUBCASE("numeric strings coerce") {
        CHECK(semantic_eq(json("5"), json(5)));
        CHECK(semantic_eq(json(5), json("5.0")));
    }
    SUBCASE("strings fold") {
        CHECK(semantic_eq(json("Ghana "), json("ghana")));
        CHECK_FALSE(semantic_eq(json("Ghana"), json("Ghanaian")));
    }
    SUBCASE("arrays compare as multisets") {
        CHECK(semantic_eq(json::parse("[1,2,3]"), json::parse("[3,1,2]")));
        CHECK_FALSE(semantic_eq(json::parse("[1,2,2]"), json::parse("[1,1,2]")));
        CHECK_FALSE(semantic_eq(json::parse("[1,2]"), json::parse("[1,2,3]")));
        CHECK(semantic_eq(json::parse(R"(["a","B"])"), json::parse(R"(["b","A"])")));
    }
    SUBCASE("objects compare key-by-key regardless of insertion order") {
        json a = json::object();
        a["x"] = 1;
        a["y"] = 2;
        json b = json::object();
        b["y"] = 2.0;
        b["x"] = 1.0;
        CHECK(semantic_eq(a, b));
        b["z"] = 3;
        CHECK_FALSE(semantic_eq(a, b));
    }
    SUBCASE("mixed types differ") {
        CHECK_FALSE(semantic_eq(json(true), json(1)));
        CHECK_FALSE(semantic_eq(json(nullptr), json(0)));
        CHECK(semantic_eq(json(true), json(true)));
    }
}

TEST_CASE("rng streams are deterministic and derivable") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

    Rng c(Rng::derive(7, "AverageChange"));
    Rng d(Rng::derive(7, "AverageChange"));
    Rng e(Rng::derive(7, "TotalProperty"));
    CHECK(c.next() == d.next());
    CHECK(Rng::derive(7, "AverageChange") != Rng::derive(7, "TotalProperty"));
    CHECK(Rng::derive(7, "AverageChange") != Rng::derive(8, "AverageChange"));
    (void)e;
}

TEST_CASE("rng range and pick stay in bounds") {
    Rng r(3);
    for (int i = 0; i < 1000; ++i) {
        const int v = r.range(2005, 2008);
        CHECK(v >= 2005);
        CHECK(v <= 2008);
    }
    std::set<int> hit;
    Rng r2(5);
    for (int i = 0; i < 200; ++i) hit.insert(r2.range(1, 4));
    CHECK(hit == std::set<int>{1, 2, 3, 4});

    std::vector<std::string> items{"a", "b", "c"};
    Rng r3(9);
    for (int i = 0; i < 50; ++i) {
        const std::string& s = r3.pick(items);
        CHECK((s == "a" || s == "b" || s == "c"));
    }
}
