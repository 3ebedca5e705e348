#include "pca/modelfile.hpp"

#include <cmath>

#include "doctest.h"
#include "test_util.hpp"

using namespace pca;

TEST_CASE("subset key round trip") {
    auto nb = build_neighborhood(1, 1);
    CHECK(subset_key(nb, 0) == "");
    const std::uint64_t m = 0b101;  // {-1, 1}
    CHECK(subset_key(nb, m) == "-1;1");
    CHECK(parse_subset_key(nb, "-1;1") == m);
    CHECK(parse_subset_key(nb, "") == 0);

    auto nb2 = build_neighborhood(1, 2);
    const std::uint64_t m2 = (1ULL << *nb2.index_of(site2(-1, 0))) | (1ULL << *nb2.index_of(site2(0, 1)));
    CHECK(subset_key(nb2, m2) == "-1:0;0:1");
    CHECK(parse_subset_key(nb2, "-1:0;0:1") == m2);
}

TEST_CASE("subset key grammar errors") {
    auto nb = build_neighborhood(1, 1);
    CHECK_THROWS_AS(parse_subset_key(nb, "1;-1"), ConfigError);   // unsorted
    CHECK_THROWS_AS(parse_subset_key(nb, "0;0"), ConfigError);    // duplicate
    CHECK_THROWS_AS(parse_subset_key(nb, "2"), ConfigError);      // outside I_r
    CHECK_THROWS_AS(parse_subset_key(nb, "0:1"), ConfigError);    // wrong arity
    CHECK_THROWS_AS(parse_subset_key(nb, "x"), ConfigError);
}

TEST_CASE("domany-kinzel model file expands per the transition list") {
    auto mf = ModelFile::parse(R"({"dimension":1,"radius":1,
        "spec":{"kind":"domany-kinzel","a0":0.1,"a1":0.2,"a2":0.5}})");
    auto t = mf.to_table();
    auto want = domany_kinzel(0.1, 0.2, 0.5);
    CHECK(t.p == want.p);
}

TEST_CASE("binomial2d model file") {
    const double alpha = std::ldexp(1.0, -12);
    auto mf = ModelFile::parse(R"({"dimension":2,"radius":1,
        "spec":{"kind":"binomial2d","alpha":0.000244140625}})");
    auto t = mf.to_table();
    CHECK(t.full() == doctest::Approx(512 * alpha));
    CHECK_THROWS_AS(ModelFile::parse(R"({"dimension":1,"radius":1,
        "spec":{"kind":"binomial2d","alpha":0.1}})"), ConfigError);
}

TEST_CASE("table kind must enumerate all subsets; lambda may be sparse") {
    CHECK_THROWS_AS(ModelFile::parse(R"({"dimension":1,"radius":1,
        "spec":{"kind":"table","p":{"":0.1}}})"), ConfigError);

    auto mf = ModelFile::parse(R"({"dimension":1,"radius":1,
        "spec":{"kind":"lambda","lambda":{"":0.1,"-1;1":0.2}}})");
    auto lt = mf.to_lambda();
    CHECK(lt.sum() == doctest::Approx(0.3));
    auto t = mf.to_table();
    CHECK(t.p[0] == doctest::Approx(0.1));
    CHECK(t.full() == doctest::Approx(0.3));
}

TEST_CASE("parse/serialize/parse is the identity") {
    const char* docs[] = {
        R"({"dimension":1,"radius":1,"spec":{"kind":"domany-kinzel","a0":0.1,"a1":0.2,"a2":0.5}})",
        R"({"dimension":2,"radius":1,"spec":{"kind":"binomial2d","alpha":0.0001}})",
        R"({"dimension":1,"radius":1,"spec":{"kind":"lambda","lambda":{"":0.25,"-1":0.125}}})",
    };
    for (const char* doc : docs) {
        auto mf = ModelFile::parse(doc);
        auto again = ModelFile::parse(mf.serialize());
        CHECK(mf.serialize() == again.serialize());
        CHECK(mf.digest() == again.digest());
    }
}

TEST_CASE("parse errors carry context") {
    CHECK_THROWS_AS(ModelFile::parse("{not json"), ConfigError);
    CHECK_THROWS_AS(ModelFile::parse(R"({"dimension":1})"), ConfigError);
    CHECK_THROWS_AS(ModelFile::parse(R"({"dimension":1,"radius":1,
        "spec":{"kind":"mystery"}})"), ConfigError);
    // unsorted subset key in a lambda map
    CHECK_THROWS_AS(ModelFile::parse(R"({"dimension":1,"radius":1,
        "spec":{"kind":"lambda","lambda":{"1;-1":0.1}}})"), ConfigError);
}
