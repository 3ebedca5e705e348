#include "pca/model.hpp"

#include <cmath>

#include "doctest.h"
#include "test_util.hpp"

using namespace pca;

namespace {

std::uint64_t mask_of(const Neighborhood& nb, std::initializer_list<std::int32_t> xs) {
    std::uint64_t m = 0;
    for (auto x : xs) m |= 1ULL << *nb.index_of(site1(x));
    return m;
}

}  // namespace

TEST_CASE("neighborhood offsets are lexicographic") {
    auto n1 = build_neighborhood(1, 1);
    REQUIRE(n1.size() == 3);
    CHECK(n1.offset(0) == site1(-1));
    CHECK(n1.offset(1) == site1(0));
    CHECK(n1.offset(2) == site1(1));

    auto n2 = build_neighborhood(1, 2);
    REQUIRE(n2.size() == 9);  // a square of 9 sites
    CHECK(n2.offset(0) == site2(-1, -1));
    CHECK(n2.offset(4) == site2(0, 0));
    CHECK(n2.offset(8) == site2(1, 1));
    for (int i = 1; i < 9; ++i) CHECK(n2.offset(i - 1) < n2.offset(i));

    auto n3 = build_neighborhood(2, 1);
    REQUIRE(n3.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(n3.offset(i) == site1(i - 2));

    CHECK(*n1.index_of(site1(1)) == 2);
    CHECK(!n1.index_of(site1(2)));
}

TEST_CASE("neighborhood size caps") {
    CHECK_THROWS_AS(build_neighborhood(2, 3), ConfigError);  // 125 > 63
    CHECK_THROWS_AS(build_neighborhood(4, 2), ConfigError);  // 81 > 63
    auto big = build_neighborhood(1, 3);                     // 27: sparse ok, dense not
    CHECK_THROWS_AS(constant_table(big, 0.5), ConfigError);
}

TEST_CASE("mobius_lambda matches the alternating-sum oracle") {
    CounterRng rng(7, 0);
    for (int rep = 0; rep < 50; ++rep) {
        auto nb = build_neighborhood(1, 1);
        std::vector<double> p(8);
        for (auto& v : p) v = rng.next_unit();
        TransitionTable t{nb, p};
        auto brute = testutil::brute_mobius(t);
        auto lt = mobius_lambda(t);
        for (std::uint64_t m = 0; m < 8; ++m) CHECK(lt.at(m) == doctest::Approx(brute[m]).epsilon(1e-12));
    }
}

TEST_CASE("mobius_lambda on Domany-Kinzel") {
    auto t = domany_kinzel(0.1, 0.2, 0.5);
    auto lt = mobius_lambda(t);
    const auto& nb = t.nb;
    CHECK(lt.at(0) == doctest::Approx(0.1));
    CHECK(lt.at(mask_of(nb, {-1})) == doctest::Approx(0.1));
    CHECK(lt.at(mask_of(nb, {1})) == doctest::Approx(0.1));
    CHECK(lt.at(mask_of(nb, {-1, 1})) == doctest::Approx(0.2));
    CHECK(lt.at(mask_of(nb, {0})) == 0.0);
    CHECK(lt.at(mask_of(nb, {-1, 0})) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(lt.sum() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mobius_lambda trivial families") {
    auto nb = build_neighborhood(1, 1);
    auto lt = mobius_lambda(constant_table(nb, 0.37));
    CHECK(lt.at(0) == 0.37);
    for (std::uint64_t m = 1; m < 8; ++m) CHECK(lt.at(m) == 0.0);

    // p(J) = alpha 2^|J| has lambda(J) = alpha for every J
    const double alpha = std::ldexp(1.0, -10);
    auto l2 = mobius_lambda(binomial2d(alpha));
    CHECK(l2.lambda.size() == 512);
    for (const auto& [m, v] : l2.lambda) CHECK(v == doctest::Approx(alpha).epsilon(1e-10));
}

TEST_CASE("check_class on Domany-Kinzel") {
    auto good = check_class(domany_kinzel(0.1, 0.2, 0.5));
    CHECK(good.is_class_C);
    CHECK(good.ergodic);
    CHECK(good.D == doctest::Approx(0.5));
    CHECK(good.violations.empty());

    auto bad = check_class(domany_kinzel(0.0, 0.4, 0.5));
    CHECK(!bad.is_class_C);
    CHECK(!bad.ergodic);
    REQUIRE(!bad.violations.empty());
    bool found = false;
    auto nb = build_neighborhood(1, 1);
    for (const auto& [m, v] : bad.violations)
        if (m == mask_of(nb, {-1, 1})) {
            found = true;
            CHECK(v == doctest::Approx(-0.3));
        }
    CHECK(found);
}

TEST_CASE("check_class 2-D binomial") {
    auto rep = check_class(binomial2d(std::ldexp(1.0, -10)));
    CHECK(rep.is_class_C);
    CHECK(rep.ergodic);  // alpha * 2^9 = 0.5 < 1
    CHECK(rep.D == doctest::Approx(0.5));
}

TEST_CASE("lambda(J) = 1 exactly is rejected from class C") {
    auto nb = build_neighborhood(1, 1);
    auto rep = check_class(constant_table(nb, 1.0));  // lambda(empty) = 1
    CHECK(!rep.is_class_C);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].first == 0);
}

TEST_CASE("dobrushin gamma") {
    CHECK(dobrushin_gamma(domany_kinzel(0.1, 0.2, 0.5)) == doctest::Approx(0.6));  // 2(a2-a1)
    CHECK(dobrushin_gamma(constant_table(build_neighborhood(1, 1), 0.3)) == 0.0);
    const double alpha = std::ldexp(1.0, -12);
    CHECK(dobrushin_gamma(binomial2d(alpha)) == doctest::Approx(2304.0 * alpha));  // 9*2^8 alpha
}

TEST_CASE("round trip, monotonicity, normalization, gamma identity on random class-C tables") {
    CounterRng rng(42, 1);
    int done = 0;
    for (int rep = 0; rep < 200; ++rep) {
        Neighborhood nb = rep % 3 == 0   ? build_neighborhood(1, 1)
                          : rep % 3 == 1 ? build_neighborhood(2, 1)
                                         : build_neighborhood(1, 2);
        const double D = 0.05 + 0.9 * rng.next_unit();
        auto t = testutil::random_class_c(nb, D, rng);
        auto lt = mobius_lambda(t);
        auto back = table_from_lambda(lt);

        double max_err = 0.0;
        for (std::size_t m = 0; m < t.p.size(); ++m)
            max_err = std::max(max_err, std::abs(t.p[m] - back.p[m]));
        CHECK(max_err <= 1e-12);

        // attractiveness: p(J u {j}) >= p(J)
        for (std::size_t m = 0; m < t.p.size(); ++m)
            for (int j = 0; j < nb.size(); ++j) {
                if (m >> j & 1) continue;
                CHECK(t.p[m | (1ULL << j)] >= t.p[m] - 1e-12);
            }

        auto rep_c = check_class(t);
        REQUIRE(rep_c.is_class_C);
        CHECK(std::abs(lt.sum() / rep_c.D - 1.0) <= 1e-9);  // pi sums to 1
        CHECK(std::abs(rep_c.gamma - lt.weighted_sum()) <= 1e-9);
        ++done;
    }
    CHECK(done == 200);
}

TEST_CASE("check_class agrees with brute-force alternating inequalities, r=1 d=1") {
    CounterRng rng(99, 0);
    auto nb = build_neighborhood(1, 1);
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<double> p(8);
        for (auto& v : p) v = rng.next_unit() < 0.5 ? rng.next_unit() : std::round(rng.next_unit() * 4) / 4;
        TransitionTable t{nb, p};
        auto brute = testutil::brute_mobius(t);
        bool brute_ok = true;
        for (double lam : brute) brute_ok = brute_ok && lam >= -kLambdaNegTol && lam < 1.0;
        CHECK(check_class(t).is_class_C == brute_ok);
    }
}

TEST_CASE("sparse lambda route") {
    auto nb = build_neighborhood(1, 3);  // 27 sites: dense is off limits
    LambdaTable lt{nb, {}};
    lt.lambda[0] = 0.1;
    lt.lambda[(1ULL << 26) | 1ULL] = 0.3;
    auto rep = check_class(lt);
    CHECK(rep.is_class_C);
    CHECK(rep.D == doctest::Approx(0.4));
    CHECK(rep.ergodic);
    CHECK(rep.gamma == doctest::Approx(0.6));  // 0.3 * |J|=2

    lt.lambda[2] = -0.05;
    auto bad = check_class(lt);
    CHECK(!bad.is_class_C);
    CHECK(std::isnan(bad.gamma));
}
