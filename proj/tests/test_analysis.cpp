#include "pca/analysis.hpp"

#include <cmath>

#include "doctest.h"
#include "test_util.hpp"

using namespace pca;

TEST_CASE("decay constants for Domany-Kinzel [1]x[1]") {
    auto u = decompose(Pattern::from_word("1", 0));
    auto c = decay_constants(u, u, 0.5, 1);
    CHECK(c.a == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-12));  // 0.346574
    CHECK(c.F == doctest::Approx(1.0));                                // 1*1*0.5/0.5
    CHECK(c.K == doctest::Approx(2.0));                                // F * 0.5^{-1}
    CHECK(c.K >= c.F);
}

TEST_CASE("decay constants degenerate and monotone in D") {
    auto u = decompose(Pattern::from_word("1", 0));
    CHECK_THROWS_AS(decay_constants(u, u, 0.0, 1), DegenerateModelError);
    CHECK_THROWS_AS(decay_constants(u, u, 1.0, 1), ConfigError);
    double prev_a = 0.0;
    for (double D : {0.9, 0.7, 0.5, 0.3, 0.1}) {
        auto c = decay_constants(u, u, D, 1);
        CHECK(c.a > prev_a);  // smaller D, faster decay
        prev_a = c.a;
    }
}

TEST_CASE("correlation curve is zero for product measures") {
    ProductProvider prov(0.3);
    auto u = decompose(Pattern::from_word("10", 0));
    auto v = decompose(Pattern::from_word("1", 0));
    auto constants = decay_constants(u, v, 0.3, 1);
    auto pts = correlation_curve(u, v, 3, 10, prov, constants);
    REQUIRE(pts.size() == 8);
    for (const auto& pt : pts) {
        CHECK(pt.corr <= 1e-12);
        CHECK(pt.corr <= pt.envelope + 1e-12);
    }
}

TEST_CASE("correlation curve enforces the t threshold") {
    ProductProvider prov(0.3);
    auto u = decompose(Pattern::from_word("1", 0));
    auto constants = decay_constants(u, u, 0.3, 1);
    CHECK_THROWS_AS(correlation_curve(u, u, 1, 5, prov, constants), ConfigError);
}

TEST_CASE("envelope holds for Domany-Kinzel with the exact provider") {
    auto kernel = dual_kernel(domany_kinzel(0.1, 0.2, 0.5));
    ExactProvider prov(kernel, 40);
    auto u = decompose(Pattern::from_word("1", 0));
    auto constants = decay_constants(u, u, 0.5, 1);
    auto pts = correlation_curve(u, u, 2, 8, prov, constants);
    for (const auto& pt : pts) CHECK(pt.corr <= pt.envelope + pt.error);
}

TEST_CASE("truncated factorization inequality from the decay proof") {
    auto kernel = dual_kernel(domany_kinzel(0.1, 0.2, 0.5));
    const double D = kernel.D();
    TransitionCache tc;
    for (int N : {2, 4}) {
        // single-site pieces keep the deep joint DP tractable; multi-site
        // factorization at matched depth is covered in test_dual
        const SiteSet e = make_set({0});
        const SiteSet f = make_set({0});
        const int s = 2 + 2 * N;
        auto me = mu_hat_exact(e, kernel, 35, 10'000'000, &tc);
        auto mf = mu_hat_exact(f, kernel, 35, 10'000'000, &tc);
        auto joint = mu_hat_exact(set_union(e, shifted(f, site1(s))), kernel, 35, 10'000'000, &tc);
        const double bound = std::pow(D, N + 1) / (1.0 - D);
        CHECK(std::abs(joint.value - me.value * mf.value) <=
              bound + me.det_error + mf.det_error + joint.det_error);
    }
}

TEST_CASE("dobrushin comparison report") {
    auto strong = dobrushin_report(domany_kinzel(0.1, 0.2, 0.9));
    CHECK(strong.duality_applies);       // D = 0.9 < 1
    CHECK(!strong.dobrushin_applies);    // gamma = 2(0.9-0.2) = 1.4
    CHECK(strong.gamma == doctest::Approx(1.4));

    auto both = dobrushin_report(binomial2d(std::ldexp(1.0, -12)));
    CHECK(both.duality_applies);
    CHECK(both.dobrushin_applies);
    CHECK(both.D == doctest::Approx(0.125));
    CHECK(both.gamma == doctest::Approx(0.5625));
    CHECK(both.D < both.gamma);
    CHECK(both.rate_duality > both.rate_dobrushin);

    auto c = dobrushin_report(constant_table(build_neighborhood(1, 1), 0.3));
    CHECK(c.duality_applies);
    CHECK(c.dobrushin_applies);
    CHECK(c.gamma == 0.0);
}

TEST_CASE("correlation CSV format") {
    std::vector<CorrelationPoint> pts{{2, 0.125, 1e-9, 0.5, false}};
    auto csv = correlation_csv(pts);
    CHECK(csv.substr(0, 20) == "t,corr,err,envelope\n");
    CHECK(csv.find("2,0.125,1e-09,0.5\n") != std::string::npos);
}
