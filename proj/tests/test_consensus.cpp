#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hieropinion/consensus.hpp"
#include "hieropinion/scenarios.hpp"
#include "testutil.hpp"

using namespace hieropinion;
using consensus::Regime;

namespace {

ModelConfig two_level(double f1, double f2, double s1, double s2) {
    ModelConfig cfg;
    cfg.p = 0.0;
    cfg.gamma = 0.1;
    cfg.agents = 100;
    LevelSpec a, b;
    a.h = 0.2;
    a.fraction = f1;
    a.stubborn_fraction = s1;
    b.h = 0.8;
    b.fraction = f2;
    b.stubborn_fraction = s2;
    a.ns_initial = b.ns_initial = OpinionDist::point(0.0);
    a.s_initial = b.s_initial = OpinionDist::point(0.0);
    cfg.levels = {a, b};
    return cfg;
}

} // namespace

TEST_CASE("limit_p0: stubborn mass at the top pins the whole cascade") {
    ModelConfig cfg = two_level(0.6, 0.4, 0.0, 0.5);
    cfg.levels[1].s_initial = OpinionDist::point(0.8);
    const SplitWeights sw = derive_splitting(cfg);
    const auto m = consensus::limit_p0(sw, {-0.5, 0.0});
    CHECK(std::abs(m[1] - 0.8) <= 1e-12);
    CHECK(std::abs(m[0] - 0.8) <= 1e-12);
}

TEST_CASE("limit_p0: stubborn mass only below the top") {
    ModelConfig cfg = two_level(0.5, 0.5, 0.5, 0.0);
    cfg.levels[0].s_initial = OpinionDist::point(-1.0);
    const SplitWeights sw = derive_splitting(cfg);
    const auto m = consensus::limit_p0(sw, {0.3, 1.0});
    CHECK(std::abs(m[1] - 1.0) <= 1e-12);
    CHECK(std::abs(m[0] - 1.0 / 3.0) <= 1e-12);
}

TEST_CASE("limit_p0: without stubborn agents the top opinion spreads down") {
    const ModelConfig cfg = benchmark_config(0.0, false);
    const SplitWeights sw = derive_splitting(cfg);
    const auto m = consensus::limit_p0(sw, {-0.8, 0.0, 0.9});
    for (double v : m) CHECK(v == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("limit_p0: stubborn only at the top makes all limits equal") {
    Xoshiro256 rng(808);
    testutil::RandomConfigOptions opt;
    opt.min_levels = 2;
    opt.max_levels = 6;
    opt.p = 0.0;
    opt.stubborn_top_only = true;
    opt.min_alpha = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        const ModelConfig cfg = testutil::random_config(rng, opt);
        const SplitWeights sw = derive_splitting(cfg);
        const auto m = consensus::limit_p0(sw, initial_ns_means(cfg));
        for (double v : m) CHECK(std::abs(v - m.back()) <= 1e-10);
    }
}

TEST_CASE("limit_p1 benchmark: whole-population mean without stubborn agents") {
    const ModelConfig cfg = benchmark_config(1.0, false);
    const double m = consensus::limit_p1(derive_splitting(cfg), initial_ns_means(cfg));
    CHECK(m == doctest::Approx(-0.07).epsilon(1e-12));
}

TEST_CASE("limit_p1 with equal stubborn means returns that mean") {
    ModelConfig cfg = two_level(0.5, 0.5, 0.4, 0.7);
    cfg.levels[0].s_initial = cfg.levels[1].s_initial = OpinionDist::point(0.42);
    const double m = consensus::limit_p1(derive_splitting(cfg), {0.0, 0.0});
    CHECK(m == doctest::Approx(0.42).epsilon(1e-14));
}

TEST_CASE("limit_p1 at alpha = 1 ignores the non-stubborn vector") {
    ModelConfig cfg = two_level(0.5, 0.5, 1.0, 1.0);
    cfg.levels[0].s_initial = OpinionDist::point(-0.2);
    cfg.levels[1].s_initial = OpinionDist::point(0.6);
    const double m = consensus::limit_p1(derive_splitting(cfg), {});
    CHECK(m == doctest::Approx(0.5 * -0.2 + 0.5 * 0.6).epsilon(1e-14));
}

TEST_CASE("limit_p_positive: single stubborn level") {
    ModelConfig cfg = two_level(1.0, 0.0, 0.5, 0.0);
    cfg.levels.erase(cfg.levels.begin() + 1);
    cfg.levels[0].fraction = 1.0;
    cfg.levels[0].s_initial = OpinionDist::point(0.8);
    cfg.p = 0.5;
    CHECK(consensus::limit_p_positive(cfg)[0] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("limit_p_positive agrees with long-time integration") {
    const ModelConfig cfg = benchmark_config(0.25, true);
    const auto lim = consensus::limit_p_positive(cfg);
    const auto sys = meanfield::build_system(cfg);
    const auto traj = meanfield::integrate(sys, initial_ns_means(cfg), 200.0, 0.01);
    for (std::size_t i = 0; i < lim.size(); ++i)
        CHECK(std::abs(lim[i] - traj.final_state()[i]) <= 1e-6);
}

TEST_CASE("limit_p_positive is continuous into the p = 1 case") {
    ModelConfig cfg = benchmark_config(0.999, true);
    const auto lim = consensus::limit_p_positive(cfg);
    const double p1 = consensus::limit_p1(derive_splitting(cfg), initial_ns_means(cfg));
    for (double v : lim) CHECK(std::abs(v - p1) <= 1e-2);
}

TEST_CASE("consensus_limits dispatch") {
    SUBCASE("p in (0,1) with alpha = 0 is unsolved") {
        const auto res = consensus::consensus_limits(benchmark_config(0.5, false));
        CHECK(res.regime == Regime::Unsolved);
        CHECK(res.m_inf_ns.empty());
        CHECK(res.m_inf_mixed.empty());
    }
    SUBCASE("p = 0 with stubborn agents dispatches to the recursion") {
        const ModelConfig cfg = benchmark_config(0.0, true);
        const auto res = consensus::consensus_limits(cfg);
        CHECK(res.regime == Regime::P0);
        const auto direct = consensus::limit_p0(derive_splitting(cfg), initial_ns_means(cfg));
        CHECK(res.m_inf_ns == direct);
    }
    SUBCASE("p = 1 broadcasts a single consensus value") {
        const auto res = consensus::consensus_limits(benchmark_config(1.0, true));
        CHECK(res.regime == Regime::P1AlphaPositive);
        const double mS = res.m_inf_ns[0];
        for (double v : res.m_inf_ns) CHECK(v == mS);
    }
    SUBCASE("mixed limits blend level stubborn means with the regime limit") {
        const ModelConfig cfg = benchmark_config(0.25, true);
        const auto res = consensus::consensus_limits(cfg);
        REQUIRE(res.regime == Regime::PPositiveAlphaPositive);
        const SplitWeights sw = derive_splitting(cfg);
        for (std::size_t i = 0; i < res.m_inf_ns.size(); ++i) {
            const double ai = cfg.levels[i].stubborn_fraction;
            CHECK(res.m_inf_mixed[i] ==
                  doctest::Approx(ai * sw.mS0[i] + (1.0 - ai) * res.m_inf_ns[i]).epsilon(1e-14));
        }
    }
}

TEST_CASE("consensus limits stay inside the span of the initial means") {
    Xoshiro256 rng(272727);
    for (int trial = 0; trial < 1000; ++trial) {
        testutil::RandomConfigOptions opt;
        opt.max_levels = 5;
        opt.min_alpha = 0.05;
        ModelConfig cfg = testutil::random_config(rng, opt);
        const double pick = rng.uniform01();
        cfg.p = pick < 0.25 ? 0.0 : pick < 0.5 ? 1.0 : 0.05 + 0.9 * rng.uniform01();

        const auto res = consensus::consensus_limits(cfg);
        REQUIRE(res.regime != Regime::Unsolved);

        double lo = 1.0, hi = -1.0;
        const SplitWeights sw = derive_splitting(cfg);
        for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
            lo = std::min({lo, sw.mS0[i], cfg.levels[i].ns_initial.mean()});
            hi = std::max({hi, sw.mS0[i], cfg.levels[i].ns_initial.mean()});
        }
        for (double v : res.m_inf_ns) {
            CHECK(v >= lo - 1e-9);
            CHECK(v <= hi + 1e-9);
        }
    }
}
