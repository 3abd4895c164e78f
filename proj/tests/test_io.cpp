#include <doctest.h>

#include <sstream>

#include "hieropinion/io.hpp"
#include "hieropinion/scenarios.hpp"
#include "hieropinion/timeseries.hpp"
#include "testutil.hpp"

using namespace hieropinion;

TEST_CASE("config JSON round trip") {
    Xoshiro256 rng(314);
    for (int trial = 0; trial < 50; ++trial) {
        const ModelConfig cfg = testutil::random_config(rng);
        const ModelConfig back = io::config_from_json(io::to_json(cfg));
        REQUIRE(back.levels.size() == cfg.levels.size());
        CHECK(back.p == cfg.p);
        CHECK(back.gamma == cfg.gamma);
        CHECK(back.agents == cfg.agents);
        for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
            CHECK(back.levels[i].h == cfg.levels[i].h);
            CHECK(back.levels[i].fraction == cfg.levels[i].fraction);
            CHECK(back.levels[i].stubborn_fraction == cfg.levels[i].stubborn_fraction);
            CHECK(back.levels[i].ns_initial.a == cfg.levels[i].ns_initial.a);
            CHECK(back.levels[i].ns_initial.b == cfg.levels[i].ns_initial.b);
        }
    }
}

TEST_CASE("config document parses field for field") {
    const char* doc = R"({
      "p": 0.25, "gamma": 0.01, "agents": 10000,
      "levels": [
        {"h": 0.0, "fraction": 0.2, "stubborn_fraction": 0.5,
         "ns_initial": {"type": "uniform", "a": -0.9, "b": -0.7}},
        {"h": 0.4, "fraction": 0.7, "stubborn_fraction": 0.3,
         "ns_initial": {"type": "uniform", "a": -0.5, "b": 0.5},
         "s_initial": {"type": "point", "x": 0.1}},
        {"h": 1.0, "fraction": 0.1, "stubborn_fraction": 0.8,
         "ns_initial": {"type": "quantiles", "values": [0.8, 0.9, 1.0]}}
      ]})";
    const ModelConfig cfg = io::config_from_json(nlohmann::json::parse(doc));
    CHECK(validate(cfg).ok());
    CHECK(cfg.p == 0.25);
    CHECK(cfg.levels.size() == 3);
    // omitted s_initial falls back to the level's non-stubborn distribution
    CHECK(cfg.levels[0].s_initial.kind == DistKind::Uniform);
    CHECK(cfg.levels[0].s_initial.a == -0.9);
    CHECK(cfg.levels[1].s_initial.kind == DistKind::Point);
    CHECK(cfg.levels[2].ns_initial.kind == DistKind::Quantiles);
}

TEST_CASE("unknown distribution type is rejected") {
    const auto j = nlohmann::json{{"type", "gaussian"}, {"mu", 0.0}};
    CHECK_THROWS_AS((void)io::dist_from_json(j), io::IoError);
}

namespace {

TimeSeries random_timeseries(Xoshiro256& rng) {
    TimeSeries ts;
    const std::size_t n_levels = 1 + rng.below(4);
    for (std::size_t i = 0; i < n_levels; ++i) ts.level_h.push_back(rng.uniform01());
    const std::size_t n_times = 1 + rng.below(6);
    std::vector<double> m(n_levels), v(n_levels), s(n_levels);
    for (std::size_t t = 0; t < n_times; ++t) {
        for (std::size_t i = 0; i < n_levels; ++i) {
            m[i] = -1.0 + 2.0 * rng.uniform01();
            v[i] = rng.uniform01();
            s[i] = 2.0 * rng.uniform01();
        }
        ts.append_row(double(t) * 0.37 + rng.uniform01() * 1e-6, m, v, s,
                      -1.0 + 2.0 * rng.uniform01());
    }
    return ts;
}

} // namespace

TEST_CASE("time series CSV round trip is bit exact") {
    Xoshiro256 rng(2718);
    for (int trial = 0; trial < 50; ++trial) {
        const TimeSeries ts = random_timeseries(rng);
        std::stringstream buf;
        write_csv(ts, buf);
        const TimeSeries back = read_csv(buf);
        CHECK(back.times == ts.times);
        CHECK(back.level_h == ts.level_h);
        CHECK(back.mean_ns == ts.mean_ns);
        CHECK(back.var_ns == ts.var_ns);
        CHECK(back.support_ns == ts.support_ns);
        CHECK(back.mean_all == ts.mean_all);
    }
}

TEST_CASE("time series CSV header is the stable schema") {
    TimeSeries ts;
    ts.level_h = {0.0};
    ts.append_row(0.0, {0.1}, {0.2}, {0.3}, 0.4);
    std::stringstream buf;
    write_csv(ts, buf);
    std::string header;
    std::getline(buf, header);
    CHECK(header == "t,level,h,mean_ns,var_ns,support_ns,mean_all");
}

TEST_CASE("time series JSON round trip") {
    Xoshiro256 rng(1618);
    const TimeSeries ts = random_timeseries(rng);
    const TimeSeries back = timeseries_from_json(to_json(ts));
    CHECK(back.times == ts.times);
    CHECK(back.mean_ns == ts.mean_ns);
}

TEST_CASE("consensus result JSON") {
    const auto solved = consensus::consensus_limits(benchmark_config(0.0, true));
    const auto js = io::to_json(solved);
    CHECK(js.at("regime") == "P0");
    CHECK(js.at("m_inf_ns").size() == 3);
    CHECK(js.at("m_inf_mixed").size() == 3);

    const auto open = consensus::consensus_limits(benchmark_config(0.5, false));
    const auto jo = io::to_json(open);
    CHECK(jo.at("regime") == "UNSOLVED");
    CHECK_FALSE(jo.contains("m_inf_ns"));
}

TEST_CASE("ensemble_mean averages aligned runs and rejects misaligned ones") {
    TimeSeries a, b;
    a.level_h = b.level_h = {0.5};
    a.append_row(0.0, {0.2}, {0.0}, {0.0}, 0.2);
    b.append_row(0.0, {0.4}, {0.0}, {0.0}, 0.4);
    const TimeSeries m = ensemble_mean({a, b});
    CHECK(m.mean_ns[0] == doctest::Approx(0.3).epsilon(1e-15));

    TimeSeries c;
    c.level_h = {0.5};
    c.append_row(1.0, {0.4}, {0.0}, {0.0}, 0.4);
    CHECK_THROWS_AS((void)ensemble_mean({a, c}), std::invalid_argument);
}
