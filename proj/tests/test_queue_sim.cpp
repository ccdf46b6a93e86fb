#include <catch2/catch_amalgamated.hpp>

#include <qcap/queue_sim.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

using namespace qcap;

namespace {

QueueConfig mm1(double lambda, std::int64_t n, std::uint64_t seed,
                WaitingConvention conv = WaitingConvention::Delay) {
    QueueConfig cfg{lambda, DistributionSpec(Exponential{lambda}),
                    DistributionSpec(Exponential{1.0}), conv, n, -1, seed};
    return cfg;
}

} // namespace

TEST_CASE("an uncontended deterministic queue never waits", "[queue_sim]") {
    QueueConfig cfg{0.5, DistributionSpec(Deterministic{2.0}), DistributionSpec(Deterministic{1.0}),
                    WaitingConvention::Delay, 50, 0, 1};
    const auto tr = simulate(cfg);
    REQUIRE(tr.size() == 50);
    for (double w : tr.waiting) REQUIRE(w == 0.0);
    for (std::size_t j = 0; j < tr.size(); ++j) {
        REQUIRE(tr.arrival[j] == Catch::Approx(2.0 * double(j + 1)).epsilon(1e-15));
        REQUIRE(tr.departure[j] == tr.arrival[j] + 1.0);
    }

    cfg.convention = WaitingConvention::Sojourn;
    const auto sj = simulate(cfg);
    for (double w : sj.waiting) REQUIRE(w == 1.0);
}

TEST_CASE("the first symbol never queues", "[queue_sim]") {
    for (auto conv : {WaitingConvention::Delay, WaitingConvention::Sojourn}) {
        QueueConfig cfg{0.5, DistributionSpec(Exponential{0.5}), DistributionSpec(Exponential{1.0}),
                        conv, 1, 0, 9};
        const auto tr = simulate(cfg);
        REQUIRE(tr.size() == 1);
        if (conv == WaitingConvention::Delay) {
            REQUIRE(tr.waiting[0] == 0.0);
        } else {
            REQUIRE(tr.waiting[0] == tr.service[0]);
        }
    }
}

TEST_CASE("queueing recursion invariants hold bitwise", "[queue_sim]") {
    const auto tr = simulate(mm1(0.7, 20000, 42));
    REQUIRE(tr.waiting[0] == 0.0);
    for (std::size_t j = 1; j < tr.size(); ++j) {
        const double gap = tr.arrival[j] - tr.arrival[j - 1];
        const double expect = std::max(0.0, tr.waiting[j - 1] + tr.service[j - 1] - gap);
        REQUIRE(tr.waiting[j] == expect); // exact, not approximate
    }
    for (std::size_t j = 1; j < tr.size(); ++j) {
        REQUIRE(tr.arrival[j] >= tr.arrival[j - 1]);
        REQUIRE(tr.departure[j] >= tr.departure[j - 1]);
    }
    for (std::size_t j = 0; j < tr.size(); ++j) {
        REQUIRE(tr.departure[j] >= tr.arrival[j] + tr.service[j]);
        REQUIRE(tr.departure[j] ==
                Catch::Approx(tr.arrival[j] + tr.waiting[j] + tr.service[j]).margin(1e-9));
    }
}

TEST_CASE("sojourn waiting is never below service and tracks departure minus arrival",
          "[queue_sim]") {
    const auto tr = simulate(mm1(0.7, 20000, 42, WaitingConvention::Sojourn));
    for (std::size_t j = 0; j < tr.size(); ++j) {
        // delay + service: >= service holds bitwise; D - A only to rounding,
        // because the epochs grow while the waits stay O(1)
        REQUIRE(tr.waiting[j] >= tr.service[j]);
        REQUIRE(tr.waiting[j] ==
                Catch::Approx(tr.departure[j] - tr.arrival[j]).margin(1e-9));
    }
}

TEST_CASE("conventions share the same sample path", "[queue_sim]") {
    const auto d = simulate(mm1(0.6, 5000, 11, WaitingConvention::Delay));
    const auto s = simulate(mm1(0.6, 5000, 11, WaitingConvention::Sojourn));
    REQUIRE(d.arrival == s.arrival);
    REQUIRE(d.service == s.service);
    REQUIRE(d.departure == s.departure);
    for (std::size_t j = 0; j < d.size(); ++j)
        REQUIRE(s.waiting[j] == d.waiting[j] + d.service[j]);
}

TEST_CASE("mean queueing delay matches the birth-death formula", "[queue_sim]") {
    // lambda=0.5, mu=1: E[delay] = rho/(mu-lambda) = 1
    const auto tr = simulate(mm1(0.5, 400000, 77));
    const auto est = stationary_mean(tr, [](double w) { return w; });
    REQUIRE(est.std_error > 0.0);
    REQUIRE(std::abs(est.mean - 1.0) < 4 * est.std_error);
}

TEST_CASE("transform of the queueing delay matches the closed form", "[queue_sim]") {
    // lambda=0.5, kappa=1: E[e^{-W}] = (1-lambda)(1+kappa)/(1+kappa-lambda) = 2/3
    const auto tr = simulate(mm1(0.5, 400000, 123));
    const auto est = stationary_mean(tr, [](double w) { return std::exp(-w); });
    REQUIRE(std::abs(est.mean - 2.0 / 3.0) < 4 * est.std_error);
}

TEST_CASE("simulation is deterministic given a seed", "[queue_sim]") {
    const auto a = simulate(mm1(0.5, 5000, 2024));
    const auto b = simulate(mm1(0.5, 5000, 2024));
    REQUIRE(a.arrival == b.arrival);
    REQUIRE(a.service == b.service);
    REQUIRE(a.departure == b.departure);
    REQUIRE(a.waiting == b.waiting);
    const auto c = simulate(mm1(0.5, 5000, 2025));
    REQUIRE(a.waiting != c.waiting);
}

TEST_CASE("independent replicas agree within their combined error", "[queue_sim]") {
    const auto f = [](double w) { return std::exp(-w); };
    const auto a = stationary_mean(simulate(mm1(0.8, 300000, 1)), f);
    const auto b = stationary_mean(simulate(mm1(0.8, 300000, 2)), f);
    const double combined = std::hypot(a.std_error, b.std_error);
    REQUIRE(std::abs(a.mean - b.mean) < 4 * combined);
}

TEST_CASE("warmup defaults scale with the run length", "[queue_sim]") {
    REQUIRE(default_warmup(100) == 99);
    REQUIRE(default_warmup(20000) == 10000);
    REQUIRE(default_warmup(5000000) == 50000);
    const auto tr = simulate(mm1(0.5, 30000, 5));
    REQUIRE(tr.warmup == 10000);
    REQUIRE(tr.post_warmup_waiting().size() == 20000);
}

TEST_CASE("invalid configurations are rejected", "[queue_sim]") {
    REQUIRE_THROWS_AS(simulate(mm1(0.5, 0, 1)), ValidationError);
    // unstable: lambda >= mu
    REQUIRE_THROWS_AS(simulate(mm1(1.0, 100, 1)), StabilityError);
    REQUIRE_THROWS_AS(simulate(mm1(1.5, 100, 1)), StabilityError);
    // arrival law inconsistent with the declared rate
    QueueConfig bad{0.5, DistributionSpec(Exponential{0.7}), DistributionSpec(Exponential{1.0}),
                    WaitingConvention::Delay, 100, 0, 1};
    REQUIRE_THROWS_AS(simulate(bad), ValidationError);
    // warmup must leave at least one symbol
    QueueConfig w{0.5, DistributionSpec(Exponential{0.5}), DistributionSpec(Exponential{1.0}),
                  WaitingConvention::Delay, 100, 100, 1};
    REQUIRE_THROWS_AS(simulate(w), ValidationError);
    // too few post-warmup samples for a stationary estimate
    QueueConfig tiny{0.5, DistributionSpec(Exponential{0.5}), DistributionSpec(Exponential{1.0}),
                     WaitingConvention::Delay, 25, 10, 1};
    const auto tr = simulate(tiny);
    REQUIRE_THROWS_AS(stationary_mean(tr, [](double w2) { return w2; }), ValidationError);
}

TEST_CASE("trace export is exact and round-trips", "[queue_sim]") {
    const auto tr = simulate(mm1(0.5, 40, 31));
    std::ostringstream os;
    write_trace_csv(os, tr);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    REQUIRE(header == "j,A,S,D,W");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(is, line)) {
        REQUIRE(!line.empty());
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        REQUIRE(std::stoull(cell) == rows);
        double vals[4];
        for (double& v : vals) {
            std::getline(row, cell, ',');
            v = std::stod(cell);
        }
        REQUIRE(vals[0] == tr.arrival[rows]); // %.17g round-trips doubles exactly
        REQUIRE(vals[1] == tr.service[rows]);
        REQUIRE(vals[2] == tr.departure[rows]);
        REQUIRE(vals[3] == tr.waiting[rows]);
        ++rows;
    }
    REQUIRE(rows == tr.size());
    REQUIRE(os.str().find('\r') == std::string::npos); // LF endings
}
