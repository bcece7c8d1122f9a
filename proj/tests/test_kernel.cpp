#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hnp3/kernel.hpp"
#include "hnp3/types.hpp"
#include "test_util.hpp"

using namespace hnp3;

TEST_CASE("kernel_eval basics") {
    CHECK(kernel_eval(1.0, 5.0, 5.0) == 1.0);
    CHECK(kernel_eval(1e-14, 7.0, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(kernel_eval(0.5, 4.0, 2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(kernel_eval(1.0, 1.0, 2.0), std::domain_error);
}

TEST_CASE("kernel_integral closed form") {
    CHECK(kernel_integral(1.0, 0.0, 0.0, 0.0) == 0.0);
    CHECK(kernel_integral(1.0, 0.0, 0.0, std::numeric_limits<double>::infinity()) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // source inside the interval
    CHECK(kernel_integral(2.0, 1.0, 0.0, 1.0) == 0.0);
    CHECK_THROWS_AS(kernel_integral(1.0, 0.0, 2.0, 1.0), std::domain_error);

    const double direct = testutil::adaptive_simpson(
        [](double tau) { return std::exp(-0.5 * (tau - 1.0)); }, 2.0, 4.0);
    CHECK(kernel_integral(0.5, 1.0, 2.0, 4.0) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("kernel_integral matches quadrature on random configs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> beta_dist(0.01, 10.0);
    std::uniform_real_distribution<double> span_dist(0.0, 1000.0);
    for (int i = 0; i < 100; ++i) {
        const double beta = beta_dist(rng);
        const double t_s = span_dist(rng);
        const double a = t_s + span_dist(rng) / 200.0;
        const double b = a + span_dist(rng) / 100.0 + 1e-3;
        const double expected = testutil::adaptive_simpson(
            [&](double tau) { return tau < t_s ? 0.0 : std::exp(-beta * (tau - t_s)); }, a, b);
        const double got = kernel_integral(beta, t_s, a, b);
        CHECK(got == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("decayed counter basics") {
    DecayedCounter c;
    CHECK(c.read(123.0, 0.7) == 0.0);

    c.bump(0.0, 0.0, 3.0);
    CHECK(c.read(57.0, 0.0) == 3.0);

    DecayedCounter d;
    d.bump(10.0, 0.1, 1.0);
    CHECK(d.read(20.0, 0.1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(d.read(9.0, 0.1), std::domain_error);
}

TEST_CASE("decayed counter bump accumulates") {
    DecayedCounter c;
    c.bump(0.0, 0.0, 1.0);
    CHECK(c.read(0.0, 0.0) == 1.0);
    c.bump(1.0, 0.0, 1.0);
    CHECK(c.read(1.0, 0.0) == 2.0);

    DecayedCounter d;
    const double nu = 0.5;
    for (double t : {0.0, 1.0, 2.0}) d.bump(t, nu, 1.0);
    double expected = 0.0;
    for (double t : {0.0, 1.0, 2.0}) expected += std::exp(-nu * (3.0 - t));
    CHECK(d.read(3.0, nu) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("lazy counter equals brute-force sum on random sequences") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> gap(0.0, 3.0);
    std::uniform_real_distribution<double> amount(0.1, 2.0);
    for (double nu : {0.0, 0.05, 1.0, 4.0}) {
        DecayedCounter c;
        std::vector<std::pair<double, double>> bumps;
        double t = 0.0;
        for (int i = 0; i < 200; ++i) {
            t += gap(rng);
            if (i % 3 == 0) {
                const double a = amount(rng);
                c.bump(t, nu, a);
                bumps.emplace_back(t, a);
            } else {
                double expected = 0.0;
                for (const auto& [tb, ab] : bumps) expected += ab * std::exp(-nu * (t - tb));
                const double got = c.read(t, nu);
                if (expected > 0.0) {
                    CHECK(got == doctest::Approx(expected).epsilon(1e-9));
                } else {
                    CHECK(got == 0.0);
                }
            }
        }
    }
}

TEST_CASE("branching records stay consistent under replay") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<BranchingRecord> records;
        int n_topics = 0;
        for (int i = 0; i < 50; ++i) {
            BranchingRecord r;
            if (records.empty() || unif(rng) < 0.4) {
                r.trigger = kSelfTrigger;
                if (n_topics == 0 || unif(rng) < 0.3) {
                    r.new_local = true;
                    r.topic = (unif(rng) < 0.5 || n_topics == 0)
                                  ? n_topics++
                                  : static_cast<TopicId>(unif(rng) * n_topics);
                } else {
                    r.topic = static_cast<TopicId>(unif(rng) * n_topics);
                }
            } else {
                const auto s = static_cast<std::size_t>(unif(rng) * records.size());
                r.trigger = static_cast<EventIndex>(s);
                r.topic = records[s].topic;
            }
            records.push_back(r);
        }
        // Replay: triggered events inherit their source topic exactly and
        // never open local tables.
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            CHECK((r.trigger == kSelfTrigger || r.trigger < static_cast<EventIndex>(i)));
            if (!r.exogenous()) {
                CHECK(r.topic == records[static_cast<std::size_t>(r.trigger)].topic);
                CHECK(!r.new_local);
            }
        }
    }
}
