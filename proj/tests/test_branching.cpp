#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "epiq/branching.hpp"

using epiq::BranchEventKind;
using epiq::BranchStatus;
using epiq::LifetimeSpec;
using epiq::ModelParams;

namespace {

const ModelParams kSupercritical{2.0, 0.5, LifetimeSpec::exponential(1.0)};

bool rows_equal(const epiq::BranchBatch& a, const epiq::BranchBatch& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto& x = a.rows[i];
        const auto& y = b.rows[i];
        if (x.status != y.status || x.count_at_detection != y.count_at_detection ||
            x.detection_time != y.detection_time || x.total_born != y.total_born)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("no births when lambda is zero") {
    // single individual with a unit lifetime: detected iff the exp(delta)
    // clock beats the deterministic death, so P(Detected) = 1 - exp(-1)
    const ModelParams params{0.0, 1.0, LifetimeSpec::deterministic(1.0)};
    const auto batch = epiq::run_batch(params, 100'000, 7001);
    for (const auto& row : batch.rows) {
        if (row.status == BranchStatus::Detected) CHECK(row.count_at_detection == 1);
        CHECK(row.total_born == 1);
    }
    const double expected = 1.0 - std::exp(-1.0);
    const double se = std::sqrt(expected * (1.0 - expected) / 100'000.0);
    CHECK(std::abs(batch.detected_fraction() - expected) <= 4.0 * se);
}

TEST_CASE("detected fraction and conditioned mean match the analytic solution") {
    const auto sol = epiq::solve_pi(kSupercritical);
    const auto batch = epiq::run_batch(kSupercritical, 100'000, 7010);
    CHECK(std::abs(batch.detected_fraction() - (1.0 - sol.pi)) < 0.006);
    CHECK(std::abs(batch.count_at_detection.mean() - 1.0 / sol.p) < 0.05);
    CHECK(batch.censored == 0);
}

TEST_CASE("conditioned counts pass the geometric goodness of fit") {
    const double p = epiq::detection_size_param(kSupercritical);
    const auto batch = epiq::run_batch(kSupercritical, 100'000, 7020);
    const auto report = epiq::chi_square_gof(batch.count_at_detection, epiq::geometric_pmf(p, 1));
    CHECK(report.p_value > 0.001);
}

TEST_CASE("batches are reproducible and worker-count independent") {
    const auto a = epiq::run_batch(kSupercritical, 500, 7030, {}, 1);
    const auto b = epiq::run_batch(kSupercritical, 500, 7030, {}, 1);
    const auto c = epiq::run_batch(kSupercritical, 500, 7030, {}, 4);
    CHECK(rows_equal(a, b));
    CHECK(rows_equal(a, c));

    const auto d = epiq::run_batch(kSupercritical, 500, 7031, {}, 1);
    CHECK_FALSE(rows_equal(a, d));
}

TEST_CASE("raising the event cap does not change outcomes at these parameters") {
    const ModelParams sets[] = {kSupercritical,
                                {1.0, 1.0, LifetimeSpec::deterministic(1.0)},
                                {1.0, 1.0, LifetimeSpec::gamma(2.0, 0.5)}};
    epiq::EventCaps small{1'000'000};
    epiq::EventCaps large{10'000'000};
    for (const auto& params : sets) {
        const auto a = epiq::run_batch(params, 20'000, 7040, small);
        const auto b = epiq::run_batch(params, 20'000, 7040, large);
        CHECK(a.censored == 0);
        CHECK(rows_equal(a, b));
    }
}

TEST_CASE("a tiny event cap censors instead of erroring") {
    epiq::EventCaps tiny{3};
    const auto batch = epiq::run_batch({4.0, 0.01, LifetimeSpec::exponential(0.01)}, 200, 7050, tiny);
    CHECK(batch.censored > 0);
    CHECK(batch.count_at_detection.total() == batch.detected);
}

TEST_CASE("trajectories satisfy the event-log invariants") {
    epiq::RandomSource rng(7060);
    int detected_seen = 0;
    for (int rep = 0; rep < 400; ++rep) {
        const auto out = epiq::simulate_first_detection(kSupercritical, rng, {}, true);
        REQUIRE(out.trajectory.has_value());
        const auto& events = out.trajectory->events;

        double prev_time = 0.0;
        long population = 1;
        long births = 0;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const auto& e = events[i];
            CHECK(e.time > prev_time);
            switch (e.kind) {
            case BranchEventKind::Birth:
                ++births;
                ++population;
                break;
            case BranchEventKind::Death: --population; break;
            case BranchEventKind::Detection: break;
            }
            CHECK(e.population_after == population);
            if (out.status == BranchStatus::Detected) {
                // the population never hits zero before the detection
                CHECK(population >= 1);
            }
            prev_time = e.time;
        }
        CHECK(out.total_born == 1 + births);
        if (out.status == BranchStatus::Detected) {
            ++detected_seen;
            REQUIRE(!events.empty());
            CHECK(events.back().kind == BranchEventKind::Detection);
            CHECK(events.back().population_after == out.count_at_detection);
            CHECK(events.back().time == out.detection_time);
        } else {
            CHECK(out.status == BranchStatus::Extinct);
            CHECK(events.back().population_after == 0);
        }
    }
    CHECK(detected_seen > 100);
}
