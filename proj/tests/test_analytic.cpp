#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "epiq/analytic.hpp"
#include "epiq/random.hpp"
#include "epiq/stats.hpp"

using epiq::LifetimeSpec;
using epiq::ModelParams;
using epiq::Pmf;

namespace {

const double kGrid[] = {0.25, 0.5, 1.0, 2.0, 4.0};

double pmf_sum(const Pmf& pmf) {
    double s = 0.0;
    for (double q : pmf.probs) s += q;
    return s;
}

double pmf_mean(const Pmf& pmf) {
    double m = 0.0;
    for (std::size_t i = 0; i < pmf.probs.size(); ++i)
        m += static_cast<double>(pmf.support_start + static_cast<long>(i)) * pmf.probs[i];
    return m;
}

// Independent oracle: simulate one linear birth-death line for tau time units.
long simulate_birth_death(double lambda2, double mu, double tau, epiq::RandomSource& rng) {
    long z = 1;
    double t = 0.0;
    while (z > 0) {
        t += rng.exponential((lambda2 + mu) * static_cast<double>(z));
        if (t > tau) return z;
        if (rng.uniform() < lambda2 / (lambda2 + mu))
            ++z;
        else
            --z;
    }
    return 0;
}

} // namespace

TEST_CASE("model params validation") {
    CHECK_THROWS_AS(ModelParams(1.0, 0.0, LifetimeSpec::exponential(1.0)), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(-1.0, 1.0, LifetimeSpec::exponential(1.0)), std::invalid_argument);
    CHECK_NOTHROW(ModelParams(0.0, 1.0, LifetimeSpec::exponential(1.0))); // test-only relaxation
}

TEST_CASE("solve_pi matches the exponential closed form") {
    const auto sol = epiq::solve_pi({2.0, 0.5, LifetimeSpec::exponential(1.0)});
    // closed form (mu+delta+lambda - sqrt((mu+delta+lambda)^2 - 4 lambda mu)) / (2 lambda)
    const double pi_oracle = (3.5 - std::sqrt(3.5 * 3.5 - 8.0)) / 4.0;
    CHECK(sol.pi == doctest::Approx(pi_oracle).epsilon(1e-12));
    CHECK(sol.pi == doctest::Approx(0.35961179679779243).epsilon(1e-10));
    CHECK(sol.residual <= 1e-10);
    CHECK(sol.p == doctest::Approx(0.5 / (0.5 + (1.0 - sol.pi) * 2.0)).epsilon(1e-15));

    const auto sol2 = epiq::solve_pi({0.5, 0.5, LifetimeSpec::exponential(1.0)});
    CHECK(sol2.pi == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-10));
    CHECK(sol2.p == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-10));
}

TEST_CASE("solve_pi for deterministic lifetimes") {
    // independent hand oracle: iterate x = exp(x - 2)
    double x = 0.0;
    for (int i = 0; i < 200; ++i) x = std::exp(x - 2.0);
    const auto sol = epiq::solve_pi({1.0, 1.0, LifetimeSpec::deterministic(1.0)});
    CHECK(sol.pi == doctest::Approx(x).epsilon(1e-10));
    CHECK(sol.pi == doctest::Approx(0.15859433956303936).epsilon(1e-10));
    CHECK(epiq::detection_size_param({1.0, 1.0, LifetimeSpec::deterministic(1.0)}) ==
          doctest::Approx(0.54306338982508758).epsilon(1e-10));
}

TEST_CASE("solve_pi for gamma lifetimes") {
    // independent hand oracle: iterate x = (1 + 0.5 (2 - x))^-2
    double x = 0.0;
    for (int i = 0; i < 500; ++i) x = std::pow(1.0 + 0.5 * (2.0 - x), -2.0);
    const auto sol = epiq::solve_pi({1.0, 1.0, LifetimeSpec::gamma(2.0, 0.5)});
    CHECK(sol.pi == doctest::Approx(x).epsilon(1e-10));
    CHECK(sol.residual <= 1e-10);
}

TEST_CASE("detection_size_param extremes") {
    CHECK(epiq::detection_size_param({2.0, 0.5, LifetimeSpec::exponential(1.0)}) ==
          doctest::Approx(0.28077640640441514).epsilon(1e-10));
    // detection dominates: p >= delta/(delta+lambda)
    CHECK(epiq::detection_size_param({1.0, 1e9, LifetimeSpec::exponential(1.0)}) >= 1.0 - 1e-9);
    // lambda = 0 degenerates to p = 1
    CHECK(epiq::detection_size_param({0.0, 1.0, LifetimeSpec::exponential(1.0)}) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fixed point agrees with markov closed forms over the grid") {
    for (double lambda : kGrid)
        for (double delta : kGrid)
            for (double mu : kGrid) {
                const auto sol = epiq::solve_pi({lambda, delta, LifetimeSpec::exponential(mu)});
                CHECK(std::abs(sol.pi - epiq::markov_pi(lambda, delta, mu)) <= 1e-10);
                CHECK(std::abs(sol.p - epiq::markov_p(lambda, delta, mu)) <= 1e-10);
            }
}

TEST_CASE("g is bracketed: g(0) > 0 and g(1) < 0") {
    const auto g = [](const ModelParams& m, double x) {
        return m.lifetime.mgf(m.delta + m.lambda * (1.0 - x)) - x;
    };
    for (double lambda : kGrid)
        for (double delta : kGrid) {
            for (double mu : kGrid) {
                const ModelParams m{lambda, delta, LifetimeSpec::exponential(mu)};
                CHECK(g(m, 0.0) > 0.0);
                CHECK(g(m, 1.0) < 0.0);
            }
            const ModelParams det{lambda, delta, LifetimeSpec::deterministic(1.0)};
            CHECK(g(det, 0.0) > 0.0);
            CHECK(g(det, 1.0) < 0.0);
            const ModelParams lnorm{lambda, delta, LifetimeSpec::lognormal(0.0, 0.5)};
            CHECK(g(lnorm, 0.0) > 0.0);
            CHECK(g(lnorm, 1.0) < 0.0);
        }
}

TEST_CASE("p is increasing in delta and decreasing in lambda") {
    for (double mu : kGrid) {
        for (double lambda : kGrid) {
            double prev = 0.0;
            for (double delta : kGrid) {
                const double p = epiq::markov_p(lambda, delta, mu);
                CHECK(p > prev);
                prev = p;
            }
        }
        for (double delta : kGrid) {
            double prev = 1.0;
            for (double lambda : kGrid) {
                const double p = epiq::markov_p(lambda, delta, mu);
                CHECK(p < prev);
                prev = p;
            }
        }
    }
}

TEST_CASE("markov closed forms") {
    // direct arithmetic: sqrt(4.25) = 2.0615528128088303
    const double root = std::sqrt(4.25);
    CHECK(epiq::markov_pi(2.0, 0.5, 1.0) == doctest::Approx((3.5 - root) / 4.0).epsilon(1e-12));
    CHECK(epiq::markov_p(2.0, 0.5, 1.0) == doctest::Approx(1.0 - (3.5 - root) / 2.0).epsilon(1e-12));
    CHECK(epiq::markov_p(0.5, 0.5, 1.0) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
    // delta -> 0 with lambda > mu: pi -> mu/lambda
    CHECK(epiq::markov_pi(2.0, 1e-9, 1.0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("total_infected_param") {
    CHECK(epiq::total_infected_param(2.0, 0.5) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(epiq::total_infected_param(1.5, 1.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(epiq::total_infected_param(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("geometric_pmf") {
    const auto degenerate = epiq::geometric_pmf(1.0, 1);
    REQUIRE(degenerate.probs.size() == 1);
    CHECK(degenerate.at(1) == 1.0);

    const auto half = epiq::geometric_pmf(0.5, 1);
    CHECK(half.at(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(half.at(2) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(half.at(3) == doctest::Approx(0.125).epsilon(1e-15));

    const double p = 0.28077640640441514;
    CHECK(pmf_mean(epiq::geometric_pmf(p, 1)) == doctest::Approx(1.0 / p).epsilon(1e-9));

    CHECK(epiq::geometric_pmf(0.5, 0).at(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(epiq::geometric_pmf(0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(epiq::geometric_pmf(0.5, 2), std::invalid_argument);
}

TEST_CASE("pmfs sum to one after truncation") {
    for (double p : {0.05, 0.2807764, 0.5, 0.9, 1.0})
        for (long start : {0L, 1L})
            CHECK(pmf_sum(epiq::geometric_pmf(p, start)) == doctest::Approx(1.0).epsilon(1e-9));
    for (double lambda2 : {0.5, 1.0, 2.0})
        for (double tau : {0.0, 0.5, 1.0, 2.0})
            CHECK(pmf_sum(epiq::birth_death_pmf(lambda2, 1.0, tau)) ==
                  doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pmf_sum(epiq::post_detection_pmf(0.3, 0.5, 1.0, 2.0)) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("birth_death_pmf values") {
    const auto start = epiq::birth_death_pmf(2.0, 1.0, 0.0);
    CHECK(start.at(0) == 0.0);
    CHECK(start.at(1) == doctest::Approx(1.0).epsilon(1e-15));

    // q0 = (e - 1) / (2e - 1)
    const double e1 = std::exp(1.0);
    CHECK(epiq::birth_death_pmf(2.0, 1.0, 1.0).at(0) ==
          doctest::Approx((e1 - 1.0) / (2.0 * e1 - 1.0)).epsilon(1e-13));
    CHECK(epiq::birth_death_pmf(0.5, 1.0, 2.0).at(0) ==
          doctest::Approx(0.77460032643943592).epsilon(1e-12));
}

TEST_CASE("birth_death_pmf matches Monte Carlo") {
    epiq::RandomSource rng(321);
    epiq::EmpiricalDistribution emp(0);
    for (int i = 0; i < 100'000; ++i) emp.add(simulate_birth_death(2.0, 1.0, 1.0, rng));
    CHECK(epiq::total_variation(emp, epiq::birth_death_pmf(2.0, 1.0, 1.0)) < 0.01);
}

TEST_CASE("critical birth-death case is the limit of nearby cases") {
    for (double tau : {0.5, 1.0, 2.0}) {
        const double critical = epiq::birth_death_pmf(1.0, 1.0, tau).at(0);
        CHECK(critical == doctest::Approx(tau / (1.0 + tau)).epsilon(1e-12));
        CHECK(std::abs(critical - epiq::birth_death_pmf(1.0 + 1e-6, 1.0, tau).at(0)) <= 1e-4);
        CHECK(std::abs(critical - epiq::birth_death_pmf(1.0 - 1e-6, 1.0, tau).at(0)) <= 1e-4);
    }
}

TEST_CASE("post_detection_pmf values") {
    // tau = 0 collapses to the initial geometric
    const auto at_zero = epiq::post_detection_pmf(0.3, 0.5, 1.0, 0.0);
    CHECK(at_zero.at(0) == 0.0);
    CHECK(at_zero.at(1) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(at_zero.at(2) == doctest::Approx(0.3 * 0.7).epsilon(1e-12));

    // hand evaluation of the mixture at p1=0.3, lambda2=0.5, mu=1, tau=2
    const double q0 = 0.77460032643943592;
    const double py0 = q0 * 0.3 / (1.0 - 0.7 * q0);
    const auto mix = epiq::post_detection_pmf(0.3, 0.5, 1.0, 2.0);
    CHECK(mix.at(0) == doctest::Approx(py0).epsilon(1e-12));
    CHECK(mix.at(0) == doctest::Approx(0.50762421671507023).epsilon(1e-11));

    // p1 = 1 degenerates to a single birth-death line
    const auto one = epiq::post_detection_pmf(1.0, 2.0, 1.0, 1.0);
    const auto bd = epiq::birth_death_pmf(2.0, 1.0, 1.0);
    for (long k = 0; k <= 20; ++k) CHECK(one.at(k) == doctest::Approx(bd.at(k)).epsilon(1e-12));
}

TEST_CASE("post_detection_pmf matches a composite Monte Carlo") {
    epiq::RandomSource rng(654);
    epiq::EmpiricalDistribution emp(0);
    for (int i = 0; i < 100'000; ++i) {
        // geometric(0.3) initial count on {1,2,...}
        long g = 1;
        while (rng.uniform() >= 0.3) ++g;
        long alive = 0;
        for (long j = 0; j < g; ++j) alive += simulate_birth_death(0.5, 1.0, 2.0, rng);
        emp.add(alive);
    }
    CHECK(epiq::total_variation(emp, epiq::post_detection_pmf(0.3, 0.5, 1.0, 2.0)) < 0.01);
}
