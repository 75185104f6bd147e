#pragma once

#include <stdexcept>
#include <vector>

#include "epiq/model.hpp"

namespace epiq {

// Raised when neither fixed-point iteration nor bisection pins the root of
// x = beta(delta + lambda(1-x)) to the required residual.
struct NonConvergence : std::runtime_error {
    NonConvergence(const std::string& what, double residual_, int iterations_)
        : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
    double residual;
    int iterations;
};

struct AnalyticSolution {
    double pi;       // P(process dies out / queue empties before first detection)
    double p;        // geometric parameter delta / (delta + (1-pi) lambda)
    int iterations;
    double residual; // |beta(delta + lambda(1-pi)) - pi|
};

// Probability mass function on {support_start, support_start+1, ...},
// materialized until the remaining tail mass drops below 1e-12 (capped at
// 1e6 terms).
struct Pmf {
    long support_start = 0;
    std::vector<double> probs;

    double at(long k) const {
        if (k < support_start) return 0.0;
        const auto idx = static_cast<std::size_t>(k - support_start);
        return idx < probs.size() ? probs[idx] : 0.0;
    }
    double tail_mass() const;
    long max_support() const { return support_start + static_cast<long>(probs.size()) - 1; }
};

// Smallest root in [0,1] of x = beta(delta + lambda(1-x)). Monotone
// fixed-point iteration from 0, with a bisection fallback guaranteed by the
// sign bracket g(0) > 0, g(1) < 0.
AnalyticSolution solve_pi(const ModelParams& params);

// p = delta / (delta + (1-pi) lambda): the geometric parameter of the number
// infectious at first detection (equivalently, the queue length at the first
// catastrophe conditioned on being positive).
double detection_size_param(const ModelParams& params);

Pmf geometric_pmf(double p, long support_start);

// Closed forms for exponential(mu) lifetimes.
double markov_pi(double lambda, double delta, double mu);
double markov_p(double lambda, double delta, double mu);

// delta / (lambda + delta): claimed parameter of the total number ever
// infected by the first detection (support starts at 1, index case included).
double total_infected_param(double lambda, double delta);

// Population size at time tau of a linear birth-death process started from a
// single individual (birth rate lambda2, death rate mu per capita). Support
// starts at 0. The critical case lambda2 == mu uses the analytic limit
// q0 = lambda2 tau / (1 + lambda2 tau).
Pmf birth_death_pmf(double lambda2, double mu, double tau);

// Number infectious at time tau after the first detection, when the count at
// detection is geometric(p1) on {1,2,...} and each of those individuals
// starts an independent birth-death(lambda2, mu) line. Support starts at 0.
Pmf post_detection_pmf(double p1, double lambda2, double mu, double tau);

} // namespace epiq
