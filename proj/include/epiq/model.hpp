#pragma once

#include <cstdint>

#include "epiq/lifetimes.hpp"

namespace epiq {

// The (lambda, delta, L) triple driving every process in this project:
// per-capita contact/birth/arrival rate, per-capita detection/catastrophe
// rate, and the infectious-period/workload law.
struct ModelParams {
    double lambda;
    double delta;
    LifetimeSpec lifetime;

    // lambda = 0 is accepted as a testing-only degenerate case (a single
    // individual that never reproduces); delta must be strictly positive.
    ModelParams(double lambda_, double delta_, LifetimeSpec lifetime_);
};

struct EventCaps {
    std::uint64_t max_events = 10'000'000;
};

} // namespace epiq
