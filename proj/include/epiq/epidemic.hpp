#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "epiq/model.hpp"
#include "epiq/stats.hpp"

namespace epiq {

// Finite-population parameters. The pairwise contact rate is
// model.lambda / (n - 1), i.e. every individual makes contacts at total rate
// lambda with a uniformly chosen other individual.
struct PopulationParams {
    long n;
    ModelParams model;
    std::optional<LifetimeSpec> latent; // SEIR only

    PopulationParams(long n_, ModelParams model_, std::optional<LifetimeSpec> latent_ = {});
};

enum class EpidemicStatus { Detected, DiedOut, Censored };

struct EpidemicOutcome {
    EpidemicStatus status = EpidemicStatus::Censored;
    long infectious_at_detection = 0; // Detected only
    long exposed_at_detection = 0;    // SEIR, Detected only
    long susceptibles_remaining = 0;
    double detection_time = 0.0; // Detected only
    long total_ever_infected = 1;
};

// SIR epidemic with detections: starts with one infectious individual
// (infected at time 0) in an otherwise susceptible population of size n.
// Stops at the first detection or when no infectious individuals remain.
EpidemicOutcome simulate_sir_first_detection(const PopulationParams& pp, RandomSource& rng,
                                             const EventCaps& caps = {});

// SEIR variant: newly infected individuals are exposed (non-infectious) for
// a latent period drawn from pp.latent before turning infectious. Contacts
// and detections attach only to infectious individuals.
EpidemicOutcome simulate_seir_first_detection(const PopulationParams& pp, RandomSource& rng,
                                              const EventCaps& caps = {});

struct EpidemicBatch {
    // E + I at detection, conditioned on Detected (E = 0 for SIR).
    EmpiricalDistribution count_at_detection{1};
    std::uint64_t detected = 0;
    std::uint64_t died_out = 0;
    std::uint64_t censored = 0;
    std::vector<EpidemicOutcome> rows;

    std::uint64_t replications() const { return detected + died_out + censored; }
    double detected_fraction() const {
        const auto n = replications();
        return n == 0 ? 0.0 : static_cast<double>(detected) / static_cast<double>(n);
    }
};

// SEIR when pp.latent is set, SIR otherwise. Same determinism contract as
// the branching batch runner.
EpidemicBatch run_batch(const PopulationParams& pp, std::size_t replications, std::uint64_t seed,
                        const EventCaps& caps = {}, unsigned workers = 0);

} // namespace epiq
