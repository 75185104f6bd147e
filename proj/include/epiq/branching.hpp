#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "epiq/model.hpp"
#include "epiq/stats.hpp"

namespace epiq {

enum class BranchEventKind { Birth, Death, Detection };

struct BranchEvent {
    double time;
    BranchEventKind kind;
    long population_after;
};

// Event log of one branching replication. The ancestor is alive at t = 0
// (population 1) and is not itself an event; times strictly increase and the
// population moves by +1 on Birth, -1 on Death, 0 on Detection.
struct BranchTrajectory {
    std::vector<BranchEvent> events;
};

enum class BranchStatus { Detected, Extinct, Censored };

struct DetectionOutcome {
    BranchStatus status = BranchStatus::Censored;
    long count_at_detection = 0; // Detected only
    double detection_time = 0.0; // Detected only
    long total_born = 1;         // ancestor included
    std::optional<BranchTrajectory> trajectory;
};

// Branching process with detections: per-capita birth rate lambda, i.i.d.
// lifetimes L, per-capita detection rate delta. Runs until the first
// detection, extinction, or caps.max_events (Censored).
DetectionOutcome simulate_first_detection(const ModelParams& params, RandomSource& rng,
                                          const EventCaps& caps = {},
                                          bool record_trajectory = false);

struct BranchBatch {
    EmpiricalDistribution count_at_detection{1}; // conditioned on Detected
    EmpiricalDistribution total_born_detected{1};
    std::uint64_t detected = 0;
    std::uint64_t extinct = 0;
    std::uint64_t censored = 0;
    std::vector<DetectionOutcome> rows; // trajectories never recorded here

    std::uint64_t replications() const { return detected + extinct + censored; }
    double detected_fraction() const {
        const auto n = replications();
        return n == 0 ? 0.0 : static_cast<double>(detected) / static_cast<double>(n);
    }
};

// Replication i uses RandomSource::for_replication(seed, i); the merge is
// keyed by index, so the batch is reproducible for any worker count.
// Censored replications are excluded from the conditioned distributions.
BranchBatch run_batch(const ModelParams& params, std::size_t replications, std::uint64_t seed,
                      const EventCaps& caps = {}, unsigned workers = 0);

} // namespace epiq
