#include "epiq/branching.hpp"

#include <functional>
#include <queue>

#include "epiq/batch.hpp"

namespace epiq {

DetectionOutcome simulate_first_detection(const ModelParams& params, RandomSource& rng,
                                          const EventCaps& caps, bool record_trajectory) {
    // Exact scheme: each individual's death is scheduled at birth (birth time
    // + lifetime draw); births and detections run as aggregate competing
    // exponentials with rates lambda*Z and delta*Z, re-drawn after every
    // event (valid by memorylessness).
    std::priority_queue<double, std::vector<double>, std::greater<>> deaths;
    DetectionOutcome out;
    BranchTrajectory traj;

    double now = 0.0;
    long population = 1;
    deaths.push(params.lifetime.sample(rng));

    for (std::uint64_t event = 0; event < caps.max_events; ++event) {
        const double t_birth = now + rng.exponential(params.lambda * static_cast<double>(population));
        const double t_detect = now + rng.exponential(params.delta * static_cast<double>(population));
        const double t_death = deaths.top();

        if (t_detect <= t_birth && t_detect <= t_death) {
            out.status = BranchStatus::Detected;
            out.count_at_detection = population;
            out.detection_time = t_detect;
            if (record_trajectory) {
                traj.events.push_back({t_detect, BranchEventKind::Detection, population});
                out.trajectory = std::move(traj);
            }
            return out;
        }
        if (t_birth <= t_death) {
            now = t_birth;
            ++population;
            ++out.total_born;
            deaths.push(now + params.lifetime.sample(rng));
            if (record_trajectory)
                traj.events.push_back({now, BranchEventKind::Birth, population});
        } else {
            now = t_death;
            deaths.pop();
            --population;
            if (record_trajectory)
                traj.events.push_back({now, BranchEventKind::Death, population});
            if (population == 0) {
                out.status = BranchStatus::Extinct;
                if (record_trajectory) out.trajectory = std::move(traj);
                return out;
            }
        }
    }
    out.status = BranchStatus::Censored;
    if (record_trajectory) out.trajectory = std::move(traj);
    return out;
}

BranchBatch run_batch(const ModelParams& params, std::size_t replications, std::uint64_t seed,
                      const EventCaps& caps, unsigned workers) {
    auto rows = run_replications(replications, seed, workers,
                                 [&](std::size_t, RandomSource& rng) {
                                     return simulate_first_detection(params, rng, caps, false);
                                 });
    BranchBatch batch;
    for (const auto& row : rows) {
        switch (row.status) {
        case BranchStatus::Detected:
            ++batch.detected;
            batch.count_at_detection.add(row.count_at_detection);
            batch.total_born_detected.add(row.total_born);
            break;
        case BranchStatus::Extinct: ++batch.extinct; break;
        case BranchStatus::Censored: ++batch.censored; break;
        }
    }
    batch.rows = std::move(rows);
    return batch;
}

} // namespace epiq
