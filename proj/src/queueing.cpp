#include "epiq/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "epiq/batch.hpp"

namespace epiq {

std::vector<double> PsQueueCore::remaining_works() const {
    std::vector<std::pair<std::uint64_t, double>> by_arrival;
    by_arrival.reserve(departures_.size());
    for (const auto& [v_dep, seq] : departures_) by_arrival.emplace_back(seq, v_dep - v_now_);
    std::sort(by_arrival.begin(), by_arrival.end());
    std::vector<double> works;
    works.reserve(by_arrival.size());
    for (const auto& [seq, w] : by_arrival) works.push_back(w);
    return works;
}

namespace {

// Shared PS event loop. The catastrophe clock is independent of the queue
// and keeps running while the queue is empty.
CatastropheOutcome run_ps(const ModelParams& params, RandomSource& rng, const EventCaps& caps,
                          bool stop_when_empty, bool seed_initial_customer) {
    PsQueueCore queue;
    CatastropheOutcome out;
    double now = 0.0;
    if (seed_initial_customer) queue.add_customer(params.lifetime.sample(rng));

    for (std::uint64_t event = 0; event < caps.max_events; ++event) {
        const double dt_arrival = rng.exponential(params.lambda);
        const double dt_catastrophe = rng.exponential(params.delta);
        const double dt_departure = queue.time_to_next_departure();

        if (dt_catastrophe <= dt_arrival && dt_catastrophe <= dt_departure) {
            now += dt_catastrophe;
            out.status = queue.size() > 0 ? QueueStatus::QueueHit
                                          : QueueStatus::QueueEmptyAtCatastrophe;
            out.q_at_catastrophe = queue.size();
            out.time = now;
            return out;
        }
        if (dt_arrival <= dt_departure) {
            now += dt_arrival;
            queue.advance(dt_arrival);
            queue.add_customer(params.lifetime.sample(rng));
        } else {
            now += dt_departure;
            queue.advance(dt_departure);
            queue.pop_departure();
            if (queue.size() == 0 && stop_when_empty) {
                out.status = QueueStatus::FirstBusyPeriodEnded;
                out.q_at_catastrophe = 0;
                out.time = now;
                return out;
            }
        }
    }
    out.status = QueueStatus::Censored;
    out.time = now;
    return out;
}

} // namespace

CatastropheOutcome simulate_ps_from_empty(const ModelParams& params, RandomSource& rng,
                                          const EventCaps& caps) {
    return run_ps(params, rng, caps, /*stop_when_empty=*/false, /*seed_initial_customer=*/false);
}

CatastropheOutcome simulate_ps_first_busy_period(const ModelParams& params, RandomSource& rng,
                                                 const EventCaps& caps) {
    return run_ps(params, rng, caps, /*stop_when_empty=*/true, /*seed_initial_customer=*/true);
}

CatastropheOutcome simulate_lifo_first_busy_period(const ModelParams& params, RandomSource& rng,
                                                   const EventCaps& caps) {
    LifoQueueCore stack;
    CatastropheOutcome out;
    double now = 0.0;
    stack.push_customer(params.lifetime.sample(rng));

    for (std::uint64_t event = 0; event < caps.max_events; ++event) {
        const double dt_arrival = rng.exponential(params.lambda);
        const double dt_catastrophe = rng.exponential(params.delta);
        const double dt_departure = stack.time_to_next_departure();

        if (dt_catastrophe <= dt_arrival && dt_catastrophe <= dt_departure) {
            now += dt_catastrophe;
            out.status = QueueStatus::QueueHit;
            out.q_at_catastrophe = stack.size();
            out.time = now;
            return out;
        }
        if (dt_arrival <= dt_departure) {
            now += dt_arrival;
            stack.advance(dt_arrival);
            stack.push_customer(params.lifetime.sample(rng)); // preempts the server
        } else {
            now += dt_departure;
            stack.advance(dt_departure);
            stack.pop_departure();
            if (stack.size() == 0) {
                out.status = QueueStatus::FirstBusyPeriodEnded;
                out.q_at_catastrophe = 0;
                out.time = now;
                return out;
            }
        }
    }
    out.status = QueueStatus::Censored;
    out.time = now;
    return out;
}

QueueEventTrace time_change_transform(const BranchTrajectory& traj) {
    QueueEventTrace trace;
    trace.events.reserve(traj.events.size());
    double prev_time = 0.0;
    long prev_population = 1;
    double u = 0.0;
    for (const auto& event : traj.events) {
        if (prev_population == 0)
            throw MalformedTrajectory("time_change_transform: event after extinction");
        if (!(event.time > prev_time))
            throw MalformedTrajectory("time_change_transform: times must strictly increase");
        long expected_population = prev_population;
        QueueEventKind kind;
        switch (event.kind) {
        case BranchEventKind::Birth:
            ++expected_population;
            kind = QueueEventKind::Arrival;
            break;
        case BranchEventKind::Death:
            --expected_population;
            kind = QueueEventKind::Departure;
            break;
        case BranchEventKind::Detection:
        default: kind = QueueEventKind::Catastrophe; break;
        }
        if (event.population_after != expected_population || event.population_after < 0)
            throw MalformedTrajectory("time_change_transform: inconsistent population step");

        // constant population k over (prev_time, event.time] maps to queue
        // duration k * dt
        u += static_cast<double>(prev_population) * (event.time - prev_time);
        trace.events.push_back({u, kind, event.population_after});
        prev_time = event.time;
        prev_population = event.population_after;
    }
    return trace;
}

void write_trace_jsonl(const QueueEventTrace& trace, std::ostream& os, std::optional<long> rep) {
    for (const auto& event : trace.events) {
        nlohmann::json line;
        if (rep) line["rep"] = *rep;
        line["u"] = event.u;
        switch (event.kind) {
        case QueueEventKind::Arrival: line["kind"] = "arrival"; break;
        case QueueEventKind::Departure: line["kind"] = "departure"; break;
        case QueueEventKind::Catastrophe: line["kind"] = "catastrophe"; break;
        }
        line["q_after"] = event.q_after;
        os << line.dump() << '\n';
    }
}

QueueBatch run_batch(QueueDiscipline discipline, const ModelParams& params,
                     std::size_t replications, std::uint64_t seed, const EventCaps& caps,
                     unsigned workers) {
    auto simulate = [&](RandomSource& rng) {
        switch (discipline) {
        case QueueDiscipline::PsFromEmpty: return simulate_ps_from_empty(params, rng, caps);
        case QueueDiscipline::PsFirstBusyPeriod:
            return simulate_ps_first_busy_period(params, rng, caps);
        case QueueDiscipline::LifoFirstBusyPeriod:
        default: return simulate_lifo_first_busy_period(params, rng, caps);
        }
    };
    auto rows = run_replications(replications, seed, workers,
                                 [&](std::size_t, RandomSource& rng) { return simulate(rng); });
    QueueBatch batch;
    for (const auto& row : rows) {
        switch (row.status) {
        case QueueStatus::QueueHit:
            ++batch.queue_hit;
            batch.q_conditioned.add(row.q_at_catastrophe);
            break;
        case QueueStatus::QueueEmptyAtCatastrophe: ++batch.empty_at_catastrophe; break;
        case QueueStatus::FirstBusyPeriodEnded: ++batch.busy_period_ended; break;
        case QueueStatus::Censored: ++batch.censored; break;
        }
    }
    batch.rows = std::move(rows);
    return batch;
}

} // namespace epiq
