#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "epiq/branching.hpp"
#include "epiq/model.hpp"
#include "epiq/stats.hpp"

namespace epiq {

// Processor-sharing state with lazy service bookkeeping. Instead of updating
// every remaining workload as time passes, the core tracks the accumulated
// per-customer service v of the current busy period (dv/dt = 1/Q); a customer
// with workload w arriving at service level v_a departs when v reaches
// v_a + w. Each event costs O(log n). v is re-anchored exactly at every
// departure so floating-point drift cannot accumulate.
class PsQueueCore {
  public:
    long size() const { return static_cast<long>(departures_.size()); }

    void add_customer(double workload) {
        departures_.emplace(v_now_ + workload, seq_++);
    }

    // Real time until the earliest departure at the current queue size;
    // +inf if the queue is empty.
    double time_to_next_departure() const {
        if (departures_.empty()) return std::numeric_limits<double>::infinity();
        const double dt = static_cast<double>(size()) * (departures_.begin()->first - v_now_);
        return dt > 0.0 ? dt : 0.0;
    }

    // Advance the shared server by dt real time with no intervening event.
    void advance(double dt) {
        if (!departures_.empty()) v_now_ += dt / static_cast<double>(size());
    }

    // Remove the due customer; the service level is re-anchored to its exact
    // departure point.
    void pop_departure() {
        v_now_ = departures_.begin()->first;
        departures_.erase(departures_.begin());
        if (departures_.empty()) reset();
    }

    void reset() {
        departures_.clear();
        v_now_ = 0.0;
        seq_ = 0;
    }

    // Remaining workloads in arrival order (for tests).
    std::vector<double> remaining_works() const;

  private:
    // keyed by (departure service level, arrival order): equal remaining
    // works depart in arrival order
    std::set<std::pair<double, std::uint64_t>> departures_;
    double v_now_ = 0.0;
    std::uint64_t seq_ = 0;
};

// LIFO-preemptive state: only the most recent arrival is served, at unit
// rate; everyone below it on the stack is frozen.
class LifoQueueCore {
  public:
    long size() const { return static_cast<long>(stack_.size()); }
    void push_customer(double workload) { stack_.push_back(workload); }
    double time_to_next_departure() const {
        return stack_.empty() ? std::numeric_limits<double>::infinity() : stack_.back();
    }
    void advance(double dt) {
        if (!stack_.empty()) stack_.back() -= dt;
    }
    void pop_departure() { stack_.pop_back(); }
    const std::vector<double>& remaining_works() const { return stack_; }

  private:
    std::vector<double> stack_; // back = in service
};

enum class QueueStatus { QueueHit, QueueEmptyAtCatastrophe, FirstBusyPeriodEnded, Censored };

struct CatastropheOutcome {
    QueueStatus status = QueueStatus::Censored;
    long q_at_catastrophe = 0;
    double time = 0.0;
};

// M/G/1-PS queue with catastrophes started from an empty queue. Arrivals are
// Poisson(lambda), workloads i.i.d. as L, and the catastrophe clock (rate
// delta) keeps running while the queue is empty. Stops at the first
// catastrophe and reports the queue length there (possibly 0).
CatastropheOutcome simulate_ps_from_empty(const ModelParams& params, RandomSource& rng,
                                          const EventCaps& caps = {});

// Same queue, but customer 1 arrives at t = 0 and the run stops when the
// queue first empties (FirstBusyPeriodEnded) or at the first catastrophe
// (QueueHit, q >= 1).
CatastropheOutcome simulate_ps_first_busy_period(const ModelParams& params, RandomSource& rng,
                                                 const EventCaps& caps = {});

// LIFO-preemptive-resume discipline, same stopping rule as the PS
// first-busy-period variant.
CatastropheOutcome simulate_lifo_first_busy_period(const ModelParams& params, RandomSource& rng,
                                                   const EventCaps& caps = {});

struct MalformedTrajectory : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class QueueEventKind { Arrival, Departure, Catastrophe };

struct QueueTraceEvent {
    double u; // queue time
    QueueEventKind kind;
    long q_after;
};

// Queue-time event log: customer 1 arrives at u = 0 (queue length 1), which
// mirrors the trajectory convention of the ancestor at t = 0.
struct QueueEventTrace {
    std::vector<QueueTraceEvent> events;
};

// Inverse random time change: a branching segment of length dt at population
// k becomes a queue segment of length k*dt, and Birth/Death/Detection map to
// Arrival/Departure/Catastrophe in the same order. Throws
// MalformedTrajectory if the input violates the trajectory invariants.
QueueEventTrace time_change_transform(const BranchTrajectory& traj);

// One `{"u":..,"kind":..,"q_after":..}` object per line; `rep` tags the
// replication when several traces share a file.
void write_trace_jsonl(const QueueEventTrace& trace, std::ostream& os,
                       std::optional<long> rep = std::nullopt);

enum class QueueDiscipline { PsFromEmpty, PsFirstBusyPeriod, LifoFirstBusyPeriod };

struct QueueBatch {
    EmpiricalDistribution q_conditioned{1}; // q at catastrophe, given q >= 1
    std::uint64_t queue_hit = 0;
    std::uint64_t empty_at_catastrophe = 0;
    std::uint64_t busy_period_ended = 0;
    std::uint64_t censored = 0;
    std::vector<CatastropheOutcome> rows;

    std::uint64_t replications() const {
        return queue_hit + empty_at_catastrophe + busy_period_ended + censored;
    }
    // Fraction of catastrophes finding an empty queue (PsFromEmpty only).
    double empty_fraction() const {
        const auto n = queue_hit + empty_at_catastrophe;
        return n == 0 ? 0.0 : static_cast<double>(empty_at_catastrophe) / static_cast<double>(n);
    }
    double hit_fraction() const {
        const auto n = replications();
        return n == 0 ? 0.0 : static_cast<double>(queue_hit) / static_cast<double>(n);
    }
};

QueueBatch run_batch(QueueDiscipline discipline, const ModelParams& params,
                     std::size_t replications, std::uint64_t seed, const EventCaps& caps = {},
                     unsigned workers = 0);

} // namespace epiq
