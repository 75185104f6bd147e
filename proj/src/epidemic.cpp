#include "epiq/epidemic.hpp"

#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

#include "epiq/batch.hpp"

namespace epiq {

namespace {

using MinHeap = std::priority_queue<double, std::vector<double>, std::greater<>>;

constexpr double kInf = std::numeric_limits<double>::infinity();

double heap_top(const MinHeap& h) {
    return h.empty() ? kInf : h.top();
}

} // namespace

PopulationParams::PopulationParams(long n_, ModelParams model_,
                                   std::optional<LifetimeSpec> latent_)
    : n(n_), model(std::move(model_)), latent(std::move(latent_)) {
    if (n < 2) throw std::invalid_argument("PopulationParams: n must be >= 2");
}

EpidemicOutcome simulate_sir_first_detection(const PopulationParams& pp, RandomSource& rng,
                                             const EventCaps& caps) {
    if (pp.latent) throw std::invalid_argument("simulate_sir_first_detection: latent must be absent");
    const ModelParams& m = pp.model;

    // Each infectious individual contacts a uniform other individual at rate
    // lambda (equivalent to rate lambda/(n-1) per pair); the contact infects
    // only if the target is susceptible, i.e. with probability S/(n-1).
    MinHeap recoveries;
    EpidemicOutcome out;
    double now = 0.0;
    long susceptible = pp.n - 1;
    long infectious = 1;
    recoveries.push(m.lifetime.sample(rng));

    for (std::uint64_t event = 0; event < caps.max_events; ++event) {
        const double rate_scale = static_cast<double>(infectious);
        const double t_contact = now + rng.exponential(m.lambda * rate_scale);
        const double t_detect = now + rng.exponential(m.delta * rate_scale);
        const double t_recovery = heap_top(recoveries);

        if (t_detect <= t_contact && t_detect <= t_recovery) {
            out.status = EpidemicStatus::Detected;
            out.infectious_at_detection = infectious;
            out.susceptibles_remaining = susceptible;
            out.detection_time = t_detect;
            return out;
        }
        if (t_contact <= t_recovery) {
            now = t_contact;
            if (rng.uniform() * static_cast<double>(pp.n - 1) < static_cast<double>(susceptible)) {
                --susceptible;
                ++infectious;
                ++out.total_ever_infected;
                recoveries.push(now + m.lifetime.sample(rng));
            }
        } else {
            now = t_recovery;
            recoveries.pop();
            --infectious;
            if (infectious == 0) {
                out.status = EpidemicStatus::DiedOut;
                out.susceptibles_remaining = susceptible;
                return out;
            }
        }
    }
    out.status = EpidemicStatus::Censored;
    out.susceptibles_remaining = susceptible;
    return out;
}

EpidemicOutcome simulate_seir_first_detection(const PopulationParams& pp, RandomSource& rng,
                                              const EventCaps& caps) {
    if (!pp.latent)
        throw std::invalid_argument("simulate_seir_first_detection: latent must be present");
    const ModelParams& m = pp.model;
    const LifetimeSpec& latent = *pp.latent;

    // Index case starts infectious; newly infected individuals join the
    // exposed pool until their latent period expires. Contacts and detection
    // clocks attach only to the infectious.
    MinHeap recoveries;
    MinHeap activations;
    EpidemicOutcome out;
    double now = 0.0;
    long susceptible = pp.n - 1;
    long exposed = 0;
    long infectious = 1;
    recoveries.push(m.lifetime.sample(rng));

    for (std::uint64_t event = 0; event < caps.max_events; ++event) {
        const double rate_scale = static_cast<double>(infectious);
        const double t_contact = now + rng.exponential(m.lambda * rate_scale);
        const double t_detect = now + rng.exponential(m.delta * rate_scale);
        const double t_activation = heap_top(activations);
        const double t_recovery = heap_top(recoveries);

        if (t_detect <= t_contact && t_detect <= t_activation && t_detect <= t_recovery) {
            out.status = EpidemicStatus::Detected;
            out.infectious_at_detection = infectious;
            out.exposed_at_detection = exposed;
            out.susceptibles_remaining = susceptible;
            out.detection_time = t_detect;
            return out;
        }
        if (t_contact <= t_activation && t_contact <= t_recovery) {
            now = t_contact;
            if (rng.uniform() * static_cast<double>(pp.n - 1) < static_cast<double>(susceptible)) {
                --susceptible;
                ++exposed;
                ++out.total_ever_infected;
                activations.push(now + latent.sample(rng));
            }
        } else if (t_activation <= t_recovery) {
            now = t_activation;
            activations.pop();
            --exposed;
            ++infectious;
            recoveries.push(now + m.lifetime.sample(rng));
        } else {
            now = t_recovery;
            recoveries.pop();
            --infectious;
            if (infectious == 0 && exposed == 0) {
                out.status = EpidemicStatus::DiedOut;
                out.susceptibles_remaining = susceptible;
                return out;
            }
        }
    }
    out.status = EpidemicStatus::Censored;
    out.susceptibles_remaining = susceptible;
    return out;
}

EpidemicBatch run_batch(const PopulationParams& pp, std::size_t replications, std::uint64_t seed,
                        const EventCaps& caps, unsigned workers) {
    const bool seir = pp.latent.has_value();
    auto rows = run_replications(replications, seed, workers,
                                 [&](std::size_t, RandomSource& rng) {
                                     return seir ? simulate_seir_first_detection(pp, rng, caps)
                                                 : simulate_sir_first_detection(pp, rng, caps);
                                 });
    EpidemicBatch batch;
    for (const auto& row : rows) {
        switch (row.status) {
        case EpidemicStatus::Detected:
            ++batch.detected;
            batch.count_at_detection.add(row.infectious_at_detection + row.exposed_at_detection);
            break;
        case EpidemicStatus::DiedOut: ++batch.died_out; break;
        case EpidemicStatus::Censored: ++batch.censored; break;
        }
    }
    batch.rows = std::move(rows);
    return batch;
}

} // namespace epiq
