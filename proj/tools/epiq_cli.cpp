// Command-line experiment runner: analytic solving, batch simulation,
// distribution verification, and the behaviour-change calculator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "epiq/branching.hpp"
#include "epiq/config.hpp"
#include "epiq/epidemic.hpp"
#include "epiq/queueing.hpp"
#include "epiq/stats.hpp"
#include "epiq/version.hpp"

namespace {

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
    std::optional<std::size_t> replications;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> process;
    std::optional<std::uint64_t> max_events;
    std::optional<std::string> output_path;
    std::optional<std::string> output_format;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--replications", ov.replications, "Override config replications");
    cmd->add_option("--seed", ov.seed, "Override config seed");
    cmd->add_option("--process", ov.process, "Override config process");
    cmd->add_option("--max-events", ov.max_events, "Override config caps.max_events");
    cmd->add_option("--output-path", ov.output_path, "Override config output.path");
    cmd->add_option("--output-format", ov.output_format, "Override config output.format (csv|json)");
}

epiq::ExperimentConfig load_config(const std::string& path, const Overrides& ov) {
    std::ifstream in(path);
    if (!in) throw epiq::ConfigError("config error: cannot open \"" + path + '"');
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw epiq::ConfigError(std::string("config error: ") + e.what());
    }
    auto cfg = epiq::config_from_json(j);
    if (ov.replications) cfg.replications = *ov.replications;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.process) cfg.process = epiq::process_from_name(*ov.process);
    if (ov.max_events) cfg.caps.max_events = *ov.max_events;
    if (ov.output_path) {
        if (!cfg.output) cfg.output = epiq::OutputSpec{};
        cfg.output->path = *ov.output_path;
    }
    if (ov.output_format) {
        if (!cfg.output) cfg.output = epiq::OutputSpec{};
        if (*ov.output_format != "csv" && *ov.output_format != "json")
            throw epiq::ConfigError("config error at /output/format: expected \"csv\" or \"json\"");
        cfg.output->format = *ov.output_format;
    }
    return cfg;
}

std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", t);
    return buf;
}

const char* branch_status_name(epiq::BranchStatus s) {
    switch (s) {
    case epiq::BranchStatus::Detected: return "detected";
    case epiq::BranchStatus::Extinct: return "extinct";
    case epiq::BranchStatus::Censored: return "censored";
    }
    return "?";
}

const char* queue_status_name(epiq::QueueStatus s) {
    switch (s) {
    case epiq::QueueStatus::QueueHit: return "queue_hit";
    case epiq::QueueStatus::QueueEmptyAtCatastrophe: return "empty_at_catastrophe";
    case epiq::QueueStatus::FirstBusyPeriodEnded: return "busy_period_ended";
    case epiq::QueueStatus::Censored: return "censored";
    }
    return "?";
}

const char* epidemic_status_name(epiq::EpidemicStatus s) {
    switch (s) {
    case epiq::EpidemicStatus::Detected: return "detected";
    case epiq::EpidemicStatus::DiedOut: return "died_out";
    case epiq::EpidemicStatus::Censored: return "censored";
    }
    return "?";
}

nlohmann::json distribution_to_json(const epiq::EmpiricalDistribution& emp) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [value, count] : emp.counts()) j[std::to_string(value)] = count;
    return j;
}

// Result of one batch in the shape the summary/verify writers need.
struct BatchOutcome {
    epiq::EmpiricalDistribution conditioned{1};
    nlohmann::json counts;
    double conditioning_fraction = 0.0; // detected / queue-hit fraction
    std::string rows_csv_header;
    std::vector<std::string> csv_rows;
    std::vector<nlohmann::json> json_rows;
};

BatchOutcome run_experiment(const epiq::ExperimentConfig& cfg, unsigned workers) {
    BatchOutcome out;
    switch (cfg.process) {
    case epiq::ProcessKind::Branching: {
        auto batch = epiq::run_batch(cfg.model, cfg.replications, cfg.seed, cfg.caps, workers);
        out.conditioned = batch.count_at_detection;
        out.counts = {{"detected", batch.detected},
                      {"extinct", batch.extinct},
                      {"censored", batch.censored}};
        out.conditioning_fraction = batch.detected_fraction();
        out.rows_csv_header = "index,status,count_at_detection,total_born,detection_time";
        out.csv_rows.reserve(batch.rows.size());
        for (std::size_t i = 0; i < batch.rows.size(); ++i) {
            const auto& r = batch.rows[i];
            const bool det = r.status == epiq::BranchStatus::Detected;
            std::string line = std::to_string(i);
            line += ',';
            line += branch_status_name(r.status);
            line += ',';
            if (det) line += std::to_string(r.count_at_detection);
            line += ',';
            line += std::to_string(r.total_born);
            line += ',';
            if (det) line += format_time(r.detection_time);
            out.csv_rows.push_back(std::move(line));
            nlohmann::json jr{{"index", i},
                              {"status", branch_status_name(r.status)},
                              {"total_born", r.total_born}};
            if (det) {
                jr["count_at_detection"] = r.count_at_detection;
                jr["detection_time"] = r.detection_time;
            }
            out.json_rows.push_back(std::move(jr));
        }
        return out;
    }
    case epiq::ProcessKind::QueuePs:
    case epiq::ProcessKind::QueuePsBusy:
    case epiq::ProcessKind::QueueLifo: {
        const auto discipline = cfg.process == epiq::ProcessKind::QueuePs
                                    ? epiq::QueueDiscipline::PsFromEmpty
                                    : (cfg.process == epiq::ProcessKind::QueuePsBusy
                                           ? epiq::QueueDiscipline::PsFirstBusyPeriod
                                           : epiq::QueueDiscipline::LifoFirstBusyPeriod);
        auto batch = epiq::run_batch(discipline, cfg.model, cfg.replications, cfg.seed, cfg.caps,
                                     workers);
        out.conditioned = batch.q_conditioned;
        out.counts = {{"queue_hit", batch.queue_hit},
                      {"empty_at_catastrophe", batch.empty_at_catastrophe},
                      {"busy_period_ended", batch.busy_period_ended},
                      {"censored", batch.censored}};
        out.conditioning_fraction = batch.hit_fraction();
        out.rows_csv_header = "index,status,q_at_catastrophe,time";
        for (std::size_t i = 0; i < batch.rows.size(); ++i) {
            const auto& r = batch.rows[i];
            std::string line = std::to_string(i);
            line += ',';
            line += queue_status_name(r.status);
            line += ',';
            line += std::to_string(r.q_at_catastrophe);
            line += ',';
            line += format_time(r.time);
            out.csv_rows.push_back(std::move(line));
            out.json_rows.push_back({{"index", i},
                                     {"status", queue_status_name(r.status)},
                                     {"q_at_catastrophe", r.q_at_catastrophe},
                                     {"time", r.time}});
        }
        return out;
    }
    case epiq::ProcessKind::Sir:
    case epiq::ProcessKind::Seir: {
        epiq::PopulationParams pp{*cfg.population_n, cfg.model, cfg.latent};
        auto batch = epiq::run_batch(pp, cfg.replications, cfg.seed, cfg.caps, workers);
        out.conditioned = batch.count_at_detection;
        out.counts = {{"detected", batch.detected},
                      {"died_out", batch.died_out},
                      {"censored", batch.censored}};
        out.conditioning_fraction = batch.detected_fraction();
        out.rows_csv_header =
            "index,status,I_at_detection,E_at_detection,S_remaining,total_ever_infected,"
            "detection_time";
        for (std::size_t i = 0; i < batch.rows.size(); ++i) {
            const auto& r = batch.rows[i];
            const bool det = r.status == epiq::EpidemicStatus::Detected;
            std::string line = std::to_string(i);
            line += ',';
            line += epidemic_status_name(r.status);
            line += ',';
            if (det) line += std::to_string(r.infectious_at_detection);
            line += ',';
            if (det) line += std::to_string(r.exposed_at_detection);
            line += ',';
            line += std::to_string(r.susceptibles_remaining);
            line += ',';
            line += std::to_string(r.total_ever_infected);
            line += ',';
            if (det) line += format_time(r.detection_time);
            out.csv_rows.push_back(std::move(line));
            nlohmann::json jr{{"index", i},
                              {"status", epidemic_status_name(r.status)},
                              {"S_remaining", r.susceptibles_remaining},
                              {"total_ever_infected", r.total_ever_infected}};
            if (det) {
                jr["I_at_detection"] = r.infectious_at_detection;
                jr["E_at_detection"] = r.exposed_at_detection;
                jr["detection_time"] = r.detection_time;
            }
            out.json_rows.push_back(std::move(jr));
        }
        return out;
    }
    }
    throw std::logic_error("unreachable process kind");
}

nlohmann::json make_summary(const epiq::ExperimentConfig& cfg, const BatchOutcome& run) {
    nlohmann::json summary{{"version", std::string(epiq::kVersion)},
                           {"config_hash", epiq::config_hash(cfg)},
                           {"process", epiq::process_name(cfg.process)},
                           {"seed", cfg.seed},
                           {"replications", cfg.replications},
                           {"counts", run.counts},
                           {"conditioning_fraction", run.conditioning_fraction},
                           {"conditioned_distribution", distribution_to_json(run.conditioned)}};
    if (run.conditioned.total() > 0)
        summary["p_hat"] = epiq::geometric_mle(run.conditioned);
    else
        summary["p_hat"] = nullptr;
    return summary;
}

int cmd_analytic(double lambda, double delta, const std::string& lifetime_json) {
    epiq::ModelParams model{lambda, delta,
                            epiq::LifetimeSpec::from_json(nlohmann::json::parse(lifetime_json))};
    try {
        const auto sol = epiq::solve_pi(model);
        nlohmann::json j{{"pi", sol.pi},
                         {"p", sol.p},
                         {"residual", sol.residual},
                         {"iterations", sol.iterations},
                         {"mean_at_detection", 1.0 / sol.p},
                         {"detection_probability", 1.0 - sol.pi}};
        std::cout << j.dump(2) << '\n';
        return kExitAccept;
    } catch (const epiq::NonConvergence& e) {
        nlohmann::json j{{"error", e.what()},
                         {"residual", e.residual},
                         {"iterations", e.iterations}};
        std::cerr << j.dump(2) << '\n';
        return kExitNumerical;
    }
}

int cmd_simulate(const epiq::ExperimentConfig& cfg, unsigned workers,
                 const std::string& trace_path, std::size_t trace_reps) {
    if (!cfg.output)
        throw epiq::ConfigError("config error at /output: required by the simulate command");

    const auto run = run_experiment(cfg, workers);

    const bool csv = cfg.output->format == "csv";
    const std::string rows_path = cfg.output->path + (csv ? ".csv" : ".jsonl");
    {
        std::ofstream rows(rows_path);
        if (!rows) throw epiq::ConfigError("config error: cannot write \"" + rows_path + '"');
        if (csv) {
            rows << run.rows_csv_header << '\n';
            for (const auto& line : run.csv_rows) rows << line << '\n';
        } else {
            for (const auto& line : run.json_rows) rows << line.dump() << '\n';
        }
    }

    const auto summary = make_summary(cfg, run);
    const std::string summary_path = cfg.output->path + ".summary.json";
    {
        std::ofstream out(summary_path);
        if (!out) throw epiq::ConfigError("config error: cannot write \"" + summary_path + '"');
        out << summary.dump(2) << '\n';
    }
    std::cout << summary.dump(2) << '\n';

    if (!trace_path.empty()) {
        if (cfg.process != epiq::ProcessKind::Branching)
            throw epiq::ConfigError("--export-traces is only available for the branching process");
        std::ofstream out(trace_path);
        if (!out) throw epiq::ConfigError("config error: cannot write \"" + trace_path + '"');
        const std::size_t count = std::min(trace_reps, cfg.replications);
        for (std::size_t i = 0; i < count; ++i) {
            // replication i re-run with its own source reproduces the batch
            // outcome exactly, this time with the event log attached
            auto rng = epiq::RandomSource::for_replication(cfg.seed, i);
            const auto outcome = epiq::simulate_first_detection(cfg.model, rng, cfg.caps, true);
            epiq::write_trace_jsonl(epiq::time_change_transform(*outcome.trajectory), out,
                                    static_cast<long>(i));
        }
    }
    return kExitAccept;
}

int cmd_verify(const epiq::ExperimentConfig& cfg,
               const std::optional<epiq::ExperimentConfig>& against,
               std::optional<double> p_override, const std::string& report_path, unsigned workers) {
    const auto run = run_experiment(cfg, workers);

    nlohmann::json report{{"version", std::string(epiq::kVersion)},
                          {"config_hash", epiq::config_hash(cfg)},
                          {"replications", cfg.replications},
                          {"seed", cfg.seed},
                          {"conditioned_samples", run.conditioned.total()}};

    epiq::GofReport gof;
    if (against) {
        const auto other = run_experiment(*against, workers);
        gof = epiq::two_sample_chi_square(run.conditioned, other.conditioned);
        report["mode"] = "two_sample";
        report["against_config_hash"] = epiq::config_hash(*against);
    } else {
        double p = 0.0;
        if (p_override) {
            p = *p_override;
            report["mode"] = "fixed_p";
        } else {
            const auto sol = epiq::solve_pi(cfg.model);
            p = sol.p;
            report["pi"] = sol.pi;
            report["residual"] = sol.residual;
            report["mode"] = "analytic";
        }
        report["p"] = p;
        gof = epiq::chi_square_gof(run.conditioned, epiq::geometric_pmf(p, 1));
    }

    const bool accept = gof.p_value > 0.001;
    report["gof"] = gof.to_json();
    report["significance"] = 0.001;
    report["decision"] = accept ? "accept" : "reject";

    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw epiq::ConfigError("config error: cannot write \"" + report_path + '"');
        out << report.dump(2) << '\n';
    }
    std::cout << report.dump(2) << '\n';
    return accept ? kExitAccept : kExitReject;
}

int cmd_behaviour_change(double p1, double lambda2, double mu, double tau, long k_max) {
    const auto pmf = epiq::post_detection_pmf(p1, lambda2, mu, tau);
    const auto bd = epiq::birth_death_pmf(lambda2, mu, tau);
    nlohmann::json probs = nlohmann::json::array();
    for (long k = 0; k <= k_max; ++k) probs.push_back({{"k", k}, {"probability", pmf.at(k)}});
    nlohmann::json j{{"q0", bd.at(0)}, {"p1", p1}, {"lambda2", lambda2},
                     {"mu", mu},       {"tau", tau}, {"pmf", probs}};
    std::cout << j.dump(2) << '\n';
    return kExitAccept;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Epidemic / branching / queueing first-detection toolkit"};
    app.require_subcommand(1);

    // analytic
    double lambda = 0.0, delta = 0.0;
    std::string lifetime_json;
    auto* analytic = app.add_subcommand("analytic", "Solve for pi and p");
    analytic->add_option("--lambda", lambda, "Contact/birth/arrival rate")->required();
    analytic->add_option("--delta", delta, "Detection/catastrophe rate")->required();
    analytic->add_option("--lifetime", lifetime_json, "Lifetime spec as JSON")->required();

    // simulate
    std::string sim_config;
    unsigned workers = 0;
    std::string trace_path;
    std::size_t trace_reps = 1000;
    Overrides sim_overrides;
    auto* simulate = app.add_subcommand("simulate", "Run a batch and write rows + summary");
    simulate->add_option("--config", sim_config, "Experiment config (JSON)")->required();
    simulate->add_option("--workers", workers, "Worker threads (0 = hardware)");
    simulate->add_option("--export-traces", trace_path,
                         "Write time-changed queue traces (branching only)");
    simulate->add_option("--trace-reps", trace_reps, "Replications to trace (default 1000)");
    add_override_flags(simulate, sim_overrides);

    // verify
    std::string verify_config, against_config, report_path;
    std::optional<double> p_override;
    unsigned verify_workers = 0;
    Overrides verify_overrides;
    auto* verify = app.add_subcommand("verify", "Test the conditioned law; exit 0 iff it passes");
    verify->add_option("--config", verify_config, "Experiment config (JSON)")->required();
    verify->add_option("--against", against_config, "Second config for a two-sample test");
    verify->add_option("--p", p_override, "Test against geometric(p) instead of the analytic p");
    verify->add_option("--report", report_path, "Write the GOF report to this file");
    verify->add_option("--workers", verify_workers, "Worker threads (0 = hardware)");
    add_override_flags(verify, verify_overrides);

    // behaviour-change
    double p1 = 0.0, lambda2 = 0.0, mu = 0.0, tau = 0.0;
    long k_max = 20;
    auto* behaviour =
        app.add_subcommand("behaviour-change", "Post-detection population distribution");
    behaviour->add_option("--p1", p1, "Geometric parameter at first detection")->required();
    behaviour->add_option("--lambda2", lambda2, "Post-detection birth rate")->required();
    behaviour->add_option("--mu", mu, "Recovery rate")->required();
    behaviour->add_option("--tau", tau, "Time since first detection")->required();
    behaviour->add_option("--k-max", k_max, "Largest k to print (default 20)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (analytic->parsed()) return cmd_analytic(lambda, delta, lifetime_json);
        if (simulate->parsed())
            return cmd_simulate(load_config(sim_config, sim_overrides), workers, trace_path,
                                trace_reps);
        if (verify->parsed()) {
            std::optional<epiq::ExperimentConfig> against;
            if (!against_config.empty()) against = load_config(against_config, Overrides{});
            return cmd_verify(load_config(verify_config, verify_overrides), against, p_override,
                              report_path, verify_workers);
        }
        if (behaviour->parsed()) return cmd_behaviour_change(p1, lambda2, mu, tau, k_max);
    } catch (const epiq::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitUsage;
    } catch (const epiq::NonConvergence& e) {
        std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual << ")\n";
        return kExitNumerical;
    } catch (const epiq::InsufficientData& e) {
        std::cerr << "insufficient data: " << e.what() << "; raise replications\n";
        return kExitNumerical;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "json error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
