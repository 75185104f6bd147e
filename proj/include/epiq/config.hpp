#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "epiq/model.hpp"

namespace epiq {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ProcessKind { Sir, Seir, Branching, QueuePs, QueuePsBusy, QueueLifo };

std::string process_name(ProcessKind kind);
ProcessKind process_from_name(const std::string& name);

struct OutputSpec {
    std::string format = "csv"; // "csv" | "json"
    std::string path;           // prefix: <path>.csv|.jsonl and <path>.summary.json
};

// One experiment: a process, its parameters, and the replication plan.
// population_n is required exactly for sir/seir, latent exactly for seir.
struct ExperimentConfig {
    ModelParams model;
    ProcessKind process;
    std::optional<long> population_n;
    std::optional<LifetimeSpec> latent;
    std::size_t replications = 1;
    std::uint64_t seed = 0;
    EventCaps caps;
    std::optional<OutputSpec> output;
};

// Parses and validates; errors name the offending field by JSON pointer
// (e.g. "/model/lambda").
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// FNV-1a 64 over the canonical JSON dump, excluding the output section (it
// identifies the experiment, not where rows were written); stable across runs
// so summaries can be traced back to their configuration.
std::string config_hash(const ExperimentConfig& cfg);

} // namespace epiq
