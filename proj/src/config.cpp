#include "epiq/config.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace epiq {

namespace {

[[noreturn]] void fail(const std::string& pointer, const std::string& what) {
    throw ConfigError("config error at " + pointer + ": " + what);
}

const nlohmann::json& member(const nlohmann::json& j, const std::string& pointer,
                             const char* field) {
    if (!j.contains(field)) fail(pointer + "/" + field, "missing required field");
    return j[field];
}

double number(const nlohmann::json& j, const std::string& pointer, const char* field) {
    const auto& v = member(j, pointer, field);
    if (!v.is_number()) fail(pointer + "/" + field, "expected a number");
    return v.get<double>();
}

std::uint64_t non_negative_integer(const nlohmann::json& j, const std::string& pointer,
                                   const char* field) {
    const auto& v = member(j, pointer, field);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        fail(pointer + "/" + field, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

} // namespace

std::string process_name(ProcessKind kind) {
    switch (kind) {
    case ProcessKind::Sir: return "sir";
    case ProcessKind::Seir: return "seir";
    case ProcessKind::Branching: return "branching";
    case ProcessKind::QueuePs: return "queue_ps";
    case ProcessKind::QueuePsBusy: return "queue_ps_busy";
    case ProcessKind::QueueLifo: return "queue_lifo";
    }
    return "?";
}

ProcessKind process_from_name(const std::string& name) {
    if (name == "sir") return ProcessKind::Sir;
    if (name == "seir") return ProcessKind::Seir;
    if (name == "branching") return ProcessKind::Branching;
    if (name == "queue_ps") return ProcessKind::QueuePs;
    if (name == "queue_ps_busy") return ProcessKind::QueuePsBusy;
    if (name == "queue_lifo") return ProcessKind::QueueLifo;
    throw ConfigError("config error at /process: unknown process \"" + name +
                      "\" (expected sir|seir|branching|queue_ps|queue_ps_busy|queue_lifo)");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail("/", "expected a JSON object");

    const auto& jmodel = member(j, "", "model");
    if (!jmodel.is_object()) fail("/model", "expected an object");
    const double lambda = number(jmodel, "/model", "lambda");
    const double delta = number(jmodel, "/model", "delta");
    LifetimeSpec lifetime = [&] {
        try {
            return LifetimeSpec::from_json(member(jmodel, "/model", "lifetime"));
        } catch (const std::invalid_argument& e) {
            fail("/model/lifetime", e.what());
        }
    }();

    ExperimentConfig cfg{[&] {
                             try {
                                 return ModelParams(lambda, delta, std::move(lifetime));
                             } catch (const std::invalid_argument& e) {
                                 fail("/model", e.what());
                             }
                         }(),
                         ProcessKind::Branching,
                         {},
                         {},
                         1,
                         0,
                         {},
                         {}};

    const auto& jprocess = member(j, "", "process");
    if (!jprocess.is_string()) fail("/process", "expected a string");
    cfg.process = process_from_name(jprocess.get<std::string>());

    const bool needs_population =
        cfg.process == ProcessKind::Sir || cfg.process == ProcessKind::Seir;
    if (needs_population) {
        const auto n = non_negative_integer(j, "", "population_n");
        if (n < 2) fail("/population_n", "must be >= 2");
        cfg.population_n = static_cast<long>(n);
    } else if (j.contains("population_n")) {
        fail("/population_n", "only valid for sir|seir");
    }

    if (cfg.process == ProcessKind::Seir) {
        try {
            cfg.latent = LifetimeSpec::from_json(member(j, "", "latent"));
        } catch (const std::invalid_argument& e) {
            fail("/latent", e.what());
        }
    } else if (j.contains("latent")) {
        fail("/latent", "only valid for seir");
    }

    const auto replications = non_negative_integer(j, "", "replications");
    if (replications < 1) fail("/replications", "must be >= 1");
    cfg.replications = static_cast<std::size_t>(replications);

    cfg.seed = non_negative_integer(j, "", "seed");

    if (j.contains("caps")) {
        const auto& jcaps = j["caps"];
        if (!jcaps.is_object()) fail("/caps", "expected an object");
        const auto max_events = non_negative_integer(jcaps, "/caps", "max_events");
        if (max_events < 1) fail("/caps/max_events", "must be >= 1");
        cfg.caps.max_events = max_events;
    }

    if (j.contains("output")) {
        const auto& jout = j["output"];
        if (!jout.is_object()) fail("/output", "expected an object");
        OutputSpec out;
        if (jout.contains("format")) {
            if (!jout["format"].is_string()) fail("/output/format", "expected a string");
            out.format = jout["format"].get<std::string>();
            if (out.format != "csv" && out.format != "json")
                fail("/output/format", "expected \"csv\" or \"json\"");
        }
        const auto& jpath = member(jout, "/output", "path");
        if (!jpath.is_string()) fail("/output/path", "expected a string");
        out.path = jpath.get<std::string>();
        cfg.output = std::move(out);
    }

    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j{
        {"model",
         {{"lambda", cfg.model.lambda},
          {"delta", cfg.model.delta},
          {"lifetime", cfg.model.lifetime.to_json()}}},
        {"process", process_name(cfg.process)},
        {"replications", cfg.replications},
        {"seed", cfg.seed},
        {"caps", {{"max_events", cfg.caps.max_events}}},
    };
    if (cfg.population_n) j["population_n"] = *cfg.population_n;
    if (cfg.latent) j["latent"] = cfg.latent->to_json();
    if (cfg.output) j["output"] = {{"format", cfg.output->format}, {"path", cfg.output->path}};
    return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
    // hash the experiment identity only; where the rows get written is not
    // part of what was run
    auto j = config_to_json(cfg);
    j.erase("output");
    const std::string canonical = j.dump();
    std::uint64_t hash = 0xCBF29CE484222325ull;
    for (unsigned char c : canonical) {
        hash ^= c;
        hash *= 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

} // namespace epiq
